#pragma once

#include <map>
#include <string>
#include <vector>

#include "sdenum/system.hpp"

namespace sdenum {

// Built-in test systems with declared growth metadata. Coefficients are
// plain callables; derivative coefficients are hand-derived and hard-coded.

// d = m = 1, a(x) = x - x^3, sigma(x) = sigma0 (additive). Monotone with
// c1 = 1; kappa = 2.
SdeSystem make_ginzburg_landau(double sigma0);

// 3/2 stochastic volatility: d = m = 1, a(x) = lambda x (theta - x),
// sigma(x) = mu |x|^(3/2), levy(x) = (3/2) mu^2 x |x|. kappa = 2.
// The preset records the moment headroom 2 lambda / mu^2 + 1 and appends a
// warning note when it falls below the level needed for a bounded second
// moment of the balanced Euler iterates (9 for kappa = 2).
SdeSystem make_three_halves(double lambda, double theta, double mu);

// Largest admissible 2 p0 for the 3/2 model parameters.
double three_halves_moment_headroom(double lambda, double mu);

// Geometric Brownian motion with exact solution
// X(t) = X0 exp((mu - b^2/2)(t - t0) + b W(t)); the Lipschitz control case.
SdeSystem make_gbm(double mu, double b);

// d = m = 2 with genuinely non-commutative noise:
// a(x) = x - damping |x|^2 x, sigma_1 = b (x2, x1), sigma_2 = b (x1, -x2).
// The levy columns are linear in x and hard-coded; kappa = 2, kappa' = 1.
SdeSystem make_noncommutative_2d(double damping, double b);

// Name-addressable registry used by the CLI. Unknown parameter keys are
// rejected; missing keys fall back to the documented defaults.
std::vector<std::string> problem_names();
SdeSystem make_problem(const std::string& name,
                       const std::map<std::string, double>& params);
std::string problem_parameter_help(const std::string& name);

}  // namespace sdenum
