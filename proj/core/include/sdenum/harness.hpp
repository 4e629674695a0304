#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sdenum/system.hpp"
#include "sdenum/wiener.hpp"

namespace sdenum {

// Integrates one trajectory at the given coarse level, consuming increments
// (and double Ito integrals where the scheme needs them) from the shared
// grid. Divergence is flagged per the guard in system.hpp; states past the
// divergence step are NaN.
Trajectory integrate(const SdeSystem& system, const SchemeSpec& scheme,
                     const WienerGrid& grid, int coarse_level,
                     std::span<const double> x0);

struct ReferenceSolution {
  Trajectory trajectory;
  std::string kind;  // e.g. "exact", "balanced-milstein-commutative@level14"
  bool order_warning = false;
};

// Terminal-time reference for error measurement: the exact solution when the
// system has one, otherwise the balanced Milstein scheme at the finest level
// the grid supports (commutative form when applicable). Systems without a
// levy coefficient fall back to balanced Euler and carry an order warning.
ReferenceSolution reference_solution(const SdeSystem& system,
                                     const WienerGrid& grid,
                                     std::span<const double> x0);

struct FitResult {
  double slope = 0.0;
  double slope_stderr = 0.0;
};

// Ordinary least squares of log2(err) against log2(h); the slope estimates
// the mean-square convergence order. Requires >= 3 positive samples.
FitResult fit_order(std::span<const double> h, std::span<const double> err);

struct LevelStat {
  int level = 0;
  double h = 0.0;
  double rms_error = 0.0;
  double rms_stderr = 0.0;
  double diverged_fraction = 0.0;
  std::int64_t paths_used = 0;
};

struct ConvergenceReport {
  std::string problem;
  std::string scheme;
  std::vector<LevelStat> levels;
  double fitted_order = 0.0;
  double slope_stderr = 0.0;
  bool fit_valid = false;
  bool unstable = false;  // > 1% of paths diverged at some level
  std::string reference_kind;
  bool reference_order_warning = false;
  double t0 = 0.0;
  double T = 0.0;
  std::vector<double> x0;  // empty when a sampler was used
  int fine_level = 0;
  std::int64_t num_paths = 0;
  std::uint64_t seed = 0;
};

struct CompareReport {
  std::vector<ConvergenceReport> schemes;
};

// Coupled-path convergence study: per path one fine grid is generated, the
// reference is built once, and every scheme is integrated at every coarse
// level on that same grid (common random numbers). Accumulation is chunked
// and reduced in chunk order, so results are independent of `threads`.
// Throws StudyError when every level of a scheme loses all paths.
CompareReport compare_study(const SdeSystem& system,
                            std::span<const SchemeSpec> schemes,
                            const SimConfig& config, int threads = 0);

ConvergenceReport convergence_study(const SdeSystem& system,
                                    const SchemeSpec& scheme,
                                    const SimConfig& config, int threads = 0);

struct MomentLevelStat {
  int level = 0;
  double h = 0.0;
  std::vector<double> times;
  // Indexed [p][time]: sample E ||X_k||^(2p) over paths still valid at k.
  std::vector<std::vector<double>> estimates;
  std::vector<std::vector<double>> std_errors;
  std::vector<double> max_over_time;  // per p
  double diverged_fraction = 0.0;
};

struct MomentReport {
  std::string problem;
  std::string scheme;
  std::vector<double> p_values;
  std::vector<MomentLevelStat> levels;
  double t0 = 0.0;
  double T = 0.0;
  std::vector<double> x0;
  int fine_level = 0;
  std::int64_t num_paths = 0;
  std::uint64_t seed = 0;
};

// Sample moments E ||X_k||^(2p) on each requested coarse grid, with
// divergence fractions. Paths are excluded from a time point only once
// diverged; divergence is always reported, never silently dropped.
MomentReport moment_study(const SdeSystem& system, const SchemeSpec& scheme,
                          const SimConfig& config,
                          std::span<const double> p_list, int threads = 0);

}  // namespace sdenum
