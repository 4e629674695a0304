#pragma once

#include <span>
#include <vector>

#include "sdenum/system.hpp"

namespace sdenum {

// Componentwise sine. Applied to each increment block of the balanced
// schemes; keeps every block in [-1, 1] without changing small arguments by
// more than |y|^3 / 6.
void sine_map(std::span<const double> v, std::span<double> out);

// Inputs for one step: the normalized increments xi = delta_w / sqrt(h) and,
// for the general Milstein forms only, the m x m double Ito integrals.
struct StepInputs {
  double t = 0.0;
  std::span<const double> x;
  double h = 0.0;
  std::span<const double> xi;
  std::span<const double> ito;  // m*m row-major; empty unless needed
};

// Reusable buffers sized for one system; lets the steppers stay pure and
// allocation-free. Each worker thread owns its own scratch.
class StepScratch {
 public:
  StepScratch(int dim_state, int dim_noise);

  std::span<double> drift() { return drift_; }
  std::span<double> column() { return column_; }
  std::span<double> noise_sum() { return noise_sum_; }
  std::span<double> correction() { return correction_; }

 private:
  std::vector<double> drift_;       // a(t, x)
  std::vector<double> column_;      // one diffusion / levy column
  std::vector<double> noise_sum_;   // sum_r sigma_r xi_r sqrt(h)
  std::vector<double> correction_;  // Milstein correction argument
};

// One-step maps. All write the next state into `out` (size d) and never
// fail on numeric content; non-finite inputs propagate to the divergence
// guard in the harness.
void balanced_euler_step(const SdeSystem& system, const StepInputs& in,
                         StepScratch& ws, std::span<double> out,
                         DriftTaming drift_taming = DriftTaming::Sine);
void balanced_milstein_step(const SdeSystem& system, const StepInputs& in,
                            StepScratch& ws, std::span<double> out,
                            DriftTaming drift_taming = DriftTaming::Sine);
void balanced_milstein_commutative_step(const SdeSystem& system,
                                        const StepInputs& in, StepScratch& ws,
                                        std::span<double> out,
                                        DriftTaming drift_taming = DriftTaming::Sine);
void fully_tamed_euler_step(const SdeSystem& system, const StepInputs& in,
                            StepScratch& ws, std::span<double> out);
void trezhang_tamed_step(const SdeSystem& system, const StepInputs& in,
                         StepScratch& ws, std::span<double> out);
void sabanis_tamed_step(const SdeSystem& system, const StepInputs& in,
                        double beta, StepScratch& ws, std::span<double> out);
void classical_euler_step(const SdeSystem& system, const StepInputs& in,
                          StepScratch& ws, std::span<double> out);
void classical_milstein_step(const SdeSystem& system, const StepInputs& in,
                             StepScratch& ws, std::span<double> out);
void classical_milstein_commutative_step(const SdeSystem& system,
                                         const StepInputs& in, StepScratch& ws,
                                         std::span<double> out);

// Dispatch on the scheme spec. Capability violations throw CapabilityError;
// call validate_capability up front to fail before stepping.
void apply_scheme(const SdeSystem& system, const SchemeSpec& scheme,
                  const StepInputs& in, StepScratch& ws, std::span<double> out);

}  // namespace sdenum
