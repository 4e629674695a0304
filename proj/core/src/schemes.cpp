#include "sdenum/schemes.hpp"

#include <algorithm>
#include <cmath>

namespace sdenum {

namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// noise_sum <- sum_r sigma_r(t, x) xi_r sqrt(h)
void diffusion_sum(const SdeSystem& sys, const StepInputs& in, StepScratch& ws) {
  auto sum = ws.noise_sum();
  std::fill(sum.begin(), sum.end(), 0.0);
  const double sqrt_h = std::sqrt(in.h);
  for (int r = 0; r < sys.dim_noise; ++r) {
    auto col = ws.column();
    sys.diffusion(in.t, in.x, r, col);
    const double w = in.xi[static_cast<std::size_t>(r)] * sqrt_h;
    for (std::size_t n = 0; n < sum.size(); ++n) sum[n] += w * col[n];
  }
}

// out <- x + tamed_drift(a h) + sin(noise_sum); the drift block is either
// sin(a h) or a h / (1 + h |a|).
void balanced_base(const SdeSystem& sys, const StepInputs& in, StepScratch& ws,
                   std::span<double> out, DriftTaming drift_taming) {
  auto a = ws.drift();
  sys.drift(in.t, in.x, a);
  diffusion_sum(sys, in, ws);
  auto sum = ws.noise_sum();

  if (drift_taming == DriftTaming::Sine) {
    for (std::size_t n = 0; n < out.size(); ++n) {
      out[n] = in.x[n] + std::sin(a[n] * in.h) + std::sin(sum[n]);
    }
  } else {
    const double denom = 1.0 + in.h * norm2(a);
    for (std::size_t n = 0; n < out.size(); ++n) {
      out[n] = in.x[n] + a[n] * in.h / denom + std::sin(sum[n]);
    }
  }
}

// correction <- sum_{i,r} levy(i, r) * weight(i, r)
template <typename WeightFn>
void levy_weighted_sum(const SdeSystem& sys, const StepInputs& in,
                       StepScratch& ws, WeightFn&& weight) {
  auto corr = ws.correction();
  std::fill(corr.begin(), corr.end(), 0.0);
  for (int i = 0; i < sys.dim_noise; ++i) {
    for (int r = 0; r < sys.dim_noise; ++r) {
      const double w = weight(i, r);
      if (w == 0.0) continue;
      auto col = ws.column();
      sys.levy(in.t, in.x, i, r, col);
      for (std::size_t n = 0; n < corr.size(); ++n) corr[n] += w * col[n];
    }
  }
}

// Correction weights for the commutative Milstein forms:
// (xi_i xi_r - delta_ir) h / 2, using only Brownian increments.
double commutative_weight(const StepInputs& in, int i, int r) {
  const double xi_i = in.xi[static_cast<std::size_t>(i)];
  const double xi_r = in.xi[static_cast<std::size_t>(r)];
  const double delta = (i == r) ? 1.0 : 0.0;
  return 0.5 * (xi_i * xi_r - delta) * in.h;
}

// numerator <- a h + sum_r sigma_r xi_r sqrt(h), reusing the scratch layout
// of the balanced schemes.
void euler_increment(const SdeSystem& sys, const StepInputs& in,
                     StepScratch& ws) {
  auto a = ws.drift();
  sys.drift(in.t, in.x, a);
  diffusion_sum(sys, in, ws);
  auto sum = ws.noise_sum();
  for (std::size_t n = 0; n < sum.size(); ++n) sum[n] += a[n] * in.h;
}

}  // namespace

void sine_map(std::span<const double> v, std::span<double> out) {
  for (std::size_t n = 0; n < v.size(); ++n) out[n] = std::sin(v[n]);
}

StepScratch::StepScratch(int dim_state, int dim_noise)
    : drift_(static_cast<std::size_t>(dim_state)),
      column_(static_cast<std::size_t>(dim_state)),
      noise_sum_(static_cast<std::size_t>(dim_state)),
      correction_(static_cast<std::size_t>(dim_state)) {
  (void)dim_noise;
}

void balanced_euler_step(const SdeSystem& sys, const StepInputs& in,
                         StepScratch& ws, std::span<double> out,
                         DriftTaming drift_taming) {
  balanced_base(sys, in, ws, out, drift_taming);
}

void balanced_milstein_step(const SdeSystem& sys, const StepInputs& in,
                            StepScratch& ws, std::span<double> out,
                            DriftTaming drift_taming) {
  if (!sys.has_levy()) {
    throw CapabilityError("balanced_milstein_step: levy coefficient missing");
  }
  if (in.ito.size() != static_cast<std::size_t>(sys.dim_noise) *
                           static_cast<std::size_t>(sys.dim_noise)) {
    throw CapabilityError("balanced_milstein_step: double Ito integrals missing");
  }
  balanced_base(sys, in, ws, out, drift_taming);
  const std::size_t m = static_cast<std::size_t>(sys.dim_noise);
  levy_weighted_sum(sys, in, ws, [&](int i, int r) {
    return in.ito[static_cast<std::size_t>(i) * m + static_cast<std::size_t>(r)];
  });
  auto corr = ws.correction();
  for (std::size_t n = 0; n < out.size(); ++n) out[n] += std::sin(corr[n]);
}

void balanced_milstein_commutative_step(const SdeSystem& sys,
                                        const StepInputs& in, StepScratch& ws,
                                        std::span<double> out,
                                        DriftTaming drift_taming) {
  if (!sys.has_levy()) {
    throw CapabilityError(
        "balanced_milstein_commutative_step: levy coefficient missing");
  }
  if (sys.commutative != Commutativity::Yes) {
    throw CapabilityError(
        "balanced_milstein_commutative_step: system not marked commutative");
  }
  balanced_base(sys, in, ws, out, drift_taming);
  levy_weighted_sum(sys, in, ws,
                    [&](int i, int r) { return commutative_weight(in, i, r); });
  auto corr = ws.correction();
  for (std::size_t n = 0; n < out.size(); ++n) out[n] += std::sin(corr[n]);
}

void fully_tamed_euler_step(const SdeSystem& sys, const StepInputs& in,
                            StepScratch& ws, std::span<double> out) {
  euler_increment(sys, in, ws);
  auto delta = ws.noise_sum();
  const double denom = std::max(1.0, in.h * norm2(delta));
  for (std::size_t n = 0; n < out.size(); ++n) {
    out[n] = in.x[n] + delta[n] / denom;
  }
}

void trezhang_tamed_step(const SdeSystem& sys, const StepInputs& in,
                         StepScratch& ws, std::span<double> out) {
  auto a = ws.drift();
  sys.drift(in.t, in.x, a);

  // Denominator 1 + h |a| + sqrt(h) sum_r |sigma_r xi_r|, accumulated while
  // building the numerator.
  const double sqrt_h = std::sqrt(in.h);
  auto sum = ws.noise_sum();
  std::fill(sum.begin(), sum.end(), 0.0);
  double noise_norms = 0.0;
  for (int r = 0; r < sys.dim_noise; ++r) {
    auto col = ws.column();
    sys.diffusion(in.t, in.x, r, col);
    const double xi_r = in.xi[static_cast<std::size_t>(r)];
    noise_norms += norm2(col) * std::abs(xi_r);
    for (std::size_t n = 0; n < sum.size(); ++n) {
      sum[n] += col[n] * xi_r * sqrt_h;
    }
  }
  const double denom = 1.0 + in.h * norm2(a) + noise_norms * sqrt_h;
  for (std::size_t n = 0; n < out.size(); ++n) {
    out[n] = in.x[n] + (a[n] * in.h + sum[n]) / denom;
  }
}

void sabanis_tamed_step(const SdeSystem& sys, const StepInputs& in, double beta,
                        StepScratch& ws, std::span<double> out) {
  if (!(beta > 0.0 && beta <= 1.0)) {
    throw CapabilityError("sabanis_tamed_step: beta must lie in (0, 1]");
  }
  auto a = ws.drift();
  sys.drift(in.t, in.x, a);

  const double sqrt_h = std::sqrt(in.h);
  const double h_beta = std::pow(in.h, beta);
  auto sum = ws.noise_sum();
  std::fill(sum.begin(), sum.end(), 0.0);
  double sigma_norms = 0.0;
  for (int r = 0; r < sys.dim_noise; ++r) {
    auto col = ws.column();
    sys.diffusion(in.t, in.x, r, col);
    sigma_norms += norm2(col);
    const double w = in.xi[static_cast<std::size_t>(r)] * sqrt_h;
    for (std::size_t n = 0; n < sum.size(); ++n) sum[n] += w * col[n];
  }
  const double denom = 1.0 + (norm2(a) + sigma_norms) * h_beta;
  for (std::size_t n = 0; n < out.size(); ++n) {
    out[n] = in.x[n] + (a[n] * in.h + sum[n]) / denom;
  }
}

void classical_euler_step(const SdeSystem& sys, const StepInputs& in,
                          StepScratch& ws, std::span<double> out) {
  euler_increment(sys, in, ws);
  auto delta = ws.noise_sum();
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = in.x[n] + delta[n];
}

void classical_milstein_step(const SdeSystem& sys, const StepInputs& in,
                             StepScratch& ws, std::span<double> out) {
  if (!sys.has_levy()) {
    throw CapabilityError("classical_milstein_step: levy coefficient missing");
  }
  if (in.ito.size() != static_cast<std::size_t>(sys.dim_noise) *
                           static_cast<std::size_t>(sys.dim_noise)) {
    throw CapabilityError("classical_milstein_step: double Ito integrals missing");
  }
  classical_euler_step(sys, in, ws, out);
  const std::size_t m = static_cast<std::size_t>(sys.dim_noise);
  levy_weighted_sum(sys, in, ws, [&](int i, int r) {
    return in.ito[static_cast<std::size_t>(i) * m + static_cast<std::size_t>(r)];
  });
  auto corr = ws.correction();
  for (std::size_t n = 0; n < out.size(); ++n) out[n] += corr[n];
}

void classical_milstein_commutative_step(const SdeSystem& sys,
                                         const StepInputs& in, StepScratch& ws,
                                         std::span<double> out) {
  if (!sys.has_levy()) {
    throw CapabilityError(
        "classical_milstein_commutative_step: levy coefficient missing");
  }
  if (sys.commutative != Commutativity::Yes) {
    throw CapabilityError(
        "classical_milstein_commutative_step: system not marked commutative");
  }
  classical_euler_step(sys, in, ws, out);
  levy_weighted_sum(sys, in, ws,
                    [&](int i, int r) { return commutative_weight(in, i, r); });
  auto corr = ws.correction();
  for (std::size_t n = 0; n < out.size(); ++n) out[n] += corr[n];
}

void apply_scheme(const SdeSystem& sys, const SchemeSpec& scheme,
                  const StepInputs& in, StepScratch& ws, std::span<double> out) {
  switch (scheme.kind) {
    case SchemeKind::BalancedEuler:
      balanced_euler_step(sys, in, ws, out, scheme.drift_taming);
      return;
    case SchemeKind::BalancedMilstein:
      balanced_milstein_step(sys, in, ws, out, scheme.drift_taming);
      return;
    case SchemeKind::BalancedMilsteinCommutative:
      balanced_milstein_commutative_step(sys, in, ws, out, scheme.drift_taming);
      return;
    case SchemeKind::FullyTamedEuler:
      fully_tamed_euler_step(sys, in, ws, out);
      return;
    case SchemeKind::TreZhangTamed:
      trezhang_tamed_step(sys, in, ws, out);
      return;
    case SchemeKind::SabanisTamed:
      sabanis_tamed_step(sys, in, scheme.beta, ws, out);
      return;
    case SchemeKind::ClassicalEuler:
      classical_euler_step(sys, in, ws, out);
      return;
    case SchemeKind::ClassicalMilstein:
      classical_milstein_step(sys, in, ws, out);
      return;
    case SchemeKind::ClassicalMilsteinCommutative:
      classical_milstein_commutative_step(sys, in, ws, out);
      return;
  }
  throw std::invalid_argument("apply_scheme: unknown scheme kind");
}

}  // namespace sdenum
