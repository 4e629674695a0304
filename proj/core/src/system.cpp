#include "sdenum/system.hpp"

#include <algorithm>
#include <cmath>

namespace sdenum {

void SdeSystem::validate() const {
  if (dim_state < 1) throw std::invalid_argument("SdeSystem: dim_state must be >= 1");
  if (dim_noise < 1) throw std::invalid_argument("SdeSystem: dim_noise must be >= 1");
  if (!drift) throw std::invalid_argument("SdeSystem: drift coefficient missing");
  if (!diffusion) throw std::invalid_argument("SdeSystem: diffusion coefficient missing");
  if (kappa < 1.0) throw std::invalid_argument("SdeSystem: kappa must be >= 1");
  if (kappa_prime && *kappa_prime < 0.0) {
    throw std::invalid_argument("SdeSystem: kappa_prime must be >= 0");
  }
}

bool scheme_needs_levy(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::BalancedMilstein:
    case SchemeKind::BalancedMilsteinCommutative:
    case SchemeKind::ClassicalMilstein:
    case SchemeKind::ClassicalMilsteinCommutative:
      return true;
    default:
      return false;
  }
}

bool scheme_needs_ito(SchemeKind kind) {
  return kind == SchemeKind::BalancedMilstein ||
         kind == SchemeKind::ClassicalMilstein;
}

bool scheme_needs_commutative(SchemeKind kind) {
  return kind == SchemeKind::BalancedMilsteinCommutative ||
         kind == SchemeKind::ClassicalMilsteinCommutative;
}

bool scheme_is_balanced(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::BalancedEuler:
    case SchemeKind::BalancedMilstein:
    case SchemeKind::BalancedMilsteinCommutative:
      return true;
    default:
      return false;
  }
}

const char* scheme_name(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::BalancedEuler: return "balanced-euler";
    case SchemeKind::BalancedMilstein: return "balanced-milstein";
    case SchemeKind::BalancedMilsteinCommutative: return "balanced-milstein-commutative";
    case SchemeKind::FullyTamedEuler: return "fully-tamed-euler";
    case SchemeKind::TreZhangTamed: return "trezhang-tamed";
    case SchemeKind::SabanisTamed: return "sabanis-tamed";
    case SchemeKind::ClassicalEuler: return "classical-euler";
    case SchemeKind::ClassicalMilstein: return "classical-milstein";
    case SchemeKind::ClassicalMilsteinCommutative: return "classical-milstein-commutative";
  }
  return "unknown";
}

std::optional<SchemeKind> parse_scheme_name(const std::string& name) {
  static const std::vector<SchemeKind> kAll = {
      SchemeKind::BalancedEuler,
      SchemeKind::BalancedMilstein,
      SchemeKind::BalancedMilsteinCommutative,
      SchemeKind::FullyTamedEuler,
      SchemeKind::TreZhangTamed,
      SchemeKind::SabanisTamed,
      SchemeKind::ClassicalEuler,
      SchemeKind::ClassicalMilstein,
      SchemeKind::ClassicalMilsteinCommutative,
  };
  const auto it = std::find_if(kAll.begin(), kAll.end(), [&](SchemeKind k) {
    return name == scheme_name(k);
  });
  if (it == kAll.end()) return std::nullopt;
  return *it;
}

std::vector<std::string> scheme_names() {
  std::vector<std::string> out;
  for (SchemeKind k : {SchemeKind::BalancedEuler, SchemeKind::BalancedMilstein,
                       SchemeKind::BalancedMilsteinCommutative,
                       SchemeKind::FullyTamedEuler, SchemeKind::TreZhangTamed,
                       SchemeKind::SabanisTamed, SchemeKind::ClassicalEuler,
                       SchemeKind::ClassicalMilstein,
                       SchemeKind::ClassicalMilsteinCommutative}) {
    out.emplace_back(scheme_name(k));
  }
  return out;
}

std::optional<std::string> capability_issue(const SdeSystem& system,
                                            const SchemeSpec& scheme) {
  if (system.dim_state < 1 || system.dim_noise < 1 || !system.drift ||
      !system.diffusion) {
    return "system is incomplete (dimensions or coefficients missing)";
  }
  if (scheme_needs_levy(scheme.kind) && !system.has_levy()) {
    return std::string(scheme_name(scheme.kind)) +
           " requires the levy coefficient, which '" + system.label +
           "' does not provide";
  }
  if (scheme_needs_commutative(scheme.kind) &&
      system.commutative != Commutativity::Yes) {
    return std::string(scheme_name(scheme.kind)) +
           " requires verified commutative noise, but '" + system.label +
           "' is not marked commutative";
  }
  if (scheme.kind == SchemeKind::SabanisTamed &&
      !(scheme.beta > 0.0 && scheme.beta <= 1.0)) {
    return "sabanis-tamed requires beta in (0, 1]";
  }
  return std::nullopt;
}

void validate_capability(const SdeSystem& system, const SchemeSpec& scheme) {
  if (auto issue = capability_issue(system, scheme)) {
    throw CapabilityError(*issue);
  }
}

std::vector<double> SimConfig::initial_for_path(std::uint64_t path) const {
  if (initial_sampler) return initial_sampler(seed, path);
  return initial_state;
}

bool state_diverged(std::span<const double> x) {
  for (double v : x) {
    if (!std::isfinite(v) || std::abs(v) > kDivergenceGuard) return true;
  }
  return false;
}

CommutativityReport check_commutativity(const SdeSystem& system,
                                        std::span<const SamplePoint> points,
                                        double tol) {
  if (!system.has_levy()) {
    throw CapabilityError("check_commutativity requires the levy coefficient");
  }
  if (points.empty()) {
    throw std::invalid_argument("check_commutativity: sample_points is empty");
  }
  const int d = system.dim_state;
  const int m = system.dim_noise;
  std::vector<double> a(static_cast<std::size_t>(d));
  std::vector<double> b(static_cast<std::size_t>(d));

  double max_defect = 0.0;
  for (const auto& pt : points) {
    if (static_cast<int>(pt.x.size()) != d) {
      throw std::invalid_argument("check_commutativity: sample point has wrong dimension");
    }
    for (int i = 0; i < m; ++i) {
      for (int r = i + 1; r < m; ++r) {
        system.levy(pt.t, pt.x, i, r, a);
        system.levy(pt.t, pt.x, r, i, b);
        for (int n = 0; n < d; ++n) {
          max_defect = std::max(
              max_defect, std::abs(a[static_cast<std::size_t>(n)] -
                                   b[static_cast<std::size_t>(n)]));
        }
      }
    }
  }
  return {max_defect <= tol, max_defect};
}

}  // namespace sdenum
