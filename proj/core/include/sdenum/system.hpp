#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sdenum {

// Coefficient callbacks write their d-dimensional result into `out`.
// Growth exponents are author-declared metadata; they are sampled by tests,
// not verified symbolically.
using DriftFn =
    std::function<void(double t, std::span<const double> x, std::span<double> out)>;
using DiffusionFn = std::function<void(double t, std::span<const double> x,
                                       int r, std::span<double> out)>;
// levy(t, x, i, r, out): the coefficient obtained by applying the directional
// derivative along diffusion column i to diffusion column r,
// i.e. (Jacobian of sigma_r) * sigma_i. Needed by Milstein-type schemes.
using LevyFn = std::function<void(double t, std::span<const double> x, int i,
                                  int r, std::span<double> out)>;
// Exact pathwise solution, when one exists: out = X(t0 + dt) given the
// initial state and the Brownian position w = W(t0 + dt) - W(t0).
using ExactSolutionFn =
    std::function<void(double dt, std::span<const double> x0,
                       std::span<const double> w, std::span<double> out)>;

enum class Commutativity { Yes, No, Unknown };

struct SdeSystem {
  int dim_state = 0;  // d
  int dim_noise = 0;  // m
  DriftFn drift;
  DiffusionFn diffusion;
  LevyFn levy;                    // empty unless Milstein schemes are wanted
  double kappa = 1.0;             // drift growth exponent, >= 1
  std::optional<double> kappa_prime;  // growth exponent of the levy coefficient
  Commutativity commutative = Commutativity::Unknown;
  std::string label;
  ExactSolutionFn exact_solution;     // empty unless an exact solution exists
  std::vector<std::string> notes;     // preset warnings / admissibility remarks

  bool has_levy() const { return static_cast<bool>(levy); }
  bool has_exact_solution() const { return static_cast<bool>(exact_solution); }

  // Throws std::invalid_argument when required fields are missing/malformed.
  void validate() const;
};

enum class SchemeKind {
  BalancedEuler,
  BalancedMilstein,
  BalancedMilsteinCommutative,
  FullyTamedEuler,
  TreZhangTamed,
  SabanisTamed,
  ClassicalEuler,
  ClassicalMilstein,
  ClassicalMilsteinCommutative,
};

// Balanced schemes bound the drift block with the sine map by default; the
// rational variant divides by 1 + h|a| instead. Both keep the block bounded.
enum class DriftTaming { Sine, Rational };

struct SchemeSpec {
  SchemeKind kind = SchemeKind::BalancedEuler;
  double beta = 0.5;  // read only when kind == SabanisTamed
  DriftTaming drift_taming = DriftTaming::Sine;  // balanced kinds only
};

bool scheme_needs_levy(SchemeKind kind);
bool scheme_needs_ito(SchemeKind kind);       // general Milstein forms
bool scheme_needs_commutative(SchemeKind kind);
bool scheme_is_balanced(SchemeKind kind);

const char* scheme_name(SchemeKind kind);
std::optional<SchemeKind> parse_scheme_name(const std::string& name);
std::vector<std::string> scheme_names();

// Capability checks are total: every (system, scheme) pair either passes or
// yields a diagnostic before any stepping occurs.
std::optional<std::string> capability_issue(const SdeSystem& system,
                                            const SchemeSpec& scheme);

class CapabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InsufficientResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class StudyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Throws CapabilityError when capability_issue reports a problem.
void validate_capability(const SdeSystem& system, const SchemeSpec& scheme);

struct SimConfig {
  double t0 = 0.0;
  double T = 1.0;
  std::vector<double> initial_state;
  // Optional seeded sampler; takes precedence over initial_state when set.
  std::function<std::vector<double>(std::uint64_t seed, std::uint64_t path)>
      initial_sampler;
  int fine_level = 10;              // fine grid has 2^fine_level steps
  std::vector<int> coarse_levels;   // each level l means h = (T-t0)/2^l
  std::int64_t num_paths = 1;
  std::uint64_t seed = 0;

  std::vector<double> initial_for_path(std::uint64_t path) const;
};

// A state has diverged once any component is non-finite or the inf-norm
// exceeds this guard; it keeps statistics well-defined when untamed schemes
// blow up.
inline constexpr double kDivergenceGuard = 1e150;

bool state_diverged(std::span<const double> x);

struct Trajectory {
  std::vector<double> times;
  std::vector<double> states;  // times.size() x dim, row-major
  int dim = 0;
  bool diverged = false;
  std::size_t divergence_step = 0;  // first invalid index when diverged

  std::size_t size() const { return times.size(); }
  std::span<const double> state(std::size_t k) const {
    return {states.data() + k * static_cast<std::size_t>(dim),
            static_cast<std::size_t>(dim)};
  }
  std::span<const double> terminal() const { return state(times.size() - 1); }
  // A time index contributes to statistics only while the path is valid.
  bool valid_at(std::size_t k) const { return !diverged || k < divergence_step; }
};

struct SamplePoint {
  double t = 0.0;
  std::vector<double> x;
};

struct CommutativityReport {
  bool commutative = false;
  double max_defect = 0.0;
};

// Max over sample points and pairs (i, r) of the inf-norm of
// levy(i, r) - levy(r, i). Requires the levy coefficient.
CommutativityReport check_commutativity(const SdeSystem& system,
                                        std::span<const SamplePoint> points,
                                        double tol);

}  // namespace sdenum
