#include "sdenum/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sdenum/parallel.hpp"
#include "sdenum/schemes.hpp"
#include "sdenum/summation.hpp"

namespace sdenum {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// A study is flagged unstable once more than this fraction of paths hits the
// divergence guard at any level; the fitted slope would be misleading.
constexpr double kUnstableFraction = 0.01;

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) {
    const double d = a[n] - b[n];
    s += d * d;
  }
  return s;
}

struct ReferencePlan {
  bool exact = false;
  SchemeSpec scheme;
  int level = 0;
  bool order_warning = false;
  std::string describe;
};

ReferencePlan plan_reference(const SdeSystem& sys, int fine_level) {
  ReferencePlan plan;
  if (sys.has_exact_solution()) {
    plan.exact = true;
    plan.level = fine_level;
    plan.describe = "exact";
    return plan;
  }
  if (sys.has_levy() && sys.commutative == Commutativity::Yes) {
    plan.scheme.kind = SchemeKind::BalancedMilsteinCommutative;
    plan.level = fine_level;
  } else if (sys.has_levy()) {
    plan.scheme.kind = SchemeKind::BalancedMilstein;
    // The general form needs fine sub-steps for the double Ito integrals.
    plan.level = sys.dim_noise > 1 ? fine_level - 1 : fine_level;
    if (plan.level < 0) {
      throw StudyError("reference_solution: grid too coarse for the general "
                       "Milstein reference with m > 1");
    }
  } else {
    plan.scheme.kind = SchemeKind::BalancedEuler;
    plan.level = fine_level;
    plan.order_warning = true;
  }
  plan.describe = std::string(scheme_name(plan.scheme.kind)) + "@level" +
                  std::to_string(plan.level);
  return plan;
}

void validate_study_config(const SdeSystem& sys, const SimConfig& config,
                           bool require_reference_gap) {
  sys.validate();
  if (!(config.T > config.t0)) {
    throw std::invalid_argument("SimConfig: T must exceed t0");
  }
  if (config.num_paths < 1) {
    throw std::invalid_argument("SimConfig: num_paths must be >= 1");
  }
  if (config.fine_level < 0 || config.fine_level > 30) {
    throw std::invalid_argument("SimConfig: fine_level out of range [0, 30]");
  }
  if (!config.initial_sampler &&
      static_cast<int>(config.initial_state.size()) != sys.dim_state) {
    throw std::invalid_argument(
        "SimConfig: initial_state dimension does not match the system");
  }
  if (config.coarse_levels.empty()) {
    throw std::invalid_argument("SimConfig: coarse_levels is empty");
  }
  for (int l : config.coarse_levels) {
    if (l < 0 || l > config.fine_level) {
      throw std::invalid_argument(
          "SimConfig: every coarse level must lie in [0, fine_level]");
    }
    if (require_reference_gap && l > config.fine_level - 4) {
      throw std::invalid_argument(
          "SimConfig: convergence studies need every coarse level <= "
          "fine_level - 4 so the reference error stays negligible");
    }
  }
}

std::vector<int> sorted_levels(const SimConfig& config) {
  std::vector<int> levels = config.coarse_levels;
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  return levels;
}

}  // namespace

Trajectory integrate(const SdeSystem& sys, const SchemeSpec& scheme,
                     const WienerGrid& grid, int coarse_level,
                     std::span<const double> x0) {
  validate_capability(sys, scheme);
  if (static_cast<int>(x0.size()) != sys.dim_state) {
    throw std::invalid_argument("integrate: x0 dimension mismatch");
  }
  if (coarse_level < 0 || coarse_level > grid.level()) {
    throw std::out_of_range("integrate: coarse_level out of [0, grid level]");
  }
  if (sys.dim_noise != grid.noise_dim()) {
    throw std::invalid_argument("integrate: grid noise dimension mismatch");
  }
  const bool needs_ito = scheme_needs_ito(scheme.kind);
  if (needs_ito && sys.dim_noise > 1 && coarse_level == grid.level()) {
    throw InsufficientResolutionError(
        "integrate: general Milstein forms need coarse_level < grid level "
        "when m > 1 (off-diagonal double Ito integrals)");
  }

  const std::size_t d = static_cast<std::size_t>(sys.dim_state);
  const std::size_t m = static_cast<std::size_t>(sys.dim_noise);
  const std::size_t steps = grid.steps_at(coarse_level);
  const double h = grid.step_size(coarse_level);
  const double t0 = grid.t0();

  Trajectory traj;
  traj.dim = sys.dim_state;
  traj.times.resize(steps + 1);
  traj.states.assign((steps + 1) * d, kNaN);
  for (std::size_t k = 0; k <= steps; ++k) {
    traj.times[k] = t0 + static_cast<double>(k) * h;
  }
  traj.times[steps] = grid.T();

  std::copy(x0.begin(), x0.end(), traj.states.begin());
  if (state_diverged(x0)) {
    traj.diverged = true;
    traj.divergence_step = 0;
    return traj;
  }

  StepScratch ws(sys.dim_state, sys.dim_noise);
  std::vector<double> delta_w(m);
  std::vector<double> xi(m);
  std::vector<double> ito(needs_ito ? m * m : 0);

  for (std::size_t k = 0; k < steps; ++k) {
    const std::span<const double> cur{traj.states.data() + k * d, d};
    const std::span<double> next{traj.states.data() + (k + 1) * d, d};
    grid.coarse_increment(coarse_level, k, delta_w, xi);
    if (needs_ito) grid.double_ito(coarse_level, k, ito);

    StepInputs in;
    in.t = traj.times[k];
    in.x = cur;
    in.h = h;
    in.xi = xi;
    in.ito = ito;
    apply_scheme(sys, scheme, in, ws, next);

    if (state_diverged(next)) {
      traj.diverged = true;
      traj.divergence_step = k + 1;
      std::fill(traj.states.begin() + static_cast<std::ptrdiff_t>((k + 1) * d),
                traj.states.end(), kNaN);
      break;
    }
  }
  return traj;
}

ReferenceSolution reference_solution(const SdeSystem& sys,
                                     const WienerGrid& grid,
                                     std::span<const double> x0) {
  const ReferencePlan plan = plan_reference(sys, grid.level());
  ReferenceSolution ref;
  ref.kind = plan.describe;
  ref.order_warning = plan.order_warning;

  if (!plan.exact) {
    ref.trajectory = integrate(sys, plan.scheme, grid, plan.level, x0);
    return ref;
  }

  const std::size_t d = static_cast<std::size_t>(sys.dim_state);
  const std::size_t m = static_cast<std::size_t>(sys.dim_noise);
  const std::size_t steps = grid.fine_steps();
  const double h = grid.fine_step();
  const double t0 = grid.t0();

  Trajectory traj;
  traj.dim = sys.dim_state;
  traj.times.resize(steps + 1);
  traj.states.resize((steps + 1) * d);

  std::vector<NeumaierSum> w(m);  // W(t_j) - W(t0)
  std::vector<double> w_now(m, 0.0);
  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = (k == steps) ? grid.T() : t0 + static_cast<double>(k) * h;
    traj.times[k] = t;
    for (std::size_t i = 0; i < m; ++i) w_now[i] = w[i].value();
    sys.exact_solution(t - t0, x0, w_now,
                       {traj.states.data() + k * d, d});
    if (k < steps) {
      for (std::size_t i = 0; i < m; ++i) {
        w[i].add(grid.fine_increment(k, static_cast<int>(i)));
      }
    }
  }
  ref.trajectory = std::move(traj);
  return ref;
}

FitResult fit_order(std::span<const double> h, std::span<const double> err) {
  const std::size_t n = h.size();
  if (err.size() != n) {
    throw std::invalid_argument("fit_order: length mismatch");
  }
  if (n < 3) {
    throw std::invalid_argument("fit_order: need >= 3 points");
  }
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(h[i] > 0.0) || !std::isfinite(h[i])) {
      throw std::invalid_argument("fit_order: step sizes must be positive");
    }
    if (!(err[i] > 0.0) || !std::isfinite(err[i])) {
      throw std::invalid_argument(
          "fit_order: errors must be positive (a level with no surviving "
          "paths cannot be fitted)");
    }
    x[i] = std::log2(h[i]);
    y[i] = std::log2(err[i]);
  }
  double xbar = 0.0, ybar = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    xbar += x[i];
    ybar += y[i];
  }
  xbar /= static_cast<double>(n);
  ybar /= static_cast<double>(n);

  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - xbar) * (x[i] - xbar);
    sxy += (x[i] - xbar) * (y[i] - ybar);
  }
  if (sxx == 0.0) {
    throw std::invalid_argument("fit_order: step sizes are all equal");
  }
  const double slope = sxy / sxx;

  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (ybar + slope * (x[i] - xbar));
    ss_res += r * r;
  }
  const double sigma2 = ss_res / static_cast<double>(n - 2);
  return {slope, std::sqrt(sigma2 / sxx)};
}

CompareReport compare_study(const SdeSystem& sys,
                            std::span<const SchemeSpec> schemes,
                            const SimConfig& config, int threads) {
  if (schemes.empty()) {
    throw std::invalid_argument("compare_study: scheme list is empty");
  }
  validate_study_config(sys, config, /*require_reference_gap=*/true);
  if (config.coarse_levels.size() < 3) {
    throw std::invalid_argument("compare_study: need >= 3 coarse levels");
  }
  for (const auto& scheme : schemes) validate_capability(sys, scheme);

  const std::vector<int> levels = sorted_levels(config);
  const std::size_t n_levels = levels.size();
  const std::size_t n_schemes = schemes.size();
  const std::int64_t M = config.num_paths;
  const std::int64_t n_chunks = chunk_count(M);

  const ReferencePlan plan = plan_reference(sys, config.fine_level);

  struct CellAcc {
    NeumaierSum sum_sq;
    NeumaierSum sum_sq2;
    std::int64_t valid = 0;
  };
  // Indexed [chunk][scheme][level], reduced in chunk order afterwards.
  std::vector<CellAcc> acc(static_cast<std::size_t>(n_chunks) * n_schemes *
                           n_levels);
  auto cell = [&](std::int64_t chunk, std::size_t s, std::size_t l) -> CellAcc& {
    return acc[(static_cast<std::size_t>(chunk) * n_schemes + s) * n_levels + l];
  };

  parallel_chunks(M, threads, [&](std::int64_t begin, std::int64_t end,
                                  std::int64_t chunk) {
    for (std::int64_t p = begin; p < end; ++p) {
      const WienerGrid grid = WienerGrid::generate(
          config.seed, static_cast<std::uint64_t>(p), sys.dim_noise, config.t0,
          config.T, config.fine_level);
      const std::vector<double> x0 =
          config.initial_for_path(static_cast<std::uint64_t>(p));
      const ReferenceSolution ref = reference_solution(sys, grid, x0);
      if (ref.trajectory.diverged) continue;  // counts against every level
      const auto ref_terminal = ref.trajectory.terminal();

      for (std::size_t s = 0; s < n_schemes; ++s) {
        for (std::size_t l = 0; l < n_levels; ++l) {
          const Trajectory traj =
              integrate(sys, schemes[s], grid, levels[l], x0);
          if (traj.diverged) continue;
          const double sq = squared_distance(traj.terminal(), ref_terminal);
          CellAcc& c = cell(chunk, s, l);
          c.sum_sq.add(sq);
          c.sum_sq2.add(sq * sq);
          c.valid += 1;
        }
      }
    }
  });

  CompareReport report;
  report.schemes.reserve(n_schemes);
  for (std::size_t s = 0; s < n_schemes; ++s) {
    ConvergenceReport r;
    r.problem = sys.label;
    r.scheme = scheme_name(schemes[s].kind);
    r.reference_kind = plan.describe;
    r.reference_order_warning = plan.order_warning;
    r.t0 = config.t0;
    r.T = config.T;
    if (!config.initial_sampler) r.x0 = config.initial_state;
    r.fine_level = config.fine_level;
    r.num_paths = M;
    r.seed = config.seed;

    bool all_levels_dead = true;
    bool fit_possible = true;
    std::vector<double> fit_h, fit_err;
    for (std::size_t l = 0; l < n_levels; ++l) {
      NeumaierSum sum_sq, sum_sq2;
      std::int64_t valid = 0;
      for (std::int64_t c = 0; c < n_chunks; ++c) {
        sum_sq.merge(cell(c, s, l).sum_sq);
        sum_sq2.merge(cell(c, s, l).sum_sq2);
        valid += cell(c, s, l).valid;
      }
      LevelStat stat;
      stat.level = levels[l];
      stat.h = (config.T - config.t0) /
               static_cast<double>(std::size_t{1} << levels[l]);
      stat.paths_used = valid;
      stat.diverged_fraction =
          static_cast<double>(M - valid) / static_cast<double>(M);
      if (valid > 0) {
        all_levels_dead = false;
        const double mean_sq = sum_sq.value() / static_cast<double>(valid);
        stat.rms_error = std::sqrt(std::max(mean_sq, 0.0));
        const double var_sq = std::max(
            sum_sq2.value() / static_cast<double>(valid) - mean_sq * mean_sq,
            0.0);
        const double se_mean = std::sqrt(var_sq / static_cast<double>(valid));
        stat.rms_stderr =
            stat.rms_error > 0.0 ? se_mean / (2.0 * stat.rms_error) : 0.0;
      } else {
        stat.rms_error = kNaN;
        stat.rms_stderr = kNaN;
      }
      if (stat.diverged_fraction > kUnstableFraction) r.unstable = true;
      if (!(valid > 0) || !(stat.rms_error > 0.0)) fit_possible = false;
      fit_h.push_back(stat.h);
      fit_err.push_back(stat.rms_error);
      r.levels.push_back(stat);
    }

    if (all_levels_dead) {
      throw StudyError("compare_study: scheme '" + r.scheme + "' on '" +
                       r.problem + "' lost every path at every level (seed " +
                       std::to_string(config.seed) + ", M " +
                       std::to_string(M) + ")");
    }
    if (fit_possible) {
      const FitResult fit = fit_order(fit_h, fit_err);
      r.fitted_order = fit.slope;
      r.slope_stderr = fit.slope_stderr;
      r.fit_valid = true;
    } else {
      r.fitted_order = kNaN;
      r.slope_stderr = kNaN;
      r.fit_valid = false;
    }
    report.schemes.push_back(std::move(r));
  }
  return report;
}

ConvergenceReport convergence_study(const SdeSystem& sys,
                                    const SchemeSpec& scheme,
                                    const SimConfig& config, int threads) {
  const SchemeSpec one[] = {scheme};
  CompareReport report = compare_study(sys, one, config, threads);
  return std::move(report.schemes.front());
}

MomentReport moment_study(const SdeSystem& sys, const SchemeSpec& scheme,
                          const SimConfig& config,
                          std::span<const double> p_list, int threads) {
  if (p_list.empty()) {
    throw std::invalid_argument("moment_study: p_list is empty");
  }
  for (double p : p_list) {
    if (!(p >= 1.0)) {
      throw std::invalid_argument("moment_study: every p must be >= 1");
    }
  }
  validate_study_config(sys, config, /*require_reference_gap=*/false);
  validate_capability(sys, scheme);

  const std::vector<int> levels = sorted_levels(config);
  const std::size_t n_levels = levels.size();
  const std::size_t n_p = p_list.size();
  const std::int64_t M = config.num_paths;
  const std::int64_t n_chunks = chunk_count(M);

  // Time-slot offsets per level into the flat accumulator arrays.
  std::vector<std::size_t> offset(n_levels + 1, 0);
  for (std::size_t l = 0; l < n_levels; ++l) {
    offset[l + 1] = offset[l] + (std::size_t{1} << levels[l]) + 1;
  }
  const std::size_t total_slots = offset[n_levels];

  struct ChunkAcc {
    std::vector<NeumaierSum> sum;    // [p][slot]
    std::vector<NeumaierSum> sum2;   // [p][slot]
    std::vector<std::int64_t> count;  // [slot]
    std::vector<std::int64_t> diverged;  // [level]
  };
  std::vector<ChunkAcc> chunks(static_cast<std::size_t>(n_chunks));
  for (auto& c : chunks) {
    c.sum.resize(n_p * total_slots);
    c.sum2.resize(n_p * total_slots);
    c.count.assign(total_slots, 0);
    c.diverged.assign(n_levels, 0);
  }

  parallel_chunks(M, threads, [&](std::int64_t begin, std::int64_t end,
                                  std::int64_t chunk) {
    ChunkAcc& acc = chunks[static_cast<std::size_t>(chunk)];
    for (std::int64_t p = begin; p < end; ++p) {
      const WienerGrid grid = WienerGrid::generate(
          config.seed, static_cast<std::uint64_t>(p), sys.dim_noise, config.t0,
          config.T, config.fine_level);
      const std::vector<double> x0 =
          config.initial_for_path(static_cast<std::uint64_t>(p));
      for (std::size_t l = 0; l < n_levels; ++l) {
        const Trajectory traj = integrate(sys, scheme, grid, levels[l], x0);
        if (traj.diverged) acc.diverged[l] += 1;
        const std::size_t n_times = traj.size();
        for (std::size_t k = 0; k < n_times; ++k) {
          if (!traj.valid_at(k)) break;
          const auto x = traj.state(k);
          double sq = 0.0;
          for (double v : x) sq += v * v;
          const std::size_t slot = offset[l] + k;
          acc.count[slot] += 1;
          for (std::size_t pi = 0; pi < n_p; ++pi) {
            const double pw = p_list[pi];
            const double val = pw == 1.0 ? sq : std::pow(sq, pw);
            acc.sum[pi * total_slots + slot].add(val);
            acc.sum2[pi * total_slots + slot].add(val * val);
          }
        }
      }
    }
  });

  MomentReport report;
  report.problem = sys.label;
  report.scheme = scheme_name(scheme.kind);
  report.p_values.assign(p_list.begin(), p_list.end());
  report.t0 = config.t0;
  report.T = config.T;
  if (!config.initial_sampler) report.x0 = config.initial_state;
  report.fine_level = config.fine_level;
  report.num_paths = M;
  report.seed = config.seed;

  for (std::size_t l = 0; l < n_levels; ++l) {
    MomentLevelStat stat;
    stat.level = levels[l];
    stat.h = (config.T - config.t0) /
             static_cast<double>(std::size_t{1} << levels[l]);
    const std::size_t n_times = (std::size_t{1} << levels[l]) + 1;
    stat.times.resize(n_times);
    for (std::size_t k = 0; k < n_times; ++k) {
      stat.times[k] = config.t0 + static_cast<double>(k) * stat.h;
    }
    stat.times[n_times - 1] = config.T;

    std::int64_t diverged = 0;
    for (std::int64_t c = 0; c < n_chunks; ++c) {
      diverged += chunks[static_cast<std::size_t>(c)].diverged[l];
    }
    stat.diverged_fraction =
        static_cast<double>(diverged) / static_cast<double>(M);

    stat.estimates.resize(n_p);
    stat.std_errors.resize(n_p);
    stat.max_over_time.assign(n_p, kNaN);
    for (std::size_t pi = 0; pi < n_p; ++pi) {
      stat.estimates[pi].assign(n_times, kNaN);
      stat.std_errors[pi].assign(n_times, kNaN);
      double max_est = -std::numeric_limits<double>::infinity();
      bool any = false;
      for (std::size_t k = 0; k < n_times; ++k) {
        const std::size_t slot = offset[l] + k;
        NeumaierSum sum, sum2;
        std::int64_t count = 0;
        for (std::int64_t c = 0; c < n_chunks; ++c) {
          const ChunkAcc& acc = chunks[static_cast<std::size_t>(c)];
          sum.merge(acc.sum[pi * total_slots + slot]);
          sum2.merge(acc.sum2[pi * total_slots + slot]);
          count += acc.count[slot];
        }
        if (count == 0) continue;
        const double mean = sum.value() / static_cast<double>(count);
        const double var = std::max(
            sum2.value() / static_cast<double>(count) - mean * mean, 0.0);
        stat.estimates[pi][k] = mean;
        stat.std_errors[pi][k] =
            std::sqrt(var / static_cast<double>(count));
        max_est = std::max(max_est, mean);
        any = true;
      }
      if (any) stat.max_over_time[pi] = max_est;
    }
    report.levels.push_back(std::move(stat));
  }
  return report;
}

}  // namespace sdenum
