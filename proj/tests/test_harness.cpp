#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "sdenum/harness.hpp"
#include "sdenum/philox.hpp"
#include "sdenum/problems.hpp"
#include "sdenum/report_io.hpp"
#include "sdenum/wiener.hpp"

using namespace sdenum;

namespace {

SimConfig study_config(std::vector<double> x0, std::vector<int> levels,
                       int fine, std::int64_t paths, std::uint64_t seed) {
  SimConfig cfg;
  cfg.t0 = 0.0;
  cfg.T = 1.0;
  cfg.initial_state = std::move(x0);
  cfg.fine_level = fine;
  cfg.coarse_levels = std::move(levels);
  cfg.num_paths = paths;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("fit_order recovers exact power laws") {
  std::vector<double> h, e05, e10, e15;
  for (int k = 3; k <= 10; ++k) {
    const double hh = std::ldexp(1.0, -k);
    h.push_back(hh);
    e05.push_back(std::sqrt(hh));
    e10.push_back(hh);
    e15.push_back(hh * std::sqrt(hh));
  }
  auto f = fit_order(h, e05);
  CHECK(std::abs(f.slope - 0.5) < 1e-12);
  CHECK(f.slope_stderr < 1e-12);
  f = fit_order(h, e10);
  CHECK(std::abs(f.slope - 1.0) < 1e-12);
  f = fit_order(h, e15);
  CHECK(std::abs(f.slope - 1.5) < 1e-12);
}

TEST_CASE("fit_order on a perturbed power law stays in band") {
  std::vector<double> h, err;
  for (int k = 2; k <= 9; ++k) {
    const double hh = std::ldexp(1.0, -k);
    const auto w = rng::philox4x32({static_cast<std::uint32_t>(k), 0, 99,
                                    rng::kDomainTest},
                                   {0xFEEDFACEu, 0x0BADF00Du});
    const double delta = 0.05 * (2.0 * rng::uniform_open(w[0], w[1]) - 1.0);
    h.push_back(hh);
    err.push_back(2.3 * std::pow(hh, 0.75) * (1.0 + delta));
  }
  const auto f = fit_order(h, err);
  CHECK(f.slope > 0.65);
  CHECK(f.slope < 0.85);
}

TEST_CASE("fit_order input validation") {
  std::vector<double> h = {0.5, 0.25, 0.125};
  std::vector<double> err = {0.1, 0.05, 0.0};
  CHECK_THROWS_AS(fit_order(h, err), std::invalid_argument);  // nonpositive
  std::vector<double> short_h = {0.5, 0.25};
  std::vector<double> short_e = {0.1, 0.05};
  CHECK_THROWS_AS(fit_order(short_h, short_e), std::invalid_argument);
  std::vector<double> mismatched = {0.1};
  CHECK_THROWS_AS(fit_order(h, mismatched), std::invalid_argument);
}

TEST_CASE("integrate keeps a zero-coefficient system constant") {
  const SdeSystem sys = make_gbm(0.0, 0.0);
  const auto grid = WienerGrid::generate(11, 0, 1, 0.0, 1.0, 6);
  std::vector<double> x0 = {0.7};
  SchemeSpec spec;
  for (const char* name : {"balanced-euler", "classical-euler", "trezhang-tamed"}) {
    spec.kind = *parse_scheme_name(name);
    const auto traj = integrate(sys, spec, grid, 4, x0);
    REQUIRE(traj.size() == 17);
    CHECK_FALSE(traj.diverged);
    for (std::size_t k = 0; k < traj.size(); ++k) CHECK(traj.state(k)[0] == 0.7);
  }
}

TEST_CASE("integrate is deterministic") {
  const SdeSystem sys = make_three_halves(4.0, 1.0, 1.0);
  const auto grid = WienerGrid::generate(17, 5, 1, 0.0, 1.0, 8);
  std::vector<double> x0 = {1.0};
  SchemeSpec spec;
  spec.kind = SchemeKind::BalancedMilsteinCommutative;
  const auto a = integrate(sys, spec, grid, 5, x0);
  const auto b = integrate(sys, spec, grid, 5, x0);
  REQUIRE(a.states.size() == b.states.size());
  for (std::size_t i = 0; i < a.states.size(); ++i) {
    CHECK(a.states[i] == b.states[i]);
  }
}

TEST_CASE("integrate converges to the exact GBM path with refinement") {
  const SdeSystem sys = make_gbm(0.05, 0.2);
  std::vector<double> x0 = {1.0};
  SchemeSpec spec;
  spec.kind = SchemeKind::BalancedEuler;
  double prev = 1e300;
  for (int level : {4, 7, 10}) {
    double acc = 0.0;
    const std::size_t n_paths = 32;
    for (std::size_t p = 0; p < n_paths; ++p) {
      const auto grid = WienerGrid::generate(2718, p, 1, 0.0, 1.0, 10);
      const auto ref = reference_solution(sys, grid, x0);
      const auto traj = integrate(sys, spec, grid, level, x0);
      acc += std::pow(traj.terminal()[0] - ref.trajectory.terminal()[0], 2);
    }
    const double rms = std::sqrt(acc / static_cast<double>(n_paths));
    CHECK(rms < prev);
    prev = rms;
  }
}

TEST_CASE("integrate rejects impossible requests up front") {
  const SdeSystem sys = make_noncommutative_2d(1.0, 0.2);
  const auto grid = WienerGrid::generate(3, 0, 2, 0.0, 1.0, 5);
  std::vector<double> x0 = {1.0, 1.0};
  SchemeSpec general;
  general.kind = SchemeKind::BalancedMilstein;
  CHECK_THROWS_AS(integrate(sys, general, grid, 5, x0),
                  InsufficientResolutionError);
  SchemeSpec commutative;
  commutative.kind = SchemeKind::BalancedMilsteinCommutative;
  CHECK_THROWS_AS(integrate(sys, commutative, grid, 3, x0), CapabilityError);
  SchemeSpec euler;
  std::vector<double> bad_x0 = {1.0};
  CHECK_THROWS_AS(integrate(sys, euler, grid, 3, bad_x0), std::invalid_argument);
}

TEST_CASE("reference dispatch picks the strongest admissible scheme") {
  std::vector<double> x0 = {1.0};
  const auto g1 = WienerGrid::generate(1, 0, 1, 0.0, 1.0, 8);

  const auto gbm_ref = reference_solution(make_gbm(0.05, 0.2), g1, x0);
  CHECK(gbm_ref.kind == "exact");
  CHECK_FALSE(gbm_ref.order_warning);

  const auto th_ref = reference_solution(make_three_halves(4.0, 1.0, 1.0), g1, x0);
  CHECK(th_ref.kind == "balanced-milstein-commutative@level8");

  std::vector<double> x02 = {1.0, 1.0};
  const auto g2 = WienerGrid::generate(1, 0, 2, 0.0, 1.0, 8);
  const auto nc_ref =
      reference_solution(make_noncommutative_2d(1.0, 0.2), g2, x02);
  CHECK(nc_ref.kind == "balanced-milstein@level7");

  SdeSystem no_levy = make_ginzburg_landau(0.5);
  no_levy.levy = nullptr;
  const auto euler_ref = reference_solution(no_levy, g1, x0);
  CHECK(euler_ref.kind == "balanced-euler@level8");
  CHECK(euler_ref.order_warning);
}

TEST_CASE("reference self-consistency improves with the fine level") {
  const SdeSystem sys = make_ginzburg_landau(0.5);
  std::vector<double> x0 = {1.0};
  auto self_gap = [&](int level) {
    double acc = 0.0;
    const std::size_t n_paths = 32;
    SchemeSpec spec;
    spec.kind = SchemeKind::BalancedMilsteinCommutative;
    for (std::size_t p = 0; p < n_paths; ++p) {
      const auto grid = WienerGrid::generate(424242, p, 1, 0.0, 1.0, level);
      const auto ref = reference_solution(sys, grid, x0);
      const auto coarser = integrate(sys, spec, grid, level - 1, x0);
      acc += std::pow(ref.trajectory.terminal()[0] - coarser.terminal()[0], 2);
    }
    return std::sqrt(acc / static_cast<double>(n_paths));
  };
  CHECK(self_gap(10) < self_gap(8));
}

TEST_CASE("convergence study: classical Euler on GBM is order one half") {
  const SdeSystem sys = make_gbm(0.05, 0.2);
  SchemeSpec spec;
  spec.kind = SchemeKind::ClassicalEuler;
  const SimConfig cfg = study_config({1.0}, {4, 5, 6, 7, 8}, 12, 2000, 7);
  const auto rep = convergence_study(sys, spec, cfg);
  CHECK(rep.reference_kind == "exact");
  CHECK(rep.fit_valid);
  CHECK(rep.fitted_order > 0.35);
  CHECK(rep.fitted_order < 0.65);
  CHECK_FALSE(rep.unstable);
  for (const auto& s : rep.levels) CHECK(s.diverged_fraction == 0.0);

  // Monotone refinement up to Monte Carlo noise (3 combined SEs).
  for (std::size_t l = 1; l < rep.levels.size(); ++l) {
    const auto& prev = rep.levels[l - 1];
    const auto& cur = rep.levels[l];
    CHECK(cur.rms_error <=
          prev.rms_error + 3.0 * (prev.rms_stderr + cur.rms_stderr));
  }
}

TEST_CASE("convergence study is invariant under the worker count") {
  const SdeSystem sys = make_ginzburg_landau(0.5);
  SchemeSpec spec;
  spec.kind = SchemeKind::BalancedEuler;
  const SimConfig cfg = study_config({1.0}, {4, 5, 6}, 10, 300, 99);
  const auto r1 = convergence_study(sys, spec, cfg, 1);
  const auto r2 = convergence_study(sys, spec, cfg, 2);
  const auto r3 = convergence_study(sys, spec, cfg, 3);
  const std::string j1 = to_json(r1).dump(2);
  const std::string j2 = to_json(r2).dump(2);
  const std::string j3 = to_json(r3).dump(2);
  CHECK(j1 == j2);
  CHECK(j1 == j3);
  for (std::size_t l = 0; l < r1.levels.size(); ++l) {
    CHECK(r1.levels[l].rms_error == r2.levels[l].rms_error);
    CHECK(r1.levels[l].rms_error == r3.levels[l].rms_error);
  }
}

TEST_CASE("compare study with one scheme equals the convergence study") {
  const SdeSystem sys = make_gbm(0.05, 0.2);
  SchemeSpec spec;
  spec.kind = SchemeKind::BalancedEuler;
  const SimConfig cfg = study_config({1.0}, {4, 5, 6}, 10, 200, 5);
  const auto single = convergence_study(sys, spec, cfg);
  const SchemeSpec list[] = {spec};
  const auto compare = compare_study(sys, list, cfg);
  REQUIRE(compare.schemes.size() == 1);
  CHECK(to_json(single).dump() == to_json(compare.schemes.front()).dump());
}

TEST_CASE("partially diverging studies are flagged unstable, not fitted") {
  // Classical Euler on Ginzburg-Landau from x0 = 10: the drift alone blows
  // up at h = 1/16 and 1/32, while h = 1/64 contracts toward the wells.
  const SdeSystem sys = make_ginzburg_landau(0.5);
  SchemeSpec spec;
  spec.kind = SchemeKind::ClassicalEuler;
  const SimConfig cfg = study_config({10.0}, {4, 5, 6}, 10, 200, 12);
  const auto rep = convergence_study(sys, spec, cfg);
  CHECK(rep.unstable);
  CHECK_FALSE(rep.fit_valid);
  CHECK(rep.levels[0].diverged_fraction == 1.0);
  CHECK(rep.levels[1].diverged_fraction == 1.0);
  CHECK(rep.levels[2].diverged_fraction == 0.0);
}

TEST_CASE("a study whose paths all diverge raises a study error") {
  // Levels 3..5 all cross the divergence guard within their step budget.
  const SdeSystem sys = make_ginzburg_landau(0.5);
  SchemeSpec spec;
  spec.kind = SchemeKind::ClassicalEuler;
  const SimConfig cfg = study_config({10.0}, {3, 4, 5}, 10, 100, 12);
  CHECK_THROWS_AS(convergence_study(sys, spec, cfg), StudyError);
}

TEST_CASE("study preconditions") {
  const SdeSystem sys = make_gbm(0.05, 0.2);
  SchemeSpec spec;
  SimConfig cfg = study_config({1.0}, {4, 5}, 10, 100, 1);
  CHECK_THROWS_AS(convergence_study(sys, spec, cfg), std::invalid_argument);
  cfg = study_config({1.0}, {4, 5, 8}, 10, 100, 1);  // 8 > 10 - 4
  CHECK_THROWS_AS(convergence_study(sys, spec, cfg), std::invalid_argument);
  cfg = study_config({1.0}, {4, 5, 6}, 10, 0, 1);
  CHECK_THROWS_AS(convergence_study(sys, spec, cfg), std::invalid_argument);
  cfg = study_config({1.0, 2.0}, {4, 5, 6}, 10, 100, 1);
  CHECK_THROWS_AS(convergence_study(sys, spec, cfg), std::invalid_argument);
  const std::vector<SchemeSpec> none;
  cfg = study_config({1.0}, {4, 5, 6}, 10, 100, 1);
  CHECK_THROWS_AS(compare_study(sys, none, cfg), std::invalid_argument);
}

TEST_CASE("moment study of a frozen system is exactly flat") {
  const SdeSystem sys = make_gbm(0.0, 0.0);
  SchemeSpec spec;
  spec.kind = SchemeKind::BalancedEuler;
  SimConfig cfg = study_config({0.7}, {3, 5}, 6, 50, 3);
  const double ps[] = {1.0, 2.0};
  const auto rep = moment_study(sys, spec, cfg, ps);
  REQUIRE(rep.levels.size() == 2);
  for (const auto& lvl : rep.levels) {
    CHECK(lvl.diverged_fraction == 0.0);
    for (std::size_t pi = 0; pi < 2; ++pi) {
      const double expect = std::pow(0.7 * 0.7, ps[pi]);
      for (double est : lvl.estimates[pi]) {
        CHECK(est == doctest::Approx(expect).epsilon(1e-14));
      }
      CHECK(lvl.max_over_time[pi] == doctest::Approx(expect).epsilon(1e-14));
    }
  }
}

TEST_CASE("balanced Euler second moments on Ginzburg-Landau stay flat in h") {
  const SdeSystem sys = make_ginzburg_landau(0.5);
  SchemeSpec spec;
  spec.kind = SchemeKind::BalancedEuler;
  SimConfig cfg = study_config({1.0}, {4, 5, 6, 7, 8, 9, 10}, 10, 1000, 21);
  const double ps[] = {1.0};
  const auto rep = moment_study(sys, spec, cfg, ps);
  double lo = 1e300, hi = 0.0;
  for (const auto& lvl : rep.levels) {
    CHECK(lvl.diverged_fraction == 0.0);
    lo = std::min(lo, lvl.max_over_time[0]);
    hi = std::max(hi, lvl.max_over_time[0]);
  }
  CHECK((hi - lo) / lo < 0.25);  // max second moment varies < 25% across h
}

TEST_CASE("moment study reports full divergence of classical Euler blowup") {
  const SdeSystem sys = make_ginzburg_landau(0.5);
  SchemeSpec spec;
  spec.kind = SchemeKind::ClassicalEuler;
  SimConfig cfg = study_config({10.0}, {4}, 6, 100, 9);
  const double ps[] = {1.0};
  const auto rep = moment_study(sys, spec, cfg, ps);
  CHECK(rep.levels[0].diverged_fraction == 1.0);
}

TEST_CASE("moment study preconditions") {
  const SdeSystem sys = make_gbm(0.0, 0.0);
  SchemeSpec spec;
  SimConfig cfg = study_config({1.0}, {4}, 6, 10, 1);
  CHECK_THROWS_AS(moment_study(sys, spec, cfg, {}), std::invalid_argument);
  const double bad_p[] = {0.5};
  CHECK_THROWS_AS(moment_study(sys, spec, cfg, bad_p), std::invalid_argument);
}

}  // TEST_SUITE
