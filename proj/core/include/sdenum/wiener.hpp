#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "sdenum/system.hpp"

namespace sdenum {

// A fine-resolution m-dimensional Wiener path on [t0, T], the single source
// of randomness for every coarser dyadic level. Coarse increments are exact
// pairwise sums of their children, so refinement consistency holds bitwise.
class WienerGrid {
 public:
  static WienerGrid generate(std::uint64_t seed, std::uint64_t path_index,
                             int m, double t0, double T, int level);

  // Deterministic injection of a known increment array (debugging and
  // fixtures); `increments` is fine_steps x m row-major.
  static WienerGrid from_increments(int m, double t0, double T, int level,
                                    std::vector<double> increments);

  int noise_dim() const { return m_; }
  double t0() const { return t0_; }
  double T() const { return T_; }
  int level() const { return level_; }
  std::size_t fine_steps() const { return std::size_t{1} << level_; }
  double fine_step() const { return (T_ - t0_) / static_cast<double>(fine_steps()); }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t path_index() const { return path_index_; }

  double step_size(int coarse_level) const {
    return (T_ - t0_) / static_cast<double>(std::size_t{1} << coarse_level);
  }
  std::size_t steps_at(int coarse_level) const {
    return std::size_t{1} << coarse_level;
  }

  // Fine increment of component i over fine step j.
  double fine_increment(std::size_t j, int i) const {
    return increments_[j * static_cast<std::size_t>(m_) + static_cast<std::size_t>(i)];
  }
  std::span<const double> increments() const { return increments_; }

  // Increment over coarse step k at the given level, plus the normalized
  // variates xi = delta_w / sqrt(h). Outputs must have m components.
  void coarse_increment(int coarse_level, std::size_t k,
                        std::span<double> delta_w, std::span<double> xi) const;

  // Double Ito integrals over coarse step k, written row-major into the
  // m x m output: entry (i, r) integrates dw_i (inner) against dw_r (outer).
  // Off-diagonal entries are left-point sums over the fine sub-grid; the
  // diagonal uses the exact identity (delta_w^2 - h) / 2. With m > 1 the
  // off-diagonal needs at least two fine sub-steps per coarse step, so
  // coarse_level == level is rejected.
  void double_ito(int coarse_level, std::size_t k, std::span<double> ito) const;

  // Debug dump, columns: step,component,increment.
  void dump_csv(std::ostream& os) const;

 private:
  WienerGrid() = default;

  double dyadic_sum(int component, std::size_t lo, std::size_t hi) const;
  void check_coarse_args(int coarse_level, std::size_t k) const;

  int m_ = 0;
  double t0_ = 0.0;
  double T_ = 0.0;
  int level_ = 0;
  std::uint64_t seed_ = 0;
  std::uint64_t path_index_ = 0;
  std::vector<double> increments_;  // fine_steps() x m, row-major
};

}  // namespace sdenum
