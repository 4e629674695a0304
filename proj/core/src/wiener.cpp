#include "sdenum/wiener.hpp"

#include <cmath>
#include <stdexcept>

#include "sdenum/philox.hpp"
#include "sdenum/report_io.hpp"
#include "sdenum/summation.hpp"

namespace sdenum {

WienerGrid WienerGrid::generate(std::uint64_t seed, std::uint64_t path_index,
                                int m, double t0, double T, int level) {
  if (m < 1) throw std::invalid_argument("WienerGrid: m must be >= 1");
  if (!(T > t0)) throw std::invalid_argument("WienerGrid: T must exceed t0");
  if (level < 0 || level > 30) {
    throw std::invalid_argument("WienerGrid: level out of range [0, 30]");
  }

  WienerGrid grid;
  grid.m_ = m;
  grid.t0_ = t0;
  grid.T_ = T;
  grid.level_ = level;
  grid.seed_ = seed;
  grid.path_index_ = path_index;

  const std::size_t n = grid.fine_steps();
  const double sqrt_h = std::sqrt(grid.fine_step());
  const rng::Key key = rng::make_key(seed);

  // Increments are snapped to the 2^-32 grid. Partial sums of the walk then
  // stay on that grid well inside the 53-bit mantissa, so every coarse
  // increment is an exact sum; cancellation cannot degrade the double Ito
  // identities. The quantum is ~1e-8 relative to a typical increment,
  // far below any statistical tolerance used here.
  grid.increments_.resize(n * static_cast<std::size_t>(m));
  for (std::size_t j = 0; j < n; ++j) {
    for (int i = 0; i < m; ++i) {
      const double z = rng::normal(key, path_index, j,
                                   static_cast<std::uint32_t>(i),
                                   rng::kDomainWiener);
      grid.increments_[j * static_cast<std::size_t>(m) + static_cast<std::size_t>(i)] =
          std::nearbyint(z * sqrt_h * 0x1.0p32) * 0x1.0p-32;
    }
  }
  return grid;
}

WienerGrid WienerGrid::from_increments(int m, double t0, double T, int level,
                                       std::vector<double> increments) {
  if (m < 1) throw std::invalid_argument("WienerGrid: m must be >= 1");
  if (!(T > t0)) throw std::invalid_argument("WienerGrid: T must exceed t0");
  if (level < 0 || level > 30) {
    throw std::invalid_argument("WienerGrid: level out of range [0, 30]");
  }
  WienerGrid grid;
  grid.m_ = m;
  grid.t0_ = t0;
  grid.T_ = T;
  grid.level_ = level;
  if (increments.size() != grid.fine_steps() * static_cast<std::size_t>(m)) {
    throw std::invalid_argument("WienerGrid: increment array has wrong size");
  }
  grid.increments_ = std::move(increments);
  return grid;
}

// Pairwise sum over the fine range [lo, hi); the range length is a power of
// two, so the value at level l is bit-identical to the sum of its two
// children at level l+1.
double WienerGrid::dyadic_sum(int component, std::size_t lo, std::size_t hi) const {
  if (hi - lo == 1) return fine_increment(lo, component);
  const std::size_t mid = lo + (hi - lo) / 2;
  return dyadic_sum(component, lo, mid) + dyadic_sum(component, mid, hi);
}

void WienerGrid::check_coarse_args(int coarse_level, std::size_t k) const {
  if (coarse_level < 0 || coarse_level > level_) {
    throw std::out_of_range("WienerGrid: coarse_level out of [0, level]");
  }
  if (k >= steps_at(coarse_level)) {
    throw std::out_of_range("WienerGrid: step index out of range");
  }
}

void WienerGrid::coarse_increment(int coarse_level, std::size_t k,
                                  std::span<double> delta_w,
                                  std::span<double> xi) const {
  check_coarse_args(coarse_level, k);
  const std::size_t n = std::size_t{1} << (level_ - coarse_level);
  const std::size_t lo = k * n;
  const double sqrt_h = std::sqrt(step_size(coarse_level));
  for (int i = 0; i < m_; ++i) {
    const double dw = dyadic_sum(i, lo, lo + n);
    delta_w[static_cast<std::size_t>(i)] = dw;
    xi[static_cast<std::size_t>(i)] = dw / sqrt_h;
  }
}

void WienerGrid::double_ito(int coarse_level, std::size_t k,
                            std::span<double> ito) const {
  check_coarse_args(coarse_level, k);
  const std::size_t m = static_cast<std::size_t>(m_);
  if (m_ > 1 && coarse_level == level_) {
    throw InsufficientResolutionError(
        "double_ito: off-diagonal entries need at least two fine sub-steps "
        "per coarse step (coarse_level must be < grid level when m > 1)");
  }

  const double h = step_size(coarse_level);
  const std::size_t n = std::size_t{1} << (level_ - coarse_level);
  const std::size_t base = k * n;

  // Diagonal from the exact identity; no fine-grid bias.
  for (std::size_t r = 0; r < m; ++r) {
    const double dw = dyadic_sum(static_cast<int>(r), base, base + n);
    ito[r * m + r] = (dw * dw - h) / 2.0;
  }
  if (m_ == 1) return;

  // Off-diagonal left-point sums, compensated so the cross-symmetry identity
  // holds to a few ulps. Scratch is per-thread to keep this allocation-free
  // on the hot path.
  thread_local std::vector<NeumaierSum> sums;
  thread_local std::vector<NeumaierSum> w_offset;  // W_i(s_j) - W_i(t_k)
  sums.assign(m * m, NeumaierSum{});
  w_offset.assign(m, NeumaierSum{});
  for (std::size_t j = base; j < base + n; ++j) {
    if (j > base) {  // the j == base term is identically zero
      for (std::size_t i = 0; i < m; ++i) {
        const double wi = w_offset[i].value();
        for (std::size_t r = 0; r < m; ++r) {
          if (r == i) continue;
          sums[i * m + r].add(wi * fine_increment(j, static_cast<int>(r)));
        }
      }
    }
    for (std::size_t i = 0; i < m; ++i) {
      w_offset[i].add(fine_increment(j, static_cast<int>(i)));
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t r = 0; r < m; ++r) {
      if (r != i) ito[i * m + r] = sums[i * m + r].value();
    }
  }
}

void WienerGrid::dump_csv(std::ostream& os) const {
  os << "step,component,increment\n";
  const std::size_t n = fine_steps();
  for (std::size_t j = 0; j < n; ++j) {
    for (int i = 0; i < m_; ++i) {
      os << j << ',' << i << ',' << format_double(fine_increment(j, i)) << '\n';
    }
  }
}

}  // namespace sdenum
