#include "perc/renorm.hpp"

#include <cmath>

#include "perc/errors.hpp"
#include "perc/parallel.hpp"

namespace perc {

namespace {

std::int64_t floor_to_parity(double x, std::int64_t row) {
  std::int64_t f = static_cast<std::int64_t>(std::floor(x));
  if (((f ^ row) & 1) != 0) --f;
  return f;
}

}  // namespace

BlockSpec build_parallelogram(std::int64_t L, double alpha) {
  if (!(alpha > 0.0) || L < 1 || static_cast<double>(L) * alpha < 20.0)
    raise(Errc::Degenerate, "build_parallelogram: need alpha > 0 and L >= 20/alpha");
  BlockSpec spec;
  spec.L = L;
  spec.alpha = alpha;
  spec.height = std::llround(1.1 * static_cast<double>(L));
  const double aL = alpha * static_cast<double>(L);
  spec.row_cols.resize(static_cast<std::size_t>(spec.height) + 1);
  for (std::int64_t n = 0; n <= spec.height; ++n) {
    const double t = static_cast<double>(n) / static_cast<double>(spec.height);
    const std::int64_t lo = floor_to_parity(aL * (-0.15 + 1.1 * t), n);
    const std::int64_t hi = floor_to_parity(aL * (-0.05 + 1.1 * t), n);
    if (hi < lo) raise(Errc::Degenerate, "build_parallelogram: empty row after rounding");
    spec.row_cols[static_cast<std::size_t>(n)] = {lo, hi};
  }
  return spec;
}

BlockSpec mirror(const BlockSpec& spec) {
  BlockSpec out = spec;
  for (auto& [lo, hi] : out.row_cols) {
    const std::int64_t nlo = -hi, nhi = -lo;
    lo = nlo;
    hi = nhi;
  }
  return out;
}

bool crossing_event(const BlockSpec& spec, const Params& params, const RandomField& field,
                    std::pair<std::int64_t, std::int64_t> shift,
                    std::vector<RowOccupancy>* audit_rows) {
  const auto [dx, dy] = shift;
  const auto bounds = [&](std::int64_t n) { return spec.row_cols[static_cast<std::size_t>(n)]; };

  RowOccupancy below(-1, 0, 0);  // row -1: empty
  RowOccupancy curr(0, bounds(0).first, bounds(0).second);
  for (std::int64_t c = curr.base(); c <= curr.col_hi(); c += 2) curr.set(c);
  if (audit_rows) audit_rows->push_back(curr);

  for (std::int64_t n = 1; n <= spec.height; ++n) {
    const auto [lo, hi] = bounds(n);
    RowOccupancy next(n, lo, hi);
    curr.for_each([&](std::int64_t m) {
      if (m + 1 >= lo && m + 1 <= hi &&
          field.is_open({{m + dx, (n - 1) + dy}, BondKind::NE}, params))
        next.set(m + 1);
      if (m - 1 >= lo && m - 1 <= hi &&
          field.is_open({{m + dx, (n - 1) + dy}, BondKind::NW}, params))
        next.set(m - 1);
    });
    if (params.eps > 0.0 && n >= 2) {
      below.for_each([&](std::int64_t m) {
        if (m >= lo && m <= hi && field.is_open({{m + dx, (n - 2) + dy}, BondKind::Vert}, params))
          next.set(m);
      });
    }
    if (audit_rows) audit_rows->push_back(next);
    if (next.empty() && curr.empty()) return false;
    below = std::move(curr);
    curr = std::move(next);
  }
  return !curr.empty();
}

BlockEventEstimate estimate_block_event(const Params& params, std::int64_t L, double alpha,
                                        std::int64_t R, std::uint64_t seed, int threads) {
  const BlockSpec spec = build_parallelogram(L, alpha);
  const BlockSpec neg = mirror(spec);
  std::vector<std::uint8_t> hit(static_cast<std::size_t>(R), 0);
  parallel_for(R, threads, [&](std::int64_t i) {
    const RandomField field(derive_seed(seed, static_cast<std::uint64_t>(i)));
    hit[static_cast<std::size_t>(i)] =
        (crossing_event(spec, params, field) && crossing_event(neg, params, field)) ? 1 : 0;
  });
  std::int64_t count = 0;
  for (auto h : hit) count += h;
  BlockEventEstimate est;
  est.L = L;
  est.alpha = alpha;
  est.R = R;
  est.p_event = static_cast<double>(count) / static_cast<double>(R);
  est.stderr_ = std::sqrt(est.p_event * (1.0 - est.p_event) / static_cast<double>(R));
  return est;
}

BlockField block_field_sample(const Params& params, std::int64_t L, double alpha, int grid_w,
                              int grid_h, std::uint64_t seed, int threads) {
  if (grid_w < 1 || grid_h < 1 || static_cast<std::int64_t>(grid_w) * grid_h > 1 << 16)
    raise(Errc::WindowExceeded, "block_field_sample: grid too large");
  const BlockSpec spec = build_parallelogram(L, alpha);
  const BlockSpec neg = mirror(spec);
  BlockField bf;
  bf.L = L;
  bf.alpha = alpha;
  bf.grid_w = grid_w;
  bf.grid_h = grid_h;
  bf.seed = seed;
  bf.eta.assign(static_cast<std::size_t>(grid_w) * grid_h, 0);
  const RandomField field(seed);
  const double step_x = 0.9 * alpha * static_cast<double>(L);
  parallel_for(static_cast<std::int64_t>(grid_w) * grid_h, threads, [&](std::int64_t cell) {
    const int j = static_cast<int>(cell / grid_w);
    const int i = static_cast<int>(cell % grid_w);
    const std::int64_t m = 2 * static_cast<std::int64_t>(i) + (j & 1);
    const std::int64_t dy = static_cast<std::int64_t>(L) * j;
    std::int64_t dx = static_cast<std::int64_t>(std::floor(step_x * static_cast<double>(m)));
    if (((dx ^ dy) & 1) != 0) --dx;  // keep translated sites on the lattice
    const std::pair<std::int64_t, std::int64_t> shift{dx, dy};
    bf.eta[static_cast<std::size_t>(cell)] =
        (crossing_event(spec, params, field, shift) && crossing_event(neg, params, field, shift))
            ? 1
            : 0;
  });
  return bf;
}

bool renormalized_percolation_check(const BlockField& field) {
  const int W = field.grid_w, H = field.grid_h;
  if (W == 0 || H == 0) return false;
  std::vector<std::uint8_t> reach(static_cast<std::size_t>(W), 0);
  for (int i = 0; i < W; ++i) reach[static_cast<std::size_t>(i)] = field.at(i, 0) ? 1 : 0;
  std::vector<std::uint8_t> next(static_cast<std::size_t>(W), 0);
  for (int j = 1; j < H; ++j) {
    for (int i = 0; i < W; ++i) {
      bool fed;
      if (j & 1) {  // sites m=2i+1 fed from m-1 (index i) and m+1 (index i+1)
        fed = reach[static_cast<std::size_t>(i)] ||
              (i + 1 < W && reach[static_cast<std::size_t>(i + 1)]);
      } else {  // sites m=2i fed from m-1 (index i-1) and m+1 (index i)
        fed = reach[static_cast<std::size_t>(i)] ||
              (i - 1 >= 0 && reach[static_cast<std::size_t>(i - 1)]);
      }
      next[static_cast<std::size_t>(i)] = (fed && field.at(i, j)) ? 1 : 0;
    }
    reach.swap(next);
  }
  for (int i = 0; i < W; ++i)
    if (reach[static_cast<std::size_t>(i)]) return true;
  return false;
}

}  // namespace perc
