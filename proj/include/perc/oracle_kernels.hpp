#pragma once

// Exact-distribution kernels, templated on the probability scalar so the
// unit tests can instantiate them with exact rationals at tiny sizes while
// the production surface uses double.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "perc/errors.hpp"

namespace perc::detail {

inline constexpr int kMaxJointBits = 25;
inline constexpr int kMaxBruteBonds = 24;

// In-parity columns lo, lo+2, ..., lo+2(count-1) of one row.
struct RowSpec {
  std::int64_t lo = 0;
  int count = 0;

  std::int64_t col(int k) const { return lo + 2 * k; }
  int index(std::int64_t c) const {  // -1 when outside
    if (c < lo) return -1;
    const std::int64_t k = (c - lo) / 2;
    if (((c - lo) & 1) != 0 || k >= count) return -1;
    return static_cast<int>(k);
  }
  friend bool operator==(const RowSpec&, const RowSpec&) = default;
};

// Reachable envelope of row k for a process started from columns in
// [init_lo, init_hi]: grows right by one column per row, and left as well
// unless a hard vacuum wall truncates it.
inline RowSpec row_spec(std::int64_t k, std::int64_t init_lo, std::int64_t init_hi,
                        std::optional<std::int64_t> wall) {
  std::int64_t lo = wall.has_value() ? *wall : init_lo - k;
  if (((lo ^ k) & 1) != 0) ++lo;
  const std::int64_t hi = init_hi + k;
  RowSpec s;
  s.lo = lo;
  s.count = hi >= lo ? static_cast<int>((hi - lo) / 2 + 1) : 0;
  return s;
}

// Joint law of (row n-1, row n); index = (curr_bits << prev.count) | prev_bits.
template <class S>
struct JointDistT {
  RowSpec prev, curr;
  std::int64_t n = 0;
  std::vector<S> w;
  std::int64_t factor_ops = 0;  // per-path multiply count, drives the double error bound
};

template <class S>
void dp_step(JointDistT<S>& layer, const S& p, const S& eps, const RowSpec& next) {
  const RowSpec prev = layer.prev;
  const RowSpec curr = layer.curr;
  const int P = prev.count, C = curr.count, X = next.count;
  if (C + X > kMaxJointBits)
    raise(Errc::TooLarge, "exact_row_distribution: joint state needs " + std::to_string(C + X) +
                              " bits (max " + std::to_string(kMaxJointBits) + ")");
  const int d = P > 0 ? static_cast<int>((prev.lo - next.lo) / 2) : 0;

  std::vector<S> out(std::size_t(1) << (C + X), S(0));
  const int scratch_bits = std::max(P, X) + 1;
  std::vector<S> tbl(std::size_t(1) << scratch_bits), nxt(std::size_t(1) << scratch_bits);
  std::vector<S> dfeed(static_cast<std::size_t>(X));

  const S one(1);
  const S pq = one - p;
  const S eq = one - eps;

  for (std::uint64_t c = 0; c < (std::uint64_t(1) << C); ++c) {
    // Diagonal feed survival per target site: product of (1-p) over open
    // attempts from occupied neighbours in the current row.
    for (int j = 0; j < X; ++j) {
      const std::int64_t col = next.col(j);
      S f = one;
      const int il = curr.index(col - 1);
      if (il >= 0 && ((c >> il) & 1)) f *= pq;
      const int ir = curr.index(col + 1);
      if (ir >= 0 && ((c >> ir) & 1)) f *= pq;
      dfeed[static_cast<std::size_t>(j)] = f;
    }

    // Sweep: eliminate prev bits in column order while emitting next bits.
    std::copy(layer.w.begin() + (static_cast<std::size_t>(c) << P),
              layer.w.begin() + ((static_cast<std::size_t>(c) + 1) << P), tbl.begin());
    int nx = 0, np = P;
    for (int j = 0; j < X; ++j) {
      const bool has_p = (j - d) >= 0 && (j - d) < P;
      const S& df = dfeed[static_cast<std::size_t>(j)];
      if (has_p) {
        const S f00 = df;        // x=0 given prev bit 0
        const S f01 = df * eq;   // x=0 given prev bit 1
        const S f10 = one - f00; // x=1 given prev bit 0
        const S f11 = one - f01;
        const std::uint64_t nxm = std::uint64_t(1) << nx;
        for (std::uint64_t hi = 0; hi < (std::uint64_t(1) << (np - 1)); ++hi) {
          const std::uint64_t b0 = (hi << 1) << nx;
          const std::uint64_t b1 = ((hi << 1) | 1) << nx;
          const std::uint64_t o0 = hi << (nx + 1);
          for (std::uint64_t x = 0; x < nxm; ++x) {
            const S& v0 = tbl[b0 | x];
            const S& v1 = tbl[b1 | x];
            nxt[o0 | x] = v0 * f00 + v1 * f01;
            nxt[o0 | nxm | x] = v0 * f10 + v1 * f11;
          }
        }
        np -= 1;
      } else {
        const S f0 = df;
        const S f1 = one - df;
        const std::uint64_t nxm = std::uint64_t(1) << nx;
        for (std::uint64_t hi = 0; hi < (std::uint64_t(1) << np); ++hi) {
          const std::uint64_t in = hi << nx;
          const std::uint64_t o0 = hi << (nx + 1);
          for (std::uint64_t x = 0; x < nxm; ++x) {
            const S& v = tbl[in | x];
            nxt[o0 | x] = v * f0;
            nxt[o0 | nxm | x] = v * f1;
          }
        }
      }
      nx += 1;
      tbl.swap(nxt);
    }
    for (std::uint64_t x = 0; x < (std::uint64_t(1) << X); ++x)
      out[(x << C) | c] = tbl[x];
  }

  layer.prev = curr;
  layer.curr = next;
  layer.n += 1;
  layer.w = std::move(out);
  layer.factor_ops += 2 * X + 2;
}

template <class S>
JointDistT<S> dp_init(const std::vector<std::int64_t>& init) {
  if (init.empty()) raise(Errc::EmptyInitial, "oracle: empty initial set");
  for (auto c : init)
    if (c & 1) raise(Errc::OddColumn, "oracle: odd initial column");
  const auto [mn, mx] = std::minmax_element(init.begin(), init.end());
  JointDistT<S> layer;
  layer.prev = RowSpec{0, 0};
  layer.curr = RowSpec{*mn, static_cast<int>((*mx - *mn) / 2 + 1)};
  if (layer.curr.count > kMaxJointBits)
    raise(Errc::TooLarge, "oracle: initial row too wide");
  layer.n = 0;
  layer.w.assign(std::size_t(1) << layer.curr.count, S(0));
  std::uint64_t bits = 0;
  for (auto c : init) bits |= std::uint64_t(1) << layer.curr.index(c);
  layer.w[bits] = S(1);
  return layer;
}

template <class S>
JointDistT<S> dp_row_distribution(const S& p, const S& eps, const std::vector<std::int64_t>& init,
                                  std::int64_t n, std::optional<std::int64_t> wall) {
  if (n < 0 || n > 64) raise(Errc::TooLarge, "exact_row_distribution: n out of range");
  auto layer = dp_init<S>(init);
  const auto [mn, mx] = std::minmax_element(init.begin(), init.end());
  if (wall.has_value() && *wall > *mn)
    raise(Errc::WindowMismatch, "oracle: wall must not cut the initial set");
  for (std::int64_t k = 1; k <= n; ++k) dp_step(layer, p, eps, row_spec(k, *mn, *mx, wall));
  return layer;
}

// P(rows 1..n all non-empty) from initial set {0}: the same DP with mass on
// empty current rows swept into an absorbing dead bucket after every level.
template <class S>
S dp_theta(const S& p, const S& eps, std::int64_t n) {
  auto layer = dp_init<S>({0});
  for (std::int64_t k = 1; k <= n; ++k) {
    dp_step(layer, p, eps, row_spec(k, 0, 0, std::nullopt));
    const std::uint64_t dead_block = std::uint64_t(1) << layer.prev.count;
    for (std::uint64_t i = 0; i < dead_block; ++i) layer.w[i] = S(0);
  }
  S alive(0);
  for (const auto& v : layer.w) alive += v;
  return alive;
}

template <class S>
JointDistT<S> bf_row_distribution(const S& p, const S& eps, const std::vector<std::int64_t>& init,
                                  std::int64_t n, std::optional<std::int64_t> wall) {
  if (n < 0 || n > 16) raise(Errc::TooLarge, "brute_force_row_distribution: n out of range");
  auto layer0 = dp_init<S>(init);
  const auto [mn, mx] = std::minmax_element(init.begin(), init.end());
  const std::int64_t init_lo = *mn, init_hi = *mx;

  std::vector<RowSpec> rows(static_cast<std::size_t>(n) + 1);
  for (std::int64_t k = 0; k <= n; ++k)
    rows[static_cast<std::size_t>(k)] = row_spec(k, init_lo, init_hi, wall);

  struct BondRec {
    int tail_row, tail_idx, head_row, head_idx;
    bool vert;
  };
  std::vector<BondRec> bonds;
  for (std::int64_t k = 0; k < n; ++k) {
    const RowSpec& rk = rows[static_cast<std::size_t>(k)];
    const RowSpec& rk1 = rows[static_cast<std::size_t>(k + 1)];
    for (int i = 0; i < rk.count; ++i) {
      const std::int64_t m = rk.col(i);
      const int ine = rk1.index(m + 1);
      if (ine >= 0) bonds.push_back({static_cast<int>(k), i, static_cast<int>(k + 1), ine, false});
      const int inw = rk1.index(m - 1);
      if (inw >= 0) bonds.push_back({static_cast<int>(k), i, static_cast<int>(k + 1), inw, false});
    }
    if (k + 2 <= n) {
      const RowSpec& rk2 = rows[static_cast<std::size_t>(k + 2)];
      for (int i = 0; i < rk.count; ++i) {
        const int iv = rk2.index(rk.col(i));
        if (iv >= 0) bonds.push_back({static_cast<int>(k), i, static_cast<int>(k + 2), iv, true});
      }
    }
  }
  // Feeds must cascade row by row.
  std::stable_sort(bonds.begin(), bonds.end(),
                   [](const BondRec& a, const BondRec& b) { return a.head_row < b.head_row; });
  const int B = static_cast<int>(bonds.size());
  if (B > kMaxBruteBonds)
    raise(Errc::TooLarge, "brute_force_row_distribution: " + std::to_string(B) + " bonds (max " +
                              std::to_string(kMaxBruteBonds) + ")");

  JointDistT<S> out;
  out.prev = n >= 1 ? rows[static_cast<std::size_t>(n - 1)] : RowSpec{0, 0};
  out.curr = rows[static_cast<std::size_t>(n)];
  out.n = n;
  out.w.assign(std::size_t(1) << (out.prev.count + out.curr.count), S(0));

  std::uint64_t init_bits = 0;
  for (auto c : init)
    init_bits |= std::uint64_t(1) << rows[0].index(c);

  std::vector<std::uint64_t> occ(static_cast<std::size_t>(n) + 1, 0);
  const S one(1);
  for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << B); ++mask) {
    S prob = one;
    for (int b = 0; b < B; ++b) {
      const S& lambda = bonds[static_cast<std::size_t>(b)].vert ? eps : p;
      prob *= ((mask >> b) & 1) ? lambda : one - lambda;
    }
    std::fill(occ.begin(), occ.end(), 0);
    occ[0] = init_bits;
    for (int b = 0; b < B; ++b) {
      const BondRec& br = bonds[static_cast<std::size_t>(b)];
      if (((mask >> b) & 1) &&
          ((occ[static_cast<std::size_t>(br.tail_row)] >> br.tail_idx) & 1))
        occ[static_cast<std::size_t>(br.head_row)] |= std::uint64_t(1) << br.head_idx;
    }
    const std::uint64_t pbits = n >= 1 ? occ[static_cast<std::size_t>(n - 1)] : 0;
    out.w[(occ[static_cast<std::size_t>(n)] << out.prev.count) | pbits] += prob;
  }
  return out;
}

}  // namespace perc::detail
