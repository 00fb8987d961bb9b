#pragma once

#include <cstdint>

#include "perc/errors.hpp"

namespace perc {

// Rotated lattice: sites (m, n) with n >= 0 and m + n even. Bonds are
// oriented upward; NE/NW raise the row by one, Vert by two.
struct Site {
  std::int64_t m = 0;
  std::int64_t n = 0;

  friend bool operator==(const Site&, const Site&) = default;
};

enum class BondKind : std::uint8_t { NE = 0, NW = 1, Vert = 2 };

struct Bond {
  Site tail;
  BondKind kind = BondKind::NE;

  friend bool operator==(const Bond&, const Bond&) = default;
};

inline Site head(const Bond& b) {
  switch (b.kind) {
    case BondKind::NE:
      return {b.tail.m + 1, b.tail.n + 1};
    case BondKind::NW:
      return {b.tail.m - 1, b.tail.n + 1};
    case BondKind::Vert:
    default:
      return {b.tail.m, b.tail.n + 2};
  }
}

// (p, eps): diagonal bonds open with probability p, vertical enhancement
// bonds with probability eps.
struct Params {
  double p = 0.0;
  double eps = 0.0;

  friend bool operator==(const Params&, const Params&) = default;
};

inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

// Derives an independent-looking stream seed from a master seed. Used for
// replica fields and bisection iterations; pure, so replicas can be laid
// out in any order by any number of workers.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return mix64(master ^ mix64(stream + 0x9E3779B97F4A7C15ULL));
}

inline double bits_to_unit(std::uint64_t bits) {
  // 53-bit mantissa; exact 0 is possible, exact 1 is not.
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// One uniform variable per bond, realized as a stateless keyed hash of
// (seed, tail.m, tail.n, kind). Nothing is stored: re-querying a bond at
// any time, from any thread, under any parameter pair, returns the same
// value. That is what makes shared-randomness couplings exact here.
class RandomField {
 public:
  explicit RandomField(std::uint64_t seed)
      : seed_(seed), h0_(mix64(seed + 0x9E3779B97F4A7C15ULL)) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t bits(const Bond& b) const {
    std::uint64_t h = mix64(h0_ ^ static_cast<std::uint64_t>(b.tail.m));
    h = mix64(h ^ (static_cast<std::uint64_t>(b.tail.n) << 2 |
                   static_cast<std::uint64_t>(b.kind)));
    return h;
  }

  // Uniform on [0,1) at 2^-53 resolution.
  double uniform(const Bond& b) const { return bits_to_unit(bits(b)); }

  // Strict comparison: lambda = 0 never opens, lambda = 1 always does.
  bool is_open(const Bond& b, const Params& params) const {
    const double lambda = (b.kind == BondKind::Vert) ? params.eps : params.p;
    return uniform(b) < lambda;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t h0_;
};

inline double bond_uniform(const RandomField& field, const Bond& b) { return field.uniform(b); }

inline bool is_open(const Bond& b, const Params& params, const RandomField& field) {
  return field.is_open(b, params);
}

}  // namespace perc
