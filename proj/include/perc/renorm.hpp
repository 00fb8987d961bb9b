#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "perc/lattice.hpp"
#include "perc/rows.hpp"

namespace perc {

// Discretized crossing parallelogram: base near the origin, top displaced
// by alpha per row, per-row inclusive column bounds floored to parity.
struct BlockSpec {
  std::int64_t L = 0;
  double alpha = 0.0;
  std::int64_t height = 0;  // top row index, round(1.1 L)
  std::vector<std::pair<std::int64_t, std::int64_t>> row_cols;
};

BlockSpec build_parallelogram(std::int64_t L, double alpha);

// Column-negated mirror (-D).
BlockSpec mirror(const BlockSpec& spec);

// Confined front evolution inside the (shifted) region from its full base
// segment; true when the top row is reached. Occupancy never leaves the
// region; `audit_rows` captures every row when provided.
bool crossing_event(const BlockSpec& spec, const Params& params, const RandomField& field,
                    std::pair<std::int64_t, std::int64_t> shift = {0, 0},
                    std::vector<RowOccupancy>* audit_rows = nullptr);

struct BlockEventEstimate {
  std::int64_t L = 0;
  double alpha = 0.0;
  std::int64_t R = 0;
  double p_event = 0.0;
  double stderr_ = 0.0;
};

// P(E): crossings of D and of -D on the same randomness.
BlockEventEstimate estimate_block_event(const Params& params, std::int64_t L, double alpha,
                                        std::int64_t R, std::uint64_t seed, int threads = 1);

// eta(m, j) for the coarse lattice sites m = 2i + (j&1), translated by
// (0.9 alpha L m, L j) and evaluated on one shared field.
struct BlockField {
  std::int64_t L = 0;
  double alpha = 0.0;
  int grid_w = 0;
  int grid_h = 0;
  std::uint64_t seed = 0;
  std::vector<std::uint8_t> eta;  // [j * grid_w + i]

  bool at(int i, int j) const { return eta[static_cast<std::size_t>(j) * grid_w + i] != 0; }
};

BlockField block_field_sample(const Params& params, std::int64_t L, double alpha, int grid_w,
                              int grid_h, std::uint64_t seed, int threads = 1);

// Oriented site-percolation crossing of the eta grid from bottom to top.
bool renormalized_percolation_check(const BlockField& field);

}  // namespace perc
