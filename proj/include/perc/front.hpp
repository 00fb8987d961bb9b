#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "perc/lattice.hpp"
#include "perc/rows.hpp"

namespace perc {

// How the left end of a truncated half-line run is treated. Vacuum never
// re-fills (lower bracket of the untruncated process), Saturated re-occupies
// the leftmost in-parity column every row (upper bracket, by attractiveness).
enum class BoundaryMode { Vacuum, Saturated };

struct Trajectory {
  std::vector<std::optional<std::int64_t>> r;  // right edge per row; nullopt = empty row
  std::optional<std::int64_t> extinct_at;      // first row of the final all-empty suffix
  std::int64_t snapshot_every = 0;
  std::vector<RowOccupancy> snapshots;
};

// Two consecutive rows of occupancy plus window bookkeeping. A value type:
// step() is a pure function of (state, params, field), so identical inputs
// give identical states on any thread.
class FrontState {
 public:
  FrontState() = default;

  static FrontState init_finite(const std::vector<std::int64_t>& cols);
  static FrontState init_left_infinite(std::int64_t M, BoundaryMode mode);

  void step(const Params& params, const RandomField& field);

  const RowOccupancy& prev() const { return prev_; }
  const RowOccupancy& curr() const { return curr_; }
  std::int64_t row() const { return n_; }
  BoundaryMode mode() const { return mode_; }
  std::int64_t window_lo() const { return win_lo_; }
  std::int64_t window_hi() const { return win_hi_; }
  bool left_fixed() const { return left_fixed_; }

  void set_max_slots(std::int64_t s) { max_slots_ = s; }

  bool dead() const { return prev_.empty() && curr_.empty(); }

  // Evolves two states that share window geometry on the same field,
  // evaluating each bond uniform once. Bit-identical to stepping each
  // state separately.
  friend void step_pair(FrontState& a, FrontState& b, const Params& pa, const Params& pb,
                        const RandomField& field);

 private:
  RowOccupancy next_window(std::int64_t& lo1, std::int64_t& hi1) const;
  void adopt(RowOccupancy next, std::int64_t lo1, std::int64_t hi1);

  RowOccupancy prev_;
  RowOccupancy curr_;
  std::int64_t n_ = 0;
  std::int64_t win_lo_ = 0;
  std::int64_t win_hi_ = 0;
  bool left_fixed_ = false;
  BoundaryMode mode_ = BoundaryMode::Vacuum;
  std::int64_t max_slots_ = std::int64_t{1} << 22;
};

Trajectory simulate(const Params& params, FrontState init, std::int64_t T,
                    const RandomField& field, std::int64_t snapshot_every = 0);

struct BracketResult {
  Trajectory lo;   // vacuum truncation
  Trajectory hi;   // saturated truncation
  double agree = 0.0;  // fraction of rows 0..T with equal right edges
};

BracketResult bracket_run(const Params& params, std::int64_t M, std::int64_t T,
                          const RandomField& field);

// Lexicographically rightmost open path from the initial set to row T,
// reconstructed greedily from the top over the realized bonds. Rows ascend
// in the returned sequence. Vacuum-mode states only.
std::vector<Site> rightmost_path(const Params& params, const FrontState& init, std::int64_t T,
                                 const RandomField& field);

// Snapshot dump: one line per sampled row, `n r <cols...>`, X when empty.
void dump_snapshots(std::ostream& os, const Trajectory& traj);

}  // namespace perc
