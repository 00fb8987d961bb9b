#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "perc/lattice.hpp"
#include "perc/oracle_kernels.hpp"

namespace perc {

// Exact joint law of (row n-1, row n) in double precision, dense over the
// subset lattice of the two row windows.
struct SubsetDist {
  detail::RowSpec prev, curr;
  std::int64_t n = 0;
  std::vector<double> joint;  // index = (curr_bits << prev.count) | prev_bits
  double err_bound = 0.0;     // conservative accumulated fp error per entry

  double total() const;
  std::vector<double> curr_marginal() const;  // size 2^curr.count
};

// Law of the right-edge-anchored window: key bit j means column -2j is
// occupied, so bit 0 (the right edge itself) is set in every support set.
// Mass of the empty row is kept separate.
struct WindowLaw {
  int w = 0;
  std::map<std::uint32_t, double> mass;
  double mass_extinct = 0.0;

  double total() const;
};

// A monotone coupling atom: lo_mask subset of hi_mask with joint mass prob.
struct CouplingAtom {
  std::uint32_t lo_mask = 0;
  std::uint32_t hi_mask = 0;
  double prob = 0.0;
};

struct DominationResult {
  bool dominated = false;
  double deficit = 0.0;                  // 1 - maxflow over the non-extinct mass
  std::vector<CouplingAtom> coupling;    // present when dominated
  std::vector<std::uint32_t> witness;    // violating up-set when not dominated
  double witness_gap = 0.0;              // mu(U) - nu(U)
};

struct LemmaReport {
  Params params;
  std::int64_t n = 0;
  int w = 0;
  std::int64_t M = 0;
  double mass_extinct = 0.0;  // extinct mass of the unconditioned law
  bool dominated = false;
  DominationResult result;
};

// Exact law of (row n-1, row n) for the truncated process started from the
// in-parity columns of [init_lo, init_hi]; `wall`, when set, is a hard
// vacuum wall on the left (the init_left_infinite truncation).
SubsetDist exact_row_distribution(const Params& params, const std::vector<std::int64_t>& init,
                                  std::int64_t n, std::optional<std::int64_t> wall = std::nullopt);

// Independent oracle: sums over every open/closed configuration of the
// (at most 24) bonds feeding the same windows.
SubsetDist brute_force_row_distribution(const Params& params,
                                        const std::vector<std::int64_t>& init, std::int64_t n,
                                        std::optional<std::int64_t> wall = std::nullopt);

// P(rows 1..n all non-empty) from initial set {0} (strict survival).
double exact_theta(const Params& params, std::int64_t n);

WindowLaw normalized_window_law(const SubsetDist& dist, int w);

// Renormalizes the non-extinct part to a probability law.
WindowLaw condition_non_extinct(const WindowLaw& law);

// Law of the set with a site added just right of the right edge: each
// support set S maps to (S-2) | {0} truncated to the window; extinct mass
// maps to the point mass on {0}.
WindowLaw shift_and_add_origin(const WindowLaw& law);

// Strassen certification of mu dominated-by nu on the inclusion order via a
// transportation max-flow; infeasibility yields an up-set witness from the
// min cut. Laws must share w and have matching extinct masses.
DominationResult check_domination(const WindowLaw& mu, const WindowLaw& nu);

LemmaReport verify_lemma_domination(const Params& params, std::int64_t n, int w, std::int64_t M);

std::string lemma_report_json(const LemmaReport& report);

// Columns of a window-law support mask, rightmost (0) first.
std::vector<std::int64_t> mask_columns(std::uint32_t mask, int w);

double total_variation(const SubsetDist& a, const SubsetDist& b);

}  // namespace perc
