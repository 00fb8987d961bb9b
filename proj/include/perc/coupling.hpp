#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "perc/front.hpp"
#include "perc/lattice.hpp"
#include "perc/oracle.hpp"

namespace perc {

// Two parameter pairs evolved on one field: same p, enhancement densities
// eps <= eps_tilde. Shared thresholds give pathwise containment lo in hi.
struct CoupledConfig {
  Params lo;
  Params hi;
};

void validate(const CoupledConfig& config);

struct CoupledRun {
  Trajectory lo;
  Trajectory hi;
  std::int64_t containment_violations = 0;  // always 0; re-checked per row
};

CoupledRun coupled_run(const CoupledConfig& config, std::int64_t M, std::int64_t T,
                       const RandomField& field);

// Rows at which the lower process lost one column of right edge twice in a
// row and the designated vertical bond was eps_tilde-open but eps-closed,
// with the restart-chain bookkeeping of the inductive construction.
struct TauRecord {
  std::vector<std::int64_t> taus;
  std::int64_t k_of_T = 0;
  std::vector<std::int64_t> gaps;  // tau_{k+1} - tau_k
  std::int64_t horizon = 0;
};

struct GainRow {
  std::int64_t row = 0;
  std::optional<std::int64_t> r_lo;
  std::optional<std::int64_t> r_hi;
  bool is_tau = false;
};

struct GainReport {
  std::vector<GainRow> rows;
};

// Pattern scan over a right-edge series with an external uniform lookup for
// the designated vertical bonds; usable on synthetic data.
std::optional<std::int64_t> detect_tau_scan(
    std::span<const std::optional<std::int64_t>> r, double eps, double eps_tilde,
    const std::function<double(std::int64_t col, std::int64_t row)>& vert_uniform,
    std::int64_t from_row = 2);

// First tau on a saturated truncated run of the (p, eps) process.
std::optional<std::int64_t> detect_tau(const Params& params, double eps_tilde, std::int64_t M,
                                       std::int64_t horizon, const RandomField& field);

// Coupled evolution with the restart chain: at each tau the lower process
// state is replaced by the upper one.
TauRecord tau_chain(const CoupledConfig& config, std::int64_t M, std::int64_t T,
                    const RandomField& field, GainReport* report = nullptr);

struct AlignedReport {
  std::int64_t replicas = 0;
  std::int64_t rows_checked = 0;
  std::int64_t violations = 0;
};

// Samples (A', B') from a monotone coupling (e.g. produced by
// check_domination), evolves both from right-edge-anchored initial sets on
// shared bonds and checks r(N_n^A)-r(A) <= r(N_n^B)-r(B) on every row.
AlignedReport aligned_coupling(const std::vector<CouplingAtom>& coupling, int w,
                               const Params& params, std::int64_t T, std::int64_t R,
                               std::uint64_t seed, int threads = 1);

}  // namespace perc
