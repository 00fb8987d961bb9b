#include "perc/coupling.hpp"

#include <atomic>
#include <cmath>

#include "perc/parallel.hpp"

namespace perc {

namespace {

bool words_subset(const RowOccupancy& a, const RowOccupancy& b) {
  // Same window geometry fast path; falls back to the column-wise check.
  if (a.base() == b.base() && a.slots() == b.slots()) {
    const auto wa = a.words();
    const auto wb = b.words();
    for (std::size_t i = 0; i < wa.size(); ++i)
      if (wa[i] & ~wb[i]) return false;
    return true;
  }
  return is_subset(a, b);
}

// The tau pattern at row n: r_n = r_{n-1} - 1 = r_{n-2} - 2, all finite.
bool left_left_pattern(const std::optional<std::int64_t>& r2,
                       const std::optional<std::int64_t>& r1,
                       const std::optional<std::int64_t>& r0) {
  return r2.has_value() && r1.has_value() && r0.has_value() && *r0 == *r1 - 1 && *r1 == *r2 - 1;
}

// eps_tilde-open but eps-closed under the strict-threshold convention.
bool gain_interval(double u, double eps, double eps_tilde) {
  return u >= eps && u < eps_tilde;
}

}  // namespace

void validate(const CoupledConfig& config) {
  if (config.lo.p != config.hi.p)
    raise(Errc::InvalidCoupling, "coupled config: diagonal parameters must match");
  if (config.lo.eps > config.hi.eps)
    raise(Errc::InvalidCoupling, "coupled config: requires eps <= eps_tilde");
}

CoupledRun coupled_run(const CoupledConfig& config, std::int64_t M, std::int64_t T,
                       const RandomField& field) {
  validate(config);
  FrontState lo = FrontState::init_left_infinite(M, BoundaryMode::Saturated);
  FrontState hi = FrontState::init_left_infinite(M, BoundaryMode::Saturated);
  CoupledRun run;
  run.lo.r.reserve(static_cast<std::size_t>(T) + 1);
  run.hi.r.reserve(static_cast<std::size_t>(T) + 1);
  run.lo.r.push_back(lo.curr().right_edge());
  run.hi.r.push_back(hi.curr().right_edge());
  for (std::int64_t n = 1; n <= T; ++n) {
    step_pair(lo, hi, config.lo, config.hi, field);
    run.lo.r.push_back(lo.curr().right_edge());
    run.hi.r.push_back(hi.curr().right_edge());
    if (!words_subset(lo.curr(), hi.curr())) ++run.containment_violations;
  }
  return run;
}

std::optional<std::int64_t> detect_tau_scan(
    std::span<const std::optional<std::int64_t>> r, double eps, double eps_tilde,
    const std::function<double(std::int64_t col, std::int64_t row)>& vert_uniform,
    std::int64_t from_row) {
  const std::int64_t T = static_cast<std::int64_t>(r.size()) - 1;
  for (std::int64_t n = std::max<std::int64_t>(from_row, 2); n <= T; ++n) {
    const auto& r2 = r[static_cast<std::size_t>(n - 2)];
    if (!left_left_pattern(r2, r[static_cast<std::size_t>(n - 1)], r[static_cast<std::size_t>(n)]))
      continue;
    if (gain_interval(vert_uniform(*r2, n - 2), eps, eps_tilde)) return n;
  }
  return std::nullopt;
}

std::optional<std::int64_t> detect_tau(const Params& params, double eps_tilde, std::int64_t M,
                                       std::int64_t horizon, const RandomField& field) {
  if (params.eps > eps_tilde) raise(Errc::InvalidCoupling, "detect_tau: requires eps <= eps_tilde");
  FrontState state = FrontState::init_left_infinite(M, BoundaryMode::Saturated);
  std::optional<std::int64_t> r2, r1, r0 = state.curr().right_edge();
  for (std::int64_t n = 1; n <= horizon; ++n) {
    state.step(params, field);
    r2 = r1;
    r1 = r0;
    r0 = state.curr().right_edge();
    if (n >= 2 && left_left_pattern(r2, r1, r0)) {
      const Bond vert{{*r2, n - 2}, BondKind::Vert};
      if (gain_interval(field.uniform(vert), params.eps, eps_tilde)) return n;
    }
  }
  return std::nullopt;
}

TauRecord tau_chain(const CoupledConfig& config, std::int64_t M, std::int64_t T,
                    const RandomField& field, GainReport* report) {
  validate(config);
  FrontState lo = FrontState::init_left_infinite(M, BoundaryMode::Saturated);
  FrontState hi = FrontState::init_left_infinite(M, BoundaryMode::Saturated);
  TauRecord rec;
  rec.horizon = T;
  std::int64_t next_allowed = 2;  // tau_k >= tau_{k-1} + 2, first tau >= 2
  std::optional<std::int64_t> r2, r1, r0 = lo.curr().right_edge();
  if (report) report->rows.push_back({0, r0, hi.curr().right_edge(), false});
  for (std::int64_t n = 1; n <= T; ++n) {
    step_pair(lo, hi, config.lo, config.hi, field);
    r2 = r1;
    r1 = r0;
    r0 = lo.curr().right_edge();
    bool is_tau = false;
    if (n >= next_allowed && config.lo.eps < config.hi.eps &&
        left_left_pattern(r2, r1, r0)) {
      const Bond vert{{*r2, n - 2}, BondKind::Vert};
      if (gain_interval(field.uniform(vert), config.lo.eps, config.hi.eps)) {
        is_tau = true;
        if (!rec.taus.empty()) rec.gaps.push_back(n - rec.taus.back());
        rec.taus.push_back(n);
        next_allowed = n + 2;
        lo = hi;  // restart: both chains continue from the upper state
        r0 = lo.curr().right_edge();
        r1.reset();
        r2.reset();
      }
    }
    if (report) report->rows.push_back({n, r0, hi.curr().right_edge(), is_tau});
  }
  rec.k_of_T = static_cast<std::int64_t>(rec.taus.size());
  return rec;
}

AlignedReport aligned_coupling(const std::vector<CouplingAtom>& coupling, int w,
                               const Params& params, std::int64_t T, std::int64_t R,
                               std::uint64_t seed, int threads) {
  if (coupling.empty()) raise(Errc::InvalidCoupling, "aligned_coupling: empty coupling");
  double total = 0.0;
  for (const auto& atom : coupling) {
    if ((atom.lo_mask & ~atom.hi_mask) != 0)
      raise(Errc::InvalidCoupling, "aligned_coupling: support pair violates inclusion");
    if ((atom.lo_mask & 1u) == 0 || (atom.hi_mask & 1u) == 0)
      raise(Errc::InvalidCoupling, "aligned_coupling: window sets must contain the right edge");
    total += atom.prob;
  }
  if (std::fabs(total - 1.0) > 1e-6)
    raise(Errc::InvalidCoupling, "aligned_coupling: masses do not sum to one");

  std::atomic<std::int64_t> violations{0};
  std::atomic<std::int64_t> rows_checked{0};
  parallel_for(R, threads, [&](std::int64_t i) {
    const std::uint64_t rep_seed = derive_seed(seed, static_cast<std::uint64_t>(i));
    // One uniform to pick the atom, an independent field to evolve.
    const double u = bits_to_unit(mix64(rep_seed ^ 0xA71EDC0DULL));
    double acc = 0.0;
    const CouplingAtom* chosen = &coupling.back();
    for (const auto& atom : coupling) {
      acc += atom.prob;
      if (u < acc) {
        chosen = &atom;
        break;
      }
    }
    const RandomField field(derive_seed(rep_seed, 1));
    FrontState a = FrontState::init_finite(mask_columns(chosen->lo_mask, w));
    FrontState b = FrontState::init_finite(mask_columns(chosen->hi_mask, w));
    std::int64_t local_checked = 0;
    std::int64_t local_viol = 0;
    for (std::int64_t nrow = 1; nrow <= T; ++nrow) {
      if (a.dead() && b.dead()) break;
      a.step(params, field);
      b.step(params, field);
      const auto ra = a.curr().right_edge();
      const auto rb = b.curr().right_edge();
      ++local_checked;
      // EXTINCT compares below every finite edge.
      if (ra.has_value() && (!rb.has_value() || *ra > *rb)) ++local_viol;
    }
    rows_checked += local_checked;
    violations += local_viol;
  });

  AlignedReport rep;
  rep.replicas = R;
  rep.rows_checked = rows_checked.load();
  rep.violations = violations.load();
  return rep;
}

}  // namespace perc
