#include "perc/front.hpp"

#include <algorithm>
#include <ostream>

namespace perc {

FrontState FrontState::init_finite(const std::vector<std::int64_t>& cols) {
  if (cols.empty()) raise(Errc::EmptyInitial, "init_finite: empty initial set");
  for (auto c : cols)
    if (c & 1) raise(Errc::OddColumn, "init_finite: odd column " + std::to_string(c));
  FrontState st;
  st.win_lo_ = *std::min_element(cols.begin(), cols.end());
  st.win_hi_ = *std::max_element(cols.begin(), cols.end());
  st.left_fixed_ = false;
  st.mode_ = BoundaryMode::Vacuum;
  st.curr_ = RowOccupancy(0, st.win_lo_, st.win_hi_);
  for (auto c : cols) st.curr_.set(c);
  st.prev_ = RowOccupancy(-1, st.win_lo_, st.win_hi_);
  return st;
}

FrontState FrontState::init_left_infinite(std::int64_t M, BoundaryMode mode) {
  M = std::max<std::int64_t>(M, 1);
  FrontState st;
  st.win_lo_ = -2 * M;
  st.win_hi_ = 0;
  st.left_fixed_ = true;  // hard wall at -2M; the truncation is the model
  st.mode_ = mode;
  st.curr_ = RowOccupancy(0, st.win_lo_, st.win_hi_);
  for (std::int64_t c = st.win_lo_; c <= 0; c += 2) st.curr_.set(c);
  st.prev_ = RowOccupancy(-1, st.win_lo_, st.win_hi_);
  return st;
}

RowOccupancy FrontState::next_window(std::int64_t& lo1, std::int64_t& hi1) const {
  lo1 = left_fixed_ ? win_lo_ : win_lo_ - 1;
  hi1 = win_hi_ + 1;
  RowOccupancy next(n_ + 1, lo1, hi1);
  if (next.slots() > max_slots_)
    raise(Errc::WindowExceeded, "step: window exceeds " + std::to_string(max_slots_) + " slots");
  return next;
}

void FrontState::adopt(RowOccupancy next, std::int64_t lo1, std::int64_t hi1) {
  if (mode_ == BoundaryMode::Saturated) next.set(next.base());
  prev_ = std::move(curr_);
  curr_ = std::move(next);
  n_ += 1;
  win_lo_ = lo1;
  win_hi_ = hi1;
}

void FrontState::step(const Params& params, const RandomField& field) {
  std::int64_t lo1 = 0, hi1 = 0;
  RowOccupancy next = next_window(lo1, hi1);
  const std::int64_t n = n_;
  curr_.for_each([&](std::int64_t m) {
    if (field.is_open({{m, n}, BondKind::NE}, params)) next.set(m + 1);
    if (m - 1 >= lo1 && field.is_open({{m, n}, BondKind::NW}, params)) next.set(m - 1);
  });
  if (params.eps > 0.0 && n >= 1) {
    prev_.for_each([&](std::int64_t m) {
      if (field.is_open({{m, n - 1}, BondKind::Vert}, params)) next.set(m);
    });
  }
  adopt(std::move(next), lo1, hi1);
}

void step_pair(FrontState& a, FrontState& b, const Params& pa, const Params& pb,
               const RandomField& field) {
  if (a.n_ != b.n_ || a.win_lo_ != b.win_lo_ || a.win_hi_ != b.win_hi_ ||
      a.left_fixed_ != b.left_fixed_)
    raise(Errc::WindowMismatch, "step_pair: states must share window geometry");
  std::int64_t lo1 = 0, hi1 = 0;
  RowOccupancy na = a.next_window(lo1, hi1);
  RowOccupancy nb = b.next_window(lo1, hi1);
  const std::int64_t n = a.n_;

  const auto wa = a.curr_.words();
  const auto wb = b.curr_.words();
  const std::int64_t base = a.curr_.base();
  for (std::size_t i = 0; i < wa.size(); ++i) {
    std::uint64_t u = wa[i] | wb[i];
    while (u) {
      const int bit = std::countr_zero(u);
      u &= u - 1;
      const std::int64_t k = 64 * static_cast<std::int64_t>(i) + bit;
      const std::int64_t m = base + 2 * k;
      const bool ina = (wa[i] >> bit) & 1;
      const bool inb = (wb[i] >> bit) & 1;
      const double une = field.uniform({{m, n}, BondKind::NE});
      if (ina && une < pa.p) na.set(m + 1);
      if (inb && une < pb.p) nb.set(m + 1);
      if (m - 1 >= lo1) {
        const double unw = field.uniform({{m, n}, BondKind::NW});
        if (ina && unw < pa.p) na.set(m - 1);
        if (inb && unw < pb.p) nb.set(m - 1);
      }
    }
  }
  if ((pa.eps > 0.0 || pb.eps > 0.0) && n >= 1) {
    const auto va = a.prev_.words();
    const auto vb = b.prev_.words();
    const std::int64_t pbase = a.prev_.base();
    for (std::size_t i = 0; i < va.size(); ++i) {
      std::uint64_t u = va[i] | vb[i];
      while (u) {
        const int bit = std::countr_zero(u);
        u &= u - 1;
        const std::int64_t m = pbase + 2 * (64 * static_cast<std::int64_t>(i) + bit);
        const double uv = field.uniform({{m, n - 1}, BondKind::Vert});
        if (((va[i] >> bit) & 1) && uv < pa.eps) na.set(m);
        if (((vb[i] >> bit) & 1) && uv < pb.eps) nb.set(m);
      }
    }
  }
  a.adopt(std::move(na), lo1, hi1);
  b.adopt(std::move(nb), lo1, hi1);
}

Trajectory simulate(const Params& params, FrontState state, std::int64_t T,
                    const RandomField& field, std::int64_t snapshot_every) {
  Trajectory traj;
  traj.snapshot_every = snapshot_every;
  traj.r.reserve(static_cast<std::size_t>(T) + 1);
  traj.r.push_back(state.curr().right_edge());
  if (snapshot_every > 0) traj.snapshots.push_back(state.curr());
  bool dead = false;
  for (std::int64_t n = 1; n <= T; ++n) {
    if (dead) {
      traj.r.push_back(std::nullopt);
      continue;
    }
    state.step(params, field);
    traj.r.push_back(state.curr().right_edge());
    if (snapshot_every > 0 && n % snapshot_every == 0) traj.snapshots.push_back(state.curr());
    if (state.dead()) {
      dead = true;
      // Both rows empty: nothing below can feed anything. The all-empty
      // suffix starts at the first of the trailing empty rows.
      std::int64_t e = n;
      while (e > 0 && !traj.r[static_cast<std::size_t>(e - 1)].has_value()) --e;
      traj.extinct_at = e;
    }
  }
  return traj;
}

BracketResult bracket_run(const Params& params, std::int64_t M, std::int64_t T,
                          const RandomField& field) {
  FrontState vac = FrontState::init_left_infinite(M, BoundaryMode::Vacuum);
  FrontState sat = FrontState::init_left_infinite(M, BoundaryMode::Saturated);
  BracketResult res;
  res.lo.r.reserve(static_cast<std::size_t>(T) + 1);
  res.hi.r.reserve(static_cast<std::size_t>(T) + 1);
  res.lo.r.push_back(vac.curr().right_edge());
  res.hi.r.push_back(sat.curr().right_edge());
  std::int64_t agree_rows = res.lo.r[0] == res.hi.r[0] ? 1 : 0;
  bool vac_dead = false;
  for (std::int64_t n = 1; n <= T; ++n) {
    if (vac_dead) {
      sat.step(params, field);
      res.lo.r.push_back(std::nullopt);
      res.hi.r.push_back(sat.curr().right_edge());
      continue;
    }
    step_pair(vac, sat, params, params, field);
    res.lo.r.push_back(vac.curr().right_edge());
    res.hi.r.push_back(sat.curr().right_edge());
    if (res.lo.r.back() == res.hi.r.back()) ++agree_rows;
    if (vac.dead()) {
      vac_dead = true;
      std::int64_t e = n;
      while (e > 0 && !res.lo.r[static_cast<std::size_t>(e - 1)].has_value()) --e;
      res.lo.extinct_at = e;
    }
  }
  res.agree = static_cast<double>(agree_rows) / static_cast<double>(T + 1);
  return res;
}

std::vector<Site> rightmost_path(const Params& params, const FrontState& init, std::int64_t T,
                                 const RandomField& field) {
  if (init.mode() == BoundaryMode::Saturated)
    raise(Errc::NoPath, "rightmost_path: saturated boundary sites are not path-traceable");
  std::vector<RowOccupancy> rows;
  rows.reserve(static_cast<std::size_t>(T) + 1);
  FrontState state = init;
  rows.push_back(state.curr());
  for (std::int64_t n = 1; n <= T; ++n) {
    state.step(params, field);
    rows.push_back(state.curr());
  }
  const auto top = rows[static_cast<std::size_t>(T)].right_edge();
  if (!top) raise(Errc::NoPath, "rightmost_path: no open path reaches row " + std::to_string(T));

  std::vector<Site> path;
  Site cur{*top, T};
  path.push_back(cur);
  while (cur.n > 0) {
    const std::int64_t m = cur.m, n = cur.n;
    // Predecessor columns in decreasing order: m+1 (NW feed), m (vertical),
    // m-1 (NE feed). Greedy max keeps the path lexicographically rightmost.
    if (n - 1 >= 0 && rows[static_cast<std::size_t>(n - 1)].test(m + 1) &&
        field.is_open({{m + 1, n - 1}, BondKind::NW}, params)) {
      cur = {m + 1, n - 1};
    } else if (n - 2 >= 0 && rows[static_cast<std::size_t>(n - 2)].test(m) &&
               field.is_open({{m, n - 2}, BondKind::Vert}, params)) {
      cur = {m, n - 2};
    } else if (n - 1 >= 0 && rows[static_cast<std::size_t>(n - 1)].test(m - 1) &&
               field.is_open({{m - 1, n - 1}, BondKind::NE}, params)) {
      cur = {m - 1, n - 1};
    } else {
      raise(Errc::NoPath, "rightmost_path: dead end during reconstruction");
    }
    path.push_back(cur);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

void dump_snapshots(std::ostream& os, const Trajectory& traj) {
  const std::int64_t k = traj.snapshot_every > 0 ? traj.snapshot_every : 1;
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    const auto& row = traj.snapshots[i];
    os << (static_cast<std::int64_t>(i) * k);
    const auto r = row.right_edge();
    if (r)
      os << ' ' << *r;
    else
      os << " X";
    row.for_each([&](std::int64_t c) { os << ' ' << c; });
    os << '\n';
  }
}

}  // namespace perc
