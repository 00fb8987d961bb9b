#include <cmath>
#include <cstdint>
#include <mutex>
#include <vector>

#include "doctest.h"
#include "perc/coupling.hpp"
#include "perc/estimators.hpp"
#include "perc/parallel.hpp"

using namespace perc;

TEST_CASE("equal enhancement densities give identical coupled trajectories") {
  const RandomField field(31);
  const CoupledRun run = coupled_run({{0.6, 0.2}, {0.6, 0.2}}, 40, 120, field);
  CHECK(run.lo.r == run.hi.r);
  CHECK(run.containment_violations == 0);
}

TEST_CASE("coupled runs keep occupancy containment at every row") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const RandomField field(derive_seed(32, seed));
    const CoupledRun run = coupled_run({{0.55, 0.05}, {0.55, 0.4}}, 40, 150, field);
    CHECK(run.containment_violations == 0);
    for (std::size_t n = 0; n < run.lo.r.size(); ++n) {
      if (run.lo.r[n].has_value()) {
        REQUIRE(run.hi.r[n].has_value());
        CHECK(*run.lo.r[n] <= *run.hi.r[n]);
      }
    }
  }
}

TEST_CASE("config validation rejects mismatched pairs") {
  CHECK_THROWS_AS(validate({{0.5, 0.1}, {0.6, 0.2}}), Error);
  CHECK_THROWS_AS(validate({{0.5, 0.3}, {0.5, 0.2}}), Error);
}

TEST_CASE("enhancement produces a positive terminal right-edge gap") {
  // At near-critical p the
  // eps-enhanced copy outruns the plain one.
  const std::int64_t T = 2000, M = T + kBracketMargin, R = 200;
  std::vector<double> gap(static_cast<std::size_t>(R));
  parallel_for(R, 2, [&](std::int64_t i) {
    const RandomField field(derive_seed(33, static_cast<std::uint64_t>(i)));
    const CoupledRun run = coupled_run({{0.64, 0.0}, {0.64, 0.1}}, M, T, field);
    REQUIRE(run.containment_violations == 0);
    REQUIRE(run.lo.r.back().has_value());
    REQUIRE(run.hi.r.back().has_value());
    gap[static_cast<std::size_t>(i)] = static_cast<double>(*run.hi.r.back() - *run.lo.r.back());
  });
  double mean = 0.0;
  for (double g : gap) {
    CHECK(g >= 0.0);
    mean += g;
  }
  mean /= static_cast<double>(R);
  double var = 0.0;
  for (double g : gap) var += (g - mean) * (g - mean);
  const double stderr_ = std::sqrt(var / static_cast<double>(R - 1) / static_cast<double>(R));
  CHECK(mean - 2.5758 * stderr_ > 0.0);
}

TEST_CASE("tau scan on synthetic right-edge series") {
  const auto opt = [](std::int64_t v) { return std::optional<std::int64_t>(v); };
  // Right edge walks left at rows 5 and 6.
  const std::vector<std::optional<std::int64_t>> r{opt(0), opt(1), opt(2), opt(3), opt(4),
                                                   opt(3), opt(2), opt(3)};
  const double eps = 0.1, tilde = 0.3;
  std::vector<std::pair<std::int64_t, std::int64_t>> asked;
  const auto mid_uniform = [&](std::int64_t col, std::int64_t row) {
    asked.push_back({col, row});
    return 0.5 * (eps + tilde);
  };
  CHECK(detect_tau_scan(r, eps, tilde, mid_uniform) == 6);
  REQUIRE(asked.size() == 1);
  CHECK(asked[0].first == 4);   // r at row 4
  CHECK(asked[0].second == 4);  // designated vertical bond starts two rows below
  CHECK_FALSE(detect_tau_scan(r, eps, eps, mid_uniform).has_value());
  const auto low_uniform = [&](std::int64_t, std::int64_t) { return 0.05; };
  CHECK_FALSE(detect_tau_scan(r, eps, tilde, low_uniform).has_value());
  // Pattern interrupted by an extinct row never fires.
  const std::vector<std::optional<std::int64_t>> broken{opt(0), opt(1), std::nullopt, opt(0),
                                                        opt(-1), opt(-2)};
  const auto any_uniform = [&](std::int64_t, std::int64_t) { return 0.2; };
  CHECK(detect_tau_scan(broken, eps, tilde, any_uniform) == 5);
}

TEST_CASE("detect_tau replays against the stored trajectory") {
  const Params params{0.6, 0.05};
  const double tilde = 0.35;
  const std::int64_t M = 60, horizon = 300;
  int found = 0;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const RandomField field(derive_seed(34, seed));
    const auto tau = detect_tau(params, tilde, M, horizon, field);
    const Trajectory traj =
        simulate(params, FrontState::init_left_infinite(M, BoundaryMode::Saturated), horizon, field);
    const auto lookup = [&](std::int64_t col, std::int64_t row) {
      return field.uniform({{col, row}, BondKind::Vert});
    };
    const auto replay = detect_tau_scan(traj.r, params.eps, tilde, lookup);
    CHECK(tau == replay);
    if (tau.has_value()) {
      ++found;
      const std::int64_t n = *tau;
      REQUIRE(n >= 2);
      const auto r2 = traj.r[static_cast<std::size_t>(n - 2)];
      REQUIRE(r2.has_value());
      CHECK(*traj.r[static_cast<std::size_t>(n)] == *r2 - 2);
      CHECK(*traj.r[static_cast<std::size_t>(n - 1)] == *r2 - 1);
      const double u = field.uniform({{*r2, n - 2}, BondKind::Vert});
      CHECK(u >= params.eps);
      CHECK(u < tilde);
      // No earlier row satisfies both conditions.
      for (std::int64_t m = 2; m < n; ++m) {
        const auto& a = traj.r[static_cast<std::size_t>(m - 2)];
        const auto& b = traj.r[static_cast<std::size_t>(m - 1)];
        const auto& c = traj.r[static_cast<std::size_t>(m)];
        const bool pattern = a && b && c && *c == *b - 1 && *b == *a - 2;
        if (pattern) {
          const double v = field.uniform({{*a, m - 2}, BondKind::Vert});
          CHECK_FALSE((v >= params.eps && v < tilde));
        }
      }
    }
  }
  CHECK(found > 10);
}

TEST_CASE("tau chain is empty without an enhancement gap or left moves") {
  const RandomField field(35);
  const TauRecord same = tau_chain({{0.6, 0.2}, {0.6, 0.2}}, 40, 200, field);
  CHECK(same.taus.empty());
  CHECK(same.k_of_T == 0);
  const TauRecord certain = tau_chain({{1.0, 0.0}, {1.0, 0.2}}, 40, 200, field);
  CHECK(certain.taus.empty());
}

TEST_CASE("tau chain bookkeeping and spacing") {
  int with_taus = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const RandomField field(derive_seed(36, seed));
    GainReport report;
    const TauRecord rec = tau_chain({{0.62, 0.0}, {0.62, 0.25}}, 150, 600, field, &report);
    CHECK(rec.k_of_T == static_cast<std::int64_t>(rec.taus.size()));
    if (!rec.taus.empty()) {
      ++with_taus;
      CHECK(rec.taus.front() >= 2);
      for (std::size_t k = 1; k < rec.taus.size(); ++k)
        CHECK(rec.taus[k] >= rec.taus[k - 1] + 2);
      REQUIRE(rec.gaps.size() + 1 == rec.taus.size());
      for (std::size_t k = 0; k < rec.gaps.size(); ++k)
        CHECK(rec.gaps[k] == rec.taus[k + 1] - rec.taus[k]);
    }
    REQUIRE(report.rows.size() == 601);
    std::int64_t marked = 0;
    for (const auto& row : report.rows) {
      if (row.is_tau) ++marked;
      if (row.r_lo && row.r_hi) CHECK(*row.r_lo <= *row.r_hi);
    }
    CHECK(marked == rec.k_of_T);
  }
  CHECK(with_taus >= 15);
}

TEST_CASE("tau rate concentrates across seeds") {
  const std::int64_t T = 5000, M = T + kBracketMargin, R = 50;
  std::vector<double> rate(static_cast<std::size_t>(R));
  parallel_for(R, 2, [&](std::int64_t i) {
    const RandomField field(derive_seed(37, static_cast<std::uint64_t>(i)));
    const TauRecord rec = tau_chain({{0.64, 0.0}, {0.64, 0.2}}, M, T, field);
    rate[static_cast<std::size_t>(i)] =
        static_cast<double>(rec.k_of_T) / static_cast<double>(T);
  });
  double mean = 0.0;
  for (double x : rate) mean += x;
  mean /= static_cast<double>(R);
  CHECK(mean > 0.0);
  double var = 0.0;
  for (double x : rate) var += (x - mean) * (x - mean);
  const double spread = std::sqrt(var / static_cast<double>(R - 1)) / mean;
  CHECK(spread < 0.2);
}

TEST_CASE("tau gaps are identically distributed along the chain") {
  // Restarts reset both processes to the same state, so successive gaps
  // replicate the tau_1 law; compare early against late gaps.
  std::vector<double> first, later;
  parallel_for(120, 2, [&](std::int64_t i) {
    const RandomField field(derive_seed(41, static_cast<std::uint64_t>(i)));
    const TauRecord rec = tau_chain({{0.62, 0.0}, {0.62, 0.25}}, 1000, 1000, field);
    static std::mutex mu;
    std::scoped_lock lock(mu);
    for (std::size_t k = 0; k < rec.gaps.size(); ++k)
      (k == 0 ? first : later).push_back(static_cast<double>(rec.gaps[k]));
  });
  REQUIRE(first.size() > 80);
  REQUIRE(later.size() > 200);
  const auto mean_se = [](const std::vector<double>& xs) {
    double m = 0;
    for (double x : xs) m += x;
    m /= static_cast<double>(xs.size());
    double v = 0;
    for (double x : xs) v += (x - m) * (x - m);
    return std::pair<double, double>(m, std::sqrt(v / static_cast<double>(xs.size() - 1) /
                                                  static_cast<double>(xs.size())));
  };
  const auto [m1, s1] = mean_se(first);
  const auto [m2, s2] = mean_se(later);
  CHECK(std::fabs(m1 - m2) <= 3.0 * std::sqrt(s1 * s1 + s2 * s2));
}

TEST_CASE("aligned coupling accepts monotone atoms and rejects others") {
  // Identity coupling: both processes coincide row by row.
  {
    const std::vector<CouplingAtom> identity{{0b101, 0b101, 1.0}};
    const AlignedReport rep = aligned_coupling(identity, 3, {0.6, 0.1}, 40, 500, 38, 2);
    CHECK(rep.violations == 0);
    const RandomField field(derive_seed(38, 0));
    // Same initial set, same field: trajectories are equal outright.
    const Trajectory a = simulate({0.6, 0.1}, FrontState::init_finite({-4, 0}), 40,
                                  RandomField(derive_seed(derive_seed(38, 0), 1)));
    const Trajectory b = simulate({0.6, 0.1}, FrontState::init_finite({-4, 0}), 40,
                                  RandomField(derive_seed(derive_seed(38, 0), 1)));
    CHECK(a.r == b.r);
  }
  // Added-site atoms: the larger set keeps its edge ahead, pathwise.
  {
    const std::vector<CouplingAtom> added{{0b1, 0b11, 0.5}, {0b101, 0b111, 0.5}};
    const AlignedReport rep = aligned_coupling(added, 3, {0.55, 0.2}, 50, 2000, 39, 2);
    CHECK(rep.violations == 0);
    CHECK(rep.replicas == 2000);
  }
  CHECK_THROWS_AS(aligned_coupling({{0b11, 0b01, 1.0}}, 3, {0.5, 0.0}, 10, 10, 40, 1), Error);
  CHECK_THROWS_AS(aligned_coupling({{0b10, 0b11, 1.0}}, 3, {0.5, 0.0}, 10, 10, 40, 1), Error);
  CHECK_THROWS_AS(aligned_coupling({{0b1, 0b11, 0.5}}, 3, {0.5, 0.0}, 10, 10, 40, 1), Error);
}
