#include <boost/multiprecision/cpp_int.hpp>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "perc/oracle.hpp"

using namespace perc;
using Rational = boost::multiprecision::cpp_rational;

namespace {

const std::vector<double> kGrid{0.0, 0.25, 0.5, 0.75, 1.0};

// Independent strict-survival oracle: sums over every configuration of the
// bonds below row n, touching nothing from the production DP.
double theta_by_enumeration(double p, double eps, int n) {
  struct BondRec {
    int row, col, kind;  // kind: 0 NE, 1 NW, 2 vertical
  };
  std::vector<BondRec> bonds;
  for (int k = 0; k < n; ++k)
    for (int c = -k; c <= k; c += 2) {
      bonds.push_back({k, c, 0});
      bonds.push_back({k, c, 1});
    }
  for (int k = 0; k + 2 <= n; ++k)
    for (int c = -k; c <= k; c += 2) bonds.push_back({k, c, 2});
  // Feeds cascade only if bonds fire in tail-row order.
  std::stable_sort(bonds.begin(), bonds.end(),
                   [](const BondRec& a, const BondRec& b) { return a.row < b.row; });
  REQUIRE(bonds.size() <= 22);

  double theta = 0.0;
  std::vector<std::uint32_t> occ(static_cast<std::size_t>(n) + 1);
  for (std::uint32_t mask = 0; mask < (1u << bonds.size()); ++mask) {
    double prob = 1.0;
    for (std::size_t b = 0; b < bonds.size(); ++b) {
      const double lambda = bonds[b].kind == 2 ? eps : p;
      prob *= (mask >> b) & 1 ? lambda : 1.0 - lambda;
    }
    if (prob == 0.0) continue;
    std::fill(occ.begin(), occ.end(), 0u);
    occ[0] = 1u;  // column 0 at index 0; row k index (c + k) / 2
    for (std::size_t b = 0; b < bonds.size(); ++b) {
      if (!((mask >> b) & 1)) continue;
      const auto& br = bonds[b];
      const int tidx = (br.col + br.row) / 2;
      if (!((occ[static_cast<std::size_t>(br.row)] >> tidx) & 1)) continue;
      if (br.kind == 2) {
        occ[static_cast<std::size_t>(br.row + 2)] |= 1u << ((br.col + br.row + 2) / 2);
      } else {
        const int hcol = br.col + (br.kind == 0 ? 1 : -1);
        occ[static_cast<std::size_t>(br.row + 1)] |= 1u << ((hcol + br.row + 1) / 2);
      }
    }
    bool alive = true;
    for (int k = 1; k <= n; ++k) alive = alive && occ[static_cast<std::size_t>(k)] != 0;
    if (alive) theta += prob;
  }
  return theta;
}

SubsetDist point_mass_dist(std::int64_t lo, int count, std::uint64_t mask) {
  SubsetDist d;
  d.prev = detail::RowSpec{0, 0};
  d.curr = detail::RowSpec{lo, count};
  d.n = 0;
  d.joint.assign(std::size_t(1) << count, 0.0);
  d.joint[mask] = 1.0;
  return d;
}

WindowLaw point_law(int w, std::uint32_t mask) {
  WindowLaw law;
  law.w = w;
  law.mass[mask] = 1.0;
  return law;
}

void check_coupling_marginals(const DominationResult& res, const WindowLaw& mu,
                              const WindowLaw& nu) {
  std::map<std::uint32_t, double> lo_m, hi_m;
  for (const auto& atom : res.coupling) {
    REQUIRE((atom.lo_mask & ~atom.hi_mask) == 0);
    lo_m[atom.lo_mask] += atom.prob;
    hi_m[atom.hi_mask] += atom.prob;
  }
  for (const auto& [k, v] : mu.mass) CHECK(std::fabs(lo_m[k] - v) < 1e-10);
  for (const auto& [k, v] : nu.mass) CHECK(std::fabs(hi_m[k] - v) < 1e-10);
}

}  // namespace

TEST_CASE("one-step law from the origin has the binomial closed form") {
  for (double p : {0.3, 0.5, 0.9}) {
    const SubsetDist d = exact_row_distribution({p, 0.4}, {0}, 1);
    REQUIRE(d.curr.count == 2);  // columns -1, 1
    REQUIRE(d.prev.count == 1);
    const auto marg = d.curr_marginal();
    CHECK(marg[0] == doctest::Approx((1 - p) * (1 - p)).epsilon(1e-12));
    CHECK(marg[1] == doctest::Approx(p * (1 - p)).epsilon(1e-12));
    CHECK(marg[2] == doctest::Approx(p * (1 - p)).epsilon(1e-12));
    CHECK(marg[3] == doctest::Approx(p * p).epsilon(1e-12));
  }
}

TEST_CASE("certain bonds fill the reachable cone") {
  const SubsetDist d = exact_row_distribution({1.0, 0.0}, {0}, 3);
  const auto marg = d.curr_marginal();
  const std::size_t full = marg.size() - 1;
  for (std::size_t c = 0; c < marg.size(); ++c)
    CHECK(marg[c] == doctest::Approx(c == full ? 1.0 : 0.0));
}

TEST_CASE("transfer operator equals brute force on the full parameter grid") {
  for (double p : kGrid)
    for (double eps : kGrid) {
      const Params params{p, eps};
      // Cone from {0} and from {-2, 0}, and a walled truncation.
      for (std::int64_t n : {0L, 1L, 2L}) {
        const auto a = exact_row_distribution(params, {0}, n);
        const auto b = brute_force_row_distribution(params, {0}, n);
        CHECK(total_variation(a, b) <= 1e-12);
        CHECK(std::fabs(a.total() - 1.0) <= 1e-12);
      }
      const auto a2 = exact_row_distribution(params, {-2, 0}, 2);
      const auto b2 = brute_force_row_distribution(params, {-2, 0}, 2);
      CHECK(total_variation(a2, b2) <= 1e-12);
      const auto a3 = exact_row_distribution(params, {-4, -2, 0}, 2, -4);
      const auto b3 = brute_force_row_distribution(params, {-4, -2, 0}, 2, -4);
      CHECK(total_variation(a3, b3) <= 1e-12);
    }
}

TEST_CASE("the two methods agree exactly in rational arithmetic") {
  const std::vector<Rational> grid{Rational(0), Rational(1, 4), Rational(1, 2), Rational(3, 4),
                                   Rational(1)};
  for (const auto& p : grid)
    for (const auto& eps : {Rational(0), Rational(1, 4)}) {
      const auto a = detail::dp_row_distribution<Rational>(p, eps, {0}, 2, std::nullopt);
      const auto b = detail::bf_row_distribution<Rational>(p, eps, {0}, 2, std::nullopt);
      REQUIRE(a.w.size() == b.w.size());
      for (std::size_t i = 0; i < a.w.size(); ++i) REQUIRE(a.w[i] == b.w[i]);
      Rational total(0);
      for (const auto& v : a.w) total += v;
      REQUIRE(total == Rational(1));

      const auto c = detail::dp_row_distribution<Rational>(p, eps, {-4, -2, 0}, 2,
                                                           std::optional<std::int64_t>(-4));
      const auto d = detail::bf_row_distribution<Rational>(p, eps, {-4, -2, 0}, 2,
                                                           std::optional<std::int64_t>(-4));
      for (std::size_t i = 0; i < c.w.size(); ++i) REQUIRE(c.w[i] == d.w[i]);
    }
}

TEST_CASE("exact_theta endpoints and the 39/64 value") {
  CHECK(exact_theta({1.0, 0.0}, 6) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(exact_theta({0.0, 1.0}, 2) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(exact_theta({0.5, 0.0}, 2) == doctest::Approx(39.0 / 64.0).epsilon(1e-13));
  // Closed form at eps = 0: both rows reachable iff row 2 is.
  for (double p : {0.25, 0.5, 0.8}) {
    const double branch = p * (1.0 - (1.0 - p) * (1.0 - p));
    CHECK(exact_theta({p, 0.0}, 2) ==
          doctest::Approx(1.0 - (1.0 - branch) * (1.0 - branch)).epsilon(1e-12));
  }
}

TEST_CASE("exact_theta matches full bond enumeration") {
  for (double p : {0.3, 0.6})
    for (double eps : {0.0, 0.35}) {
      for (int n : {1, 2, 3}) {
        CHECK(exact_theta({p, eps}, n) ==
              doctest::Approx(theta_by_enumeration(p, eps, n)).epsilon(1e-12));
      }
    }
}

TEST_CASE("theta is non-increasing in depth and monotone in parameters") {
  double prev = 1.0;
  for (int n = 1; n <= 6; ++n) {
    const double th = exact_theta({0.6, 0.2}, n);
    CHECK(th <= prev + 1e-14);
    prev = th;
  }
  CHECK(exact_theta({0.5, 0.2}, 4) <= exact_theta({0.6, 0.2}, 4) + 1e-14);
  CHECK(exact_theta({0.5, 0.1}, 4) <= exact_theta({0.5, 0.3}, 4) + 1e-14);
}

TEST_CASE("normalized window law on point masses") {
  {
    SubsetDist d = point_mass_dist(-2, 2, 0b11);  // {-2, 0}
    const WindowLaw law = normalized_window_law(d, 3);
    CHECK(law.mass_extinct == 0.0);
    REQUIRE(law.mass.size() == 1);
    CHECK(law.mass.at(0b11) == doctest::Approx(1.0));
  }
  {
    SubsetDist d = point_mass_dist(4, 1, 0b1);  // {4}
    const WindowLaw law = normalized_window_law(d, 3);
    REQUIRE(law.mass.size() == 1);
    CHECK(law.mass.at(0b1) == doctest::Approx(1.0));
  }
}

TEST_CASE("window law of a walled run is a probability law anchored at zero") {
  const SubsetDist d = exact_row_distribution({0.6, 0.0}, {-16, -14, -12, -10, -8, -6, -4, -2, 0},
                                              3, -16);
  const WindowLaw law = normalized_window_law(d, 4);
  CHECK(std::fabs(law.total() - 1.0) <= 1e-12);
  for (const auto& [mask, mass] : law.mass) {
    CHECK((mask & 1u) == 1u);
    CHECK(mass >= 0.0);
  }
}

TEST_CASE("shift_and_add_origin") {
  WindowLaw law;
  law.w = 3;
  law.mass[0b1] = 0.4;    // {0}
  law.mass[0b11] = 0.35;  // {-2, 0}
  law.mass_extinct = 0.25;
  const WindowLaw out = shift_and_add_origin(law);
  CHECK(out.mass_extinct == 0.0);
  CHECK(out.mass.at(0b11) == doctest::Approx(0.4));    // {0} -> {-2, 0}
  CHECK(out.mass.at(0b111) == doctest::Approx(0.35));  // {-2,0} -> {-4,-2,0}
  CHECK(out.mass.at(0b1) == doctest::Approx(0.25));    // extinct -> {0}
  CHECK(std::fabs(out.total() - law.total()) <= 1e-12);
}

TEST_CASE("domination: reflexivity and the top element") {
  WindowLaw mu;
  mu.w = 3;
  mu.mass[0b1] = 0.5;
  mu.mass[0b101] = 0.3;
  mu.mass[0b111] = 0.2;
  const DominationResult self = check_domination(mu, mu);
  CHECK(self.dominated);
  check_coupling_marginals(self, mu, mu);

  const WindowLaw top = point_law(3, 0b111);
  const DominationResult totop = check_domination(mu, top);
  CHECK(totop.dominated);
  check_coupling_marginals(totop, mu, top);
}

TEST_CASE("domination failure emits an upward-closed witness") {
  const WindowLaw mu = point_law(2, 0b11);  // {-2, 0}
  const WindowLaw nu = point_law(2, 0b01);  // {0}
  const DominationResult res = check_domination(mu, nu);
  CHECK_FALSE(res.dominated);
  CHECK(res.deficit > 1e-10);
  REQUIRE_FALSE(res.witness.empty());
  // U = sets containing -2; upward closed; mu(U) - nu(U) = 1.
  for (auto s : res.witness) CHECK((s & 0b10) != 0);
  CHECK(res.witness_gap == doctest::Approx(1.0));
  for (auto s : res.witness)
    for (std::uint32_t t = s; t < 4; t = (t + 1) | s)
      if ((t & 1u) && (s & ~t) == 0)
        CHECK(std::find(res.witness.begin(), res.witness.end(), t) != res.witness.end());
}

TEST_CASE("domination is transitive along shift chains and preserved by the transform") {
  const SubsetDist d = exact_row_distribution({0.5, 0.2}, {-8, -6, -4, -2, 0}, 3, -8);
  const WindowLaw mu = condition_non_extinct(normalized_window_law(d, 4));
  const WindowLaw nu = shift_and_add_origin(mu);
  const WindowLaw ka = shift_and_add_origin(nu);

  const auto ab = check_domination(mu, nu);
  const auto bc = check_domination(nu, ka);
  const auto ac = check_domination(mu, ka);
  CHECK(ab.dominated);
  CHECK(bc.dominated);
  CHECK(ac.dominated);  // transitivity witnessed on the triple
  if (ab.dominated) check_coupling_marginals(ab, mu, nu);

  // Reverse direction must fail for a non-degenerate law.
  const auto rev = check_domination(nu, mu);
  CHECK_FALSE(rev.dominated);
  CHECK(rev.witness_gap > 1e-10);
}

TEST_CASE("window and extinct-mass mismatches are rejected") {
  const WindowLaw a = point_law(3, 0b1);
  const WindowLaw b = point_law(4, 0b1);
  CHECK_THROWS_AS(check_domination(a, b), Error);
  WindowLaw c = point_law(3, 0b1);
  c.mass[0b1] = 0.5;
  c.mass_extinct = 0.5;
  CHECK_THROWS_AS(check_domination(a, c), Error);
  WindowLaw wide;
  wide.w = 7;
  wide.mass[1] = 1.0;
  CHECK_THROWS_AS(check_domination(wide, wide), Error);
}

TEST_CASE("lemma domination holds at p = 1 and on a sample cell") {
  const LemmaReport certain = verify_lemma_domination({1.0, 0.0}, 2, 3, 4);
  CHECK(certain.dominated);

  const LemmaReport cell = verify_lemma_domination({0.5, 0.2}, 2, 4, 6);
  CHECK(cell.dominated);
  check_coupling_marginals(cell.result,
                           condition_non_extinct(normalized_window_law(
                               exact_row_distribution({0.5, 0.2},
                                                      {-12, -10, -8, -6, -4, -2, 0}, 2, -12),
                               4)),
                           shift_and_add_origin(condition_non_extinct(normalized_window_law(
                               exact_row_distribution({0.5, 0.2},
                                                      {-12, -10, -8, -6, -4, -2, 0}, 2, -12),
                               4))));
  const std::string js = lemma_report_json(cell);
  CHECK(js.find("\"dominated\":true") != std::string::npos);
}

TEST_CASE("constructed counterexample is reported with a witness") {
  // Move mass off the top by hand: nu keeps less weight up high than mu.
  WindowLaw mu;
  mu.w = 3;
  mu.mass[0b111] = 0.6;
  mu.mass[0b1] = 0.4;
  WindowLaw nu;
  nu.w = 3;
  nu.mass[0b111] = 0.4;
  nu.mass[0b1] = 0.6;
  const DominationResult res = check_domination(mu, nu);
  CHECK_FALSE(res.dominated);
  REQUIRE_FALSE(res.witness.empty());
  double mu_u = 0.0, nu_u = 0.0;
  for (auto s : res.witness) {
    if (mu.mass.count(s)) mu_u += mu.mass.at(s);
    if (nu.mass.count(s)) nu_u += nu.mass.at(s);
  }
  CHECK(mu_u - nu_u > 1e-10);
}

TEST_CASE("size guards raise TooLarge") {
  CHECK_THROWS_AS(exact_row_distribution({0.5, 0.0}, {0}, 40), Error);
  std::vector<std::int64_t> wide;
  for (std::int64_t c = -60; c <= 0; c += 2) wide.push_back(c);
  CHECK_THROWS_AS(exact_row_distribution({0.5, 0.0}, wide, 2, -60), Error);
  CHECK_THROWS_AS(brute_force_row_distribution({0.5, 0.0}, {-4, -2, 0}, 4, -4), Error);
}
