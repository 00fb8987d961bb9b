#include "perc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "json.hpp"

namespace perc {

namespace {

constexpr double kMassTol = 1e-9;
constexpr double kDecisionTol = 1e-10;
constexpr double kFlowEps = 1e-15;

SubsetDist wrap(detail::JointDistT<double> layer) {
  SubsetDist d;
  d.prev = layer.prev;
  d.curr = layer.curr;
  d.n = layer.n;
  d.joint = std::move(layer.w);
  d.err_bound =
      2.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(layer.factor_ops + 8);
  return d;
}

std::vector<std::int64_t> even_range(std::int64_t lo, std::int64_t hi) {
  std::vector<std::int64_t> cols;
  for (std::int64_t c = lo; c <= hi; c += 2) cols.push_back(c);
  return cols;
}

}  // namespace

double SubsetDist::total() const {
  double s = 0.0;
  for (double v : joint) s += v;
  return s;
}

std::vector<double> SubsetDist::curr_marginal() const {
  std::vector<double> marg(std::size_t(1) << curr.count, 0.0);
  const int P = prev.count;
  for (std::size_t idx = 0; idx < joint.size(); ++idx) marg[idx >> P] += joint[idx];
  return marg;
}

double WindowLaw::total() const {
  double s = mass_extinct;
  for (const auto& [k, v] : mass) s += v;
  return s;
}

SubsetDist exact_row_distribution(const Params& params, const std::vector<std::int64_t>& init,
                                  std::int64_t n, std::optional<std::int64_t> wall) {
  return wrap(detail::dp_row_distribution<double>(params.p, params.eps, init, n, wall));
}

SubsetDist brute_force_row_distribution(const Params& params,
                                        const std::vector<std::int64_t>& init, std::int64_t n,
                                        std::optional<std::int64_t> wall) {
  return wrap(detail::bf_row_distribution<double>(params.p, params.eps, init, n, wall));
}

double exact_theta(const Params& params, std::int64_t n) {
  return detail::dp_theta<double>(params.p, params.eps, n);
}

WindowLaw normalized_window_law(const SubsetDist& dist, int w) {
  if (w < 1 || w > 31) raise(Errc::TooLarge, "normalized_window_law: bad window width");
  WindowLaw law;
  law.w = w;
  const auto marg = dist.curr_marginal();
  for (std::size_t c = 0; c < marg.size(); ++c) {
    const double q = marg[c];
    if (q == 0.0) continue;
    if (c == 0) {
      law.mass_extinct += q;
      continue;
    }
    const int kmax = 63 - std::countl_zero(static_cast<std::uint64_t>(c));
    std::uint32_t mask = 0;
    for (int k = kmax; k >= 0 && kmax - k < w; --k)
      if ((c >> k) & 1) mask |= std::uint32_t(1) << (kmax - k);
    law.mass[mask] += q;
  }
  return law;
}

WindowLaw condition_non_extinct(const WindowLaw& law) {
  const double alive = law.total() - law.mass_extinct;
  if (alive <= kMassTol)
    raise(Errc::EmptySet, "condition_non_extinct: no surviving mass to condition on");
  WindowLaw out;
  out.w = law.w;
  out.mass_extinct = 0.0;
  for (const auto& [k, v] : law.mass) out.mass[k] = v / alive;
  return out;
}

WindowLaw shift_and_add_origin(const WindowLaw& law) {
  WindowLaw out;
  out.w = law.w;
  out.mass_extinct = 0.0;
  const std::uint32_t full = (std::uint32_t(1) << law.w) - 1;
  for (const auto& [k, v] : law.mass) out.mass[((k << 1) & full) | 1u] += v;
  if (law.mass_extinct > 0.0) out.mass[1u] += law.mass_extinct;
  return out;
}

namespace {

// Transportation feasibility on the inclusion order, solved by BFS
// augmentation; sizes are at most 2^(w-1) masks per side.
struct FlowNet {
  int nodes;
  std::vector<std::vector<double>> cap;
  std::vector<std::vector<int>> adj;

  explicit FlowNet(int n) : nodes(n), cap(n, std::vector<double>(n, 0.0)), adj(n) {}

  void add(int u, int v, double c) {
    if (cap[u][v] == 0.0 && cap[v][u] == 0.0 && u != v) {
      adj[u].push_back(v);
      adj[v].push_back(u);
    }
    cap[u][v] += c;
  }

  double augment(int s, int t) {
    std::vector<int> par(nodes, -1);
    par[s] = s;
    std::deque<int> q{s};
    while (!q.empty() && par[t] < 0) {
      const int u = q.front();
      q.pop_front();
      for (int v : adj[u])
        if (par[v] < 0 && cap[u][v] > kFlowEps) {
          par[v] = u;
          q.push_back(v);
        }
    }
    if (par[t] < 0) return 0.0;
    double bottleneck = std::numeric_limits<double>::infinity();
    for (int v = t; v != s; v = par[v]) bottleneck = std::min(bottleneck, cap[par[v]][v]);
    for (int v = t; v != s; v = par[v]) {
      cap[par[v]][v] -= bottleneck;
      cap[v][par[v]] += bottleneck;
    }
    return bottleneck;
  }

  std::vector<bool> reachable(int s) const {
    std::vector<bool> vis(nodes, false);
    vis[s] = true;
    std::deque<int> q{s};
    while (!q.empty()) {
      const int u = q.front();
      q.pop_front();
      for (int v : adj[u])
        if (!vis[v] && cap[u][v] > kFlowEps) {
          vis[v] = true;
          q.push_back(v);
        }
    }
    return vis;
  }
};

}  // namespace

DominationResult check_domination(const WindowLaw& mu, const WindowLaw& nu) {
  if (mu.w != nu.w) raise(Errc::WindowMismatch, "check_domination: window widths differ");
  if (mu.w > 6) raise(Errc::TooLarge, "check_domination: w > 6");
  if (std::fabs(mu.mass_extinct - nu.mass_extinct) > kMassTol)
    raise(Errc::InvalidCoupling,
          "check_domination: extinct masses differ; condition both laws first");
  if (std::fabs(mu.total() - nu.total()) > kMassTol)
    raise(Errc::InvalidCoupling, "check_domination: total masses differ");

  std::vector<std::uint32_t> mu_keys, nu_keys;
  for (const auto& [k, v] : mu.mass) mu_keys.push_back(k);
  for (const auto& [k, v] : nu.mass) nu_keys.push_back(k);
  const int A = static_cast<int>(mu_keys.size());
  const int B = static_cast<int>(nu_keys.size());
  const int src = 0, snk = A + B + 1;
  FlowNet net(A + B + 2);
  double mu_total = 0.0;
  for (int i = 0; i < A; ++i) {
    const double m = mu.mass.at(mu_keys[static_cast<std::size_t>(i)]);
    net.add(src, 1 + i, m);
    mu_total += m;
  }
  for (int j = 0; j < B; ++j) net.add(1 + A + j, snk, nu.mass.at(nu_keys[static_cast<std::size_t>(j)]));
  for (int i = 0; i < A; ++i)
    for (int j = 0; j < B; ++j)
      if ((mu_keys[static_cast<std::size_t>(i)] & ~nu_keys[static_cast<std::size_t>(j)]) == 0)
        net.add(1 + i, 1 + A + j, 2.0);

  double flow = 0.0;
  for (;;) {
    const double pushed = net.augment(src, snk);
    if (pushed <= kFlowEps) break;
    flow += pushed;
  }

  DominationResult res;
  res.deficit = mu_total - flow;
  res.dominated = res.deficit <= kDecisionTol;
  if (res.dominated) {
    for (int i = 0; i < A; ++i)
      for (int j = 0; j < B; ++j) {
        // Flow on i->j equals the residual reverse capacity.
        const double f = net.cap[1 + A + j][1 + i];
        if (f > kFlowEps)
          res.coupling.push_back({mu_keys[static_cast<std::size_t>(i)],
                                  nu_keys[static_cast<std::size_t>(j)], f});
      }
  } else {
    // Min cut: source-side mu masks; their up-closure violates domination.
    const auto vis = net.reachable(src);
    std::vector<std::uint32_t> base;
    for (int i = 0; i < A; ++i)
      if (vis[1 + i]) base.push_back(mu_keys[static_cast<std::size_t>(i)]);
    const std::uint32_t full = (std::uint32_t(1) << mu.w) - 1;
    for (std::uint32_t s = 1; s <= full; s += 2) {
      for (auto b : base)
        if ((b & ~s) == 0) {
          res.witness.push_back(s);
          break;
        }
    }
    double gap = 0.0;
    for (auto s : res.witness) {
      auto it = mu.mass.find(s);
      if (it != mu.mass.end()) gap += it->second;
      auto jt = nu.mass.find(s);
      if (jt != nu.mass.end()) gap -= jt->second;
    }
    res.witness_gap = gap;
  }
  return res;
}

LemmaReport verify_lemma_domination(const Params& params, std::int64_t n, int w, std::int64_t M) {
  const SubsetDist dist =
      exact_row_distribution(params, even_range(-2 * M, 0), n, std::optional<std::int64_t>(-2 * M));
  const WindowLaw raw = normalized_window_law(dist, w);
  const WindowLaw mu = condition_non_extinct(raw);
  const WindowLaw nu = shift_and_add_origin(mu);
  LemmaReport rep;
  rep.params = params;
  rep.n = n;
  rep.w = w;
  rep.M = M;
  rep.mass_extinct = raw.mass_extinct;
  rep.result = check_domination(mu, nu);
  rep.dominated = rep.result.dominated;
  return rep;
}

std::vector<std::int64_t> mask_columns(std::uint32_t mask, int w) {
  std::vector<std::int64_t> cols;
  for (int j = 0; j < w; ++j)
    if ((mask >> j) & 1) cols.push_back(-2 * j);
  return cols;
}

std::string lemma_report_json(const LemmaReport& report) {
  nlohmann::json j;
  j["params"] = {{"p", report.params.p}, {"eps", report.params.eps}};
  j["n"] = report.n;
  j["w"] = report.w;
  j["M"] = report.M;
  j["mass_extinct"] = report.mass_extinct;
  j["dominated"] = report.dominated;
  if (!report.dominated) {
    nlohmann::json wit = nlohmann::json::array();
    for (auto mask : report.result.witness) wit.push_back(mask_columns(mask, report.w));
    j["witness"] = wit;
    j["max_flow_deficit"] = report.result.deficit;
    j["witness_gap"] = report.result.witness_gap;
  }
  return j.dump();
}

double total_variation(const SubsetDist& a, const SubsetDist& b) {
  if (!(a.prev == b.prev) || !(a.curr == b.curr))
    raise(Errc::WindowMismatch, "total_variation: distributions on different windows");
  double tv = 0.0;
  for (std::size_t i = 0; i < a.joint.size(); ++i) tv += std::fabs(a.joint[i] - b.joint[i]);
  return 0.5 * tv;
}

}  // namespace perc
