// perclab: oriented bond percolation with enhancement edges — simulation,
// estimation and verification experiments as reproducible subcommands.
//
// Every run is a pure function of its flags (including --seed); replica
// parallelism (--threads) never changes the output bytes.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "perc/coupling.hpp"
#include "perc/estimators.hpp"
#include "perc/front.hpp"
#include "perc/oracle.hpp"
#include "perc/renorm.hpp"

using namespace perc;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string opt_str(const std::optional<std::int64_t>& v) {
  return v ? std::to_string(*v) : std::string("X");
}

struct Output {
  std::ostringstream body;
  std::string out_path;

  void flush() {
    if (out_path.empty()) {
      std::cout << body.str();
    } else {
      std::ofstream f(out_path, std::ios::binary);
      f << body.str();
    }
  }
};

void emit_header(Output& out, const std::string& cmd, const json& cfg) {
  json h = cfg;
  h["cmd"] = cmd;
  h["version"] = kVersion;
  out.body << "# " << h.dump() << "\n";
}

// Shared flag bundle; each subcommand registers the subset it uses.
struct Flags {
  double p = 0.5;
  double eps = 0.0;
  double eps2 = 0.0;
  std::int64_t T = 1000;
  std::int64_t replicas = 100;
  std::uint64_t seed = 1;
  std::int64_t M = 0;  // 0: derived as T + margin
  int w = 4;
  std::int64_t n = 3;
  std::string mode = "vacuum";
  std::string semantics = "strict";
  std::int64_t L = 100;
  double alpha = 0.5;
  std::string grid;
  double tol = 0.005;
  double level = 0.5;
  std::string out;
  std::string format = "csv";
  int threads = 1;
  std::string method = "speed";
  std::int64_t snapshot_every = 0;
};

Semantics parse_semantics(const std::string& s) {
  return s == "lenient" ? Semantics::Lenient : Semantics::Strict;
}

std::pair<int, int> parse_grid(const std::string& s, int defw, int defh) {
  if (s.empty()) return {defw, defh};
  const auto x = s.find('x');
  if (x == std::string::npos)
    raise(Errc::Degenerate, "grid must be WxH");
  return {std::stoi(s.substr(0, x)), std::stoi(s.substr(x + 1))};
}

std::int64_t bracket_M(const Flags& f) { return f.M > 0 ? f.M : f.T + kBracketMargin; }

// The echoed configuration excludes --threads: worker count never affects
// the output bytes, and echoing it would break that contract.
json base_cfg(const Flags& f) {
  return json{{"seed", f.seed}, {"format", f.format}};
}

void estimate_row(Output& out, const std::string& method, double eps, double p, std::int64_t T,
                  std::int64_t R, double est, double se, double lo, double hi,
                  std::uint64_t seed) {
  out.body << method << ',' << g17(eps) << ',' << g17(p) << ',' << T << ',' << R << ','
           << g17(est) << ',' << g17(se) << ',' << g17(lo) << ',' << g17(hi) << ',' << seed
           << '\n';
}

constexpr const char* kEstimateHeader = "method,eps,p,T,R,estimate,stderr,lo,hi,seed";

int cmd_simulate(const Flags& f) {
  Output out;
  out.out_path = f.out;
  json cfg = base_cfg(f);
  cfg["p"] = f.p;
  cfg["eps"] = f.eps;
  cfg["T"] = f.T;
  cfg["M"] = f.M;
  cfg["mode"] = f.mode;
  cfg["snapshot_every"] = f.snapshot_every;
  emit_header(out, "simulate", cfg);
  const FrontState init =
      f.M > 0 ? FrontState::init_left_infinite(
                    f.M, f.mode == "saturated" ? BoundaryMode::Saturated : BoundaryMode::Vacuum)
              : FrontState::init_finite({0});
  const Trajectory traj =
      simulate({f.p, f.eps}, init, f.T, RandomField(f.seed), f.snapshot_every);
  if (f.snapshot_every > 0) {
    dump_snapshots(out.body, traj);
  } else if (f.format == "json") {
    json rows = json::array();
    for (const auto& r : traj.r) rows.push_back(r ? json(*r) : json("X"));
    json j{{"r", rows}};
    if (traj.extinct_at) j["extinct_at"] = *traj.extinct_at;
    out.body << j.dump() << '\n';
  } else {
    out.body << "n,r\n";
    for (std::size_t n = 0; n < traj.r.size(); ++n)
      out.body << n << ',' << opt_str(traj.r[n]) << '\n';
  }
  out.flush();
  return 0;
}

int cmd_speed(const Flags& f) {
  Output out;
  out.out_path = f.out;
  json cfg = base_cfg(f);
  cfg["p"] = f.p;
  cfg["eps"] = f.eps;
  cfg["T"] = f.T;
  cfg["replicas"] = f.replicas;
  cfg["M"] = bracket_M(f);
  emit_header(out, "speed", cfg);
  const SpeedEstimate est = estimate_speed({f.p, f.eps}, f.T, f.replicas, f.seed, f.threads);
  const double lo = est.alpha_hat - kBisectZ * est.stderr_;
  const double hi = est.alpha_hat + kBisectZ * est.stderr_;
  if (f.format == "json") {
    out.body << json{{"alpha_hat", est.alpha_hat}, {"stderr", est.stderr_},
                     {"T", est.T},                 {"R", est.R},
                     {"unresolved", est.unresolved}, {"agree", est.agree},
                     {"ci99", {lo, hi}}}
                    .dump()
             << '\n';
  } else {
    out.body << kEstimateHeader << '\n';
    estimate_row(out, "speed", f.eps, f.p, f.T, est.R, est.alpha_hat, est.stderr_, lo, hi, f.seed);
  }
  out.flush();
  return 0;
}

int cmd_survival(const Flags& f) {
  Output out;
  out.out_path = f.out;
  json cfg = base_cfg(f);
  cfg["p"] = f.p;
  cfg["eps"] = f.eps;
  cfg["T"] = f.T;
  cfg["replicas"] = f.replicas;
  cfg["semantics"] = f.semantics;
  emit_header(out, "survival", cfg);
  const SurvivalEstimate est =
      estimate_survival({f.p, f.eps}, f.T, f.replicas, f.seed, parse_semantics(f.semantics),
                        f.threads);
  const double lo = est.theta_hat - kBisectZ * est.stderr_;
  const double hi = est.theta_hat + kBisectZ * est.stderr_;
  if (f.format == "json") {
    out.body << json{{"theta_hat", est.theta_hat},
                     {"stderr", est.stderr_},
                     {"T", est.T},
                     {"R", est.R},
                     {"semantics", f.semantics},
                     {"ci99", {lo, hi}}}
                    .dump()
             << '\n';
  } else {
    out.body << kEstimateHeader << '\n';
    estimate_row(out, "survival", f.eps, f.p, f.T, est.R, est.theta_hat, est.stderr_, lo, hi,
                 f.seed);
  }
  out.flush();
  return 0;
}

void pc_rows(Output& out, const PcEstimate& pc, const std::string& tag, const Flags& f) {
  for (const auto& it : pc.iters)
    estimate_row(out, tag + "-iter", f.eps, it.p_mid, f.T, it.R, it.estimate, it.stderr_, 0.0,
                 0.0, f.seed);
  estimate_row(out, tag + (pc.trustworthy ? "" : "-untrusted"), f.eps, pc.p_hat, f.T, f.replicas,
               pc.p_hat, 0.0, pc.lo, pc.hi, f.seed);
}

json pc_json(const PcEstimate& pc) {
  json iters = json::array();
  for (const auto& it : pc.iters)
    iters.push_back(json{{"iter", it.iter},
                         {"p", it.p_mid},
                         {"estimate", it.estimate},
                         {"stderr", it.stderr_},
                         {"R", it.R},
                         {"decision", std::string(1, it.decision)}});
  return json{{"p_hat", pc.p_hat},
              {"lo", pc.lo},
              {"hi", pc.hi},
              {"trustworthy", pc.trustworthy},
              {"iters", iters}};
}

int cmd_pc(const Flags& f) {
  Output out;
  out.out_path = f.out;
  json cfg = base_cfg(f);
  cfg["eps"] = f.eps;
  cfg["T"] = f.T;
  cfg["replicas"] = f.replicas;
  cfg["tol"] = f.tol;
  cfg["level"] = f.level;
  cfg["method"] = f.method;
  cfg["semantics"] = f.semantics;
  emit_header(out, "pc", cfg);
  json jout;
  if (f.format != "json") out.body << kEstimateHeader << '\n';
  if (f.method == "speed" || f.method == "both") {
    const PcEstimate pc = find_pc_speed(f.eps, f.tol, f.T, f.replicas, f.seed, f.threads);
    if (f.format == "json")
      jout["speed"] = pc_json(pc);
    else
      pc_rows(out, pc, "pc-speed", f);
  }
  if (f.method == "survival" || f.method == "both") {
    const PcEstimate pc = find_pc_survival(f.eps, f.T, f.level, f.tol, f.replicas, f.seed,
                                           parse_semantics(f.semantics), f.threads);
    if (f.format == "json")
      jout["survival"] = pc_json(pc);
    else
      pc_rows(out, pc, "pc-survival", f);
  }
  if (f.format == "json") out.body << jout.dump() << '\n';
  out.flush();
  return 0;
}

int cmd_couple(const Flags& f) {
  Output out;
  out.out_path = f.out;
  json cfg = base_cfg(f);
  cfg["p"] = f.p;
  cfg["eps"] = f.eps;
  cfg["eps2"] = f.eps2;
  cfg["T"] = f.T;
  cfg["M"] = bracket_M(f);
  emit_header(out, "couple", cfg);
  const RandomField field(f.seed);
  const CoupledRun run = coupled_run({{f.p, f.eps}, {f.p, f.eps2}}, bracket_M(f), f.T, field);
  out.body << "row,r_lo,r_hi,gap,is_tau\n";
  const auto lookup = [&](std::int64_t col, std::int64_t row) {
    return field.uniform({{col, row}, BondKind::Vert});
  };
  std::vector<bool> tau_mark(run.lo.r.size(), false);
  std::int64_t from = 2;
  for (;;) {
    const auto t = detect_tau_scan(run.lo.r, f.eps, f.eps2, lookup, from);
    if (!t) break;
    tau_mark[static_cast<std::size_t>(*t)] = true;
    from = *t + 1;
  }
  for (std::size_t n = 0; n < run.lo.r.size(); ++n) {
    out.body << n << ',' << opt_str(run.lo.r[n]) << ',' << opt_str(run.hi.r[n]) << ',';
    if (run.lo.r[n] && run.hi.r[n])
      out.body << (*run.hi.r[n] - *run.lo.r[n]);
    else
      out.body << 'X';
    out.body << ',' << (tau_mark[n] ? 1 : 0) << '\n';
  }
  out.flush();
  return run.containment_violations == 0 ? 0 : 3;
}

int cmd_tau(const Flags& f) {
  Output out;
  out.out_path = f.out;
  json cfg = base_cfg(f);
  cfg["p"] = f.p;
  cfg["eps"] = f.eps;
  cfg["eps2"] = f.eps2;
  cfg["T"] = f.T;
  cfg["M"] = bracket_M(f);
  emit_header(out, "tau", cfg);
  GainReport report;
  const TauRecord rec =
      tau_chain({{f.p, f.eps}, {f.p, f.eps2}}, bracket_M(f), f.T, RandomField(f.seed), &report);
  json summary{{"taus", rec.taus},
               {"k", rec.k_of_T},
               {"rate", static_cast<double>(rec.k_of_T) / static_cast<double>(f.T)}};
  if (f.format == "json") {
    out.body << summary.dump() << '\n';
  } else {
    out.body << "row,r_lo,r_hi,gap,is_tau\n";
    for (const auto& row : report.rows) {
      out.body << row.row << ',' << opt_str(row.r_lo) << ',' << opt_str(row.r_hi) << ',';
      if (row.r_lo && row.r_hi)
        out.body << (*row.r_hi - *row.r_lo);
      else
        out.body << 'X';
      out.body << ',' << (row.is_tau ? 1 : 0) << '\n';
    }
    out.body << "# " << summary.dump() << '\n';
  }
  out.flush();
  return 0;
}

int cmd_verify_domination(const Flags& f) {
  Output out;
  out.out_path = f.out;
  json cfg = base_cfg(f);
  cfg["p"] = f.p;
  cfg["eps"] = f.eps;
  cfg["n"] = f.n;
  cfg["w"] = f.w;
  cfg["M"] = f.M > 0 ? f.M : 10;
  emit_header(out, "verify-domination", cfg);
  const LemmaReport rep =
      verify_lemma_domination({f.p, f.eps}, f.n, f.w, f.M > 0 ? f.M : 10);
  out.body << lemma_report_json(rep) << '\n';
  out.flush();
  return rep.dominated ? 0 : 3;
}

int cmd_oracle(const Flags& f) {
  Output out;
  out.out_path = f.out;
  json cfg = base_cfg(f);
  cfg["p"] = f.p;
  cfg["eps"] = f.eps;
  cfg["n"] = f.n;
  cfg["w"] = f.w;
  cfg["M"] = f.M;
  emit_header(out, "oracle", cfg);
  json j;
  j["theta"] = exact_theta({f.p, f.eps}, f.n);
  if (f.M > 0) {
    std::vector<std::int64_t> init;
    for (std::int64_t c = -2 * f.M; c <= 0; c += 2) init.push_back(c);
    const SubsetDist dist = exact_row_distribution({f.p, f.eps}, init, f.n, -2 * f.M);
    const WindowLaw law = normalized_window_law(dist, f.w);
    json masses;
    for (const auto& [mask, mass] : law.mass) {
      std::string key;
      for (auto c : mask_columns(mask, f.w)) key += (key.empty() ? "" : " ") + std::to_string(c);
      masses[key] = mass;
    }
    j["window_law"] = masses;
    j["mass_extinct"] = law.mass_extinct;
    j["err_bound"] = dist.err_bound;
  }
  out.body << j.dump() << '\n';
  out.flush();
  return 0;
}

int cmd_block(const Flags& f) {
  Output out;
  out.out_path = f.out;
  json cfg = base_cfg(f);
  cfg["p"] = f.p;
  cfg["eps"] = f.eps;
  cfg["L"] = f.L;
  cfg["alpha"] = f.alpha;
  cfg["replicas"] = f.replicas;
  cfg["grid"] = f.grid;
  emit_header(out, "block", cfg);
  if (f.grid.empty()) {
    const BlockEventEstimate est =
        estimate_block_event({f.p, f.eps}, f.L, f.alpha, f.replicas, f.seed, f.threads);
    out.body << "L,alpha,p,eps,replicas,p_event,stderr\n";
    out.body << est.L << ',' << g17(est.alpha) << ',' << g17(f.p) << ',' << g17(f.eps) << ','
             << est.R << ',' << g17(est.p_event) << ',' << g17(est.stderr_) << '\n';
  } else {
    const auto [gw, gh] = parse_grid(f.grid, 8, 8);
    const BlockField bf =
        block_field_sample({f.p, f.eps}, f.L, f.alpha, gw, gh, f.seed, f.threads);
    for (int j = gh - 1; j >= 0; --j) {
      for (int i = 0; i < gw; ++i) out.body << (bf.at(i, j) ? '1' : '0');
      out.body << '\n';
    }
    out.body << "# " << json{{"crossing", renormalized_percolation_check(bf)}}.dump() << '\n';
  }
  out.flush();
  return 0;
}

int cmd_sweep(const Flags& f, double p0, double p1, int pn, double e0, double e1, int en) {
  Output out;
  out.out_path = f.out;
  json cfg = base_cfg(f);
  cfg["method"] = f.method;
  cfg["T"] = f.T;
  cfg["replicas"] = f.replicas;
  cfg["p_grid"] = {p0, p1, pn};
  cfg["eps_grid"] = {e0, e1, en};
  cfg["semantics"] = f.semantics;
  emit_header(out, "sweep", cfg);
  out.body << kEstimateHeader << '\n';
  for (int j = 0; j < en; ++j) {
    const double eps = en == 1 ? e0 : e0 + (e1 - e0) * j / (en - 1);
    for (int i = 0; i < pn; ++i) {
      const double p = pn == 1 ? p0 : p0 + (p1 - p0) * i / (pn - 1);
      const std::uint64_t cell_seed = derive_seed(f.seed, 1000003ULL * j + i);
      if (f.method == "speed") {
        try {
          const SpeedEstimate est =
              estimate_speed({p, eps}, f.T, f.replicas, cell_seed, f.threads);
          estimate_row(out, "speed", eps, p, f.T, est.R, est.alpha_hat, est.stderr_,
                       est.alpha_hat - kBisectZ * est.stderr_,
                       est.alpha_hat + kBisectZ * est.stderr_, cell_seed);
        } catch (const Error& e) {
          if (e.code() != Errc::BracketFailure) throw;
          estimate_row(out, "speed-bracketfail", eps, p, f.T, 0, 0.0, 0.0, 0.0, 0.0, cell_seed);
        }
      } else {
        const SurvivalEstimate est = estimate_survival({p, eps}, f.T, f.replicas, cell_seed,
                                                       parse_semantics(f.semantics), f.threads);
        estimate_row(out, "survival", eps, p, f.T, est.R, est.theta_hat, est.stderr_,
                     est.theta_hat - kBisectZ * est.stderr_,
                     est.theta_hat + kBisectZ * est.stderr_, cell_seed);
      }
    }
  }
  out.flush();
  return 0;
}

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--seed", f.seed, "master seed");
  sub->add_option("--out", f.out, "write output to file instead of stdout");
  sub->add_option("--format", f.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--threads", f.threads, "worker threads (output-invariant)")
      ->check(CLI::Range(1, 256));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"oriented bond percolation with enhancement edges"};
  app.require_subcommand(1);
  Flags f;

  auto* sim = app.add_subcommand("simulate", "evolve one trajectory and dump right edges");
  sim->add_option("--p", f.p)->check(CLI::Range(0.0, 1.0));
  sim->add_option("--eps", f.eps)->check(CLI::Range(0.0, 1.0));
  sim->add_option("--T", f.T)->check(CLI::PositiveNumber);
  sim->add_option("--M", f.M, "half-line truncation; 0 = start from {0}");
  sim->add_option("--mode", f.mode)->check(CLI::IsMember({"vacuum", "saturated"}));
  sim->add_option("--snapshot-every", f.snapshot_every);
  add_common(sim, f);

  auto* spd = app.add_subcommand("speed", "right-edge speed via bracketed replicas");
  spd->add_option("--p", f.p)->check(CLI::Range(0.0, 1.0));
  spd->add_option("--eps", f.eps)->check(CLI::Range(0.0, 1.0));
  spd->add_option("--T", f.T)->check(CLI::PositiveNumber);
  spd->add_option("--replicas", f.replicas)->check(CLI::PositiveNumber);
  spd->add_option("--M", f.M);
  add_common(spd, f);

  auto* sur = app.add_subcommand("survival", "finite-depth survival probability");
  sur->add_option("--p", f.p)->check(CLI::Range(0.0, 1.0));
  sur->add_option("--eps", f.eps)->check(CLI::Range(0.0, 1.0));
  sur->add_option("--T", f.T)->check(CLI::PositiveNumber);
  sur->add_option("--replicas", f.replicas)->check(CLI::PositiveNumber);
  sur->add_option("--semantics", f.semantics)->check(CLI::IsMember({"strict", "lenient"}));
  add_common(sur, f);

  auto* pc = app.add_subcommand("pc", "critical parameter estimate");
  pc->add_option("--eps", f.eps)->check(CLI::Range(0.0, 1.0));
  pc->add_option("--T", f.T)->check(CLI::PositiveNumber);
  pc->add_option("--replicas", f.replicas)->check(CLI::PositiveNumber);
  pc->add_option("--tol", f.tol)->check(CLI::Range(1e-6, 0.5));
  pc->add_option("--level", f.level)->check(CLI::Range(0.01, 0.99));
  pc->add_option("--method", f.method)->check(CLI::IsMember({"speed", "survival", "both"}));
  pc->add_option("--semantics", f.semantics)->check(CLI::IsMember({"strict", "lenient"}));
  add_common(pc, f);

  auto* cpl = app.add_subcommand("couple", "two enhancement densities on one field");
  cpl->add_option("--p", f.p)->check(CLI::Range(0.0, 1.0));
  cpl->add_option("--eps", f.eps)->check(CLI::Range(0.0, 1.0));
  cpl->add_option("--eps2", f.eps2)->check(CLI::Range(0.0, 1.0));
  cpl->add_option("--T", f.T)->check(CLI::PositiveNumber);
  cpl->add_option("--M", f.M);
  add_common(cpl, f);

  auto* tau = app.add_subcommand("tau", "stopping-time chain with restarts");
  tau->add_option("--p", f.p)->check(CLI::Range(0.0, 1.0));
  tau->add_option("--eps", f.eps)->check(CLI::Range(0.0, 1.0));
  tau->add_option("--eps2", f.eps2)->check(CLI::Range(0.0, 1.0));
  tau->add_option("--T", f.T)->check(CLI::PositiveNumber);
  tau->add_option("--M", f.M);
  add_common(tau, f);

  auto* dom = app.add_subcommand("verify-domination", "exact added-site window-law domination check");
  dom->add_option("--p", f.p)->check(CLI::Range(0.0, 1.0));
  dom->add_option("--eps", f.eps)->check(CLI::Range(0.0, 1.0));
  dom->add_option("--n", f.n)->check(CLI::PositiveNumber);
  dom->add_option("--w", f.w)->check(CLI::Range(1, 6));
  dom->add_option("--M", f.M);
  add_common(dom, f);

  auto* orc = app.add_subcommand("oracle", "exact theta and window laws");
  orc->add_option("--p", f.p)->check(CLI::Range(0.0, 1.0));
  orc->add_option("--eps", f.eps)->check(CLI::Range(0.0, 1.0));
  orc->add_option("--n", f.n)->check(CLI::PositiveNumber);
  orc->add_option("--w", f.w)->check(CLI::Range(1, 31));
  orc->add_option("--M", f.M);
  add_common(orc, f);

  auto* blk = app.add_subcommand("block", "parallelogram crossing events");
  blk->add_option("--p", f.p)->check(CLI::Range(0.0, 1.0));
  blk->add_option("--eps", f.eps)->check(CLI::Range(0.0, 1.0));
  blk->add_option("--L", f.L)->check(CLI::PositiveNumber);
  blk->add_option("--alpha", f.alpha)->check(CLI::Range(1e-6, 1.0));
  blk->add_option("--replicas", f.replicas)->check(CLI::PositiveNumber);
  blk->add_option("--grid", f.grid, "WxH eta grid instead of a single estimate");
  add_common(blk, f);

  double p0 = 0.0, p1 = 1.0, e0 = 0.0, e1 = 0.0;
  int pn = 5, en = 1;
  auto* swp = app.add_subcommand("sweep", "estimate over a (p, eps) grid");
  swp->add_option("--p-min", p0);
  swp->add_option("--p-max", p1);
  swp->add_option("--p-steps", pn)->check(CLI::PositiveNumber);
  swp->add_option("--eps-min", e0);
  swp->add_option("--eps-max", e1);
  swp->add_option("--eps-steps", en)->check(CLI::PositiveNumber);
  swp->add_option("--T", f.T)->check(CLI::PositiveNumber);
  swp->add_option("--replicas", f.replicas)->check(CLI::PositiveNumber);
  swp->add_option("--method", f.method)->check(CLI::IsMember({"speed", "survival"}));
  swp->add_option("--semantics", f.semantics)->check(CLI::IsMember({"strict", "lenient"}));
  add_common(swp, f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 1;
  }

  try {
    if (sim->parsed()) return cmd_simulate(f);
    if (spd->parsed()) return cmd_speed(f);
    if (sur->parsed()) return cmd_survival(f);
    if (pc->parsed()) return cmd_pc(f);
    if (cpl->parsed()) return cmd_couple(f);
    if (tau->parsed()) return cmd_tau(f);
    if (dom->parsed()) return cmd_verify_domination(f);
    if (orc->parsed()) return cmd_oracle(f);
    if (blk->parsed()) return cmd_block(f);
    if (swp->parsed()) return cmd_sweep(f, p0, p1, pn, e0, e1, en);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
