#include "perc/estimators.hpp"

#include <cmath>
#include <optional>

#include "perc/parallel.hpp"

namespace perc {

namespace {

constexpr int kWideningAttempts = 2;  // doublings of M after the first try
constexpr int kSignRetries = 2;       // quadruplings of R at an ambiguous midpoint
constexpr int kAmbiguousBudget = 3;
constexpr std::int64_t kMaxBisectIters = 96;

struct MeanStd {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::int64_t n = 0;
};

MeanStd mean_stderr(const std::vector<double>& xs) {
  MeanStd out;
  out.n = static_cast<std::int64_t>(xs.size());
  if (out.n == 0) return out;
  double s = 0.0;
  for (double x : xs) s += x;
  out.mean = s / static_cast<double>(out.n);
  if (out.n >= 2) {
    double q = 0.0;
    for (double x : xs) q += (x - out.mean) * (x - out.mean);
    out.stderr_ = std::sqrt(q / static_cast<double>(out.n - 1)) /
                  std::sqrt(static_cast<double>(out.n));
  }
  return out;
}

}  // namespace

bool survives(const Trajectory& traj, std::int64_t T, Semantics semantics) {
  const auto& r = traj.r;
  if (semantics == Semantics::Strict) {
    for (std::int64_t n = 1; n <= T; ++n)
      if (!r[static_cast<std::size_t>(n)].has_value()) return false;
    return true;
  }
  for (std::int64_t n = 0; n + 1 <= T; ++n) {
    if (!r[static_cast<std::size_t>(n)].has_value() &&
        !r[static_cast<std::size_t>(n + 1)].has_value())
      return false;
  }
  return true;
}

SpeedEstimate estimate_speed(const Params& params, std::int64_t T, std::int64_t R,
                             std::uint64_t seed, int threads) {
  std::vector<std::optional<double>> value(static_cast<std::size_t>(R));
  std::vector<double> agree(static_cast<std::size_t>(R), 0.0);
  parallel_for(R, threads, [&](std::int64_t i) {
    const RandomField field(derive_seed(seed, static_cast<std::uint64_t>(i)));
    std::int64_t M = T + kBracketMargin;
    for (int attempt = 0; attempt <= kWideningAttempts; ++attempt) {
      const BracketResult br = bracket_run(params, M, T, field);
      const auto rlo = br.lo.r[static_cast<std::size_t>(T)];
      const auto rhi = br.hi.r[static_cast<std::size_t>(T)];
      agree[static_cast<std::size_t>(i)] = br.agree;
      if (rlo.has_value() && rhi.has_value() && *rlo == *rhi) {
        value[static_cast<std::size_t>(i)] =
            static_cast<double>(*rhi) / static_cast<double>(T);
        return;
      }
      M *= 2;
    }
  });

  std::vector<double> xs;
  xs.reserve(static_cast<std::size_t>(R));
  double agree_sum = 0.0;
  std::int64_t unresolved = 0;
  for (std::int64_t i = 0; i < R; ++i) {
    if (value[static_cast<std::size_t>(i)].has_value()) {
      xs.push_back(*value[static_cast<std::size_t>(i)]);
      agree_sum += agree[static_cast<std::size_t>(i)];
    } else {
      ++unresolved;
    }
  }
  if (xs.empty())
    raise(Errc::BracketFailure,
          "estimate_speed: no replica resolved after widening (p=" + std::to_string(params.p) +
              ", eps=" + std::to_string(params.eps) + ")");
  const MeanStd ms = mean_stderr(xs);
  SpeedEstimate est;
  est.alpha_hat = ms.mean;
  est.stderr_ = ms.stderr_;
  est.T = T;
  est.R = ms.n;
  est.unresolved = unresolved;
  est.agree = agree_sum / static_cast<double>(ms.n);
  return est;
}

SurvivalEstimate estimate_survival(const Params& params, std::int64_t T, std::int64_t R,
                                   std::uint64_t seed, Semantics semantics, int threads) {
  std::vector<std::uint8_t> alive(static_cast<std::size_t>(R), 0);
  parallel_for(R, threads, [&](std::int64_t i) {
    const RandomField field(derive_seed(seed, static_cast<std::uint64_t>(i)));
    const Trajectory traj = simulate(params, FrontState::init_finite({0}), T, field);
    alive[static_cast<std::size_t>(i)] = survives(traj, T, semantics) ? 1 : 0;
  });
  std::int64_t count = 0;
  for (auto a : alive) count += a;
  SurvivalEstimate est;
  est.theta_hat = static_cast<double>(count) / static_cast<double>(R);
  est.stderr_ = std::sqrt(est.theta_hat * (1.0 - est.theta_hat) / static_cast<double>(R));
  est.T = T;
  est.R = R;
  est.semantics = semantics;
  return est;
}

namespace {

// Refines the returned point inside the final bracket: when both endpoints
// carry measured values of opposite sign relative to the target, the
// linear crossing is a far better point estimate than the midpoint (the
// sign estimates near the crossing are much noisier than the bracket is
// wide). Falls back to the midpoint otherwise.
double bracket_point(double lo, double hi, const std::optional<double>& f_lo,
                     const std::optional<double>& f_hi) {
  if (f_lo.has_value() && f_hi.has_value() && *f_lo < 0.0 && *f_hi > 0.0)
    return lo + (hi - lo) * (-*f_lo) / (*f_hi - *f_lo);
  return 0.5 * (lo + hi);
}

}  // namespace

PcEstimate find_pc_speed(double eps, double tol, std::int64_t T, std::int64_t R,
                         std::uint64_t seed, int threads) {
  PcEstimate out;
  out.method = PcMethod::SpeedSign;
  double lo = 0.0, hi = 1.0;
  double trusted_lo = 0.0, trusted_hi = 1.0;
  std::optional<double> alpha_lo, alpha_hi;
  int ambiguous_used = 0;
  std::int64_t iter = 0;

  while (hi - lo > tol && iter < kMaxBisectIters) {
    const double mid = 0.5 * (lo + hi);
    int sign = 0;
    bool decided = false;
    std::optional<double> mid_alpha;
    std::int64_t reps = R;
    for (int attempt = 0; attempt <= kSignRetries; ++attempt, reps *= 4) {
      PcIteration it;
      it.iter = iter++;
      it.p_mid = mid;
      it.R = reps;
      const std::uint64_t sub =
          derive_seed(seed, 0x70C0000ULL + 8 * static_cast<std::uint64_t>(it.iter) +
                                static_cast<std::uint64_t>(attempt));
      try {
        const SpeedEstimate est = estimate_speed({mid, eps}, T, reps, sub, threads);
        it.estimate = est.alpha_hat;
        it.stderr_ = est.stderr_;
        if (std::fabs(est.alpha_hat) > kBisectZ * est.stderr_ && est.alpha_hat != 0.0) {
          sign = est.alpha_hat > 0.0 ? 1 : -1;
          decided = true;
          mid_alpha = est.alpha_hat;
          it.decision = sign > 0 ? '+' : '-';
          out.iters.push_back(it);
          break;
        }
        it.decision = '?';
        out.iters.push_back(it);
      } catch (const Error& e) {
        if (e.code() != Errc::BracketFailure) throw;
        // The vacuum bracket died while the saturated one survived:
        // subcritical evidence, treat as a confident negative sign.
        sign = -1;
        decided = true;
        it.decision = 'x';
        out.iters.push_back(it);
        break;
      }
    }
    if (decided) {
      if (sign > 0) {
        hi = mid;
        alpha_hi = mid_alpha;
        trusted_hi = std::min(trusted_hi, mid);
      } else {
        lo = mid;
        alpha_lo = mid_alpha;
        trusted_lo = std::max(trusted_lo, mid);
      }
    } else {
      ++ambiguous_used;
      if (ambiguous_used > kAmbiguousBudget) {
        out.p_hat = 0.5 * (trusted_lo + trusted_hi);
        out.lo = trusted_lo;
        out.hi = trusted_hi;
        out.trustworthy = false;
        return out;
      }
      // Sign undecidable at the budgeted replica count: the midpoint is
      // near the crossing, so shrink symmetrically around it.
      const double w = hi - lo;
      lo = std::max(lo, mid - 0.25 * w);
      hi = std::min(hi, mid + 0.25 * w);
      alpha_lo.reset();
      alpha_hi.reset();
      if (!out.iters.empty()) out.iters.back().decision = '~';
    }
  }
  out.p_hat = bracket_point(lo, hi, alpha_lo, alpha_hi);
  out.lo = lo;
  out.hi = hi;
  out.trustworthy = true;
  return out;
}

namespace {

struct SurvivalCrossing {
  double lo = 0.0;
  double hi = 1.0;
  double point = 0.5;  // crossing estimate inside [lo, hi]
  bool trustworthy = true;
  bool below_range = false;  // theta at p=0 already above level
};

SurvivalCrossing survival_crossing(double eps, std::int64_t T, double level, double tol,
                                   std::int64_t R, std::uint64_t seed, Semantics semantics,
                                   int threads, std::int64_t& iter, PcEstimate& diag) {
  SurvivalCrossing out;

  const auto record = [&](double p, const SurvivalEstimate& est, char decision) {
    PcIteration it;
    it.iter = iter++;
    it.p_mid = p;
    it.estimate = est.theta_hat;
    it.stderr_ = est.stderr_;
    it.R = est.R;
    it.decision = decision;
    diag.iters.push_back(it);
  };

  // theta is 1 at p=1 for any eps; the p=0 endpoint can already clear the
  // level (vertical chains alone), in which case the crossing is at 0.
  {
    const SurvivalEstimate est0 = estimate_survival(
        {0.0, eps}, T, R, derive_seed(seed, 0xE0D0000ULL + static_cast<std::uint64_t>(T)),
        semantics, threads);
    if (est0.theta_hat - level > kBisectZ * est0.stderr_) {
      record(0.0, est0, '+');
      out.lo = 0.0;
      out.hi = 0.0;
      out.point = 0.0;
      out.below_range = true;
      return out;
    }
    record(0.0, est0, '-');
  }

  double lo = 0.0, hi = 1.0;
  double trusted_lo = 0.0, trusted_hi = 1.0;
  std::optional<double> excess_lo, excess_hi;  // theta - level at the endpoints
  int ambiguous_used = 0;
  std::int64_t local_iters = 0;
  while (hi - lo > tol && local_iters++ < kMaxBisectIters) {
    const double mid = 0.5 * (lo + hi);
    int sign = 0;
    bool decided = false;
    std::optional<double> mid_excess;
    std::int64_t reps = R;
    for (int attempt = 0; attempt <= kSignRetries; ++attempt, reps *= 4) {
      const std::uint64_t sub =
          derive_seed(seed, 0x51D0000ULL + 8 * static_cast<std::uint64_t>(iter) +
                                static_cast<std::uint64_t>(attempt));
      const SurvivalEstimate est =
          estimate_survival({mid, eps}, T, reps, sub, semantics, threads);
      if (std::fabs(est.theta_hat - level) > kBisectZ * est.stderr_) {
        sign = est.theta_hat > level ? 1 : -1;
        decided = true;
        mid_excess = est.theta_hat - level;
        record(mid, est, sign > 0 ? '+' : '-');
        break;
      }
      record(mid, est, '?');
    }
    if (decided) {
      if (sign > 0) {
        hi = mid;
        excess_hi = mid_excess;
        trusted_hi = std::min(trusted_hi, mid);
      } else {
        lo = mid;
        excess_lo = mid_excess;
        trusted_lo = std::max(trusted_lo, mid);
      }
    } else {
      ++ambiguous_used;
      if (ambiguous_used > kAmbiguousBudget) {
        out.lo = trusted_lo;
        out.hi = trusted_hi;
        out.point = 0.5 * (trusted_lo + trusted_hi);
        out.trustworthy = false;
        return out;
      }
      const double w = hi - lo;
      lo = std::max(lo, mid - 0.25 * w);
      hi = std::min(hi, mid + 0.25 * w);
      excess_lo.reset();
      excess_hi.reset();
      if (!diag.iters.empty()) diag.iters.back().decision = '~';
    }
  }
  out.lo = lo;
  out.hi = hi;
  out.point = bracket_point(lo, hi, excess_lo, excess_hi);
  return out;
}

}  // namespace

PcEstimate find_pc_survival(double eps, std::int64_t T, double level, double tol, std::int64_t R,
                            std::uint64_t seed, Semantics semantics, int threads) {
  PcEstimate out;
  out.method = PcMethod::Survival;
  std::int64_t iter = 0;
  const SurvivalCrossing at_T =
      survival_crossing(eps, T, level, tol, R, derive_seed(seed, 1), semantics, threads, iter, out);
  const SurvivalCrossing at_2T = survival_crossing(eps, 2 * T, level, tol, R,
                                                   derive_seed(seed, 2), semantics, threads, iter, out);
  out.p_hat = at_2T.point;
  out.lo = std::min(at_T.lo, at_2T.lo);
  out.hi = std::max(at_T.hi, at_2T.hi);
  out.trustworthy = at_T.trustworthy && at_2T.trustworthy;
  return out;
}

}  // namespace perc
