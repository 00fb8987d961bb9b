#pragma once

#include <cstdint>
#include <vector>

#include "perc/front.hpp"
#include "perc/lattice.hpp"

namespace perc {

// Survival to depth T. Strict follows the paper's intersection over all
// rows; Lenient tolerates isolated empty rows bridged by vertical bonds.
enum class Semantics { Strict, Lenient };

struct SpeedEstimate {
  double alpha_hat = 0.0;
  double stderr_ = 0.0;
  std::int64_t T = 0;
  std::int64_t R = 0;          // resolved replicas entering the mean
  std::int64_t unresolved = 0; // replicas whose brackets never agreed at row T
  double agree = 0.0;          // mean bracket agreement fraction over resolved replicas
};

struct SurvivalEstimate {
  double theta_hat = 0.0;
  double stderr_ = 0.0;
  std::int64_t T = 0;
  std::int64_t R = 0;
  Semantics semantics = Semantics::Strict;
};

enum class PcMethod { SpeedSign, Survival };

struct PcIteration {
  std::int64_t iter = 0;
  double p_mid = 0.0;
  double estimate = 0.0;  // alpha or theta at the midpoint
  double stderr_ = 0.0;
  std::int64_t R = 0;
  char decision = '?';  // '+' above, '-' below, '~' ambiguous shrink, 'x' bracket failure
};

struct PcEstimate {
  double p_hat = 0.0;
  double lo = 0.0;
  double hi = 1.0;
  PcMethod method = PcMethod::SpeedSign;
  bool trustworthy = true;  // false when the ambiguity budget ran out
  std::vector<PcIteration> iters;
};

bool survives(const Trajectory& traj, std::int64_t T, Semantics semantics);

// Mean of r_T/T over replicas of bracket_run with M = T + margin; replicas
// whose brackets disagree at row T are re-run with doubled M (twice), then
// counted as unresolved. All replicas unresolved raises BracketFailure.
SpeedEstimate estimate_speed(const Params& params, std::int64_t T, std::int64_t R,
                             std::uint64_t seed, int threads = 1);

SurvivalEstimate estimate_survival(const Params& params, std::int64_t T, std::int64_t R,
                                   std::uint64_t seed, Semantics semantics, int threads = 1);

// Stochastic bisection on the sign of the right-edge speed.
PcEstimate find_pc_speed(double eps, double tol, std::int64_t T, std::int64_t R,
                         std::uint64_t seed, int threads = 1);

// Bisection for theta_T crossing `level`, run at depths T and 2T; the
// returned bracket covers both crossings so the finite-depth drift is
// part of the reported width.
PcEstimate find_pc_survival(double eps, std::int64_t T, double level, double tol, std::int64_t R,
                            std::uint64_t seed, Semantics semantics = Semantics::Strict,
                            int threads = 1);

inline constexpr std::int64_t kBracketMargin = 32;
inline constexpr double kBisectZ = 2.5758293035489004;  // two-sided 99%

}  // namespace perc
