#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kdecay/common.hpp"
#include "kdecay/kernel_params.hpp"

namespace kdecay {

// Algebraic decay rate: bound proportional to (1+t)^{-power} log^{log_power}(2+t).
struct RateExpr {
  double power = 0.0;
  int log_power = 0;

  // Faster decay wins; at equal power, fewer log factors win.
  bool dominates(const RateExpr& other) const;
  double envelope(double t) const;
};

struct ConvRate {
  RateExpr rate;
  // max{half_rho, alpha} lies within 1e-6 of 1 but is not resolvably equal.
  // The log factor switches on exact equality only, so near-misses are
  // flagged rather than decided.
  bool near_threshold = false;
};

// Decay rate of the time convolution
//   int_0^t (1+t-tau)^{-half_rho} (1+tau)^{-alpha} dtau,
// namely (1+t)^{-min{half_rho+alpha-1, half_rho, alpha}}, picking up one
// log(2+t) factor exactly when max{half_rho, alpha} = 1.
ConvRate conv_rate(double half_rho, double alpha);

struct ConvSample {
  double t = 0.0;
  double integral = 0.0;
  double predicted = 0.0;
  double ratio = 0.0;
};

struct ConvReport {
  RateExpr rate;
  std::vector<ConvSample> samples;
  double ratio_min = 0.0;
  double ratio_max = 0.0;
  double spread() const { return ratio_max / ratio_min; }
};

// Quadrature check of conv_rate: evaluates the convolution integral at each
// time and divides by the predicted envelope.  Times below 1 are dropped
// (the integral degenerates there); after dropping, at least 10 samples
// spanning two decades are required.
ConvReport conv_rate_validate(double half_rho, double alpha,
                              const std::vector<double>& times);

struct BootstrapResult {
  // Successive decay exponents fed back through the closure argument;
  // the last entry is the first one to reach 1.
  std::vector<double> alphas;
  // Energy-bound rate produced by each pass.
  std::vector<RateExpr> intermediates;
  RateExpr terminal;
  int steps = 0;
  std::string note;
};

// Feedback iteration that upgrades a decay exponent rho in (n/2, (n+2)/2]
// to the full rate (1+t)^{-rho}, n >= 3.  Three branches:
//   rho in (2, (n+2)/2]: one direct pass, alpha_0 = rho-1;
//   rho = 2: a first pass costing log^2(2+t), removed by a second pass;
//   rho in (3/2, 2), n = 3 only: alpha_0 = 3 rho - 4,
//     alpha_{k+1} = 2 min{rho/2 + alpha_k - 1, rho/2}, until alpha_k >= 1.
BootstrapResult bootstrap_alpha(double rho, int n);

struct ParamSet {
  int n = 0;
  int K = 0;
  double gamma = 0.0;
  double s = 0.0;
  Regime regime = Regime::hard;
  int k_star = 0;    // smallest integer strictly greater than n/2
  int j_tilde = 0;   // largest integer strictly less than n/2
  double ell0_d = 0.0;
  double M = 0.0;
  double ell0 = 0.0;        // minimal velocity weight for the energy functional
  double ell0_prime = 0.0;  // weight paid when trading derivatives, 0 when hard
  double ell0_one = 0.0;    // minimal weight for the first decay statement
};

// Closed-form weight and regularity thresholds for dimension n >= 3 and
// total regularity K >= 2 k_star.
ParamSet weight_params(int n, int K, double gamma, double s);

struct RateQuery {
  double m = 0.0;            // extra regularity of the data seminorm
  double rho = 0.0;          // smoothness index of the data seminorm
  bool microscopic = false;  // data orthogonal to the hydrodynamic modes
  Regime regime = Regime::hard;
  int n = 3;
  // Lebesgue-embedding path: all three must be set together.
  std::optional<double> r;  // target Lebesgue exponent in [2, inf]
  std::optional<int> k;     // spatial derivative count
  std::optional<int> K;     // total regularity, bounds k on this path
};

// Predicted decay power for a solution seminorm:
//   default path: (m + rho)/2;
//   microscopic data, hard potentials only: (m + rho + 1)/2;
//   embedding path (r, k, K set): (k + rho + n/2 - n/r)/2,
//     requires k < K - 1 - n/2 + n/r.
RateExpr theoretical_rate(const RateQuery& q);

struct FitResult {
  double power = 0.0;
  double power_stderr = 0.0;
  double power_early = 0.0;
  double power_late = 0.0;
  bool drift = false;  // early/late window powers disagree by more than 0.05
  std::size_t points = 0;
};

// Least-squares slope of log(value) against log(1+t) over the final
// window_fraction of the log-time range; at least 8 points must fall in the
// window and all values must be positive.  The window is split in half to
// detect drift (a non-power-law tail such as a log factor).
FitResult fit_exponent(const std::vector<std::pair<double, double>>& series,
                       double window_fraction = 0.5);

}  // namespace kdecay
