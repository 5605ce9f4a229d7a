#pragma once

#include <string>
#include <vector>

#include "kdecay/besov.hpp"

namespace kdecay {

// One inequality evaluation.  `ratio` is lhs/rhs (variant-specific when
// noted) and `bound` is the constant it was held to.
struct CheckRow {
  std::string variant;
  std::string params;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  double bound = 0.0;
  bool pass = false;
  bool skipped = false;
  std::string note;
};

// Block-level norm comparison |Delta_j f|_p <= C 2^{(n/q - n/p) j} |Delta_j f|_q,
// 1 <= q <= p <= inf.  Empty blocks are reported as skipped.
CheckRow check_bernstein(const ScalarField& f, const LPFilterBank& bank, int j,
                         double p, double q);

// Radial backend allows p = q = 2 only, where the ratio is identically 1.
CheckRow check_bernstein(const RadialMixedField& f, const LPFilterBank& bank,
                         int j, double ell = 0.0);

// Multiplier-order variant: |Delta_j Lambda^s f|_2 / |Delta_j f|_2 against
// 2^{j s}.  The block support pins the ratio inside [2^{-|s|}, 2^{|s|}]
// exactly, no calibration involved.
CheckRow check_bernstein_riesz(const ScalarField& f, const LPFilterBank& bank,
                               int j, double s);

// Interpolation with constant exactly 1 between dyadic-block norms:
//   |g|_{l, q', Lq}  <=  |g|_{k, r', Lr}^theta |g|_{m, p', Lp}^{1-theta}
// for m > l >= k, p <= r, p' <= r', theta = (m - l)/(m - k); the middle
// exponents follow from 1/q = theta/r + (1-theta)/p and likewise for q'.
struct HolderIndices {
  double k = 0.0, ell = 0.0, m = 0.0;
  double p = 2.0, r = 2.0;          // spatial Lebesgue exponents
  double p_prime = 2.0, r_prime = 2.0;  // block-sum exponents
};
CheckRow check_holder(const ScalarField& f, const LPFilterBank& bank,
                      const HolderIndices& ix);
// Radial backend: spatial exponents fixed at 2, block-sum exponents free.
CheckRow check_holder(const RadialMixedField& f, const LPFilterBank& bank,
                      double k, double ell, double m, double p_prime,
                      double r_prime, double vell = 0.0);

// Convexity estimate with a calibrated constant:
//   |f|_{k, 1, Lp}  <=  C |f|_{m, inf, Lr}^{1-theta} |f|_{rho, inf, Lr}^theta,
// theta = (k + n/r - n/p - m)/(rho - m) required inside (0, 1), r <= p.
struct OptSobIndices {
  double k = 0.0, m = 1.0, rho = -1.0;
  double r = 2.0, p = 2.0;
};
CheckRow check_opt_sob(const ScalarField& f, const LPFilterBank& bank,
                       const OptSobIndices& ix);

// Low-frequency embedding with a calibrated constant:
//   |f|_{-rho, inf, L2}  <=  C |f|_{Lp},  rho = n/p - n/2,  1 <= p <= 2.
CheckRow check_embedding(const ScalarField& f, const LPFilterBank& bank,
                         double p);

// Heat-flow characterization of the low-frequency seminorm, radial backend.
// plateau: every t^{rho/2} |heat(t) f|_2 stays within a factor 3 of the
// geometric mean over the sampled times.  equivalence: the supremum of that
// quantity, divided by |f|_{-rho, inf, L2}, stays inside the frozen
// calibration band.
struct HeatCharReport {
  CheckRow plateau;
  CheckRow equivalence;
  std::vector<std::pair<double, double>> series;  // (t, t^{rho/2} |heat(t)f|_2)
  bool pass() const { return plateau.pass && equivalence.pass; }
};
HeatCharReport check_heat_char(const RadialMixedField& f,
                               const LPFilterBank& bank, double rho,
                               const std::vector<double>& times);

}  // namespace kdecay
