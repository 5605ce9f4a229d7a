#include "kdecay/lp.hpp"

#include <cmath>

namespace kdecay {

namespace {
double psi(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

// C-infinity step: 0 for x <= 0, 1 for x >= 1.
double smooth_step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = psi(x);
  return a / (a + psi(1.0 - x));
}
}  // namespace

LPFilterBank::LPFilterBank(int j_min, int j_max) : j_min_(j_min), j_max_(j_max) {
  if (j_min > j_max) throw input_error("LPFilterBank: j_min must be <= j_max");
  if (j_max - j_min > 200) throw input_error("LPFilterBank: range too wide");
}

double LPFilterBank::phi(double r) const { return 1.0 - smooth_step(r - 1.0); }

double LPFilterBank::block(int j, double r) const {
  const double scaled = r * std::exp2(static_cast<double>(-j));
  return phi(scaled) - phi(2.0 * scaled);
}

double LPFilterBank::partition_sum(double r) const {
  double acc = 0.0;
  for (int j = j_min_; j <= j_max_; ++j) acc += block(j, r);
  return acc;
}

LPFilterBank build_lp_filters(int j_min, int j_max) {
  return LPFilterBank(j_min, j_max);
}

}  // namespace kdecay
