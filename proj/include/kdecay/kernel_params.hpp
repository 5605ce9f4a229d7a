#pragma once

#include "kdecay/common.hpp"

namespace kdecay {

enum class Regime { hard, soft };

// Collision kernel exponents (gamma, s) in dimension n.  The admissible
// parameter set splits into two regimes:
//   hard:  gamma + 2s >= 0
//   soft:  -2s > gamma > -n   and   gamma + 2s > -n/2
// The constructor rejects anything outside both.
struct KernelParams {
  int n = 3;
  double gamma = 1.0;
  double s = 0.5;

  KernelParams(int n_, double gamma_, double s_);

  Regime regime() const { return regime_; }
  bool hard() const { return regime_ == Regime::hard; }

  // Net power gamma + 2s of the collision weight.
  double weight_power() const { return gamma + 2.0 * s; }

  // Exponent rho used to deplete velocity weights per v-derivative:
  // 1 in the hard regime, -(gamma + 2s) in the soft regime.
  double rho() const { return hard() ? 1.0 : -weight_power(); }

 private:
  Regime regime_;
};

}  // namespace kdecay
