#pragma once

#include "kdecay/common.hpp"

namespace kdecay {

// Smooth dyadic filter bank on frequency magnitude r = |xi|.
//
// The low-pass profile phi is exactly 1 on r <= 1 and exactly 0 on r >= 2,
// built from the C-infinity step psi(x) = exp(-1/x) (x > 0).  The annulus
// profile phi_ann(r) = phi(r) - phi(2 r) is supported on [1/2, 2], and the
// dyadic blocks are phi_j(r) = phi_ann(r / 2^j), supported on
// [2^{j-1}, 2^{j+1}].  The sum of blocks telescopes:
//   sum_{j=a..b} phi_j(r) = phi(r / 2^b) - phi(r / 2^{a-1}),
// which equals 1 exactly for 2^a <= r <= 2^b.
class LPFilterBank {
 public:
  LPFilterBank(int j_min, int j_max);

  int j_min() const { return j_min_; }
  int j_max() const { return j_max_; }
  int block_count() const { return j_max_ - j_min_ + 1; }

  double phi(double r) const;           // low-pass profile
  double block(int j, double r) const;  // phi_ann(r / 2^j)
  double partition_sum(double r) const;

  // Index helpers: blocks are stored for j in [j_min, j_max].
  bool contains(int j) const { return j >= j_min_ && j <= j_max_; }

 private:
  int j_min_;
  int j_max_;
};

LPFilterBank build_lp_filters(int j_min, int j_max);

}  // namespace kdecay
