#pragma once

#include "kdecay/common.hpp"

namespace kdecay {

// Dense nonsymmetric eigendecomposition.  Right vectors are unit columns of
// `right`; left vectors are stored so that left.col(j)^H A = values(j)
// left.col(j)^H and are rescaled to the biorthonormal gauge
// left.col(i)^H right.col(j) = delta_ij, so spectral projectors read
// right.col(j) left.col(j)^H directly.
struct EigResult {
  CVec values;
  CMat right;
  CMat left;
  double max_residual = 0.0;      // max_j |A r_j - lambda_j r_j|_2
  double vector_condition = 1.0;  // max_j 1/|l_j^H r_j| before rescaling
};

// LAPACK-backed solver; `a` is not required to have any structure.
EigResult eig_dense(const CMat& a);

}  // namespace kdecay
