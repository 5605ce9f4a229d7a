#pragma once

#include "kdecay/velocity.hpp"

namespace kdecay {

// Orthonormal basis of the (n+2)-dimensional collision-invariant subspace:
//   sqrt(mu), v_a sqrt(mu) (a = 1..n), (|v|^2 - n) sqrt(mu) / sqrt(2n).
// Columns of `basis` hold node values.  The constructor verifies the Gram
// matrix under the quadrature inner product is the identity within gram_tol.
class MacroBasis {
 public:
  explicit MacroBasis(const VelocityGrid& grid, double gram_tol = 1e-10);

  const VelocityGrid& grid() const { return *grid_; }
  int count() const { return static_cast<int>(basis_.cols()); }
  const Mat& matrix() const { return basis_; }
  VelocityFunction element(int a) const;

  // Projector in node coordinates: P = E E^T Q with Q = diag(quad).
  const Mat& projector() const { return projector_; }

 private:
  const VelocityGrid* grid_;
  Mat basis_;
  Mat projector_;
};

struct Projection {
  VelocityFunction pf;   // macroscopic part P f
  Complex a;             // mass coefficient
  CVec b;                // momentum coefficients, one per axis
  Complex c;             // energy coefficient
};

// Macroscopic projection of f; coefficients are quadrature pairings of f
// against the basis elements (f in the unconjugated slot).
Projection project_P(const VelocityFunction& f, const MacroBasis& basis);

}  // namespace kdecay
