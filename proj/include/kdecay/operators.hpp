#pragma once

#include "kdecay/macro.hpp"

namespace kdecay {

// Model linearized collision operator
//   L = (I - P) M_w (I - P),   M_w = multiplication by <v>^{gamma+2s},
// acting on node-value vectors.  Self-adjoint and nonnegative under the
// quadrature inner product, kernel exactly the macroscopic subspace, and
// <g, Lg> = |{I-P}g|^2_{L^2_{gamma+2s}} with equality, so the coercivity
// constant is 1 by construction.
struct KineticOperator {
  const VelocityGrid* grid = nullptr;
  KernelParams params{3, 1.0, 0.5};
  Mat matrix;           // node-coordinate action
  double lambda = 1.0;  // coercivity constant
};

KineticOperator build_model_L(const VelocityGrid& grid,
                              const KernelParams& params,
                              const MacroBasis& basis);

// Conjugation by diag(sqrt(quad)) mapping node coordinates to coordinates in
// which the quadrature inner product is the standard one.  Self-adjointness
// w.r.t. the quadrature pairing becomes matrix symmetry there.
Mat to_orthonormal(const Mat& node_matrix, const VelocityGrid& grid);
CMat to_orthonormal(const CMat& node_matrix, const VelocityGrid& grid);
CMat from_orthonormal(const CMat& ortho_matrix, const VelocityGrid& grid);

struct ValidateTolerances {
  double null_space = 1e-10;
  double nonnegativity = 1e-10;
  double lambda_low = 1e-8;  // coercivity fails below this
};

struct OperatorReport {
  double null_residual = 0.0;    // max_a |L e_a|_{L^2}
  double min_rayleigh = 0.0;     // smallest eigenvalue of the symmetric part
  double lambda_measured = 0.0;  // microscopic coercivity constant
  double micro_gap = 0.0;        // smallest microscopic eigenvalue in plain L^2
  bool null_space_ok = false;
  bool nonnegative_ok = false;
  bool coercive_ok = false;
  bool pass() const { return null_space_ok && nonnegative_ok && coercive_ok; }
};

// Checks the structural contract of a collision operator: macroscopic basis
// elements are annihilated, the quadratic form is nonnegative, and the
// microscopic coercivity constant
//   lambda = min over micro g of <g, Lg> / |g|^2_{L^2_{gamma+2s}}
// is positive.  lambda is computed by restricting the symmetrized form to
// the orthogonal complement of the basis and solving the generalized
// symmetric eigenproblem against the weighted mass there.
OperatorReport validate_operator(const KineticOperator& op,
                                 const MacroBasis& basis,
                                 const ValidateTolerances& tol = {});

// Fourier mode of transport + collision at spatial frequency xi = kappa
// omega (|omega| = 1):  B = 2 pi i kappa (v . omega) + L.
struct ModeOperator {
  const VelocityGrid* grid = nullptr;
  KernelParams params{3, 1.0, 0.5};
  double kappa = 0.0;
  Vec omega;
  CMat matrix;  // node-coordinate action
};

ModeOperator build_mode_operator(const KineticOperator& op, double kappa,
                                 const Vec& omega);

}  // namespace kdecay
