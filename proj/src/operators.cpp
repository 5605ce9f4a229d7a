#include "kdecay/operators.hpp"

#include <cmath>

namespace kdecay {

KineticOperator build_model_L(const VelocityGrid& grid,
                              const KernelParams& params,
                              const MacroBasis& basis) {
  if (&basis.grid() != &grid)
    throw input_error("build_model_L: basis built on a different grid");
  if (params.n != grid.dim)
    throw input_error("build_model_L: parameter dimension differs from grid");

  const Eigen::Index total = grid.size();
  const Mat q = Mat::Identity(total, total) - basis.projector();
  Vec wpow = grid.bracket.array().pow(params.weight_power());

  KineticOperator op;
  op.grid = &grid;
  op.params = params;
  op.matrix = q * wpow.asDiagonal() * q;
  op.lambda = 1.0;
  return op;
}

Mat to_orthonormal(const Mat& node_matrix, const VelocityGrid& grid) {
  Vec sq = grid.quad.array().sqrt();
  Vec isq = sq.cwiseInverse();
  return sq.asDiagonal() * node_matrix * isq.asDiagonal();
}

CMat to_orthonormal(const CMat& node_matrix, const VelocityGrid& grid) {
  CVec sq = grid.quad.array().sqrt().cast<Complex>();
  CVec isq = sq.cwiseInverse();
  return sq.asDiagonal() * node_matrix * isq.asDiagonal();
}

CMat from_orthonormal(const CMat& ortho_matrix, const VelocityGrid& grid) {
  CVec sq = grid.quad.array().sqrt().cast<Complex>();
  CVec isq = sq.cwiseInverse();
  return isq.asDiagonal() * ortho_matrix * sq.asDiagonal();
}

OperatorReport validate_operator(const KineticOperator& op,
                                 const MacroBasis& basis,
                                 const ValidateTolerances& tol) {
  if (op.grid == nullptr) throw input_error("validate_operator: unbound operator");
  if (&basis.grid() != op.grid)
    throw input_error("validate_operator: basis grid mismatch");
  const VelocityGrid& g = *op.grid;
  const Eigen::Index total = g.size();
  const int nb = basis.count();

  OperatorReport rep;

  // Null space: |L e_a|_{L^2} per basis element.
  double worst = 0.0;
  for (int a = 0; a < nb; ++a) {
    Vec le = op.matrix * basis.matrix().col(a);
    const double r = std::sqrt((g.quad.array() * le.array().square()).sum());
    worst = std::max(worst, r);
  }
  rep.null_residual = worst;
  rep.null_space_ok = worst <= tol.null_space;

  // Work in orthonormal coordinates; symmetrize to isolate the quadratic form.
  Mat sym = to_orthonormal(op.matrix, g);
  sym = 0.5 * (sym + sym.transpose().eval());

  Eigen::SelfAdjointEigenSolver<Mat> es(sym);
  if (es.info() != Eigen::Success)
    throw numeric_error("validate_operator: eigensolve failed");
  rep.min_rayleigh = es.eigenvalues().minCoeff();
  rep.nonnegative_ok = rep.min_rayleigh >= -tol.nonnegativity;

  // Orthonormal frame of the microscopic subspace: complement of the basis
  // columns (mapped to orthonormal coordinates) via a full QR factorization.
  Mat eb = g.quad.array().sqrt().matrix().asDiagonal() * basis.matrix();
  Eigen::HouseholderQR<Mat> qr(eb);
  Mat full = qr.householderQ() * Mat::Identity(total, total);
  Mat micro = full.rightCols(total - nb);

  Mat a_r = micro.transpose() * sym * micro;
  a_r = 0.5 * (a_r + a_r.transpose().eval());
  rep.micro_gap = Eigen::SelfAdjointEigenSolver<Mat>(a_r).eigenvalues().minCoeff();

  Vec wpow = g.bracket.array().pow(op.params.weight_power());
  Mat b_r = micro.transpose() * wpow.asDiagonal() * micro;
  b_r = 0.5 * (b_r + b_r.transpose().eval());

  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> ges(a_r, b_r);
  if (ges.info() != Eigen::Success)
    throw numeric_error("validate_operator: generalized eigensolve failed");
  rep.lambda_measured = ges.eigenvalues().minCoeff();
  rep.coercive_ok = rep.lambda_measured >= tol.lambda_low;

  return rep;
}

ModeOperator build_mode_operator(const KineticOperator& op, double kappa,
                                 const Vec& omega) {
  if (op.grid == nullptr)
    throw input_error("build_mode_operator: unbound operator");
  const VelocityGrid& g = *op.grid;
  if (omega.size() != g.dim)
    throw input_error("build_mode_operator: omega dimension mismatch");
  if (std::abs(omega.norm() - 1.0) > 1e-12)
    throw input_error("build_mode_operator: omega must be a unit vector");
  if (kappa < 0.0) throw input_error("build_mode_operator: kappa must be >= 0");

  ModeOperator mode;
  mode.grid = op.grid;
  mode.params = op.params;
  mode.kappa = kappa;
  mode.omega = omega;

  Vec vdot = g.nodes * omega;
  CVec diag = (Complex(0.0, 2.0 * pi * kappa) * vdot.cast<Complex>().array());
  mode.matrix = op.matrix.cast<Complex>();
  mode.matrix += CMat(diag.asDiagonal());
  return mode;
}

}  // namespace kdecay
