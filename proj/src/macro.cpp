#include "kdecay/macro.hpp"

#include <cmath>
#include <sstream>

namespace kdecay {

MacroBasis::MacroBasis(const VelocityGrid& grid, double gram_tol)
    : grid_(&grid) {
  const int n = grid.dim;
  const Eigen::Index total = grid.size();
  basis_.resize(total, n + 2);
  basis_.col(0) = grid.sqrt_mu;
  for (int a = 0; a < n; ++a)
    basis_.col(1 + a) = grid.nodes.col(a).array() * grid.sqrt_mu.array();
  basis_.col(n + 1) = (grid.vsq.array() - static_cast<double>(n)) *
                      grid.sqrt_mu.array() / std::sqrt(2.0 * n);

  Mat gram = basis_.transpose() * grid.quad.asDiagonal() * basis_;
  const double dev = (gram - Mat::Identity(n + 2, n + 2)).cwiseAbs().maxCoeff();
  if (dev > gram_tol) {
    std::ostringstream os;
    os << "MacroBasis: Gram deviation " << dev << " exceeds " << gram_tol;
    throw grid_error(os.str());
  }

  projector_ = basis_ * basis_.transpose() * grid.quad.asDiagonal();
}

VelocityFunction MacroBasis::element(int a) const {
  if (a < 0 || a >= count()) throw input_error("MacroBasis: index out of range");
  VelocityFunction out;
  out.grid = grid_;
  out.values = basis_.col(a).cast<Complex>();
  return out;
}

Projection project_P(const VelocityFunction& f, const MacroBasis& basis) {
  if (f.grid != &basis.grid())
    throw input_error("project_P: function grid differs from basis grid");
  const VelocityGrid& g = basis.grid();
  const int n = g.dim;

  // coeff_a = integral of f e_a dv (basis is real-valued).
  CVec coeff = basis.matrix().transpose() *
               (g.quad.array().cast<Complex>() * f.values.array()).matrix();

  Projection out;
  out.pf.grid = f.grid;
  out.pf.values = basis.matrix().cast<Complex>() * coeff;
  out.a = coeff(0);
  out.b = coeff.segment(1, n);
  out.c = coeff(n + 1);
  return out;
}

}  // namespace kdecay
