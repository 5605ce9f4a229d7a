#pragma once

#include <functional>

#include "kdecay/common.hpp"
#include "kdecay/kernel_params.hpp"

namespace kdecay {

// Tensor-product Gauss-Hermite grid adapted to the Gaussian weight
// exp(-|v|^2/2).  Quadrature sums Q[k] f(v_k) reproduce integrals of
// p(v) exp(-|v|^2/2) exactly (at scaling 1) for polynomials p of degree
// up to 2*points_per_axis - 1 per axis.
//
// Node ordering is lexicographic with axis 0 fastest:
//   k = i_0 + P*i_1 + P^2*i_2 + ...  with P = points_per_axis.
class VelocityGrid {
 public:
  int dim = 0;
  int points_per_axis = 0;
  double scaling = 1.0;

  Vec axis;         // 1-d nodes, ascending
  Vec axis_weight;  // 1-d dv-integration weights
  Mat nodes;        // size() x dim node coordinates
  Vec quad;         // size() dv-integration weights (tensor products)

  Vec vsq;      // |v|^2 at each node
  Vec bracket;  // <v> = sqrt(1+|v|^2)
  Vec mu;       // Maxwellian (2 pi)^(-dim/2) exp(-|v|^2/2)
  Vec sqrt_mu;

  Eigen::Index size() const { return nodes.rows(); }

  // Decompose flat index into per-axis indices.
  void unravel(Eigen::Index k, int* idx) const;

  // 1-d derivative matrix (3-point Lagrange stencils on the
  // non-uniform axis; one-sided at the ends).
  const Mat& axis_derivative() const { return d1_; }

  friend VelocityGrid build_hermite_grid(int dim, int points_per_axis,
                                         double scaling);

 private:
  Mat d1_;
};

VelocityGrid build_hermite_grid(int dim, int points_per_axis,
                                double scaling = 1.0);

// Complex-valued grid function, non-owning view of its grid.
struct VelocityFunction {
  const VelocityGrid* grid = nullptr;
  CVec values;

  Eigen::Index size() const { return values.size(); }
};

VelocityFunction make_function(const VelocityGrid& grid,
                               const std::function<double(const Vec&)>& f);
VelocityFunction make_function_c(const VelocityGrid& grid,
                                 const std::function<Complex(const Vec&)>& f);
VelocityFunction from_values(const VelocityGrid& grid, const CVec& values);

// Sesquilinear weighted pairing  integral of <v>^ell f conj(g) dv,
// conjugating the second argument.
Complex weighted_inner(const VelocityFunction& f, const VelocityFunction& g,
                       double ell = 0.0);

// |f|^2 in L^2_ell, i.e. integral of <v>^ell |f|^2 dv.
double weighted_norm2(const VelocityFunction& f, double ell = 0.0);

// Anisotropic metric on the lifted paraboloid:
// d(v,v') = sqrt(|v-v'|^2 + (|v|^2-|v'|^2)^2/4).
double metric_d(const Vec& v, const Vec& vp);

// Unweighted anisotropic norm (returns the norm, not its square):
//   |f|^2 = |f|^2_{L^2_{gamma+2s}}
//         + sum over node pairs with d <= 1 of
//           (<v><v'>)^{(gamma+2s+1)/2} |f'-f|^2 / d^{n+2s}.
// The diagonal pair k = k' is excluded.
double nsg_norm(const VelocityFunction& f, const KernelParams& p);

// Weighted variant: the L^2 part is |<v>^ell f|^2_{L^2_{gamma+2s}} and the
// pair weight is <v>^{gamma+2s+1} <v>^{2 ell}, both attached to the
// unprimed variable.  Coincides with the intent of the unweighted form at
// ell = 0 only up to bounded factors; the two are kept separate on purpose.
double nsg_norm(const VelocityFunction& f, const KernelParams& p, double ell);

// Finite-difference velocity derivative along one axis.
VelocityFunction axis_derivative(const VelocityFunction& f, int axis);

// Derivative for a multi-index beta (repeated axis derivatives).
VelocityFunction multi_derivative(const VelocityFunction& f,
                                  const std::vector<int>& beta);

// Weighted Sobolev norm squared: sum over |beta| <= m of
// integral <v>^ell |d^beta f|^2 dv, derivatives by finite differences.
double sobolev_norm2(const VelocityFunction& f, int m, double ell = 0.0);

// All multi-indices beta in dimension dim with |beta| <= m, graded order.
std::vector<std::vector<int>> multi_indices_up_to(int dim, int m);

}  // namespace kdecay
