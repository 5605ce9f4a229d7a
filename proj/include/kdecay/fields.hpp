#pragma once

#include <functional>

#include "kdecay/velocity.hpp"

namespace kdecay {

// Scalar field on a periodic box [0, box)^dim, carried primarily in spectral
// form.  Frequencies are xi = k / box with integer k per axis in
// [-pts/2, pts/2), matching the transform pair
//   f(x) = sum_k fhat(k) exp(2 pi i xi_k . x).
// The spatial L^p norms use the sample rectangle rule on the box, and the
// L^2 norm can equivalently be read off the coefficients (Plancherel).
class ScalarField {
 public:
  ScalarField(int dim, int pts_per_axis, double box);

  int dim() const { return dim_; }
  int pts() const { return pts_; }
  double box() const { return box_; }
  Eigen::Index size() const { return coeff_.size(); }

  const CVec& spectral() const { return coeff_; }
  void set_spectral(const CVec& coeff);
  void set_spatial(const CVec& values);  // runs a forward transform
  CVec spatial() const;                  // inverse transform of coefficients

  // Integer frequency components of a flat coefficient index.  Coefficients
  // sit in FFTW row-major order, so the last axis is the fastest one.
  void freq_index(Eigen::Index flat, int* k) const;
  double freq_norm(Eigen::Index flat) const;  // |xi|

  // Pointwise multiplier m(|xi|) in frequency space.
  ScalarField radial_multiplier(const std::function<double(double)>& m) const;

  double l2_norm() const;               // Plancherel
  double lp_norm(double p) const;       // p in [1, inf], spatial rule
  double nyquist() const;               // largest representable |xi| per axis

 private:
  int dim_;
  int pts_;
  double box_;
  CVec coeff_;
};

// Builds a field from a radial spectral profile F(|xi|).
ScalarField scalar_from_profile(int dim, int pts, double box,
                                const std::function<double(double)>& profile);

// Frequency-side field, radial in x-frequency: values live on radial nodes
// kappa_r > 0 with the surface-weighted measure
//   integral over R^n dxi  ->  sum_r weight_r,
//   weight_r = |S^{n-1}| kappa_r^{n-1} trapezoid(kappa_r).
// Each node carries either a velocity-grid function (vgrid != nullptr, one
// row of `values` per node) or a bare scalar amplitude (vgrid == nullptr).
class RadialMixedField {
 public:
  RadialMixedField(int ambient_dim, const Vec& kappa_nodes,
                   const VelocityGrid* vgrid);

  int ambient_dim() const { return dim_; }
  const VelocityGrid* vgrid() const { return vgrid_; }
  Eigen::Index kappa_count() const { return kappa_.size(); }
  const Vec& kappa() const { return kappa_; }
  const Vec& weight() const { return weight_; }

  // kappa_count x velocity-size (or x 1) coefficient block.
  CMat& values() { return values_; }
  const CMat& values() const { return values_; }

  // Per-node squared content |f(kappa_r)|^2 in the chosen velocity norm:
  // L^2_ell of the velocity slice, or |amplitude|^2 for scalar nodes.
  Vec node_norm2(double ell = 0.0) const;

  // Squared norm over frequency space: sum_r weight_r node_norm2_r,
  // optionally with an extra |xi|^{2m} multiplier (Sobolev index m).
  double norm2(double ell = 0.0, double sobolev_m = 0.0) const;

  // Row scaling by m(kappa_r).
  RadialMixedField radial_multiplier(const std::function<double(double)>& m) const;

 private:
  int dim_;
  Vec kappa_;
  Vec weight_;
  const VelocityGrid* vgrid_;
  CMat values_;
};

// Surface measure of the unit sphere in R^n.
double sphere_area(int n);

// Geometric node ladder in [lo, hi].
Vec geometric_nodes(double lo, double hi, int count);

}  // namespace kdecay
