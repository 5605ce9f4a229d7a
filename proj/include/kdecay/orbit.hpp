#pragma once

#include "kdecay/velocity.hpp"

namespace kdecay {

// Restriction of tensor-grid functions to the subspace invariant under sign
// flips of every axis except one distinguished axis, and permutations of
// those axes among themselves.  The transport direction v . e_dist and any
// radial function lie in this class, and both the model collision operator
// and the transport multiplier commute with the group, so the reduced
// dynamics reproduces the full one exactly on invariant data.
//
// Orbits are indexed in order of first appearance in flat node order, which
// fixes a deterministic representative per orbit.
class AxisSymmetry {
 public:
  AxisSymmetry(const VelocityGrid& grid, int distinguished_axis);

  const VelocityGrid& grid() const { return *grid_; }
  int distinguished_axis() const { return axis_; }
  Eigen::Index orbit_count() const { return rep_.size(); }

  // Representative node index of each orbit.
  Eigen::Index representative(Eigen::Index orbit) const { return rep_[orbit]; }

  // Total quadrature weight carried by each orbit.
  const Vec& orbit_quad() const { return orbit_quad_; }

  // Values of <v> and of the distinguished coordinate at representatives.
  const Vec& orbit_bracket() const { return orbit_bracket_; }
  const Vec& orbit_vdist() const { return orbit_vdist_; }

  // Sample grid values at orbit representatives.  If max_deviation is given,
  // it receives the largest |f(k) - f(rep(orbit(k)))| over all nodes, a
  // measure of how far f is from invariant.
  CVec to_orbit(const CVec& grid_values, double* max_deviation = nullptr) const;

  // Expand orbit values back to the full grid (exact inverse on invariants).
  CVec from_orbit(const CVec& orbit_values) const;

  // Reduce an operator that commutes with the symmetry:
  //   A_red(o, o') = sum over k' in orbit o' of A(rep_o, k').
  // Exact on invariant inputs.
  CMat reduce_operator(const CMat& node_matrix) const;
  Mat reduce_operator(const Mat& node_matrix) const;

 private:
  const VelocityGrid* grid_;
  int axis_;
  std::vector<Eigen::Index> rep_;
  Eigen::VectorXi orbit_of_;
  Vec orbit_quad_;
  Vec orbit_bracket_;
  Vec orbit_vdist_;
};

// Largest deviation of f from full radial symmetry, probed over the signed
// axis permutations of the grid (axis swaps and sign flips).
double radial_asymmetry(const VelocityGrid& grid, const CVec& values);

}  // namespace kdecay
