#include "kdecay/orbit.hpp"

#include <algorithm>
#include <map>

namespace kdecay {

AxisSymmetry::AxisSymmetry(const VelocityGrid& grid, int distinguished_axis)
    : grid_(&grid), axis_(distinguished_axis) {
  if (axis_ < 0 || axis_ >= grid.dim)
    throw input_error("AxisSymmetry: distinguished axis out of range");

  const int npts = grid.points_per_axis;
  const Eigen::Index total = grid.size();
  orbit_of_.resize(total);

  // Canonical key: distinguished index, then the sorted magnitude classes of
  // the remaining axes.  The axis is symmetric, so npts-1-i indexes -v_i.
  std::map<std::vector<int>, int> seen;
  std::vector<int> idx(grid.dim);
  std::vector<int> key;
  for (Eigen::Index k = 0; k < total; ++k) {
    grid.unravel(k, idx.data());
    key.clear();
    key.push_back(idx[axis_]);
    for (int a = 0; a < grid.dim; ++a) {
      if (a == axis_) continue;
      key.push_back(std::min(idx[a], npts - 1 - idx[a]));
    }
    std::sort(key.begin() + 1, key.end());
    auto [it, inserted] = seen.try_emplace(key, static_cast<int>(rep_.size()));
    if (inserted) rep_.push_back(k);
    orbit_of_(k) = it->second;
  }

  const Eigen::Index m = rep_.size();
  orbit_quad_ = Vec::Zero(m);
  for (Eigen::Index k = 0; k < total; ++k) orbit_quad_(orbit_of_(k)) += grid.quad(k);
  orbit_bracket_.resize(m);
  orbit_vdist_.resize(m);
  for (Eigen::Index o = 0; o < m; ++o) {
    orbit_bracket_(o) = grid.bracket(rep_[o]);
    orbit_vdist_(o) = grid.nodes(rep_[o], axis_);
  }
}

CVec AxisSymmetry::to_orbit(const CVec& grid_values, double* max_deviation) const {
  if (grid_values.size() != grid_->size())
    throw input_error("AxisSymmetry::to_orbit: size mismatch");
  const Eigen::Index m = orbit_count();
  CVec out(m);
  for (Eigen::Index o = 0; o < m; ++o) out(o) = grid_values(rep_[o]);
  if (max_deviation != nullptr) {
    double dev = 0.0;
    for (Eigen::Index k = 0; k < grid_values.size(); ++k)
      dev = std::max(dev, std::abs(grid_values(k) - out(orbit_of_(k))));
    *max_deviation = dev;
  }
  return out;
}

CVec AxisSymmetry::from_orbit(const CVec& orbit_values) const {
  if (orbit_values.size() != orbit_count())
    throw input_error("AxisSymmetry::from_orbit: size mismatch");
  CVec out(grid_->size());
  for (Eigen::Index k = 0; k < out.size(); ++k) out(k) = orbit_values(orbit_of_(k));
  return out;
}

namespace {
template <class MatType>
MatType reduce_impl(const MatType& a, const std::vector<Eigen::Index>& rep,
                    const Eigen::VectorXi& orbit_of) {
  const Eigen::Index m = static_cast<Eigen::Index>(rep.size());
  MatType out = MatType::Zero(m, m);
  for (Eigen::Index o = 0; o < m; ++o) {
    const Eigen::Index row = rep[o];
    for (Eigen::Index kp = 0; kp < a.cols(); ++kp)
      out(o, orbit_of(kp)) += a(row, kp);
  }
  return out;
}
}  // namespace

CMat AxisSymmetry::reduce_operator(const CMat& node_matrix) const {
  if (node_matrix.rows() != grid_->size() || node_matrix.cols() != grid_->size())
    throw input_error("AxisSymmetry::reduce_operator: shape mismatch");
  return reduce_impl(node_matrix, rep_, orbit_of_);
}

Mat AxisSymmetry::reduce_operator(const Mat& node_matrix) const {
  if (node_matrix.rows() != grid_->size() || node_matrix.cols() != grid_->size())
    throw input_error("AxisSymmetry::reduce_operator: shape mismatch");
  return reduce_impl(node_matrix, rep_, orbit_of_);
}

double radial_asymmetry(const VelocityGrid& grid, const CVec& values) {
  if (values.size() != grid.size())
    throw input_error("radial_asymmetry: size mismatch");
  const int npts = grid.points_per_axis;
  const int dim = grid.dim;
  const Eigen::Index total = grid.size();

  std::vector<Eigen::Index> stride(dim);
  Eigen::Index s = 1;
  for (int a = 0; a < dim; ++a) {
    stride[a] = s;
    s *= npts;
  }

  std::vector<int> idx(dim), jdx(dim);
  double dev = 0.0;

  // Generators: each single-axis sign flip, plus each adjacent transposition.
  for (int gen = 0; gen < 2 * dim - 1; ++gen) {
    for (Eigen::Index k = 0; k < total; ++k) {
      grid.unravel(k, idx.data());
      for (int a = 0; a < dim; ++a) jdx[a] = idx[a];
      if (gen < dim) {
        jdx[gen] = npts - 1 - jdx[gen];
      } else {
        std::swap(jdx[gen - dim], jdx[gen - dim + 1]);
      }
      Eigen::Index kp = 0;
      for (int a = 0; a < dim; ++a) kp += stride[a] * jdx[a];
      dev = std::max(dev, std::abs(values(k) - values(kp)));
    }
  }
  return dev;
}

}  // namespace kdecay
