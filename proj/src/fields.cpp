#include "kdecay/fields.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

namespace kdecay {

namespace {

std::mutex fftw_mutex;

// FFTW transform of a coefficient block; sign -1 is the forward (spatial to
// frequency, then caller divides by the point count), +1 the inverse.
CVec fft_nd(const CVec& in, int dim, int pts, int sign) {
  CVec out(in.size());
  CVec work = in;
  std::vector<int> dims(dim, pts);
  {
    // Plan creation mutates global FFTW state; execution does not.
    std::lock_guard<std::mutex> guard(fftw_mutex);
    fftw_plan plan = fftw_plan_dft(
        dim, dims.data(), reinterpret_cast<fftw_complex*>(work.data()),
        reinterpret_cast<fftw_complex*>(out.data()), sign, FFTW_ESTIMATE);
    if (plan == nullptr) throw numeric_error("fft_nd: planning failed");
    fftw_execute(plan);
    fftw_destroy_plan(plan);
  }
  return out;
}

}  // namespace

ScalarField::ScalarField(int dim, int pts_per_axis, double box)
    : dim_(dim), pts_(pts_per_axis), box_(box) {
  if (dim < 1 || dim > 3) throw input_error("ScalarField: dim must be in [1,3]");
  if (pts_per_axis < 4 || pts_per_axis % 2 != 0)
    throw input_error("ScalarField: pts_per_axis must be even and >= 4");
  if (!(box > 0.0)) throw input_error("ScalarField: box must be positive");
  Eigen::Index total = 1;
  for (int a = 0; a < dim; ++a) total *= pts_per_axis;
  if (total > (1 << 21)) throw input_error("ScalarField: grid too large");
  coeff_ = CVec::Zero(total);
}

void ScalarField::set_spectral(const CVec& coeff) {
  if (coeff.size() != coeff_.size())
    throw input_error("ScalarField::set_spectral: size mismatch");
  coeff_ = coeff;
}

void ScalarField::set_spatial(const CVec& values) {
  if (values.size() != coeff_.size())
    throw input_error("ScalarField::set_spatial: size mismatch");
  coeff_ = fft_nd(values, dim_, pts_, -1) / static_cast<double>(coeff_.size());
}

CVec ScalarField::spatial() const { return fft_nd(coeff_, dim_, pts_, +1); }

void ScalarField::freq_index(Eigen::Index flat, int* k) const {
  // FFTW uses row-major layout: the LAST axis is fastest there.  We store
  // coefficients in FFTW order and report axis 0 as the slowest to match.
  for (int a = dim_ - 1; a >= 0; --a) {
    int raw = static_cast<int>(flat % pts_);
    flat /= pts_;
    k[a] = raw < pts_ / 2 ? raw : raw - pts_;
  }
}

double ScalarField::freq_norm(Eigen::Index flat) const {
  int k[3] = {0, 0, 0};
  freq_index(flat, k);
  double acc = 0.0;
  for (int a = 0; a < dim_; ++a) {
    const double x = static_cast<double>(k[a]) / box_;
    acc += x * x;
  }
  return std::sqrt(acc);
}

ScalarField ScalarField::radial_multiplier(
    const std::function<double(double)>& m) const {
  ScalarField out = *this;
  for (Eigen::Index i = 0; i < coeff_.size(); ++i)
    out.coeff_(i) = coeff_(i) * m(freq_norm(i));
  return out;
}

double ScalarField::l2_norm() const {
  const double cell = std::pow(box_, dim_);
  return std::sqrt(cell * coeff_.squaredNorm());
}

double ScalarField::lp_norm(double p) const {
  if (p < 1.0) throw input_error("ScalarField::lp_norm: p must be >= 1");
  const CVec values = spatial();
  if (std::isinf(p)) return values.cwiseAbs().maxCoeff();
  const double cell = std::pow(box_ / pts_, dim_);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i)
    acc += std::pow(std::abs(values(i)), p);
  return std::pow(cell * acc, 1.0 / p);
}

double ScalarField::nyquist() const { return (pts_ / 2) / box_; }

ScalarField scalar_from_profile(int dim, int pts, double box,
                                const std::function<double(double)>& profile) {
  ScalarField f(dim, pts, box);
  CVec coeff(f.size());
  for (Eigen::Index i = 0; i < f.size(); ++i) coeff(i) = profile(f.freq_norm(i));
  f.set_spectral(coeff);
  return f;
}

double sphere_area(int n) {
  if (n < 1) throw input_error("sphere_area: n must be >= 1");
  return 2.0 * std::pow(pi, 0.5 * n) / std::tgamma(0.5 * n);
}

Vec geometric_nodes(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > lo)) throw input_error("geometric_nodes: bad range");
  if (count < 2) throw input_error("geometric_nodes: need at least 2 nodes");
  Vec out(count);
  const double step = std::log(hi / lo) / (count - 1);
  for (int i = 0; i < count; ++i) out(i) = lo * std::exp(step * i);
  out(count - 1) = hi;
  return out;
}

RadialMixedField::RadialMixedField(int ambient_dim, const Vec& kappa_nodes,
                                   const VelocityGrid* vgrid)
    : dim_(ambient_dim), kappa_(kappa_nodes), vgrid_(vgrid) {
  if (dim_ < 1 || dim_ > 4)
    throw input_error("RadialMixedField: ambient dim must be in [1,4]");
  if (kappa_.size() < 2)
    throw input_error("RadialMixedField: need at least 2 radial nodes");
  for (Eigen::Index r = 0; r + 1 < kappa_.size(); ++r)
    if (!(kappa_(r) < kappa_(r + 1)))
      throw input_error("RadialMixedField: kappa nodes must increase");
  if (!(kappa_(0) >= 0.0))
    throw input_error("RadialMixedField: kappa nodes must be nonnegative");

  // Trapezoid weights in kappa times the spherical factor.
  const Eigen::Index m = kappa_.size();
  weight_.resize(m);
  const double area = sphere_area(dim_);
  for (Eigen::Index r = 0; r < m; ++r) {
    double dk;
    if (r == 0)
      dk = 0.5 * (kappa_(1) - kappa_(0));
    else if (r == m - 1)
      dk = 0.5 * (kappa_(m - 1) - kappa_(m - 2));
    else
      dk = 0.5 * (kappa_(r + 1) - kappa_(r - 1));
    weight_(r) = area * std::pow(kappa_(r), dim_ - 1) * dk;
  }

  const Eigen::Index cols = vgrid_ != nullptr ? vgrid_->size() : 1;
  values_ = CMat::Zero(m, cols);
}

Vec RadialMixedField::node_norm2(double ell) const {
  const Eigen::Index m = kappa_.size();
  Vec out(m);
  if (vgrid_ == nullptr) {
    for (Eigen::Index r = 0; r < m; ++r) out(r) = std::norm(values_(r, 0));
    return out;
  }
  Vec wq = vgrid_->quad;
  if (ell != 0.0) wq = wq.array() * vgrid_->bracket.array().pow(ell);
  for (Eigen::Index r = 0; r < m; ++r) {
    double acc = 0.0;
    for (Eigen::Index k = 0; k < values_.cols(); ++k)
      acc += wq(k) * std::norm(values_(r, k));
    out(r) = acc;
  }
  return out;
}

double RadialMixedField::norm2(double ell, double sobolev_m) const {
  const Vec node = node_norm2(ell);
  double acc = 0.0;
  for (Eigen::Index r = 0; r < kappa_.size(); ++r) {
    double factor = weight_(r);
    if (sobolev_m != 0.0) factor *= std::pow(kappa_(r), 2.0 * sobolev_m);
    acc += factor * node(r);
  }
  return acc;
}

RadialMixedField RadialMixedField::radial_multiplier(
    const std::function<double(double)>& m) const {
  RadialMixedField out = *this;
  for (Eigen::Index r = 0; r < kappa_.size(); ++r)
    out.values_.row(r) *= m(kappa_(r));
  return out;
}

}  // namespace kdecay
