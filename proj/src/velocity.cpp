#include "kdecay/velocity.hpp"

#include <cmath>
#include <sstream>

namespace kdecay {

namespace {

// Gauss-Hermite rule for weight exp(-x^2) via the Golub-Welsch eigenvalue
// method on the symmetric Jacobi matrix.
void hermite_rule(int npts, Vec* x, Vec* w) {
  Mat jac = Mat::Zero(npts, npts);
  for (int k = 1; k < npts; ++k) {
    const double b = std::sqrt(0.5 * k);
    jac(k - 1, k) = b;
    jac(k, k - 1) = b;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(jac);
  if (es.info() != Eigen::Success)
    throw numeric_error("hermite_rule: Jacobi eigensolve failed");
  *x = es.eigenvalues();
  w->resize(npts);
  const double sqrt_pi = std::sqrt(pi);
  for (int i = 0; i < npts; ++i) {
    const double v0 = es.eigenvectors()(0, i);
    (*w)(i) = sqrt_pi * v0 * v0;
  }
}

// Derivative of the quadratic Lagrange interpolant through
// (x0,x1,x2), evaluated at xe.
void lagrange3_deriv(double x0, double x1, double x2, double xe, double* c) {
  c[0] = ((xe - x1) + (xe - x2)) / ((x0 - x1) * (x0 - x2));
  c[1] = ((xe - x0) + (xe - x2)) / ((x1 - x0) * (x1 - x2));
  c[2] = ((xe - x0) + (xe - x1)) / ((x2 - x0) * (x2 - x1));
}

Mat build_axis_derivative(const Vec& axis) {
  const int npts = static_cast<int>(axis.size());
  Mat d1 = Mat::Zero(npts, npts);
  double c[3];
  for (int i = 0; i < npts; ++i) {
    int base = std::clamp(i - 1, 0, npts - 3);
    lagrange3_deriv(axis(base), axis(base + 1), axis(base + 2), axis(i), c);
    for (int j = 0; j < 3; ++j) d1(i, base + j) = c[j];
  }
  return d1;
}

void validate_moments(const VelocityGrid& g) {
  const double tol = 1e-8;
  const int n = g.dim;
  auto fail = [&](const std::string& what, double got, double want) {
    std::ostringstream os;
    os << "build_hermite_grid: moment check '" << what << "' got " << got
       << ", expected " << want << " (tol " << tol << ")";
    throw grid_error(os.str());
  };

  const double mass = g.quad.dot(g.mu);
  if (std::abs(mass - 1.0) > tol) fail("mass", mass, 1.0);

  for (int a = 0; a < n; ++a) {
    const double m1 = (g.quad.array() * g.mu.array() * g.nodes.col(a).array()).sum();
    if (std::abs(m1) > tol) fail("mean", m1, 0.0);
  }
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      const double m2 = (g.quad.array() * g.mu.array() * g.nodes.col(a).array() *
                         g.nodes.col(b).array())
                            .sum();
      const double want = (a == b) ? 1.0 : 0.0;
      if (std::abs(m2 - want) > tol) fail("covariance", m2, want);
    }
  }
  for (int a = 0; a < n; ++a) {
    const double m3 =
        (g.quad.array() * g.mu.array() * g.nodes.col(a).array().pow(3)).sum();
    if (std::abs(m3) > tol) fail("third moment", m3, 0.0);
    const double m4 =
        (g.quad.array() * g.mu.array() * g.nodes.col(a).array().pow(4)).sum();
    if (std::abs(m4 - 3.0) > tol) fail("fourth moment", m4, 3.0);
  }
  const double r4 = (g.quad.array() * g.mu.array() * g.vsq.array().square()).sum();
  const double want_r4 = static_cast<double>(n) * (n + 2);
  if (std::abs(r4 - want_r4) > tol) fail("|v|^4", r4, want_r4);
}

}  // namespace

void VelocityGrid::unravel(Eigen::Index k, int* idx) const {
  for (int a = 0; a < dim; ++a) {
    idx[a] = static_cast<int>(k % points_per_axis);
    k /= points_per_axis;
  }
}

VelocityGrid build_hermite_grid(int dim, int points_per_axis, double scaling) {
  if (dim < 1 || dim > 4)
    throw input_error("build_hermite_grid: dim must be in [1,4]");
  if (points_per_axis < 3 || points_per_axis > 128)
    throw input_error("build_hermite_grid: points_per_axis must be in [3,128]");
  if (!(scaling > 0.0) || !std::isfinite(scaling))
    throw input_error("build_hermite_grid: scaling must be positive");

  Eigen::Index total = 1;
  for (int a = 0; a < dim; ++a) total *= points_per_axis;
  if (total > 300000)
    throw input_error("build_hermite_grid: tensor grid too large");

  VelocityGrid g;
  g.dim = dim;
  g.points_per_axis = points_per_axis;
  g.scaling = scaling;

  Vec x, w;
  hermite_rule(points_per_axis, &x, &w);
  const double stretch = std::sqrt(2.0) * scaling;
  g.axis = stretch * x;
  g.axis_weight.resize(points_per_axis);
  for (int i = 0; i < points_per_axis; ++i)
    g.axis_weight(i) = stretch * w(i) * std::exp(x(i) * x(i));

  g.nodes.resize(total, dim);
  g.quad.resize(total);
  std::vector<int> idx(dim);
  for (Eigen::Index k = 0; k < total; ++k) {
    g.unravel(k, idx.data());
    double q = 1.0;
    for (int a = 0; a < dim; ++a) {
      g.nodes(k, a) = g.axis(idx[a]);
      q *= g.axis_weight(idx[a]);
    }
    g.quad(k) = q;
  }

  g.vsq = g.nodes.rowwise().squaredNorm();
  g.bracket = (g.vsq.array() + 1.0).sqrt();
  const double norm_const = std::pow(2.0 * pi, -0.5 * dim);
  g.mu = norm_const * (-0.5 * g.vsq.array()).exp();
  g.sqrt_mu = g.mu.array().sqrt();
  g.d1_ = build_axis_derivative(g.axis);

  validate_moments(g);
  return g;
}

VelocityFunction make_function(const VelocityGrid& grid,
                               const std::function<double(const Vec&)>& f) {
  VelocityFunction out;
  out.grid = &grid;
  out.values.resize(grid.size());
  for (Eigen::Index k = 0; k < grid.size(); ++k)
    out.values(k) = Complex(f(grid.nodes.row(k).transpose()), 0.0);
  return out;
}

VelocityFunction make_function_c(const VelocityGrid& grid,
                                 const std::function<Complex(const Vec&)>& f) {
  VelocityFunction out;
  out.grid = &grid;
  out.values.resize(grid.size());
  for (Eigen::Index k = 0; k < grid.size(); ++k)
    out.values(k) = f(grid.nodes.row(k).transpose());
  return out;
}

VelocityFunction from_values(const VelocityGrid& grid, const CVec& values) {
  if (values.size() != grid.size())
    throw input_error("from_values: size mismatch with grid");
  VelocityFunction out;
  out.grid = &grid;
  out.values = values;
  return out;
}

namespace {
void check_same_grid(const VelocityFunction& f, const VelocityFunction& g) {
  if (f.grid == nullptr || g.grid == nullptr || f.grid != g.grid)
    throw input_error("velocity functions must share one grid");
}
}  // namespace

Complex weighted_inner(const VelocityFunction& f, const VelocityFunction& g,
                       double ell) {
  check_same_grid(f, g);
  const VelocityGrid& gr = *f.grid;
  Vec wq = gr.quad;
  if (ell != 0.0) wq = wq.array() * gr.bracket.array().pow(ell);
  Complex acc(0.0, 0.0);
  for (Eigen::Index k = 0; k < gr.size(); ++k)
    acc += wq(k) * f.values(k) * std::conj(g.values(k));
  return acc;
}

double weighted_norm2(const VelocityFunction& f, double ell) {
  if (f.grid == nullptr) throw input_error("weighted_norm2: unbound function");
  const VelocityGrid& gr = *f.grid;
  Vec wq = gr.quad;
  if (ell != 0.0) wq = wq.array() * gr.bracket.array().pow(ell);
  double acc = 0.0;
  for (Eigen::Index k = 0; k < gr.size(); ++k)
    acc += wq(k) * std::norm(f.values(k));
  return acc;
}

double metric_d(const Vec& v, const Vec& vp) {
  const double dv2 = (v - vp).squaredNorm();
  const double dr = v.squaredNorm() - vp.squaredNorm();
  return std::sqrt(dv2 + 0.25 * dr * dr);
}

namespace {

// Pair loop shared by both anisotropic norms.  wk weights the unprimed node
// and wkp the primed node; both already include quadrature weights.  The
// diagonal pair is skipped and only pairs with d(v,v') <= 1 contribute.
double nsg_pair_sum(const VelocityFunction& f, const KernelParams& p,
                    const Vec& wk, const Vec& wkp) {
  const VelocityGrid& g = *f.grid;
  const Eigen::Index total = g.size();
  const double expo = g.dim + 2.0 * p.s;
  double acc = 0.0;
  for (Eigen::Index k = 0; k < total; ++k) {
    const double vk2 = g.vsq(k);
    for (Eigen::Index kp = 0; kp < total; ++kp) {
      if (kp == k) continue;
      double dv2 = 0.0;
      for (int a = 0; a < g.dim; ++a) {
        const double d = g.nodes(kp, a) - g.nodes(k, a);
        dv2 += d * d;
      }
      const double dr = vk2 - g.vsq(kp);
      const double d2 = dv2 + 0.25 * dr * dr;
      if (d2 > 1.0) continue;
      const double diff2 = std::norm(f.values(kp) - f.values(k));
      acc += wk(k) * wkp(kp) * diff2 / std::pow(d2, 0.5 * expo);
    }
  }
  return acc;
}

void check_nsg_args(const VelocityFunction& f, const KernelParams& p) {
  if (f.grid == nullptr) throw input_error("nsg_norm: unbound function");
  if (f.grid->dim != p.n) throw input_error("nsg_norm: dimension mismatch");
}

}  // namespace

double nsg_norm(const VelocityFunction& f, const KernelParams& p) {
  check_nsg_args(f, p);
  const VelocityGrid& g = *f.grid;
  const double gp = p.weight_power();
  const double l2part = weighted_norm2(f, gp);
  // The pair weight (<v><v'>)^{(gamma+2s+1)/2} splits evenly over the nodes.
  Vec half = g.quad.array() * g.bracket.array().pow(0.5 * (gp + 1.0));
  return std::sqrt(l2part + nsg_pair_sum(f, p, half, half));
}

double nsg_norm(const VelocityFunction& f, const KernelParams& p, double ell) {
  check_nsg_args(f, p);
  const VelocityGrid& g = *f.grid;
  const double gp = p.weight_power();
  const double l2part = weighted_norm2(f, gp + 2.0 * ell);
  // Here the whole weight <v>^{gamma+2s+1} <v>^{2 ell} rides on the
  // unprimed node.
  Vec wk = g.quad.array() * g.bracket.array().pow(gp + 1.0 + 2.0 * ell);
  return std::sqrt(l2part + nsg_pair_sum(f, p, wk, g.quad));
}

VelocityFunction axis_derivative(const VelocityFunction& f, int axis) {
  if (f.grid == nullptr) throw input_error("axis_derivative: unbound function");
  const VelocityGrid& g = *f.grid;
  if (axis < 0 || axis >= g.dim)
    throw input_error("axis_derivative: axis out of range");
  const int npts = g.points_per_axis;
  const Mat& d1 = g.axis_derivative();

  Eigen::Index stride = 1;
  for (int a = 0; a < axis; ++a) stride *= npts;
  const Eigen::Index total = g.size();
  const Eigen::Index block = stride * npts;

  VelocityFunction out;
  out.grid = f.grid;
  out.values = CVec::Zero(total);
  for (Eigen::Index start = 0; start < total; start += block) {
    for (Eigen::Index off = 0; off < stride; ++off) {
      for (int i = 0; i < npts; ++i) {
        Complex acc(0.0, 0.0);
        for (int j = 0; j < npts; ++j) {
          const double c = d1(i, j);
          if (c != 0.0) acc += c * f.values(start + off + stride * j);
        }
        out.values(start + off + stride * i) = acc;
      }
    }
  }
  return out;
}

VelocityFunction multi_derivative(const VelocityFunction& f,
                                  const std::vector<int>& beta) {
  if (f.grid == nullptr) throw input_error("multi_derivative: unbound function");
  if (static_cast<int>(beta.size()) != f.grid->dim)
    throw input_error("multi_derivative: beta length mismatch");
  VelocityFunction cur = f;
  for (int a = 0; a < f.grid->dim; ++a)
    for (int rep = 0; rep < beta[a]; ++rep) cur = axis_derivative(cur, a);
  return cur;
}

std::vector<std::vector<int>> multi_indices_up_to(int dim, int m) {
  std::vector<std::vector<int>> out;
  std::vector<int> beta(dim, 0);
  std::function<void(int, int)> rec = [&](int axis, int remaining) {
    if (axis == dim - 1) {
      for (int b = 0; b <= remaining; ++b) {
        beta[axis] = b;
        out.push_back(beta);
      }
      beta[axis] = 0;
      return;
    }
    for (int b = 0; b <= remaining; ++b) {
      beta[axis] = b;
      rec(axis + 1, remaining - b);
    }
    beta[axis] = 0;
  };
  if (dim == 0) return out;
  rec(0, m);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    int sa = 0, sb = 0;
    for (int x : a) sa += x;
    for (int x : b) sb += x;
    if (sa != sb) return sa < sb;
    return a < b;
  });
  return out;
}

double sobolev_norm2(const VelocityFunction& f, int m, double ell) {
  if (f.grid == nullptr) throw input_error("sobolev_norm2: unbound function");
  if (m < 0 || m > 2) throw input_error("sobolev_norm2: m must be 0, 1, or 2");
  double acc = 0.0;
  for (const auto& beta : multi_indices_up_to(f.grid->dim, m))
    acc += weighted_norm2(multi_derivative(f, beta), ell);
  return acc;
}

}  // namespace kdecay
