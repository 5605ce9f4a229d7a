#include "kdecay/spectral.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "kdecay/eig.hpp"

namespace kdecay {

namespace {

double slope_with_intercept(const std::vector<double>& x,
                            const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double var = sxx - sx * sx / n;
  if (var <= 0) throw numeric_error("slope fit: degenerate abscissae");
  return (sxy - sx * sy / n) / var;
}

double inf_norm(const CMat& a) { return a.cwiseAbs().rowwise().sum().maxCoeff(); }

void require_hard(const KernelParams& params, const char* who) {
  if (!params.hard())
    throw input_error(std::string(who) +
                      ": the eigenvalue expansion needs the spectral gap of "
                      "the hard regime; soft-regime operators are rejected");
}

// Adjugate by cofactor expansion; the dispersion system is (n+2)-square, so
// the minors stay tiny.
CMat cofactor_adjugate(const CMat& f) {
  const Eigen::Index m = f.rows();
  CMat adj(m, m);
  if (m == 1) {
    adj(0, 0) = 1.0;
    return adj;
  }
  CMat minor(m - 1, m - 1);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) {
      for (Eigen::Index r = 0, rr = 0; r < m; ++r) {
        if (r == i) continue;
        for (Eigen::Index c = 0, cc = 0; c < m; ++c) {
          if (c == j) continue;
          minor(rr, cc) = f(r, c);
          ++cc;
        }
        ++rr;
      }
      const Complex det = Eigen::PartialPivLU<CMat>(minor).determinant();
      adj(j, i) = (((i + j) % 2) ? -1.0 : 1.0) * det;
    }
  return adj;
}

// Factored cluster projector P = u w^H with w^H = (L^H R)^{-1} L^H.
BranchProjection make_projection(const CMat& rc, const CMat& lc,
                                 double gauge_tol) {
  const CMat g = lc.adjoint() * rc;
  Eigen::JacobiSVD<CMat> svd(g);
  const auto& sv = svd.singularValues();
  if (sv(0) <= 0 || sv(sv.size() - 1) < gauge_tol * sv(0))
    throw numeric_error(
        "eigenprojection: cluster numerically defective, left/right pairing "
        "nearly singular (semisimplicity violation)");
  BranchProjection p;
  p.u = rc;
  p.w = lc * (rc.adjoint() * lc).inverse();
  return p;
}

double projection_norm(const CMat& x, const CMat& w) {
  const CMat c = (x.adjoint() * x) * (w.adjoint() * w);
  return std::sqrt(std::max(0.0, c.trace().real()));
}

Vec axis_direction(int dim) {
  Vec omega = Vec::Zero(dim);
  omega(0) = 1.0;
  return omega;
}

CMat orthonormal_mode_matrix(const KineticOperator& op, double kappa) {
  const ModeOperator mode =
      build_mode_operator(op, kappa, axis_direction(op.grid->dim));
  return to_orthonormal(mode.matrix, *op.grid);
}

}  // namespace

ModeSpectrum eig_mode(const ModeOperator& op) {
  if (!op.grid) throw input_error("eig_mode: operator has no grid");
  if (!op.matrix.allFinite())
    throw input_error("eig_mode: matrix has non-finite entries");
  const CMat a = to_orthonormal(op.matrix, *op.grid);
  EigResult r = eig_dense(a);
  const double scale = std::max(1.0, inf_norm(a));
  if (r.max_residual > 1e-8 * scale)
    throw numeric_error("eig_mode: eigenpair residual " +
                        std::to_string(r.max_residual) +
                        " breaks the solver contract (vector condition " +
                        std::to_string(r.vector_condition) + ")");
  ModeSpectrum s;
  s.values = std::move(r.values);
  s.right = std::move(r.right);
  s.left = std::move(r.left);
  s.max_residual = r.max_residual;
  s.vector_condition = r.vector_condition;
  return s;
}

CMat eigenprojection(const CMat& right_cols, const CMat& left_cols,
                     double gauge_tol) {
  if (right_cols.rows() != left_cols.rows() ||
      right_cols.cols() != left_cols.cols() || right_cols.cols() < 1)
    throw input_error("eigenprojection: mismatched cluster columns");
  return make_projection(right_cols, left_cols, gauge_tol).dense();
}

int BranchFamily::total_multiplicity() const {
  int total = 0;
  for (const auto& b : branches) total += b.multiplicity;
  return total;
}

BranchFamily track_branches(const KineticOperator& op, const MacroBasis& basis,
                            const Vec& kappas, double separation_factor) {
  if (!op.grid) throw input_error("track_branches: operator has no grid");
  if (&basis.grid() != op.grid)
    throw input_error("track_branches: basis grid mismatch");
  require_hard(op.params, "track_branches");
  const int nk = static_cast<int>(kappas.size());
  if (nk < 1) throw input_error("track_branches: empty kappa grid");
  for (int i = 0; i < nk; ++i) {
    if (!(kappas(i) > 0))
      throw input_error("track_branches: kappa nodes must be positive");
    if (i > 0 && !(kappas(i) > kappas(i - 1)))
      throw input_error("track_branches: kappa nodes must be ascending");
  }

  const VelocityGrid& grid = *op.grid;
  const int m = basis.count();
  const Eigen::Index n = grid.size();

  const OperatorReport rep = validate_operator(op, basis);
  const double vmax1 = grid.nodes.col(0).cwiseAbs().maxCoeff();
  const double smallness = 0.5 * rep.micro_gap / (2.0 * pi * vmax1);
  if (kappas(nk - 1) > smallness)
    throw input_error("track_branches: largest kappa " +
                      std::to_string(kappas(nk - 1)) +
                      " exceeds the smallness bound " +
                      std::to_string(smallness) +
                      " set by the microscopic gap");

  struct NodeEig {
    CVec vals;
    CMat rc, lc;
    double resid = 0, diam = 0, sep = 0, a_inf = 0;
  };
  std::vector<NodeEig> data(nk);
  std::vector<std::string> errors(nk);

  parallel_for_index(nk, [&](int i) {
    try {
      const CMat a = orthonormal_mode_matrix(op, kappas(i));
      const EigResult e = eig_dense(a);
      NodeEig& d = data[i];
      d.a_inf = inf_norm(a);
      d.resid = e.max_residual;
      if (d.resid > 1e-8 * std::max(1.0, d.a_inf))
        throw numeric_error("eigenpair residual above contract");

      std::vector<int> order(n);
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](int x, int y) {
        if (e.values(x).real() != e.values(y).real())
          return e.values(x).real() < e.values(y).real();
        return e.values(x).imag() < e.values(y).imag();
      });

      d.vals.resize(m);
      d.rc.resize(n, m);
      d.lc.resize(n, m);
      for (int k = 0; k < m; ++k) {
        d.vals(k) = e.values(order[k]);
        d.rc.col(k) = e.right.col(order[k]);
        d.lc.col(k) = e.left.col(order[k]);
      }
      for (int x = 0; x < m; ++x)
        for (int y = x + 1; y < m; ++y)
          d.diam = std::max(d.diam, std::abs(d.vals(x) - d.vals(y)));
      d.sep = std::numeric_limits<double>::infinity();
      for (Eigen::Index k = m; k < n; ++k)
        for (int x = 0; x < m; ++x)
          d.sep = std::min(d.sep, std::abs(e.values(order[k]) - d.vals(x)));
    } catch (const std::exception& ex) {
      errors[i] = ex.what();
    }
  });
  for (int i = 0; i < nk; ++i)
    if (!errors[i].empty())
      throw numeric_error("track_branches: kappa=" + std::to_string(kappas(i)) +
                          ": " + errors[i]);

  int admitted = 0;
  while (admitted < nk &&
         data[admitted].sep >= separation_factor * data[admitted].diam)
    ++admitted;
  if (admitted == 0)
    throw input_error(
        "track_branches: low cluster not separated from the rest of the "
        "spectrum even at the smallest kappa; kappa grid starts too large");

  BranchFamily fam;
  fam.grid = &grid;
  fam.kappas = kappas.head(admitted);
  fam.kappa0 = kappas(admitted - 1);

  // Group the first node by eigenvalue proximity; exact degeneracies sit at
  // solver noise while genuine splittings grow like powers of kappa.
  const double gtol = 1e-7 * (1.0 + data[0].a_inf);
  std::vector<int> group_of(m, -1);
  int ngroups = 0;
  for (int i = 0; i < m; ++i) {
    if (group_of[i] >= 0) continue;
    group_of[i] = ngroups;
    for (int j = i + 1; j < m; ++j)
      if (group_of[j] < 0 &&
          std::abs(data[0].vals(i) - data[0].vals(j)) <= gtol)
        group_of[j] = ngroups;
    ++ngroups;
  }

  std::vector<std::vector<int>> members(ngroups);
  for (int i = 0; i < m; ++i) members[group_of[i]].push_back(i);

  fam.branches.resize(ngroups);
  for (int g = 0; g < ngroups; ++g) {
    SpectralBranch& br = fam.branches[g];
    br.multiplicity = static_cast<int>(members[g].size());
    br.kappas = fam.kappas;
    br.values.resize(admitted);
    br.projections.resize(admitted);
  }

  fam.max_residual = 0.0;
  fam.max_semisimple = 0.0;
  for (int t = 0; t < admitted; ++t) {
    const NodeEig& d = data[t];
    fam.max_residual = std::max(fam.max_residual, d.resid);

    std::vector<std::vector<int>> assign(ngroups);
    if (t == 0) {
      assign = members;
    } else {
      for (int i = 0; i < m; ++i) {
        int best = -1;
        double best_score = -1.0;
        for (int g = 0; g < ngroups; ++g) {
          const BranchProjection& prev = fam.branches[g].projections[t - 1];
          const double score =
              (prev.u * (prev.w.adjoint() * d.rc.col(i))).norm();
          if (score > best_score) {
            best_score = score;
            best = g;
          }
        }
        assign[best].push_back(i);
      }
      for (int g = 0; g < ngroups; ++g)
        if (static_cast<int>(assign[g].size()) !=
            fam.branches[g].multiplicity)
          throw numeric_error(
              "track_branches: projection-overlap matching failed at kappa=" +
              std::to_string(fam.kappas(t)));
    }

    const CMat a = orthonormal_mode_matrix(op, fam.kappas(t));
    const double a_fro = a.norm();
    for (int g = 0; g < ngroups; ++g) {
      SpectralBranch& br = fam.branches[g];
      const int mult = br.multiplicity;
      CMat rc(n, mult), lc(n, mult);
      Complex mean = 0.0;
      for (int k = 0; k < mult; ++k) {
        rc.col(k) = d.rc.col(assign[g][k]);
        lc.col(k) = d.lc.col(assign[g][k]);
        mean += d.vals(assign[g][k]);
      }
      mean /= static_cast<double>(mult);
      br.values(t) = mean;
      br.projections[t] = make_projection(rc, lc, 1e-6);

      const BranchProjection& p = br.projections[t];
      const CMat x = a * p.u - mean * p.u;
      fam.max_semisimple =
          std::max(fam.max_semisimple, projection_norm(x, p.w) / a_fro);

      if (mean.real() < -1e-10)
        throw numeric_error("track_branches: branch violates dissipativity "
                            "at kappa=" +
                            std::to_string(fam.kappas(t)));
    }
  }
  return fam;
}

ExpansionFit fit_expansion(SpectralBranch& branch) {
  const int nk = static_cast<int>(branch.kappas.size());
  if (nk < 6)
    throw input_error("fit_expansion: need at least 6 kappa nodes");
  if (branch.kappas(nk - 1) < 10.0 * branch.kappas(0))
    throw input_error("fit_expansion: kappa nodes must span a decade");

  // Joint fits with the next symmetry-allowed term (odd powers for the
  // imaginary part, even for the real part), so the cubic remainder does not
  // leak into the asymptotic coefficients.  Dividing by kappa^p first gives
  // every decade of the geometric grid equal weight; otherwise the largest
  // nodes dominate the normal equations and higher-order terms bias the
  // leading coefficient.
  const auto two_term = [&](int p, int q, bool imag_part) {
    double app = 0, apq = 0, aqq = 0, bp = 0, bq = 0;
    for (int i = 0; i < nk; ++i) {
      const double k = branch.kappas(i);
      const double z = std::pow(k, q - p);
      const double y = (imag_part ? branch.values(i).imag()
                                  : branch.values(i).real()) /
                       std::pow(k, p);
      app += 1.0;
      apq += z;
      aqq += z * z;
      bp += y;
      bq += z * y;
    }
    const double det = app * aqq - apq * apq;
    if (det <= 0) throw numeric_error("fit_expansion: degenerate kappa grid");
    return (aqq * bp - apq * bq) / det;
  };
  ExpansionFit fit;
  fit.zeta1 = two_term(1, 3, true);
  fit.zeta2 = two_term(2, 4, false);

  Vec resid(nk);
  double ss = 0;
  for (int i = 0; i < nk; ++i) {
    const double k = branch.kappas(i);
    const Complex model(fit.zeta2 * k * k, fit.zeta1 * k);
    resid(i) = std::abs(branch.values(i) - model);
    ss += resid(i) * resid(i);
  }
  fit.fit_residual = std::sqrt(ss / nk);

  std::vector<double> lx, ly;
  for (int i = 0; i < nk; ++i) {
    const double floor = 1e-12 * (1.0 + std::abs(branch.values(i)));
    if (resid(i) > floor) {
      lx.push_back(std::log(branch.kappas(i)));
      ly.push_back(std::log(resid(i)));
    }
  }
  if (lx.size() < 4) {
    // remainder below resolution everywhere: consistent with the expansion
    fit.residual_order = std::numeric_limits<double>::quiet_NaN();
    fit.expansion_ok = true;
  } else {
    fit.residual_order = slope_with_intercept(lx, ly);
    fit.expansion_ok = !(fit.residual_order < 2.5);
  }

  branch.zeta1 = fit.zeta1;
  branch.zeta2 = fit.zeta2;
  branch.fit_residual = fit.fit_residual;
  branch.residual_order = fit.residual_order;
  branch.expansion_ok = fit.expansion_ok;
  return fit;
}

double family_residual_order(const BranchFamily& fam) {
  if (fam.branches.empty())
    throw input_error("family_residual_order: no branches");
  const int nk = static_cast<int>(fam.kappas.size());
  std::vector<SpectralBranch> fitted = fam.branches;
  for (auto& b : fitted) fit_expansion(b);

  std::vector<double> lx, ly;
  for (int i = 0; i < nk; ++i) {
    double ss = 0;
    double floor = 0;
    for (const auto& b : fitted) {
      const double k = b.kappas(i);
      const Complex model(b.zeta2 * k * k, b.zeta1 * k);
      const double r = std::abs(b.values(i) - model);
      ss += r * r;
      floor = std::max(floor, 1e-12 * (1.0 + std::abs(b.values(i))));
    }
    const double combined = std::sqrt(ss / static_cast<double>(fitted.size()));
    if (combined > floor) {
      lx.push_back(std::log(fam.kappas(i)));
      ly.push_back(std::log(combined));
    }
  }
  if (lx.size() < 4)
    throw numeric_error(
        "family_residual_order: remainder below resolution on the grid");
  return slope_with_intercept(lx, ly);
}

ProjectionLimitsReport check_projection_limits(const BranchFamily& fam,
                                               const KineticOperator& op,
                                               const MacroBasis& basis,
                                               int draws, unsigned seed) {
  if (!fam.grid || fam.grid != op.grid || &basis.grid() != op.grid)
    throw input_error("check_projection_limits: grid mismatch");
  const int nk = static_cast<int>(fam.kappas.size());
  if (nk < 2)
    throw input_error("check_projection_limits: need at least two nodes");
  if (draws < 1) throw input_error("check_projection_limits: draws < 1");
  const int nb = static_cast<int>(fam.branches.size());
  const Eigen::Index n = fam.grid->size();

  ProjectionLimitsReport rep;
  rep.zero_limits.reserve(nb);
  rep.linear_constants.resize(nb);

  const double k1 = fam.kappas(0);
  const double k2 = fam.kappas(1);
  for (int j = 0; j < nb; ++j) {
    const CMat p1 = fam.branches[j].projections[0].dense();
    const CMat p2 = fam.branches[j].projections[1].dense();
    rep.zero_limits.push_back((k2 * p1 - k1 * p2) / (k2 - k1));
  }

  for (int j = 0; j < nb; ++j) {
    double skk = 0, sky = 0;
    for (int t = 0; t < nk; ++t) {
      const double y =
          (fam.branches[j].projections[t].dense() - rep.zero_limits[j]).norm();
      skk += fam.kappas(t) * fam.kappas(t);
      sky += fam.kappas(t) * y;
    }
    rep.linear_constants(j) = sky / skk;
  }

  const Mat phat_r = to_orthonormal(basis.projector(), *fam.grid);
  const CMat phat = phat_r.cast<Complex>();
  CMat sum0 = CMat::Zero(n, n);
  rep.ortho_defect = 0.0;
  for (int j = 0; j < nb; ++j) {
    sum0 += rep.zero_limits[j];
    rep.ortho_defect = std::max(
        rep.ortho_defect,
        (rep.zero_limits[j] - rep.zero_limits[j].adjoint()).norm());
  }
  rep.sum_defect = (sum0 - phat).norm();
  rep.sum_ok = rep.sum_defect <= 1e-6;

  std::mt19937 gen(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  CMat f(n, draws);
  for (Eigen::Index c = 0; c < draws; ++c)
    for (Eigen::Index r = 0; r < n; ++r) f(r, c) = Complex(nd(gen), nd(gen));

  const CMat pf = phat * f;
  rep.coercivity_min = std::numeric_limits<double>::infinity();
  for (int t = 0; t < nk; ++t) {
    Vec num = Vec::Zero(draws);
    for (int j = 0; j < nb; ++j) {
      const BranchProjection& p = fam.branches[j].projections[t];
      const CMat pjf = p.u * (p.w.adjoint() * f);
      num += pjf.colwise().squaredNorm().transpose();
    }
    for (int c = 0; c < draws; ++c) {
      const double den = pf.col(c).squaredNorm();
      if (den > 1e-14 * f.col(c).squaredNorm())
        rep.coercivity_min = std::min(rep.coercivity_min, num(c) / den);
    }
  }
  rep.coercivity_ok = rep.coercivity_min >= 0.5;

  rep.compat_max = 0.0;
  for (int t = 0; t < nk; ++t) {
    const CMat a = orthonormal_mode_matrix(op, fam.kappas(t));
    const double a_fro = a.norm();
    for (int j = 0; j < nb; ++j) {
      const BranchProjection& p = fam.branches[j].projections[t];
      const Complex zeta = fam.branches[j].values(t);
      // (B - zeta P) P = (A u) w^H - zeta u (w^H u) w^H
      const CMat x = a * p.u - zeta * (p.u * (p.w.adjoint() * p.u));
      rep.compat_max =
          std::max(rep.compat_max, projection_norm(x, p.w) / a_fro);
    }
  }
  rep.compat_ok = rep.compat_max <= 1e-6;
  return rep;
}

CMat dispersion_matrix(const KineticOperator& op, const MacroBasis& basis,
                       double kappa, Complex zeta) {
  if (!op.grid) throw input_error("dispersion_matrix: operator has no grid");
  if (&basis.grid() != op.grid)
    throw input_error("dispersion_matrix: basis grid mismatch");
  require_hard(op.params, "dispersion_matrix");
  if (kappa < 0) throw input_error("dispersion_matrix: kappa must be >= 0");
  const VelocityGrid& grid = *op.grid;

  CMat s = orthonormal_mode_matrix(op, kappa);
  s += to_orthonormal(basis.projector(), grid).cast<Complex>();
  s.diagonal().array() -= zeta;

  const CMat ehat =
      (grid.quad.cwiseSqrt().asDiagonal() * basis.matrix()).cast<Complex>();
  const CMat x = Eigen::PartialPivLU<CMat>(s).solve(ehat);
  if (!x.allFinite())
    throw numeric_error("dispersion_matrix: resolvent solve failed");
  return ehat.adjoint() * x;
}

namespace {

// Resolvent of B + P through one dense eigendecomposition per kappa, so each
// Newton iterate costs a diagonal rescaling instead of a factorization.
struct ReducedResolvent {
  CMat c;      // E^H V
  CMat d;      // V^{-1} E
  CVec theta;  // eigenvalues of B + P

  void eval(Complex zeta, CMat* mval, CMat* mder) const {
    const CVec g = (theta.array() - zeta).inverse().matrix();
    *mval = c * g.asDiagonal() * d;
    const CVec g2 = g.array().square().matrix();
    *mder = c * g2.asDiagonal() * d;
  }
};

struct NewtonOutcome {
  Complex zeta;
  int steps = 0;
  double det_residual = 0.0;
  bool converged = false;
};

NewtonOutcome newton_on_determinant(const ReducedResolvent& rr, Complex seed,
                                    int multiplicity, double kappa) {
  const Eigen::Index m = rr.c.rows();
  NewtonOutcome out;
  Complex z = seed;
  Complex best_z = seed;
  double best_dz = std::numeric_limits<double>::infinity();
  int best_step = 0;
  CMat mval(m, m), mder(m, m);
  for (int it = 0; it < 40; ++it) {
    rr.eval(z, &mval, &mder);
    CMat fmat = mval - CMat::Identity(m, m);
    const Complex g = Eigen::PartialPivLU<CMat>(fmat).determinant();
    const Complex gp = (cofactor_adjugate(fmat) * mder).trace();
    if (!std::isfinite(std::abs(g)) || !std::isfinite(std::abs(gp)) ||
        std::abs(gp) == 0.0)
      break;
    const Complex dz =
        -static_cast<double>(multiplicity) * g / gp;
    z += dz;
    out.steps = it + 1;
    if (!std::isfinite(std::abs(z)) || std::abs(z) > 1.0) break;
    const double adz = std::abs(dz);
    if (adz < best_dz) {
      best_dz = adz;
      best_z = z;
      best_step = it + 1;
    }
    if (adz <= 1e-12 * std::max(kappa, std::abs(z))) {
      out.converged = true;
      break;
    }
  }
  // Clustered multiple roots stall the update at the cluster width, which
  // grows with the first expansion term the cluster does not share; accept
  // the tightest iterate inside that width.  Simple roots stay strict.
  const double stall_tol =
      multiplicity > 1 ? std::max(3e-8, 10.0 * kappa * kappa * kappa) : 3e-8;
  if (!out.converged && best_dz <= stall_tol) {
    out.converged = true;
    out.steps = best_step;
  }
  out.zeta = out.converged ? best_z : z;
  rr.eval(out.zeta, &mval, &mder);
  out.det_residual = std::abs(
      Eigen::PartialPivLU<CMat>(CMat(mval - CMat::Identity(m, m)))
          .determinant());
  return out;
}

}  // namespace

std::vector<DispersionRoot> dispersion_solve(const KineticOperator& op,
                                             const MacroBasis& basis,
                                             double kappa,
                                             const BranchFamily& fam) {
  if (!op.grid || fam.grid != op.grid || &basis.grid() != op.grid)
    throw input_error("dispersion_solve: grid mismatch");
  require_hard(op.params, "dispersion_solve");
  if (!(kappa > 0) || kappa > fam.kappa0)
    throw input_error("dispersion_solve: kappa must lie in (0, kappa0]");
  const VelocityGrid& grid = *op.grid;

  std::vector<SpectralBranch> fitted = fam.branches;
  for (auto& b : fitted) fit_expansion(b);

  const CMat ehat =
      (grid.quad.cwiseSqrt().asDiagonal() * basis.matrix()).cast<Complex>();

  const auto make_resolvent = [&](double k) {
    CMat bp = orthonormal_mode_matrix(op, k);
    bp += to_orthonormal(basis.projector(), grid).cast<Complex>();
    const EigResult e = eig_dense(bp);
    ReducedResolvent rr;
    rr.theta = e.values;
    rr.c = ehat.adjoint() * e.right;
    // V^{-1} E by direct solve: the biorthonormal gauge only fixes the
    // diagonal pairings, which is not enough inside degenerate clusters.
    rr.d = Eigen::PartialPivLU<CMat>(e.right).solve(ehat);
    return rr;
  };

  const ReducedResolvent rr = make_resolvent(kappa);
  std::vector<DispersionRoot> roots;
  roots.reserve(fitted.size());
  for (const auto& b : fitted) {
    const auto seed_at = [&](double k) {
      return Complex(b.zeta2 * k * k, b.zeta1 * k);
    };
    NewtonOutcome out =
        newton_on_determinant(rr, seed_at(kappa), b.multiplicity, kappa);

    double k_half = kappa;
    int depth = 0;
    while (!out.converged && depth < 6) {
      // continuation: converge at half the frequency, transfer the root
      // through the expansion scaling, retry
      k_half *= 0.5;
      ++depth;
      const NewtonOutcome low = newton_on_determinant(
          make_resolvent(k_half), seed_at(k_half), b.multiplicity, k_half);
      if (!low.converged) continue;
      const double scale = kappa / k_half;
      const Complex transferred(low.zeta.real() * scale * scale,
                                low.zeta.imag() * scale);
      out = newton_on_determinant(rr, transferred, b.multiplicity, kappa);
    }
    if (!out.converged)
      throw numeric_error(
          "dispersion_solve: Newton iteration failed to converge at kappa=" +
          std::to_string(kappa));

    DispersionRoot root;
    root.zeta = out.zeta;
    root.multiplicity = b.multiplicity;
    root.newton_steps = out.steps;
    root.det_residual = out.det_residual;
    roots.push_back(root);
  }
  return roots;
}

}  // namespace kdecay
