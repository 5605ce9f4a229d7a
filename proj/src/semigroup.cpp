#include "kdecay/semigroup.hpp"

#include <algorithm>
#include <cmath>

#include "kdecay/calibration.hpp"
#include "kdecay/eig.hpp"
#include "kdecay/expm.hpp"

namespace kdecay {

namespace {

// Slope of the least-squares line y = a + b x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double det = n * sxx - sx * sx;
  if (det <= 0.0) throw numeric_error("fit_slope: degenerate abscissae");
  return (n * sxy - sx * sy) / det;
}

// 3-point derivative weights at b for nodes (a, b, c).
void centered_weights(double a, double b, double c, double* w) {
  w[0] = (b - c) / ((a - b) * (a - c));
  w[1] = (2.0 * b - a - c) / ((b - a) * (b - c));
  w[2] = (b - a) / ((c - a) * (c - b));
}

void require_times(const std::vector<double>& times) {
  if (times.empty()) throw input_error("evolution: empty time set");
  for (size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= 0.0))
      throw input_error("evolution: times must be nonnegative");
    if (i > 0 && times[i] < times[i - 1])
      throw input_error("evolution: times must be sorted");
  }
}

}  // namespace

Propagator::Propagator(const CMat& b, const Vec& metric,
                       double condition_threshold)
    : b_(b) {
  if (b_.rows() != b_.cols()) throw input_error("Propagator: matrix not square");
  if (metric.size() != b_.rows())
    throw input_error("Propagator: metric size mismatch");
  if ((metric.array() <= 0.0).any())
    throw input_error("Propagator: metric must be positive");
  sqrt_d_ = metric.array().sqrt();
  inv_sqrt_d_ = sqrt_d_.cwiseInverse();

  if (condition_threshold > 0.0) {
    const CMat a = sqrt_d_.cast<Complex>().asDiagonal() * b_ *
                   inv_sqrt_d_.cast<Complex>().asDiagonal();
    const EigResult e = eig_dense(a);
    if (e.vector_condition <= condition_threshold &&
        e.max_residual <= 1e-9 * std::max(1.0, a.norm())) {
      use_eig_ = true;
      evalues_ = e.values;
      eright_ = e.right;
      eleft_ = e.left;
      max_real_rate_ = evalues_.real().cwiseAbs().maxCoeff();
    }
  }
  method_ = use_eig_ ? "eig" : "expm";
}

CVec Propagator::apply(const CVec& f0, double t) const {
  if (f0.size() != b_.rows()) throw input_error("Propagator: vector size");
  if (!(t >= 0.0)) throw input_error("Propagator: t must be nonnegative");
  if (use_eig_) {
    CVec c = eleft_.adjoint() * (sqrt_d_.cast<Complex>().asDiagonal() * f0);
    c.array() *= (-t * evalues_.array()).exp();
    return inv_sqrt_d_.cast<Complex>().asDiagonal() * (eright_ * c);
  }
  return expm((-t * b_).eval()) * f0;
}

double Propagator::step_doubling_defect(const CVec& f0, double t) const {
  const Vec w = sqrt_d_;
  const double scale = (w.asDiagonal() * f0).norm();
  if (scale == 0.0) return 0.0;
  const CVec full = apply(f0, t);
  const CVec halves = apply(apply(f0, 0.5 * t), 0.5 * t);
  return (w.asDiagonal() * (full - halves)).norm() / scale;
}

VelocityFunction ModeTrajectory::state(Eigen::Index i) const {
  if (i < 0 || i >= static_cast<Eigen::Index>(times.size()))
    throw input_error("ModeTrajectory: node index out of range");
  return from_values(*grid, states.row(i).transpose());
}

ModeTrajectory evolve_mode(const ModeOperator& op, const VelocityFunction& f0,
                           const std::vector<double>& times) {
  if (op.grid == nullptr || f0.grid != op.grid)
    throw input_error("evolve_mode: operator and data live on different grids");
  require_times(times);
  const VelocityGrid& grid = *op.grid;

  auto prop = std::make_unique<Propagator>(op.matrix, grid.quad);
  std::string method = prop->method();
  const double t_ref = times.back() > 0.0 ? times.back() : 1.0;
  double defect = prop->step_doubling_defect(f0.values, t_ref);
  if (defect > 1e-9 && prop->method() == "eig") {
    prop = std::make_unique<Propagator>(op.matrix, grid.quad, 0.0);
    defect = prop->step_doubling_defect(f0.values, t_ref);
    method = "expm (eig rejected)";
  }
  if (defect > 1e-9)
    throw numeric_error("evolve_mode: step-doubling defect above 1e-9");

  ModeTrajectory traj;
  traj.grid = &grid;
  traj.kappa = op.kappa;
  traj.omega = op.omega;
  traj.times = times;
  traj.method = method;
  traj.error_estimate = defect;
  traj.states.resize(static_cast<Eigen::Index>(times.size()), grid.size());
  for (size_t i = 0; i < times.size(); ++i) {
    const CVec fi =
        times[i] == 0.0 ? f0.values : prop->apply(f0.values, times[i]);
    traj.states.row(static_cast<Eigen::Index>(i)) = fi.transpose();
  }
  return traj;
}

double energy_identity_check(const ModeTrajectory& traj,
                             const KineticOperator& op) {
  if (traj.times.size() < 3)
    throw input_error("energy_identity_check: need at least 3 time nodes");
  if (op.grid != traj.grid)
    throw input_error("energy_identity_check: grid mismatch");
  const VelocityGrid& grid = *traj.grid;
  const Eigen::Index m = static_cast<Eigen::Index>(traj.times.size());

  Vec norm2(m), diss(m);
  const CMat lc = op.matrix.cast<Complex>();
  for (Eigen::Index i = 0; i < m; ++i) {
    const CVec f = traj.states.row(i).transpose();
    norm2(i) = (grid.quad.array() * f.array().abs2()).sum();
    const CVec lf = lc * f;
    diss(i) =
        (grid.quad.array() * (lf.array() * f.array().conjugate()).real()).sum();
  }

  double worst = 0.0;
  for (Eigen::Index i = 1; i + 1 < m; ++i) {
    double w[3];
    centered_weights(traj.times[i - 1], traj.times[i], traj.times[i + 1], w);
    const double ddt = w[0] * norm2(i - 1) + w[1] * norm2(i) + w[2] * norm2(i + 1);
    worst = std::max(worst, std::abs(ddt + 2.0 * diss(i)));
  }
  return worst;
}

EnvelopeReport envelope_check(const ModeTrajectory& traj,
                              const KernelParams& params, double ell,
                              double sigma) {
  if (traj.times.size() < 8)
    throw input_error("envelope_check: need at least 8 time nodes");
  if (!(sigma > 0.0)) throw input_error("envelope_check: sigma must be positive");

  EnvelopeReport rep;
  rep.regime = params.hard() ? "hard" : "soft";
  rep.kappa = traj.kappa;
  rep.ell = ell;
  rep.sigma = sigma;
  rep.status = "inconclusive";

  const Eigen::Index m = static_cast<Eigen::Index>(traj.times.size());
  Vec y(m);
  for (Eigen::Index i = 0; i < m; ++i)
    y(i) = weighted_norm2(traj.state(i), 2.0 * ell);
  if (y(0) <= 0.0) return rep;
  const double drop = y(0) / std::max(y(m - 1), 1e-300);
  if (drop < 10.0) return rep;  // not enough decay to judge

  const double t_max = traj.times.back();

  // Exponential fits: full tail (t >= t_max/4) and dyadic windows [T, 2T].
  auto window_rate = [&](double lo, double hi, double* rate) {
    std::vector<double> xs, ys;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double t = traj.times[i];
      if (t < lo * (1.0 - 1e-12) || t > hi * (1.0 + 1e-12)) continue;
      if (y(i) <= 0.0) continue;
      xs.push_back(t);
      ys.push_back(std::log(y(i)));
    }
    if (xs.size() < 3) return false;
    *rate = -fit_slope(xs, ys);
    return true;
  };

  double tail_rate = 0.0;
  if (!window_rate(0.25 * t_max, t_max, &tail_rate)) return rep;
  rep.rate = tail_rate;

  std::vector<double> wr;
  for (double lo : {t_max / 8.0, t_max / 4.0, t_max / 2.0}) {
    double r = 0.0;
    if (window_rate(lo, 2.0 * lo, &r)) wr.push_back(r);
  }
  if (wr.size() < 3) return rep;
  rep.window_rates = Eigen::Map<const Vec>(wr.data(), wr.size());
  const double mean =
      rep.window_rates.cwiseAbs().sum() / static_cast<double>(wr.size());
  rep.window_drift =
      (rep.window_rates.maxCoeff() - rep.window_rates.minCoeff()) /
      std::max(mean, 1e-300);

  const double supp = std::min(1.0, traj.kappa * traj.kappa);
  rep.normalized_rate = supp > 1e-12 ? rep.rate / supp : rep.rate;

  rep.status = "ok";
  if (params.hard()) {
    rep.pass = rep.normalized_rate >= kEnvHardFloor;
    return rep;
  }

  // Soft regime: algebraic envelope against the weight-depleted data norm.
  const double sigma_prime = -sigma * params.weight_power();
  const double d0 = weighted_norm2(traj.state(0), 2.0 * (ell + sigma_prime));
  if (d0 <= 0.0) {
    rep.status = "inconclusive";
    return rep;
  }
  double margin = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double env =
        std::pow(traj.times[i] * supp / sigma + 1.0, -sigma) * d0;
    margin = std::max(margin, y(i) / env);
  }
  rep.envelope_margin = margin;
  rep.pass = margin <= kEnvSoftC;
  return rep;
}

FieldTrajectory evolve_field(const RadialMixedField& f0,
                             const KineticOperator& op,
                             const std::vector<double>& times, int omega_axis,
                             double radial_tol, FieldSymmetry symmetry) {
  if (f0.vgrid() == nullptr)
    throw input_error("evolve_field: data carries no velocity grid");
  if (f0.vgrid() != op.grid)
    throw input_error("evolve_field: operator and data live on different grids");
  require_times(times);
  const VelocityGrid& grid = *op.grid;
  if (omega_axis < 0 || omega_axis >= grid.dim)
    throw input_error("evolve_field: omega axis out of range");

  const AxisSymmetry sym(grid, omega_axis);

  // The orbit reduction needs invariance under the axis group; the radial
  // default additionally checks full rotation symmetry, which is what makes
  // the reported norms independent of the transport direction.
  double max_asym = 0.0;
  for (Eigen::Index r = 0; r < f0.kappa_count(); ++r) {
    const CVec row = f0.values().row(r).transpose();
    const double scale = row.cwiseAbs().maxCoeff();
    if (scale == 0.0) continue;
    double dev = 0.0;
    if (symmetry == FieldSymmetry::radial) {
      dev = radial_asymmetry(grid, row);
    } else {
      sym.to_orbit(row, &dev);
    }
    max_asym = std::max(max_asym, dev / scale);
  }
  if (max_asym > radial_tol) {
    if (symmetry == FieldSymmetry::radial)
      throw input_error("evolve_field: initial data is not radial in v");
    throw input_error(
        "evolve_field: initial data is not symmetric about the transport axis");
  }
  const Mat l_red = sym.reduce_operator(op.matrix);
  const CMat l_red_c = l_red.cast<Complex>();

  FieldTrajectory traj;
  traj.times = times;
  traj.max_asymmetry = max_asym;
  traj.states.reserve(times.size());
  for (size_t i = 0; i < times.size(); ++i)
    traj.states.emplace_back(f0.ambient_dim(), f0.kappa(), &grid);

  const int nk = static_cast<int>(f0.kappa_count());
  std::vector<double> defects(nk, 0.0);
  std::vector<char> used_eig(nk, 1);
  std::vector<std::string> errors(nk);
  const double t_ref = times.back() > 0.0 ? times.back() : 1.0;

  parallel_for_index(nk, [&](int r) {
    try {
      const double kappa = f0.kappa()(r);
      CMat b = l_red_c;
      b += (Complex(0.0, 2.0 * pi * kappa) * sym.orbit_vdist().cast<Complex>())
               .asDiagonal();
      const CVec row0 = f0.values().row(r).transpose();
      const CVec orb0 = sym.to_orbit(row0);

      auto prop = std::make_unique<Propagator>(b, sym.orbit_quad());
      double defect = prop->step_doubling_defect(orb0, t_ref);
      if (defect > 1e-9 && prop->method() == "eig") {
        prop = std::make_unique<Propagator>(b, sym.orbit_quad(), 0.0);
        defect = prop->step_doubling_defect(orb0, t_ref);
        used_eig[r] = 0;
      }
      if (defect > 1e-9)
        throw numeric_error("evolve_field: step-doubling defect above 1e-9");
      defects[r] = defect;

      for (size_t i = 0; i < times.size(); ++i) {
        const CVec fi = times[i] == 0.0
                            ? row0
                            : sym.from_orbit(prop->apply(orb0, times[i]));
        traj.states[i].values().row(r) = fi.transpose();
      }
    } catch (const std::exception& e) {
      errors[r] = e.what();
    }
  });

  for (int r = 0; r < nk; ++r)
    if (!errors[r].empty()) throw numeric_error(errors[r]);
  traj.max_error_estimate = *std::max_element(defects.begin(), defects.end());
  traj.method = std::all_of(used_eig.begin(), used_eig.end(),
                            [](char c) { return c != 0; })
                    ? "eig"
                    : "mixed";
  return traj;
}

Vec norm_series(const FieldTrajectory& traj, double ell, double m) {
  Vec out(static_cast<Eigen::Index>(traj.states.size()));
  for (size_t i = 0; i < traj.states.size(); ++i)
    out(static_cast<Eigen::Index>(i)) = traj.states[i].norm2(ell, m);
  return out;
}

Vec macro_series(const FieldTrajectory& traj, const MacroBasis& basis) {
  if (traj.states.empty()) throw input_error("macro_series: empty trajectory");
  const VelocityGrid& grid = basis.grid();
  if (traj.states[0].vgrid() != &grid)
    throw input_error("macro_series: basis grid mismatch");
  const CMat proj = basis.projector().cast<Complex>();

  Vec out(static_cast<Eigen::Index>(traj.states.size()));
  for (size_t i = 0; i < traj.states.size(); ++i) {
    const RadialMixedField& f = traj.states[i];
    double total = 0.0;
    for (Eigen::Index r = 0; r < f.kappa_count(); ++r) {
      const CVec pf = proj * f.values().row(r).transpose();
      total += f.weight()(r) * (grid.quad.array() * pf.array().abs2()).sum();
    }
    out(static_cast<Eigen::Index>(i)) = total;
  }
  return out;
}

Vec micro_series(const FieldTrajectory& traj, const MacroBasis& basis,
                 double ell) {
  if (traj.states.empty()) throw input_error("micro_series: empty trajectory");
  const VelocityGrid& grid = basis.grid();
  if (traj.states[0].vgrid() != &grid)
    throw input_error("micro_series: basis grid mismatch");
  const CMat proj = basis.projector().cast<Complex>();
  const Vec weight = grid.quad.array() * grid.bracket.array().pow(ell);

  Vec out(static_cast<Eigen::Index>(traj.states.size()));
  for (size_t i = 0; i < traj.states.size(); ++i) {
    const RadialMixedField& f = traj.states[i];
    double total = 0.0;
    for (Eigen::Index r = 0; r < f.kappa_count(); ++r) {
      const CVec row = f.values().row(r).transpose();
      const CVec mf = row - proj * row;
      total += f.weight()(r) * (weight.array() * mf.array().abs2()).sum();
    }
    out(static_cast<Eigen::Index>(i)) = total;
  }
  return out;
}

Vec besov_series(const FieldTrajectory& traj, const LPFilterBank& bank,
                 double rho, double q, double ell) {
  Vec out(static_cast<Eigen::Index>(traj.states.size()));
  for (size_t i = 0; i < traj.states.size(); ++i)
    out(static_cast<Eigen::Index>(i)) =
        besov_norm(traj.states[i], bank, rho, q, ell);
  return out;
}

EnergySeries energy_dissipation_series(const FieldTrajectory& traj, int K,
                                       double ell, const KernelParams& params,
                                       const MacroBasis& basis) {
  if (K < 0) throw input_error("energy_dissipation_series: K must be >= 0");
  if (K > 2)
    throw input_error(
        "energy_dissipation_series: velocity orders above 2 unsupported");
  if (traj.states.empty())
    throw input_error("energy_dissipation_series: empty trajectory");
  const VelocityGrid& grid = basis.grid();
  if (traj.states[0].vgrid() != &grid)
    throw input_error("energy_dissipation_series: basis grid mismatch");

  EnergySeries series;
  series.times = traj.times;
  series.rho = params.rho();
  const double gs = params.weight_power();
  const CMat proj = basis.projector().cast<Complex>();
  const auto betas = multi_indices_up_to(grid.dim, K);
  const Eigen::Index nt = static_cast<Eigen::Index>(traj.states.size());
  series.energy = Vec::Zero(nt);
  series.dissipation = Vec::Zero(nt);

  for (Eigen::Index i = 0; i < nt; ++i) {
    const RadialMixedField& f = traj.states[i];
    double e_total = 0.0, d_total = 0.0;
    for (Eigen::Index r = 0; r < f.kappa_count(); ++r) {
      const double mode2 = std::pow(2.0 * pi * f.kappa()(r), 2.0);
      const CVec row = f.values().row(r).transpose();
      const VelocityFunction fr = from_values(grid, row);
      const VelocityFunction gr = from_values(grid, row - proj * row);
      for (const auto& beta : betas) {
        int order = 0;
        for (int b : beta) order += b;
        const double wexp = 2.0 * (ell - order * series.rho);
        const VelocityFunction dfr = multi_derivative(fr, beta);
        const VelocityFunction dgr = multi_derivative(gr, beta);
        const double e_term = weighted_norm2(dfr, wexp);
        const double d_term = weighted_norm2(dgr, wexp + gs);
        // spatial orders a with a + |beta| <= K, realized as |2 pi kappa|^{2a}
        double mode_sum = 0.0;
        double mode_pow = 1.0;
        for (int a = 0; a + order <= K; ++a) {
          mode_sum += mode_pow;
          mode_pow *= mode2;
        }
        e_total += f.weight()(r) * mode_sum * e_term;
        d_total += f.weight()(r) * mode_sum * d_term;
      }
    }
    series.energy(i) = e_total;
    series.dissipation(i) = d_total;
  }

  series.max_rise = 0.0;
  for (Eigen::Index i = 0; i + 1 < nt; ++i) {
    const double rise = (series.energy(i + 1) - series.energy(i)) /
                        std::max(series.energy(i), 1e-300);
    series.max_rise = std::max(series.max_rise, rise);
  }
  series.monotone = series.max_rise <= 1e-10;
  return series;
}

}  // namespace kdecay
