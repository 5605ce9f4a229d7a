#include <doctest.h>

#include <cmath>
#include <vector>

#include "kdecay/calibration.hpp"
#include "kdecay/semigroup.hpp"

using namespace kdecay;

namespace {

std::vector<double> times_between(double lo, double hi, int count) {
  const Vec v = geometric_nodes(lo, hi, count);
  return {v.begin(), v.end()};
}

// Radial microscopic seed: <v>^{-1} sqrt(mu) minus its mass and energy
// components (momentum vanishes by parity).
CVec micro_seed(const VelocityGrid& grid, const MacroBasis& basis) {
  Vec h = grid.bracket.array().inverse() * grid.sqrt_mu.array();
  for (int a : {0, grid.dim + 1}) {
    const Vec e = basis.matrix().col(a);
    h -= (grid.quad.array() * h.array() * e.array()).sum() * e;
  }
  return h.cast<Complex>();
}

RadialMixedField power_data(const VelocityGrid& grid, const CVec& profile,
                            double rho, const Vec& kappas) {
  RadialMixedField f(3, kappas, &grid);
  for (Eigen::Index r = 0; r < f.kappa_count(); ++r) {
    const double k = f.kappa()(r);
    const double amp = k <= 1.0 ? std::pow(k, rho - 1.5) : 0.0;
    f.values().row(r) = (amp * profile).transpose();
  }
  return f;
}

struct Setup {
  VelocityGrid grid;
  MacroBasis basis;
  Vec e1;
  Setup()
      : grid(build_hermite_grid(3, 8)), basis(grid), e1(Vec::Zero(3)) {
    e1(0) = 1.0;
  }
};

Setup& setup() {
  static Setup s;
  return s;
}

}  // namespace

TEST_CASE("collision invariants are conserved without transport") {
  auto& s = setup();
  const KineticOperator L =
      build_model_L(s.grid, KernelParams(3, 0.0, 0.25), s.basis);
  const ModeOperator op = build_mode_operator(L, 0.0, s.e1);
  VelocityFunction f0 = from_values(s.grid, s.grid.sqrt_mu.cast<Complex>());
  auto traj = evolve_mode(op, f0, times_between(0.1, 100.0, 12));
  for (Eigen::Index i = 0; i < traj.states.rows(); ++i)
    CHECK((traj.states.row(i).transpose() - f0.values).cwiseAbs().maxCoeff() <
          1e-12);  // measured 1.9e-14
  CHECK(traj.error_estimate < 1e-9);
}

TEST_CASE("flat-weight microscopic data decays as a pure exponential") {
  auto& s = setup();
  const KineticOperator L0 =
      build_model_L(s.grid, KernelParams(3, -0.5, 0.25), s.basis);
  const ModeOperator op = build_mode_operator(L0, 0.0, s.e1);
  VelocityFunction f0 = from_values(s.grid, micro_seed(s.grid, s.basis));
  const auto ts = times_between(0.1, 5.0, 9);
  auto traj = evolve_mode(op, f0, ts);
  for (size_t i = 0; i < ts.size(); ++i) {
    const CVec expect = std::exp(-ts[i]) * f0.values;
    const double rel =
        (traj.states.row(static_cast<Eigen::Index>(i)).transpose() - expect)
            .norm() /
        expect.norm();
    CHECK(rel < 1e-10);  // measured 1.2e-12
  }
}

TEST_CASE("propagation through s then t matches one shot at s + t") {
  auto& s = setup();
  const KineticOperator L =
      build_model_L(s.grid, KernelParams(3, 0.0, 0.25), s.basis);
  const ModeOperator op = build_mode_operator(L, 0.8, s.e1);
  CMat a = to_orthonormal(op.matrix, s.grid);
  Propagator prop(a, Vec::Ones(s.grid.size()));
  CHECK(prop.method() == "eig");

  CVec f0 = (s.grid.sqrt_mu + 0.3 * micro_seed(s.grid, s.basis).real())
                .cast<Complex>();
  for (auto [u, v] : {std::pair{0.4, 1.1}, {2.0, 2.0}, {0.05, 6.0}}) {
    const CVec two = prop.apply(prop.apply(f0, u), v);
    const CVec one = prop.apply(f0, u + v);
    CHECK((two - one).norm() < 1e-9 * f0.norm());
  }
}

TEST_CASE("trajectory norms are non-expansive and dissipative") {
  auto& s = setup();
  const KineticOperator L =
      build_model_L(s.grid, KernelParams(3, 0.0, 0.25), s.basis);
  const ModeOperator op = build_mode_operator(L, 1.3, s.e1);
  VelocityFunction f0 = from_values(
      s.grid,
      (s.grid.sqrt_mu + 0.7 * micro_seed(s.grid, s.basis).real()).cast<Complex>());
  auto traj = evolve_mode(op, f0, times_between(0.05, 50.0, 40));
  double prev = weighted_norm2(f0);
  for (Eigen::Index i = 0; i < traj.states.rows(); ++i) {
    const double cur = weighted_norm2(traj.state(i));
    CHECK(cur <= prev * (1.0 + 1e-12));
    prev = cur;
  }
}

TEST_CASE("energy identity residual is pure second-order differencing error") {
  auto& s = setup();
  const KernelParams flat(3, -0.5, 0.25);
  const KineticOperator L0 = build_model_L(s.grid, flat, s.basis);
  const ModeOperator op = build_mode_operator(L0, 0.0, s.e1);
  VelocityFunction f0 = from_values(s.grid, micro_seed(s.grid, s.basis));

  auto uniform = [](double dt, int steps) {
    std::vector<double> ts;
    for (int i = 0; i <= steps; ++i) ts.push_back(dt * i);
    return ts;
  };
  const double r1 =
      energy_identity_check(evolve_mode(op, f0, uniform(1e-3, 200)), L0);
  const double r2 =
      energy_identity_check(evolve_mode(op, f0, uniform(2e-3, 100)), L0);
  CHECK(r1 < 1e-7);  // measured 5.4e-9 at dt = 1e-3
  CHECK(r2 / r1 > 3.2);
  CHECK(r2 / r1 < 4.8);

  CHECK_THROWS_AS(
      energy_identity_check(evolve_mode(op, f0, {0.0, 1.0}), L0), input_error);
}

TEST_CASE("hard-regime envelope holds with stable dyadic windows") {
  auto& s = setup();
  const KernelParams hard(3, 0.0, 0.25);
  const KineticOperator L = build_model_L(s.grid, hard, s.basis);
  const ModeOperator op = build_mode_operator(L, 1.0, s.e1);
  VelocityFunction micro = from_values(s.grid, micro_seed(s.grid, s.basis));
  auto rep = envelope_check(evolve_mode(op, micro, times_between(0.05, 40.0, 60)),
                            hard, 0.0);
  CHECK(rep.regime == "hard");
  CHECK(rep.status == "ok");
  CHECK(rep.pass);
  CHECK(rep.normalized_rate > 1.0);   // measured 1.21
  CHECK(rep.window_drift < 0.10);     // measured 0.075
  CHECK(rep.window_rates.size() == 3);
}

TEST_CASE("soft-regime windows drift down but the algebraic envelope holds") {
  auto& s = setup();
  const KernelParams soft(3, -1.5, 0.25);
  const KineticOperator Ls = build_model_L(s.grid, soft, s.basis);
  const ModeOperator op = build_mode_operator(Ls, 1.0, s.e1);
  VelocityFunction micro = from_values(s.grid, micro_seed(s.grid, s.basis));
  auto traj = evolve_mode(op, micro, times_between(0.05, 100.0, 80));
  auto rep = envelope_check(traj, soft, 0.0, 4.0);
  CHECK(rep.regime == "soft");
  CHECK(rep.status == "ok");
  CHECK(rep.pass);
  CHECK(rep.window_rates.size() == 3);
  // measured 0.4614, 0.4208, 0.3623: no spectral gap survives the soft weight
  CHECK(rep.window_rates(0) > rep.window_rates(1));
  CHECK(rep.window_rates(1) > rep.window_rates(2));
  CHECK(rep.envelope_margin <= kEnvSoftC);
}

TEST_CASE("envelope check rejects short or senseless inputs") {
  auto& s = setup();
  const KernelParams hard(3, 0.0, 0.25);
  const KineticOperator L = build_model_L(s.grid, hard, s.basis);
  const ModeOperator op = build_mode_operator(L, 1.0, s.e1);
  VelocityFunction micro = from_values(s.grid, micro_seed(s.grid, s.basis));
  auto traj = evolve_mode(op, micro, times_between(0.1, 1.0, 4));
  CHECK_THROWS_AS(envelope_check(traj, hard, 0.0), input_error);
  auto traj8 = evolve_mode(op, micro, times_between(0.1, 1.0, 8));
  CHECK_THROWS_AS(envelope_check(traj8, hard, 0.0, -1.0), input_error);
  // too little decay over the span to fit anything
  CHECK(envelope_check(traj8, hard, 0.0).status == "inconclusive");
}

TEST_CASE("field evolution matches the mode propagator slice by slice") {
  auto& s = setup();
  const KineticOperator L =
      build_model_L(s.grid, KernelParams(3, 0.0, 0.25), s.basis);
  const Vec kappas = geometric_nodes(0.05, 2.0, 6);
  RadialMixedField f0 =
      power_data(s.grid, s.grid.sqrt_mu.cast<Complex>(), 1.0, kappas);
  const auto ts = times_between(0.1, 10.0, 5);
  auto field = evolve_field(f0, L, ts);
  CHECK(field.max_asymmetry < 1e-10);
  CHECK(field.max_error_estimate < 1e-9);

  for (Eigen::Index r = 0; r < kappas.size(); ++r) {
    const ModeOperator op = build_mode_operator(L, kappas(r), s.e1);
    VelocityFunction slice =
        from_values(s.grid, f0.values().row(r).transpose());
    auto traj = evolve_mode(op, slice, ts);
    for (size_t i = 0; i < ts.size(); ++i) {
      const CVec a = field.states[i].values().row(r).transpose();
      const CVec b = traj.states.row(static_cast<Eigen::Index>(i)).transpose();
      CHECK((a - b).norm() < 1e-9 * (1.0 + b.norm()));
    }
  }
}

TEST_CASE("radial data evolves identically along any transport axis") {
  auto& s = setup();
  const KineticOperator L =
      build_model_L(s.grid, KernelParams(3, 0.0, 0.25), s.basis);
  const Vec kappas = geometric_nodes(0.1, 1.0, 4);
  RadialMixedField f0 =
      power_data(s.grid, micro_seed(s.grid, s.basis), 1.5, kappas);
  const auto ts = times_between(0.1, 5.0, 4);
  auto fa = evolve_field(f0, L, ts, 0);
  auto fb = evolve_field(f0, L, ts, 1);
  // states along different axes differ by the axis swap itself, so compare
  // swap-invariant reductions per frequency node
  for (size_t i = 0; i < ts.size(); ++i) {
    for (double ell : {0.0, 2.0}) {
      const Vec na = fa.states[i].node_norm2(ell);
      const Vec nb = fb.states[i].node_norm2(ell);
      CHECK((na - nb).cwiseAbs().maxCoeff() < 1e-9 * (1.0 + na.maxCoeff()));
    }
  }
}

TEST_CASE("field evolution rejects data that is not radial in velocity") {
  auto& s = setup();
  const KineticOperator L =
      build_model_L(s.grid, KernelParams(3, 0.0, 0.25), s.basis);
  const Vec kappas = geometric_nodes(0.1, 1.0, 3);
  CVec skew = s.grid.sqrt_mu.cast<Complex>();
  skew.array() *= (1.0 + s.grid.nodes.col(0).array()).cast<Complex>();
  RadialMixedField f0 = power_data(s.grid, skew, 1.0, kappas);
  CHECK_THROWS_AS(evolve_field(f0, L, {0.0, 1.0}), input_error);
}

TEST_CASE("axis-symmetric odd data is admitted only in axis mode") {
  auto& s = setup();
  const KineticOperator L =
      build_model_L(s.grid, KernelParams(3, 0.0, 0.25), s.basis);
  const Vec kappas = geometric_nodes(0.05, 1.0, 4);
  // odd in v.omega, invariant under the transverse flips and swap
  Vec h = s.grid.nodes.col(0).array() * s.grid.bracket.array().inverse() *
          s.grid.sqrt_mu.array();
  h -= s.basis.projector() * h;
  RadialMixedField f0 = power_data(s.grid, h.cast<Complex>(), 1.0, kappas);
  const auto ts = times_between(0.1, 10.0, 5);

  CHECK_THROWS_AS(evolve_field(f0, L, ts), input_error);

  auto field = evolve_field(f0, L, ts, 0, 1e-8, FieldSymmetry::axis);
  CHECK(field.max_asymmetry < 1e-10);
  for (Eigen::Index r = 0; r < kappas.size(); ++r) {
    const ModeOperator op = build_mode_operator(L, kappas(r), s.e1);
    VelocityFunction slice =
        from_values(s.grid, f0.values().row(r).transpose());
    auto traj = evolve_mode(op, slice, ts);
    for (size_t i = 0; i < ts.size(); ++i) {
      const CVec a = field.states[i].values().row(r).transpose();
      const CVec b = traj.states.row(static_cast<Eigen::Index>(i)).transpose();
      CHECK((a - b).norm() < 1e-9 * (1.0 + b.norm()));
    }
  }

  // axis mode still rejects data odd in a transverse coordinate
  Vec skew = s.grid.nodes.col(1).array() * s.grid.sqrt_mu.array();
  RadialMixedField bad = power_data(s.grid, skew.cast<Complex>(), 1.0, kappas);
  CHECK_THROWS_AS(evolve_field(bad, L, ts, 0, 1e-8, FieldSymmetry::axis),
                  input_error);
}

TEST_CASE("macroscopic norm of microscopic data rises from zero then decays") {
  auto& s = setup();
  const KineticOperator L =
      build_model_L(s.grid, KernelParams(3, 0.0, 0.25), s.basis);
  const Vec kappas = geometric_nodes(0.5, 0.7, 2);
  RadialMixedField f0(3, kappas, &s.grid);
  const CVec seed = micro_seed(s.grid, s.basis);
  f0.values().row(0) = seed.transpose();
  f0.values().row(1) = seed.transpose();

  const auto ts = times_between(0.01, 200.0, 50);
  const auto traj = evolve_field(f0, L, ts);
  const Vec mac = macro_series(traj, s.basis);
  const Vec mic = micro_series(traj, s.basis);

  Eigen::Index peak = 0;
  mac.maxCoeff(&peak);
  CHECK(mic(0) > 0.0);
  CHECK(mac(0) < 1e-4 * mac(peak));  // transport has not coupled yet
  CHECK(peak > 0);
  CHECK(peak + 1 < mac.size());
  CHECK(mac(1) > 2.0 * mac(0));
  CHECK(mac(mac.size() - 1) < 1e-20 * mac(peak));
}

TEST_CASE("macroscopic and microscopic series split the plain norm") {
  auto& s = setup();
  const KineticOperator L =
      build_model_L(s.grid, KernelParams(3, 0.0, 0.25), s.basis);
  const Vec kappas = geometric_nodes(0.05, 2.0, 6);
  RadialMixedField f0 = power_data(
      s.grid,
      (s.grid.sqrt_mu + 0.5 * micro_seed(s.grid, s.basis).real()).cast<Complex>(),
      1.0, kappas);
  auto field = evolve_field(f0, L, times_between(0.1, 10.0, 6));
  const Vec full = norm_series(field, 0.0, 0.0);
  const Vec macro = macro_series(field, s.basis);
  const Vec micro = micro_series(field, s.basis, 0.0);
  for (Eigen::Index i = 0; i < full.size(); ++i)
    CHECK(std::abs(macro(i) + micro(i) - full(i)) < 1e-12 * full(0));

  // Sobolev multiplier only reweights the ladder with plain |xi|^2
  const Vec grad = norm_series(field, 0.0, 1.0);
  for (Eigen::Index i = 0; i < full.size(); ++i) {
    CHECK(grad(i) <=
          kappas.maxCoeff() * kappas.maxCoeff() * full(i) * (1.0 + 1e-12));
    CHECK(grad(i) >=
          kappas.minCoeff() * kappas.minCoeff() * full(i) * (1.0 - 1e-12));
  }
}

TEST_CASE("energy series is monotone and dissipation vanishes on equilibrium") {
  auto& s = setup();
  const KernelParams hard(3, 0.0, 0.25);
  const KineticOperator L = build_model_L(s.grid, hard, s.basis);
  const Vec kappas = geometric_nodes(0.05, 2.0, 8);
  RadialMixedField f0 = power_data(
      s.grid,
      (s.grid.sqrt_mu + 0.5 * micro_seed(s.grid, s.basis).real()).cast<Complex>(),
      1.0, kappas);
  auto field = evolve_field(f0, L, times_between(0.1, 50.0, 12));

  for (int K : {0, 1}) {
    auto es = energy_dissipation_series(field, K, 1.0, hard, s.basis);
    CHECK(es.rho == 1.0);
    CHECK(es.monotone);
    CHECK(es.max_rise <= 1e-10);
    CHECK(es.energy(0) > 0.0);
    CHECK(es.dissipation.minCoeff() >= 0.0);
  }
  CHECK_THROWS_AS(energy_dissipation_series(field, 3, 1.0, hard, s.basis),
                  input_error);

  // pure equilibrium rows carry no microscopic content at t = 0
  RadialMixedField eq =
      power_data(s.grid, s.grid.sqrt_mu.cast<Complex>(), 1.0, kappas);
  auto still = evolve_field(eq, L, {0.0});
  auto es0 = energy_dissipation_series(still, 0, 0.0, hard, s.basis);
  CHECK(es0.dissipation(0) < 1e-12 * es0.energy(0));
}

TEST_CASE("soft weight sets the dissipation exponent") {
  auto& s = setup();
  const KernelParams soft(3, -1.3, 0.25);  // gamma + 2s = -0.8
  const KineticOperator Ls = build_model_L(s.grid, soft, s.basis);
  const Vec kappas = geometric_nodes(0.1, 1.0, 4);
  RadialMixedField f0 =
      power_data(s.grid, micro_seed(s.grid, s.basis), 1.0, kappas);
  auto field = evolve_field(f0, Ls, times_between(0.1, 10.0, 6));
  auto es = energy_dissipation_series(field, 0, 2.0, soft, s.basis);
  CHECK(es.rho == doctest::Approx(0.8).epsilon(1e-12));
}
