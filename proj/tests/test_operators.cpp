#include <doctest.h>

#include <cmath>
#include <random>

#include "kdecay/operators.hpp"

using namespace kdecay;

namespace {

VelocityFunction random_function(const VelocityGrid& g, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> dist;
  VelocityFunction f;
  f.grid = &g;
  f.values.resize(g.size());
  for (Eigen::Index k = 0; k < g.size(); ++k)
    f.values(k) = Complex(dist(rng), dist(rng));
  return f;
}

}  // namespace

TEST_CASE("macroscopic basis is orthonormal with n + 2 elements") {
  for (int n : {1, 2, 3}) {
    VelocityGrid g = build_hermite_grid(n, 8);
    MacroBasis basis(g);
    CHECK(basis.count() == n + 2);

    const Mat& e = basis.matrix();
    Mat gram = e.transpose() * g.quad.asDiagonal() * e;
    CHECK((gram - Mat::Identity(n + 2, n + 2)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("projector is idempotent and self-adjoint under the quadrature") {
  VelocityGrid g = build_hermite_grid(3, 8);
  MacroBasis basis(g);
  const Mat& p = basis.projector();

  CHECK((p * p - p).cwiseAbs().maxCoeff() < 1e-12);

  // self-adjointness w.r.t. <f, g> = sum quad f conj(g): Q P symmetric
  Mat qp = g.quad.asDiagonal() * p;
  CHECK((qp - qp.transpose()).cwiseAbs().maxCoeff() < 1e-12);

  CHECK(std::abs(p.trace() - basis.count()) < 1e-10);

  for (int a = 0; a < basis.count(); ++a) {
    Vec ea = basis.matrix().col(a);
    CHECK((p * ea - ea).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("projection coefficients recover a known macroscopic combination") {
  VelocityGrid g = build_hermite_grid(3, 8);
  MacroBasis basis(g);

  // f = 2 sqrt(mu) + 3 v1 sqrt(mu) - 0.5 energy element
  VelocityFunction f;
  f.grid = &g;
  f.values = (2.0 * basis.matrix().col(0) + 3.0 * basis.matrix().col(1) -
              0.5 * basis.matrix().col(4))
                 .cast<Complex>();
  Projection pr = project_P(f, basis);
  CHECK(std::abs(pr.a - 2.0) < 1e-12);
  CHECK(std::abs(pr.b(0) - 3.0) < 1e-12);
  CHECK(std::abs(pr.b(1)) < 1e-12);
  CHECK(std::abs(pr.b(2)) < 1e-12);
  CHECK(std::abs(pr.c + 0.5) < 1e-12);
  CHECK((pr.pf.values - f.values).cwiseAbs().maxCoeff() < 1e-12);

  // projecting a projection is the identity on the macroscopic subspace
  Projection twice = project_P(pr.pf, basis);
  CHECK((twice.pf.values - pr.pf.values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("model operator validates with unit coercivity constant") {
  VelocityGrid g = build_hermite_grid(3, 8);
  MacroBasis basis(g);
  for (KernelParams p : {KernelParams(3, 0.0, 0.25), KernelParams(3, 1.0, 0.5),
                         KernelParams(3, -1.5, 0.25)}) {
    KineticOperator op = build_model_L(g, p, basis);
    OperatorReport rep = validate_operator(op, basis);
    CHECK(rep.pass());
    CHECK(rep.null_residual < 1e-10);
    CHECK(rep.min_rayleigh > -1e-10);
    CHECK(std::abs(rep.lambda_measured - 1.0) < 1e-10);
    CHECK(rep.micro_gap > 0.0);
    CHECK(op.lambda == 1.0);
  }
}

TEST_CASE("model operator is symmetric in orthonormal coordinates") {
  VelocityGrid g = build_hermite_grid(3, 8);
  MacroBasis basis(g);
  KineticOperator op = build_model_L(g, KernelParams(3, 0.5, 0.25), basis);
  Mat sym = to_orthonormal(op.matrix, g);
  CHECK((sym - sym.transpose()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("quadratic form of the model operator is the microscopic weighted norm") {
  VelocityGrid g = build_hermite_grid(3, 8);
  MacroBasis basis(g);
  KernelParams p(3, 1.0, 0.5);  // gamma + 2s = 2
  KineticOperator op = build_model_L(g, p, basis);

  for (unsigned seed : {1u, 2u, 3u, 4u, 5u}) {
    VelocityFunction f = random_function(g, seed);
    CVec lf = op.matrix.cast<Complex>() * f.values;
    const Complex quad_form =
        (g.quad.array().cast<Complex>() * f.values.array().conjugate() *
         lf.array())
            .sum();

    CVec micro = f.values - basis.projector().cast<Complex>() * f.values;
    const double target =
        (g.quad.array() * g.bracket.array().pow(p.weight_power()) *
         micro.array().abs2())
            .sum();
    CHECK(std::abs(quad_form.real() - target) < 1e-10 * (1.0 + target));
    CHECK(std::abs(quad_form.imag()) < 1e-10 * (1.0 + target));
  }
}

TEST_CASE("flat collision weight reduces the operator to the projection complement") {
  VelocityGrid g = build_hermite_grid(3, 8);
  MacroBasis basis(g);
  KineticOperator op = build_model_L(g, KernelParams(3, -0.5, 0.25), basis);

  Mat q = Mat::Identity(g.size(), g.size()) - basis.projector();
  CHECK((op.matrix - q).cwiseAbs().maxCoeff() < 1e-12);

  OperatorReport rep = validate_operator(op, basis);
  CHECK(std::abs(rep.micro_gap - 1.0) < 1e-10);
}

TEST_CASE("validate_operator flags a broken null space") {
  VelocityGrid g = build_hermite_grid(3, 8);
  MacroBasis basis(g);
  KineticOperator op = build_model_L(g, KernelParams(3, 0.0, 0.25), basis);
  // plain multiplication operator has no macroscopic kernel
  op.matrix = g.bracket.array().pow(0.5).matrix().asDiagonal();
  OperatorReport rep = validate_operator(op, basis);
  CHECK(!rep.null_space_ok);
  CHECK(!rep.pass());
}

TEST_CASE("orthonormal conjugation round-trips and preserves symmetry") {
  VelocityGrid g = build_hermite_grid(2, 8);
  std::mt19937 rng(7);
  std::normal_distribution<double> dist;
  CMat a(g.size(), g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i)
    for (Eigen::Index j = 0; j < g.size(); ++j)
      a(i, j) = Complex(dist(rng), dist(rng));
  CMat back = from_orthonormal(to_orthonormal(a, g), g);
  CHECK((back - a).cwiseAbs().maxCoeff() < 1e-12 * a.cwiseAbs().maxCoeff());
}

TEST_CASE("mode operator adds the skew transport multiplier") {
  VelocityGrid g = build_hermite_grid(3, 8);
  MacroBasis basis(g);
  KineticOperator op = build_model_L(g, KernelParams(3, 0.0, 0.25), basis);

  Vec omega = Vec::Zero(3);
  omega(0) = 1.0;
  const double kappa = 0.7;
  ModeOperator mode = build_mode_operator(op, kappa, omega);
  CHECK(mode.kappa == kappa);

  CMat diff = mode.matrix - op.matrix.cast<Complex>();
  for (Eigen::Index k = 0; k < g.size(); ++k) {
    const Complex expect =
        Complex(0.0, 2.0 * pi * kappa * g.nodes(k, 0));
    CHECK(std::abs(diff(k, k) - expect) < 1e-14);
  }
  diff.diagonal().setZero();
  CHECK(diff.cwiseAbs().maxCoeff() < 1e-14);

  // transport part is skew in orthonormal coordinates: A + A^H = 2 sym(L)
  CMat a = to_orthonormal(mode.matrix, g);
  CMat herm = a + a.adjoint();
  Mat twol = 2.0 * to_orthonormal(op.matrix, g);
  CHECK((herm - twol.cast<Complex>()).cwiseAbs().maxCoeff() < 1e-12);

  ModeOperator zero = build_mode_operator(op, 0.0, omega);
  CHECK((zero.matrix - op.matrix.cast<Complex>()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("operator constructors reject inconsistent inputs") {
  VelocityGrid g = build_hermite_grid(3, 8);
  VelocityGrid g2 = build_hermite_grid(2, 8);
  MacroBasis basis(g);
  MacroBasis basis2(g2);

  CHECK_THROWS_AS(build_model_L(g, KernelParams(3, 1.0, 0.5), basis2),
                  input_error);
  CHECK_THROWS_AS(build_model_L(g, KernelParams(2, 1.0, 0.5), basis),
                  input_error);

  KineticOperator op = build_model_L(g, KernelParams(3, 1.0, 0.5), basis);
  CHECK_THROWS_AS(validate_operator(op, basis2), input_error);

  Vec omega = Vec::Zero(3);
  omega(0) = 2.0;
  CHECK_THROWS_AS(build_mode_operator(op, 1.0, omega), input_error);
  omega(0) = 1.0;
  CHECK_THROWS_AS(build_mode_operator(op, -1.0, omega), input_error);
  Vec omega2 = Vec::Zero(2);
  omega2(0) = 1.0;
  CHECK_THROWS_AS(build_mode_operator(op, 1.0, omega2), input_error);
}
