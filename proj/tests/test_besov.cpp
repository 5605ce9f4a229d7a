#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "kdecay/besov.hpp"
#include "kdecay/calibration.hpp"
#include "kdecay/corpus.hpp"
#include "kdecay/inequalities.hpp"

using namespace kdecay;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> times_between(double lo, double hi, int count) {
  const Vec v = geometric_nodes(lo, hi, count);
  return {v.begin(), v.end()};
}

const std::vector<CorpusEntry>& corpus() {
  static const std::vector<CorpusEntry> entries =
      load_corpus(std::string(KDECAY_DATA_DIR) + "/corpus.json");
  return entries;
}

const CorpusEntry& corpus_entry(const std::string& name) {
  for (const auto& e : corpus())
    if (e.name == name) return e;
  throw input_error("corpus entry not found: " + name);
}

ScalarField suite_field(const std::string& name) {
  const CorpusEntry& e = corpus_entry(name);
  return corpus_field(e, corpus_pts(e.dim), corpus_box(e.dim));
}

LPFilterBank suite_bank(int dim) {
  return LPFilterBank(corpus_jmin(dim), corpus_jmax(dim));
}

// Single coefficient on the axis-0 lattice point k0; box 1 makes the
// frequencies integer, so |xi| = k0 exactly.
ScalarField point_mass(int dim, int pts, int k0) {
  ScalarField f(dim, pts, 1.0);
  CVec coeff = CVec::Zero(f.size());
  std::vector<int> k(dim);
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    f.freq_index(i, k.data());
    bool hit = k[0] == k0;
    for (int a = 1; a < dim; ++a) hit = hit && k[a] == 0;
    if (hit) {
      coeff(i) = 1.0;
      break;
    }
  }
  f.set_spectral(coeff);
  return f;
}

// kappa^{rho - n/2} cut at kappa = 1, the profile whose squared heat norm
// integrates in closed form.
RadialMixedField cut_power(double rho, const Vec& nodes) {
  RadialMixedField f(3, nodes, nullptr);
  for (Eigen::Index r = 0; r < f.kappa_count(); ++r) {
    const double k = f.kappa()(r);
    f.values()(r, 0) = k <= 1.0 ? std::pow(k, rho - 1.5) : 0.0;
  }
  return f;
}

double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

}  // namespace

TEST_CASE("dyadic blocks partition the covered band exactly") {
  LPFilterBank bank(-7, 3);

  for (int j = bank.j_min(); j <= bank.j_max(); ++j)
    CHECK(std::abs(bank.partition_sum(std::exp2(j)) - 1.0) < 1e-15);

  // r = 3 * 2^j sits between 2^{j+1} and 2^{j+2}: exactly two blocks carry
  // it and the lower neighbor is dead.
  const double r = 3.0 * std::exp2(-2);
  CHECK(bank.block(-2, r) == 0.0);
  CHECK(bank.block(-1, r) + bank.block(0, r) == doctest::Approx(1.0));
  CHECK(bank.block(1, r) == 0.0);

  std::mt19937 gen(314);
  std::uniform_real_distribution<double> u(
      static_cast<double>(bank.j_min()), static_cast<double>(bank.j_max()));
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i)
    worst = std::max(worst,
                     std::abs(bank.partition_sum(std::exp2(u(gen))) - 1.0));
  CHECK(worst < 1e-12);

  // Below half the lowest block the telescoped sum vanishes identically.
  CHECK(bank.partition_sum(std::exp2(bank.j_min() - 1)) == 0.0);
  CHECK(bank.partition_sum(0.0) == 0.0);

  CHECK_THROWS_AS(LPFilterBank(2, 1), input_error);
}

TEST_CASE("a point mass loads a single block at its exact dyadic scale") {
  ScalarField f = point_mass(1, 64, 4);  // |xi| = 4 = 2^2
  LPFilterBank bank(-3, 3);

  const Vec blocks = block_norms(f, bank, 2.0);
  for (int j = bank.j_min(); j <= bank.j_max(); ++j) {
    const double b = blocks(j - bank.j_min());
    if (j == 2)
      CHECK(b == doctest::Approx(f.l2_norm()).epsilon(1e-14));
    else
      CHECK(b < 1e-15);
  }

  // With one live block every l^q combination gives the same number.
  const double rho = 0.7;
  const double expected = std::exp2(2.0 * rho) * f.l2_norm();
  for (double q : {1.0, 2.0, kInf})
    CHECK(rel_diff(besov_norm(f, bank, rho, q, 2.0), expected) < 1e-12);
}

TEST_CASE("power-law spectra load every block equally") {
  const Vec nodes = geometric_nodes(std::exp2(-9), std::exp2(4), 900);
  LPFilterBank bank(-6, 1);
  for (double rho : {0.5, 1.0, 1.5}) {
    const RadialMixedField f = [&] {
      RadialMixedField g(3, nodes, nullptr);
      for (Eigen::Index r = 0; r < g.kappa_count(); ++r)
        g.values()(r, 0) = std::pow(g.kappa()(r), rho - 1.5);
      return g;
    }();
    const Vec blocks = block_norms(f, bank);
    double lo = 1e300, hi = 0.0;
    for (int j = bank.j_min(); j <= bank.j_max(); ++j) {
      const double scaled = std::exp2(-rho * j) * blocks(j - bank.j_min());
      lo = std::min(lo, scaled);
      hi = std::max(hi, scaled);
    }
    CHECK(hi / lo < 1.001);
    // q = inf reads off exactly that common value.
    CHECK(rel_diff(besov_norm(f, bank, -rho, kInf), hi) < 1e-12);
  }
}

TEST_CASE("summing squared blocks recovers the square norm up to overlap") {
  const ScalarField f = suite_field("ring1");
  const LPFilterBank bank = suite_bank(1);
  const double ratio = besov_norm(f, bank, 0.0, 2.0, 2.0) / f.l2_norm();

  // Adjacent blocks overlap, so the quadratic partition dips to 1/2 at the
  // crossovers but never exceeds 1.
  CHECK(ratio >= std::sqrt(0.5));
  CHECK(ratio <= 1.0 + 1e-12);

  // Frozen regression value for this spectrum on the suite grid.
  CHECK(ratio == doctest::Approx(0.887007456).epsilon(1e-6));
}

TEST_CASE("besov norms are monotone in the summation exponent") {
  for (const char* name : {"ring1", "pc1-steep", "g3-mid", "rp3-a"}) {
    const ScalarField f = suite_field(name);
    const LPFilterBank bank = suite_bank(f.dim());
    for (double rho : {-0.5, 0.0, 1.0}) {
      const double b_inf = besov_norm(f, bank, rho, kInf, 2.0);
      const double b_2 = besov_norm(f, bank, rho, 2.0, 2.0);
      const double b_1 = besov_norm(f, bank, rho, 1.0, 2.0);
      CHECK(b_inf <= b_2 * (1 + 1e-12));
      CHECK(b_2 <= b_1 * (1 + 1e-12));
    }
  }
  CHECK_THROWS_AS(besov_combine(Vec::Ones(3), LPFilterBank(0, 2), 0.0, 0.5),
                  input_error);
}

TEST_CASE("zero-order multiplier is the identity and orders compose") {
  const ScalarField f = suite_field("ring1");  // no zero mode
  CHECK((riesz_apply(f, 0.0).spectral() - f.spectral()).norm() == 0.0);

  const ScalarField ab = riesz_apply(riesz_apply(f, 1.3), -0.5);
  const ScalarField sum = riesz_apply(f, 0.8);
  CHECK((ab.spectral() - sum.spectral()).norm() < 1e-12 * sum.spectral().norm());

  // Point scaling: a pure frequency of magnitude 4 gains exactly 4^s.
  const ScalarField p = point_mass(1, 64, 4);
  CHECK(rel_diff(riesz_apply(p, 1.5).l2_norm(), std::pow(4.0, 1.5) * p.l2_norm()) <
        1e-12);

  // Negative orders reject a nonzero zero mode.
  CHECK_THROWS_AS(riesz_apply(suite_field("g1-broad"), -1.0), input_error);

  const RadialMixedField rf = cut_power(1.0, geometric_nodes(1e-3, 2.0, 200));
  const RadialMixedField rab = riesz_apply(riesz_apply(rf, 0.7), -0.2);
  const RadialMixedField rsum = riesz_apply(rf, 0.5);
  CHECK((rab.values() - rsum.values()).norm() <
        1e-12 * rsum.values().norm());
}

TEST_CASE("heat flow is a contraction semigroup in frequency") {
  const ScalarField f = suite_field("ring1");
  CHECK((heat_apply(f, 0.0).spectral() - f.spectral()).norm() == 0.0);

  const ScalarField two = heat_apply(heat_apply(f, 0.3), 0.7);
  const ScalarField one = heat_apply(f, 1.0);
  CHECK((two.spectral() - one.spectral()).norm() <
        1e-12 * one.spectral().norm());

  // A pure frequency of magnitude 1 decays by exactly exp(-4 pi^2) per unit
  // time.
  const ScalarField p = point_mass(1, 64, 1);
  CHECK(rel_diff(heat_apply(p, 1.0).l2_norm(),
                 std::exp(-4.0 * pi * pi) * p.l2_norm()) < 1e-12);

  // The multiplier never exceeds 1, so no block and no besov norm grows.
  const LPFilterBank bank = suite_bank(1);
  const Vec before = block_norms(f, bank, 2.0);
  const Vec after = block_norms(heat_apply(f, 0.05), bank, 2.0);
  for (Eigen::Index i = 0; i < before.size(); ++i)
    CHECK(after(i) <= before(i) * (1 + 1e-12));
  for (double rho : {-1.0, 0.0, 1.5})
    CHECK(besov_norm(heat_apply(f, 0.05), bank, rho, 2.0, 2.0) <=
          besov_norm(f, bank, rho, 2.0, 2.0) * (1 + 1e-12));

  CHECK_THROWS_AS(heat_apply(f, -0.1), input_error);
}

TEST_CASE("heat decay of the cut power-law matches its closed form") {
  // |heat(t) f|^2 = 4 pi int_0^1 exp(-8 pi^2 k^2 t) k dk
  //              = (1 - exp(-8 pi^2 t)) / (4 pi t)  for rho = 1.
  const RadialMixedField f = cut_power(1.0, geometric_nodes(1e-4, 1.0, 400));
  for (double t : {1.0, 10.0, 100.0}) {
    const double exact = (1.0 - std::exp(-8.0 * pi * pi * t)) / (4.0 * pi * t);
    CHECK(rel_diff(heat_apply(f, t).norm2() , exact) < 0.01);
  }
}

TEST_CASE("doubling the argument shifts blocks by one and nothing else") {
  for (const char* name : {"ring1", "ring3-low"}) {
    const ScalarField f = suite_field(name);
    const int n = f.dim();
    const LPFilterBank bank(corpus_jmin(n) - 1, corpus_jmax(n) + 1);
    const ScalarField d = dilate_dyadic(f);

    CHECK(rel_diff(d.l2_norm(), std::exp2(-0.5 * n) * f.l2_norm()) < 1e-12);

    const Vec bf = block_norms(f, bank, 2.0);
    const Vec bd = block_norms(d, bank, 2.0);
    for (int j = bank.j_min(); j < bank.j_max(); ++j) {
      const double orig = bf(j - bank.j_min());
      const double shifted = bd(j + 1 - bank.j_min());
      if (orig < 1e-13 * f.l2_norm()) continue;
      CHECK(rel_diff(shifted, std::exp2(-0.5 * n) * orig) < 1e-10);
    }

    // The block comparison is built from homogeneous quantities, so its
    // ratio is invariant under the dilation.
    for (int j : {-3, -2, -1}) {
      const CheckRow r0 = check_bernstein(f, bank, j, kInf, 1.0);
      const CheckRow r1 = check_bernstein(d, bank, j + 1, kInf, 1.0);
      if (r0.skipped || r1.skipped) continue;
      CHECK(rel_diff(r1.ratio, r0.ratio) < 1e-10);
    }
  }

  // Radial backend: nodes double, mass scales identically.
  const RadialMixedField rf = cut_power(1.0, geometric_nodes(1e-3, 1.0, 300));
  const RadialMixedField rd = dilate_dyadic(rf);
  CHECK(rel_diff(rd.norm2(), std::exp2(-3.0) * rf.norm2()) < 1e-12);
  const LPFilterBank rbank(-8, 2);
  const Vec brf = block_norms(rf, rbank);
  const Vec brd = block_norms(rd, rbank);
  for (int j = rbank.j_min(); j < rbank.j_max(); ++j) {
    const double orig = brf(j - rbank.j_min());
    if (orig < 1e-13) continue;
    CHECK(rel_diff(brd(j + 1 - rbank.j_min()), std::exp2(-1.5) * orig) <
          1e-10);
  }
}

TEST_CASE("block comparison with matched exponents is an identity") {
  const ScalarField f = suite_field("pc1-steep");
  const LPFilterBank bank = suite_bank(1);
  bool saw_live = false;
  for (int j = bank.j_min(); j <= bank.j_max(); ++j) {
    const CheckRow row = check_bernstein(f, bank, j, 2.0, 2.0);
    if (row.skipped) continue;
    saw_live = true;
    CHECK(row.ratio == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(row.pass);
  }
  CHECK(saw_live);

  const RadialMixedField rf = cut_power(1.0, geometric_nodes(1e-3, 1.0, 200));
  const CheckRow rrow = check_bernstein(rf, LPFilterBank(-8, 1), -4);
  CHECK(rrow.ratio == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(check_bernstein(f, bank, 0, 1.0, 2.0), input_error);
  CHECK_THROWS_AS(check_bernstein(f, bank, 0, 2.0, 0.5), input_error);
  CHECK_THROWS_AS(check_bernstein(f, bank, bank.j_max() + 1, 2.0, 2.0),
                  input_error);
}

TEST_CASE("block comparison regression pin on the suite corpus") {
  // Largest measured ratio over the whole corpus; the frozen bound is twice
  // this value, so the check must pass with margin.
  const ScalarField f = suite_field("ring3-low");
  const CheckRow row = check_bernstein(f, suite_bank(3), -4, kInf, 1.0);
  CHECK_FALSE(row.skipped);
  CHECK(row.pass);
  CHECK(row.bound == doctest::Approx(kCalBernstein));
  CHECK(row.ratio == doctest::Approx(9.090047).epsilon(1e-3));
}

TEST_CASE("multiplier order shifts block norms by the block scale") {
  const ScalarField f = suite_field("ring1");
  const LPFilterBank bank = suite_bank(1);
  for (double s : {-1.3, 0.5, 2.0}) {
    for (int j = bank.j_min(); j <= bank.j_max(); ++j) {
      const CheckRow row = check_bernstein_riesz(f, bank, j, s);
      if (row.skipped) continue;
      CHECK(row.pass);
      CHECK(row.ratio >= std::exp2(-std::abs(s)) * (1 - 1e-12));
      CHECK(row.ratio <= std::exp2(std::abs(s)) * (1 + 1e-12));
    }
  }
  // On a point mass at the exact block center the shift is exact.
  const ScalarField p = point_mass(1, 64, 4);
  const LPFilterBank pbank(-3, 3);
  const CheckRow row = check_bernstein_riesz(p, pbank, 2, 1.7);
  CHECK(row.ratio == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("interpolation holds at constant one across the corpus") {
  const std::vector<HolderIndices> configs = {
      {0.0, 0.5, 1.0, 2.0, 2.0, 2.0, 2.0},
      {-1.0, -0.25, 0.5, 2.0, 4.0, 1.0, kInf},
      {-0.5, 0.0, 1.0, 2.0, kInf, 2.0, 2.0},
  };
  for (const auto& e : corpus()) {
    const ScalarField f = corpus_field(e, corpus_pts(e.dim), corpus_box(e.dim));
    const LPFilterBank bank = suite_bank(e.dim);
    for (const auto& ix : configs) {
      const CheckRow row = check_holder(f, bank, ix);
      CHECK((row.pass || row.skipped));
    }
  }
}

TEST_CASE("interpolation is exact on a single live block") {
  const ScalarField p = point_mass(1, 64, 4);
  const LPFilterBank bank(-3, 3);
  HolderIndices ix;
  ix.k = -0.5;
  ix.ell = 0.3;
  ix.m = 1.7;
  const CheckRow row = check_holder(p, bank, ix);
  CHECK_FALSE(row.skipped);
  CHECK(row.ratio == doctest::Approx(1.0).epsilon(1e-12));

  HolderIndices bad = ix;
  bad.ell = -1.0;
  CHECK_THROWS_AS(check_holder(p, bank, bad), input_error);
  bad = ix;
  bad.r = 1.0;  // p > r
  CHECK_THROWS_AS(check_holder(p, bank, bad), input_error);
}

TEST_CASE("radial interpolation holds with the same constant") {
  const Vec nodes = geometric_nodes(1e-3, 2.0, 300);
  for (double rho : {0.5, 1.0}) {
    const RadialMixedField f = cut_power(rho, nodes);
    const LPFilterBank bank(-9, 1);
    for (auto [pp, rp] : {std::pair{1.0, 2.0}, std::pair{2.0, kInf}}) {
      const CheckRow row = check_holder(f, bank, -0.5, 0.0, 1.0, pp, rp);
      CHECK((row.pass || row.skipped));
    }
  }
}

TEST_CASE("low-frequency embedding stays inside its frozen constant") {
  const CheckRow row = check_embedding(suite_field("g3-mid"), suite_bank(3), 1.0);
  CHECK(row.pass);
  CHECK(row.bound == doctest::Approx(kCalEmbed));
  CHECK(row.ratio == doctest::Approx(3.037678).epsilon(1e-3));

  // p = 2 collapses to a triviality: the largest block never beats the sum.
  const CheckRow p2 = check_embedding(suite_field("ring1"), suite_bank(1), 2.0);
  CHECK(p2.ratio <= 1.0 + 1e-12);
  CHECK(p2.pass);

  CHECK_THROWS_AS(check_embedding(suite_field("ring1"), suite_bank(1), 3.0),
                  input_error);
}

TEST_CASE("convexity estimate stays inside its frozen constant") {
  OptSobIndices ix;
  ix.k = 0.0;
  ix.m = 2.0;
  ix.rho = -1.0;
  ix.r = 2.0;
  ix.p = 6.0;
  const CheckRow row = check_opt_sob(suite_field("g3-broad"), suite_bank(3), ix);
  CHECK(row.pass);
  CHECK(row.bound == doctest::Approx(kCalOptSob));
  CHECK(row.ratio == doctest::Approx(2.573776).epsilon(1e-3));

  OptSobIndices bad = ix;
  bad.rho = 2.0;  // theta lands outside (0, 1)
  CHECK_THROWS_AS(check_opt_sob(suite_field("g3-broad"), suite_bank(3), bad),
                  input_error);
}

TEST_CASE("heat flow reads off the low-frequency seminorm") {
  const Vec nodes = geometric_nodes(1e-4, 2.0, 480);
  const LPFilterBank bank(-15, 2);
  const std::vector<double> times = times_between(1.0, 1e4, 25);

  // Anchor of the calibration: ratio reproduces the frozen reference.
  const auto anchor = check_heat_char(cut_power(1.0, nodes), bank, 1.0, times);
  CHECK(anchor.plateau.pass);
  CHECK(anchor.equivalence.pass);
  CHECK(anchor.equivalence.ratio == doctest::Approx(0.096712).epsilon(1e-3));

  // Between anchors the interpolated reference still brackets the profile.
  const auto mid = check_heat_char(cut_power(0.75, nodes), bank, 0.75, times);
  CHECK(mid.plateau.pass);
  CHECK(mid.equivalence.pass);

  // Outside the calibrated range only the plateau is judged.
  const auto far = check_heat_char(cut_power(2.0, nodes), bank, 2.0, times);
  CHECK(far.plateau.pass);
  CHECK(far.equivalence.skipped);
  CHECK(far.pass());

  CHECK_THROWS_AS(
      check_heat_char(cut_power(1.0, nodes), bank, 1.0, {1.0, 2.0, 3.0}),
      input_error);
  CHECK_THROWS_AS(
      check_heat_char(cut_power(1.0, nodes), bank, 0.0, times), input_error);
}
