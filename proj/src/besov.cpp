#include "kdecay/besov.hpp"

#include <cmath>

namespace kdecay {

Vec block_norms(const ScalarField& f, const LPFilterBank& bank, double p) {
  Vec out(bank.block_count());
  for (int j = bank.j_min(); j <= bank.j_max(); ++j) {
    ScalarField blk =
        f.radial_multiplier([&](double r) { return bank.block(j, r); });
    out(j - bank.j_min()) = p == 2.0 ? blk.l2_norm() : blk.lp_norm(p);
  }
  return out;
}

Vec block_norms(const RadialMixedField& f, const LPFilterBank& bank,
                double ell) {
  const Vec node = f.node_norm2(ell);
  Vec out(bank.block_count());
  for (int j = bank.j_min(); j <= bank.j_max(); ++j) {
    double acc = 0.0;
    for (Eigen::Index r = 0; r < f.kappa_count(); ++r) {
      const double phi = bank.block(j, f.kappa()(r));
      acc += f.weight()(r) * phi * phi * node(r);
    }
    out(j - bank.j_min()) = std::sqrt(acc);
  }
  return out;
}

double besov_combine(const Vec& blocks, const LPFilterBank& bank, double rho,
                     double q) {
  if (blocks.size() != bank.block_count())
    throw input_error("besov_combine: block count mismatch");
  if (q < 1.0) throw input_error("besov_combine: q must be >= 1");
  double acc = 0.0;
  for (int j = bank.j_min(); j <= bank.j_max(); ++j) {
    const double term =
        std::exp2(rho * static_cast<double>(j)) * blocks(j - bank.j_min());
    if (std::isinf(q))
      acc = std::max(acc, term);
    else
      acc += std::pow(term, q);
  }
  return std::isinf(q) ? acc : std::pow(acc, 1.0 / q);
}

double besov_norm(const ScalarField& f, const LPFilterBank& bank, double rho,
                  double q, double p) {
  return besov_combine(block_norms(f, bank, p), bank, rho, q);
}

double besov_norm(const RadialMixedField& f, const LPFilterBank& bank,
                  double rho, double q, double ell) {
  return besov_combine(block_norms(f, bank, ell), bank, rho, q);
}

namespace {
// Shared zero-mode rule for the |xi|^k multiplier.
double riesz_factor(double r, double k, bool* reject) {
  if (r > 0.0) return std::pow(r, k);
  if (k > 0.0) return 0.0;
  if (k == 0.0) return 1.0;
  *reject = true;
  return 0.0;
}
}  // namespace

ScalarField riesz_apply(const ScalarField& f, double k) {
  bool reject = false;
  ScalarField out = f.radial_multiplier([&](double r) {
    bool zero_hit = false;
    const double m = riesz_factor(r, k, &zero_hit);
    if (zero_hit) reject = true;
    return m;
  });
  if (reject) {
    // Only an actually-present zero mode is an error.
    for (Eigen::Index i = 0; i < f.size(); ++i)
      if (f.freq_norm(i) == 0.0 && std::abs(f.spectral()(i)) > 0.0)
        throw input_error("riesz_apply: negative order on nonzero zero mode");
  }
  return out;
}

RadialMixedField riesz_apply(const RadialMixedField& f, double k) {
  if (k < 0.0 && f.kappa()(0) == 0.0 && f.values().row(0).norm() > 0.0)
    throw input_error("riesz_apply: negative order on nonzero zero mode");
  return f.radial_multiplier(
      [&](double r) { return r > 0.0 ? std::pow(r, k) : (k == 0.0 ? 1.0 : 0.0); });
}

namespace {
double heat_factor(double r, double t) {
  return std::exp(-4.0 * pi * pi * r * r * t);
}
}  // namespace

ScalarField heat_apply(const ScalarField& f, double t) {
  if (t < 0.0) throw input_error("heat_apply: t must be >= 0");
  return f.radial_multiplier([&](double r) { return heat_factor(r, t); });
}

RadialMixedField heat_apply(const RadialMixedField& f, double t) {
  if (t < 0.0) throw input_error("heat_apply: t must be >= 0");
  return f.radial_multiplier([&](double r) { return heat_factor(r, t); });
}

ScalarField dilate_dyadic(const ScalarField& f) {
  ScalarField out(f.dim(), f.pts(), 0.5 * f.box());
  out.set_spectral(f.spectral());
  return out;
}

RadialMixedField dilate_dyadic(const RadialMixedField& f) {
  RadialMixedField out(f.ambient_dim(), 2.0 * f.kappa(), f.vgrid());
  out.values() = f.values() * std::exp2(-static_cast<double>(f.ambient_dim()));
  return out;
}

}  // namespace kdecay
