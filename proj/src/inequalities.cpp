#include "kdecay/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "kdecay/calibration.hpp"

namespace kdecay {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double inv_or_zero(double p) { return std::isinf(p) ? 0.0 : 1.0 / p; }

void require_lebesgue(double p, const char* where) {
  if (!(p >= 1.0)) throw input_error(std::string(where) + ": exponent below 1");
}

std::string fmt_params(std::initializer_list<std::pair<const char*, double>> kv) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, v] : kv) {
    if (!first) os << " ";
    first = false;
    os << k << "=" << v;
  }
  return os.str();
}

ScalarField block_of(const ScalarField& f, const LPFilterBank& bank, int j) {
  if (!bank.contains(j)) throw input_error("block index outside the bank");
  return f.radial_multiplier([&bank, j](double r) { return bank.block(j, r); });
}

}  // namespace

CheckRow check_bernstein(const ScalarField& f, const LPFilterBank& bank, int j,
                         double p, double q) {
  require_lebesgue(p, "check_bernstein");
  require_lebesgue(q, "check_bernstein");
  if (inv_or_zero(q) < inv_or_zero(p))
    throw input_error("check_bernstein: needs q <= p");

  CheckRow row;
  row.variant = "bernstein";
  row.params = fmt_params({{"j", double(j)}, {"p", p}, {"q", q}});
  const ScalarField g = block_of(f, bank, j);
  if (g.l2_norm() <= 1e-13 * (f.l2_norm() + 1e-300)) {
    row.skipped = true;
    row.note = "empty block";
    return row;
  }
  const double n = f.dim();
  row.lhs = g.lp_norm(p);
  row.rhs = std::exp2((n * inv_or_zero(q) - n * inv_or_zero(p)) * j) * g.lp_norm(q);
  row.ratio = row.lhs / row.rhs;
  row.bound = kCalBernstein;
  row.pass = row.ratio <= row.bound;
  return row;
}

CheckRow check_bernstein(const RadialMixedField& f, const LPFilterBank& bank,
                         int j, double ell) {
  CheckRow row;
  row.variant = "bernstein";
  row.params = fmt_params({{"j", double(j)}, {"p", 2.0}, {"q", 2.0}});
  const Vec blocks = block_norms(f, bank, ell);
  const double b = blocks(j - bank.j_min());
  if (b <= 1e-13 * (std::sqrt(f.norm2(ell)) + 1e-300)) {
    row.skipped = true;
    row.note = "empty block";
    return row;
  }
  row.lhs = b;
  row.rhs = b;
  row.ratio = 1.0;
  row.bound = 1.0;
  row.pass = true;
  return row;
}

CheckRow check_bernstein_riesz(const ScalarField& f, const LPFilterBank& bank,
                               int j, double s) {
  CheckRow row;
  row.variant = "bernstein-riesz";
  row.params = fmt_params({{"j", double(j)}, {"s", s}});
  const ScalarField g = block_of(f, bank, j);
  const double base = g.l2_norm();
  if (base <= 1e-13 * (f.l2_norm() + 1e-300)) {
    row.skipped = true;
    row.note = "empty block";
    return row;
  }
  const ScalarField gs = riesz_apply(g, s);
  row.lhs = gs.l2_norm();
  row.rhs = std::exp2(j * s) * base;
  row.ratio = row.lhs / row.rhs;
  row.bound = std::exp2(std::abs(s));
  row.pass = row.ratio <= row.bound && row.ratio >= 1.0 / row.bound;
  return row;
}

namespace {

// Shared epilogue: constant-1 comparison with additive slack for roundoff.
void finish_holder(CheckRow& row, double lhs, double theta, double rhs_k,
                   double rhs_m) {
  row.lhs = lhs;
  row.rhs = std::pow(rhs_k, theta) * std::pow(rhs_m, 1.0 - theta);
  if (row.rhs <= 0.0) {
    row.skipped = true;
    row.note = "vanishing right-hand side";
    return;
  }
  row.ratio = row.lhs / row.rhs;
  row.bound = 1.0;
  row.pass = row.lhs <= row.rhs + 1e-10;
}

}  // namespace

CheckRow check_holder(const ScalarField& f, const LPFilterBank& bank,
                      const HolderIndices& ix) {
  if (!(ix.m > ix.ell && ix.ell >= ix.k))
    throw input_error("check_holder: needs m > ell >= k");
  require_lebesgue(ix.p, "check_holder");
  require_lebesgue(ix.r, "check_holder");
  require_lebesgue(ix.p_prime, "check_holder");
  require_lebesgue(ix.r_prime, "check_holder");
  if (inv_or_zero(ix.p) < inv_or_zero(ix.r))
    throw input_error("check_holder: needs p <= r");
  if (inv_or_zero(ix.p_prime) < inv_or_zero(ix.r_prime))
    throw input_error("check_holder: needs p' <= r'");

  const double theta = (ix.m - ix.ell) / (ix.m - ix.k);
  const double inv_q = theta * inv_or_zero(ix.r) + (1.0 - theta) * inv_or_zero(ix.p);
  const double inv_qp =
      theta * inv_or_zero(ix.r_prime) + (1.0 - theta) * inv_or_zero(ix.p_prime);
  const double q = inv_q > 0.0 ? 1.0 / inv_q : kInf;
  const double qp = inv_qp > 0.0 ? 1.0 / inv_qp : kInf;

  CheckRow row;
  row.variant = "holder";
  row.params = fmt_params({{"k", ix.k}, {"l", ix.ell}, {"m", ix.m},
                           {"p", ix.p}, {"r", ix.r}, {"theta", theta}});
  finish_holder(row, besov_norm(f, bank, ix.ell, qp, q), theta,
                besov_norm(f, bank, ix.k, ix.r_prime, ix.r),
                besov_norm(f, bank, ix.m, ix.p_prime, ix.p));
  return row;
}

CheckRow check_holder(const RadialMixedField& f, const LPFilterBank& bank,
                      double k, double ell, double m, double p_prime,
                      double r_prime, double vell) {
  if (!(m > ell && ell >= k))
    throw input_error("check_holder: needs m > ell >= k");
  require_lebesgue(p_prime, "check_holder");
  require_lebesgue(r_prime, "check_holder");
  if (inv_or_zero(p_prime) < inv_or_zero(r_prime))
    throw input_error("check_holder: needs p' <= r'");

  const double theta = (m - ell) / (m - k);
  const double inv_qp =
      theta * inv_or_zero(r_prime) + (1.0 - theta) * inv_or_zero(p_prime);
  const double qp = inv_qp > 0.0 ? 1.0 / inv_qp : kInf;

  CheckRow row;
  row.variant = "holder";
  row.params = fmt_params(
      {{"k", k}, {"l", ell}, {"m", m}, {"p", 2.0}, {"r", 2.0}, {"theta", theta}});
  finish_holder(row, besov_norm(f, bank, ell, qp, vell), theta,
                besov_norm(f, bank, k, r_prime, vell),
                besov_norm(f, bank, m, p_prime, vell));
  return row;
}

CheckRow check_opt_sob(const ScalarField& f, const LPFilterBank& bank,
                       const OptSobIndices& ix) {
  require_lebesgue(ix.p, "check_opt_sob");
  require_lebesgue(ix.r, "check_opt_sob");
  if (inv_or_zero(ix.p) > inv_or_zero(ix.r))
    throw input_error("check_opt_sob: needs r <= p");
  if (ix.m == ix.rho) throw input_error("check_opt_sob: needs m != rho");
  const double n = f.dim();
  const double theta =
      (ix.k + n * inv_or_zero(ix.r) - n * inv_or_zero(ix.p) - ix.m) /
      (ix.rho - ix.m);
  if (!(theta > 0.0 && theta < 1.0))
    throw input_error("check_opt_sob: theta outside (0, 1)");

  CheckRow row;
  row.variant = "opt_sob";
  row.params = fmt_params({{"k", ix.k}, {"m", ix.m}, {"rho", ix.rho},
                           {"r", ix.r}, {"p", ix.p}, {"theta", theta}});
  row.lhs = besov_norm(f, bank, ix.k, 1.0, ix.p);
  row.rhs = std::pow(besov_norm(f, bank, ix.m, kInf, ix.r), 1.0 - theta) *
            std::pow(besov_norm(f, bank, ix.rho, kInf, ix.r), theta);
  if (row.rhs <= 0.0) {
    row.skipped = true;
    row.note = "vanishing right-hand side";
    return row;
  }
  row.ratio = row.lhs / row.rhs;
  row.bound = kCalOptSob;
  row.pass = row.ratio <= row.bound;
  return row;
}

CheckRow check_embedding(const ScalarField& f, const LPFilterBank& bank,
                         double p) {
  if (!(p >= 1.0 && p <= 2.0))
    throw input_error("check_embedding: needs 1 <= p <= 2");
  const double n = f.dim();
  const double rho = n / p - 0.5 * n;

  CheckRow row;
  row.variant = "embedding";
  row.params = fmt_params({{"p", p}, {"rho", rho}});
  row.lhs = besov_norm(f, bank, -rho, kInf, 2.0);
  row.rhs = f.lp_norm(p);
  if (row.rhs <= 0.0) {
    row.skipped = true;
    row.note = "vanishing right-hand side";
    return row;
  }
  row.ratio = row.lhs / row.rhs;
  row.bound = kCalEmbed;
  row.pass = row.ratio <= row.bound;
  return row;
}

HeatCharReport check_heat_char(const RadialMixedField& f,
                               const LPFilterBank& bank, double rho,
                               const std::vector<double>& times) {
  if (!(rho > 0.0)) throw input_error("check_heat_char: needs rho > 0");
  std::vector<double> usable;
  for (double t : times)
    if (t >= 1.0) usable.push_back(t);
  std::sort(usable.begin(), usable.end());
  if (usable.size() < 5)
    throw input_error("check_heat_char: need at least 5 samples at t >= 1");

  HeatCharReport rep;
  double log_sum = 0.0;
  double lo = kInf, hi = 0.0;
  for (double t : usable) {
    const double r = std::pow(t, 0.5 * rho) * std::sqrt(heat_apply(f, t).norm2());
    if (!(r > 0.0))
      throw numeric_error("check_heat_char: vanishing heat norm");
    rep.series.emplace_back(t, r);
    log_sum += std::log(r);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  const double gmean = std::exp(log_sum / static_cast<double>(usable.size()));

  rep.plateau.variant = "heat_char-plateau";
  rep.plateau.params = fmt_params({{"rho", rho}, {"tmin", usable.front()},
                                   {"tmax", usable.back()}});
  rep.plateau.lhs = hi;
  rep.plateau.rhs = gmean;
  rep.plateau.ratio = std::max(hi / gmean, gmean / lo);
  rep.plateau.bound = 3.0;
  rep.plateau.pass = rep.plateau.ratio <= rep.plateau.bound;

  rep.equivalence.variant = "heat_char-equivalence";
  rep.equivalence.params = rep.plateau.params;
  rep.equivalence.lhs = hi;
  rep.equivalence.rhs = besov_norm(f, bank, -rho, kInf);
  if (rep.equivalence.rhs <= 0.0)
    throw numeric_error("check_heat_char: vanishing low-frequency seminorm");
  rep.equivalence.ratio = rep.equivalence.lhs / rep.equivalence.rhs;
  if (rho < kCalHeatRhoLo || rho > kCalHeatRhoHi) {
    rep.equivalence.skipped = true;
    rep.equivalence.note = "outside the calibrated rho range";
    rep.equivalence.pass = true;
    return rep;
  }
  const double ref = cal_heat_reference(rho);
  rep.equivalence.bound = kCalHeatBand * ref;
  rep.equivalence.pass = rep.equivalence.ratio >= ref / kCalHeatBand &&
                         rep.equivalence.ratio <= ref * kCalHeatBand;
  rep.equivalence.note = "band around frozen reference";
  return rep;
}

}  // namespace kdecay
