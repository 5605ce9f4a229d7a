#include "kdecay/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace kdecay {

bool RateExpr::dominates(const RateExpr& other) const {
  if (power != other.power) return power > other.power;
  return log_power < other.log_power;
}

double RateExpr::envelope(double t) const {
  double e = std::pow(1.0 + t, -power);
  for (int j = 0; j < log_power; ++j) e *= std::log(2.0 + t);
  return e;
}

ConvRate conv_rate(double half_rho, double alpha) {
  if (half_rho <= 0.0 || alpha <= 0.0)
    throw input_error("conv_rate: both exponents must be positive");
  ConvRate out;
  out.rate.power = std::min({half_rho + alpha - 1.0, half_rho, alpha});
  const double top = std::max(half_rho, alpha);
  if (std::abs(top - 1.0) <= 1e-12) {
    out.rate.log_power = 1;
  } else if (std::abs(top - 1.0) <= 1e-6) {
    out.near_threshold = true;
  }
  return out;
}

ConvReport conv_rate_validate(double half_rho, double alpha,
                              const std::vector<double>& times) {
  ConvReport report;
  report.rate = conv_rate(half_rho, alpha).rate;

  std::vector<double> usable;
  for (double t : times)
    if (t >= 1.0) usable.push_back(t);
  std::sort(usable.begin(), usable.end());
  if (usable.size() < 10)
    throw input_error("conv_rate_validate: need at least 10 samples at t >= 1");
  if (usable.back() < 100.0 * usable.front())
    throw input_error("conv_rate_validate: samples must span two decades");

  report.ratio_min = std::numeric_limits<double>::infinity();
  report.ratio_max = 0.0;
  for (double t : usable) {
    auto integrand = [&](double tau) {
      return std::pow(1.0 + t - tau, -half_rho) * std::pow(1.0 + tau, -alpha);
    };
    double err = 0.0;
    const double integral =
        boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
            integrand, 0.0, t, 15, 1e-10, &err);
    if (!(integral > 0.0) || err > 1e-6 * integral)
      throw numeric_error("conv_rate_validate: quadrature failed to converge");
    ConvSample s;
    s.t = t;
    s.integral = integral;
    s.predicted = report.rate.envelope(t);
    s.ratio = integral / s.predicted;
    report.ratio_min = std::min(report.ratio_min, s.ratio);
    report.ratio_max = std::max(report.ratio_max, s.ratio);
    report.samples.push_back(s);
  }
  return report;
}

BootstrapResult bootstrap_alpha(double rho, int n) {
  if (n < 3) throw input_error("bootstrap_alpha: dimension must be at least 3");
  if (rho <= 0.5 * n || rho > 0.5 * (n + 2))
    throw input_error("bootstrap_alpha: rho must lie in (n/2, (n+2)/2]");

  BootstrapResult out;
  out.terminal = RateExpr{rho, 0};

  if (rho > 2.0) {
    out.alphas = {rho - 1.0};
    out.intermediates = {RateExpr{rho, 0}};
    out.steps = 1;
    out.note = "direct case: one pass at the half rate closes the bound";
    return out;
  }
  if (rho == 2.0) {
    out.alphas = {1.0};
    out.intermediates = {RateExpr{2.0, 2}, RateExpr{2.0, 0}};
    out.steps = 2;
    out.note = "borderline case: the first pass costs log^2, a second pass removes it";
    return out;
  }

  // rho in (3/2, 2), reachable only for n = 3
  double a = 3.0 * rho - 4.0;
  out.alphas.push_back(a);
  out.intermediates.push_back(RateExpr{2.0 * std::min(0.5 * rho + a - 1.0, 0.5 * rho), 0});
  int guard = 0;
  while (a < 1.0) {
    if (++guard > 200)
      throw numeric_error("bootstrap_alpha: iteration failed to terminate");
    a = 2.0 * std::min(0.5 * rho + a - 1.0, 0.5 * rho);
    out.alphas.push_back(a);
    out.intermediates.push_back(
        RateExpr{2.0 * std::min(0.5 * rho + a - 1.0, 0.5 * rho), 0});
  }
  out.steps = static_cast<int>(out.alphas.size());
  out.note = "iterated case: exponent fed back until it reaches 1";
  return out;
}

ParamSet weight_params(int n, int K, double gamma, double s) {
  if (n < 3) throw input_error("weight_params: dimension must be at least 3");
  KernelParams kp(n, gamma, s);

  ParamSet p;
  p.n = n;
  p.K = K;
  p.gamma = gamma;
  p.s = s;
  p.regime = kp.regime();
  p.k_star = static_cast<int>(std::floor(0.5 * n + 1.0));
  p.j_tilde = static_cast<int>(std::ceil(0.5 * n)) - 1;
  if (K < 2 * p.k_star)
    throw input_error(
        "weight_params: total regularity K must be at least twice the "
        "smallest integer exceeding n/2");

  const double half_ceil = std::ceil(0.5 * n);
  p.ell0_d = (n % 2 == 1) ? 0.5 * n + half_ceil - 3.0 : n + 2.0 * half_ceil - 7.0;
  p.M = std::max(2.0 * K / (n - 2.0) - 1.0, p.ell0_d);

  const double gp = kp.weight_power();
  if (kp.hard()) {
    p.ell0 = std::max({0.5 * gp + 1.0, 2.0, 2.0 * gp});
    p.ell0_prime = 0.0;
  } else {
    p.ell0 = -0.5 * gp * std::max(p.M + 1.0, 0.5 * n + K);
    p.ell0_prime = -0.5 * gp * p.M;
  }
  p.ell0_one = 0.5 * std::max(gp, 0.0);
  return p;
}

namespace {

RateExpr basic_rate(const RateQuery& q) {
  if (q.microscopic) {
    if (q.regime != Regime::hard)
      throw input_error(
          "theoretical_rate: the microscopic gain holds for hard potentials only");
    return RateExpr{0.5 * (q.m + q.rho + 1.0), 0};
  }
  return RateExpr{0.5 * (q.m + q.rho), 0};
}

}  // namespace

RateExpr theoretical_rate(const RateQuery& q) {
  if (q.m + q.rho <= 0.0)
    throw input_error("theoretical_rate: m + rho must be positive");
  const bool embed = q.r.has_value() || q.k.has_value() || q.K.has_value();
  if (!embed) return basic_rate(q);

  if (!(q.r && q.k && q.K))
    throw input_error("theoretical_rate: the embedding path needs r, k, and K");
  if (q.microscopic)
    throw input_error(
        "theoretical_rate: the embedding path does not take microscopic data");
  const double r = *q.r;
  if (r < 2.0) throw input_error("theoretical_rate: r must lie in [2, inf]");
  const double n_over_r = std::isinf(r) ? 0.0 : q.n / r;
  if (!(*q.k < *q.K - 1.0 - 0.5 * q.n + n_over_r))
    throw input_error("theoretical_rate: need k < K - 1 - n/2 + n/r");
  return RateExpr{0.5 * (*q.k + q.rho + 0.5 * q.n - n_over_r), 0};
}

namespace {

struct LineFit {
  double slope = 0.0;
  double stderr_slope = 0.0;
  std::size_t count = 0;
};

LineFit fit_line(const std::vector<std::pair<double, double>>& xy) {
  LineFit f;
  f.count = xy.size();
  if (f.count < 2) return f;
  double xbar = 0.0, ybar = 0.0;
  for (const auto& [x, y] : xy) {
    xbar += x;
    ybar += y;
  }
  xbar /= static_cast<double>(f.count);
  ybar /= static_cast<double>(f.count);
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : xy) {
    sxx += (x - xbar) * (x - xbar);
    sxy += (x - xbar) * (y - ybar);
  }
  if (sxx == 0.0) return f;
  f.slope = sxy / sxx;
  if (f.count > 2) {
    double rss = 0.0;
    for (const auto& [x, y] : xy) {
      const double r = y - ybar - f.slope * (x - xbar);
      rss += r * r;
    }
    f.stderr_slope = std::sqrt(rss / (static_cast<double>(f.count) - 2.0) / sxx);
  }
  return f;
}

}  // namespace

FitResult fit_exponent(const std::vector<std::pair<double, double>>& series,
                       double window_fraction) {
  if (window_fraction <= 0.0 || window_fraction > 1.0)
    throw input_error("fit_exponent: window fraction must lie in (0, 1]");
  std::vector<std::pair<double, double>> pts;
  pts.reserve(series.size());
  for (const auto& [t, v] : series) {
    if (!(v > 0.0))
      throw input_error("fit_exponent: series values must be positive");
    pts.emplace_back(std::log1p(t), std::log(v));
  }
  std::sort(pts.begin(), pts.end());
  if (pts.size() < 2) throw input_error("fit_exponent: series too short");

  const double hi = pts.back().first;
  const double cut = hi - window_fraction * (hi - pts.front().first);
  std::vector<std::pair<double, double>> window;
  for (const auto& p : pts)
    if (p.first >= cut) window.push_back(p);
  if (window.size() < 8)
    throw input_error("fit_exponent: need at least 8 points in the fit window");

  const LineFit whole = fit_line(window);
  FitResult out;
  out.power = (whole.slope == 0.0) ? 0.0 : -whole.slope;
  out.power_stderr = whole.stderr_slope;
  out.points = window.size();

  const double mid = 0.5 * (window.front().first + window.back().first);
  std::vector<std::pair<double, double>> early, late;
  for (const auto& p : window)
    (p.first < mid ? early : late).push_back(p);
  if (early.size() >= 2 && late.size() >= 2) {
    const double pe = -fit_line(early).slope;
    const double pl = -fit_line(late).slope;
    out.power_early = (pe == 0.0) ? 0.0 : pe;
    out.power_late = (pl == 0.0) ? 0.0 : pl;
    out.drift = std::abs(pe - pl) > 0.05;
  } else {
    out.power_early = out.power;
    out.power_late = out.power;
  }
  return out;
}

}  // namespace kdecay
