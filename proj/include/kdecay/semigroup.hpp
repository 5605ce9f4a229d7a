#pragma once

#include <memory>
#include <string>
#include <vector>

#include "kdecay/besov.hpp"
#include "kdecay/operators.hpp"
#include "kdecay/orbit.hpp"

namespace kdecay {

// Dense propagator for d/dt f = -B f on coefficient vectors with a diagonal
// inner-product metric (quadrature weights, orbit weights).  Prefers the
// eigendecomposition taken in the orthonormalized coordinates, where one
// application costs two matrix-vector passes at any t; falls back to the
// scaling-and-squaring exponential when the eigenbasis is too ill
// conditioned to trust.
class Propagator {
 public:
  Propagator(const CMat& b, const Vec& metric,
             double condition_threshold = 1e8);

  const std::string& method() const { return method_; }  // "eig" | "expm"
  Eigen::Index size() const { return b_.rows(); }

  CVec apply(const CVec& f0, double t) const;

  // |one full step - two half steps|_2 / |f0|_2 at time t, the consistency
  // defect quoted as the trajectory error estimate.
  double step_doubling_defect(const CVec& f0, double t) const;

  // Largest |Re| over the spectrum (0 when the eigen path was rejected).
  double max_real_rate() const { return max_real_rate_; }

 private:
  CMat b_;
  Vec sqrt_d_, inv_sqrt_d_;
  bool use_eig_ = false;
  CVec evalues_;
  CMat eright_, eleft_;
  double max_real_rate_ = 0.0;
  std::string method_;
};

// One spatial-frequency slice evolved through a sorted set of times.
struct ModeTrajectory {
  const VelocityGrid* grid = nullptr;
  double kappa = 0.0;
  Vec omega;
  std::vector<double> times;
  CMat states;  // time node x velocity node
  std::string method;
  double error_estimate = 0.0;  // step-doubling defect at the last time

  VelocityFunction state(Eigen::Index i) const;
};

// Evolves f0 under the mode operator.  The step-doubling defect at the
// final time must land under 1e-9 relative; if the eigen path misses that,
// the exponential path is retried before giving up.
ModeTrajectory evolve_mode(const ModeOperator& op, const VelocityFunction& f0,
                           const std::vector<double>& times);

// Max over interior time nodes of |d/dt |f|_2^2 + 2 Re<L f, f>|, the
// derivative taken by 3-point differences on the (possibly nonuniform) time
// grid.  The transport part of the mode operator is skew and drops out of
// the identity exactly; the residual is pure differencing error.
double energy_identity_check(const ModeTrajectory& traj,
                             const KineticOperator& op);

// Decay-envelope verification on |w^ell f(t)|_2^2.
//
// Hard regime: exponential fit over the trailing half of the trajectory,
// normalized by (1 ^ kappa^2); passes when the normalized rate clears the
// frozen floor.  Window rates on successive dyadic spans [T, 2T] expose
// whether the fit is stable (hard) or drifting down (soft degeneracy).
//
// Soft regime: additionally verifies the algebraic envelope
//   |w^ell f(t)|^2  <=  C (t (1 ^ kappa^2)/sigma + 1)^{-sigma} |w^{ell+sigma'} f0|^2,
// sigma' = -sigma (gamma + 2s), against the frozen constant C.
struct EnvelopeReport {
  std::string regime;
  double kappa = 0.0;
  double ell = 0.0;
  double sigma = 0.0;
  std::string status;  // "ok" | "inconclusive"
  double rate = 0.0;
  double normalized_rate = 0.0;
  Vec window_rates;
  double window_drift = 0.0;     // spread of window rates over their mean
  double envelope_margin = 0.0;  // soft: sup_t lhs / (envelope * data norm)
  bool pass = false;
};

EnvelopeReport envelope_check(const ModeTrajectory& traj,
                              const KernelParams& params, double ell,
                              double sigma = 4.0);

// Full-field evolution over the radial frequency ladder.  Each kappa slice
// is reduced to axis-symmetry orbits (the mode operator with omega along a
// grid axis commutes with the symmetry), evolved there, and expanded back,
// collapsing the sweep to desk scale.
struct FieldTrajectory {
  std::vector<double> times;
  std::vector<RadialMixedField> states;  // one field per time node
  std::string method;                    // "eig" | "mixed"
  double max_error_estimate = 0.0;
  double max_asymmetry = 0.0;  // symmetry defect of the initial data
};

// Admission class for evolve_field.  radial demands full rotation symmetry
// in v; axis admits any data invariant under the sign flips and
// permutations of the coordinates transverse to omega_axis (e.g. data with
// an odd v·omega factor), which is all the orbit reduction itself needs.
enum class FieldSymmetry { radial, axis };

FieldTrajectory evolve_field(const RadialMixedField& f0,
                             const KineticOperator& op,
                             const std::vector<double>& times,
                             int omega_axis = 0, double radial_tol = 1e-8,
                             FieldSymmetry symmetry = FieldSymmetry::radial);

// |Lambda^m f(t)|^2 in L^2_x L^2_ell per time node.
Vec norm_series(const FieldTrajectory& traj, double ell = 0.0, double m = 0.0);

// Squared macroscopic content |P f(t)|^2_{L^2_x L^2_v} per time node.
Vec macro_series(const FieldTrajectory& traj, const MacroBasis& basis);

// Squared microscopic content |{I-P} f(t)|^2_{L^2_x L^2_ell} per time node.
Vec micro_series(const FieldTrajectory& traj, const MacroBasis& basis,
                 double ell = 0.0);

// Besov-in-x series (p = 2, velocity weight ell) per time node.
Vec besov_series(const FieldTrajectory& traj, const LPFilterBank& bank,
                 double rho, double q, double ell = 0.0);

// Instant energy and dissipation proxy along a field trajectory:
//   E(t) = sum_{a + |beta| <= K} (2 pi kappa)^{2a}
//            |w^{ell - |beta| rho} d_beta f|^2_{L^2_x L^2_v},
//   D(t) = same sum over the microscopic part with the collision weight
//          w^{gamma+2s} attached,
// rho = 1 (hard) or -(gamma+2s) (soft).  Velocity orders above 2 are
// rejected (finite differences degrade beyond that).
struct EnergySeries {
  std::vector<double> times;
  Vec energy;
  Vec dissipation;
  double rho = 1.0;
  bool monotone = false;  // energy non-increasing at every node
  double max_rise = 0.0;  // worst relative increase between adjacent nodes
};

EnergySeries energy_dissipation_series(const FieldTrajectory& traj, int K,
                                       double ell, const KernelParams& params,
                                       const MacroBasis& basis);

}  // namespace kdecay
