#pragma once

#include "kdecay/operators.hpp"

namespace kdecay {

// Full spectrum of a transport + collision mode in the coordinates where the
// quadrature inner product is Euclidean.  Left columns carry the
// biorthonormal gauge of eig_dense, so rank-one spectral projectors read
// right.col(j) left.col(j)^H directly.
struct ModeSpectrum {
  CVec values;
  CMat right;
  CMat left;
  double max_residual = 0.0;
  double vector_condition = 1.0;
};

ModeSpectrum eig_mode(const ModeOperator& op);

// Group spectral projector R (L^H R)^{-1} L^H from matching columns of right
// and left eigenvectors of a cluster.  The Gram factor L^H R must be
// invertible relative to the column scales (gauge_tol), otherwise the
// cluster is numerically defective.
CMat eigenprojection(const CMat& right_cols, const CMat& left_cols,
                     double gauge_tol = 1e-6);

// Low-frequency eigenvalue branch tracked over an ascending kappa grid.
// Exactly degenerate sub-clusters are kept as one invariant subspace with
// multiplicity > 1; `values` then stores the cluster mean.  Projections are
// stored in factored form P = u w^H (orthonormal coordinates).
struct BranchProjection {
  CMat u;
  CMat w;
  CMat dense() const { return u * w.adjoint(); }
};

struct SpectralBranch {
  Vec kappas;
  CVec values;
  std::vector<BranchProjection> projections;
  int multiplicity = 1;
  double zeta1 = 0.0;           // Im zeta ~ zeta1 * kappa
  double zeta2 = 0.0;           // Re zeta ~ zeta2 * kappa^2
  double fit_residual = 0.0;    // rms remainder of the quadratic fit
  double residual_order = 0.0;  // power law of the remainder in kappa
  bool expansion_ok = false;
};

struct BranchFamily {
  const VelocityGrid* grid = nullptr;
  Vec kappas;        // admitted nodes, ascending
  double kappa0 = 0.0;
  std::vector<SpectralBranch> branches;
  double max_residual = 0.0;    // worst eigenpair residual across nodes
  double max_semisimple = 0.0;  // max |(B - zeta_j) P_j|_F / |B|_F

  int total_multiplicity() const;
};

// Follows the n+2 smallest-real-part eigenvalues of B(kappa e1) across the
// grid.  Sub-clusters are grouped at the first node by eigenvalue proximity
// and matched at later nodes by projection overlap.  Trailing nodes where
// the cluster is separated from the rest of the spectrum by less than
// separation_factor times its own spread are dropped; kappa0 records the
// largest surviving node.
BranchFamily track_branches(const KineticOperator& op, const MacroBasis& basis,
                            const Vec& kappas, double separation_factor = 10.0);

// Least-squares fit of the small-frequency expansion
//   zeta(kappa) = i zeta1 kappa + zeta2 kappa^2 + remainder,
// written into the branch.  The remainder must shrink at least like
// kappa^2.5; branches whose subleading term vanishes identically report a
// steeper order, which still satisfies the expansion.
struct ExpansionFit {
  double zeta1 = 0.0;
  double zeta2 = 0.0;
  double fit_residual = 0.0;
  double residual_order = 0.0;
  bool expansion_ok = false;
};

ExpansionFit fit_expansion(SpectralBranch& branch);

// Power law of the combined (rms across branches) quadratic-fit remainder.
// The slowest-decaying branch dominates, so this resolves the cubic
// remainder even when individual branches decay faster.
double family_residual_order(const BranchFamily& fam);

struct ProjectionLimitsReport {
  std::vector<CMat> zero_limits;  // extrapolated zero-frequency projections
  Vec linear_constants;           // slope of |P_j(k) - P0_j|_F against k
  double sum_defect = 0.0;        // |sum_j P0_j - P|_F
  double ortho_defect = 0.0;      // max_j |P0_j - P0_j^H|_F
  double coercivity_min = 0.0;    // min_f sum_j |P_j f|^2 / |P f|^2
  double compat_max = 0.0;        // max |(B - zeta_j P_j) P_j|_F / |B|_F
  bool sum_ok = false;
  bool coercivity_ok = false;
  bool compat_ok = false;
  bool pass() const { return sum_ok && coercivity_ok && compat_ok; }
};

// Zero-frequency limits by Richardson extrapolation over the two smallest
// nodes, the projection-sum identity, the random-vector coercivity bound
// (threshold 0.5), and the remainder orthogonality R_j P_j = 0.
ProjectionLimitsReport check_projection_limits(const BranchFamily& fam,
                                               const KineticOperator& op,
                                               const MacroBasis& basis,
                                               int draws = 100,
                                               unsigned seed = 20260816u);

// Reduced (n+2) x (n+2) system M(zeta, kappa)_{ab} =
// <e_a, (B(kappa e1) + P - zeta)^{-1} e_b>; eigenvalues of B are the roots
// of det(M - I).  At kappa = 0, zeta = 0 the matrix is the identity.
CMat dispersion_matrix(const KineticOperator& op, const MacroBasis& basis,
                       double kappa, Complex zeta);

struct DispersionRoot {
  Complex zeta;
  int multiplicity = 1;
  int newton_steps = 0;
  double det_residual = 0.0;
};

// Multiplicity-aware Newton on det(M - I) from the fitted expansion seeds
// i zeta1 kappa + zeta2 kappa^2, one root per branch.  A diverging iteration
// retries from a continuation step at kappa/2 before giving up.
std::vector<DispersionRoot> dispersion_solve(const KineticOperator& op,
                                             const MacroBasis& basis,
                                             double kappa,
                                             const BranchFamily& fam);

}  // namespace kdecay
