#pragma once

#include "kdecay/fields.hpp"
#include "kdecay/lp.hpp"

namespace kdecay {

// |Delta_j f|_{L^p} for each bank block j (spatial Lebesgue norm after
// filtering with phi_j).
Vec block_norms(const ScalarField& f, const LPFilterBank& bank, double p);

// p = 2 throughout for radial fields; ell selects the velocity weight
// (ignored for scalar-amplitude nodes).
Vec block_norms(const RadialMixedField& f, const LPFilterBank& bank,
                double ell = 0.0);

// l^q combination of 2^{rho j} |Delta_j f| over the bank blocks; q in
// [1, inf].  rho is the regularity index (negative indices allowed).
double besov_combine(const Vec& blocks, const LPFilterBank& bank, double rho,
                     double q);

double besov_norm(const ScalarField& f, const LPFilterBank& bank, double rho,
                  double q, double p);
double besov_norm(const RadialMixedField& f, const LPFilterBank& bank,
                  double rho, double q, double ell = 0.0);

// |xi|^k multiplier.  k = 0 is the identity.  For k > 0 the zero mode is
// annihilated; for k < 0 a nonzero zero mode is rejected.
ScalarField riesz_apply(const ScalarField& f, double k);
RadialMixedField riesz_apply(const RadialMixedField& f, double k);

// Heat semigroup multiplier exp(-4 pi^2 |xi|^2 t), t >= 0.
ScalarField heat_apply(const ScalarField& f, double t);
RadialMixedField heat_apply(const RadialMixedField& f, double t);

// x -> 2x.  Every frequency doubles, so block j content moves to block j+1
// and L^2 mass scales by 2^{-n/2} exactly.  For the periodic field this is
// realized by halving the box while keeping coefficients; for the radial
// field by doubling the nodes and scaling values by 2^{-n}.
ScalarField dilate_dyadic(const ScalarField& f);
RadialMixedField dilate_dyadic(const RadialMixedField& f);

}  // namespace kdecay
