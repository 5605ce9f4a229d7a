#include "kdecay/expm.hpp"

#include <cmath>

namespace kdecay {

namespace {

double l1_norm(const CMat& a) { return a.cwiseAbs().colwise().sum().maxCoeff(); }

// Pade numerator/denominator splits exp(A) ~ (V-U)^{-1} (V+U); U collects
// the odd powers and V the even ones.
void pade3(const CMat& a, const CMat& a2, CMat* u, CMat* v) {
  static const double b[] = {120., 60., 12., 1.};
  const CMat ident = CMat::Identity(a.rows(), a.cols());
  *u = a * (b[3] * a2 + b[1] * ident);
  *v = b[2] * a2 + b[0] * ident;
}

void pade5(const CMat& a, const CMat& a2, CMat* u, CMat* v) {
  static const double b[] = {30240., 15120., 3360., 420., 30., 1.};
  const CMat ident = CMat::Identity(a.rows(), a.cols());
  const CMat a4 = a2 * a2;
  *u = a * (b[5] * a4 + b[3] * a2 + b[1] * ident);
  *v = b[4] * a4 + b[2] * a2 + b[0] * ident;
}

void pade7(const CMat& a, const CMat& a2, CMat* u, CMat* v) {
  static const double b[] = {17297280., 8648640., 1995840., 277200.,
                             25200.,    1512.,    56.,      1.};
  const CMat ident = CMat::Identity(a.rows(), a.cols());
  const CMat a4 = a2 * a2;
  const CMat a6 = a4 * a2;
  *u = a * (b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident);
  *v = b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident;
}

void pade9(const CMat& a, const CMat& a2, CMat* u, CMat* v) {
  static const double b[] = {17643225600., 8821612800., 2075673600.,
                             302702400.,   30270240.,   2162160.,
                             110880.,      3960.,       90.,
                             1.};
  const CMat ident = CMat::Identity(a.rows(), a.cols());
  const CMat a4 = a2 * a2;
  const CMat a6 = a4 * a2;
  const CMat a8 = a6 * a2;
  *u = a * (b[9] * a8 + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident);
  *v = b[8] * a8 + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident;
}

void pade13(const CMat& a, const CMat& a2, CMat* u, CMat* v) {
  static const double b[] = {64764752532480000., 32382376266240000.,
                             7771770303897600.,  1187353796428800.,
                             129060195264000.,   10559470521600.,
                             670442572800.,      33522128640.,
                             1323241920.,        40840800.,
                             960960.,            16380.,
                             182.,               1.};
  const CMat ident = CMat::Identity(a.rows(), a.cols());
  const CMat a4 = a2 * a2;
  const CMat a6 = a4 * a2;
  *u = a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 +
            b[5] * a4 + b[3] * a2 + b[1] * ident);
  *v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 +
       b[2] * a2 + b[0] * ident;
}

}  // namespace

CMat expm(const CMat& a) {
  if (a.rows() != a.cols()) throw input_error("expm: matrix must be square");

  // 1-norm thresholds for each Pade order (double precision).
  static const double theta3 = 1.495585217958292e-002;
  static const double theta5 = 2.539398330063230e-001;
  static const double theta7 = 9.504178996162932e-001;
  static const double theta9 = 2.097847961257068e+000;
  static const double theta13 = 5.371920351148152e+000;

  const double norm = l1_norm(a);
  CMat u, v;
  int squarings = 0;

  if (norm <= theta9) {
    const CMat a2 = a * a;
    if (norm <= theta3) {
      pade3(a, a2, &u, &v);
    } else if (norm <= theta5) {
      pade5(a, a2, &u, &v);
    } else if (norm <= theta7) {
      pade7(a, a2, &u, &v);
    } else {
      pade9(a, a2, &u, &v);
    }
  } else {
    double scale = norm / theta13;
    if (scale > 1.0) squarings = static_cast<int>(std::ceil(std::log2(scale)));
    const CMat as = a / std::pow(2.0, squarings);
    const CMat a2 = as * as;
    pade13(as, a2, &u, &v);
  }

  CMat num = v + u;
  CMat den = v - u;
  CMat r = den.partialPivLu().solve(num);
  for (int i = 0; i < squarings; ++i) r = r * r;
  return r;
}

}  // namespace kdecay
