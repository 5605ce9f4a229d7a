#include "kdecay/eig.hpp"

#include <lapacke.h>

#include <cmath>

namespace kdecay {

EigResult eig_dense(const CMat& a) {
  if (a.rows() != a.cols()) throw input_error("eig_dense: matrix must be square");
  const lapack_int n = static_cast<lapack_int>(a.rows());

  CMat work = a;  // overwritten by LAPACK
  EigResult res;
  res.values.resize(n);
  res.right.resize(n, n);
  res.left.resize(n, n);

  const lapack_int info = LAPACKE_zgeev(
      LAPACK_COL_MAJOR, 'V', 'V', n,
      reinterpret_cast<lapack_complex_double*>(work.data()), n,
      reinterpret_cast<lapack_complex_double*>(res.values.data()),
      reinterpret_cast<lapack_complex_double*>(res.left.data()), n,
      reinterpret_cast<lapack_complex_double*>(res.right.data()), n);
  if (info != 0)
    throw numeric_error("eig_dense: zgeev failed with info " +
                        std::to_string(info));

  double resid = 0.0;
  double cond = 1.0;
  for (lapack_int j = 0; j < n; ++j) {
    const CVec r = res.right.col(j);
    resid = std::max(resid, (a * r - res.values(j) * r).norm() / r.norm());
    const Complex overlap = res.left.col(j).dot(r);  // conjugates the left slot
    const double mag = std::abs(overlap);
    if (mag < 1e-300)
      throw numeric_error("eig_dense: defective eigenpair, cannot normalize");
    cond = std::max(cond, 1.0 / mag);
    res.left.col(j) /= std::conj(overlap);
  }
  res.max_residual = resid;
  res.vector_condition = cond;
  return res;
}

}  // namespace kdecay
