#include "wavespec/linalg.hpp"

#include <complex>
#include <string>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "wavespec/errors.hpp"

namespace wavespec {

namespace {

void require_finite(const CMat& M) {
  if (!M.allFinite()) throw InvalidArgument("eigensolver: matrix has non-finite entries");
}

}  // namespace

namespace {

// LAPACK zgeev on a copy of M; vectors (right, unit norm) only when requested.
void zgeev(const CMat& M, CVec& w, CMat* V) {
  const lapack_int n = static_cast<lapack_int>(M.rows());
  CMat A = M;
  w.resize(n);
  if (V) V->resize(n, n);
  const lapack_int info =
      LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', V ? 'V' : 'N', n, reinterpret_cast<lapack_complex_double*>(A.data()), n,
                    reinterpret_cast<lapack_complex_double*>(w.data()), nullptr, 1,
                    V ? reinterpret_cast<lapack_complex_double*>(V->data()) : nullptr, V ? n : 1);
  if (info != 0) throw ConvergenceError("complex QR iteration did not converge (zgeev info " + std::to_string(info) + ")");
}

}  // namespace

EigenPairs eig_dense(const CMat& M) {
  require_finite(M);
  if (M.rows() != M.cols()) throw InvalidArgument("eigensolver: matrix must be square");
  EigenPairs out;
  zgeev(M, out.values, &out.vectors);
  const double norm = std::max(M.norm(), 1e-300);
  for (Eigen::Index j = 0; j < M.cols(); ++j) {
    const double nv = out.vectors.col(j).norm();
    if (nv > 0.0) out.vectors.col(j) /= nv;
    const double r = (M * out.vectors.col(j) - out.values(j) * out.vectors.col(j)).norm() / norm;
    out.max_residual = std::max(out.max_residual, r);
  }
  return out;
}

CVec eigvals_dense(const CMat& M) {
  require_finite(M);
  if (M.rows() != M.cols()) throw InvalidArgument("eigensolver: matrix must be square");
  CVec w;
  zgeev(M, w, nullptr);
  return w;
}

CVec eigvec_near(const CMat& M, cplx shift, int iterations) {
  require_finite(M);
  const Eigen::Index n = M.rows();
  // Perturb the shift slightly so the shifted matrix is numerically invertible.
  const cplx s = shift + cplx(1e-10, 1e-10) * std::max(1.0, std::abs(shift));
  Eigen::PartialPivLU<CMat> lu(M - s * CMat::Identity(n, n));
  CVec v = CVec::Ones(n) / std::sqrt(static_cast<double>(n));
  for (int it = 0; it < iterations; ++it) {
    v = lu.solve(v);
    v /= v.norm();
  }
  return v;
}

}  // namespace wavespec
