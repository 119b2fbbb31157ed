#pragma once

#include "wavespec/types.hpp"

namespace wavespec {

struct EigenPairs {
  CVec values;
  CMat vectors;              // unit-norm right eigenvectors as columns
  double max_residual = 0.0; // max_j ||M v_j - lambda_j v_j|| / ||M||
};

/// All eigenpairs of a dense complex matrix (multiplicities included).
EigenPairs eig_dense(const CMat& M);

/// Eigenvalues only; cheaper than eig_dense.
CVec eigvals_dense(const CMat& M);

/// Eigenvector for the eigenvalue of M closest to `shift`, by inverse iteration.
CVec eigvec_near(const CMat& M, cplx shift, int iterations = 4);

}  // namespace wavespec
