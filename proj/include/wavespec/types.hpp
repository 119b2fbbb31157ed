#pragma once

#include <complex>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace wavespec {

using cplx = std::complex<double>;

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

}  // namespace wavespec
