#pragma once
#include <Eigen/Dense>
#include <complex>

namespace susylab {

using cd = std::complex<double>;
using MatC = Eigen::MatrixXcd;
using MatR = Eigen::MatrixXd;
using VecC = Eigen::VectorXcd;
using VecR = Eigen::VectorXd;
using Mat2c = Eigen::Matrix2cd;

// log of a complex determinant via partial-pivot LU; the imaginary part is the
// accumulated phase (not reduced mod 2 pi). Returns -inf real part if singular.
cd log_det(const MatC& a);

// Cofactor C_xy = (-1)^(x+y) det(a with row x and column y removed), divided
// by det(a). Computed as a ratio of LU determinants in log form.
cd cofactor_ratio(const MatC& a, Eigen::Index x, Eigen::Index y);

// Hermitian part of a square matrix.
MatC hermitian_part(const MatC& a);

}  // namespace susylab
