#include "susylab/linalg.hpp"

#include <cmath>
#include <limits>

namespace susylab {

cd log_det(const MatC& a) {
  if (a.size() == 0) return 0.0;
  Eigen::PartialPivLU<MatC> lu(a);
  const MatC& m = lu.matrixLU();
  cd acc = 0.0;
  for (Eigen::Index k = 0; k < m.rows(); ++k) {
    const cd u = m(k, k);
    if (u == cd(0.0)) return {-std::numeric_limits<double>::infinity(), 0.0};
    acc += std::log(u);
  }
  if (lu.permutationP().determinant() < 0) acc += cd(0.0, 3.14159265358979323846);
  return acc;
}

cd cofactor_ratio(const MatC& a, Eigen::Index x, Eigen::Index y) {
  const Eigen::Index n = a.rows();
  MatC minor(n - 1, n - 1);
  for (Eigen::Index r = 0, rr = 0; r < n; ++r) {
    if (r == x) continue;
    for (Eigen::Index c = 0, cc = 0; c < n; ++c) {
      if (c == y) continue;
      minor(rr, cc++) = a(r, c);
    }
    ++rr;
  }
  const double sign = ((x + y) % 2 == 0) ? 1.0 : -1.0;
  return sign * std::exp(log_det(minor) - log_det(a));
}

MatC hermitian_part(const MatC& a) { return 0.5 * (a + a.adjoint()); }

}  // namespace susylab
