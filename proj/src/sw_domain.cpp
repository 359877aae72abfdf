#include <cmath>

#include "susylab/errors.hpp"
#include "susylab/sw.hpp"

namespace susylab {

MatC cartan_point(const MatC& Z) {
  const Eigen::Index p = Z.rows(), q = Z.cols(), n = p + q;
  MatC x = MatC::Zero(n, n);
  x.topRightCorner(p, q) = Z;
  x.bottomLeftCorner(q, p) = Z.adjoint();
  Eigen::SelfAdjointEigenSolver<MatC> es(x);
  const VecC e = es.eigenvalues().array().exp().cast<cd>();
  return es.eigenvectors() * e.asDiagonal() * es.eigenvectors().adjoint();
}

MatC sw_point(double lambda, const MatC& Z, const MatC& p_plus, const MatC& p_minus) {
  const Eigen::Index p = Z.rows(), q = Z.cols();
  if (p_plus.rows() != p || p_minus.rows() != q) throw InvalidInput("P blocks do not match Z");
  MatC P = MatC::Zero(p + q, p + q);
  P.topLeftCorner(p, p) = p_plus;
  P.bottomRightCorner(q, q) = p_minus;
  return lambda * cartan_point(Z) + cd(0, 1) * P;
}

MatC sw_point(double lambda, const SwCoords& x) {
  const double c = std::cosh(x.r), s = std::sinh(x.r);
  const cd e = std::polar(1.0, x.chi);
  MatC q(2, 2);
  q << lambda * c + cd(0, x.p_plus), lambda * s * e, lambda * s * std::conj(e), lambda * c + cd(0, x.p_minus);
  return q;
}

namespace {

// central difference with one Richardson step
template <class F>
VecC richardson(F&& f, double step) {
  auto central = [&](double h) -> VecC { return (f(h) - f(-h)) / (2.0 * h); };
  const VecC d1 = central(step), d2 = central(step / 2);
  return (4.0 * d2 - d1) / 3.0;
}

VecC flatten(const MatC& q) {
  VecC v(q.size());
  for (Eigen::Index r = 0; r < q.rows(); ++r)
    for (Eigen::Index c = 0; c < q.cols(); ++c) v(r * q.cols() + c) = q(r, c);
  return v;
}

MatC herm_from(const std::vector<double>& x, std::size_t& k, int d) {
  MatC h = MatC::Zero(d, d);
  for (int a = 0; a < d; ++a) h(a, a) = x[k++];
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b) {
      h(a, b) = cd(x[k], x[k + 1]);
      h(b, a) = std::conj(h(a, b));
      k += 2;
    }
  return h;
}

MatC general_chart(int p, int q, const std::vector<double>& x) {
  std::size_t k = 0;
  MatC Z(p, q);
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < q; ++b) {
      Z(a, b) = cd(x[k], x[k + 1]);
      k += 2;
    }
  const MatC pp = herm_from(x, k, p);
  const MatC pm = herm_from(x, k, q);
  return sw_point(1.0, Z, pp, pm);
}

}  // namespace

MatC chart_pushforward(double lambda, const SwCoords& x, double step) {
  MatC jac(4, 4);
  for (int j = 0; j < 4; ++j) {
    auto f = [&](double h) -> VecC {
      SwCoords y = x;
      double* coord[4] = {&y.r, &y.chi, &y.p_plus, &y.p_minus};
      *coord[j] += h;
      return flatten(sw_point(lambda, y));
    };
    jac.col(j) = richardson(f, step);
  }
  return jac;
}

cd chart_jacobian(double lambda, const SwCoords& x, double step) {
  return chart_pushforward(lambda, x, step).determinant();
}

int chart_dimension(int p, int q, Stream& st) {
  if (p < 0 || q < 0 || p + q < 1) throw InvalidInput("chart needs p + q >= 1");
  const int n = p + q;
  const int dim = 2 * p * q + p * p + q * q;
  std::vector<double> x(dim);
  for (double& v : x) v = 0.7 * st.normal();
  MatR jac(2 * n * n, dim);
  for (int j = 0; j < dim; ++j) {
    auto f = [&](double h) -> VecC {
      std::vector<double> y = x;
      y[j] += h;
      return flatten(general_chart(p, q, y));
    };
    const VecC d = richardson(f, 1e-4);
    for (Eigen::Index k = 0; k < d.size(); ++k) {
      jac(2 * k, j) = d(k).real();
      jac(2 * k + 1, j) = d(k).imag();
    }
  }
  Eigen::JacobiSVD<MatR> svd(jac);
  const VecR sv = svd.singularValues();
  int rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) rank += sv(k) > 1e-8 * sv(0) ? 1 : 0;
  return rank;
}

SwDecay sw_decay(const MatR& w, const SignatureSpec& sig, const std::vector<MatC>& q, const std::vector<MatC>& m) {
  const MatC s = sig.s_matrix();
  const MatC z = sig.z_matrix();
  const MatC im_z = z.imag().cast<cd>();
  const std::size_t L = q.size();
  std::vector<MatC> re(L), im(L);
  for (std::size_t i = 0; i < L; ++i) {
    re[i] = 0.5 * (q[i] + q[i].adjoint());
    im[i] = (q[i] - q[i].adjoint()) / cd(0, 2);
  }
  SwDecay d;
  for (std::size_t i = 0; i < L; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < L; ++j) {
      const cd t1 = ((s * im[i] + z) * (s * im[j] + z)).trace();
      d.f1 += w(i, j) * 2.0 * t1.real();
      d.f2 += -2.0 * w(i, j) * (s * re[i] * s * re[j]).trace().real();
      row += w(i, j);
    }
    d.f3 += 4.0 * ((m[i] + s * im_z * row) * re[i]).trace().real();
  }
  return d;
}

cd sw_F(const MatR& w, const SignatureSpec& sig, const std::vector<MatC>& q, const std::vector<MatC>& m) {
  const MatC s = sig.s_matrix();
  const MatC iz = cd(0, 1) * sig.z_matrix();
  const std::size_t L = q.size();
  cd e = 0.0;
  for (std::size_t i = 0; i < L; ++i) {
    for (std::size_t j = 0; j < L; ++j) e += 0.5 * w(i, j) * ((s * q[i] + iz) * (s * q[j] + iz)).trace();
    e -= (m[i] * q[i]).trace();
  }
  return std::exp(e);
}

double f2_lower_bound(const MatR& w, double lambda, int n) { return -2.0 * lambda * lambda * n * w.trace(); }

F2BoundCheck check_f2_bound(const EnsembleSpec& spec, double lambda, std::int64_t points, std::uint64_t seed,
                            double r_scale) {
  if (!spec.covariance.report.ok_for_schafer_wegner())
    throw Refusal("the f2 bound needs w_ij <= 0 off the diagonal: " + spec.covariance.report.summary());
  const SignatureSpec sig = SignatureSpec::of({cd(0, 1), cd(0, -1)});
  const std::size_t L = spec.num_sites();
  F2BoundCheck out;
  out.bound = f2_lower_bound(spec.w(), lambda, 2);
  out.min_f2 = std::numeric_limits<double>::infinity();
  std::vector<MatC> q(L), m(L, MatC::Zero(2, 2));
  for (std::int64_t k = 0; k < points; ++k) {
    Stream st(seed, static_cast<std::uint64_t>(k));
    double scale = 0.0;
    for (std::size_t i = 0; i < L; ++i) {
      SwCoords x{r_scale * std::abs(st.normal()), 2 * M_PI * st.uniform(), 2 * st.normal(), 2 * st.normal()};
      q[i] = sw_point(lambda, x);
      const double c = std::cosh(x.r);
      scale += lambda * lambda * c * c;
    }
    const double f2 = sw_decay(spec.w(), sig, q, m).f2;
    const double tol = 1e-13 * scale * spec.w().cwiseAbs().sum() * L;
    out.min_f2 = std::min(out.min_f2, f2);
    if (f2 < out.bound - tol) ++out.violations;
    ++out.points;
  }
  return out;
}

double default_lambda(const EnsembleSpec& spec) {
  const double row = spec.w().row(0).sum();
  if (!(row > 0.0)) throw Refusal("sum_j w_ij must be positive for the saddle value of lambda");
  return std::sqrt(spec.orbitals / row);
}

cd sw_flat_normalization(double w) { return cd(0, 4.0 * M_PI * M_PI / (w * w)); }

}  // namespace susylab
