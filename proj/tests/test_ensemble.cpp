#include "doctest.h"
#include "susylab/ensemble.hpp"
#include "susylab/errors.hpp"

#include <cmath>
#include <cstdio>

using namespace susylab;

namespace {

// independent oracle: Gauss-Jordan inverse with partial pivoting
MatR gauss_jordan_inverse(MatR a) {
  const Eigen::Index n = a.rows();
  MatR inv = MatR::Identity(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index p = c;
    for (Eigen::Index r = c + 1; r < n; ++r)
      if (std::abs(a(r, c)) > std::abs(a(p, c))) p = r;
    a.row(c).swap(a.row(p));
    inv.row(c).swap(inv.row(p));
    const double d = a(c, c);
    a.row(c) /= d;
    inv.row(c) /= d;
    for (Eigen::Index r = 0; r < n; ++r)
      if (r != c) {
        const double f = a(r, c);
        a.row(r) -= f * a.row(c);
        inv.row(r) -= f * inv.row(c);
      }
  }
  return inv;
}

// independent oracle for the spectrum: cyclic Jacobi rotations
std::pair<double, double> jacobi_extreme_eigenvalues(MatR a) {
  const Eigen::Index n = a.rows();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30 * a.squaredNorm()) break;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(t * t + 1), s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
  }
  return {a.diagonal().minCoeff(), a.diagonal().maxCoeff()};
}

bool pd_oracle(const MatR& a) {
  const auto [lo, hi] = jacobi_extreme_eigenvalues(a);
  return hi > 0 && lo > kPdRelTol * hi;
}

EnsembleSpec two_site() {
  MatR J(2, 2);
  J << 2, 1, 1, 2;
  return make_spec(2, 1, J);
}

}  // namespace

TEST_CASE("single-site covariance") {
  const double lambda = 1.7;
  const auto c = build_covariance(LatticeSpec::chain(1), [](double) { return 1.0; }, lambda * lambda);
  CHECK(c.J(0, 0) == doctest::Approx(lambda * lambda));
  CHECK(c.w(0, 0) == doctest::Approx(1.0 / (lambda * lambda)));
  CHECK(c.report.ok_for_schafer_wegner());
}

TEST_CASE("two-site covariance and inverse") {
  const auto c = build_covariance(LatticeSpec::chain(2), [](double r) { return r == 0 ? 2.0 : 1.0; }, 1.0);
  CHECK(c.J(0, 1) == 1.0);
  CHECK(c.w(0, 0) == doctest::Approx(2.0 / 3.0));
  CHECK(c.w(0, 1) == doctest::Approx(-1.0 / 3.0));
  CHECK(c.report.positive_definite);
  CHECK(c.report.min_eigenvalue == doctest::Approx(1.0));
  CHECK(c.report.max_eigenvalue == doctest::Approx(3.0));
  CHECK(c.report.w_offdiag_nonpositive);
}

TEST_CASE("indefinite covariance is flagged") {
  MatR J(2, 2);
  J << 1, 2, 2, 1;
  const auto c = covariance_from_matrix(J);
  CHECK_FALSE(c.report.positive_definite);
  CHECK(c.report.min_eigenvalue == doctest::Approx(-1.0));
  CHECK_THROWS_AS(sample(make_spec(2, 1, J), 1), Refusal);
}

TEST_CASE("singular and non-finite covariance rejected") {
  MatR J = MatR::Ones(2, 2);
  CHECK_THROWS_AS(covariance_from_matrix(J), NumericalFailure);
  CHECK_THROWS_AS(build_covariance(LatticeSpec::chain(2), [](double) { return NAN; }, 1.0), InvalidInput);
}

TEST_CASE("band profiles: validator agrees with independent oracles") {
  // Gaussian band: recorded per (L, W); the exponential profile exp(-r/W)
  // has a tridiagonal M-matrix inverse and must always pass.
  std::printf("  L   W  gauss:pd  gauss:w<=0  exp:pd  exp:w<=0\n");
  for (int L : {8, 16, 32, 64})
    for (double W : {1.0, 2.0, 4.0, 8.0}) {
      const auto lat = LatticeSpec::chain(L);
      MatR Jg(L, L);
      for (int i = 0; i < L; ++i)
        for (int j = 0; j < L; ++j) Jg(i, j) = std::exp(-double((i - j) * (i - j)) / (W * W));
      bool g_pd = pd_oracle(Jg), g_w = false;
      CovarianceSpec g;
      bool built = true;
      try {
        g = build_covariance(lat, [W](double r) { return std::exp(-r * r / (W * W)); }, 1.0);
      } catch (const NumericalFailure&) {
        built = false;
      }
      if (built) {
        const MatR wi = gauss_jordan_inverse(Jg);
        double mx = -1e300;
        for (int i = 0; i < L; ++i)
          for (int j = 0; j < L; ++j)
            if (i != j) mx = std::max(mx, wi(i, j));
        g_w = mx <= kWTol;
        CHECK(g.report.positive_definite == g_pd);
        // only meaningful when J is numerically invertible
        if (g_pd) CHECK(g.report.w_offdiag_nonpositive == g_w);
      }
      const auto e = build_covariance(lat, [W](double r) { return std::exp(-r / W); }, 1.0);
      CHECK(e.report.positive_definite);
      CHECK(e.report.w_offdiag_nonpositive);
      std::printf("%3d %3.0f  %8d  %10d  %6d  %8d\n", L, W, int(g_pd), int(g_w), int(e.report.positive_definite),
                  int(e.report.w_offdiag_nonpositive));
    }
}

TEST_CASE("samples are exactly hermitian") {
  const auto spec = make_spec(3, 2, MatR::Identity(3, 3) * 0.5 + MatR::Ones(3, 3) * 0.5);
  for (std::uint64_t d = 0; d < 20; ++d) {
    const auto s = sample(spec, 3, d);
    CHECK((s.matrix - s.matrix.adjoint()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(s.spec_id == spec.id());
  }
}

TEST_CASE("second moments match J") {
  const auto spec = two_site();
  const int M = 100000;
  double m11 = 0, m11sq = 0, m12 = 0, m12sq = 0, mean12 = 0;
  for (int d = 0; d < M; ++d) {
    const MatC h = sample(spec, 17, d).matrix;
    const double a = std::norm(h(0, 0)), b = std::norm(h(0, 1));
    m11 += a;
    m11sq += a * a;
    m12 += b;
    m12sq += b * b;
    mean12 += h(0, 1).real();
  }
  auto check = [M](double s, double s2, double target) {
    const double m = s / M, se = std::sqrt((s2 / M - m * m) / M);
    CHECK(std::abs(m - target) < 5 * se);
  };
  check(m11, m11sq, 2.0);
  check(m12, m12sq, 1.0);
  CHECK(std::abs(mean12 / M) < 4 * std::sqrt(0.5 / M));
}

TEST_CASE("GUE off-diagonal variance") {
  const auto spec = make_spec(1, 2, MatR::Identity(1, 1));
  const int M = 100000;
  double s = 0, s2 = 0;
  for (int d = 0; d < M; ++d) {
    const double v = std::norm(sample(spec, 5, d).matrix(0, 1));
    s += v;
    s2 += v * v;
  }
  const double m = s / M, se = std::sqrt((s2 / M - m * m) / M);
  CHECK(std::abs(m - 1.0) < 4 * se);
}

TEST_CASE("characteristic function") {
  const auto gue1 = make_spec(1, 1, MatR::Identity(1, 1));
  CHECK(characteristic_fn(gue1, MatC::Zero(1, 1)) == cd(1.0));
  MatC k(1, 1);
  k << 0.7;
  CHECK(std::abs(characteristic_fn(gue1, k) - std::exp(-0.49 / 2)) < 1e-15);
  CHECK_THROWS_AS(characteristic_fn(gue1, MatC::Zero(2, 2)), InvalidInput);
}

TEST_CASE("characteristic function is conjugation invariant") {
  const auto spec = make_spec(2, 2, (MatR(2, 2) << 2, 1, 1, 2).finished());
  Stream st(3, 0);
  MatC k(4, 4);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) k(a, b) = st.complex_normal(1.0);
  MatC u = MatC::Zero(4, 4);
  for (int site = 0; site < 2; ++site) {
    MatC g(2, 2);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) g(a, b) = st.complex_normal(1.0);
    Eigen::HouseholderQR<MatC> qr(g);
    u.block(2 * site, 2 * site, 2, 2) = qr.householderQ();
  }
  const cd a = characteristic_fn(spec, k);
  const cd b = characteristic_fn(spec, u * k * u.adjoint());
  CHECK(std::abs(a - b) < 1e-13 * std::abs(a));
}

TEST_CASE("characteristic function matches Monte Carlo") {
  const auto spec = two_site();
  MatC k(2, 2);
  k << 0.4, cd(0.2, -0.3), cd(0.2, 0.3), -0.5;  // Hermitian, so Tr HK is real
  const cd omega = characteristic_fn(spec, k);
  const int M = 1000000;
  cd s = 0;
  double s2r = 0, s2i = 0;
  for (int d = 0; d < M; ++d) {
    Stream st(23, d);
    MatC h;
    sample_into(spec, st, h);
    const cd v = std::exp(cd(0, 1) * (h * k).trace());
    s += v;
    s2r += v.real() * v.real();
    s2i += v.imag() * v.imag();
  }
  const cd m = s / double(M);
  const double ser = std::sqrt((s2r / M - m.real() * m.real()) / M);
  const double sei = std::sqrt((s2i / M - m.imag() * m.imag()) / M);
  CHECK(std::abs(m.real() - omega.real()) < 4 * ser);
  CHECK(std::abs(m.imag() - omega.imag()) < 4 * sei);
}
