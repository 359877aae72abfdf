#include "doctest.h"
#include "susylab/errors.hpp"
#include "susylab/susy.hpp"

#include <boost/math/quadrature/sinh_sinh.hpp>
#include <cmath>
#include <numbers>

using namespace susylab;

namespace {

EnsembleSpec single(double j = 1.0) { return make_spec(1, 1, MatR::Constant(1, 1, j)); }

Mat2c random_b(Stream& st) {
  Mat2c b;
  for (int k = 0; k < 4; ++k) b(k / 2, k % 2) = st.complex_normal(1.0);
  return b;
}

// Hand expansion of the odd and FF integrals at fixed B:
// K(B; 0) = -z1 z2 - 1/w - i tau (z1 + z2) + tau^2 + Tr(sBsB)/w^2, tau = (B11 - B22)/w
cd kernel_hand(double w, cd z1, cd z2, const Mat2c& B) {
  const cd tau = (B(0, 0) - B(1, 1)) / w;
  const cd tr = B(0, 0) * B(0, 0) + B(1, 1) * B(1, 1) - 2.0 * B(0, 1) * B(1, 0);
  return -z1 * z2 - 1.0 / w - cd(0, 1) * tau * (z1 + z2) + tau * tau + tr / (w * w);
}

// t1 t2 coefficient of K(B(t1); t2) / Det A(t1), times Det A
cd mixed_hand(double w, cd z1, const Mat2c& B) {
  const cd tau = (B(0, 0) - B(1, 1)) / w;
  const cd bsb11 = B(0, 0) * B(0, 0) - B(0, 1) * B(1, 0);
  return -bsb11 / w + cd(0, 1) * B(0, 0) * (z1 + cd(0, 1) * tau);
}

cd pair_oracle(cd z1, cd z2) {
  boost::math::quadrature::sinh_sinh<double> q;
  auto f = [&](double h) {
    return 1.0 / ((z1 - h) * (z2 - h)) * std::exp(-0.5 * h * h) / std::sqrt(2 * std::numbers::pi);
  };
  return {q.integrate([&](double h) { return f(h).real(); }), q.integrate([&](double h) { return f(h).imag(); })};
}

}  // namespace

TEST_CASE("odd-block kernel against the hand expansion") {
  Stream st(2, 0);
  for (double w : {1.0, 0.7})
    for (int k = 0; k < 5; ++k) {
      const cd z1(0.2, 0.5), z2(-0.3, -0.6);
      const Mat2c B = random_b(st);
      const cd v0 = susy_kernel_at(w, z1, z2, B).first;
      CHECK(std::abs(v0 - kernel_hand(w, z1, z2, B)) < 1e-12 * (1 + std::abs(v0)));
    }
}

TEST_CASE("polynomial fit reproduces direct evaluation") {
  Stream st(4, 0);
  const double w = 1.3;
  const cd z1(0.1, 0.4), z2(0.1, -0.9);
  const SusyKernel K = build_susy_kernel(w, z1, z2);
  for (int k = 0; k < 5; ++k) {
    const Mat2c B = random_b(st);
    const auto [v0, v2] = susy_kernel_at(w, z1, z2, B);
    CHECK(std::abs(K.eval0(B) - v0) < 1e-11 * (1 + std::abs(v0)));
    CHECK(std::abs(K.eval2(B) - v2) < 1e-11 * (1 + std::abs(v2)));
    // mixed t1 t2 coefficient with B(t1) = B - i t1 B E11 B
    Mat2c dB;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) dB(a, b) = cd(0, -1) * B(a, 0) * B(0, b);
    const cd mixed = cd(0, -1) * B(0, 0) * K.eval2(B) + K.deriv2(B, dB);
    CHECK(std::abs(mixed - mixed_hand(w, z1, B)) < 1e-11 * (1 + std::abs(mixed)));
  }
}

TEST_CASE("kernel is invariant under the diagonal U(1)") {
  Stream st(6, 0);
  const double w = 1.0;
  const cd z1(0, 0.5), z2(0, -0.5);
  for (int k = 0; k < 5; ++k) {
    const Mat2c B = random_b(st);
    const double chi = 6.0 * st.uniform();
    Mat2c U = Mat2c::Zero();
    U(0, 0) = std::exp(cd(0, chi));
    U(1, 1) = std::exp(cd(0, -chi));
    const Mat2c B2 = U * B * U.adjoint();
    const auto a = susy_kernel_at(w, z1, z2, B);
    const auto b = susy_kernel_at(w, z1, z2, B2);
    CHECK(std::abs(a.first - b.first) < 1e-12 * (1 + std::abs(a.first)));
    CHECK(std::abs(a.second - b.second) < 1e-12 * (1 + std::abs(a.second)));
  }
}

TEST_CASE("FF sector reproduces the fermionic n = 2 kernel") {
  const double J = 0.8;
  const cd z1(0.3, 0.5), z2(-0.2, -0.4);
  const SusyKernel K = build_susy_kernel(1.0 / J, z1, z2);
  // Det(z - iQ) = -Det(Q - iz) for 2x2 blocks
  CHECK(std::abs(K.k0[0] + (z1 * z2 + J)) < 1e-12);
  const auto r = verify_fermionic(single(J), SignatureSpec::of({z1, z2}), {200000, 7, 0});
  GreensEstimate ff;
  ff.value = -K.k0[0];
  CHECK(z_score(r.rhs, ff) < 3.0);
}

TEST_CASE("supersymmetric normalization and generating derivative") {
  const auto sig = SignatureSpec::of({cd(0, 0.5), cd(0, -0.5)});
  const SusyResult r = verify_susy_g2(single(), sig, 1.0, {}, {50000, 3, 0});
  CHECK(std::abs(r.normalization.value - 1.0) < 1e-8);
  CHECK(r.normalization.delta < 1e-8);
  CHECK(std::abs(r.derivative.value - pair_oracle(sig.z[0], sig.z[1])) < 1e-8);
  CHECK(r.tail < 1e-10);
  CHECK(r.report.z_score < 3.0);
  CHECK(r.report.verdict == Verdict::consistent);
}

TEST_CASE("susy preconditions") {
  const auto sig = SignatureSpec::of({cd(0, 0.5), cd(0, -0.5)});
  CHECK_THROWS_AS(verify_susy_g2(make_spec(1, 2, MatR::Constant(1, 1, 1.0)), sig, 1.0, {}, {2000, 1, 0}),
                  InvalidInput);
  CHECK_THROWS_AS(verify_susy_g2(single(), SignatureSpec::of({cd(0, 0.5), cd(0, 0.5)}), 1.0, {}, {2000, 1, 0}),
                  InvalidInput);
  CHECK_THROWS_AS(susy_kernel_at(0.0, cd(0, 1), cd(0, -1), Mat2c::Identity()), InvalidInput);
}
