#include "doctest.h"
#include "susylab/duality.hpp"
#include "susylab/errors.hpp"

#include <boost/math/quadrature/sinh_sinh.hpp>
#include <cmath>
#include <numbers>

using namespace susylab;

namespace {

EnsembleSpec single(int N, double j = 1.0) { return make_spec(1, N, MatR::Constant(1, 1, j)); }

EnsembleSpec band2() {
  MatR J(2, 2);
  J << 1.0, 0.3, 0.3, 1.0;
  return make_spec(2, 1, J);
}

// <f(h)> for h ~ N(0, v), complex f, by sinh-sinh quadrature
template <class F>
cd gauss_avg(F f, double v = 1.0) {
  boost::math::quadrature::sinh_sinh<double> q;
  auto dens = [v](double h) { return std::exp(-0.5 * h * h / v) / std::sqrt(2 * std::numbers::pi * v); };
  const double re = q.integrate([&](double h) { return f(h).real() * dens(h); });
  const double im = q.integrate([&](double h) { return f(h).imag() * dens(h); });
  return {re, im};
}

}  // namespace

TEST_CASE("fermionic: n = 1, N = 1 is exact on both sides") {
  const auto r = verify_fermionic(single(1, 0.7), SignatureSpec::of({cd(0.3, 0.4)}), {20000, 5, 0});
  CHECK(std::abs(r.lhs.value - cd(0.3, 0.4)) < 0.05);
  CHECK(r.z_score < 3.0);
  CHECK(r.verdict == Verdict::consistent);
}

TEST_CASE("fermionic: n = 2 hand value z1 z2 + J") {
  const double tau2 = 0.6;
  const cd z1(0.2, 0.5), z2(-0.4, 1.0);
  const auto r = verify_fermionic(single(1, tau2), SignatureSpec::of({z1, z2}), {200000, 11, 0});
  GreensEstimate hand;
  hand.value = z1 * z2 + tau2;
  CHECK(z_score(r.lhs, hand) < 3.0);
  CHECK(z_score(r.rhs, hand) < 3.0);
  CHECK(r.verdict == Verdict::consistent);
}

TEST_CASE("fermionic: band covariance, two orbitals") {
  auto spec = band2();
  spec = make_spec(2, 2, spec.J());
  const auto r = verify_fermionic(spec, SignatureSpec::of({cd(0, 2), cd(0.5, -1)}), {100000, 2, 0});
  CHECK(r.z_score < 3.0);
}

TEST_CASE("fermionic preconditions") {
  CHECK_THROWS_AS(verify_fermionic(single(5), SignatureSpec::of({cd(0, 1)}), {2000, 1, 0}), InvalidInput);
  CHECK_THROWS_AS(verify_fermionic(single(1), SignatureSpec::of({cd(0, 1)}), {999, 1, 0}), InvalidInput);
  CHECK_THROWS_AS(
      verify_fermionic(single(1), SignatureSpec::of({cd(0, 1), cd(0, 1), cd(0, 1), cd(0, 1)}), {2000, 1, 0}),
      InvalidInput);
}

TEST_CASE("bosonic same half: n = 1 against two 1-D quadratures") {
  const cd z(0, 1);
  const auto r = verify_bosonic_same_half(single(1), SignatureSpec::of({z}), {200000, 4, 0});
  const cd oracle = gauss_avg([z](double h) { return 1.0 / (z - h); });
  GreensEstimate o;
  o.value = oracle;
  CHECK(z_score(r.lhs, o) < 3.0);
  CHECK(z_score(r.rhs, o) < 3.0);
  CHECK(r.verdict == Verdict::consistent);
}

TEST_CASE("bosonic same half: large z and n = 2") {
  const auto big = verify_bosonic_same_half(single(1), SignatureSpec::of({cd(0, 10)}), {20000, 1, 0});
  CHECK(std::abs(big.lhs.value - 1.0 / cd(0, 10)) < 2e-3);
  CHECK(big.verdict == Verdict::consistent);
  const auto two = verify_bosonic_same_half(single(1), SignatureSpec::of({cd(0, 1), cd(0, 2)}), {100000, 9, 0});
  CHECK(two.z_score < 3.0);
}

TEST_CASE("bosonic same half rejects mixed signatures and small Im z") {
  CHECK_THROWS_AS(verify_bosonic_same_half(single(1), SignatureSpec::of({cd(0, 1), cd(0, -1)}), {2000, 1, 0}),
                  InvalidInput);
  CHECK_THROWS_AS(verify_bosonic_same_half(single(1), SignatureSpec::of({cd(0, 0.05)}), {2000, 1, 0}),
                  InvalidInput);
}

TEST_CASE("naive formula fails for mixed signature, control passes") {
  const McConfig mc{200000, 21, 0};
  const auto bad = falsify_naive(single(1), SignatureSpec::of({cd(0, 0.5), cd(0, -0.5)}), mc);
  CHECK(bad.z_score > 5.0);
  CHECK(bad.verdict == Verdict::inconsistent);
  // conjugate pair: <|Det(z - H)|^-2> is real and positive
  CHECK(bad.lhs.value.real() > 0.0);
  CHECK(std::abs(bad.lhs.value.imag()) < 1e-12);
  const cd oracle = gauss_avg([](double h) { return cd(1.0 / (h * h + 0.25)); });
  GreensEstimate o;
  o.value = oracle;
  CHECK(z_score(bad.lhs, o) < 3.0);

  const auto ctl = verify_bosonic_same_half(single(1), SignatureSpec::of({cd(0, 0.5), cd(0, 0.5)}), mc);
  CHECK(ctl.verdict == Verdict::consistent);
  CHECK_THROWS_AS(falsify_naive(single(1), SignatureSpec::of({cd(0, 0.5), cd(0, 0.5)}), mc), InvalidInput);
}

TEST_CASE("fyodorov n = 1 quadrature matches the resolvent average") {
  const cd z(0, 1);
  const QuadValue q = fyodorov_quadrature(single(1), SignatureSpec::of({z}), {});
  const cd oracle = gauss_avg([z](double h) { return 1.0 / (z - h); });
  CHECK(std::abs(q.value - oracle) < 1e-8);
  CHECK(q.delta < 1e-8);
  const QuadValue c = fyodorov_quadrature(single(1), SignatureSpec::of({cd(0, -1)}), {});
  CHECK(std::abs(c.value - std::conj(q.value)) < 1e-12);
  // N = 2 on one site: <Det^-1> of a 2x2 GUE, second route through the Wishart sampler
  const auto sig = SignatureSpec::of({cd(0.2, 0.8)});
  const QuadValue q2 = fyodorov_quadrature(single(2), sig, {});
  const GreensEstimate s2 = fyodorov_sampled(single(2), sig, {100000, 3, 0});
  GreensEstimate e2;
  e2.value = q2.value;
  CHECK(z_score(s2, e2) < 4.0);
}

TEST_CASE("fyodorov mixed signature is consistent") {
  const auto r = verify_fyodorov(single(2), SignatureSpec::of({cd(0, 1), cd(0, -1)}), {100000, 6, 0});
  CHECK(r.verdict == Verdict::consistent);
  CHECK(r.rhs.se_re < 1e-6);
  FyodorovConfig fc;
  fc.force_sampling = true;
  const auto w = verify_fyodorov(single(2), SignatureSpec::of({cd(0, 1), cd(0, -1)}), {100000, 6, 0}, fc);
  CHECK(w.z_score < 3.0);
}

TEST_CASE("fyodorov: two sites, n = 1") {
  const auto r = verify_fyodorov(band2(), SignatureSpec::of({cd(0.1, 0.7)}), {100000, 8, 0});
  CHECK(r.z_score < 3.0);
}

TEST_CASE("fyodorov refuses N < n") {
  CHECK_THROWS_AS(verify_fyodorov(single(1), SignatureSpec::of({cd(0, 1), cd(0, -1)}), {2000, 1, 0}), Refusal);
}

TEST_CASE("fyodorov integrand is U(p,q) invariant at coincident energies") {
  // Im z -> 0 with the signs kept: the remaining terms only see s and E
  const double tiny = 1e-300;
  const auto sig = SignatureSpec::of({cd(0.3, tiny), cd(0.3, -tiny)});
  const auto spec = single(2);
  Stream st(17, 0);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    MatC phi(2, 2);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) phi(a, b) = st.complex_normal(1.0);
    std::vector<MatC> m{phi * phi.adjoint()};
    const MatC T = random_upq(1, 1, st);
    std::vector<MatC> mt{T * m[0] * T.adjoint()};
    const cd a = fyodorov_integrand(spec, sig, m), b = fyodorov_integrand(spec, sig, mt);
    worst = std::max(worst, std::abs(a - b) / std::max(1e-300, std::abs(a)));
  }
  CHECK(worst < 1e-10);
  // T preserves s
  MatC s = sig.s_matrix();
  const MatC T = random_upq(1, 1, st);
  CHECK((T.adjoint() * s * T - s).norm() < 1e-12);
}

TEST_CASE("bosonic phase bookkeeping") {
  CHECK(std::abs(bosonic_phase(SignatureSpec::of({cd(0, 1)}), 1, 1) - cd(0, -1)) < 1e-15);
  CHECK(std::abs(bosonic_phase(SignatureSpec::of({cd(0, -1)}), 1, 1) - cd(0, 1)) < 1e-15);
  CHECK(std::abs(bosonic_phase(SignatureSpec::of({cd(0, 1), cd(0, -1)}), 3, 2) - 1.0) < 1e-15);
}

TEST_CASE("bosonic Gaussian reference measure") {
  Stream st(5, 0);
  for (int n : {1, 2, 3, 4}) {
    MatC X(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) X(a, b) = st.complex_normal(0.3);
    // Re A = (A + A^dagger)/2 positive definite
    MatC A = MatC::Identity(n, n) + 0.5 * (X - X.adjoint()) + 0.2 * X * X.adjoint();
    const cd exact = 1.0 / A.determinant();
    const GreensEstimate mc = bosonic_gaussian_mc(A, {100000, static_cast<std::uint64_t>(n), 0});
    GreensEstimate e;
    e.value = exact;
    CHECK(z_score(mc, e) < 5.0);
    if (n <= 2) {
      const QuadValue q = bosonic_gaussian_quadrature(A);
      CHECK(std::abs(q.value - exact) < 1e-6);
    }
  }
  const QuadValue one = bosonic_gaussian_quadrature(MatC::Identity(2, 2));
  CHECK(std::abs(one.value - 1.0) < 1e-10);
}
