#include <unsupported/Eigen/MatrixFunctions>
#include <cmath>

#include "susylab/duality.hpp"
#include "susylab/errors.hpp"
#include "susylab/quadrature.hpp"

namespace susylab {

namespace {

cd ipow(cd base, int k) {
  cd r = 1.0;
  for (int i = 0; i < k; ++i) r *= base;
  return r;
}

double min_abs_im(const SignatureSpec& sig) {
  double k = std::numeric_limits<double>::infinity();
  for (cd v : sig.z) k = std::min(k, std::abs(v.imag()));
  return k;
}

void check_fyodorov(const EnsembleSpec& spec, const SignatureSpec& sig) {
  if (sig.n() < 1 || sig.n() > 2) throw InvalidInput("verify_fyodorov supports n = 1, 2");
  if (spec.num_sites() > 2) throw InvalidInput("verify_fyodorov supports |Lambda| <= 2");
  if (spec.orbitals < sig.n())
    throw Refusal(
        "N < n: the flat measure is pushed forward into the boundary of Y (rank-deficient M), "
        "so the Fyodorov density does not exist");
  if (!sig.ordered()) throw InvalidInput("z values must list Im z > 0 first and have Im z != 0");
  require_sampling_ok(spec);
}

}  // namespace

cd bosonic_phase(const SignatureSpec& sig, int orbitals, std::size_t num_sites) {
  cd ph = 1.0;
  const int k = orbitals * static_cast<int>(num_sites);
  for (int a = 0; a < sig.n(); ++a) ph *= ipow(cd(0, -sig.s(a)), k);
  return ph;
}

cd fyodorov_integrand(const EnsembleSpec& spec, const SignatureSpec& sig, const std::vector<MatC>& m) {
  const MatC s = sig.s_matrix();
  const MatC sz = s * sig.z_matrix();
  const std::size_t L = spec.num_sites();
  cd quad = 0.0, lin = 0.0;
  for (std::size_t i = 0; i < L; ++i) {
    const MatC smi = s * m[i];
    for (std::size_t j = 0; j < L; ++j) quad += spec.J()(i, j) * (smi * s * m[j]).trace();
    lin += (sz * m[i]).trace();
  }
  return std::exp(-0.5 * quad + cd(0, 1) * lin);
}

MatC random_upq(int p, int q, Stream& st, double scale) {
  const int n = p + q;
  MatC x = MatC::Zero(n, n);
  // u(p,q): anti-Hermitian diagonal blocks, off-diagonal blocks B and B^dagger
  for (int a = 0; a < n; ++a) {
    x(a, a) = cd(0, scale * st.normal());
    for (int b = a + 1; b < n; ++b) {
      const cd v = scale * st.complex_normal(1.0);
      const bool same = (a < p) == (b < p);
      x(a, b) = v;
      x(b, a) = same ? -std::conj(v) : std::conj(v);
    }
  }
  return x.exp();
}

QuadValue fyodorov_quadrature(const EnsembleSpec& spec, const SignatureSpec& sig, const FyodorovConfig& fc) {
  check_fyodorov(spec, sig);
  const int n = sig.n(), N = spec.orbitals;
  const std::size_t L = spec.num_sites();
  if (n == 2 && L != 1) throw InvalidInput("n = 2 quadrature needs |Lambda| = 1; use the sampled route");
  const double kappa = min_abs_im(sig);
  const double m_max = std::max(fc.tail, fc.tail / kappa) * (1.0 + 0.1 * n * N);
  const cd phase = bosonic_phase(sig, N, L);

  auto run = [&](int mn, int an) -> cd {
    const Rule gm = gauss_legendre(mn, 0.0, m_max);
    if (n == 1) {
      // density m^{N-1}/Gamma(N) per site; normalized exactly
      const double lg = std::lgamma(static_cast<double>(N));
      std::vector<MatC> m(L, MatC::Zero(1, 1));
      cd acc = 0.0;
      std::vector<std::size_t> idx(L, 0);
      for (;;) {
        double w = 1.0;
        for (std::size_t i = 0; i < L; ++i) {
          const double mi = gm.nodes[idx[i]];
          m[i](0, 0) = mi;
          w *= gm.weights[idx[i]] * std::exp((N - 1) * std::log(mi) - lg);
        }
        acc += w * fyodorov_integrand(spec, sig, m);
        std::size_t d = 0;
        while (d < L && ++idx[d] == gm.size()) idx[d++] = 0;
        if (d == L) break;
      }
      return phase * acc;
    }
    // n = 2, one site: M = U diag(m1, m2) U^dagger with m1 = m >= m2 = m v
    // and u = cos 2 theta, so M11,22 = mu +- delta u, |M12|^2 = delta^2 (1 - u^2)
    // (mu, delta the eigenvalue mean and half-difference). The phase of M12
    // drops out. Measure (m1 - m2)^2 dm1 dm2 du, the same for the reference
    // exp(-Tr M) (Det M)^{N-2}.
    const Rule gv = gauss_legendre(mn, 0.0, 1.0);
    const double J = spec.J()(0, 0);
    const cd zs_diff = sig.s(0) * sig.z[0] - sig.s(1) * sig.z[1];
    cd acc = 0.0;
    double ref = 0.0;
    std::vector<MatC> m(1, MatC::Zero(2, 2));
    for (std::size_t a = 0; a < gm.size(); ++a)
      for (std::size_t b = 0; b < gv.size(); ++b) {
        const double m1 = gm.nodes[a], m2 = gm.nodes[a] * gv.nodes[b];
        const double mu = 0.5 * (m1 + m2), delta = 0.5 * (m1 - m2);
        const double wm = gm.weights[a] * gv.weights[b] * m1 * (m1 - m2) * (m1 - m2) *
                          std::pow(m1 * m2, N - 2);
        ref += wm * 2.0 * std::exp(-m1 - m2);
        // exponent in u: -a u^2 + b u + const; truncate where it reaches -tail
        const double qa = 0.5 * J * 4.0 * delta * delta;
        const double rb = std::abs((cd(0, 1) * zs_diff * delta).real());
        const double uc =
            qa > 0.0 ? std::min(1.0, (rb + std::sqrt(rb * rb + 4.0 * qa * fc.tail)) / (2.0 * qa)) : 1.0;
        const Rule gu = gauss_legendre(an, -uc, uc);
        cd inner = 0.0;
        for (std::size_t k = 0; k < gu.size(); ++k) {
          const double u = gu.nodes[k];
          m[0](0, 0) = mu + delta * u;
          m[0](1, 1) = mu - delta * u;
          m[0](0, 1) = m[0](1, 0) = delta * std::sqrt(std::max(0.0, 1.0 - u * u));
          inner += gu.weights[k] * fyodorov_integrand(spec, sig, m);
        }
        acc += wm * inner;
      }
    return phase * acc / ref;
  };
  const cd coarse = run(fc.m_nodes, fc.angle_nodes);
  const cd fine = run(2 * fc.m_nodes, 2 * fc.angle_nodes);
  return {fine, std::abs(fine - coarse)};
}

GreensEstimate fyodorov_sampled(const EnsembleSpec& spec, const SignatureSpec& sig, const McConfig& mc) {
  check_fyodorov(spec, sig);
  const int n = sig.n(), N = spec.orbitals;
  const std::size_t L = spec.num_sites();
  const double kappa = min_abs_im(sig);
  const cd phase = bosonic_phase(sig, N, L);
  const double log_norm = -static_cast<double>(n * N * L) * std::log(kappa);
  const McRun run = run_mc_scalar(mc, [&](std::uint64_t d, std::uint32_t attempt) -> std::optional<cd> {
    Stream st(mc.seed, d, attempt);
    // M_i = sum over orbitals of phi phi^dagger with E|phi|^2 = 1/kappa:
    // density kappa^{nN} exp(-kappa Tr M) (Det M)^{N-n} in the normalized dM
    std::vector<MatC> m(L, MatC::Zero(n, n));
    double trace = 0.0;
    for (std::size_t i = 0; i < L; ++i) {
      MatC phi(n, N);
      for (int a = 0; a < n; ++a)
        for (int o = 0; o < N; ++o) phi(a, o) = st.complex_normal(1.0 / kappa);
      m[i] = phi.conjugate() * phi.transpose();
      trace += m[i].trace().real();
    }
    return phase * std::exp(log_norm + kappa * trace) * fyodorov_integrand(spec, sig, m);
  });
  return run.estimate(0, mc.seed);
}

DualityReport verify_fyodorov(const EnsembleSpec& spec, const SignatureSpec& sig, const McConfig& mc,
                              const FyodorovConfig& fc) {
  if (mc.num_samples < kMinBudget) throw InvalidInput("sample budget below 1000");
  check_fyodorov(spec, sig);
  DualityReport r;
  r.op = "verify-fyodorov";
  r.set("n", sig.n());
  r.set("p", sig.p());
  r.set("N", spec.orbitals);
  r.set("L", static_cast<double>(spec.num_sites()));
  r.set("seed", std::to_string(mc.seed));
  r.set("num_samples", std::to_string(mc.num_samples));
  const McRun lhs = lhs_inverse_det_products(spec, sig, mc);
  r.lhs = lhs.estimate(0, mc.seed);
  r.lhs_median = lhs.median_of_means(0);
  r.lhs_tail_ratio = r.lhs.se_max() > 0 ? std::abs(r.lhs.value - r.lhs_median) / r.lhs.se_max() : 0.0;

  const bool quad = !fc.force_sampling && (sig.n() == 1 || spec.num_sites() == 1);
  if (quad) {
    const QuadValue qv = fyodorov_quadrature(spec, sig, fc);
    r.rhs.value = qv.value;
    r.rhs.se_re = r.rhs.se_im = qv.delta;
    r.set("rhs_method", "quadrature");
    r.set("m_nodes", fc.m_nodes);
    r.set("angle_nodes", fc.angle_nodes);
    r.set("tail", fc.tail);
    r.set("rhs_delta", qv.delta);
  } else {
    McConfig m2 = mc;
    m2.seed = mix_seed(mc.seed, 0x46594f44ULL);
    r.rhs = fyodorov_sampled(spec, sig, m2);
    r.set("rhs_method", "wishart");
  }
  r.rhs_median = r.rhs.value;
  r.finish();
  return r;
}

}  // namespace susylab
