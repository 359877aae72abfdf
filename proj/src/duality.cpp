#include "susylab/duality.hpp"

#include <cmath>
#include <sstream>

#include "susylab/errors.hpp"
#include "susylab/quadrature.hpp"

namespace susylab {

int SignatureSpec::p() const {
  int c = 0;
  for (cd v : z) c += v.imag() > 0 ? 1 : 0;
  return c;
}

MatC SignatureSpec::s_matrix() const {
  MatC s = MatC::Zero(n(), n());
  for (int a = 0; a < n(); ++a) s(a, a) = this->s(a);
  return s;
}

MatC SignatureSpec::z_matrix() const {
  MatC m = MatC::Zero(n(), n());
  for (int a = 0; a < n(); ++a) m(a, a) = z[a];
  return m;
}

bool SignatureSpec::ordered() const {
  const int pp = p();
  for (int a = 0; a < n(); ++a) {
    if (z[a].imag() == 0.0) return false;
    if ((a < pp) != (z[a].imag() > 0)) return false;
  }
  return true;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::consistent: return "consistent";
    case Verdict::inconsistent: return "inconsistent";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

Verdict verdict_for(double z) {
  if (z < 3.0) return Verdict::consistent;
  if (z > 5.0) return Verdict::inconsistent;
  return Verdict::inconclusive;
}

void DualityReport::finish() {
  z_score = susylab::z_score(lhs, rhs);
  verdict = verdict_for(z_score);
}

void DualityReport::set(const std::string& key, const std::string& value) {
  for (auto& kv : config)
    if (kv.first == key) {
      kv.second = value;
      return;
    }
  config.emplace_back(key, value);
}

void DualityReport::set(const std::string& key, double value) {
  std::ostringstream os;
  os.precision(17);
  os << value;
  set(key, os.str());
}

namespace {

void check_budget(const McConfig& mc) {
  if (mc.num_samples < kMinBudget) throw InvalidInput("sample budget below 1000");
}

void check_signature(const SignatureSpec& sig) {
  if (sig.n() < 1) throw InvalidInput("signature needs at least one z value");
  for (cd v : sig.z)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw InvalidInput("non-finite z value");
}

template <bool Inverse>
McRun det_products(const EnsembleSpec& spec, const SignatureSpec& sig, const McConfig& mc) {
  require_sampling_ok(spec);
  return run_mc_scalar(mc, [&](std::uint64_t d, std::uint32_t attempt) -> std::optional<cd> {
    Stream st(mc.seed, d, attempt);
    MatC h;
    sample_into(spec, st, h);
    Eigen::SelfAdjointEigenSolver<MatC> es(h, Eigen::EigenvaluesOnly);
    cd prod = 1.0;
    for (cd z : sig.z)
      for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) prod *= z - es.eigenvalues()(k);
    if constexpr (Inverse) {
      if (prod == 0.0) return std::nullopt;
      return 1.0 / prod;
    }
    return prod;
  });
}

std::uint64_t rhs_seed(std::uint64_t seed) { return mix_seed(seed, 0x52485321ULL); }

void fill_common(DualityReport& r, const std::string& op, const EnsembleSpec& spec, const SignatureSpec& sig,
                 const McConfig& mc) {
  r.op = op;
  r.set("n", sig.n());
  r.set("p", sig.p());
  r.set("N", spec.orbitals);
  r.set("L", static_cast<double>(spec.num_sites()));
  r.set("seed", std::to_string(mc.seed));
  r.set("num_samples", std::to_string(mc.num_samples));
  r.set("spec_id", std::to_string(spec.id()));
}

void attach_lhs(DualityReport& r, const McRun& run, std::uint64_t seed) {
  r.lhs = run.estimate(0, seed);
  r.lhs_median = run.median_of_means(0);
  const double se = r.lhs.se_max();
  r.lhs_tail_ratio = se > 0 ? std::abs(r.lhs.value - r.lhs_median) / se : 0.0;
}

void attach_rhs(DualityReport& r, const McRun& run, std::uint64_t seed) {
  r.rhs = run.estimate(0, seed);
  r.rhs_median = run.median_of_means(0);
  const double se = r.rhs.se_max();
  r.rhs_tail_ratio = se > 0 ? std::abs(r.rhs.value - r.rhs_median) / se : 0.0;
}

// shared body of the naive formula: E_Q prod_j Det^{-N}(z - Q_j)
McRun naive_rhs(const EnsembleSpec& spec, const SignatureSpec& sig, const McConfig& mc) {
  const QSampler qs(spec, sig.n());
  const MatC z = sig.z_matrix();
  McConfig m2 = mc;
  m2.seed = rhs_seed(mc.seed);
  return run_mc_scalar(m2, [&](std::uint64_t d, std::uint32_t attempt) -> std::optional<cd> {
    Stream st(m2.seed, d, attempt);
    std::vector<MatC> q;
    qs.draw(st, q);
    cd prod = 1.0;
    for (const MatC& qj : q) prod *= std::pow((z - qj).determinant(), spec.orbitals);
    if (prod == 0.0) return std::nullopt;
    return 1.0 / prod;
  });
}

DualityReport naive_report(const std::string& op, const EnsembleSpec& spec, const SignatureSpec& sig,
                           const McConfig& mc) {
  DualityReport r;
  fill_common(r, op, spec, sig, mc);
  attach_lhs(r, lhs_inverse_det_products(spec, sig, mc), mc.seed);
  attach_rhs(r, naive_rhs(spec, sig, mc), rhs_seed(mc.seed));
  r.finish();
  if (r.lhs_tail_ratio > 3.0 || r.rhs_tail_ratio > 3.0)
    r.notes.push_back("heavy tail: mean and median-of-means differ by more than 3 se");
  return r;
}

}  // namespace

McRun lhs_det_products(const EnsembleSpec& spec, const SignatureSpec& sig, const McConfig& mc) {
  return det_products<false>(spec, sig, mc);
}

McRun lhs_inverse_det_products(const EnsembleSpec& spec, const SignatureSpec& sig, const McConfig& mc) {
  return det_products<true>(spec, sig, mc);
}

QSampler::QSampler(const EnsembleSpec& spec, int n) : n_(n) {
  require_sampling_ok(spec);
  Eigen::SelfAdjointEigenSolver<MatR> es(spec.J());
  o_ = es.eigenvectors();
  lambda_ = es.eigenvalues();
  if (lambda_.minCoeff() <= 0.0) throw Refusal("covariance J is not positive definite");
}

void QSampler::draw(Stream& st, std::vector<MatC>& q) const {
  const Eigen::Index L = lambda_.size();
  std::vector<MatC> g(L, MatC::Zero(n_, n_));
  for (Eigen::Index k = 0; k < L; ++k) {
    const double var = lambda_(k);
    for (int a = 0; a < n_; ++a) {
      g[k](a, a) = std::sqrt(var) * st.normal();
      for (int b = a + 1; b < n_; ++b) {
        g[k](a, b) = st.complex_normal(var);
        g[k](b, a) = std::conj(g[k](a, b));
      }
    }
  }
  q.assign(L, MatC::Zero(n_, n_));
  for (Eigen::Index i = 0; i < L; ++i)
    for (Eigen::Index k = 0; k < L; ++k) q[i] += o_(i, k) * g[k];
}

DualityReport verify_fermionic(const EnsembleSpec& spec, const SignatureSpec& sig, const McConfig& mc) {
  check_budget(mc);
  check_signature(sig);
  if (sig.n() > 3 || spec.orbitals > 4 || spec.num_sites() > 3)
    throw InvalidInput("verify_fermionic is limited to n <= 3, N <= 4, |Lambda| <= 3");
  DualityReport r;
  fill_common(r, "verify-fermionic", spec, sig, mc);
  attach_lhs(r, lhs_det_products(spec, sig, mc), mc.seed);

  const QSampler qs(spec, sig.n());
  const MatC z = sig.z_matrix();
  McConfig m2 = mc;
  m2.seed = rhs_seed(mc.seed);
  const McRun rhs = run_mc_scalar(m2, [&](std::uint64_t d, std::uint32_t attempt) -> std::optional<cd> {
    Stream st(m2.seed, d, attempt);
    std::vector<MatC> q;
    qs.draw(st, q);
    cd prod = 1.0;
    for (const MatC& qj : q) prod *= std::pow((z - cd(0, 1) * qj).determinant(), spec.orbitals);
    return prod;
  });
  attach_rhs(r, rhs, m2.seed);
  r.finish();
  return r;
}

DualityReport verify_bosonic_same_half(const EnsembleSpec& spec, const SignatureSpec& sig, const McConfig& mc) {
  check_budget(mc);
  check_signature(sig);
  const int p = sig.p();
  if (p != 0 && p != sig.n()) throw InvalidInput("mixed signature: use falsify_naive");
  for (cd v : sig.z)
    if (std::abs(v.imag()) < 0.1) throw InvalidInput("|Im z| below 0.1");
  return naive_report("verify-bosonic", spec, sig, mc);
}

DualityReport falsify_naive(const EnsembleSpec& spec, const SignatureSpec& sig, const McConfig& mc) {
  check_budget(mc);
  check_signature(sig);
  const int p = sig.p();
  if (p == 0 || p == sig.n()) throw InvalidInput("falsify_naive needs 0 < p < n");
  for (cd v : sig.z)
    if (v.imag() == 0.0) throw InvalidInput("Im z must be nonzero");
  return naive_report("falsify-naive", spec, sig, mc);
}

GreensEstimate bosonic_gaussian_mc(const MatC& A, const McConfig& mc) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || n < 1) throw InvalidInput("A must be square");
  const MatC shift = A - MatC::Identity(n, n);
  const McRun run = run_mc_scalar(mc, [&](std::uint64_t d, std::uint32_t attempt) -> std::optional<cd> {
    Stream st(mc.seed, d, attempt);
    VecC phi(n);
    for (Eigen::Index k = 0; k < n; ++k) phi(k) = st.complex_normal(1.0);
    return std::exp(-phi.dot(shift * phi));
  });
  return run.estimate(0, mc.seed);
}

QuadValue bosonic_gaussian_quadrature(const MatC& A, int nodes) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || n < 1 || n > 2) throw InvalidInput("quadrature check supports n = 1, 2");
  const MatC shift = A - MatC::Identity(n, n);
  auto run = [&](int m) {
    // phi_k = (u + i v)/sqrt(2): the reference weight exp(-|phi|^2)/pi^n
    // becomes a product of standard normal densities in u, v
    const Rule gh = gauss_hermite(m);
    const double norm = 1.0 / std::sqrt(2.0 * M_PI);
    const int dims = static_cast<int>(2 * n);
    std::vector<int> idx(dims, 0);
    cd acc = 0.0;
    for (;;) {
      VecC phi(n);
      double w = 1.0;
      for (Eigen::Index k = 0; k < n; ++k) {
        phi(k) = cd(gh.nodes[idx[2 * k]], gh.nodes[idx[2 * k + 1]]) / std::sqrt(2.0);
        w *= gh.weights[idx[2 * k]] * gh.weights[idx[2 * k + 1]] * norm * norm;
      }
      acc += w * std::exp(-phi.dot(shift * phi));
      int d = 0;
      while (d < dims && ++idx[d] == m) idx[d++] = 0;
      if (d == dims) break;
    }
    return acc;
  };
  const cd coarse = run(nodes), fine = run(2 * nodes);
  return {fine, std::abs(fine - coarse)};
}

}  // namespace susylab
