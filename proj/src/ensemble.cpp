#include "susylab/ensemble.hpp"

#include <cmath>
#include <sstream>

#include "susylab/errors.hpp"
#include "susylab/hash.hpp"

namespace susylab {

LatticeSpec LatticeSpec::chain(std::size_t num_sites) {
  if (num_sites == 0) throw InvalidInput("lattice needs at least one site");
  LatticeSpec l;
  l.num_sites = num_sites;
  l.metric = [](std::size_t i, std::size_t j) {
    return static_cast<double>(i > j ? i - j : j - i);
  };
  return l;
}

double LatticeSpec::distance(std::size_t i, std::size_t j) const {
  if (metric) return metric(i, j);
  return static_cast<double>(i > j ? i - j : j - i);
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  os << "symmetric=" << symmetric << " all_positive=" << all_positive
     << " positive_definite=" << positive_definite << " (min_ev=" << min_eigenvalue
     << ", max_ev=" << max_eigenvalue << ") w_offdiag_nonpositive=" << w_offdiag_nonpositive
     << " (max_offdiag_w=" << max_offdiag_w << ")";
  return os.str();
}

ValidationReport validate_covariance(const CovarianceSpec& cov) {
  ValidationReport r;
  const MatR& J = cov.J;
  const Eigen::Index n = J.rows();
  r.symmetric = J.rows() == J.cols() && J == J.transpose();
  r.all_positive = (J.array() > 0.0).all() && J.allFinite();
  if (!r.symmetric || n == 0) return r;

  Eigen::SelfAdjointEigenSolver<MatR> es(J, Eigen::EigenvaluesOnly);
  r.min_eigenvalue = es.eigenvalues().minCoeff();
  r.max_eigenvalue = es.eigenvalues().maxCoeff();
  r.positive_definite = r.max_eigenvalue > 0.0 && r.min_eigenvalue > kPdRelTol * r.max_eigenvalue;

  r.max_offdiag_w = -std::numeric_limits<double>::infinity();
  if (cov.w.rows() == n && cov.w.allFinite()) {
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        if (i != j) r.max_offdiag_w = std::max(r.max_offdiag_w, cov.w(i, j));
    if (n == 1) r.max_offdiag_w = 0.0;
    r.w_offdiag_nonpositive = r.max_offdiag_w <= kWTol;
  } else {
    r.max_offdiag_w = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

CovarianceSpec covariance_from_matrix(const MatR& J) {
  if (J.rows() != J.cols() || J.rows() == 0) throw InvalidInput("covariance must be square and non-empty");
  if (!J.allFinite()) throw InvalidInput("covariance has non-finite entries");
  CovarianceSpec c;
  c.J = J;
  Eigen::FullPivLU<MatR> lu(J);
  if (!lu.isInvertible()) throw NumericalFailure("covariance matrix J is singular");
  c.w = lu.inverse();
  c.report = validate_covariance(c);
  return c;
}

CovarianceSpec build_covariance(const LatticeSpec& lattice, const std::function<double(double)>& profile,
                                double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw InvalidInput("covariance scale must be positive");
  const auto n = static_cast<Eigen::Index>(lattice.num_sites);
  MatR J(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const double f = profile(lattice.distance(i, j));
      if (!std::isfinite(f)) throw InvalidInput("covariance profile returned a non-finite value");
      J(i, j) = scale * f;
    }
  return covariance_from_matrix(J);
}

std::uint64_t EnsembleSpec::id() const {
  Fnv1a h;
  h.value(static_cast<std::uint64_t>(lattice.num_sites));
  h.value(static_cast<std::int64_t>(orbitals));
  for (Eigen::Index k = 0; k < covariance.J.size(); ++k) h.value(covariance.J.data()[k]);
  return h.digest();
}

EnsembleSpec make_spec(std::size_t num_sites, int orbitals, const MatR& J) {
  if (orbitals < 1) throw InvalidInput("orbitals must be >= 1");
  if (static_cast<std::size_t>(J.rows()) != num_sites)
    throw InvalidInput("covariance dimension does not match the lattice");
  EnsembleSpec s;
  s.lattice = LatticeSpec::chain(num_sites);
  s.orbitals = orbitals;
  s.covariance = covariance_from_matrix(J);
  return s;
}

void require_sampling_ok(const EnsembleSpec& spec) {
  if (!spec.covariance.report.ok_for_sampling())
    throw Refusal("ensemble covariance failed validation: " + spec.covariance.report.summary());
}

void sample_into(const EnsembleSpec& spec, Stream& st, MatC& h) {
  const Eigen::Index d = spec.dim();
  const int n = spec.orbitals;
  h.resize(d, d);
  const MatR& J = spec.J();
  for (Eigen::Index a = 0; a < d; ++a) {
    const auto ia = static_cast<Eigen::Index>(a / n);
    h(a, a) = std::sqrt(J(ia, ia)) * st.normal();
    for (Eigen::Index b = a + 1; b < d; ++b) {
      const cd x = st.complex_normal(J(ia, b / n));
      h(a, b) = x;
      h(b, a) = std::conj(x);
    }
  }
}

HermitianSample sample(const EnsembleSpec& spec, std::uint64_t seed, std::uint64_t draw) {
  require_sampling_ok(spec);
  Stream st(seed, draw);
  HermitianSample s;
  sample_into(spec, st, s.matrix);
  s.spec_id = spec.id();
  s.seed = seed;
  s.draw = draw;
  return s;
}

cd j_form(const EnsembleSpec& spec, const MatC& K, const MatC& K2) {
  const Eigen::Index d = spec.dim();
  if (K.rows() != d || K.cols() != d || K2.rows() != d || K2.cols() != d)
    throw InvalidInput("j_form: matrix dimension does not match the ensemble");
  cd acc = 0.0;
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = 0; b < d; ++b) acc += spec.J()(spec.site_of(a), spec.site_of(b)) * K(a, b) * K2(b, a);
  return acc;
}

cd characteristic_fn(const EnsembleSpec& spec, const MatC& K) { return std::exp(-0.5 * j_form(spec, K, K)); }

}  // namespace susylab
