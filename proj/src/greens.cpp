#include "susylab/greens.hpp"

#include <cmath>
#include <numbers>

#include "susylab/errors.hpp"

namespace susylab {

Spectrum::Spectrum(const MatC& h) {
  Eigen::SelfAdjointEigenSolver<MatC> es(h);
  eval = es.eigenvalues();
  evec = es.eigenvectors();
}

cd Spectrum::resolvent(cd z, Eigen::Index a, Eigen::Index b) const {
  cd acc = 0.0;
  for (Eigen::Index k = 0; k < eval.size(); ++k) acc += evec(a, k) * std::conj(evec(b, k)) / (z - eval(k));
  return acc;
}

double Spectrum::min_gap(cd z) const {
  double g = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < eval.size(); ++k) g = std::min(g, std::abs(z - eval(k)));
  return g;
}

namespace {

void check_site(const EnsembleSpec& spec, std::size_t site) {
  if (site >= spec.num_sites()) throw InvalidInput("site index out of range");
}

void check_z(cd z) {
  if (z.imag() == 0.0) throw InvalidInput("resolvent probe needs Im z != 0");
}

// R_block(i, j) = V_i diag(1/(z - lambda)) V_j^dagger
MatC resolvent_block(const EnsembleSpec& spec, const Spectrum& sp, std::size_t i, std::size_t j, cd z) {
  const int n = spec.orbitals;
  const auto vi = sp.evec.middleRows(spec.index(i, 0), n);
  const auto vj = sp.evec.middleRows(spec.index(j, 0), n);
  VecC r(sp.eval.size());
  for (Eigen::Index k = 0; k < r.size(); ++k) r(k) = 1.0 / (z - sp.eval(k));
  return vi * r.asDiagonal() * vj.adjoint();
}

// singular draws are measure zero; treat an exactly vanishing gap as one
bool singular(const Spectrum& sp, cd z) { return !(sp.min_gap(z) > 0.0); }

}  // namespace

cd g1_of(const EnsembleSpec& spec, const Spectrum& sp, std::size_t site, cd z) {
  cd acc = 0.0;
  const Eigen::Index a0 = spec.index(site, 0);
  for (Eigen::Index k = 0; k < sp.eval.size(); ++k) {
    double weight = 0.0;
    for (int a = 0; a < spec.orbitals; ++a) weight += std::norm(sp.evec(a0 + a, k));
    acc += weight / (z - sp.eval(k));
  }
  return acc;
}

cd g2_direct_of(const EnsembleSpec& spec, const MatC& h, std::size_t i, std::size_t j, cd z1, cd z2) {
  const Eigen::Index d = spec.dim();
  const MatC id = MatC::Identity(d, d);
  const MatC r1 = (z1 * id - h).partialPivLu().inverse();
  const MatC r2 = (z2 * id - h).partialPivLu().inverse();
  const int n = spec.orbitals;
  const Eigen::Index ai = spec.index(i, 0), bj = spec.index(j, 0);
  cd acc = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) acc += r1(ai + a, bj + b) * r2(bj + b, ai + a);
  return acc;
}

cd g2_detratio_of(const EnsembleSpec& spec, const MatC& h, std::size_t i, std::size_t j,
                  std::optional<int> orbital_a, std::optional<int> orbital_b, cd z1, cd z2, double* cond) {
  const Eigen::Index d = spec.dim();
  const MatC id = MatC::Identity(d, d);
  const MatC a1 = z1 * id - h;
  const MatC a2 = z2 * id - h;
  if (cond) {
    Eigen::SelfAdjointEigenSolver<MatC> es(h, Eigen::EigenvaluesOnly);
    double c = 0.0;
    for (cd z : {z1, z2}) {
      const auto gaps = (es.eigenvalues().cast<cd>().array() - z).abs();
      c = std::max(c, gaps.maxCoeff() / gaps.minCoeff());
    }
    *cond = c;
  }
  const int n = spec.orbitals;
  const int alo = orbital_a.value_or(0), ahi = orbital_a ? *orbital_a + 1 : n;
  const int blo = orbital_b.value_or(0), bhi = orbital_b ? *orbital_b + 1 : n;
  if (alo < 0 || ahi > n || blo < 0 || bhi > n) throw InvalidInput("orbital index out of range");
  cd acc = 0.0;
  for (int a = alo; a < ahi; ++a)
    for (int b = blo; b < bhi; ++b) {
      const Eigen::Index x = spec.index(i, a), y = spec.index(j, b);
      // d/ds Det(z1-H)/Det(z1-H-sE_{yx}) = C_yx(z1-H)/Det(z1-H), likewise for t
      acc += cofactor_ratio(a1, y, x) * cofactor_ratio(a2, x, y);
    }
  return acc;
}

GreensEstimate estimate_g1(const EnsembleSpec& spec, std::size_t site, cd z, const McConfig& mc) {
  require_sampling_ok(spec);
  check_site(spec, site);
  check_z(z);
  const McRun run = run_mc_scalar(mc, [&](std::uint64_t d, std::uint32_t attempt) -> std::optional<cd> {
    Stream st(mc.seed, d, attempt);
    MatC h;
    sample_into(spec, st, h);
    const Spectrum sp(h);
    if (singular(sp, z)) return std::nullopt;
    return g1_of(spec, sp, site, z);
  });
  return run.estimate(0, mc.seed);
}

std::vector<GreensEstimate> g2_profile(const EnsembleSpec& spec, std::size_t i,
                                       const std::vector<std::size_t>& js, cd z1, cd z2,
                                       const McConfig& mc) {
  require_sampling_ok(spec);
  check_site(spec, i);
  for (auto j : js) check_site(spec, j);
  check_z(z1);
  check_z(z2);
  const McRun run = run_mc(mc, js.size(), [&](std::uint64_t d, std::uint32_t attempt, std::span<cd> out) {
    Stream st(mc.seed, d, attempt);
    MatC h;
    sample_into(spec, st, h);
    const Spectrum sp(h);
    if (singular(sp, z1) || singular(sp, z2)) return DrawStatus::retry;
    for (std::size_t k = 0; k < js.size(); ++k) {
      const MatC r1 = resolvent_block(spec, sp, i, js[k], z1);
      const MatC r2 = resolvent_block(spec, sp, js[k], i, z2);
      out[k] = (r1 * r2).trace();
    }
    return DrawStatus::ok;
  });
  std::vector<GreensEstimate> est;
  for (std::size_t k = 0; k < js.size(); ++k) est.push_back(run.estimate(k, mc.seed));
  return est;
}

GreensEstimate estimate_g2(const EnsembleSpec& spec, std::size_t i, std::size_t j, cd z1, cd z2,
                           const McConfig& mc) {
  return g2_profile(spec, i, {j}, z1, z2, mc).front();
}

GreensEstimate estimate_g2_detratio(const EnsembleSpec& spec, std::size_t i, std::size_t j,
                                    std::optional<int> orbital_a, std::optional<int> orbital_b, cd z1,
                                    cd z2, const McConfig& mc) {
  require_sampling_ok(spec);
  check_site(spec, i);
  check_site(spec, j);
  check_z(z1);
  check_z(z2);
  const McRun run = run_mc(mc, 1, [&](std::uint64_t d, std::uint32_t attempt, std::span<cd> out) {
    Stream st(mc.seed, d, attempt);
    MatC h;
    sample_into(spec, st, h);
    double cond = 0.0;
    const cd v = g2_detratio_of(spec, h, i, j, orbital_a, orbital_b, z1, z2, &cond);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return DrawStatus::retry;
    out[0] = v;
    return cond > kCondGuard ? DrawStatus::flagged : DrawStatus::ok;
  });
  return run.estimate(0, mc.seed);
}

std::vector<DosPoint> dos_profile(const EnsembleSpec& spec, std::size_t site, const std::vector<double>& grid,
                                  double epsilon, const McConfig& mc) {
  if (!(epsilon > 0.0)) throw InvalidInput("dos_profile: epsilon must be positive");
  std::vector<DosPoint> out;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    McConfig m = mc;
    m.seed = mix_seed(mc.seed, k);
    const GreensEstimate g = estimate_g1(spec, site, cd(grid[k], epsilon), m);
    out.push_back({grid[k], -g.value.imag() / std::numbers::pi, g.se_im / std::numbers::pi});
  }
  return out;
}

LyapunovFit lyapunov_fit(const std::vector<std::pair<double, double>>& values, std::pair<double, double> range) {
  std::vector<double> x, y;
  for (const auto& [dist, v] : values) {
    if (dist < range.first || dist > range.second) continue;
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidInput("lyapunov_fit: non-positive value in fit range");
    x.push_back(dist);
    y.push_back(std::log(v));
  }
  if (x.size() < 4) throw InvalidInput("lyapunov_fit: need at least 4 points in range");
  const LinearFit f = least_squares(x, y);
  LyapunovFit out;
  out.lambda = -f.slope;
  if (out.lambda == 0.0) out.lambda = 0.0;  // normalise -0
  out.intercept = f.intercept;
  out.r_squared = f.r2;
  out.fit_range = range;
  out.num_points = x.size();
  return out;
}

}  // namespace susylab
