#include "susylab/saddle.hpp"

#include <cmath>
#include <limits>

#include "susylab/ensemble.hpp"
#include "susylab/errors.hpp"
#include "susylab/quadrature.hpp"

namespace susylab {

const char* to_string(Branch b) {
  switch (b) {
    case Branch::hyperbolic_bb: return "hyperbolic_bb";
    case Branch::sphere_ff: return "sphere_ff";
    case Branch::plus_one_ff: return "plus_one_ff";
    case Branch::minus_one_ff: return "minus_one_ff";
  }
  return "?";
}

MatC manifold_point(const ManifoldPoint& pt) {
  MatC q(2, 2);
  const cd e = std::exp(cd(0, pt.phi));
  switch (pt.branch) {
    case Branch::hyperbolic_bb: {
      const double c = std::cosh(pt.theta), s = std::sinh(pt.theta);
      q << c, s * e, s * std::conj(e), c;
      break;
    }
    case Branch::sphere_ff: {
      const double c = std::cos(pt.theta), s = std::sin(pt.theta);
      q << c, s * e, s * std::conj(e), -c;
      break;
    }
    case Branch::plus_one_ff: q = MatC::Identity(2, 2); break;
    case Branch::minus_one_ff: q = -MatC::Identity(2, 2); break;
  }
  return q;
}

SaddleConfig make_saddle_config(const MatR& w, int orbitals) {
  if (w.rows() < 1 || w.rows() != w.cols()) throw InvalidInput("w must be square");
  if (orbitals < 1) throw InvalidInput("N must be positive");
  const VecR rows = w.rowwise().sum();
  const double scale = w.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 1; i < rows.size(); ++i)
    if (std::abs(rows(i) - rows(0)) > 1e-12 * scale * w.cols())
      throw Refusal("w is not translation invariant: row sums differ, no site-independent saddle");
  if (!(rows(0) > 0.0)) throw Refusal("sum_j w_ij must be positive for lambda = sqrt(N / sum_j w_ij)");
  SaddleConfig c;
  c.w = w;
  c.orbitals = orbitals;
  c.lambda = std::sqrt(orbitals / rows(0));
  return c;
}

double sector_residual(const MatC& q, const MatC& s) {
  Eigen::FullPivLU<MatC> lu(q);
  if (!lu.isInvertible()) throw InvalidInput("q is singular");
  return (s * q * s - lu.inverse()).norm();
}

double saddle_residual(const MatC& q_bb, const MatC& q_ff) {
  if (q_bb.rows() != 2 || q_bb.cols() != 2 || q_ff.rows() != 2 || q_ff.cols() != 2)
    throw InvalidInput("sector blocks must be 2x2");
  MatC s_bb = MatC::Identity(2, 2);
  s_bb(1, 1) = -1.0;
  const double bb = sector_residual(q_bb, s_bb);
  const double ff = sector_residual(q_ff, MatC::Identity(2, 2));
  return std::hypot(bb, ff);
}

double saddle_residual(const MatC& q_bb, const MatC& q_ff, const SaddleConfig& cfg) {
  // validates translational invariance and the sign of the row sums
  make_saddle_config(cfg.w, cfg.orbitals);
  return saddle_residual(q_bb, q_ff);
}

ConstantSaddle constant_saddle(const SaddleConfig& cfg, const ManifoldPoint& bb, const ManifoldPoint& ff) {
  const SaddleConfig c = make_saddle_config(cfg.w, cfg.orbitals);
  if (bb.branch != Branch::hyperbolic_bb) throw InvalidInput("q_BB must lie on the hyperbolic sheet");
  if (ff.branch == Branch::hyperbolic_bb) throw InvalidInput("q_FF must be an FF branch");
  MatC q = MatC::Zero(4, 4);
  q.topLeftCorner(2, 2) = manifold_point(bb);
  q.bottomRightCorner(2, 2) = manifold_point(ff);
  const MatC Q = c.lambda * q;
  MatC s = MatC::Identity(4, 4);
  s(1, 1) = -1.0;
  const MatC sQs = s * Q * s;
  const MatC Qinv = Q.inverse();
  const Eigen::Index L = c.w.rows();
  ConstantSaddle out;
  out.lambda = c.lambda;
  for (Eigen::Index i = 0; i < L; ++i) {
    MatC lhs = MatC::Zero(4, 4);
    for (Eigen::Index j = 0; j < L; ++j) lhs += c.w(i, j) * sQs;
    const double r = (lhs - static_cast<double>(c.orbitals) * Qinv).norm() / (c.orbitals / c.lambda);
    out.residual = std::max(out.residual, r);
  }
  return out;
}

namespace {

MatC fiber_map(const MatC& q_bb, const MatC& q_ff) {
  // residual relative to the size of the boost
  if (saddle_residual(q_bb, q_ff) > 1e-8 * (1.0 + q_bb.squaredNorm())) throw InvalidInput("q0 is not on the saddle-point manifold");
  MatC s_b = MatC::Identity(2, 2);
  s_b(1, 1) = -1.0;
  const MatC s_f = MatC::Identity(2, 2);
  const MatC ib = q_bb.inverse(), iff = q_ff.inverse();
  MatC A(8, 8);
  for (int k = 0; k < 8; ++k) {
    MatC X = MatC::Zero(2, 2), Y = MatC::Zero(2, 2);
    (k < 4 ? X : Y)((k % 4) / 2, k % 2) = 1.0;
    // odd blocks of s q1 s + q0^{-1} q1 q0^{-1}
    const MatC bf = s_b * X * s_f + ib * X * iff;
    const MatC fb = s_f * Y * s_b + iff * Y * ib;
    for (int r = 0; r < 4; ++r) {
      A(r, k) = bf(r / 2, r % 2);
      A(4 + r, k) = fb(r / 2, r % 2);
    }
  }
  return A;
}

}  // namespace

VecR fiber_singular_values(const MatC& q_bb, const MatC& q_ff) {
  return Eigen::JacobiSVD<MatC>(fiber_map(q_bb, q_ff)).singularValues();
}

int fiber_dimension(const MatC& q_bb, const MatC& q_ff) {
  const VecR sv = fiber_singular_values(q_bb, q_ff);
  int null = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k)
    if (sv(k) <= kNullThreshold * sv(0)) ++null;
  return null;
}

namespace {

// one-dimensional saddle data for f(q) = ln(E - i q) - q^2 / (2 lambda^2)
struct Crit {
  cd q;
  cd g;  // (E - iq)^N exp(-N q^2 / 2 lambda^2) sqrt(2 pi / (-N f''))
};

Crit crit(int N, double E, double lambda, cd q) {
  const cd a = E - cd(0, 1) * q;
  const cd mfpp = 1.0 / (lambda * lambda) - 1.0 / (a * a);
  const cd g = std::exp(static_cast<double>(N) * (std::log(a) - q * q / (2 * lambda * lambda))) *
               std::sqrt(2 * M_PI / (static_cast<double>(N) * mfpp));
  return {q, g};
}

cd saddle_value(int N, int n, double E, double lambda) {
  const double disc = 4 * lambda * lambda - E * E;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (disc > 0) {
    // both critical points q = (-iE +- sqrt(4 lambda^2 - E^2))/2 lie on the
    // steepest-descent contour with equal weight
    const Crit a = crit(N, E, lambda, cd(std::sqrt(disc), -E) / 2.0);
    const Crit b = crit(N, E, lambda, cd(-std::sqrt(disc), -E) / 2.0);
    const double norm1 = std::sqrt(2 * M_PI * lambda * lambda / N);
    if (n == 1) return (a.g + b.g) / norm1;
    // eigenvalues split over the two points; Vandermonde (q1 - q2)^2, both
    // orderings, over the Gaussian normalization int (x - y)^2 exp(...)
    const double norm2 = 4 * M_PI * std::pow(lambda, 4) / (static_cast<double>(N) * N);
    return 2.0 * (a.q - b.q) * (a.q - b.q) * a.g * b.g / norm2;
  }
  if (n != 1) return {nan, nan};
  // outside the band: the imaginary critical point nearer the origin
  const double sgn = E > 0 ? 1.0 : -1.0;
  const Crit c = crit(N, E, lambda, cd(0, -(E - sgn * std::sqrt(-disc)) / 2.0));
  return c.g / std::sqrt(2 * M_PI * lambda * lambda / N);
}

cd q_quadrature(int N, int n, double E, double lambda, int nodes) {
  const Rule gh = gauss_hermite(nodes);
  const double norm = 1.0 / std::sqrt(2 * M_PI);
  const double sd = lambda / std::sqrt(static_cast<double>(N));
  if (n == 1) {
    cd acc = 0.0;
    for (std::size_t k = 0; k < gh.size(); ++k)
      acc += gh.weights[k] * norm * std::pow(E - cd(0, sd * gh.nodes[k]), N);
    return acc;
  }
  // Tr Q^2 = q11^2 + q22^2 + 2 |q12|^2
  const double so = sd / std::sqrt(2.0);
  cd acc = 0.0;
  for (std::size_t a = 0; a < gh.size(); ++a)
    for (std::size_t b = 0; b < gh.size(); ++b)
      for (std::size_t c = 0; c < gh.size(); ++c)
        for (std::size_t d = 0; d < gh.size(); ++d) {
          const double wt = gh.weights[a] * gh.weights[b] * gh.weights[c] * gh.weights[d];
          const cd q11 = sd * gh.nodes[a], q22 = sd * gh.nodes[b];
          const cd q12(so * gh.nodes[c], so * gh.nodes[d]);
          const cd det = (E - cd(0, 1) * q11) * (E - cd(0, 1) * q22) + std::norm(q12);
          acc += wt * std::pow(det, N);
        }
  return acc * std::pow(norm, 4);
}

}  // namespace

GueMoment gue_det_moment(int N, int n, double E, double lambda, const McConfig& mc, const GueMomentQuad& qc) {
  if (n < 1 || n > 2) throw InvalidInput("gue_det_moment supports n = 1, 2");
  if (N < 1 || N > 30) throw InvalidInput("gue_det_moment supports 1 <= N <= 30");
  if (!(lambda > 0.0)) throw InvalidInput("lambda must be positive");
  if (mc.num_samples < 1000) throw InvalidInput("sample budget below 1000");
  const EnsembleSpec spec = make_spec(1, N, MatR::Constant(1, 1, lambda * lambda / N));
  const McRun run = run_mc_scalar(mc, [&](std::uint64_t d, std::uint32_t attempt) -> std::optional<cd> {
    Stream st(mc.seed, d, attempt);
    MatC h;
    sample_into(spec, st, h);
    const VecR ev = Eigen::SelfAdjointEigenSolver<MatC>(h, Eigen::EigenvaluesOnly).eigenvalues();
    double det = 1.0;
    for (Eigen::Index k = 0; k < ev.size(); ++k) det *= E - ev(k);
    return cd(n == 1 ? det : det * det);
  });
  GueMoment out;
  out.mc = run.estimate(0, mc.seed);
  // the integrand is a polynomial of degree nN per coordinate: N + 1 nodes
  // integrate it exactly, the second rule measures roundoff
  const int nodes = qc.nodes > 0 ? qc.nodes : N + 1;
  // real: Q -> -Q conjugates the integrand and preserves the measure
  out.quadrature = q_quadrature(N, n, E, lambda, nodes).real();
  out.quad_delta = std::abs(q_quadrature(N, n, E, lambda, nodes + 2).real() - out.quadrature.real());
  out.saddle = saddle_value(N, n, E, lambda);
  out.ratio = out.quadrature / out.saddle;
  return out;
}

}  // namespace susylab
