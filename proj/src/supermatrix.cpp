#include "susylab/supermatrix.hpp"

#include <cmath>

#include "susylab/errors.hpp"

namespace susylab {

ElementMatrix::ElementMatrix(GenSet gens, int rows, int cols)
    : gens_(std::move(gens)), rows_(rows), cols_(cols),
      e_(static_cast<std::size_t>(rows) * cols, GrassmannElement(gens_)) {}

ElementMatrix ElementMatrix::from_complex(GenSet gens, const MatC& m) {
  ElementMatrix r(std::move(gens), static_cast<int>(m.rows()), static_cast<int>(m.cols()));
  for (int i = 0; i < r.rows_; ++i)
    for (int j = 0; j < r.cols_; ++j) r(i, j) = GrassmannElement(r.gens_, m(i, j));
  return r;
}

ElementMatrix ElementMatrix::identity(GenSet gens, int n) {
  return from_complex(std::move(gens), MatC::Identity(n, n));
}

MatC ElementMatrix::body() const {
  MatC b(rows_, cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) b(i, j) = (*this)(i, j).scalar();
  return b;
}

bool ElementMatrix::all_even() const {
  for (const auto& e : e_)
    if (!e.is_even()) return false;
  return true;
}

bool ElementMatrix::all_odd() const {
  for (const auto& e : e_)
    if (!e.is_odd()) return false;
  return true;
}

ElementMatrix ElementMatrix::operator*(const ElementMatrix& o) const {
  if (cols_ != o.rows_) throw AlgebraError("ElementMatrix product: shape mismatch");
  ElementMatrix r(gens_ ? gens_ : o.gens_, rows_, o.cols_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < o.cols_; ++j) {
      GrassmannElement acc(r.gens_);
      for (int k = 0; k < cols_; ++k) {
        const auto& a = (*this)(i, k);
        const auto& b = o(k, j);
        if (a.is_zero() || b.is_zero()) continue;
        acc += a * b;
      }
      r(i, j) = std::move(acc);
    }
  return r;
}

ElementMatrix ElementMatrix::operator+(const ElementMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw AlgebraError("ElementMatrix sum: shape mismatch");
  ElementMatrix r = *this;
  for (std::size_t k = 0; k < e_.size(); ++k) r.e_[k] += o.e_[k];
  return r;
}

ElementMatrix ElementMatrix::operator-(const ElementMatrix& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw AlgebraError("ElementMatrix difference: shape mismatch");
  ElementMatrix r = *this;
  for (std::size_t k = 0; k < e_.size(); ++k) r.e_[k] -= o.e_[k];
  return r;
}

ElementMatrix ElementMatrix::operator*(cd s) const {
  ElementMatrix r = *this;
  for (auto& e : r.e_) e *= s;
  return r;
}

namespace {

bool all_zero(const ElementMatrix& m) {
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (!m(i, j).is_zero()) return false;
  return true;
}

ElementMatrix nilpotent_part(const ElementMatrix& m) {
  ElementMatrix r = m;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) r(i, j) = m(i, j).nilpotent();
  return r;
}

double max_abs_coef(const ElementMatrix& m) {
  double a = 0.0;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      for (const auto& t : m(i, j).terms()) a = std::max(a, std::abs(t.coef));
  return a;
}

}  // namespace

ElementMatrix even_matrix_inverse(const ElementMatrix& m) {
  if (m.rows() != m.cols()) throw AlgebraError("even_matrix_inverse: matrix not square");
  if (!m.all_even()) throw AlgebraError("even_matrix_inverse: entries must be even");
  Eigen::FullPivLU<MatC> lu(m.body());
  if (!lu.isInvertible()) throw AlgebraError("even_matrix_inverse: singular body");
  const ElementMatrix b0inv = ElementMatrix::from_complex(m.gens(), lu.inverse());
  const ElementMatrix x = (b0inv * nilpotent_part(m)) * cd(-1.0);
  ElementMatrix acc = ElementMatrix::identity(m.gens(), m.rows());
  ElementMatrix power = acc;
  for (std::size_t k = 0; k <= GeneratorSet::kCapacity; ++k) {
    power = power * x;
    if (all_zero(power)) break;
    acc = acc + power;
  }
  return acc * b0inv;
}

GrassmannElement even_matrix_det(const ElementMatrix& m0) {
  if (m0.rows() != m0.cols()) throw AlgebraError("even_matrix_det: matrix not square");
  if (!m0.all_even()) throw AlgebraError("even_matrix_det: entries must be even");
  ElementMatrix m = m0;
  const int n = m.rows();
  GrassmannElement det(m.gens(), 1.0);
  for (int k = 0; k < n; ++k) {
    int piv = k;
    for (int r = k + 1; r < n; ++r)
      if (std::abs(m(r, k).scalar()) > std::abs(m(piv, k).scalar())) piv = r;
    if (m(piv, k).scalar() == cd(0.0)) throw AlgebraError("even_matrix_det: singular body");
    if (piv != k) {
      for (int c = 0; c < n; ++c) std::swap(m(k, c), m(piv, c));
      det = -det;
    }
    det = det * m(k, k);
    const GrassmannElement inv = even_inverse(m(k, k));
    for (int r = k + 1; r < n; ++r) {
      if (m(r, k).is_zero()) continue;
      const GrassmannElement f = m(r, k) * inv;
      for (int c = k; c < n; ++c) m(r, c) -= f * m(k, c);
    }
  }
  return det;
}

SuperMatrix::SuperMatrix(ElementMatrix bb, ElementMatrix bf, ElementMatrix fb, ElementMatrix ff)
    : bb_(std::move(bb)), bf_(std::move(bf)), fb_(std::move(fb)), ff_(std::move(ff)) {
  const int p = bb_.rows(), q = ff_.rows();
  if (bb_.cols() != p || ff_.cols() != q || bf_.rows() != p || bf_.cols() != q || fb_.rows() != q ||
      fb_.cols() != p)
    throw AlgebraError("SuperMatrix: inconsistent block dimensions");
  for (const GenSet& g : {bf_.gens(), fb_.gens(), ff_.gens()})
    if (g && bb_.gens() && g != bb_.gens()) throw AlgebraError("SuperMatrix: blocks use different generator sets");
  if (!bb_.all_even() || !ff_.all_even()) throw AlgebraError("SuperMatrix: diagonal blocks must be even");
  if (!bf_.all_odd() || !fb_.all_odd()) throw AlgebraError("SuperMatrix: off-diagonal blocks must be odd");
}

SuperMatrix SuperMatrix::zero(GenSet g, int p, int q) {
  return SuperMatrix(ElementMatrix(g, p, p), ElementMatrix(g, p, q), ElementMatrix(g, q, p), ElementMatrix(g, q, q));
}

SuperMatrix SuperMatrix::identity(GenSet g, int p, int q) {
  return SuperMatrix(ElementMatrix::identity(g, p), ElementMatrix(g, p, q), ElementMatrix(g, q, p),
                     ElementMatrix::identity(g, q));
}

const GrassmannElement& SuperMatrix::at(int r, int c) const {
  const int P = p();
  if (r < P) return c < P ? bb_(r, c) : bf_(r, c - P);
  return c < P ? fb_(r - P, c) : ff_(r - P, c - P);
}

SuperMatrix SuperMatrix::operator*(const SuperMatrix& o) const {
  return SuperMatrix(bb_ * o.bb_ + bf_ * o.fb_, bb_ * o.bf_ + bf_ * o.ff_, fb_ * o.bb_ + ff_ * o.fb_,
                     fb_ * o.bf_ + ff_ * o.ff_);
}

SuperMatrix SuperMatrix::operator+(const SuperMatrix& o) const {
  return SuperMatrix(bb_ + o.bb_, bf_ + o.bf_, fb_ + o.fb_, ff_ + o.ff_);
}

SuperMatrix SuperMatrix::operator-(const SuperMatrix& o) const {
  return SuperMatrix(bb_ - o.bb_, bf_ - o.bf_, fb_ - o.fb_, ff_ - o.ff_);
}

SuperMatrix SuperMatrix::operator*(cd s) const { return SuperMatrix(bb_ * s, bf_ * s, fb_ * s, ff_ * s); }

double SuperMatrix::max_coef_diff(const SuperMatrix& o) const {
  const SuperMatrix d = *this - o;
  return std::max({max_abs_coef(d.bb_), max_abs_coef(d.bf_), max_abs_coef(d.fb_), max_abs_coef(d.ff_)});
}

GrassmannElement supertrace(const SuperMatrix& Q) {
  GrassmannElement s(Q.gens());
  for (int k = 0; k < Q.p(); ++k) s += Q.bb()(k, k);
  for (int k = 0; k < Q.q(); ++k) s -= Q.ff()(k, k);
  return s;
}

GrassmannElement superdeterminant(const SuperMatrix& Q) {
  const ElementMatrix ainv = even_matrix_inverse(Q.bb());
  const ElementMatrix schur = Q.ff() - Q.fb() * ainv * Q.bf();
  const GrassmannElement ds = even_matrix_det(schur);
  if (ds.scalar() == cd(0.0)) throw AlgebraError("superdeterminant: singular Schur complement");
  return even_matrix_det(Q.bb()) * even_inverse(ds);
}

SuperMatrix super_inverse(const SuperMatrix& Q) {
  const ElementMatrix ainv = even_matrix_inverse(Q.bb());
  const ElementMatrix sinv = even_matrix_inverse(Q.ff() - Q.fb() * ainv * Q.bf());
  const ElementMatrix ainv_b = ainv * Q.bf();
  const ElementMatrix c_ainv = Q.fb() * ainv;
  return SuperMatrix(ainv + ainv_b * sinv * c_ainv, ainv_b * sinv * cd(-1.0), sinv * c_ainv * cd(-1.0), sinv);
}

namespace {

double super_norm(const SuperMatrix& Q) {
  return std::max({max_abs_coef(Q.bb()), max_abs_coef(Q.bf()), max_abs_coef(Q.fb()), max_abs_coef(Q.ff())});
}

SuperMatrix super_sqrt(const SuperMatrix& A) {
  // Denman-Beavers: Y -> sqrt(A), Z -> sqrt(A)^{-1}
  SuperMatrix y = A;
  SuperMatrix z = SuperMatrix::identity(A.gens(), A.p(), A.q());
  const double scale = std::max(1.0, super_norm(A));
  for (int it = 0; it < 100; ++it) {
    const SuperMatrix yn = (y + super_inverse(z)) * cd(0.5);
    const SuperMatrix zn = (z + super_inverse(y)) * cd(0.5);
    const double delta = yn.max_coef_diff(y);
    y = yn;
    z = zn;
    if (delta < 1e-15 * scale) return y;
  }
  throw NumericalFailure("super_sqrt: Denman-Beavers iteration did not converge");
}

MatC full_body(const SuperMatrix& Q) {
  const int p = Q.p(), q = Q.q();
  MatC b = MatC::Zero(p + q, p + q);
  b.topLeftCorner(p, p) = Q.bb().body();
  b.bottomRightCorner(q, q) = Q.ff().body();
  return b;
}

}  // namespace

SuperMatrix super_ln(const SuperMatrix& Q) {
  const MatC body = full_body(Q);
  Eigen::ComplexEigenSolver<MatC> es(body, false);
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    const cd ev = es.eigenvalues()(k);
    if (ev.real() <= 0.0 && std::abs(ev.imag()) <= 1e-14 * std::abs(ev))
      throw AlgebraError("super_ln: body eigenvalue on the closed negative real axis");
  }
  const SuperMatrix id = SuperMatrix::identity(Q.gens(), Q.p(), Q.q());
  SuperMatrix y = Q;
  int squarings = 0;
  while ((full_body(y) - MatC::Identity(body.rows(), body.cols())).cwiseAbs().rowwise().sum().maxCoeff() > 0.25) {
    if (++squarings > 64) throw NumericalFailure("super_ln: too many square roots");
    y = super_sqrt(y);
  }
  const SuperMatrix x = y - id;
  SuperMatrix acc = x;
  SuperMatrix power = x;
  for (int k = 2; k < 200; ++k) {
    power = power * x;
    const double sz = super_norm(power);
    if (sz == 0.0) break;
    acc = acc + power * cd((k % 2 ? 1.0 : -1.0) / k);
    if (sz / k < 1e-18) break;
  }
  return acc * cd(std::ldexp(1.0, squarings));
}

SuperMatrix super_exp(const SuperMatrix& Q) {
  int s = 0;
  const double n = super_norm(Q) * (Q.p() + Q.q());
  while (std::ldexp(n, -s) > 0.5) ++s;
  const SuperMatrix x = Q * cd(std::ldexp(1.0, -s));
  SuperMatrix acc = SuperMatrix::identity(Q.gens(), Q.p(), Q.q());
  SuperMatrix term = acc;
  for (int k = 1; k < 60; ++k) {
    term = term * x * cd(1.0 / k);
    const double sz = super_norm(term);
    if (sz == 0.0) break;
    acc = acc + term;
    if (sz < 1e-18) break;
  }
  for (int k = 0; k < s; ++k) acc = acc * acc;
  return acc;
}

GrassmannElement gaussian_superintegral(const ElementMatrix& A, const ElementMatrix& B, const ElementMatrix& C,
                                        const ElementMatrix& D,
                                        const std::vector<std::pair<std::size_t, std::size_t>>& field_pairs) {
  const int p = A.rows(), q = D.rows();
  if (A.cols() != p || D.cols() != q || B.rows() != p || B.cols() != q || C.rows() != q || C.cols() != p)
    throw AlgebraError("gaussian_superintegral: inconsistent block dimensions");
  if (static_cast<int>(field_pairs.size()) != q)
    throw AlgebraError("gaussian_superintegral: need one (bar, psi) pair per fermionic component");
  if (!A.all_even() || !D.all_even() || !B.all_odd() || !C.all_odd())
    throw AlgebraError("gaussian_superintegral: parity violation");
  const MatC a0 = A.body();
  Eigen::LLT<MatC> llt(hermitian_part(a0));
  if (llt.info() != Eigen::Success) throw InvalidInput("gaussian_superintegral: Re A is not positive definite");

  GrassmannElement::Mask field = 0;
  for (const auto& [bar, psi] : field_pairs) field |= (1u << bar) | (1u << psi);
  for (const ElementMatrix* m : {&A, &B, &C, &D})
    for (int i = 0; i < m->rows(); ++i)
      for (int j = 0; j < m->cols(); ++j)
        for (const auto& t : (*m)(i, j).terms())
          if (t.mask & field) throw AlgebraError("gaussian_superintegral: block entries use field generators");

  const GenSet& g = A.gens();
  // completing the square in phi leaves exp(-(psibar, (D - C A^{-1} B) psi)) / Det A
  const ElementMatrix m = D - C * even_matrix_inverse(A) * B;
  GrassmannElement exponent(g);
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b) {
      if (m(a, b).is_zero()) continue;
      exponent -= GrassmannElement::generator(g, field_pairs[a].first) * m(a, b) *
                  GrassmannElement::generator(g, field_pairs[b].second);
    }
  const GrassmannElement fermion = berezin_integral(even_exp(exponent), field_pairs);
  return fermion * even_inverse(even_matrix_det(A));
}

}  // namespace susylab
