#pragma once
#include <vector>

#include "susylab/grassmann.hpp"

namespace susylab {

// Dense matrix of Grassmann elements over one generator set.
class ElementMatrix {
 public:
  ElementMatrix() = default;
  ElementMatrix(GenSet gens, int rows, int cols);
  static ElementMatrix from_complex(GenSet gens, const MatC& m);
  static ElementMatrix identity(GenSet gens, int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const GenSet& gens() const { return gens_; }
  const GrassmannElement& operator()(int r, int c) const { return e_[idx(r, c)]; }
  GrassmannElement& operator()(int r, int c) { return e_[idx(r, c)]; }

  MatC body() const;  // scalar parts
  bool all_even() const;
  bool all_odd() const;  // zero counts as odd

  ElementMatrix operator*(const ElementMatrix& o) const;
  ElementMatrix operator+(const ElementMatrix& o) const;
  ElementMatrix operator-(const ElementMatrix& o) const;
  ElementMatrix operator*(cd s) const;

 private:
  std::size_t idx(int r, int c) const { return static_cast<std::size_t>(r) * cols_ + c; }
  GenSet gens_;
  int rows_ = 0, cols_ = 0;
  std::vector<GrassmannElement> e_;
};

// Inverse of an even matrix: body inverse plus the terminating Neumann series
// in the nilpotent part.
ElementMatrix even_matrix_inverse(const ElementMatrix& m);
// Determinant of an even matrix by elimination over the (commutative) even
// subalgebra; pivots chosen by body magnitude.
GrassmannElement even_matrix_det(const ElementMatrix& m);

// (p|q) supermatrix: rows/cols 0..p-1 bosonic, p..p+q-1 fermionic.
class SuperMatrix {
 public:
  SuperMatrix() = default;
  // Throws AlgebraError on parity violations.
  SuperMatrix(ElementMatrix bb, ElementMatrix bf, ElementMatrix fb, ElementMatrix ff);
  static SuperMatrix identity(GenSet gens, int p, int q);
  static SuperMatrix zero(GenSet gens, int p, int q);

  int p() const { return bb_.rows(); }
  int q() const { return ff_.rows(); }
  const GenSet& gens() const { return bb_.gens(); }
  const ElementMatrix& bb() const { return bb_; }
  const ElementMatrix& bf() const { return bf_; }
  const ElementMatrix& fb() const { return fb_; }
  const ElementMatrix& ff() const { return ff_; }
  const GrassmannElement& at(int r, int c) const;

  SuperMatrix operator*(const SuperMatrix& o) const;
  SuperMatrix operator+(const SuperMatrix& o) const;
  SuperMatrix operator-(const SuperMatrix& o) const;
  SuperMatrix operator*(cd s) const;
  double max_coef_diff(const SuperMatrix& o) const;

 private:
  ElementMatrix bb_, bf_, fb_, ff_;
};

GrassmannElement supertrace(const SuperMatrix& Q);
GrassmannElement superdeterminant(const SuperMatrix& Q);
SuperMatrix super_inverse(const SuperMatrix& Q);

// Principal logarithm via inverse scaling and squaring (Denman-Beavers square
// roots, then a Mercator series). Requires the body to have no eigenvalue on
// the closed negative real axis.
SuperMatrix super_ln(const SuperMatrix& Q);
SuperMatrix super_exp(const SuperMatrix& Q);

// int exp(-(phibar,A phi) - (phibar,B psi) - (psibar,C phi) - (psibar,D psi)).
// phi integrals by completing the square (Det A^{-1}, nilpotent shift);
// psi integrals by Berezin over `field_pairs` (bar index, psi index), one
// pair per fermionic component. B, C entries must not involve the field
// generators.
GrassmannElement gaussian_superintegral(const ElementMatrix& A, const ElementMatrix& B, const ElementMatrix& C,
                                        const ElementMatrix& D,
                                        const std::vector<std::pair<std::size_t, std::size_t>>& field_pairs);

}  // namespace susylab
