#pragma once
#include <complex>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "susylab/linalg.hpp"

namespace susylab {

class GeneratorSet {
 public:
  static constexpr std::size_t kCapacity = 24;
  static std::shared_ptr<const GeneratorSet> create(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  const std::string& name(std::size_t k) const { return names_.at(k); }
  std::size_t index_of(const std::string& name) const;

 private:
  explicit GeneratorSet(std::vector<std::string> names) : names_(std::move(names)) {}
  std::vector<std::string> names_;
};
using GenSet = std::shared_ptr<const GeneratorSet>;

// Element of the exterior algebra over a GeneratorSet. A term with bitmask m
// stands for the product of the generators in m taken in increasing index
// order. Terms are kept sorted by mask with no stored zeros.
class GrassmannElement {
 public:
  using Mask = std::uint32_t;
  struct Term {
    Mask mask;
    cd coef;
  };

  GrassmannElement() = default;  // zero, not yet bound to a generator set
  explicit GrassmannElement(GenSet gens, cd scalar = 0.0);
  static GrassmannElement generator(GenSet gens, std::size_t k);
  static GrassmannElement from_terms(GenSet gens, std::vector<Term> terms);

  const GenSet& gens() const { return gens_; }
  const std::vector<Term>& terms() const { return terms_; }
  cd coefficient(Mask m) const;
  cd scalar() const { return coefficient(0); }
  GrassmannElement nilpotent() const;

  bool is_zero() const { return terms_.empty(); }
  bool is_even() const;
  bool is_odd() const;
  int max_grade() const;

  GrassmannElement operator-() const;
  GrassmannElement& operator+=(const GrassmannElement& o);
  GrassmannElement& operator-=(const GrassmannElement& o);
  GrassmannElement& operator*=(cd s);

  friend GrassmannElement operator+(GrassmannElement a, const GrassmannElement& b) { return a += b; }
  friend GrassmannElement operator-(GrassmannElement a, const GrassmannElement& b) { return a -= b; }
  friend GrassmannElement operator*(const GrassmannElement& a, const GrassmannElement& b);
  friend GrassmannElement operator*(GrassmannElement a, cd s) { return a *= s; }
  friend GrassmannElement operator*(cd s, GrassmannElement a) { return a *= s; }

  // left derivative d/d(generator k)
  GrassmannElement derivative(std::size_t k) const;

  // `coef * name1^name2^...`, one term per line, masks ascending
  std::string debug_string() const;

 private:
  void adopt(const GrassmannElement& o);
  GenSet gens_;
  std::vector<Term> terms_;
};

double max_coef_diff(const GrassmannElement& a, const GrassmannElement& b);

// Integral over each (bar, psi) pair: d/d(bar) applied to d/d(psi) f. With this
// reading the one-variable Gaussian integrates to a: int exp(-a bar psi) = a.
GrassmannElement berezin_integral(const GrassmannElement& f,
                                  const std::vector<std::pair<std::size_t, std::size_t>>& pairs);

GrassmannElement even_exp(const GrassmannElement& x);
GrassmannElement even_ln(const GrassmannElement& x);
GrassmannElement even_inverse(const GrassmannElement& x);
// any element whose scalar part is nonzero
GrassmannElement inverse(const GrassmannElement& x);

// Det A as the Berezin integral of exp(-sum bar_a A_ab psi_b); n <= 10.
cd fermionic_gaussian(const MatC& A);

}  // namespace susylab
