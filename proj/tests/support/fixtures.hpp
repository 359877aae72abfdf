#pragma once
// Random parity-correct supermatrix fixtures shared by unit and acceptance tests.
#include <bit>
#include <string>

#include "susylab/rng.hpp"
#include "susylab/supermatrix.hpp"

namespace fixtures {

using namespace susylab;

inline GenSet generator_set(std::size_t n, const std::string& stem = "eta") {
  std::vector<std::string> v;
  for (std::size_t k = 0; k < n; ++k) v.push_back(stem + std::to_string(k + 1));
  return GeneratorSet::create(v);
}

// random element with terms of the given parity and grade <= max_grade
inline GrassmannElement random_graded(const GenSet& g, Stream& st, int parity, int terms, int max_grade,
                                      double scale) {
  std::vector<GrassmannElement::Term> t;
  const auto n = static_cast<unsigned>(g->size());
  for (int k = 0; k < terms; ++k) {
    GrassmannElement::Mask m = 0;
    for (int tries = 0; tries < 64; ++tries) {
      m = static_cast<GrassmannElement::Mask>(st.next_u64()) & ((1u << n) - 1);
      const int gr = std::popcount(m);
      if (gr > 0 && gr % 2 == parity && gr <= max_grade) break;
      m = 0;
    }
    if (m) t.push_back({m, scale * st.complex_normal(1.0)});
  }
  return GrassmannElement::from_terms(g, t);
}

// body = shift * I + spread * gaussian, plus nilpotent dressing
inline SuperMatrix random_super(const GenSet& g, Stream& st, int p, int q, double shift = 2.0, double spread = 0.4) {
  ElementMatrix bb(g, p, p), bf(g, p, q), fb(g, q, p), ff(g, q, q);
  auto even = [&](int r, int c) {
    return GrassmannElement(g, (r == c ? shift : 0.0) + spread * st.complex_normal(1.0)) +
           random_graded(g, st, 0, 2, 4, 0.5);
  };
  for (int r = 0; r < p; ++r)
    for (int c = 0; c < p; ++c) bb(r, c) = even(r, c);
  for (int r = 0; r < q; ++r)
    for (int c = 0; c < q; ++c) ff(r, c) = even(r, c);
  for (int r = 0; r < p; ++r)
    for (int c = 0; c < q; ++c) bf(r, c) = random_graded(g, st, 1, 2, 3, 0.7);
  for (int r = 0; r < q; ++r)
    for (int c = 0; c < p; ++c) fb(r, c) = random_graded(g, st, 1, 2, 3, 0.7);
  return SuperMatrix(bb, bf, fb, ff);
}

}  // namespace fixtures
