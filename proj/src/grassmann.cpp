#include "susylab/grassmann.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "susylab/errors.hpp"

namespace susylab {

using Mask = GrassmannElement::Mask;
using Term = GrassmannElement::Term;

GenSet GeneratorSet::create(std::vector<std::string> names) {
  if (names.size() > kCapacity) throw AlgebraError("generator capacity exceeded");
  for (std::size_t a = 0; a < names.size(); ++a)
    for (std::size_t b = a + 1; b < names.size(); ++b)
      if (names[a] == names[b]) throw AlgebraError("duplicate generator name " + names[a]);
  return GenSet(new GeneratorSet(std::move(names)));
}

std::size_t GeneratorSet::index_of(const std::string& n) const {
  for (std::size_t k = 0; k < names_.size(); ++k)
    if (names_[k] == n) return k;
  throw AlgebraError("unknown generator " + n);
}

namespace {

// sort by mask, sum duplicates, drop exact zeros
void canonicalize(std::vector<Term>& t) {
  std::sort(t.begin(), t.end(), [](const Term& a, const Term& b) { return a.mask < b.mask; });
  std::size_t w = 0;
  for (std::size_t r = 0; r < t.size();) {
    Mask m = t[r].mask;
    cd c = 0.0;
    for (; r < t.size() && t[r].mask == m; ++r) c += t[r].coef;
    if (c != cd(0.0)) t[w++] = {m, c};
  }
  t.resize(w);
}

// sign of (prod a)(prod b) reordered into ascending generator order
inline int product_sign(Mask a, Mask b) {
  int swaps = 0;
  while (b) {
    const int j = std::countr_zero(b);
    b &= b - 1;
    swaps += std::popcount(static_cast<Mask>(a >> (j + 1)));
  }
  return (swaps & 1) ? -1 : 1;
}

}  // namespace

GrassmannElement::GrassmannElement(GenSet gens, cd scalar) : gens_(std::move(gens)) {
  if (scalar != cd(0.0)) terms_.push_back({0, scalar});
}

GrassmannElement GrassmannElement::generator(GenSet gens, std::size_t k) {
  if (!gens || k >= gens->size()) throw AlgebraError("generator index out of range");
  GrassmannElement e(std::move(gens));
  e.terms_.push_back({Mask(1) << k, 1.0});
  return e;
}

GrassmannElement GrassmannElement::from_terms(GenSet gens, std::vector<Term> terms) {
  const Mask limit = gens->size() >= 32 ? ~Mask(0) : ((Mask(1) << gens->size()) - 1);
  for (const auto& t : terms)
    if (t.mask & ~limit) throw AlgebraError("term uses a generator outside the set");
  GrassmannElement e(std::move(gens));
  e.terms_ = std::move(terms);
  canonicalize(e.terms_);
  return e;
}

void GrassmannElement::adopt(const GrassmannElement& o) {
  if (!o.gens_) return;
  if (!gens_) {
    gens_ = o.gens_;
    return;
  }
  if (gens_ != o.gens_) throw AlgebraError("elements belong to different generator sets");
}

cd GrassmannElement::coefficient(Mask m) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), m, [](const Term& t, Mask k) { return t.mask < k; });
  return (it != terms_.end() && it->mask == m) ? it->coef : cd(0.0);
}

GrassmannElement GrassmannElement::nilpotent() const {
  GrassmannElement e(gens_);
  for (const auto& t : terms_)
    if (t.mask) e.terms_.push_back(t);
  return e;
}

bool GrassmannElement::is_even() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const Term& t) { return std::popcount(t.mask) % 2 == 0; });
}

bool GrassmannElement::is_odd() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const Term& t) { return std::popcount(t.mask) % 2 == 1; });
}

int GrassmannElement::max_grade() const {
  int g = -1;
  for (const auto& t : terms_) g = std::max(g, std::popcount(t.mask));
  return g;
}

GrassmannElement GrassmannElement::operator-() const {
  GrassmannElement e = *this;
  for (auto& t : e.terms_) t.coef = -t.coef;
  return e;
}

GrassmannElement& GrassmannElement::operator+=(const GrassmannElement& o) {
  adopt(o);
  terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
  canonicalize(terms_);
  return *this;
}

GrassmannElement& GrassmannElement::operator-=(const GrassmannElement& o) {
  adopt(o);
  for (const auto& t : o.terms_) terms_.push_back({t.mask, -t.coef});
  canonicalize(terms_);
  return *this;
}

GrassmannElement& GrassmannElement::operator*=(cd s) {
  if (s == cd(0.0)) {
    terms_.clear();
    return *this;
  }
  for (auto& t : terms_) t.coef *= s;
  return *this;
}

GrassmannElement operator*(const GrassmannElement& a, const GrassmannElement& b) {
  GrassmannElement r(a.gens_);
  r.adopt(b);
  std::vector<Term> out;
  out.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& ta : a.terms_)
    for (const auto& tb : b.terms_) {
      if (ta.mask & tb.mask) continue;
      const int s = product_sign(ta.mask, tb.mask);
      out.push_back({ta.mask | tb.mask, static_cast<double>(s) * ta.coef * tb.coef});
    }
  canonicalize(out);
  r.terms_ = std::move(out);
  return r;
}

GrassmannElement GrassmannElement::derivative(std::size_t k) const {
  if (gens_ && k >= gens_->size()) throw AlgebraError("derivative: generator index out of range");
  const Mask bit = Mask(1) << k;
  GrassmannElement r(gens_);
  for (const auto& t : terms_) {
    if (!(t.mask & bit)) continue;
    const int before = std::popcount(static_cast<Mask>(t.mask & (bit - 1)));
    r.terms_.push_back({t.mask & ~bit, (before % 2) ? -t.coef : t.coef});
  }
  canonicalize(r.terms_);
  return r;
}

std::string GrassmannElement::debug_string() const {
  std::ostringstream os;
  os.precision(17);
  for (const auto& t : terms_) {
    os << "(" << t.coef.real() << (t.coef.imag() < 0 ? "" : "+") << t.coef.imag() << "i) *";
    if (!t.mask) os << " 1";
    bool first = true;
    for (std::size_t k = 0; k < GeneratorSet::kCapacity; ++k) {
      if (!(t.mask & (Mask(1) << k))) continue;
      os << (first ? " " : "^") << (gens_ ? gens_->name(k) : "g" + std::to_string(k));
      first = false;
    }
    os << "\n";
  }
  return os.str();
}

double max_coef_diff(const GrassmannElement& a, const GrassmannElement& b) {
  const GrassmannElement d = a - b;
  double m = 0.0;
  for (const auto& t : d.terms()) m = std::max(m, std::abs(t.coef));
  return m;
}

GrassmannElement berezin_integral(const GrassmannElement& f,
                                  const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  Mask seen = 0;
  for (const auto& [bar, psi] : pairs) {
    const Mask m = (Mask(1) << bar) | (Mask(1) << psi);
    if (bar == psi || (seen & m)) throw AlgebraError("berezin_integral: repeated generator");
    seen |= m;
  }
  GrassmannElement r = f;
  for (const auto& [bar, psi] : pairs) r = r.derivative(psi).derivative(bar);
  return r;
}

namespace {
// sum_k c_k x^k for nilpotent x, stopping when the power vanishes
template <class Coef>
GrassmannElement nilpotent_series(const GrassmannElement& x, Coef coef) {
  GrassmannElement acc(x.gens(), coef(0));
  GrassmannElement power(x.gens(), 1.0);
  for (int k = 1; k <= static_cast<int>(GeneratorSet::kCapacity); ++k) {
    power = power * x;
    if (power.is_zero()) break;
    acc += coef(k) * power;
  }
  return acc;
}
}  // namespace

GrassmannElement even_exp(const GrassmannElement& x) {
  if (!x.is_even()) throw AlgebraError("even_exp: input is not even");
  const GrassmannElement n = x.nilpotent();
  std::vector<double> inv_fact{1.0};
  auto c = [&](int k) {
    while (static_cast<int>(inv_fact.size()) <= k) inv_fact.push_back(inv_fact.back() / inv_fact.size());
    return cd(inv_fact[k]);
  };
  return std::exp(x.scalar()) * nilpotent_series(n, c);
}

GrassmannElement even_ln(const GrassmannElement& x) {
  if (!x.is_even()) throw AlgebraError("even_ln: input is not even");
  const cd c = x.scalar();
  if (c == cd(0.0)) throw AlgebraError("even_ln: zero scalar part");
  const GrassmannElement y = (1.0 / c) * x.nilpotent();
  auto coef = [&](int k) { return k == 0 ? std::log(c) : cd((k % 2 ? 1.0 : -1.0) / k); };
  return nilpotent_series(y, coef);
}

GrassmannElement inverse(const GrassmannElement& x) {
  const cd c = x.scalar();
  if (c == cd(0.0)) throw AlgebraError("inverse: zero scalar part");
  const GrassmannElement y = (-1.0 / c) * x.nilpotent();
  return (1.0 / c) * nilpotent_series(y, [](int) { return cd(1.0); });
}

GrassmannElement even_inverse(const GrassmannElement& x) {
  if (!x.is_even()) throw AlgebraError("even_inverse: input is not even");
  return inverse(x);
}

cd fermionic_gaussian(const MatC& A) {
  const auto n = static_cast<std::size_t>(A.rows());
  if (A.rows() != A.cols()) throw InvalidInput("fermionic_gaussian: A must be square");
  if (n > 10) throw AlgebraError("fermionic_gaussian: capacity exceeded (n > 10)");
  if (n == 0) return 1.0;
  std::vector<std::string> names;
  for (std::size_t a = 0; a < n; ++a) {
    names.push_back("psibar" + std::to_string(a + 1));
    names.push_back("psi" + std::to_string(a + 1));
  }
  const GenSet g = GeneratorSet::create(names);
  std::vector<Term> t;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      if (A(a, b) == cd(0.0)) continue;
      const std::size_t bar = 2 * a, psi = 2 * b + 1;
      // bar_a psi_b in ascending order carries a sign when psi_b precedes bar_a
      const double s = bar < psi ? 1.0 : -1.0;
      t.push_back({(Mask(1) << bar) | (Mask(1) << psi), -s * A(a, b)});
    }
  const GrassmannElement x = GrassmannElement::from_terms(g, t);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < n; ++a) pairs.emplace_back(2 * a, 2 * a + 1);
  return berezin_integral(even_exp(x), pairs).scalar();
}

}  // namespace susylab
