#pragma once

#include "qctx/rational.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace qctx {

enum class PredictedClass { NonContextual, Weak, AtLeastLogical, Strong };

inline const char* to_string(PredictedClass c) {
  switch (c) {
    case PredictedClass::NonContextual: return "NonContextual";
    case PredictedClass::Weak: return "Weak";
    case PredictedClass::AtLeastLogical: return "AtLeastLogical";
    case PredictedClass::Strong: return "Strong";
  }
  return "?";
}

/// Boolean polynomial in algebraic normal form over GF(2). Monomials are
/// variable-index bitmasks (bit v-1 set iff q_v present); the empty mask
/// is the constant term. Kept canonical: sorted, no duplicates.
class BooleanPolynomial {
 public:
  BooleanPolynomial() : n_vars_(0) {}
  BooleanPolynomial(int n_vars, std::vector<std::uint32_t> monomials)
      : n_vars_(n_vars), monomials_(std::move(monomials)) {
    std::sort(monomials_.begin(), monomials_.end(), mono_less);
    monomials_.erase(std::unique(monomials_.begin(), monomials_.end()), monomials_.end());
  }

  int n_vars() const { return n_vars_; }
  const std::vector<std::uint32_t>& monomials() const { return monomials_; }
  bool is_zero() const { return monomials_.empty(); }
  bool constant_term() const {
    return !monomials_.empty() && monomials_.front() == 0;
  }

  int degree() const {
    int d = 0;
    for (auto m : monomials_) d = std::max(d, popcount(m));
    return d;
  }

  bool evaluate_packed(std::uint32_t bits) const {
    bool acc = false;
    for (auto m : monomials_)
      if ((bits & m) == m) acc = !acc;
    return acc;
  }

  /// GF(2) sum of products, taking one bit per variable (q1 first).
  bool evaluate(const std::vector<int>& bits) const {
    if (int(bits.size()) != n_vars_)
      throw ValidationError("evaluate: expected " + std::to_string(n_vars_) + " bits");
    std::uint32_t packed = 0;
    for (int v = 0; v < n_vars_; ++v)
      if (bits[v]) packed |= 1u << v;
    return evaluate_packed(packed);
  }

  /// XOR of coefficient sets (GF(2) addition).
  friend BooleanPolynomial operator+(const BooleanPolynomial& a, const BooleanPolynomial& b) {
    std::set<std::uint32_t> sym(a.monomials_.begin(), a.monomials_.end());
    for (auto m : b.monomials_) {
      if (!sym.erase(m)) sym.insert(m);
    }
    return BooleanPolynomial(std::max(a.n_vars_, b.n_vars_),
                             std::vector<std::uint32_t>(sym.begin(), sym.end()));
  }

  friend BooleanPolynomial operator*(const BooleanPolynomial& a, const BooleanPolynomial& b) {
    std::set<std::uint32_t> acc;
    for (auto ma : a.monomials_)
      for (auto mb : b.monomials_) {
        std::uint32_t m = ma | mb;
        if (!acc.erase(m)) acc.insert(m);
      }
    return BooleanPolynomial(std::max(a.n_vars_, b.n_vars_),
                             std::vector<std::uint32_t>(acc.begin(), acc.end()));
  }

  friend bool operator==(const BooleanPolynomial& a, const BooleanPolynomial& b) {
    return a.n_vars_ == b.n_vars_ && a.monomials_ == b.monomials_;
  }

  /// Canonical text: monomials by size then lexicographic variable order,
  /// e.g. "1+q1+q1*q2". The zero polynomial renders as "0".
  std::string render() const {
    if (monomials_.empty()) return "0";
    std::string out;
    for (auto m : monomials_) {
      if (!out.empty()) out += "+";
      out += mono_str(m);
    }
    return out;
  }

  static int popcount(std::uint32_t m) { return __builtin_popcount(m); }

 private:
  static bool mono_less(std::uint32_t a, std::uint32_t b) {
    int pa = popcount(a), pb = popcount(b);
    if (pa != pb) return pa < pb;
    return lex_vars(a) < lex_vars(b);
  }
  static std::vector<int> lex_vars(std::uint32_t m) {
    std::vector<int> vs;
    for (int v = 0; v < 32; ++v)
      if (m & (1u << v)) vs.push_back(v);
    return vs;
  }
  static std::string mono_str(std::uint32_t m) {
    if (m == 0) return "1";
    std::string s;
    for (int v = 0; v < 32; ++v)
      if (m & (1u << v)) {
        if (!s.empty()) s += "*";
        s += "q" + std::to_string(v + 1);
      }
    return s;
  }

  int n_vars_;
  std::vector<std::uint32_t> monomials_;
};

namespace detail {

inline std::optional<BooleanPolynomial> named_formula(const std::string& name) {
  auto poly = [](std::initializer_list<std::uint32_t> ms) {
    return BooleanPolynomial(2, std::vector<std::uint32_t>(ms));
  };
  // Two-variable formulas; masks: q1 = 1, q2 = 2, q1q2 = 3, const = 0.
  if (name == "AND") return poly({3});
  if (name == "NAND") return poly({0, 3});
  if (name == "OR") return poly({1, 2, 3});
  if (name == "NOR") return poly({0, 1, 2, 3});
  if (name == "XOR") return poly({1, 2});
  if (name == "NXOR") return poly({0, 1, 2});
  if (name == "IMP1") return poly({0, 1, 3});   // q1 => q2
  if (name == "IMP2") return poly({0, 2, 3});   // q2 => q1
  if (name == "NIMP1") return poly({1, 3});
  if (name == "NIMP2") return poly({2, 3});
  if (name == "DICT1") return poly({1});
  if (name == "DICT2") return poly({2});
  return std::nullopt;
}

}  // namespace detail

/// Parses "q1+q2*q3+1" (also bare juxtaposition "q1q2") or a named
/// two-variable formula. GF(2) pairs cancel; result is canonical ANF.
/// `min_vars` widens the variable count beyond the largest index seen.
inline BooleanPolynomial parse_poly(const std::string& text, int min_vars = 0) {
  {
    std::string stripped;
    for (char c : text)
      if (!std::isspace(static_cast<unsigned char>(c))) stripped += c;
    if (auto named = detail::named_formula(stripped)) return *named;
  }

  std::set<std::uint32_t> acc;
  int max_var = 0;
  std::size_t i = 0;
  const auto err = [&](const std::string& msg, std::size_t pos) {
    throw ValidationError("polynomial syntax error at position " + std::to_string(pos) +
                          ": " + msg);
  };
  const auto skip_ws = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };

  bool expect_term = true;
  while (true) {
    skip_ws();
    if (i >= text.size()) {
      if (expect_term) err("expected a term", i);
      break;
    }
    if (!expect_term) {
      if (text[i] != '+') err("expected '+'", i);
      ++i;
      expect_term = true;
      continue;
    }
    // term := factor (['*'] factor)* ; factor := '0' | '1' | 'q' digits
    std::uint32_t mono = 0;
    bool term_is_zero = false;
    bool have_factor = false;
    while (true) {
      skip_ws();
      if (i < text.size() && text[i] == '*') {
        if (!have_factor) err("unexpected '*'", i);
        ++i;
        skip_ws();
      }
      if (i >= text.size()) break;
      if (text[i] == '1') {
        ++i;
        have_factor = true;
        continue;  // multiplicative identity
      }
      if (text[i] == '0') {
        ++i;
        have_factor = true;
        term_is_zero = true;
        continue;
      }
      if (text[i] == 'q' || text[i] == 'Q') {
        std::size_t start = i++;
        std::size_t dstart = i;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
        if (i == dstart) err("expected variable index after 'q'", start);
        long v = std::stol(text.substr(dstart, i - dstart));
        if (v == 0) err("variable index 0 is not allowed", start);
        if (v > 24) err("variable index too large", start);
        mono |= 1u << (v - 1);
        max_var = std::max<int>(max_var, int(v));
        have_factor = true;
        continue;
      }
      break;
    }
    if (!have_factor) err("expected a term", i);
    if (!term_is_zero) {
      if (!acc.erase(mono)) acc.insert(mono);
    }
    expect_term = false;
  }

  int n_vars = std::max(max_var, min_vars);
  if (n_vars == 0) n_vars = 2;  // constant formulas default to the two-variable family
  return BooleanPolynomial(n_vars, std::vector<std::uint32_t>(acc.begin(), acc.end()));
}

/// If the polynomial is q_i + q_j + G with q_i, q_j appearing only as the
/// two bare linear monomials, returns (i, j, G) with 1-based i < j chosen
/// smallest-first. G keeps the original variable numbering.
inline std::optional<std::tuple<int, int, BooleanPolynomial>> xor_pair_form(
    const BooleanPolynomial& p) {
  std::vector<int> bare_only;
  for (int v = 0; v < p.n_vars(); ++v) {
    const std::uint32_t bit = 1u << v;
    bool linear = false, elsewhere = false;
    for (auto m : p.monomials()) {
      if (m == bit) linear = true;
      else if (m & bit) elsewhere = true;
    }
    if (linear && !elsewhere) bare_only.push_back(v + 1);
  }
  if (bare_only.size() < 2) return std::nullopt;
  const int i = bare_only[0], j = bare_only[1];
  std::vector<std::uint32_t> rest;
  for (auto m : p.monomials())
    if (m != (1u << (i - 1)) && m != (1u << (j - 1))) rest.push_back(m);
  return std::make_tuple(i, j, BooleanPolynomial(p.n_vars(), std::move(rest)));
}

/// Splits F = F1 + q_i F2 + q_j F3 + q_i q_j F4 (1-based i != j). The four
/// parts keep the original variable numbering and never mention q_i, q_j.
inline std::array<BooleanPolynomial, 4> quadratic_slice(const BooleanPolynomial& p, int i,
                                                        int j) {
  if (i == j) throw ValidationError("quadratic_slice: need two distinct variables");
  const std::uint32_t bi = 1u << (i - 1), bj = 1u << (j - 1);
  std::array<std::vector<std::uint32_t>, 4> parts;
  for (auto m : p.monomials()) {
    const int which = ((m & bi) ? 1 : 0) + ((m & bj) ? 2 : 0);
    parts[which].push_back(m & ~(bi | bj));
  }
  return {BooleanPolynomial(p.n_vars(), std::move(parts[0])),
          BooleanPolynomial(p.n_vars(), std::move(parts[1])),
          BooleanPolynomial(p.n_vars(), std::move(parts[2])),
          BooleanPolynomial(p.n_vars(), std::move(parts[3]))};
}

/// Structural classification of the induced (n+1)-qubit state:
/// constants are product states; an xor-pair form forces Strong; a lone
/// linear term is a dictatorship (Weak); other degree >= 2 polynomials
/// are at least logically contextual, to be refined empirically.
inline PredictedClass predicted_class(const BooleanPolynomial& p) {
  if (p.degree() == 0) return PredictedClass::NonContextual;
  if (xor_pair_form(p)) return PredictedClass::Strong;
  if (p.degree() == 1) return PredictedClass::Weak;
  return PredictedClass::AtLeastLogical;
}

}  // namespace qctx
