#pragma once

#include "qctx/classify.hpp"
#include "qctx/states.hpp"

#include <numeric>
#include <string>
#include <vector>

namespace qctx {

/// Symbolic evidence that the S(n,k) X/Z model is logically contextual:
/// the two-X-row implications, the all-Z support shape, the equivalence
/// closure forcing all X outcomes equal, and the strict all-equal mass
/// bound C(n,k)/2^(n-1) < 1.
struct DickeCertificate {
  int n = 0;
  int k = 0;
  long implication_instances = 0;  // (i, j, Z-pattern) triples verified
  bool implications_ok = false;
  long z_disjuncts = 0;            // outcomes in the all-Z support
  bool z_row_ok = false;
  bool closure_ok = false;         // every disjunct merges all X variables
  Rational all_equal_mass;         // all-X row mass on the two all-equal outcomes
  bool strict = false;             // all_equal_mass < 1
  Rational violation;              // 1 - C(n,k)/2^(n-1)

  bool ok() const { return implications_ok && z_row_ok && closure_ok && strict; }
};

namespace detail {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(std::size_t(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int a) { return parent[std::size_t(a)] == a ? a : parent[std::size_t(a)] = find(parent[std::size_t(a)]); }
  void unite(int a, int b) { parent[std::size_t(find(a))] = find(b); }
};

}  // namespace detail

/// Verifies the certificate on the actual X/Z empirical model, in exact
/// arithmetic. Requires n > 2 (at n = 2 the all-equal mass reaches 1 and
/// the strictness argument fails) and 0 < k < n.
inline DickeCertificate dicke_certificate(int n, int k) {
  if (k <= 0 || (n >= 2 && k >= n))
    throw ValidationError("dicke_certificate: need 0 < k < n");
  if (n <= 2)
    throw ValidationError(
        "dicke_certificate: n <= 2 rejected; the all-equal X mass C(n,k)/2^(n-1) "
        "reaches 1, so the strictness step fails");

  const ExactState state = dicke(n, k);
  const Scenario scenario = Scenario::uniform(n, Observable::x(), Observable::z());
  const ExactModel model = build_model(state, scenario);
  const SupportTable table = support(model);

  DickeCertificate cert;
  cert.n = n;
  cert.k = k;

  const Eigen::Index all_z = scenario.contexts() - 1;  // setting 1 everywhere
  const Eigen::Index all_x = 0;

  // Two-X-row implications: with the Z sites showing k-1 plus outcomes,
  // the two outcomes with unequal X_i, X_j signs must carry zero weight.
  cert.implications_ok = true;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      Eigen::Index context = all_z;
      context &= ~(Eigen::Index(1) << (n - 1 - i));
      context &= ~(Eigen::Index(1) << (n - 1 - j));
      for (Eigen::Index zpat = 0; zpat < table.cells.cols(); ++zpat) {
        // zpat packs the outcomes of all parties; sites i and j are set below.
        if (bit_of(zpat, i, n) || bit_of(zpat, j, n)) continue;
        int plus_z = 0;
        for (int p = 0; p < n; ++p)
          if (p != i && p != j && bit_of(zpat, p, n) == 0) ++plus_z;
        if (plus_z != k - 1) continue;
        ++cert.implication_instances;
        const Eigen::Index bi = Eigen::Index(1) << (n - 1 - i);
        const Eigen::Index bj = Eigen::Index(1) << (n - 1 - j);
        if (table.cells(context, zpat | bi) || table.cells(context, zpat | bj))
          cert.implications_ok = false;
      }
    }
  }

  // All-Z support must be exactly the outcomes with k plus signs.
  cert.z_row_ok = true;
  std::vector<Eigen::Index> disjuncts;
  for (Eigen::Index o = 0; o < table.cells.cols(); ++o) {
    const int plus = n - __builtin_popcountll((unsigned long long)o);
    const bool expected = plus == k;
    if (table.cells(all_z, o) != expected) cert.z_row_ok = false;
    if (expected) disjuncts.push_back(o);
  }
  cert.z_disjuncts = long(disjuncts.size());

  // Per disjunct, merging X_i ~ X_j across opposite-polarity Z pairs must
  // connect every variable.
  cert.closure_ok = true;
  for (Eigen::Index d : disjuncts) {
    detail::UnionFind uf(n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (bit_of(d, i, n) != bit_of(d, j, n)) uf.unite(i, j);
    for (int p = 1; p < n; ++p)
      if (uf.find(p) != uf.find(0)) cert.closure_ok = false;
  }

  // All-X row: the two all-equal outcomes carry C(n,k)/2^(n-1) exactly.
  cert.all_equal_mass =
      model.probs(all_x, 0) + model.probs(all_x, model.probs.cols() - 1);
  const Rational expected_mass(binomial(n, k), pow2(n - 1));
  if (cert.all_equal_mass != expected_mass)
    throw std::logic_error("dicke_certificate: all-equal mass mismatch");
  cert.strict = cert.all_equal_mass < Rational(1);
  cert.violation = Rational(1) - cert.all_equal_mass;
  return cert;
}

}  // namespace qctx
