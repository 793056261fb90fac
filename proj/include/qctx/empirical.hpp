#pragma once

#include "qctx/observable.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace qctx {

/// Probability below which a float-mode entry counts as zero when
/// extracting supports. Well below any nonzero entry these models produce.
inline constexpr double kSupportZeroThreshold = 1e-10;

/// Tables have 2^n x 2^n cells; refuse to build beyond this many parties.
inline constexpr int kMaxModelParties = 12;

/// Two labelled dichotomic settings per party. Observables are optional:
/// models read from files or built-in boxes carry labels only.
struct Scenario {
  struct Party {
    std::array<std::string, 2> labels;
    std::array<std::optional<Observable>, 2> observables;
  };
  std::vector<Party> parties;

  int n() const { return int(parties.size()); }
  Eigen::Index contexts() const { return Eigen::Index(1) << n(); }
  Eigen::Index outcomes() const { return Eigen::Index(1) << n(); }

  bool all_observables_exact() const {
    for (const auto& p : parties)
      for (const auto& o : p.observables)
        if (!o || !o->exact()) return false;
    return true;
  }

  void validate() const {
    if (parties.empty()) throw ValidationError("scenario needs at least one party");
    for (const auto& p : parties)
      if (p.labels[0] == p.labels[1])
        throw ValidationError("setting labels must be unique per party");
  }

  static Scenario uniform(int n, const Observable& first, const Observable& second,
                          std::string label_first = "", std::string label_second = "") {
    if (label_first.empty()) label_first = first.str();
    if (label_second.empty()) label_second = second.str();
    Scenario s;
    s.parties.assign(std::size_t(n),
                     Party{{label_first, label_second}, {first, second}});
    s.validate();
    return s;
  }
};

/// Setting chosen by `party` in context index c (party 0 owns the most
/// significant bit, mirroring ket order).
inline int setting_of(Eigen::Index context, int party, int n) {
  return bit_of(context, party, n);
}

inline std::string context_label(const Scenario& scenario, Eigen::Index context) {
  std::string out;
  for (int p = 0; p < scenario.n(); ++p)
    out += scenario.parties[p].labels[setting_of(context, p, scenario.n())];
  return out;
}

/// "+-+"-style column header for a joint outcome.
inline std::string outcome_label(Eigen::Index outcome, int n) {
  std::string out;
  for (int p = 0; p < n; ++p) out += bit_of(outcome, p, n) ? '-' : '+';
  return out;
}

/// Row order used for display: the all-first-setting context on top, then
/// grouped by the number of second settings, ties in ascending binary
/// order.
inline std::vector<Eigen::Index> display_order(int n) {
  std::vector<Eigen::Index> order(std::size_t(1) << n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [](Eigen::Index a, Eigen::Index b) {
    int pa = __builtin_popcountll((unsigned long long)a);
    int pb = __builtin_popcountll((unsigned long long)b);
    if (pa != pb) return pa < pb;
    return a < b;
  });
  return order;
}

/// Probability table: one row per context (binary index), one column per
/// joint outcome (sign-lexicographic, "+++ ... ---").
template <typename P>
struct EmpiricalModel {
  Scenario scenario;
  Eigen::Matrix<P, Eigen::Dynamic, Eigen::Dynamic> probs;

  int n() const { return scenario.n(); }
  static constexpr bool exact = std::is_same_v<P, Rational>;
};

using ExactModel = EmpiricalModel<Rational>;
using FloatModel = EmpiricalModel<double>;

/// Possibilistic collapse of a model: which outcomes have nonzero weight.
struct SupportTable {
  Scenario scenario;
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> cells;

  int n() const { return scenario.n(); }

  std::vector<int> outcomes_of(Eigen::Index context) const {
    std::vector<int> out;
    for (Eigen::Index o = 0; o < cells.cols(); ++o)
      if (cells(context, o)) out.push_back(int(o));
    return out;
  }

  friend bool operator==(const SupportTable& a, const SupportTable& b) {
    return a.cells.rows() == b.cells.rows() && a.cells.cols() == b.cells.cols() &&
           (a.cells == b.cells).all();
  }
};

namespace detail {

inline bool prob_is_zero(const Rational& p) { return p.is_zero(); }
inline bool prob_is_zero(double p) { return p < kSupportZeroThreshold; }

inline bool row_sum_ok(const Rational& s) { return s == Rational(1); }
inline bool row_sum_ok(double s) { return std::abs(s - 1.0) <= 1e-9; }

}  // namespace detail

/// Evaluates every context/outcome cell of the (n,2,2) table for `state`
/// under `scenario`'s observables.
template <typename Scalar>
EmpiricalModel<prob_t<Scalar>> build_model(const StateVector<Scalar>& state,
                                           const Scenario& scenario) {
  scenario.validate();
  const int n = qubit_count(state);
  if (scenario.n() != n)
    throw ValidationError("build_model: scenario has " + std::to_string(scenario.n()) +
                          " parties but the state has " + std::to_string(n) + " qubits");
  if (n > kMaxModelParties)
    throw SizeBoundError("build_model: more than " + std::to_string(kMaxModelParties) +
                         " parties");

  EmpiricalModel<prob_t<Scalar>> model;
  model.scenario = scenario;
  model.probs.resize(scenario.contexts(), scenario.outcomes());
  for (Eigen::Index c = 0; c < scenario.contexts(); ++c) {
    std::vector<Matrix2<Scalar>> bases;
    bases.reserve(std::size_t(n));
    for (int p = 0; p < n; ++p) {
      const auto& obs = scenario.parties[p].observables[setting_of(c, p, n)];
      if (!obs) throw ValidationError("build_model: scenario lacks observables");
      bases.push_back(eigenbasis<Scalar>(*obs));
    }
    prob_t<Scalar> row_sum{};
    for (Eigen::Index o = 0; o < scenario.outcomes(); ++o) {
      model.probs(c, o) = born_probability(state, bases, o);
      row_sum += model.probs(c, o);
    }
    if (!detail::row_sum_ok(row_sum))
      throw std::logic_error("build_model: context row does not sum to 1");
  }
  return model;
}

template <typename P>
SupportTable support(const EmpiricalModel<P>& model) {
  SupportTable table;
  table.scenario = model.scenario;
  table.cells.resize(model.probs.rows(), model.probs.cols());
  for (Eigen::Index c = 0; c < model.probs.rows(); ++c)
    for (Eigen::Index o = 0; o < model.probs.cols(); ++o)
      table.cells(c, o) = !detail::prob_is_zero(model.probs(c, o));
  return table;
}

/// Per-party outcome swaps. Composition is XOR; every relabeling is an
/// involution.
struct Relabeling {
  std::vector<bool> flip;

  int n() const { return int(flip.size()); }

  Eigen::Index apply(Eigen::Index outcome) const {
    Eigen::Index mask = 0;
    for (int p = 0; p < n(); ++p)
      if (flip[std::size_t(p)]) mask |= Eigen::Index(1) << (n() - 1 - p);
    return outcome ^ mask;
  }

  Relabeling compose(const Relabeling& other) const {
    if (other.n() != n()) throw ValidationError("relabeling arity mismatch");
    Relabeling out = *this;
    for (int p = 0; p < n(); ++p)
      out.flip[std::size_t(p)] = out.flip[std::size_t(p)] != other.flip[std::size_t(p)];
    return out;
  }

  /// Builds the relabeling written "+++ -> ++-": flip wherever the image
  /// of the all-plus outcome shows '-'.
  static Relabeling from_image_of_plus(const std::string& image) {
    Relabeling r;
    for (char c : image) {
      if (c != '+' && c != '-') throw ValidationError("relabeling image must be +/- only");
      r.flip.push_back(c == '-');
    }
    return r;
  }
};

template <typename P>
EmpiricalModel<P> relabel(const EmpiricalModel<P>& model, const Relabeling& r) {
  if (r.n() != model.n()) throw ValidationError("relabeling arity mismatch");
  EmpiricalModel<P> out = model;
  for (Eigen::Index c = 0; c < model.probs.rows(); ++c)
    for (Eigen::Index o = 0; o < model.probs.cols(); ++o)
      out.probs(c, r.apply(o)) = model.probs(c, o);
  return out;
}

inline SupportTable relabel(const SupportTable& table, const Relabeling& r) {
  if (r.n() != table.n()) throw ValidationError("relabeling arity mismatch");
  SupportTable out = table;
  for (Eigen::Index c = 0; c < table.cells.rows(); ++c)
    for (Eigen::Index o = 0; o < table.cells.cols(); ++o)
      out.cells(c, r.apply(o)) = table.cells(c, o);
  return out;
}

/// The bipartite box with a (+) b = s.t: perfectly correlated except in
/// the (1,1) context, uniform 1/2 weights on the allowed outcomes.
inline ExactModel pr_box() {
  ExactModel model;
  model.scenario.parties.assign(2, Scenario::Party{{"0", "1"}, {std::nullopt, std::nullopt}});
  model.probs.resize(4, 4);
  const Rational half(BigInt(1), BigInt(2));
  for (Eigen::Index c = 0; c < 4; ++c) {
    const int st = int((c >> 1) & (c & 1));
    for (Eigen::Index o = 0; o < 4; ++o) {
      const int parity = int(((o >> 1) ^ o) & 1);
      model.probs(c, o) = (parity == st) ? half : Rational(0);
    }
  }
  return model;
}

/// Largest no-signalling violation across adjacent contexts: marginals on
/// the other parties when one party's setting changes. Zero for every
/// model built from a state.
template <typename P>
P no_signalling_defect(const EmpiricalModel<P>& model) {
  const int n = model.n();
  P worst{};
  for (Eigen::Index c = 0; c < model.probs.rows(); ++c) {
    for (int p = 0; p < n; ++p) {
      const Eigen::Index cbit = Eigen::Index(1) << (n - 1 - p);
      if (c & cbit) continue;
      const Eigen::Index c2 = c | cbit;
      const Eigen::Index obit = cbit;
      for (Eigen::Index rest = 0; rest < model.probs.cols(); ++rest) {
        if (rest & obit) continue;  // enumerate outcomes of the other parties
        P m1 = model.probs(c, rest) + model.probs(c, rest | obit);
        P m2 = model.probs(c2, rest) + model.probs(c2, rest | obit);
        P diff = m1 - m2;
        if (diff < P{}) diff = P{} - diff;
        if (worst < diff) worst = diff;
      }
    }
  }
  return worst;
}

}  // namespace qctx
