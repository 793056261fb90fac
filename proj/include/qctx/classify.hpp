#pragma once

#include "qctx/assignment.hpp"
#include "qctx/empirical.hpp"
#include "qctx/lp.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace qctx {

inline constexpr int kMaxLpParties = 10;

/// Float-mode LP verdicts: a dual violation above this is a definite
/// infeasibility; between the solver tolerance (1e-9) and this the result
/// is reported as indeterminate rather than guessed.
inline constexpr double kLpDecisionThreshold = 1e-7;

enum class Label { NonContextual = 0, Weak = 1, Logical = 2, Strong = 3 };

inline const char* to_string(Label l) {
  switch (l) {
    case Label::NonContextual: return "NonContextual";
    case Label::Weak: return "Weak";
    case Label::Logical: return "Logical";
    case Label::Strong: return "Strong";
  }
  return "?";
}

enum class LpStatus { Feasible, Infeasible, Indeterminate };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Feasible: return "feasible";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Indeterminate: return "indeterminate";
  }
  return "?";
}

/// Noncontextual-polytope membership result. The Bell inequality rows are
/// indexed by (context, outcome) of the support cells; for any assignment
/// distribution the functional is <= 0, while this model attains
/// `lhs_value` > 0.
template <typename P>
struct LpResult {
  struct BellTerm {
    Eigen::Index context;
    Eigen::Index outcome;
    P coeff;
  };

  LpStatus status = LpStatus::Feasible;
  std::vector<std::pair<GlobalAssignment, P>> distribution;
  std::vector<BellTerm> inequality;
  P lhs_value{};
  double violation = 0.0;  // lhs / max |coeff|
};

/// Decides whether a distribution over support-consistent global
/// assignments reproduces the model. Assignments that touch a
/// zero-probability section are excluded up front: any reproducing
/// distribution must give them weight zero.
template <typename P>
LpResult<P> lp_noncontextual(const EmpiricalModel<P>& model) {
  if (model.n() > kMaxLpParties)
    throw SizeBoundError("lp_noncontextual: more than " + std::to_string(kMaxLpParties) +
                         " parties");
  const SupportTable table = support(model);
  const std::vector<GlobalAssignment> assignments = consistent_assignments(table);
  const int n = model.n();

  std::vector<std::pair<Eigen::Index, Eigen::Index>> rows;
  for (Eigen::Index c = 0; c < table.cells.rows(); ++c)
    for (Eigen::Index o = 0; o < table.cells.cols(); ++o)
      if (table.cells(c, o)) rows.emplace_back(c, o);

  Eigen::Matrix<P, Eigen::Dynamic, Eigen::Dynamic> A(Eigen::Index(rows.size()),
                                                     Eigen::Index(assignments.size()));
  A.setConstant(P{});
  Eigen::Matrix<P, Eigen::Dynamic, 1> b(Eigen::Index(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) b(Eigen::Index(r)) = model.probs(rows[r].first, rows[r].second);
  for (std::size_t g = 0; g < assignments.size(); ++g)
    for (std::size_t r = 0; r < rows.size(); ++r)
      if (restrict_assignment(assignments[g], rows[r].first, n) == rows[r].second)
        A(Eigen::Index(r), Eigen::Index(g)) = P(1);

  const FeasibilityResult<P> fr = feasible_point(A, b);
  LpResult<P> out;
  if (fr.feasible) {
    out.status = LpStatus::Feasible;
    for (std::size_t g = 0; g < assignments.size(); ++g) {
      const P w = fr.x(Eigen::Index(g));
      if (lp_traits<P>::definitely_pos(w)) out.distribution.emplace_back(assignments[g], w);
    }
    return out;
  }

  out.lhs_value = fr.objective;
  double max_coeff = 0.0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const P& y = fr.farkas(Eigen::Index(r));
    if (!(y == P{}))
      out.inequality.push_back({rows[r].first, rows[r].second, y});
    max_coeff = std::max(max_coeff, std::abs(lp_traits<P>::to_double(y)));
  }
  out.violation = max_coeff > 0 ? lp_traits<P>::to_double(fr.objective) / max_coeff : 0.0;

  if constexpr (std::is_same_v<P, Rational>) {
    out.status = LpStatus::Infeasible;
  } else {
    out.status = out.violation > kLpDecisionThreshold ? LpStatus::Infeasible
                                                      : LpStatus::Indeterminate;
  }
  return out;
}

/// Four-level verdict with the evidence that produced it.
struct ContextualityClass {
  Label label = Label::NonContextual;
  std::uint64_t consistent_count = 0;
  std::map<Eigen::Index, std::vector<int>> non_extendable;
  std::optional<LpStatus> lp_status;
  double lp_violation = 0.0;
  std::string lp_violation_exact;  // "p/q" when decided by the exact solver
};

enum class LpPolicy { Full, Skip };

/// Hierarchy test: Strong when no global assignment is consistent with
/// the support; Logical when some support section extends to none;
/// Weak/NonContextual by LP membership in the noncontextual polytope.
template <typename P>
ContextualityClass classify(const EmpiricalModel<P>& model, LpPolicy policy = LpPolicy::Full) {
  ContextualityClass out;
  const SupportTable table = support(model);
  const std::vector<GlobalAssignment> assignments = consistent_assignments(table);
  out.consistent_count = assignments.size();
  if (assignments.empty()) {
    out.label = Label::Strong;
    for (Eigen::Index c = 0; c < table.cells.rows(); ++c)
      out.non_extendable.emplace(c, table.outcomes_of(c));
    return out;
  }
  out.non_extendable = non_extendable_sections(table, assignments);
  if (!out.non_extendable.empty()) {
    out.label = Label::Logical;
    return out;
  }
  if (policy == LpPolicy::Skip) {
    out.label = Label::NonContextual;
    return out;
  }
  const LpResult<P> lp = lp_noncontextual(model);
  out.lp_status = lp.status;
  out.lp_violation = lp.violation;
  if constexpr (std::is_same_v<P, Rational>) {
    if (lp.status == LpStatus::Infeasible) out.lp_violation_exact = lp.lhs_value.str();
  }
  out.label = lp.status == LpStatus::Infeasible ? Label::Weak : Label::NonContextual;
  return out;
}

}  // namespace qctx
