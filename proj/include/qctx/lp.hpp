#pragma once

#include "qctx/rational.hpp"

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace qctx {

template <typename T>
struct lp_traits;

template <>
struct lp_traits<Rational> {
  static bool is_zero(const Rational& x) { return x.is_zero(); }
  static bool definitely_neg(const Rational& x) { return x.sign() < 0; }
  static bool definitely_pos(const Rational& x) { return x.sign() > 0; }
  static bool feasible_value(const Rational& w) { return w.is_zero(); }
  static double to_double(const Rational& x) { return x.to_double(); }
};

template <>
struct lp_traits<double> {
  static constexpr double eps = 1e-11;
  static constexpr double feas_tol = 1e-9;
  static bool is_zero(double x) { return std::abs(x) <= eps; }
  static bool definitely_neg(double x) { return x < -feas_tol; }
  static bool definitely_pos(double x) { return x > feas_tol; }
  static bool feasible_value(double w) { return w <= feas_tol; }
  static double to_double(double x) { return x; }
};

/// Outcome of the equality-form feasibility problem Ax = b, x >= 0.
/// When infeasible, `farkas` holds y with y'A <= 0 and y'b = objective > 0;
/// the solver verifies the certificate before returning it.
template <typename T>
struct FeasibilityResult {
  bool feasible = false;
  Eigen::Matrix<T, Eigen::Dynamic, 1> x;
  Eigen::Matrix<T, Eigen::Dynamic, 1> farkas;
  T objective{};
};

/// Phase-1 simplex with Bland's rule (no cycling) on a dense tableau.
/// Requires b >= 0 componentwise. Artificial variables never re-enter;
/// any claimed infeasibility is backed by a checked Farkas vector.
template <typename T>
FeasibilityResult<T> feasible_point(
    const Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>& A,
    const Eigen::Matrix<T, Eigen::Dynamic, 1>& b) {
  using Traits = lp_traits<T>;
  const Eigen::Index m = A.rows();
  const Eigen::Index nc = A.cols();
  if (b.size() != m) throw std::invalid_argument("feasible_point: dimension mismatch");
  for (Eigen::Index i = 0; i < m; ++i)
    if (Traits::definitely_neg(b(i)))
      throw std::invalid_argument("feasible_point: b must be nonnegative");

  // Tableau [A | I | b], objective row = reduced costs of "minimize sum
  // of artificials"; obj(last) carries minus the current objective.
  Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> tab(m, nc + m + 1);
  tab.setConstant(T{});
  tab.block(0, 0, m, nc) = A;
  for (Eigen::Index i = 0; i < m; ++i) {
    tab(i, nc + i) = T(1);
    tab(i, nc + m) = b(i);
  }
  Eigen::Matrix<T, Eigen::Dynamic, 1> obj(nc + m + 1);
  obj.setConstant(T{});
  for (Eigen::Index i = 0; i < m; ++i) obj -= tab.row(i).transpose();
  for (Eigen::Index i = 0; i < m; ++i) obj(nc + i) = T{};  // artificials basic

  std::vector<Eigen::Index> basis(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) basis[std::size_t(i)] = nc + i;

  long iterations_left = 200 * long(m + nc) + 2000;
  while (true) {
    if (--iterations_left < 0)
      throw std::logic_error("feasible_point: iteration limit hit");
    // Bland: smallest original column with negative reduced cost.
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < nc; ++j)
      if (Traits::definitely_neg(obj(j))) {
        enter = j;
        break;
      }
    if (enter < 0) break;

    Eigen::Index leave = -1;
    T best_ratio{};
    for (Eigen::Index i = 0; i < m; ++i) {
      if (!Traits::definitely_pos(tab(i, enter))) continue;
      T ratio = tab(i, nc + m) / tab(i, enter);
      if (leave < 0 || ratio < best_ratio ||
          (!(best_ratio < ratio) && basis[std::size_t(i)] < basis[std::size_t(leave)])) {
        leave = i;
        best_ratio = ratio;
      }
    }
    if (leave < 0)
      throw std::logic_error("feasible_point: unbounded phase-1 (cannot happen)");

    // Pivot on (leave, enter).
    T piv = tab(leave, enter);
    tab.row(leave) /= piv;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (i == leave) continue;
      T factor = tab(i, enter);
      if (Traits::is_zero(factor)) continue;
      tab.row(i) -= factor * tab.row(leave);
    }
    T ofac = obj(enter);
    if (!Traits::is_zero(ofac)) obj -= ofac * tab.row(leave).transpose();
    basis[std::size_t(leave)] = enter;
  }

  FeasibilityResult<T> res;
  res.objective = T{} - obj(nc + m);
  if (Traits::feasible_value(res.objective)) {
    res.feasible = true;
    res.x.resize(nc);
    res.x.setConstant(T{});
    for (Eigen::Index i = 0; i < m; ++i)
      if (basis[std::size_t(i)] < nc) res.x(basis[std::size_t(i)]) = tab(i, nc + m);
    return res;
  }

  // Farkas vector from the artificial columns' reduced costs: y_i = 1 - r_i.
  res.feasible = false;
  res.farkas.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) res.farkas(i) = T(1) - obj(nc + i);

  // The certificate must satisfy y'A <= 0 and y'b > 0; anything else is a
  // solver bug, not an answer.
  for (Eigen::Index j = 0; j < nc; ++j) {
    T dot{};
    for (Eigen::Index i = 0; i < m; ++i) dot += res.farkas(i) * A(i, j);
    if (Traits::definitely_pos(dot))
      throw std::logic_error("feasible_point: invalid Farkas certificate (column)");
  }
  T value{};
  for (Eigen::Index i = 0; i < m; ++i) value += res.farkas(i) * b(i);
  if (!Traits::definitely_pos(value))
    throw std::logic_error("feasible_point: invalid Farkas certificate (value)");
  res.objective = value;
  return res;
}

}  // namespace qctx
