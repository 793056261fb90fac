#pragma once

#include "qctx/state.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

namespace qctx {

/// Dichotomic single-qubit observable. X/Y/Z have exact eigenbases; a
/// general Bloch-sphere observable U(theta, phi) is float-only.
struct Observable {
  enum class Kind { X, Y, Z, Bloch };

  Kind kind = Kind::Z;
  double theta = 0.0;
  double phi = 0.0;

  static Observable x() { return {Kind::X, std::numbers::pi / 2, 0.0}; }
  static Observable y() { return {Kind::Y, std::numbers::pi / 2, std::numbers::pi / 2}; }
  static Observable z() { return {Kind::Z, 0.0, 0.0}; }
  static Observable bloch(double theta, double phi) { return {Kind::Bloch, theta, phi}; }

  bool exact() const { return kind != Kind::Bloch; }

  std::string str() const {
    switch (kind) {
      case Kind::X: return "X";
      case Kind::Y: return "Y";
      case Kind::Z: return "Z";
      default: break;
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "U(%.10g,%.10g)", theta, phi);
    return buf;
  }

  friend bool operator==(const Observable& a, const Observable& b) {
    return a.kind == b.kind && a.theta == b.theta && a.phi == b.phi;
  }
};

/// Observable matrix on the Bloch sphere:
///   [[cos t, e^{-i p} sin t], [e^{i p} sin t, -cos t]].
inline Matrix2<std::complex<double>> bloch_matrix(double theta, double phi) {
  Matrix2<std::complex<double>> u;
  const std::complex<double> eip = std::polar(1.0, phi);
  u(0, 0) = std::cos(theta);
  u(0, 1) = std::conj(eip) * std::sin(theta);
  u(1, 0) = eip * std::sin(theta);
  u(1, 1) = -std::cos(theta);
  return u;
}

/// Columns are the +1 and -1 eigenvectors of the observable.
template <typename Scalar>
Matrix2<Scalar> eigenbasis(const Observable& obs);

template <>
inline Matrix2<SurdComplex> eigenbasis<SurdComplex>(const Observable& obs) {
  Matrix2<SurdComplex> m;
  const SurdComplex r = SurdComplex::inv_sqrt(2);
  const SurdComplex ir = SurdComplex::i() * r;
  switch (obs.kind) {
    case Observable::Kind::Z:
      m(0, 0) = SurdComplex::one();
      m(1, 0) = SurdComplex::zero();
      m(0, 1) = SurdComplex::zero();
      m(1, 1) = SurdComplex::one();
      return m;
    case Observable::Kind::X:
      m(0, 0) = r;
      m(1, 0) = r;
      m(0, 1) = r;
      m(1, 1) = -r;
      return m;
    case Observable::Kind::Y:
      m(0, 0) = r;
      m(1, 0) = ir;
      m(0, 1) = r;
      m(1, 1) = -ir;
      return m;
    case Observable::Kind::Bloch:
      throw ValidationError("Bloch observable has no exact eigenbasis; use float mode");
  }
  throw ValidationError("unknown observable kind");
}

template <>
inline Matrix2<std::complex<double>> eigenbasis<std::complex<double>>(const Observable& obs) {
  Matrix2<std::complex<double>> m;
  const double c = std::cos(obs.theta / 2), s = std::sin(obs.theta / 2);
  const std::complex<double> eip = std::polar(1.0, obs.phi);
  switch (obs.kind) {
    case Observable::Kind::Z:
      m << 1.0, 0.0, 0.0, 1.0;
      return m;
    case Observable::Kind::X: {
      const double r = 1.0 / std::sqrt(2.0);
      m << r, r, r, -r;
      return m;
    }
    case Observable::Kind::Y: {
      const double r = 1.0 / std::sqrt(2.0);
      m << std::complex<double>(r, 0), std::complex<double>(r, 0),
          std::complex<double>(0, r), std::complex<double>(0, -r);
      return m;
    }
    case Observable::Kind::Bloch:
      m(0, 0) = c;
      m(1, 0) = eip * s;
      m(0, 1) = s;
      m(1, 1) = -eip * c;
      return m;
  }
  throw ValidationError("unknown observable kind");
}

/// Inner-product kernel: probability of joint outcome `outcome` (one bit
/// per party, 0 = "+") when party p measures in basis `bases[p]`.
template <typename Scalar>
prob_t<Scalar> born_probability(const StateVector<Scalar>& state,
                                const std::vector<Matrix2<Scalar>>& bases,
                                Eigen::Index outcome) {
  const int n = qubit_count(state);
  if (int(bases.size()) != n)
    throw ValidationError("born_probability: one basis per qubit required");
  Scalar amp = amp_traits<Scalar>::zero();
  for (Eigen::Index b = 0; b < state.size(); ++b) {
    if (amp_traits<Scalar>::is_zero(state(b))) continue;
    Scalar term = state(b);
    for (int p = 0; p < n && !amp_traits<Scalar>::is_zero(term); ++p) {
      const int row = bit_of(b, p, n);
      const int col = bit_of(outcome, p, n);
      term = term * amp_traits<Scalar>::conj(bases[p](row, col));
    }
    amp = amp + term;
  }
  return amp_traits<Scalar>::squared_norm(amp);
}

/// Convenience wrapper: probability of the joint outcome given one
/// (observable, sign) per party; sign +1 selects the +1 eigenvector.
template <typename Scalar>
prob_t<Scalar> born_probability(const StateVector<Scalar>& state,
                                const std::vector<std::pair<Observable, int>>& locals) {
  const int n = qubit_count(state);
  if (int(locals.size()) != n)
    throw ValidationError("born_probability: one (observable, sign) per qubit required");
  std::vector<Matrix2<Scalar>> bases;
  bases.reserve(locals.size());
  Eigen::Index outcome = 0;
  for (const auto& [obs, sign] : locals) {
    bases.push_back(eigenbasis<Scalar>(obs));
    outcome = (outcome << 1) | (sign < 0 ? 1 : 0);
  }
  return born_probability(state, bases, outcome);
}

}  // namespace qctx
