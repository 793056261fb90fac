#pragma once

#include "qctx/amplitude.hpp"

#include <Eigen/Core>

#include <complex>
#include <string>
#include <vector>

namespace qctx {

/// n-qubit state: 2^n amplitudes indexed so that qubit 1 is the most
/// significant bit of the index (|q1 q2 ... qn> order).
template <typename Scalar>
using StateVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix2 = Eigen::Matrix<Scalar, 2, 2>;

using ExactState = StateVector<SurdComplex>;
using FloatState = StateVector<std::complex<double>>;

inline int qubit_count_for_dim(Eigen::Index dim) {
  int n = 0;
  while ((Eigen::Index(1) << n) < dim) ++n;
  if ((Eigen::Index(1) << n) != dim)
    throw ValidationError("state dimension is not a power of two");
  return n;
}

template <typename Scalar>
int qubit_count(const StateVector<Scalar>& v) {
  return qubit_count_for_dim(v.size());
}

/// Bit of basis index `b` belonging to qubit `p` (0-based party index).
inline int bit_of(Eigen::Index b, int party, int n) {
  return int((b >> (n - 1 - party)) & 1);
}

/// Basis ket |bits> for a bit pattern given as "010"-style string.
template <typename Scalar>
StateVector<Scalar> ket(const std::string& bits) {
  const int n = int(bits.size());
  StateVector<Scalar> v = StateVector<Scalar>::Constant(Eigen::Index(1) << n,
                                                        amp_traits<Scalar>::zero());
  Eigen::Index idx = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') throw ValidationError("ket: bits must be 0/1");
    idx = (idx << 1) | (c == '1');
  }
  v(idx) = amp_traits<Scalar>::one();
  return v;
}

template <typename Scalar>
StateVector<Scalar> tensor(const StateVector<Scalar>& a, const StateVector<Scalar>& b) {
  StateVector<Scalar> out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    for (Eigen::Index j = 0; j < b.size(); ++j) out(i * b.size() + j) = a(i) * b(j);
  return out;
}

template <typename Scalar>
prob_t<Scalar> squared_norm(const StateVector<Scalar>& v) {
  prob_t<Scalar> s{};
  for (Eigen::Index i = 0; i < v.size(); ++i)
    s += amp_traits<Scalar>::squared_norm(v(i));
  return s;
}

inline FloatState to_float(const ExactState& v) {
  FloatState out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out(i) = v(i).to_complex();
  return out;
}

inline Matrix2<std::complex<double>> to_float(const Matrix2<SurdComplex>& m) {
  Matrix2<std::complex<double>> out;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) out(r, c) = m(r, c).to_complex();
  return out;
}

/// Deviation of U from unitarity, max-norm of U*U - I evaluated in floats.
template <typename Scalar>
double unitarity_defect(const Matrix2<Scalar>& u) {
  auto uf = [&](int r, int c) { return amp_traits<Scalar>::to_complex(u(r, c)); };
  double worst = 0.0;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      std::complex<double> dot =
          std::conj(uf(0, r)) * uf(0, c) + std::conj(uf(1, r)) * uf(1, c);
      worst = std::max(worst, std::abs(dot - (r == c ? 1.0 : 0.0)));
    }
  return worst;
}

/// (U_1 ⊗ ... ⊗ U_n)|psi>. Each matrix must be unitary to 1e-9.
template <typename Scalar>
StateVector<Scalar> apply_local_unitaries(const StateVector<Scalar>& state,
                                          const std::vector<Matrix2<Scalar>>& unitaries) {
  const int n = qubit_count(state);
  if (int(unitaries.size()) != n)
    throw ValidationError("apply_local_unitaries: need one 2x2 matrix per qubit");
  for (const auto& u : unitaries)
    if (unitarity_defect(u) > 1e-9)
      throw ValidationError("apply_local_unitaries: matrix is not unitary");

  StateVector<Scalar> cur = state;
  for (int p = 0; p < n; ++p) {
    const Eigen::Index stride = Eigen::Index(1) << (n - 1 - p);
    StateVector<Scalar> next = cur;
    for (Eigen::Index b = 0; b < cur.size(); ++b) {
      if ((b & stride) != 0) continue;  // visit each |..0..>,|..1..> pair once
      Scalar a0 = cur(b), a1 = cur(b | stride);
      next(b) = unitaries[p](0, 0) * a0 + unitaries[p](0, 1) * a1;
      next(b | stride) = unitaries[p](1, 0) * a0 + unitaries[p](1, 1) * a1;
    }
    cur = std::move(next);
  }
  return cur;
}

}  // namespace qctx
