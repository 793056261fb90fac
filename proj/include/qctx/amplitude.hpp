#pragma once

#include "qctx/rational.hpp"

#include <complex>
#include <cmath>
#include <ostream>
#include <string>
#include <utility>

namespace qctx {

/// Splits n > 0 as s^2 * r with r squarefree; returns (s, r).
inline std::pair<BigInt, BigInt> squarefree_split(BigInt n) {
  BigInt s = 1, r = 1;
  for (BigInt d = 2; d * d <= n; ++d) {
    while (n % (d * d) == 0) {
      s *= d;
      n /= d * d;
    }
    if (n % d == 0) {
      r *= d;
      n /= d;
    }
  }
  return {s, r * n};
}

/// Exact complex amplitude (re + im*i) * sqrt(surd), with rational
/// components and squarefree positive surd. Closed under products and
/// conjugation; sums are defined within one surd class (adding across
/// classes throws, which no measurement pipeline here ever does).
class SurdComplex {
 public:
  SurdComplex() : re_(0), im_(0), surd_(1) {}
  SurdComplex(Rational re, Rational im, BigInt surd = BigInt(1))
      : re_(std::move(re)), im_(std::move(im)), surd_(std::move(surd)) {
    canonicalize();
  }

  static SurdComplex zero() { return SurdComplex(); }
  static SurdComplex one() { return SurdComplex(Rational(1), Rational(0)); }
  static SurdComplex i() { return SurdComplex(Rational(0), Rational(1)); }
  static SurdComplex integer(long v) { return SurdComplex(Rational(v), Rational(0)); }

  /// 1/sqrt(n) for integer n > 0.
  static SurdComplex inv_sqrt(const BigInt& n) {
    if (n <= 0) throw std::domain_error("inv_sqrt: need n > 0");
    auto [s, r] = squarefree_split(n);
    // 1/sqrt(s^2 r) = sqrt(r) / (s r)
    return SurdComplex(Rational(BigInt(1), s * r), Rational(0), r);
  }

  const Rational& re() const { return re_; }
  const Rational& im() const { return im_; }
  const BigInt& surd() const { return surd_; }
  bool is_zero() const { return re_.is_zero() && im_.is_zero(); }

  SurdComplex conj() const { return SurdComplex(re_, -im_, surd_); }

  /// |z|^2 = (re^2 + im^2) * surd, an exact rational.
  Rational squared_norm() const { return (re_ * re_ + im_ * im_) * Rational(surd_); }

  std::complex<double> to_complex() const {
    double root = std::sqrt(surd_.convert_to<double>());
    return {re_.to_double() * root, im_.to_double() * root};
  }

  friend SurdComplex operator*(const SurdComplex& a, const SurdComplex& b) {
    Rational re = a.re_ * b.re_ - a.im_ * b.im_;
    Rational im = a.re_ * b.im_ + a.im_ * b.re_;
    return SurdComplex(std::move(re), std::move(im), a.surd_ * b.surd_);
  }
  friend SurdComplex operator+(const SurdComplex& a, const SurdComplex& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.surd_ != b.surd_)
      throw std::domain_error("SurdComplex: sum across surd classes (sqrt(" +
                              a.surd_.str() + ") vs sqrt(" + b.surd_.str() + "))");
    return SurdComplex(a.re_ + b.re_, a.im_ + b.im_, a.surd_);
  }
  friend SurdComplex operator-(const SurdComplex& a, const SurdComplex& b) { return a + (-b); }
  SurdComplex operator-() const { return SurdComplex(-re_, -im_, surd_); }
  SurdComplex& operator+=(const SurdComplex& o) { return *this = *this + o; }
  SurdComplex& operator*=(const SurdComplex& o) { return *this = *this * o; }

  friend bool operator==(const SurdComplex& a, const SurdComplex& b) {
    return a.re_ == b.re_ && a.im_ == b.im_ && a.surd_ == b.surd_;
  }
  friend bool operator!=(const SurdComplex& a, const SurdComplex& b) { return !(a == b); }

  std::string str() const {
    std::string s = "(" + re_.str() + (im_.sign() < 0 ? "" : "+") + im_.str() + "i)";
    if (surd_ != 1) s += "*sqrt(" + surd_.str() + ")";
    return s;
  }
  friend std::ostream& operator<<(std::ostream& os, const SurdComplex& z) {
    return os << z.str();
  }

 private:
  void canonicalize() {
    if (surd_ <= 0) throw std::domain_error("SurdComplex: surd must be positive");
    if (re_.is_zero() && im_.is_zero()) {
      surd_ = 1;
      return;
    }
    if (surd_ == 1) return;
    auto [s, r] = squarefree_split(surd_);
    if (s != 1) {
      Rational factor{BigInt(s)};
      re_ *= factor;
      im_ *= factor;
    }
    surd_ = r;
  }

  Rational re_, im_;
  BigInt surd_;
};

/// Per-scalar glue used by the templated measurement code. Instantiated
/// for the exact amplitude and for std::complex<double>.
template <typename Scalar>
struct amp_traits;

template <>
struct amp_traits<SurdComplex> {
  using prob_type = Rational;
  static constexpr bool exact = true;
  static SurdComplex zero() { return SurdComplex::zero(); }
  static SurdComplex one() { return SurdComplex::one(); }
  static SurdComplex conj(const SurdComplex& z) { return z.conj(); }
  static Rational squared_norm(const SurdComplex& z) { return z.squared_norm(); }
  static bool is_zero(const SurdComplex& z) { return z.is_zero(); }
  static std::complex<double> to_complex(const SurdComplex& z) { return z.to_complex(); }
};

template <>
struct amp_traits<std::complex<double>> {
  using prob_type = double;
  static constexpr bool exact = false;
  static std::complex<double> zero() { return {0.0, 0.0}; }
  static std::complex<double> one() { return {1.0, 0.0}; }
  static std::complex<double> conj(const std::complex<double>& z) { return std::conj(z); }
  static double squared_norm(const std::complex<double>& z) { return std::norm(z); }
  static bool is_zero(const std::complex<double>& z) { return z == std::complex<double>(0.0, 0.0); }
  static std::complex<double> to_complex(const std::complex<double>& z) { return z; }
};

template <typename Scalar>
using prob_t = typename amp_traits<Scalar>::prob_type;

}  // namespace qctx

namespace Eigen {
template <>
struct NumTraits<qctx::SurdComplex> : GenericNumTraits<qctx::SurdComplex> {
  typedef qctx::Rational Real;
  typedef qctx::SurdComplex NonInteger;
  typedef qctx::SurdComplex Nested;
  typedef qctx::SurdComplex Literal;
  enum {
    IsComplex = 1,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 16,
    AddCost = 60,
    MulCost = 60,
  };
  static inline Real epsilon() { return qctx::Rational(0); }
  static inline Real dummy_precision() { return qctx::Rational(0); }
  static inline int digits10() { return 0; }
};
}  // namespace Eigen
