#pragma once

#include "qctx/boolfn.hpp"
#include "qctx/observable.hpp"
#include "qctx/state.hpp"

#include <complex>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace qctx {

/// Uniform superposition of all n-bit kets with exactly k zeros,
/// amplitude C(n,k)^(-1/2). Endpoints k = 0 and k = n are product kets
/// and are rejected.
inline ExactState dicke(int n, int k) {
  if (n < 2) throw ValidationError("dicke: need n >= 2");
  if (k <= 0 || k >= n)
    throw ValidationError("dicke: need 0 < k < n (endpoints are product states)");
  ExactState v = ExactState::Constant(Eigen::Index(1) << n, SurdComplex::zero());
  const SurdComplex amp = SurdComplex::inv_sqrt(binomial(n, k));
  for (Eigen::Index b = 0; b < v.size(); ++b) {
    int zeros = n - __builtin_popcountll((unsigned long long)b);
    if (zeros == k) v(b) = amp;
  }
  return v;
}

/// 2^(-n/2) sum_q |q, F(q)>: the function value rides on the last qubit.
inline ExactState func_dep_state(const BooleanPolynomial& poly) {
  const int n = poly.n_vars();
  if (n < 1) throw ValidationError("func_dep_state: polynomial needs >= 1 variable");
  if (n > 16) throw SizeBoundError("func_dep_state: more than 16 variables");
  ExactState v = ExactState::Constant(Eigen::Index(1) << (n + 1), SurdComplex::zero());
  const SurdComplex amp = SurdComplex::inv_sqrt(pow2(n));
  for (Eigen::Index q = 0; q < (Eigen::Index(1) << n); ++q) {
    // ket order |q1..qn F>: q1 is the most significant index bit.
    std::uint32_t packed = 0;
    for (int var = 0; var < n; ++var)
      if (bit_of(q, var, n)) packed |= 1u << var;
    const Eigen::Index idx = (q << 1) | (poly.evaluate_packed(packed) ? 1 : 0);
    v(idx) = amp;
  }
  return v;
}

inline ExactState ghz(int n) {
  if (n < 2) throw ValidationError("ghz: need n >= 2");
  ExactState v = ExactState::Constant(Eigen::Index(1) << n, SurdComplex::zero());
  const SurdComplex amp = SurdComplex::inv_sqrt(2);
  v(0) = amp;
  v(v.size() - 1) = amp;
  return v;
}

/// (|00> + |11>)/sqrt(2) for sign +, (|00> - |11>)/sqrt(2) for sign -.
inline ExactState bell(int sign) {
  ExactState v = ExactState::Constant(4, SurdComplex::zero());
  const SurdComplex amp = SurdComplex::inv_sqrt(2);
  v(0) = amp;
  v(3) = sign < 0 ? -amp : amp;
  return v;
}

/// Dictator qubit i (1-based, i < n_parties) paired with the last qubit:
/// sign + gives |00>+|11| on (i, last), sign - gives |01>+|10>; every
/// other qubit is (|0>+|1>)/sqrt(2).
inline ExactState dictatorship(int n_parties, int dictator, int sign) {
  if (n_parties < 2) throw ValidationError("dictatorship: need >= 2 parties");
  if (dictator < 1 || dictator >= n_parties)
    throw ValidationError("dictatorship: dictator index out of range");
  const int n = n_parties;
  ExactState v = ExactState::Constant(Eigen::Index(1) << n, SurdComplex::zero());
  const SurdComplex amp = SurdComplex::inv_sqrt(pow2(n - 1));
  for (Eigen::Index b = 0; b < v.size(); ++b) {
    const int di = bit_of(b, dictator - 1, n);
    const int last = bit_of(b, n - 1, n);
    const int expect = sign < 0 ? 1 - di : di;
    if (last == expect) v(b) = amp;
  }
  return v;
}

inline ExactState product_zero(int n) {
  if (n < 1) throw ValidationError("product_zero: need n >= 1");
  ExactState v = ExactState::Constant(Eigen::Index(1) << n, SurdComplex::zero());
  v(0) = SurdComplex::one();
  return v;
}

/// State family selector with a canonical textual form (see parse).
struct StateSpec {
  enum class Family { Dicke, GHZ, Bell, FuncDep, Dictatorship, ProductZero, Explicit };

  Family family = Family::ProductZero;
  int n = 0;                 // Dicke/GHZ/ProductZero: qubit count; Dictatorship: party count
  int k = 0;                 // Dicke only
  int dictator = 0;          // Dictatorship only (1-based)
  int sign = +1;             // Bell / Dictatorship
  BooleanPolynomial poly;    // FuncDep only
  std::vector<std::complex<double>> amps;          // Explicit (float)
  std::optional<std::vector<SurdComplex>> exact_amps;  // Explicit, when representable

  int qubits() const {
    switch (family) {
      case Family::Dicke: case Family::GHZ: case Family::ProductZero: return n;
      case Family::Bell: return 2;
      case Family::FuncDep: return poly.n_vars() + 1;
      case Family::Dictatorship: return n;
      case Family::Explicit: return qubit_count_for_dim(Eigen::Index(amps.size()));
    }
    return 0;
  }

  bool exact_capable() const {
    return family != Family::Explicit || exact_amps.has_value();
  }

  std::string str() const {
    std::ostringstream os;
    switch (family) {
      case Family::Dicke: os << "dicke:" << n << "," << k; break;
      case Family::GHZ: os << "ghz:" << n; break;
      case Family::Bell: os << "bell:" << (sign < 0 ? "-" : "+"); break;
      case Family::FuncDep: os << "fd:" << poly.render() << "@" << poly.n_vars(); break;
      case Family::Dictatorship:
        os << "dict:" << n << "," << dictator << "," << (sign < 0 ? "-" : "+");
        break;
      case Family::ProductZero: os << "prod0:" << n; break;
      case Family::Explicit: {
        os << "explicit:";
        for (std::size_t i = 0; i < amps.size(); ++i) {
          if (i) os << ",";
          os << amps[i].real();
          if (amps[i].imag() != 0.0) os << (amps[i].imag() > 0 ? "+" : "") << amps[i].imag() << "i";
        }
        break;
      }
    }
    return os.str();
  }

  static StateSpec parse(const std::string& text);
};

inline ExactState build_exact(const StateSpec& spec) {
  switch (spec.family) {
    case StateSpec::Family::Dicke: return dicke(spec.n, spec.k);
    case StateSpec::Family::GHZ: return ghz(spec.n);
    case StateSpec::Family::Bell: return bell(spec.sign);
    case StateSpec::Family::FuncDep: return func_dep_state(spec.poly);
    case StateSpec::Family::Dictatorship:
      return dictatorship(spec.n, spec.dictator, spec.sign);
    case StateSpec::Family::ProductZero: return product_zero(spec.n);
    case StateSpec::Family::Explicit: {
      if (!spec.exact_amps)
        throw ValidationError("explicit state has no exact representation");
      ExactState v(Eigen::Index(spec.exact_amps->size()));
      for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = (*spec.exact_amps)[std::size_t(i)];
      return v;
    }
  }
  throw ValidationError("unknown state family");
}

inline FloatState build_float(const StateSpec& spec) {
  if (spec.family == StateSpec::Family::Explicit && !spec.exact_amps) {
    FloatState v(Eigen::Index(spec.amps.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = spec.amps[std::size_t(i)];
    return v;
  }
  return to_float(build_exact(spec));
}

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline int parse_int(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("expected an integer for " + what + ", got '" + s + "'");
  }
}

inline int parse_sign(const std::string& s) {
  if (s == "+") return +1;
  if (s == "-") return -1;
  throw ValidationError("expected '+' or '-', got '" + s + "'");
}

/// Accepts "p", "p/q", "p/sqrtN", decimals, each optionally suffixed with
/// 'i', plus one optional signed second part, e.g. "1/2+1/2i" or "-0.5i".
inline std::complex<double> parse_amp(const std::string& tok,
                                      std::optional<SurdComplex>& exact) {
  struct Part {
    double value = 0.0;
    bool imag = false;
    std::optional<SurdComplex> ex;
  };
  auto parse_part = [&](std::string body) -> Part {
    Part out;
    if (!body.empty() && (body.back() == 'i' || body.back() == 'I')) {
      out.imag = true;
      body.pop_back();
      if (body.empty() || body == "+") body = "1";
      else if (body == "-") body = "-1";
    }
    if (!body.empty() && body.front() == '+') body.erase(0, 1);
    if (auto pos = body.find("/sqrt"); pos != std::string::npos) {
      std::string nume = body.substr(0, pos);
      const Rational p = Rational::parse(nume.empty() ? "1" : nume);
      SurdComplex mag =
          SurdComplex(p, Rational(0)) * SurdComplex::inv_sqrt(BigInt(body.substr(pos + 5)));
      out.value = mag.to_complex().real();
      out.ex = out.imag ? mag * SurdComplex::i() : mag;
    } else if (body.find('.') == std::string::npos &&
               body.find('e') == std::string::npos &&
               body.find('E') == std::string::npos) {
      const Rational p = Rational::parse(body);
      out.value = p.to_double();
      out.ex = out.imag ? SurdComplex(Rational(0), p) : SurdComplex(p, Rational(0));
    } else {
      try {
        std::size_t used = 0;
        out.value = std::stod(body, &used);
        if (used != body.size()) throw std::invalid_argument(body);
      } catch (const std::exception&) {
        throw ValidationError("bad amplitude token '" + tok + "'");
      }
    }
    return out;
  };

  // Split into at most two signed parts (sign characters inside the token
  // body, not after 'e' exponents).
  std::vector<std::string> parts;
  std::string cur;
  for (std::size_t i = 0; i < tok.size(); ++i) {
    char c = tok[i];
    if ((c == '+' || c == '-') && i > 0 && tok[i - 1] != 'e' && tok[i - 1] != 'E' &&
        !cur.empty()) {
      parts.push_back(cur);
      cur.clear();
    }
    cur += c;
  }
  if (!cur.empty()) parts.push_back(cur);
  if (parts.empty() || parts.size() > 2)
    throw ValidationError("bad amplitude token '" + tok + "'");

  std::complex<double> total{0.0, 0.0};
  SurdComplex exact_total = SurdComplex::zero();
  bool all_exact = true;
  for (const auto& text : parts) {
    Part part = parse_part(text);
    total += part.imag ? std::complex<double>(0.0, part.value)
                       : std::complex<double>(part.value, 0.0);
    if (part.ex && all_exact) exact_total = exact_total + *part.ex;
    else all_exact = false;
  }
  exact = all_exact ? std::optional<SurdComplex>(exact_total) : std::nullopt;
  return total;
}

}  // namespace detail

inline StateSpec StateSpec::parse(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos)
    throw ValidationError("state spec needs the form family:args, got '" + text + "'");
  const std::string family = text.substr(0, colon);
  const std::string args = text.substr(colon + 1);
  StateSpec spec;
  if (family == "dicke") {
    auto parts = detail::split(args, ',');
    if (parts.size() != 2) throw ValidationError("dicke spec needs n,k");
    spec.family = Family::Dicke;
    spec.n = detail::parse_int(parts[0], "n");
    spec.k = detail::parse_int(parts[1], "k");
  } else if (family == "ghz") {
    spec.family = Family::GHZ;
    spec.n = detail::parse_int(args, "n");
  } else if (family == "bell") {
    spec.family = Family::Bell;
    spec.sign = detail::parse_sign(args);
  } else if (family == "fd") {
    spec.family = Family::FuncDep;
    auto at = args.rfind('@');
    if (at != std::string::npos) {
      int nv = detail::parse_int(args.substr(at + 1), "variable count");
      spec.poly = parse_poly(args.substr(0, at), nv);
      if (spec.poly.n_vars() != nv)
        throw ValidationError("polynomial mentions a variable beyond @" + std::to_string(nv));
    } else {
      spec.poly = parse_poly(args);
    }
  } else if (family == "dict") {
    auto parts = detail::split(args, ',');
    if (parts.size() != 3) throw ValidationError("dict spec needs n,i,sign");
    spec.family = Family::Dictatorship;
    spec.n = detail::parse_int(parts[0], "party count");
    spec.dictator = detail::parse_int(parts[1], "dictator index");
    spec.sign = detail::parse_sign(parts[2]);
  } else if (family == "prod0") {
    spec.family = Family::ProductZero;
    spec.n = detail::parse_int(args, "n");
  } else if (family == "explicit") {
    spec.family = Family::Explicit;
    auto parts = detail::split(args, ',');
    std::vector<SurdComplex> exact;
    bool all_exact = true;
    for (const auto& tok : parts) {
      std::optional<SurdComplex> ex;
      spec.amps.push_back(detail::parse_amp(tok, ex));
      if (ex && all_exact) exact.push_back(*ex);
      else all_exact = false;
    }
    if (spec.amps.empty() || (spec.amps.size() & (spec.amps.size() - 1)) != 0)
      throw ValidationError("explicit state needs a power-of-two amplitude count");
    if (all_exact) spec.exact_amps = std::move(exact);
    // Require unit norm (exactly, or to 1e-9 for float input).
    if (spec.exact_amps) {
      Rational norm(0);
      for (const auto& a : *spec.exact_amps) norm += a.squared_norm();
      if (norm != Rational(1))
        throw ValidationError("explicit state is not normalized (|psi|^2 = " + norm.str() + ")");
    } else {
      double norm = 0;
      for (auto a : spec.amps) norm += std::norm(a);
      if (std::abs(norm - 1.0) > 1e-9)
        throw ValidationError("explicit state is not normalized");
    }
  } else {
    throw ValidationError("unknown state family '" + family + "'");
  }
  return spec;
}

}  // namespace qctx
