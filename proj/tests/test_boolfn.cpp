#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qctx/boolfn.hpp"

#include <random>

using namespace qctx;

namespace {

BooleanPolynomial random_poly(int n_vars, std::mt19937_64& rng) {
  std::vector<std::uint32_t> monos;
  for (std::uint32_t m = 0; m < (1u << n_vars); ++m)
    if (rng() & 1) monos.push_back(m);
  return BooleanPolynomial(n_vars, std::move(monos));
}

bool tables_equal(const BooleanPolynomial& a, const BooleanPolynomial& b) {
  const int n = std::max(a.n_vars(), b.n_vars());
  for (std::uint32_t bits = 0; bits < (1u << n); ++bits)
    if (a.evaluate_packed(bits) != b.evaluate_packed(bits)) return false;
  return true;
}

}  // namespace

TEST_CASE("parsing") {
  const BooleanPolynomial x = parse_poly("q1+q2");
  CHECK(x.degree() == 1);
  CHECK(x.monomials() == std::vector<std::uint32_t>{1, 2});

  CHECK(parse_poly("1+q1+q1").render() == "1");
  CHECK(parse_poly("1+q1+q1").degree() == 0);

  CHECK(parse_poly("AND").monomials() == std::vector<std::uint32_t>{3});
  CHECK(parse_poly("OR") == parse_poly("q1+q2+q1*q2"));
  CHECK(parse_poly("IMP1") == parse_poly("1+q1+q1q2"));  // juxtaposition products
  CHECK(parse_poly(" q1 * q2 + 1 ") == parse_poly("NAND"));

  SUBCASE("errors carry a position") {
    try {
      parse_poly("q1+*q2");
      FAIL("expected a parse error");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("position 3") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_poly("q0+q1"), ValidationError);
    CHECK_THROWS_AS(parse_poly("q1+"), ValidationError);
    CHECK_THROWS_AS(parse_poly("q1 q 2"), ValidationError);
  }
}

TEST_CASE("evaluation") {
  const BooleanPolynomial orp = parse_poly("OR");
  CHECK(orp.evaluate({1, 1}) == 1);
  CHECK(orp.evaluate({0, 0}) == 0);
  CHECK(orp.evaluate({0, 1}) == 1);

  CHECK(parse_poly("q1+q2").evaluate({1, 0}) == 1);

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const BooleanPolynomial p = random_poly(3, rng);
    CHECK(p.evaluate({0, 0, 0}) == p.constant_term());
  }

  CHECK_THROWS_AS(parse_poly("q1+q2").evaluate({1}), ValidationError);
}

TEST_CASE("gf(2) ring laws via truth tables") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 60; ++trial) {
    const BooleanPolynomial a = random_poly(3, rng), b = random_poly(3, rng),
                            c = random_poly(3, rng);
    for (std::uint32_t bits = 0; bits < 8; ++bits) {
      CHECK((a + b).evaluate_packed(bits) == (a.evaluate_packed(bits) != b.evaluate_packed(bits)));
      CHECK((a * b).evaluate_packed(bits) == (a.evaluate_packed(bits) && b.evaluate_packed(bits)));
    }
    CHECK(tables_equal(a * (b + c), a * b + a * c));
    CHECK((a + a).is_zero());
  }
}

TEST_CASE("render round-trips canonically") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const BooleanPolynomial p = random_poly(4, rng);
    CHECK(parse_poly(p.render(), p.n_vars()) == p);
  }
  CHECK(parse_poly("q2*q1").render() == "q1*q2");
  CHECK(parse_poly("q1*q2+q3+1").render() == "1+q3+q1*q2");
}

TEST_CASE("xor pair form") {
  auto got = xor_pair_form(parse_poly("q1+q2"));
  REQUIRE(got.has_value());
  CHECK(std::get<0>(*got) == 1);
  CHECK(std::get<1>(*got) == 2);
  CHECK(std::get<2>(*got).is_zero());

  got = xor_pair_form(parse_poly("q1+q2+q3"));
  REQUIRE(got.has_value());
  CHECK(std::get<0>(*got) == 1);
  CHECK(std::get<1>(*got) == 2);  // smallest pair wins the tie
  CHECK(std::get<2>(*got) == parse_poly("q3", 3));

  CHECK(!xor_pair_form(parse_poly("q1+q1*q2")).has_value());
  CHECK(!xor_pair_form(parse_poly("q2")).has_value());

  // residual may keep a constant term
  got = xor_pair_form(parse_poly("1+q1+q2+q3*q4"));
  REQUIRE(got.has_value());
  CHECK(std::get<2>(*got) == parse_poly("1+q3*q4", 4));
}

TEST_CASE("quadratic slice") {
  auto parts = quadratic_slice(parse_poly("AND"), 1, 2);
  CHECK(parts[0].is_zero());
  CHECK(parts[1].is_zero());
  CHECK(parts[2].is_zero());
  CHECK(parts[3] == parse_poly("1", 2));

  // unique decomposition: q1 contributes to F2, q1*q2*q3 to F4
  parts = quadratic_slice(parse_poly("q1+q1*q2*q3"), 1, 2);
  CHECK(parts[0].is_zero());
  CHECK(parts[1] == parse_poly("1", 3));
  CHECK(parts[2].is_zero());
  CHECK(parts[3] == parse_poly("q3", 3));

  CHECK_THROWS_AS(quadratic_slice(parse_poly("q1"), 2, 2), ValidationError);

  SUBCASE("recomposition identity on random polynomials") {
    std::mt19937_64 rng(21);
    const BooleanPolynomial q1 = parse_poly("q1", 4), q2 = parse_poly("q2", 4);
    for (int trial = 0; trial < 100; ++trial) {
      const BooleanPolynomial p = random_poly(4, rng);
      const auto s = quadratic_slice(p, 1, 2);
      const BooleanPolynomial back = s[0] + q1 * s[1] + q2 * s[2] + q1 * q2 * s[3];
      CHECK(tables_equal(p, back));
    }
  }
}

TEST_CASE("predicted class") {
  CHECK(predicted_class(parse_poly("XOR")) == PredictedClass::Strong);
  CHECK(predicted_class(parse_poly("q2")) == PredictedClass::Weak);
  CHECK(predicted_class(parse_poly("AND")) == PredictedClass::AtLeastLogical);
  CHECK(predicted_class(parse_poly("1")) == PredictedClass::NonContextual);
  CHECK(predicted_class(parse_poly("0")) == PredictedClass::NonContextual);
  CHECK(predicted_class(parse_poly("q1+q2+q3")) == PredictedClass::Strong);
  CHECK(predicted_class(parse_poly("q1+q2+q1*q2")) == PredictedClass::AtLeastLogical);

  SUBCASE("flipping the constant never changes the class above degree 0") {
    std::mt19937_64 rng(31);
    const BooleanPolynomial one(3, {0});
    for (int trial = 0; trial < 100; ++trial) {
      BooleanPolynomial p = random_poly(3, rng);
      if (p.degree() == 0) continue;
      CHECK(predicted_class(p) == predicted_class(p + one));
    }
  }
}
