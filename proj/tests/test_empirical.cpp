#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "golden_tables.hpp"
#include "qctx/serialize.hpp"
#include "qctx/states.hpp"
#include "qctx/witness.hpp"

#include <cmath>
#include <random>

using namespace qctx;
using std::numbers::pi;

namespace {

ExactModel yz_model(const char* poly) {
  return build_model(func_dep_state(parse_poly(poly)), preset_scenario(Preset::YZ, 3));
}

}  // namespace

TEST_CASE("XOR model under Y/Z matches the golden support grid") {
  const ExactModel model = yz_model("XOR");
  const SupportTable sup = support(model);
  CHECK((sup.cells == golden::grid_from_rows(golden::kXorSupport, 3)).all());

  SUBCASE("row ZZZ carries 1/4 on each supported outcome") {
    const Eigen::Index zzz = 7;
    for (Eigen::Index o = 0; o < 8; ++o) {
      const bool in = sup.cells(zzz, o);
      CHECK(model.probs(zzz, o) == (in ? Rational(BigInt(1), BigInt(4)) : Rational(0)));
    }
  }
  SUBCASE("row YYY is uniform") {
    for (Eigen::Index o = 0; o < 8; ++o)
      CHECK(model.probs(0, o) == Rational(BigInt(1), BigInt(8)));
  }
}

TEST_CASE("point distribution for |000> under all-Z") {
  const ExactModel model =
      build_model(product_zero(3), Scenario::uniform(3, Observable::z(), Observable::x(),
                                                     "Z", "X"));
  CHECK(model.probs(0, 0) == Rational(1));  // all-Z context, all-plus outcome
  for (Eigen::Index o = 1; o < 8; ++o) CHECK(model.probs(0, o) == Rational(0));
}

TEST_CASE("plus pair under the pi/8 pair: two values only") {
  const FloatModel model = build_model(to_float(bell(+1)), preset_scenario(Preset::AB, 2));
  const double hi = (2 + std::sqrt(2.0)) / 8, lo = (2 - std::sqrt(2.0)) / 8;
  for (Eigen::Index c = 0; c < 4; ++c)
    for (Eigen::Index o = 0; o < 4; ++o) {
      const double p = model.probs(c, o);
      CHECK(std::min(std::abs(p - hi), std::abs(p - lo)) < 1e-9);
    }
  // row AA correlates, the rest anticorrelate
  CHECK(model.probs(0, 0) == doctest::Approx(hi));
  CHECK(model.probs(1, 0) == doctest::Approx(lo));
}

TEST_CASE("support extraction thresholds") {
  FloatModel model;
  model.scenario = Scenario::uniform(1, Observable::z(), Observable::x());
  model.probs.resize(2, 2);
  model.probs << 1.0 - 5e-11, 5e-11, 0.5, 0.5;
  const SupportTable sup = support(model);
  CHECK(sup.cells(0, 0));
  CHECK(!sup.cells(0, 1));  // below the 1e-10 zero threshold
  CHECK(sup.cells(1, 0));
}

TEST_CASE("relabelings") {
  const SupportTable and_sup = support(yz_model("AND"));

  SUBCASE("AND -> NAND by flipping the third party") {
    const SupportTable nand_sup = support(yz_model("NAND"));
    CHECK(relabel(and_sup, Relabeling::from_image_of_plus("++-")) == nand_sup);
  }
  SUBCASE("AND -> OR by flipping every party") {
    const SupportTable or_sup = support(yz_model("OR"));
    CHECK(relabel(and_sup, Relabeling::from_image_of_plus("---")) == or_sup);
  }
  SUBCASE("identity and involution") {
    CHECK(relabel(and_sup, Relabeling::from_image_of_plus("+++")) == and_sup);
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 10; ++trial) {
      Relabeling r;
      for (int p = 0; p < 3; ++p) r.flip.push_back(rng() & 1);
      CHECK(relabel(relabel(and_sup, r), r) == and_sup);
      CHECK(r.compose(r).apply(5) == 5);
    }
  }
  SUBCASE("probabilities ride along") {
    const ExactModel and_model = yz_model("AND");
    const ExactModel moved = relabel(and_model, Relabeling::from_image_of_plus("++-"));
    CHECK(moved.probs == yz_model("NAND").probs);
  }
}

TEST_CASE("pr box") {
  const ExactModel box = pr_box();
  const SupportTable sup = support(box);
  CHECK(sup.outcomes_of(0) == std::vector<int>{0, 3});  // context (0,0): ++, --
  CHECK(sup.outcomes_of(3) == std::vector<int>{1, 2});  // context (1,1): +-, -+
  CHECK(no_signalling_defect(box) == Rational(0));
  CHECK(classify(box).label == Label::Strong);
}

TEST_CASE("serialization round-trips") {
  const ExactModel model = yz_model("XOR");
  const std::string text = serialize(model);
  const AnyModel back = deserialize(text);
  REQUIRE(std::holds_alternative<ExactModel>(back));
  CHECK(std::get<ExactModel>(back).probs == model.probs);
  CHECK(serialize(std::get<ExactModel>(back)) == text);  // byte-stable

  SUBCASE("float models round-trip to 1e-15") {
    const FloatModel fm = build_model(to_float(bell(+1)), preset_scenario(Preset::AB, 2));
    const AnyModel fback = deserialize(serialize(fm));
    REQUIRE(std::holds_alternative<FloatModel>(fback));
    const FloatModel& f2 = std::get<FloatModel>(fback);
    for (Eigen::Index c = 0; c < 4; ++c)
      for (Eigen::Index o = 0; o < 4; ++o)
        CHECK(std::abs(f2.probs(c, o) - fm.probs(c, o)) < 1e-15);
  }

  SUBCASE("a row that does not sum to 1 is rejected") {
    std::string bad = text;
    const auto pos = bad.find("\"1/8\"");
    REQUIRE(pos != std::string::npos);
    bad.replace(pos, 5, "\"1/4\"");
    CHECK_THROWS_WITH_AS(deserialize(bad) /* unused */,
                         doctest::Contains("does not sum to 1"), ValidationError);
  }
  SUBCASE("malformed JSON reports a location") {
    CHECK_THROWS_AS(deserialize("{\"scenario\": oops"), ValidationError);
  }
}

TEST_CASE("no-signalling on random states and observables") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + int(rng() % 3);
    FloatState state(Eigen::Index(1) << n);
    for (Eigen::Index i = 0; i < state.size(); ++i) state(i) = {uni(rng) - .5, uni(rng) - .5};
    state /= std::sqrt(squared_norm(state));
    Scenario scenario;
    for (int p = 0; p < n; ++p) {
      Scenario::Party party;
      party.labels = {"A", "B"};
      party.observables = {Observable::bloch(uni(rng) * pi, uni(rng) * 2 * pi),
                           Observable::bloch(uni(rng) * pi, uni(rng) * 2 * pi)};
      scenario.parties.push_back(party);
    }
    CHECK(no_signalling_defect(build_model(state, scenario)) < 1e-9);
  }
}

TEST_CASE("generic Bloch bases see a full support") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> uni(0.05, 0.95);
  for (int trial = 0; trial < 10; ++trial) {
    FloatState state(8);
    for (Eigen::Index i = 0; i < 8; ++i) state(i) = {uni(rng), uni(rng)};
    state /= std::sqrt(squared_norm(state));
    const Scenario scenario = Scenario::uniform(
        3, Observable::bloch(uni(rng) * 2, uni(rng) * 5),
        Observable::bloch(1 + uni(rng), 2 + uni(rng)), "A", "B");
    CHECK(support(build_model(state, scenario)).cells.all());
  }
}

TEST_CASE("dyadic states under X/Y/Z give power-of-two denominators") {
  for (const ExactState& state : {ghz(3), func_dep_state(parse_poly("AND"))}) {
    const ExactModel model =
        build_model(state, Scenario::uniform(3, Observable::x(), Observable::y(), "X", "Y"));
    for (Eigen::Index c = 0; c < model.probs.rows(); ++c)
      for (Eigen::Index o = 0; o < model.probs.cols(); ++o) {
        BigInt d = model.probs(c, o).den();
        while (d % 2 == 0) d /= 2;
        CHECK(d == 1);
      }
  }
}

TEST_CASE("model construction is deterministic bit for bit") {
  const ExactModel a = yz_model("NXOR"), b = yz_model("NXOR");
  CHECK(a.probs == b.probs);
  CHECK(serialize(a) == serialize(b));
}

TEST_CASE("scenario validation") {
  CHECK_THROWS_AS(Scenario::uniform(2, Observable::z(), Observable::z()), ValidationError);
  CHECK_THROWS_AS(build_model(ghz(3), preset_scenario(Preset::YZ, 2)), ValidationError);
}
