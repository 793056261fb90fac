// Acceptance suite: one criterion per function, each printing a single
// PASS/FAIL line. Run with no arguments for all criteria or with a list
// of criterion numbers.

#include "golden_tables.hpp"
#include "oracles.hpp"
#include "qctx/cli.hpp"
#include "qctx/serialize.hpp"
#include "qctx/witness.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace qctx;
using std::numbers::pi;

namespace {

struct Checker {
  std::ostringstream log;
  bool ok = true;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      log << "    failed: " << what << "\n";
    }
  }
};

ExactModel yz_model(const BooleanPolynomial& poly) {
  return build_model(func_dep_state(poly), preset_scenario(Preset::YZ, poly.n_vars() + 1));
}

ContextualityClass classify_checked(const ExactModel& model, Checker& c) {
  const ContextualityClass cls = classify(model);
  try {
    oracles::check_hierarchy(model, cls);
  } catch (const std::exception& e) {
    c.expect(false, std::string("hierarchy invariant: ") + e.what());
  }
  return cls;
}

ContextualityClass classify_checked(const FloatModel& model, Checker& c) {
  const ContextualityClass cls = classify(model);
  try {
    oracles::check_hierarchy(model, cls);
  } catch (const std::exception& e) {
    c.expect(false, std::string("hierarchy invariant: ") + e.what());
  }
  return cls;
}

// --------------------------------------------------------------------------

void criterion_1(Checker& c) {
  // Golden support grids for XOR, NXOR, AND, NAND under Y/Z, exact mode.
  const struct {
    const char* name;
    const std::vector<std::string>* grid;
  } cases[] = {{"XOR", &golden::kXorSupport},
               {"NXOR", &golden::kNxorSupport},
               {"AND", &golden::kAndSupport},
               {"NAND", &golden::kNandSupport}};
  for (const auto& [name, grid] : cases) {
    const ExactModel model = yz_model(parse_poly(name));
    const SupportTable sup = support(model);
    const auto expected = golden::grid_from_rows(*grid, 3);
    for (Eigen::Index r = 0; r < 8; ++r)
      for (Eigen::Index o = 0; o < 8; ++o)
        c.expect(sup.cells(r, o) == expected(r, o),
                 std::string(name) + " cell mismatch at context " + std::to_string(r) +
                     ", outcome " + std::to_string(o));
  }
}

void criterion_2(Checker& c) {
  // The seven golden relabelings map the AND support onto each target.
  const SupportTable and_sup = support(yz_model(parse_poly("AND")));
  const struct {
    const char* target;
    const char* image;
  } cases[] = {{"NAND", "++-"}, {"OR", "---"},   {"NOR", "--+"}, {"IMP1", "+--"},
               {"NIMP1", "+-+"}, {"IMP2", "-+-"}, {"NIMP2", "-++"}};
  for (const auto& [target, image] : cases) {
    const SupportTable moved = relabel(and_sup, Relabeling::from_image_of_plus(image));
    const SupportTable direct = support(yz_model(parse_poly(target)));
    c.expect(moved == direct, std::string("relabel +++ -> ") + image + " != " + target);
  }
}

void criterion_3(Checker& c) {
  // All sixteen two-variable polynomials, classified per family.
  int strong = 0, logical = 0, weak = 0, noncontextual = 0;
  for (std::uint64_t index = 0; index < 16; ++index) {
    std::vector<std::uint32_t> monos;
    for (std::uint32_t m = 0; m < 4; ++m)
      if (index & (1u << m)) monos.push_back(m);
    const BooleanPolynomial poly(2, monos);
    const ContextualityClass yz = classify_checked(yz_model(poly), c);

    if (poly.degree() == 0) {
      ++noncontextual;
      c.expect(yz.label == Label::NonContextual, poly.render() + " should be NonContextual");
    } else if (xor_pair_form(poly)) {
      ++strong;
      c.expect(yz.label == Label::Strong, poly.render() + " should be Strong");
    } else if (poly.degree() == 2) {
      ++logical;
      c.expect(yz.label == Label::Logical, poly.render() + " should be Logical");
      c.expect(yz.consistent_count >= 1, poly.render() + " needs a consistent assignment");
    } else {
      ++weak;
      const std::uint32_t mono = poly.monomials().back();
      StateSpec spec;
      spec.family = StateSpec::Family::Dictatorship;
      spec.n = 3;
      spec.dictator = mono == 1 ? 1 : 2;
      spec.sign = poly.constant_term() ? -1 : +1;
      const FloatModel preset_model = build_model(
          build_float(spec), preset_scenario(preset_for(spec), 3));
      const ContextualityClass cls = classify_checked(preset_model, c);
      c.expect(cls.label == Label::Weak, poly.render() + " should be Weak under its preset");
      c.expect(cls.lp_status == LpStatus::Infeasible,
               poly.render() + " preset LP should be infeasible");
      c.expect(yz.label == Label::NonContextual,
               poly.render() + " under Y/Z alone should be NonContextual");
    }
  }
  // the all-plus assignment is consistent for AND
  const auto and_consistent = consistent_assignments(support(yz_model(parse_poly("AND"))));
  c.expect(std::find(and_consistent.begin(), and_consistent.end(), GlobalAssignment(0)) !=
               and_consistent.end(),
           "all-plus assignment must be consistent with the AND support");
  c.expect(noncontextual == 2 && strong == 2 && logical == 8 && weak == 4,
           "family counts should be 2/2/8/4");
}

void criterion_4(Checker& c) {
  for (int n = 3; n <= 6; ++n) {
    for (int k = 1; k < n; ++k) {
      DickeCertificate cert;
      try {
        cert = dicke_certificate(n, k);
      } catch (const std::exception& e) {
        c.expect(false, "certificate threw for (" + std::to_string(n) + "," +
                            std::to_string(k) + "): " + e.what());
        continue;
      }
      c.expect(cert.ok(), "certificate checks failed for (" + std::to_string(n) + "," +
                              std::to_string(k) + ")");
      const Rational expected_mass(binomial(n, k), pow2(n - 1));
      c.expect(cert.all_equal_mass == expected_mass, "all-equal mass mismatch");
      c.expect(cert.violation == Rational(1) - expected_mass, "violation mismatch");
      if (n <= 5) {
        const auto cls = classify_checked(
            build_model(dicke(n, k), preset_scenario(Preset::XZ, n)), c);
        c.expect(cls.label == Label::Logical,
                 "full enumeration should give Logical for (" + std::to_string(n) + "," +
                     std::to_string(k) + ")");
      }
    }
  }
  c.expect(dicke_certificate(3, 2).violation == Rational(BigInt(1), BigInt(4)),
           "(3,2) violation should be 1/4");
  c.expect(dicke_certificate(4, 1).violation == Rational(BigInt(1), BigInt(2)),
           "(4,1) violation should be 1/2");
  try {
    dicke_certificate(2, 1);
    c.expect(false, "(2,1) must be rejected");
  } catch (const ValidationError& e) {
    c.expect(std::string(e.what()).find("strictness") != std::string::npos,
             "(2,1) rejection must cite strictness");
  }
}

void criterion_5(Checker& c) {
  const FloatModel model = build_model(to_float(bell(+1)), preset_scenario(Preset::AB, 2));
  const double hi = (2 + std::sqrt(2.0)) / 8, lo = (2 - std::sqrt(2.0)) / 8;
  for (Eigen::Index ctx = 0; ctx < 4; ++ctx)
    for (Eigen::Index o = 0; o < 4; ++o) {
      const double p = model.probs(ctx, o);
      c.expect(std::min(std::abs(p - hi), std::abs(p - lo)) <= 1e-9,
               "probability not in {(2+sqrt2)/8, (2-sqrt2)/8}");
    }

  std::ostringstream out, err;
  const int code = qctx::cli::run({"table", "--state", "bell:+", "--obs",
                                   "U(pi/2,pi/8)/U(pi/2,5pi/8)", "--dp", "2"},
                                  out, err);
  c.expect(code == 0, "table command failed");
  std::istringstream lines(out.str());
  std::string line;
  std::getline(lines, line);  // header
  while (std::getline(lines, line)) {
    std::istringstream cells(line);
    std::string tok;
    cells >> tok;  // row label
    while (cells >> tok)
      c.expect(tok == "0.43" || tok == "0.07", "cell '" + tok + "' not 0.43/0.07");
  }

  const auto lp = lp_noncontextual(model);
  c.expect(lp.status == LpStatus::Infeasible, "LP should be infeasible");
  c.expect(lp.violation > 1e-3, "dual violation should exceed 1e-3");
}

void criterion_6(Checker& c) {
  const BellBasisReport report = bell_basis_logical_search(4);
  c.expect(report.logical_found == 0, "a logically contextual support was found");
  c.expect(report.subsets.size() >= 16, "too few condition subsets realized");
  for (const SupportTable& table : report.distinct_supports)
    c.expect(oracles::brute_force_logically_contextual(table) == false,
             "brute force disagrees on an encountered support");
}

void criterion_7(Checker& c) {
  const auto ghz_cls =
      classify_checked(build_model(ghz(3), preset_scenario(Preset::XY, 3)), c);
  c.expect(ghz_cls.label == Label::Strong, "GHZ(3) under X/Y should be Strong");
  const auto pr_cls = classify_checked(pr_box(), c);
  c.expect(pr_cls.label == Label::Strong, "the PR box should be Strong");
}

void criterion_8(Checker& c) {
  const SweepResult result = family_sweep(3);
  c.expect(result.rows.size() == 256, "expected all 256 polynomials");
  for (const auto& row : result.rows) {
    c.expect(row.agree, "sweep disagreement for " + row.poly.render());
    switch (row.predicted) {
      case PredictedClass::NonContextual:
        c.expect(row.empirical_yz == Label::NonContextual,
                 row.poly.render() + ": constant should stay NonContextual");
        break;
      case PredictedClass::Strong:
        c.expect(row.empirical_yz == Label::Strong,
                 row.poly.render() + ": xor-pair form should classify Strong");
        break;
      case PredictedClass::AtLeastLogical:
        c.expect(row.empirical_yz == Label::Logical || row.empirical_yz == Label::Strong,
                 row.poly.render() + ": refinement fell below Logical");
        break;
      case PredictedClass::Weak:
        c.expect(row.preset_label == Label::Weak,
                 row.poly.render() + ": dictatorship preset should show Weak");
        break;
    }
  }
}

void criterion_9(Checker& c) {
  std::mt19937_64 rng(0xacce97a9ce);
  std::uniform_real_distribution<double> uni(0.0, 1.0);

  // no-signalling on 200 random draws
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + int(rng() % 3);
    FloatState state(Eigen::Index(1) << n);
    for (Eigen::Index i = 0; i < state.size(); ++i)
      state(i) = {uni(rng) - 0.5, uni(rng) - 0.5};
    state /= std::sqrt(squared_norm(state));
    Scenario scenario;
    for (int p = 0; p < n; ++p) {
      Scenario::Party party;
      party.labels = {"A", "B"};
      party.observables = {Observable::bloch(uni(rng) * pi, uni(rng) * 2 * pi),
                           Observable::bloch(uni(rng) * pi, uni(rng) * 2 * pi)};
      scenario.parties.push_back(party);
    }
    const double defect = no_signalling_defect(build_model(state, scenario));
    c.expect(defect <= 1e-9, "no-signalling defect " + std::to_string(defect));
    if (!c.ok) return;
  }

  // local-unitary covariance on 100 random draws
  auto random_su2 = [&]() {
    double q[4];
    double norm = 0;
    for (double& x : q) {
      x = uni(rng) * 2 - 1;
      norm += x * x;
    }
    norm = std::sqrt(norm);
    for (double& x : q) x /= norm;
    Matrix2<std::complex<double>> u;
    u(0, 0) = {q[0], q[1]};
    u(0, 1) = {q[2], q[3]};
    u(1, 0) = {-q[2], q[3]};
    u(1, 1) = {q[0], -q[1]};
    return u;
  };
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + int(rng() % 2);
    FloatState state(Eigen::Index(1) << n);
    for (Eigen::Index i = 0; i < state.size(); ++i)
      state(i) = {uni(rng) - 0.5, uni(rng) - 0.5};
    state /= std::sqrt(squared_norm(state));

    Scenario scenario;
    std::vector<Matrix2<std::complex<double>>> unitaries;
    for (int p = 0; p < n; ++p) {
      Scenario::Party party;
      party.labels = {"A", "B"};
      party.observables = {Observable::bloch(uni(rng) * pi, uni(rng) * 2 * pi),
                           Observable::bloch(uni(rng) * pi, uni(rng) * 2 * pi)};
      scenario.parties.push_back(party);
      unitaries.push_back(random_su2());
    }
    const FloatModel before = build_model(state, scenario);
    const FloatState moved = apply_local_unitaries(state, unitaries);
    for (Eigen::Index ctx = 0; ctx < before.probs.rows(); ++ctx) {
      std::vector<Matrix2<std::complex<double>>> bases;
      for (int p = 0; p < n; ++p) {
        const auto& obs =
            *scenario.parties[std::size_t(p)].observables[std::size_t(setting_of(ctx, p, n))];
        bases.push_back(unitaries[std::size_t(p)] *
                        eigenbasis<std::complex<double>>(obs));
      }
      for (Eigen::Index o = 0; o < before.probs.cols(); ++o) {
        const double moved_p = born_probability(moved, bases, o);
        c.expect(std::abs(moved_p - before.probs(ctx, o)) <= 1e-9,
                 "covariance violated");
      }
    }
    if (!c.ok) return;
  }

  // LP vertex-oracle equivalence on the rational mixture grid
  const Rational quarter(BigInt(1), BigInt(4));
  for (int li = 0; li <= 4; ++li) {
    for (int mi = 0; li + mi <= 4; ++mi) {
      ExactModel model = pr_box();
      const Rational lambda = Rational(li) * quarter, mu = Rational(mi) * quarter;
      const Rational rest = Rational(1) - lambda - mu;
      for (Eigen::Index ctx = 0; ctx < 4; ++ctx)
        for (Eigen::Index o = 0; o < 4; ++o)
          model.probs(ctx, o) = lambda * model.probs(ctx, o) +
                                (o == 0 ? mu : Rational(0)) + rest * quarter;
      const bool facet_local = oracles::chsh_local(model);
      const auto decomposition = oracles::vertex_decomposition(model);
      const auto lp = lp_noncontextual(model);
      c.expect(decomposition.has_value() == facet_local, "vertex oracle vs facet oracle");
      c.expect((lp.status == LpStatus::Feasible) == facet_local, "lp vs oracles");
      if (decomposition)
        c.expect(oracles::decomposition_reproduces(model, *decomposition),
                 "decomposition does not reproduce the model");
    }
  }

  // hierarchy monotonicity on models from every family used in this run
  for (const char* poly : {"XOR", "NXOR", "AND", "NAND", "OR", "NOR", "IMP1", "IMP2",
                           "NIMP1", "NIMP2", "DICT1", "DICT2", "0", "1"})
    classify_checked(yz_model(parse_poly(poly)), c);
  classify_checked(build_model(dicke(3, 2), preset_scenario(Preset::XZ, 3)), c);
  classify_checked(build_model(ghz(3), preset_scenario(Preset::XY, 3)), c);
  classify_checked(pr_box(), c);
  classify_checked(
      build_model(to_float(dictatorship(3, 1, -1)), preset_scenario(Preset::CD, 3)), c);
}

struct Criterion {
  int number;
  const char* title;
  std::function<void(Checker&)> run;
  double budget_seconds;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "golden Y/Z support grids (XOR, NXOR, AND, NAND)", criterion_1, 1.0},
      {2, "relabelings of the AND support", criterion_2, 10.0},
      {3, "three-party family classification", criterion_3, 10.0},
      {4, "Dicke certificates and classification", criterion_4, 60.0},
      {5, "plus pair under the pi/8 observables", criterion_5, 10.0},
      {6, "Bell-basis condition-subset search", criterion_6, 300.0},
      {7, "GHZ and PR box strong contextuality", criterion_7, 10.0},
      {8, "three-variable sweep (256 polynomials)", criterion_8, 300.0},
      {9, "property suites", criterion_9, 300.0},
  };

  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));

  bool all_ok = true;
  for (const auto& criterion : criteria) {
    if (!wanted.empty() &&
        std::find(wanted.begin(), wanted.end(), criterion.number) == wanted.end())
      continue;
    Checker checker;
    const auto start = std::chrono::steady_clock::now();
    try {
      criterion.run(checker);
    } catch (const std::exception& e) {
      checker.expect(false, std::string("exception: ") + e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    checker.expect(seconds < criterion.budget_seconds,
                   "runtime " + std::to_string(seconds) + "s exceeds " +
                       std::to_string(criterion.budget_seconds) + "s");
    std::cout << (checker.ok ? "PASS" : "FAIL") << " criterion " << criterion.number << ": "
              << criterion.title << " [" << std::fixed << std::setprecision(2) << seconds
              << "s]\n"
              << checker.log.str();
    std::cout.unsetf(std::ios::fixed);
    all_ok = all_ok && checker.ok;
  }
  return all_ok ? 0 : 1;
}
