#pragma once

#include "qctx/classify.hpp"
#include "qctx/dicke.hpp"
#include "qctx/states.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace qctx {

inline constexpr int kMaxGridParties = 6;
inline constexpr int kMaxSweepVars = 4;
inline constexpr int kSweepSampleCap = 256;

/// Named observable pairs used as per-family witnesses.
enum class Preset { XZ, YZ, XY, AB, CD };

inline const char* to_string(Preset p) {
  switch (p) {
    case Preset::XZ: return "X/Z";
    case Preset::YZ: return "Y/Z";
    case Preset::XY: return "X/Y";
    case Preset::AB: return "A/B";
    case Preset::CD: return "C/D";
  }
  return "?";
}

inline Scenario preset_scenario(Preset preset, int n) {
  using std::numbers::pi;
  switch (preset) {
    case Preset::XZ: return Scenario::uniform(n, Observable::x(), Observable::z());
    case Preset::YZ: return Scenario::uniform(n, Observable::y(), Observable::z());
    case Preset::XY: return Scenario::uniform(n, Observable::x(), Observable::y());
    case Preset::AB:
      return Scenario::uniform(n, Observable::bloch(pi / 2, pi / 8),
                               Observable::bloch(pi / 2, 5 * pi / 8), "A", "B");
    case Preset::CD:
      return Scenario::uniform(n, Observable::bloch(pi / 8, pi / 2),
                               Observable::bloch(5 * pi / 8, pi / 2), "C", "D");
  }
  throw ValidationError("unknown preset");
}

/// Family preset: Dicke states witness under X/Z, functionally dependent
/// states under Y/Z, GHZ under X/Y, and the Bell-pair families under the
/// A/B (plus pair) or C/D (minus pair) Bloch observables.
inline Preset preset_for(const StateSpec& spec) {
  switch (spec.family) {
    case StateSpec::Family::Dicke: return Preset::XZ;
    case StateSpec::Family::FuncDep: return Preset::YZ;
    case StateSpec::Family::GHZ: return Preset::XY;
    case StateSpec::Family::Bell:
    case StateSpec::Family::Dictatorship:
      return spec.sign < 0 ? Preset::CD : Preset::AB;
    default:
      throw ValidationError("no preset observables for state family '" + spec.str() + "'");
  }
}

/// Classifies `spec` under `scenario`, in exact arithmetic whenever the
/// state and every observable allow it.
inline ContextualityClass classify_state(const StateSpec& spec, const Scenario& scenario,
                                         LpPolicy policy = LpPolicy::Full) {
  if (spec.exact_capable() && scenario.all_observables_exact())
    return classify(build_model(build_exact(spec), scenario), policy);
  return classify(build_model(build_float(spec), scenario), policy);
}

struct WitnessReport {
  std::string state;
  Scenario scenario;
  ContextualityClass achieved;
  std::string method;
  bool lower_bound = false;  // lift results never claim a state-level maximum
};

inline WitnessReport preset_witness(const StateSpec& spec) {
  const Preset preset = preset_for(spec);
  WitnessReport report;
  report.state = spec.str();
  report.scenario = preset_scenario(preset, spec.qubits());
  report.achieved = classify_state(spec, report.scenario);
  report.method = std::string("preset ") + to_string(preset);
  return report;
}

enum class Objective { Strong, Logical, AnyContextual };

inline const char* to_string(Objective o) {
  switch (o) {
    case Objective::Strong: return "Strong";
    case Objective::Logical: return "Logical";
    case Objective::AnyContextual: return "AnyContextual";
  }
  return "?";
}

inline bool meets(Label label, Objective objective) {
  switch (objective) {
    case Objective::Strong: return label == Label::Strong;
    case Objective::Logical: return int(label) >= int(Label::Logical);
    case Objective::AnyContextual: return int(label) >= int(Label::Weak);
  }
  return false;
}

/// Deterministic sweep over Bloch observable pairs shared by all parties:
/// theta/phi run over a pi/resolution grid joined with the special values
/// {0, pi/8, pi/4, pi/2, 5pi/8, pi}. Returns the first witness reaching
/// the objective in lexicographic (theta0, phi0, theta1, phi1) order.
inline std::optional<WitnessReport> grid_search(const StateSpec& spec, int resolution,
                                                Objective objective) {
  using std::numbers::pi;
  if (resolution < 4)
    throw ValidationError("grid_search: resolution must divide pi into >= 4 steps");
  const int n = spec.qubits();
  if (n > kMaxGridParties)
    throw SizeBoundError("grid_search: more than " + std::to_string(kMaxGridParties) +
                         " parties");

  const std::vector<double> specials = {0.0, pi / 8, pi / 4, pi / 2, 5 * pi / 8, pi};
  auto with_specials = [&](std::vector<double> vals, double limit) {
    for (double s : specials)
      if (s <= limit + 1e-12) vals.push_back(s);
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-12; }),
               vals.end());
    return vals;
  };
  std::vector<double> thetas, phis;
  for (int j = 0; j <= resolution; ++j) thetas.push_back(pi * j / resolution);
  for (int j = 0; j < 2 * resolution; ++j) phis.push_back(pi * j / resolution);
  thetas = with_specials(std::move(thetas), pi);
  phis = with_specials(std::move(phis), 2 * pi - 1e-9);

  struct Angle {
    double theta, phi;
  };
  std::vector<Angle> observables;
  for (double t : thetas) {
    if (t < 1e-12 || t > pi - 1e-12) {
      observables.push_back({t, 0.0});  // poles: phi is a phase only
      continue;
    }
    for (double p : phis) observables.push_back({t, p});
  }

  const FloatState state = build_float(spec);
  const LpPolicy policy =
      objective == Objective::AnyContextual ? LpPolicy::Full : LpPolicy::Skip;
  for (std::size_t i = 0; i < observables.size(); ++i) {
    for (std::size_t j = i + 1; j < observables.size(); ++j) {
      const Scenario scenario =
          Scenario::uniform(n, Observable::bloch(observables[i].theta, observables[i].phi),
                            Observable::bloch(observables[j].theta, observables[j].phi));
      const ContextualityClass cls = classify(build_model(state, scenario), policy);
      if (meets(cls.label, objective)) {
        WitnessReport report;
        report.state = spec.str();
        report.scenario = scenario;
        report.achieved = cls;
        std::ostringstream method;
        method << "grid res=" << resolution << " uniform pairs, objective "
               << to_string(objective);
        report.method = method.str();
        return report;
      }
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Bell-basis machine check
// ---------------------------------------------------------------------------

/// The vanishing conditions on c = cos(t1/2), s = sin(t1/2), f = e^{i p1},
/// k = cos(t2/2), z = sin(t2/2), v = e^{i p2} under which entries of the
/// parametric Bell-pair tables can become zero. Each condition pins some
/// parameters to finitely many triggering values.
struct ConditionSet {
  enum Cond {
    CIsPole = 0,   // c in {0, +-1}
    KIsPole,       // k in {0, +-1}
    FOnAxis,       // f in {+-1, +-i}
    VOnAxis,       // v in {+-1, +-i}
    FInvV,         // f = +-1/v
    CEqS,          // c = +-s
    KEqZ,          // k = +-z
    CKvsSZ,        // ck = +-sz
    CZvsSK,        // cz = +-sk
    Count
  };

  static const char* name(int cond) {
    static const char* names[] = {"c in {0,±1}", "k in {0,±1}", "f in {±1,±i}",
                                  "v in {±1,±i}", "f=±1/v",     "c=±s",
                                  "k=±z",         "ck=±sz",     "cz=±sk"};
    return names[cond];
  }

  static bool holds(int cond, double t1, double p1, double t2, double p2,
                    double tol = 1e-9) {
    const double c = std::cos(t1 / 2), s = std::sin(t1 / 2);
    const double k = std::cos(t2 / 2), z = std::sin(t2 / 2);
    const std::complex<double> f = std::polar(1.0, p1), v = std::polar(1.0, p2);
    auto near = [&](double a, double b) { return std::abs(a - b) <= tol; };
    auto on_axis = [&](std::complex<double> w) {
      return std::abs(w.real()) <= tol || std::abs(w.imag()) <= tol;
    };
    switch (cond) {
      case CIsPole: return near(c, 0) || near(std::abs(c), 1);
      case KIsPole: return near(k, 0) || near(std::abs(k), 1);
      case FOnAxis: return on_axis(f);
      case VOnAxis: return on_axis(v);
      case FInvV:
        return std::abs(f - std::conj(v)) <= tol || std::abs(f + std::conj(v)) <= tol;
      case CEqS: return near(c, s) || near(c, -s);
      case KEqZ: return near(k, z) || near(k, -z);
      case CKvsSZ: return near(c * k, s * z) || near(c * k, -s * z);
      case CZvsSK: return near(c * z, s * k) || near(c * z, -s * k);
    }
    return false;
  }

  static std::uint32_t realized_mask(double t1, double p1, double t2, double p2,
                                     double tol = 1e-9) {
    std::uint32_t mask = 0;
    for (int cond = 0; cond < Count; ++cond)
      if (holds(cond, t1, p1, t2, p2, tol)) mask |= 1u << cond;
    return mask;
  }
};

/// Parametric two-party table of the plus Bell pair under U(t1,p1) and
/// U(t2,p2); rows AA, AB, BA, BB, columns ++, +-, -+, --.
inline Eigen::Matrix<double, 4, 4> parametric_plus_table(double t1, double p1, double t2,
                                                         double p2) {
  const double c = std::cos(t1 / 2), s = std::sin(t1 / 2);
  const double k = std::cos(t2 / 2), z = std::sin(t2 / 2);
  const std::complex<double> f2 = std::polar(1.0, 2 * p1);
  const std::complex<double> v2 = std::polar(1.0, 2 * p2);
  const std::complex<double> fv = std::polar(1.0, p1 + p2);
  auto sq = [](std::complex<double> w) { return std::norm(w) / 2.0; };
  Eigen::Matrix<double, 4, 4> m;
  m(0, 0) = sq(c * c + f2 * s * s);
  m(0, 1) = m(0, 2) = sq(c * s - f2 * c * s);
  m(0, 3) = sq(s * s + f2 * c * c);
  m(1, 0) = sq(c * k + fv * s * z);
  m(1, 1) = sq(c * z - fv * s * k);
  m(1, 2) = sq(s * k - fv * c * z);
  m(1, 3) = sq(s * z + fv * c * k);
  m(2, 0) = sq(c * k + fv * s * z);
  m(2, 1) = sq(s * k - fv * c * z);
  m(2, 2) = sq(c * z - fv * s * k);
  m(2, 3) = sq(s * z + fv * c * k);
  m(3, 0) = sq(k * k + v2 * z * z);
  m(3, 1) = m(3, 2) = sq(k * z - v2 * k * z);
  m(3, 3) = sq(z * z + v2 * k * k);
  return m;
}

/// Tabulated parameterization of the minus pair under the swapped-argument
/// observables U(p1,t1), U(p2,t2): the plus table with the angle roles
/// exchanged and the second party's outcome columns swapped.
inline Eigen::Matrix<double, 4, 4> parametric_minus_table(double t1, double p1, double t2,
                                                          double p2) {
  const Eigen::Matrix<double, 4, 4> plus = parametric_plus_table(p1, t1, p2, t2);
  Eigen::Matrix<double, 4, 4> m;
  for (int r = 0; r < 4; ++r)
    for (int col = 0; col < 4; ++col) m(r, col ^ 1) = plus(r, col);
  return m;
}

struct BellSubsetInfo {
  std::array<double, 4> example_tuple{};  // (t1, p1, t2, p2)
  long tuples = 0;
  SupportTable example_plus_support;
};

struct BellBasisReport {
  int resolution = 0;
  long tuples_checked = 0;
  long models_checked = 0;
  int logical_found = 0;
  std::map<std::uint32_t, BellSubsetInfo> subsets;
  std::vector<SupportTable> distinct_supports;
  long minus_param_vs_swapped_born_mismatches = 0;
  long minus_param_vs_direct_born_mismatches = 0;
  std::vector<std::string> notes;
};

namespace detail {

inline FloatModel model_from_table(const Eigen::Matrix<double, 4, 4>& table,
                                   const Scenario& scenario) {
  FloatModel model;
  model.scenario = scenario;
  model.probs = table;
  return model;
}

inline bool has_nonextendable_section(const SupportTable& table) {
  const auto consistent = consistent_assignments(table);
  if (consistent.empty()) return true;  // strong: every section fails to extend
  return !non_extendable_sections(table, consistent).empty();
}

inline std::string support_key(const SupportTable& table) {
  std::string key;
  for (Eigen::Index c = 0; c < table.cells.rows(); ++c)
    for (Eigen::Index o = 0; o < table.cells.cols(); ++o)
      key += table.cells(c, o) ? '1' : '0';
  return key;
}

}  // namespace detail

/// Sweeps every subset of the vanishing conditions via its triggering
/// parameter values (cross product of the per-condition special values,
/// plus `resolution` generic samples for free parameters), builds the
/// plus/minus pair models for each tuple, and checks that none of them is
/// logically contextual. Both minus-pair parameterizations (the tabulated
/// swapped-argument table and direct born evaluation) are exercised and
/// their disagreement is surfaced, not resolved.
inline BellBasisReport bell_basis_logical_search(int resolution = 4) {
  using std::numbers::pi;
  if (resolution < 1) throw ValidationError("bell_basis_logical_search: resolution >= 1");

  BellBasisReport report;
  report.resolution = resolution;

  std::vector<double> theta1 = {0.0, pi / 2, pi};
  std::vector<double> phi1 = {0.0, pi / 2, pi, 3 * pi / 2};
  for (int j = 0; j < resolution; ++j) {
    theta1.push_back(pi * (j + 0.37) / (resolution + 0.21));
    phi1.push_back(2 * pi * (j + 0.29) / (resolution + 0.13));
  }

  const Scenario scen_cd = preset_scenario(Preset::CD, 2);
  const FloatState plus_f = to_float(bell(+1));
  const FloatState minus_f = to_float(bell(-1));

  std::set<std::string> seen_supports;
  auto record_support = [&](const SupportTable& table) {
    if (seen_supports.insert(detail::support_key(table)).second)
      report.distinct_supports.push_back(table);
  };

  auto check_model = [&](const FloatModel& model) -> SupportTable {
    const SupportTable table = support(model);
    record_support(table);
    ++report.models_checked;
    if (detail::has_nonextendable_section(table)) ++report.logical_found;
    return table;
  };

  for (double t1 : theta1) {
    std::vector<double> theta2 = theta1;
    theta2.push_back(pi - t1);
    theta2.push_back(t1);
    for (double t2 : theta2) {
      if (t2 < -1e-12 || t2 > pi + 1e-12) continue;
      for (double p1 : phi1) {
        std::vector<double> phi2 = phi1;
        phi2.push_back(std::fmod(2 * pi - p1 + 2 * pi, 2 * pi));
        phi2.push_back(std::fmod(3 * pi - p1, 2 * pi));
        for (double p2 : phi2) {
          ++report.tuples_checked;
          const std::uint32_t mask = ConditionSet::realized_mask(t1, p1, t2, p2);

          // Plus pair: parametric table must agree with direct evaluation.
          Scenario scen_plus = Scenario::uniform(
              2, Observable::bloch(t1, p1), Observable::bloch(t2, p2), "A", "B");
          const FloatModel born_plus = build_model(plus_f, scen_plus);
          const Eigen::Matrix<double, 4, 4> param_plus =
              parametric_plus_table(t1, p1, t2, p2);
          for (int r = 0; r < 4; ++r)
            for (int col = 0; col < 4; ++col)
              if (std::abs(param_plus(r, col) - born_plus.probs(r, col)) > 1e-12)
                throw std::logic_error("parametric plus table disagrees with evaluation");
          const SupportTable plus_support = check_model(born_plus);

          // Minus pair, tabulated swapped-argument form.
          const FloatModel param_minus = detail::model_from_table(
              parametric_minus_table(t1, p1, t2, p2), scen_cd);
          const SupportTable minus_param_support = check_model(param_minus);

          // Minus pair, direct born evaluation under both argument orders.
          Scenario scen_minus_direct = Scenario::uniform(
              2, Observable::bloch(t1, p1), Observable::bloch(t2, p2), "C", "D");
          const SupportTable minus_direct_support =
              check_model(build_model(minus_f, scen_minus_direct));
          Scenario scen_minus_swapped = Scenario::uniform(
              2, Observable::bloch(p1, t1), Observable::bloch(p2, t2), "C", "D");
          const SupportTable minus_swapped_support =
              check_model(build_model(minus_f, scen_minus_swapped));

          if (!(minus_param_support.cells == minus_swapped_support.cells).all())
            ++report.minus_param_vs_swapped_born_mismatches;
          if (!(minus_param_support.cells == minus_direct_support.cells).all())
            ++report.minus_param_vs_direct_born_mismatches;

          auto& info = report.subsets[mask];
          if (info.tuples++ == 0) {
            info.example_tuple = {t1, p1, t2, p2};
            info.example_plus_support = plus_support;
          }
        }
      }
    }
  }

  {
    std::ostringstream note;
    note << "minus-pair parameterizations: tabulated form vs swapped-argument evaluation "
         << "differ on " << report.minus_param_vs_swapped_born_mismatches << "/"
         << report.tuples_checked << " tuples, vs direct evaluation on "
         << report.minus_param_vs_direct_born_mismatches << "/" << report.tuples_checked
         << " (discrepancy reported, not resolved)";
    report.notes.push_back(note.str());
  }
  return report;
}

// ---------------------------------------------------------------------------
// Family sweep
// ---------------------------------------------------------------------------

struct SweepRow {
  BooleanPolynomial poly;
  PredictedClass predicted;
  Label empirical_yz;
  std::optional<Label> preset_label;  // dictatorships under their A/B or C/D preset
  std::optional<Preset> preset_used;
  bool agree = false;
};

struct SweepResult {
  int n_vars = 0;
  bool sampled = false;
  std::vector<SweepRow> rows;

  bool all_agree() const {
    for (const auto& r : rows)
      if (!r.agree) return false;
    return true;
  }

  std::string csv() const {
    std::ostringstream os;
    os << "polynomial,predicted,empirical_yz,witness,agreement\n";
    for (const auto& r : rows) {
      os << r.poly.render() << "," << to_string(r.predicted) << ","
         << to_string(r.empirical_yz) << ",";
      if (r.preset_label)
        os << to_string(*r.preset_label) << "[" << to_string(*r.preset_used) << "]";
      os << "," << (r.agree ? "yes" : "no") << "\n";
    }
    return os.str();
  }
};

namespace detail {

inline BooleanPolynomial poly_from_index(int n_vars, std::uint64_t index) {
  std::vector<std::uint32_t> monos;
  for (std::uint32_t m = 0; m < (1u << n_vars); ++m)
    if (index & (std::uint64_t(1) << m)) monos.push_back(m);
  return BooleanPolynomial(n_vars, std::move(monos));
}

/// Sweep agreement: structural prediction vs what the models show. The
/// dictatorship family needs its Bloch preset to reveal Weak (Y/Z alone
/// leaves it NonContextual); AtLeastLogical may refine to Logical or
/// Strong but never below.
inline bool sweep_agrees(const SweepRow& row) {
  switch (row.predicted) {
    case PredictedClass::NonContextual:
      return row.empirical_yz == Label::NonContextual;
    case PredictedClass::Strong:
      return row.empirical_yz == Label::Strong;
    case PredictedClass::AtLeastLogical:
      return row.empirical_yz == Label::Logical || row.empirical_yz == Label::Strong;
    case PredictedClass::Weak:
      return row.empirical_yz == Label::NonContextual &&
             row.preset_label == Label::Weak;
  }
  return false;
}

}  // namespace detail

/// Classifies the functionally dependent state of every n_vars-variable
/// polynomial (sampled at n_vars = 4) under Y/Z, refines dictatorships
/// under their Bloch presets, and flags structural disagreements.
inline SweepResult family_sweep(int n_vars) {
  if (n_vars < 1 || n_vars > kMaxSweepVars)
    throw SizeBoundError("family_sweep: n_vars must be in [1, " +
                         std::to_string(kMaxSweepVars) + "]");
  const std::uint64_t total = std::uint64_t(1) << (std::uint64_t(1) << n_vars);

  std::vector<std::uint64_t> indices;
  if (total <= kSweepSampleCap) {
    for (std::uint64_t i = 0; i < total; ++i) indices.push_back(i);
  } else {
    // Always keep the structurally distinguished polynomials in the sample.
    std::set<std::uint64_t> chosen;
    chosen.insert(0);  // zero polynomial
    chosen.insert(1);  // constant 1
    for (int v = 0; v < n_vars; ++v) {
      const std::uint64_t dict = std::uint64_t(1) << (1u << v);
      chosen.insert(dict);
      chosen.insert(dict | 1);
    }
    chosen.insert((std::uint64_t(1) << 1) | (std::uint64_t(1) << 2));  // q1+q2
    std::mt19937_64 rng(0x5eed5eedULL);
    while (chosen.size() < kSweepSampleCap) chosen.insert(rng() % total);
    indices.assign(chosen.begin(), chosen.end());
  }

  SweepResult result;
  result.n_vars = n_vars;
  result.sampled = total > kSweepSampleCap;
  const Scenario yz = preset_scenario(Preset::YZ, n_vars + 1);
  for (std::uint64_t index : indices) {
    SweepRow row;
    row.poly = detail::poly_from_index(n_vars, index);
    row.predicted = predicted_class(row.poly);
    row.empirical_yz = classify(build_model(func_dep_state(row.poly), yz)).label;
    if (row.predicted == PredictedClass::Weak) {
      // Lone linear term: a dictatorship; witness with its Bloch preset.
      const std::uint32_t mono = row.poly.monomials().back();
      int dictator = 1;
      while (!(mono & (1u << (dictator - 1)))) ++dictator;
      StateSpec spec;
      spec.family = StateSpec::Family::Dictatorship;
      spec.n = n_vars + 1;
      spec.dictator = dictator;
      spec.sign = row.poly.constant_term() ? -1 : +1;
      const Preset preset = preset_for(spec);
      row.preset_used = preset;
      row.preset_label =
          classify_state(spec, preset_scenario(preset, spec.n)).label;
    }
    row.agree = detail::sweep_agrees(row);
    result.rows.push_back(std::move(row));
  }
  return result;
}

// ---------------------------------------------------------------------------
// State-level lifting
// ---------------------------------------------------------------------------

/// Best class found over the family preset, the generic presets, and an
/// optional grid search. A lower bound on the state-level class: absence
/// at this resolution proves nothing.
inline WitnessReport lift_state_class(const StateSpec& spec,
                                      std::optional<int> grid_resolution = std::nullopt) {
  std::vector<Preset> presets;
  try {
    presets.push_back(preset_for(spec));
  } catch (const ValidationError&) {
    // No family preset; the generic list still applies.
  }
  for (Preset p : {Preset::XZ, Preset::YZ, Preset::XY, Preset::AB, Preset::CD})
    if (std::find(presets.begin(), presets.end(), p) == presets.end()) presets.push_back(p);

  WitnessReport best;
  best.state = spec.str();
  best.lower_bound = true;
  bool have = false;
  for (Preset preset : presets) {
    const Scenario scenario = preset_scenario(preset, spec.qubits());
    const ContextualityClass cls = classify_state(spec, scenario);
    if (!have || int(cls.label) > int(best.achieved.label)) {
      best.scenario = scenario;
      best.achieved = cls;
      best.method = std::string("preset ") + to_string(preset);
      have = true;
    }
    if (best.achieved.label == Label::Strong) break;
  }

  if (grid_resolution && best.achieved.label != Label::Strong) {
    const Objective targets[] = {Objective::Strong, Objective::Logical,
                                 Objective::AnyContextual};
    for (Objective target : targets) {
      if (meets(best.achieved.label, target)) break;
      if (auto found = grid_search(spec, *grid_resolution, target)) {
        if (int(found->achieved.label) > int(best.achieved.label)) {
          best.scenario = found->scenario;
          best.achieved = found->achieved;
          best.method = found->method;
        }
        break;
      }
    }
  }
  best.method += " (lift: lower bound)";
  return best;
}

}  // namespace qctx
