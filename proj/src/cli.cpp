#include "qctx/cli.hpp"

#include "qctx/serialize.hpp"
#include "qctx/witness.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

namespace qctx::cli {

namespace {

// --------------------------------------------------------------------------
// Argument parsing helpers
// --------------------------------------------------------------------------

std::vector<std::string> split_top_level(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : text) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == sep && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  std::size_t b = s.find_last_not_of(" \t");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

/// Radians: a decimal literal or a pi fraction ("pi", "pi/8", "5pi/8",
/// "5*pi/8", "-pi/2").
double parse_angle(std::string text) {
  text = trim(text);
  if (text.empty()) throw ValidationError("empty angle");
  auto pi_pos = text.find("pi");
  if (pi_pos == std::string::npos) {
    try {
      std::size_t used = 0;
      double v = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return v;
    } catch (const std::exception&) {
      throw ValidationError("bad angle '" + text + "'");
    }
  }
  std::string coef = trim(text.substr(0, pi_pos));
  if (!coef.empty() && coef.back() == '*') coef.pop_back();
  double c = 1.0;
  if (coef == "-") c = -1.0;
  else if (!coef.empty()) {
    try {
      c = std::stod(coef);
    } catch (const std::exception&) {
      throw ValidationError("bad angle '" + text + "'");
    }
  }
  std::string rest = trim(text.substr(pi_pos + 2));
  double denom = 1.0;
  if (!rest.empty()) {
    if (rest.front() != '/') throw ValidationError("bad angle '" + text + "'");
    try {
      denom = std::stod(rest.substr(1));
    } catch (const std::exception&) {
      throw ValidationError("bad angle '" + text + "'");
    }
    if (denom == 0.0) throw ValidationError("bad angle '" + text + "'");
  }
  return c * std::numbers::pi / denom;
}

Observable parse_observable(std::string text) {
  text = trim(text);
  if (text == "X" || text == "x") return Observable::x();
  if (text == "Y" || text == "y") return Observable::y();
  if (text == "Z" || text == "z") return Observable::z();
  if ((text.size() > 3) && (text[0] == 'U' || text[0] == 'u') && text[1] == '(' &&
      text.back() == ')') {
    auto inner = text.substr(2, text.size() - 3);
    auto parts = split_top_level(inner, ',');
    if (parts.size() != 2) throw ValidationError("observable '" + text + "' needs U(theta,phi)");
    return Observable::bloch(parse_angle(parts[0]), parse_angle(parts[1]));
  }
  throw ValidationError("unknown observable '" + text + "' (use X, Y, Z or U(theta,phi))");
}

/// "--obs Y/Z,Y/Z,Y/Z" (or a single pair broadcast to every party).
Scenario parse_scenario(const std::string& text, int n_parties) {
  auto party_tokens = split_top_level(text, ',');
  if (party_tokens.size() == 1 && n_parties > 1)
    party_tokens.assign(std::size_t(n_parties), party_tokens[0]);
  if (int(party_tokens.size()) != n_parties)
    throw ValidationError("state has " + std::to_string(n_parties) + " parties but --obs lists " +
                          std::to_string(party_tokens.size()));
  Scenario scenario;
  for (const auto& tok : party_tokens) {
    auto settings = split_top_level(tok, '/');
    if (settings.size() != 2)
      throw ValidationError("party spec '" + tok + "' needs two settings separated by '/'");
    Scenario::Party party;
    for (int s = 0; s < 2; ++s) {
      const Observable obs = parse_observable(settings[std::size_t(s)]);
      party.observables[std::size_t(s)] = obs;
      party.labels[std::size_t(s)] = obs.exact() ? obs.str() : std::string(1, char('A' + s));
    }
    if (party.labels[0] == party.labels[1])
      throw ValidationError("party '" + tok + "' repeats one setting");
    scenario.parties.push_back(std::move(party));
  }
  scenario.validate();
  return scenario;
}

// --------------------------------------------------------------------------
// Rendering
// --------------------------------------------------------------------------

struct TableOptions {
  bool support = false;
  std::string format = "text";
  int dp = -1;  // decimals for float probabilities; -1 = shortest form
};

std::string float_cell(double v, int dp) {
  char buf[48];
  if (dp >= 0) std::snprintf(buf, sizeof(buf), "%.*f", dp, v);
  else std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

template <typename P>
std::vector<std::vector<std::string>> table_cells(const EmpiricalModel<P>& model,
                                                  const TableOptions& opt) {
  std::vector<std::vector<std::string>> cells;
  const SupportTable sup = opt.support ? support(model) : SupportTable{};
  for (Eigen::Index c : display_order(model.n())) {
    std::vector<std::string> row;
    row.push_back(context_label(model.scenario, c));
    for (Eigen::Index o = 0; o < model.probs.cols(); ++o) {
      if (opt.support) {
        row.push_back(sup.cells(c, o) ? "1" : "0");
      } else if constexpr (std::is_same_v<P, Rational>) {
        row.push_back(model.probs(c, o).str());
      } else {
        row.push_back(float_cell(model.probs(c, o), opt.dp));
      }
    }
    cells.push_back(std::move(row));
  }
  return cells;
}

template <typename P>
void print_table(const EmpiricalModel<P>& model, const TableOptions& opt, std::ostream& out) {
  const int n = model.n();
  if (opt.format == "json") {
    if (opt.support) {
      const SupportTable sup = support(model);
      Json j;
      j["scenario"] = detail::scenario_to_json(model.scenario);
      Json rows = Json::array();
      for (Eigen::Index c : display_order(n)) {
        Json row;
        row["context"] = context_label(model.scenario, c);
        Json vals = Json::array();
        for (Eigen::Index o = 0; o < sup.cells.cols(); ++o)
          vals.push_back(sup.cells(c, o) ? 1 : 0);
        row["support"] = vals;
        rows.push_back(row);
      }
      j["rows"] = rows;
      out << j.dump(2) << "\n";
    } else {
      out << serialize(model);
    }
    return;
  }

  auto cells = table_cells(model, opt);
  std::vector<std::string> header{""};
  for (Eigen::Index o = 0; o < model.probs.cols(); ++o)
    header.push_back(outcome_label(o, n));

  if (opt.format == "csv") {
    auto emit_row = [&](const std::vector<std::string>& row) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
      out << "\n";
    };
    header[0] = "context";
    emit_row(header);
    for (const auto& row : cells) emit_row(row);
    return;
  }
  if (opt.format != "text") throw ValidationError("unknown format '" + opt.format + "'");

  std::vector<std::size_t> widths(header.size(), 0);
  for (std::size_t i = 0; i < header.size(); ++i) widths[i] = header[i].size();
  for (const auto& row : cells)
    for (std::size_t i = 0; i < row.size(); ++i) widths[i] = std::max(widths[i], row[i].size());
  auto emit_row = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << (i ? "  " : "");
      out << std::setw(int(widths[i])) << (i == 0 ? std::left : std::right) << row[i];
    }
    out << "\n";
  };
  emit_row(header);
  for (const auto& row : cells) emit_row(row);
}

void print_class(const ContextualityClass& cls, const Scenario& scenario, std::ostream& out,
                 const std::string& format) {
  if (format == "json") {
    out << class_to_json(cls).dump(2) << "\n";
    return;
  }
  out << "class: " << to_string(cls.label) << "\n";
  out << "consistent assignments: " << cls.consistent_count << "\n";
  if (cls.non_extendable.empty()) {
    out << "non-extendable sections: none\n";
  } else {
    out << "non-extendable sections:\n";
    for (const auto& [c, secs] : cls.non_extendable) {
      out << "  " << context_label(scenario, c) << ":";
      for (int o : secs) out << " " << outcome_label(o, scenario.n());
      out << "\n";
    }
  }
  if (cls.lp_status) {
    out << "lp: " << to_string(*cls.lp_status);
    if (*cls.lp_status != LpStatus::Feasible) {
      out << " (violation " << cls.lp_violation;
      if (!cls.lp_violation_exact.empty()) out << ", exact " << cls.lp_violation_exact;
      out << ")";
    }
    out << "\n";
  }
}

std::string observables_line(const Scenario& scenario) {
  std::string out;
  for (int p = 0; p < scenario.n(); ++p) {
    if (p) out += ",";
    const auto& party = scenario.parties[std::size_t(p)];
    for (int s = 0; s < 2; ++s) {
      if (s) out += "/";
      out += party.observables[std::size_t(s)] ? party.observables[std::size_t(s)]->str()
                                               : party.labels[std::size_t(s)];
    }
  }
  return out;
}

void print_witness(const WitnessReport& report, std::ostream& out, const std::string& format) {
  if (format == "json") {
    Json j;
    j["state"] = report.state;
    j["method"] = report.method;
    j["observables"] = observables_line(report.scenario);
    j["result"] = class_to_json(report.achieved);
    j["lower_bound"] = report.lower_bound;
    out << j.dump(2) << "\n";
    return;
  }
  out << "state: " << report.state << "\n";
  out << "method: " << report.method << "\n";
  out << "observables: " << observables_line(report.scenario) << "\n";
  print_class(report.achieved, report.scenario, out, "text");
}

// --------------------------------------------------------------------------
// Subcommands
// --------------------------------------------------------------------------

struct Args {
  std::string state_spec;
  std::string obs;
  std::string model_file;
  TableOptions table;
  std::string format = "text";
  bool preset = false;
  std::optional<int> grid;
  int nvars = 2;
  std::string out_file;
  std::string dicke_arg;
  int res = 4;
};

int cmd_table(const Args& a, std::ostream& out) {
  const StateSpec spec = StateSpec::parse(a.state_spec);
  const Scenario scenario = parse_scenario(a.obs, spec.qubits());
  if (spec.exact_capable() && scenario.all_observables_exact())
    print_table(build_model(build_exact(spec), scenario), a.table, out);
  else
    print_table(build_model(build_float(spec), scenario), a.table, out);
  return 0;
}

int cmd_classify(const Args& a, std::ostream& out) {
  if (!a.model_file.empty()) {
    std::ifstream in(a.model_file);
    if (!in) throw ValidationError("cannot open model file '" + a.model_file + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    AnyModel model = deserialize(buf.str());
    std::visit(
        [&](const auto& m) { print_class(classify(m), m.scenario, out, a.format); }, model);
    return 0;
  }
  if (a.state_spec.empty() || a.obs.empty())
    throw ValidationError("classify needs --state with --obs, or --model");
  const StateSpec spec = StateSpec::parse(a.state_spec);
  const Scenario scenario = parse_scenario(a.obs, spec.qubits());
  print_class(classify_state(spec, scenario), scenario, out, a.format);
  return 0;
}

int cmd_witness(const Args& a, std::ostream& out) {
  const StateSpec spec = StateSpec::parse(a.state_spec);
  WitnessReport report;
  if (a.grid) {
    report = lift_state_class(spec, a.grid);
  } else {
    report = preset_witness(spec);
  }
  print_witness(report, out, a.format);
  return 0;
}

int cmd_sweep(const Args& a, std::ostream& out) {
  const SweepResult result = family_sweep(a.nvars);
  const std::string csv = result.csv();
  if (!a.out_file.empty()) {
    std::ofstream f(a.out_file);
    if (!f) throw ValidationError("cannot write '" + a.out_file + "'");
    f << csv;
    out << "wrote " << result.rows.size() << " rows to " << a.out_file
        << (result.sampled ? " (sampled)" : "") << "\n";
  } else {
    out << csv;
  }
  return 0;
}

int cmd_certificate(const Args& a, std::ostream& out) {
  auto parts = split_top_level(a.dicke_arg, ',');
  if (parts.size() != 2) throw ValidationError("--dicke needs n,k");
  const int n = detail::parse_int(parts[0], "n");
  const int k = detail::parse_int(parts[1], "k");
  const DickeCertificate cert = dicke_certificate(n, k);
  if (!cert.ok()) throw std::logic_error("certificate checks failed unexpectedly");
  if (a.format == "json") {
    out << certificate_to_json(cert).dump(2) << "\n";
    return 0;
  }
  out << "logical; violation " << cert.violation.str() << "\n";
  out << "all-X all-equal mass: " << cert.all_equal_mass.str() << " (< 1: strict)\n";
  out << "two-X-row implication instances verified: " << cert.implication_instances << "\n";
  out << "all-Z support disjuncts: " << cert.z_disjuncts
      << "; equivalence closure merges all X variables\n";
  return 0;
}

int cmd_bellcheck(const Args& a, std::ostream& out) {
  const BellBasisReport report = bell_basis_logical_search(a.res);
  if (a.format == "json") {
    Json j;
    j["resolution"] = report.resolution;
    j["tuples_checked"] = report.tuples_checked;
    j["models_checked"] = report.models_checked;
    j["condition_subsets_realized"] = report.subsets.size();
    j["distinct_supports"] = report.distinct_supports.size();
    j["logically_contextual_found"] = report.logical_found;
    j["notes"] = report.notes;
    out << j.dump(2) << "\n";
    return 0;
  }
  out << "resolution: " << report.resolution << "\n";
  out << "tuples checked: " << report.tuples_checked << " (" << report.models_checked
      << " models)\n";
  out << "condition subsets realized: " << report.subsets.size()
      << " of 512 (the rest have no satisfying parameters)\n";
  out << "distinct supports: " << report.distinct_supports.size() << "\n";
  out << "logically contextual supports found: " << report.logical_found << "\n";
  for (const auto& note : report.notes) out << "note: " << note << "\n";
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"empirical models of n-qubit states and their contextuality hierarchy"};
  app.require_subcommand(1);
  Args a;

  auto* table = app.add_subcommand("table", "print a probability or support table");
  table->add_option("--state", a.state_spec, "state spec, e.g. dicke:3,2 or fd:q1+q2")
      ->required();
  table->add_option("--obs", a.obs, "per-party setting pairs, e.g. Y/Z,Y/Z,Y/Z")->required();
  table->add_flag("--support", a.table.support, "print the 0/1 support grid");
  table->add_option("--format", a.table.format, "text|csv|json")->default_val("text");
  table->add_option("--dp", a.table.dp, "decimals for float probabilities");

  auto* classify_cmd = app.add_subcommand("classify", "place a model in the hierarchy");
  classify_cmd->add_option("--state", a.state_spec, "state spec");
  classify_cmd->add_option("--obs", a.obs, "per-party setting pairs");
  classify_cmd->add_option("--model", a.model_file, "serialized model file");
  classify_cmd->add_option("--format", a.format, "text|json")->default_val("text");

  auto* witness = app.add_subcommand("witness", "find observables witnessing contextuality");
  witness->add_option("--state", a.state_spec, "state spec")->required();
  witness->add_flag("--preset", a.preset, "use the family preset (default)");
  witness->add_option("--grid", a.grid, "lift with a grid search at this resolution");
  witness->add_option("--format", a.format, "text|json")->default_val("text");

  auto* sweep = app.add_subcommand("sweep", "classify every functional dependency");
  sweep->add_option("--nvars", a.nvars, "number of polynomial variables")->required();
  sweep->add_option("--out", a.out_file, "write CSV here instead of stdout");

  auto* cert = app.add_subcommand("certificate", "symbolic Dicke-state certificate");
  cert->add_option("--dicke", a.dicke_arg, "n,k")->required();
  cert->add_option("--format", a.format, "text|json")->default_val("text");

  auto* bellcheck = app.add_subcommand("bellcheck", "Bell-pair condition-subset search");
  bellcheck->add_option("--res", a.res, "generic samples per free parameter")
      ->default_val(4);
  bellcheck->add_option("--format", a.format, "text|json")->default_val("text");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (table->parsed()) return cmd_table(a, out);
    if (classify_cmd->parsed()) return cmd_classify(a, out);
    if (witness->parsed()) return cmd_witness(a, out);
    if (sweep->parsed()) return cmd_sweep(a, out);
    if (cert->parsed()) return cmd_certificate(a, out);
    if (bellcheck->parsed()) return cmd_bellcheck(a, out);
    err << "error: no subcommand\n";
    return 1;
  } catch (const SizeBoundError& e) {
    err << "size bound: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace qctx::cli
