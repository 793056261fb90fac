#pragma once

#include "qctx/classify.hpp"
#include "qctx/dicke.hpp"
#include "qctx/empirical.hpp"

#include "json.hpp"

#include <cstdio>
#include <string>
#include <variant>

namespace qctx {

using Json = nlohmann::ordered_json;

inline std::string format_prob(const Rational& p) { return p.str(); }

inline std::string format_prob(double p) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", p);
  return buf;
}

namespace detail {

inline Json scenario_to_json(const Scenario& scenario) {
  Json parties = Json::array();
  for (const auto& p : scenario.parties) {
    Json entry = Json::array({p.labels[0], p.labels[1]});
    parties.push_back(entry);
  }
  Json out;
  out["parties"] = parties;
  return out;
}

inline Scenario scenario_from_json(const Json& j) {
  Scenario s;
  if (!j.contains("parties") || !j["parties"].is_array())
    throw ValidationError("model file: scenario.parties missing");
  for (const auto& entry : j["parties"]) {
    if (!entry.is_array() || entry.size() != 2)
      throw ValidationError("model file: each party needs exactly two labels");
    Scenario::Party party;
    party.labels = {entry[0].get<std::string>(), entry[1].get<std::string>()};
    s.parties.push_back(std::move(party));
  }
  s.validate();
  return s;
}

/// Context index from its label, matching party labels left to right
/// (longer label preferred when one is a prefix of the other).
inline Eigen::Index context_from_label(const Scenario& scenario, const std::string& label) {
  Eigen::Index context = 0;
  std::size_t pos = 0;
  for (int p = 0; p < scenario.n(); ++p) {
    const auto& labels = scenario.parties[std::size_t(p)].labels;
    int pick = -1;
    std::size_t best_len = 0;
    for (int s = 0; s < 2; ++s) {
      const std::string& l = labels[std::size_t(s)];
      if (label.compare(pos, l.size(), l) == 0 && l.size() >= best_len) {
        pick = s;
        best_len = l.size();
      }
    }
    if (pick < 0)
      throw ValidationError("model file: context '" + label + "' does not match party " +
                            std::to_string(p + 1) + " labels");
    pos += best_len;
    context = (context << 1) | pick;
  }
  if (pos != label.size())
    throw ValidationError("model file: trailing characters in context '" + label + "'");
  return context;
}

}  // namespace detail

template <typename P>
Json model_to_json(const EmpiricalModel<P>& model) {
  Json out;
  out["scenario"] = detail::scenario_to_json(model.scenario);
  out["mode"] = std::is_same_v<P, Rational> ? "exact" : "float";
  Json rows = Json::array();
  for (Eigen::Index c : display_order(model.n())) {
    Json row;
    row["context"] = context_label(model.scenario, c);
    Json probs = Json::array();
    for (Eigen::Index o = 0; o < model.probs.cols(); ++o)
      probs.push_back(format_prob(model.probs(c, o)));
    row["probs"] = probs;
    rows.push_back(row);
  }
  out["rows"] = rows;
  return out;
}

template <typename P>
std::string serialize(const EmpiricalModel<P>& model) {
  return model_to_json(model).dump(2) + "\n";
}

using AnyModel = std::variant<ExactModel, FloatModel>;

inline AnyModel deserialize(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("model file: ") + e.what());
  }
  if (!j.contains("scenario") || !j.contains("mode") || !j.contains("rows"))
    throw ValidationError("model file: need scenario, mode and rows fields");
  const Scenario scenario = detail::scenario_from_json(j["scenario"]);
  const std::string mode = j["mode"].get<std::string>();
  if (mode != "exact" && mode != "float")
    throw ValidationError("model file: mode must be 'exact' or 'float'");
  const Eigen::Index contexts = scenario.contexts();
  const Eigen::Index outcomes = scenario.outcomes();
  if (Eigen::Index(j["rows"].size()) != contexts)
    throw ValidationError("model file: expected " + std::to_string(contexts) + " rows");

  auto fill = [&](auto& model, auto parse_entry) {
    model.scenario = scenario;
    model.probs.resize(contexts, outcomes);
    std::vector<bool> seen(std::size_t(contexts), false);
    Eigen::Index row_no = 0;
    for (const auto& row : j["rows"]) {
      ++row_no;
      if (!row.contains("context") || !row.contains("probs"))
        throw ValidationError("model file: row " + std::to_string(row_no) +
                              " needs context and probs");
      const Eigen::Index c =
          detail::context_from_label(scenario, row["context"].get<std::string>());
      if (seen[std::size_t(c)])
        throw ValidationError("model file: duplicate context in row " +
                              std::to_string(row_no));
      seen[std::size_t(c)] = true;
      if (Eigen::Index(row["probs"].size()) != outcomes)
        throw ValidationError("model file: row " + std::to_string(row_no) + " needs " +
                              std::to_string(outcomes) + " probabilities");
      for (Eigen::Index o = 0; o < outcomes; ++o)
        model.probs(c, o) = parse_entry(row["probs"][std::size_t(o)], row_no);
    }
    for (Eigen::Index c = 0; c < contexts; ++c) {
      auto sum = model.probs(c, 0);
      for (Eigen::Index o = 1; o < outcomes; ++o) sum += model.probs(c, o);
      if (!detail::row_sum_ok(sum))
        throw ValidationError("model file: context '" + context_label(scenario, c) +
                              "' does not sum to 1");
    }
  };

  if (mode == "exact") {
    ExactModel model;
    fill(model, [](const Json& v, Eigen::Index row_no) {
      if (!v.is_string())
        throw ValidationError("model file: exact probabilities must be rational strings (row " +
                              std::to_string(row_no) + ")");
      Rational r = Rational::parse(v.get<std::string>());
      if (r.sign() < 0 || r > Rational(1))
        throw ValidationError("model file: probability out of [0,1] in row " +
                              std::to_string(row_no));
      return r;
    });
    return model;
  }
  FloatModel model;
  fill(model, [](const Json& v, Eigen::Index row_no) {
    double d = 0;
    if (v.is_string()) d = std::stod(v.get<std::string>());
    else if (v.is_number()) d = v.get<double>();
    else
      throw ValidationError("model file: bad probability in row " + std::to_string(row_no));
    if (d < -1e-12 || d > 1.0 + 1e-9)
      throw ValidationError("model file: probability out of [0,1] in row " +
                            std::to_string(row_no));
    return d;
  });
  return model;
}

inline Json class_to_json(const ContextualityClass& cls) {
  Json out;
  out["label"] = to_string(cls.label);
  out["consistent_assignments"] = cls.consistent_count;
  Json sections = Json::array();
  for (const auto& [context, outcomes] : cls.non_extendable) {
    Json entry;
    entry["context"] = context;
    entry["sections"] = outcomes;
    sections.push_back(entry);
  }
  out["non_extendable"] = sections;
  if (cls.lp_status) {
    out["lp"] = to_string(*cls.lp_status);
    if (*cls.lp_status != LpStatus::Feasible) {
      out["lp_violation"] = cls.lp_violation;
      if (!cls.lp_violation_exact.empty()) out["lp_value_exact"] = cls.lp_violation_exact;
    }
  }
  return out;
}

inline Json certificate_to_json(const DickeCertificate& cert) {
  Json out;
  out["n"] = cert.n;
  out["k"] = cert.k;
  out["class"] = "Logical";
  out["implication_instances"] = cert.implication_instances;
  out["implications_ok"] = cert.implications_ok;
  out["z_disjuncts"] = cert.z_disjuncts;
  out["z_row_ok"] = cert.z_row_ok;
  out["closure_ok"] = cert.closure_ok;
  out["all_equal_mass"] = cert.all_equal_mass.str();
  out["strict"] = cert.strict;
  out["violation"] = cert.violation.str();
  return out;
}

}  // namespace qctx
