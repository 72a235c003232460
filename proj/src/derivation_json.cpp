#include <sstream>

#include "swigid/ident_engine.hpp"

namespace swigid {

using nlohmann::json;

json to_json(const CiQuery& q) {
  return {{"regime", q.regime.members()}, {"x", q.x}, {"y", q.y}, {"z", q.z}, {"text", to_string(q)}};
}

CiQuery ci_query_from_json(const json& j) {
  return CiQuery{Regime::of(j.at("regime").get<std::vector<int>>()), j.at("x").get<std::vector<std::string>>(),
                 j.at("y").get<std::vector<std::string>>(), j.at("z").get<std::vector<std::string>>()};
}

json to_json(const Derivation& d) {
  json steps = json::array();
  for (const auto& s : d.steps) {
    json why = {{"note", s.justification.note}, {"ci", nullptr}};
    if (s.justification.ci) why["ci"] = to_json(*s.justification.ci);
    steps.push_back({{"rule", s.rule},
                     {"term", s.term},
                     {"input", to_text(s.input)},
                     {"output", to_text(s.output)},
                     {"justification", why}});
  }
  json parts = json::array();
  for (const auto& p : d.parts) parts.push_back(to_json(p));
  json out = {{"estimand", to_text(to_term(d.estimand))},
              {"strategy", d.strategy},
              {"targets", d.targets},
              {"status", std::string(to_string(d.status))},
              {"steps", steps},
              {"final", to_text(d.final)},
              {"blocking", nullptr},
              {"message", d.message},
              {"parts", parts}};
  if (d.blocking) out["blocking"] = to_json(*d.blocking);
  return out;
}

Derivation derivation_from_json(const json& j) {
  Derivation d;
  Term t = parse_term(j.at("estimand").get<std::string>());
  d.estimand = Estimand{t.regime, t.dependents, t.conditioners};
  d.strategy = j.value("strategy", "");
  d.targets = j.at("targets").get<std::vector<std::string>>();
  const auto status = j.at("status").get<std::string>();
  if (status == "identified")
    d.status = Status::identified;
  else if (status == "not_identified")
    d.status = Status::not_identified;
  else
    throw std::invalid_argument("unknown derivation status '" + status + "'");
  for (const auto& s : j.at("steps")) {
    Justification why;
    if (s.contains("justification")) {
      const auto& w = s.at("justification");
      why.note = w.value("note", "");
      if (w.contains("ci") && !w.at("ci").is_null()) why.ci = ci_query_from_json(w.at("ci"));
    }
    d.steps.push_back(DerivationStep{s.at("rule").get<std::string>(), s.value("term", std::size_t{0}),
                                     parse_expr(s.at("input").get<std::string>()),
                                     parse_expr(s.at("output").get<std::string>()), why});
  }
  d.final = parse_expr(j.at("final").get<std::string>());
  if (j.contains("blocking") && !j.at("blocking").is_null()) d.blocking = ci_query_from_json(j.at("blocking"));
  d.message = j.value("message", "");
  if (j.contains("parts"))
    for (const auto& p : j.at("parts")) d.parts.push_back(derivation_from_json(p));
  return d;
}

namespace {

void write_trace(std::ostream& os, const Derivation& d, const std::string& indent) {
  os << indent << "  " << to_text(to_term(d.estimand)) << '\n';
  for (const auto& s : d.steps) {
    os << indent << "= " << to_text(s.output) << "\n" << indent << "    # " << s.rule;
    if (!s.justification.note.empty()) os << ": " << s.justification.note;
    if (s.justification.ci) os << "  [" << to_string(*s.justification.ci) << "]";
    os << '\n';
  }
  for (std::size_t i = 0; i < d.parts.size(); ++i) {
    os << indent << "part " << i + 1 << " (targets";
    for (const auto& t : d.parts[i].targets) os << ' ' << t;
    os << "):\n";
    write_trace(os, d.parts[i], indent + "    ");
  }
}

}  // namespace

std::string format_trace(const Derivation& d) {
  std::ostringstream os;
  write_trace(os, d, "");
  if (d.status == Status::identified) {
    os << "result: " << to_text(d.final) << '\n';
  } else {
    os << "not identified: " << d.message << '\n';
    if (d.blocking) os << "blocking: " << to_string(*d.blocking) << '\n';
  }
  return os.str();
}

}  // namespace swigid
