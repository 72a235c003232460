#include "swigid/model_ir.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

#include "swigid/graph_query.hpp"

namespace swigid {

namespace {

constexpr std::pair<Role, std::string_view> kRoleNames[] = {
    {Role::covariate, "covariate"},   {Role::target, "target"},   {Role::intervention, "intervention"},
    {Role::mediator, "mediator"},     {Role::outcome, "outcome"}, {Role::other, "other"},
};

}  // namespace

std::string_view to_string(Role role) {
  for (const auto& [r, name] : kRoleNames)
    if (r == role) return name;
  return "other";
}

std::optional<Role> parse_role(std::string_view text) {
  for (const auto& [r, name] : kRoleNames)
    if (name == text) return r;
  return std::nullopt;
}

std::optional<int> BaseDag::find(std::string_view var) const {
  for (std::size_t i = 0; i < variables.size(); ++i)
    if (variables[i].name == var) return static_cast<int>(i);
  return std::nullopt;
}

const Variable& BaseDag::variable(std::string_view var) const {
  auto i = find(var);
  if (!i) throw ModelError("unknown variable '" + std::string(var) + "'");
  return variables[*i];
}

Variable& BaseDag::variable(std::string_view var) {
  auto i = find(var);
  if (!i) throw ModelError("unknown variable '" + std::string(var) + "'");
  return variables[*i];
}

std::string intervention_name(std::string_view target) {
  std::size_t digits = target.size();
  while (digits > 0 && std::isdigit(static_cast<unsigned char>(target[digits - 1]))) --digits;
  return std::string(target.substr(0, digits)) + "o" + std::string(target.substr(digits));
}

std::vector<Violation> validate(const BaseDag& base) {
  std::vector<Violation> out;
  auto report = [&](std::string rule, std::string message) {
    out.push_back({std::move(rule), std::move(message)});
  };

  std::map<std::string, int, std::less<>> index;
  for (std::size_t i = 0; i < base.variables.size(); ++i) {
    const auto& v = base.variables[i];
    if (v.name.empty()) report("empty-name", "variable #" + std::to_string(i) + " has no name");
    if (!index.emplace(v.name, static_cast<int>(i)).second)
      report("duplicate-variable", "variable '" + v.name + "' declared twice");
    if (v.levels < 1) report("invalid-levels", "variable '" + v.name + "' needs at least one level");
    if (v.time < 0) report("invalid-time", "variable '" + v.name + "' has a negative time index");
    if (v.role == Role::intervention)
      report("intervention-in-base",
             "variable '" + v.name + "' has role intervention; intervention nodes are created by splitting");
  }

  DirectedGraph g(static_cast<int>(base.variables.size()));
  std::set<std::pair<int, int>> seen;
  for (const auto& [from, to] : base.edges) {
    auto a = index.find(from);
    auto b = index.find(to);
    if (a == index.end() || b == index.end()) {
      report("unknown-edge-endpoint", "edge " + from + " -> " + to + " names an undeclared variable");
      continue;
    }
    if (!seen.emplace(a->second, b->second).second) {
      report("duplicate-edge", "edge " + from + " -> " + to + " declared twice");
      continue;
    }
    g.add_edge(a->second, b->second);
    const auto& va = base.variables[a->second];
    const auto& vb = base.variables[b->second];
    if (va.time > vb.time)
      report("time-order", "edge " + from + " -> " + to + " runs from time " + std::to_string(va.time) +
                               " back to time " + std::to_string(vb.time));
  }

  const bool acyclic = topological_order(g).has_value();
  if (!acyclic) report("cycle", "graph '" + base.name + "' contains a directed cycle");

  std::vector<int> target_index;
  std::set<std::string> target_seen;
  for (const auto& t : base.targets) {
    auto it = index.find(t);
    if (it == index.end()) {
      report("unknown-target", "target '" + t + "' is not a declared variable");
      continue;
    }
    if (!target_seen.insert(t).second) {
      report("duplicate-target", "target '" + t + "' is split twice");
      continue;
    }
    target_index.push_back(it->second);
    if (index.count(intervention_name(t)))
      report("intervention-name-clash",
             "target '" + t + "' would split into '" + intervention_name(t) + "', which is already declared");
  }

  if (acyclic) {
    for (std::size_t i = 0; i < target_index.size(); ++i) {
      auto desc = descendants(g, {target_index[i]});
      for (std::size_t j = 0; j < i; ++j) {
        const auto& earlier = base.variables[target_index[j]];
        const auto& later = base.variables[target_index[i]];
        if (desc[target_index[j]])
          report("target-order", "target '" + earlier.name + "' is ordered before its ancestor '" + later.name + "'");
        else if (earlier.time > later.time)
          report("target-order", "target '" + earlier.name + "' (time " + std::to_string(earlier.time) +
                                     ") is ordered before '" + later.name + "' (time " +
                                     std::to_string(later.time) + ")");
      }
    }
  }
  return out;
}

void DirectedGraph::add_edge(int from, int to) {
  parents_.at(to).push_back(from);
  children_.at(from).push_back(to);
  ++num_edges_;
}

bool DirectedGraph::has_edge(int from, int to) const {
  const auto& c = children_.at(from);
  return std::find(c.begin(), c.end(), to) != c.end();
}

std::vector<Edge> DirectedGraph::edges() const {
  std::vector<Edge> out;
  for (int v = 0; v < size(); ++v)
    for (int c : children_[v]) out.push_back({v, c});
  std::sort(out.begin(), out.end());
  return out;
}

Regime Regime::prefix(int t) {
  if (t < 0 || t > max_interventions) throw ModelError("regime prefix out of range: " + std::to_string(t));
  Regime r;
  for (int j = 1; j <= t; ++j) r.mask_ |= std::uint64_t{1} << j;
  return r;
}

Regime Regime::of(const std::vector<int>& active) {
  Regime r;
  for (int j : active) r = r.with(j);
  return r;
}

int Regime::size() const { return std::popcount(mask_); }

std::vector<int> Regime::members() const {
  std::vector<int> out;
  for (int j = 1; j <= max_interventions; ++j)
    if (active(j)) out.push_back(j);
  return out;
}

std::optional<int> Regime::prefix_length() const {
  int n = size();
  if (Regime::prefix(n) == *this) return n;
  return std::nullopt;
}

Regime Regime::with(int j) const {
  if (j < 1 || j > max_interventions) throw ModelError("intervention index out of range: " + std::to_string(j));
  Regime r = *this;
  r.mask_ |= std::uint64_t{1} << j;
  return r;
}

Regime Regime::without(int j) const {
  Regime r = *this;
  if (j >= 1 && j <= max_interventions) r.mask_ &= ~(std::uint64_t{1} << j);
  return r;
}

std::string Regime::label() const {
  if (auto t = prefix_length()) return "q" + std::to_string(*t);
  std::ostringstream os;
  os << "q{";
  bool first = true;
  for (int j : members()) {
    os << (first ? "" : ",") << j;
    first = false;
  }
  os << "}";
  return os.str();
}

std::optional<int> Swig::find(std::string_view name) const {
  for (int i = 0; i < size(); ++i)
    if (variables_[i].name == name) return i;
  return std::nullopt;
}

int Swig::index_of(std::string_view name) const {
  auto i = find(name);
  if (!i) throw ModelError("unknown variable '" + std::string(name) + "'");
  return *i;
}

std::optional<int> Swig::pair_index(int v) const {
  for (std::size_t j = 0; j < pairs_.size(); ++j)
    if (pairs_[j].target == v || pairs_[j].intervention == v) return static_cast<int>(j) + 1;
  return std::nullopt;
}

bool Swig::is_intervention_node(int v) const {
  return std::any_of(pairs_.begin(), pairs_.end(), [v](const SplitPair& p) { return p.intervention == v; });
}

bool Swig::is_target(int v) const {
  return std::any_of(pairs_.begin(), pairs_.end(), [v](const SplitPair& p) { return p.target == v; });
}

Swig to_swig(const BaseDag& base) {
  auto violations = validate(base);
  if (!violations.empty()) {
    std::string msg = "invalid graph '" + base.name + "':";
    for (const auto& v : violations) msg += "\n  [" + v.rule + "] " + v.message;
    throw ModelError(msg);
  }

  Swig s;
  s.base_ = base;
  s.variables_ = base.variables;
  std::vector<int> split_of(base.variables.size(), -1);
  for (const auto& t : base.targets) {
    int target = *base.find(t);
    const Variable& tv = base.variables[target];
    Variable node{intervention_name(t), tv.time, Role::intervention, tv.observed, tv.levels};
    int inter = static_cast<int>(s.variables_.size());
    s.variables_.push_back(std::move(node));
    s.pairs_.push_back({target, inter});
    split_of[target] = inter;
  }

  s.graph_ = DirectedGraph(static_cast<int>(s.variables_.size()));
  for (const auto& [from, to] : base.edges) {
    int a = *base.find(from);
    int b = *base.find(to);
    s.graph_.add_edge(split_of[a] >= 0 ? split_of[a] : a, b);
  }
  for (const auto& p : s.pairs_) s.graph_.add_edge(p.target, p.intervention);
  return s;
}

DirectedGraph regime_graph(const Swig& swig, const Regime& regime) {
  for (int j : regime.members())
    if (j > swig.num_interventions())
      throw ModelError("regime " + regime.label() + " names intervention " + std::to_string(j) + " but the graph has " +
                       std::to_string(swig.num_interventions()));
  const auto& g = swig.graph();
  DirectedGraph out(g.size());
  for (int v = 0; v < g.size(); ++v) {
    for (int c : g.children(v)) {
      bool severed = false;
      for (int j : regime.members())
        if (swig.target_node(j) == v && swig.intervention_node(j) == c) severed = true;
      if (!severed) out.add_edge(v, c);
    }
  }
  return out;
}

std::string to_string(const ValueRef& value) {
  if (const auto* lit = std::get_if<Literal>(&value)) return std::to_string(lit->level);
  return std::get<Symbol>(value).name;
}

std::vector<std::string> check_estimand(const Swig& swig, const Estimand& estimand) {
  std::vector<std::string> problems;
  std::set<std::string> seen;
  auto check = [&](const Assignment& a, bool conditioner) {
    auto v = swig.find(a.var);
    if (!v) {
      problems.push_back("unknown variable '" + a.var + "'");
      return;
    }
    if (!seen.insert(a.var).second) problems.push_back("variable '" + a.var + "' appears twice");
    if (conditioner && !a.value) problems.push_back("conditioner '" + a.var + "' needs a value");
    if (a.value) {
      if (const auto* lit = std::get_if<Literal>(&*a.value)) {
        if (lit->level < 0 || lit->level >= swig.variable(*v).levels)
          problems.push_back("value " + std::to_string(lit->level) + " out of range for '" + a.var + "'");
      }
    }
  };
  if (estimand.dependents.empty()) problems.push_back("estimand has no dependent variables");
  for (const auto& a : estimand.dependents) check(a, false);
  for (const auto& a : estimand.conditioners) check(a, true);
  for (int j : estimand.regime.members())
    if (j > swig.num_interventions())
      problems.push_back("regime " + estimand.regime.label() + " exceeds the " +
                         std::to_string(swig.num_interventions()) + " declared targets");
  return problems;
}

}  // namespace swigid
