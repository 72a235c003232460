#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>
#include <utility>

#include "swigid/ident_engine.hpp"

namespace swigid {

namespace {

constexpr int max_close_rounds = 64;
constexpr std::size_t max_search_attempts = 20000;

/// Raised inside a recipe when a term cannot be closed.
struct Blocked {
  std::optional<CiQuery> ci;
  std::string message;
};

class Builder {
 public:
  Builder(const Swig& swig, const Estimand& estimand) : swig_(swig), current_(to_term(estimand)) {}

  const Swig& swig() const { return swig_; }
  const Expr& current() const { return current_; }
  std::vector<DerivationStep>& steps() { return steps_; }
  std::size_t size() const { return flatten(current_).factors.size(); }
  Term term(std::size_t k) const { return flatten(current_).factors.at(k); }

  void push(DerivationStep step) {
    current_ = step.output;
    steps_.push_back(std::move(step));
  }

  /// Applies the step if the rule accepts; remembers the first graphical refusal.
  template <class F>
  bool attempt(F&& make) {
    try {
      push(make());
      return true;
    } catch (const RuleError& err) {
      if (!refusal_ && err.ci()) refusal_ = err.ci();
      return false;
    }
  }

  std::optional<CiQuery> take_refusal() { return std::exchange(refusal_, std::nullopt); }

 private:
  const Swig& swig_;
  Expr current_;
  std::vector<DerivationStep> steps_;
  std::optional<CiQuery> refusal_;
};

std::vector<std::string> names(const std::vector<Assignment>& list) {
  std::vector<std::string> out;
  for (const auto& a : list) out.push_back(a.var);
  return out;
}

const Assignment* find_in(const std::vector<Assignment>& list, std::string_view var) {
  for (const auto& a : list)
    if (a.var == var) return &a;
  return nullptr;
}

/// Drives one factor to an observed q0 term or throws Blocked.
void close_term(Builder& b, std::size_t k) {
  const Swig& swig = b.swig();
  b.take_refusal();
  for (int round = 0; round < max_close_rounds; ++round) {
    Term t = b.term(k);

    if (t.regime.empty()) {
      bool has_node = false;
      for (const auto* list : {&t.dependents, &t.conditioners})
        for (const auto& a : *list) has_node = has_node || swig.is_intervention_node(swig.index_of(a.var));
      if (has_node) {
        try {
          b.push(rule_redundancy(swig, b.current(), k));
        } catch (const RuleError& err) {
          throw Blocked{CiQuery{t.regime, names(t.dependents), {}, names(t.conditioners)}, err.what()};
        }
        t = b.term(k);
      }
      for (const auto* list : {&t.dependents, &t.conditioners}) {
        for (const auto& a : *list) {
          if (swig.variable(swig.index_of(a.var)).observed) continue;
          CiQuery q{t.regime, {}, {a.var}, {}};
          for (const auto& d : t.dependents)
            if (d.var != a.var) q.x.push_back(d.var);
          for (const auto& c : t.conditioners)
            if (c.var != a.var) q.z.push_back(c.var);
          if (q.x.empty()) std::swap(q.x, q.y);
          throw Blocked{q, "term " + to_text(t) + " involves the unobserved variable " + a.var};
        }
      }
      return;
    }

    // Drop interventions that come after everything the term mentions.
    std::set<int> cutoffs{0};
    for (const auto& v : swig.variables()) cutoffs.insert(v.time);
    bool progressed = false;
    for (int cutoff : cutoffs) {
      bool anything = false;
      for (int j : t.regime.members())
        anything = anything || swig.variable(swig.intervention_node(j)).time > cutoff;
      for (const auto& a : t.conditioners) {
        int v = swig.index_of(a.var);
        anything = anything || (swig.is_intervention_node(v) && swig.variable(v).time > cutoff);
      }
      if (!anything) continue;
      if (b.attempt([&] { return rule_drop_later(swig, b.current(), k, cutoff); })) {
        progressed = true;
        break;
      }
    }
    if (progressed) continue;

    auto members = t.regime.members();
    std::reverse(members.begin(), members.end());

    for (int j : members) {
      if (b.attempt([&] { return rule_consistency(swig, b.current(), k, j); })) {
        progressed = true;
        break;
      }
    }
    if (progressed) continue;

    // Bring X_j and Xo_j to a common value.
    for (int j : members) {
      const auto& x = swig.variable(swig.target_node(j)).name;
      const auto& xo = swig.variable(swig.intervention_node(j)).name;
      const Assignment* node = find_in(t.conditioners, xo);
      if (!node || !node->value || find_in(t.dependents, x)) continue;
      const Assignment* target = find_in(t.conditioners, x);
      if (!target) {
        progressed = b.attempt([&] {
          return rule_ci_modify(swig, b.current(), k, {CiAction::insert, x, node->value});
        });
      } else if (target->value && *target->value != *node->value) {
        progressed = b.attempt([&] {
          return rule_ci_modify(swig, b.current(), k, {CiAction::change, x, node->value});
        }) || b.attempt([&] { return rule_ci_modify(swig, b.current(), k, {CiAction::change, xo, target->value}); });
      }
      if (progressed) break;
    }
    if (progressed) continue;

    // Conditioners downstream of an active intervention block its removal.
    std::vector<int> active_nodes;
    for (int j : t.regime.members()) active_nodes.push_back(swig.intervention_node(j));
    auto below = descendants(regime_graph(swig, t.regime), active_nodes);
    for (const auto& a : t.conditioners) {
      int v = swig.index_of(a.var);
      if (swig.is_intervention_node(v) || swig.is_target(v) || !below[v]) continue;
      if (b.attempt([&] { return rule_ci_modify(swig, b.current(), k, {CiAction::remove, a.var, std::nullopt}); })) {
        progressed = true;
        break;
      }
    }
    if (progressed) continue;

    auto refusal = b.take_refusal();
    if (!refusal) refusal = CiQuery{t.regime, names(t.dependents), {}, names(t.conditioners)};
    throw Blocked{refusal, "no rule closes " + to_text(t)};
  }
  throw Blocked{std::nullopt, "term closing did not terminate"};
}

void close_all(Builder& b) {
  for (std::size_t k = 0; k < b.size(); ++k) close_term(b, k);
}

std::vector<int> topo_rank(const Swig& swig) {
  auto order = topological_order(swig.graph());
  std::vector<int> rank(swig.size(), 0);
  for (std::size_t i = 0; i < order->size(); ++i) rank[(*order)[i]] = static_cast<int>(i);
  return rank;
}

void sort_topologically(const Swig& swig, std::vector<std::string>& vars) {
  auto rank = topo_rank(swig);
  std::stable_sort(vars.begin(), vars.end(),
                   [&](const auto& a, const auto& b) { return rank[swig.index_of(a)] < rank[swig.index_of(b)]; });
}

/// Blocks for the chain rule: the estimand dependents as one block, every
/// other dependent alone, latest in topological order first.
std::vector<std::vector<std::string>> chain_blocks(const Swig& swig, const std::vector<std::string>& outcome,
                                                   const std::vector<std::string>& others) {
  auto rank = topo_rank(swig);
  auto key = [&](const std::vector<std::string>& block) {
    int r = -1;
    for (const auto& v : block) r = std::max(r, rank[swig.index_of(v)]);
    return r;
  };
  std::vector<std::vector<std::string>> blocks;
  if (!outcome.empty()) blocks.push_back(outcome);
  for (const auto& v : others) blocks.push_back({v});
  std::stable_sort(blocks.begin(), blocks.end(), [&](const auto& a, const auto& b) { return key(a) > key(b); });
  return blocks;
}

std::vector<std::string> active_targets(const Swig& swig, const Regime& regime) {
  std::vector<std::string> out;
  for (int j : regime.members()) out.push_back(swig.variable(swig.target_node(j)).name);
  return out;
}

void check_vars(const Swig& swig, const Estimand& estimand, const std::vector<std::string>& vars) {
  std::set<std::string> seen;
  for (const auto& v : vars) {
    auto idx = swig.find(v);
    if (!idx) throw IdentError("unknown variable '" + v + "' in strategy");
    if (swig.is_intervention_node(*idx)) throw IdentError("'" + v + "' is an intervention node");
    if (!seen.insert(v).second) throw IdentError("'" + v + "' listed twice");
    if (to_term(estimand).mentions(v)) throw IdentError("'" + v + "' already appears in the estimand");
  }
}

/// Introduce `vars`, split them off the outcome with the chain rule, then close every term.
void introduce_and_close(Builder& b, const std::vector<std::string>& vars) {
  auto outcome = names(b.term(0).dependents);
  if (!vars.empty()) {
    b.push(rule_total_probability(b.swig(), b.current(), 0, vars));
    b.push(rule_product(b.swig(), b.current(), 0, chain_blocks(b.swig(), outcome, vars)));
  }
  close_all(b);
}

Derivation result(Builder& b, const Estimand& estimand, std::string strategy) {
  Derivation d;
  d.estimand = estimand;
  d.strategy = std::move(strategy);
  d.targets = b.swig().base().targets;
  d.status = Status::identified;
  d.steps = std::move(b.steps());
  d.final = canonicalize(b.current(), VariableOrder::of(b.swig()));
  return d;
}

Derivation blocked(Builder& b, const Estimand& estimand, std::string strategy, Blocked why) {
  Derivation d;
  d.estimand = estimand;
  d.strategy = std::move(strategy);
  d.targets = b.swig().base().targets;
  d.steps = std::move(b.steps());
  d.final = b.current();
  d.blocking = std::move(why.ci);
  d.message = std::move(why.message);
  return d;
}

using Recipe = void (*)(Builder&, const Estimand&, const std::vector<std::string>&);

Derivation run(const Swig& swig, const Estimand& estimand, const std::string& strategy, Recipe recipe,
               const std::vector<std::string>& vars) {
  Builder b(swig, estimand);
  try {
    recipe(b, estimand, vars);
  } catch (Blocked& why) {
    return blocked(b, estimand, strategy, std::move(why));
  } catch (const RuleError& err) {
    return blocked(b, estimand, strategy, Blocked{err.ci(), err.what()});
  }
  return result(b, estimand, strategy);
}

void backdoor_recipe(Builder& b, const Estimand&, const std::vector<std::string>& adjust) {
  introduce_and_close(b, adjust);
}

void frontdoor_recipe(Builder& b, const Estimand& estimand, const std::vector<std::string>& mediators) {
  auto outcome = names(b.term(0).dependents);
  if (!mediators.empty()) {
    b.push(rule_total_probability(b.swig(), b.current(), 0, mediators));
    b.push(rule_product(b.swig(), b.current(), 0, {outcome, mediators}));
  }
  auto doses = active_targets(b.swig(), estimand.regime);
  if (!doses.empty()) {
    b.push(rule_total_probability(b.swig(), b.current(), 0, doses));
    b.push(rule_product(b.swig(), b.current(), 0, {outcome, doses}));
  }
  close_all(b);
}

void sequential_backdoor_recipe(Builder& b, const Estimand&, const std::vector<std::string>&) {
  auto deps = names(b.term(0).dependents);
  if (deps.size() > 1) b.push(rule_product(b.swig(), b.current(), 0, chain_blocks(b.swig(), {}, deps)));
  close_all(b);
}

void sequential_frontdoor_recipe(Builder& b, const Estimand& estimand, const std::vector<std::string>& mediators) {
  std::vector<std::string> vars = active_targets(b.swig(), estimand.regime);
  vars.insert(vars.end(), mediators.begin(), mediators.end());
  sort_topologically(b.swig(), vars);
  introduce_and_close(b, vars);
}

std::string lowercase(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::vector<std::string> candidates(const Swig& swig, const Estimand& estimand) {
  Term t = to_term(estimand);
  std::vector<std::string> out;
  const auto order = topological_order(swig.graph());
  for (int v : *order) {
    const auto& var = swig.variable(v);
    if (!var.observed || swig.is_intervention_node(v) || t.mentions(var.name)) continue;
    out.push_back(var.name);
  }
  return out;
}

/// Every subset of `pool` with exactly `size` members, in lexicographic order.
template <class F>
bool for_each_subset(const std::vector<std::string>& pool, std::size_t size, F&& visit) {
  std::vector<std::size_t> pick(size);
  for (std::size_t i = 0; i < size; ++i) pick[i] = i;
  if (size > pool.size()) return false;
  while (true) {
    std::vector<std::string> subset;
    for (auto i : pick) subset.push_back(pool[i]);
    if (visit(subset)) return true;
    std::size_t i = size;
    while (i > 0 && pick[i - 1] == pool.size() - size + i - 1) --i;
    if (i == 0) return false;
    ++pick[i - 1];
    for (std::size_t k = i; k < size; ++k) pick[k] = pick[k - 1] + 1;
  }
}

CiQuery backdoor_query(const Swig& swig, const Estimand& estimand, const std::vector<std::string>& adjust) {
  CiQuery q{estimand.regime, names(estimand.dependents), active_targets(swig, estimand.regime), adjust};
  for (const auto& a : estimand.conditioners) q.z.push_back(a.var);
  return q;
}

CiQuery frontdoor_query(const Swig& swig, const Estimand& estimand, const std::vector<std::string>& mediators) {
  CiQuery q{estimand.regime, names(estimand.dependents), {}, mediators};
  for (const auto& a : estimand.conditioners) q.y.push_back(a.var);
  for (const auto& d : active_targets(swig, estimand.regime)) q.z.push_back(d);
  return q;
}

Derivation not_found(const Swig& swig, const Estimand& estimand, std::string strategy, CiQuery blocking,
                     std::string message) {
  Derivation d;
  d.estimand = estimand;
  d.strategy = std::move(strategy);
  d.targets = swig.base().targets;
  d.final = to_term(estimand);
  d.blocking = std::move(blocking);
  d.message = std::move(message);
  return d;
}

bool safe_dsep(const Swig& swig, const CiQuery& q) {
  try {
    return d_separated(swig, q);
  } catch (const ModelError&) {
    return false;
  }
}

Derivation search_backdoor(const Swig& swig, const Estimand& estimand, const std::string& label) {
  auto pool = candidates(swig, estimand);
  std::erase_if(pool, [&](const std::string& v) { return swig.is_target(swig.index_of(v)); });
  std::optional<Derivation> found;
  std::size_t attempts = 0;
  for (std::size_t size = 0; size <= pool.size() && !found && attempts < max_search_attempts; ++size) {
    for_each_subset(pool, size, [&](const std::vector<std::string>& z) {
      if (++attempts > max_search_attempts) return true;
      if (!safe_dsep(swig, backdoor_query(swig, estimand, z))) return false;
      Derivation d = run(swig, estimand, label, backdoor_recipe, z);
      if (d.status != Status::identified) return false;
      found = std::move(d);
      return true;
    });
  }
  if (found) return *found;
  return not_found(swig, estimand, label, backdoor_query(swig, estimand, {}), "no observed adjustment set found");
}

Derivation search_frontdoor(const Swig& swig, const Estimand& estimand, const std::string& label) {
  auto pool = candidates(swig, estimand);
  std::erase_if(pool, [&](const std::string& v) { return swig.is_target(swig.index_of(v)); });
  std::optional<Derivation> found;
  std::size_t attempts = 0;
  for (std::size_t size = 0; size <= pool.size() && !found && attempts < max_search_attempts; ++size) {
    for_each_subset(pool, size, [&](const std::vector<std::string>& m) {
      if (++attempts > max_search_attempts) return true;
      if (!safe_dsep(swig, frontdoor_query(swig, estimand, m))) return false;
      Derivation d = run(swig, estimand, label, frontdoor_recipe, m);
      if (d.status != Status::identified) return false;
      found = std::move(d);
      return true;
    });
  }
  if (found) return *found;
  return not_found(swig, estimand, label, frontdoor_query(swig, estimand, {}), "no observed mediator set found");
}

Derivation search_top_down(const Swig& swig, const Estimand& estimand, int depth, const std::string& label) {
  auto pool = candidates(swig, estimand);
  std::optional<Derivation> found;
  std::size_t attempts = 0;
  std::size_t limit = std::min(pool.size(), static_cast<std::size_t>(depth));
  for (std::size_t size = 0; size <= limit && !found && attempts < max_search_attempts; ++size) {
    for_each_subset(pool, size, [&](const std::vector<std::string>& s) {
      if (++attempts > max_search_attempts) return true;
      Derivation d = run(swig, estimand, label, backdoor_recipe, s);
      if (d.status != Status::identified) return false;
      found = std::move(d);
      return true;
    });
  }
  if (found) return *found;
  return not_found(swig, estimand, label, backdoor_query(swig, estimand, {}),
                   "no introduced set up to size " + std::to_string(depth) + " closes");
}

Derivation search_bottom_up(const Swig& swig, const Estimand& estimand, int depth, const std::string& label) {
  auto pool = candidates(swig, estimand);
  std::vector<std::string> established;
  for (std::size_t i = 0;; ++i) {
    Derivation d = run(swig, estimand, label, backdoor_recipe, established);
    if (d.status == Status::identified) return d;
    if (i >= pool.size() || static_cast<int>(established.size()) >= depth) break;
    established.push_back(pool[i]);
  }
  return not_found(swig, estimand, label, backdoor_query(swig, estimand, {}),
                   "no established set up to size " + std::to_string(depth) + " closes");
}

}  // namespace

std::vector<std::string> default_mediators(const Swig& swig, const Estimand& estimand) {
  std::vector<int> nodes;
  for (int j : estimand.regime.members())
    if (j <= swig.num_interventions()) nodes.push_back(swig.intervention_node(j));
  auto below = descendants(swig.graph(), nodes);
  Term t = to_term(estimand);
  std::vector<std::string> out;
  const auto order = topological_order(swig.graph());
  for (int v : *order) {
    const auto& var = swig.variable(v);
    if (!below[v] || !var.observed || var.time < 1 || swig.is_intervention_node(v) || swig.is_target(v) ||
        t.mentions(var.name))
      continue;
    out.push_back(var.name);
  }
  return out;
}

Derivation compose_mediator_intervention(const Swig& doses, const Swig& mediators, const Estimand& estimand) {
  const std::string label = "mediator_intervention";
  const BaseDag& a = doses.base();
  const BaseDag& m = mediators.base();
  if (a.variables != m.variables || a.edges != m.edges)
    throw IdentError("the two SWIGs do not share a base graph");
  if (auto problems = check_estimand(doses, estimand); !problems.empty()) throw IdentError(problems.front());

  // Symbols for the mediator values, clear of anything in the estimand.
  std::set<std::string> taken = all_symbols(Expr(to_term(estimand)));
  std::vector<std::string> binders;
  std::vector<Assignment> mediator_values, node_values;
  for (int j = 1; j <= mediators.num_interventions(); ++j) {
    const auto& name = mediators.variable(mediators.target_node(j)).name;
    std::string sym = lowercase(name);
    while (taken.count(sym)) sym += '\'';
    taken.insert(sym);
    binders.push_back(sym);
    mediator_values.push_back({name, Symbol{sym}});
    node_values.push_back({mediators.variable(mediators.intervention_node(j)).name, Symbol{sym}});
  }
  if (binders.empty())
    return not_found(doses, estimand, label, frontdoor_query(doses, estimand, {}), "no mediators to intervene on");

  Estimand mediator_law{estimand.regime, mediator_values, estimand.conditioners};
  Derivation first = run(doses, mediator_law, "sequential_backdoor", sequential_backdoor_recipe, {});

  Estimand outcome_law{Regime::prefix(mediators.num_interventions()), estimand.dependents, node_values};
  std::vector<std::string> dose_vars = active_targets(doses, estimand.regime);
  for (const auto& v : dose_vars)
    if (!mediators.find(v)) throw IdentError("dose '" + v + "' missing from the mediator SWIG");
  Derivation second =
      run(mediators, outcome_law, to_string(Strategy{Strategy::Kind::backdoor, dose_vars}), backdoor_recipe, dose_vars);

  Derivation d;
  d.estimand = estimand;
  d.strategy = label;
  d.targets = a.targets;
  d.final = to_term(estimand);
  for (const auto* part : {&second, &first}) {
    if (part->status == Status::identified || d.blocking) continue;
    d.blocking = part->blocking;
    d.message = "factor " + to_text(to_term(part->estimand)) + " is not identified: " + part->message;
  }
  bool ok = first.status == Status::identified && second.status == Status::identified;
  if (ok) {
    Expr composed = canonicalize(Sum{binders, Product{{second.final, first.final}}}, VariableOrder::of(doses));
    d.steps.push_back(DerivationStep{"compose", 0, Expr(to_term(estimand)), composed,
                                     {std::nullopt, "sum over mediator values of the two identified factors"}});
    d.final = composed;
    d.status = Status::identified;
  }
  d.parts.push_back(std::move(first));
  d.parts.push_back(std::move(second));
  return d;
}

Derivation identify(const Swig& swig, const Estimand& estimand, const Strategy& strategy) {
  if (auto problems = check_estimand(swig, estimand); !problems.empty()) throw IdentError(problems.front());
  if (strategy.depth < 1) throw IdentError("search depth must be at least 1");
  const std::string label = to_string(strategy);
  if (strategy.vars) check_vars(swig, estimand, *strategy.vars);

  using K = Strategy::Kind;
  switch (strategy.kind) {
    case K::backdoor:
      if (!strategy.vars) return search_backdoor(swig, estimand, label);
      return run(swig, estimand, label, backdoor_recipe, *strategy.vars);
    case K::frontdoor:
      if (!strategy.vars) return search_frontdoor(swig, estimand, label);
      return run(swig, estimand, label, frontdoor_recipe, *strategy.vars);
    case K::sequential_backdoor:
      if (strategy.vars) throw IdentError("sequential_backdoor takes no variable list");
      return run(swig, estimand, label, sequential_backdoor_recipe, {});
    case K::sequential_frontdoor:
      return run(swig, estimand, label, sequential_frontdoor_recipe,
                 strategy.vars ? *strategy.vars : default_mediators(swig, estimand));
    case K::mediator_intervention: {
      auto mediators = strategy.vars ? *strategy.vars : default_mediators(swig, estimand);
      sort_topologically(swig, mediators);
      BaseDag split = swig.base();
      split.targets = mediators;
      Swig other = [&] {
        try {
          return to_swig(split);
        } catch (const ModelError& err) {
          throw IdentError(std::string("mediator SWIG: ") + err.what());
        }
      }();
      Derivation d = compose_mediator_intervention(swig, other, estimand);
      d.strategy = label;
      return d;
    }
    case K::top_down:
      return search_top_down(swig, estimand, strategy.depth, label);
    case K::bottom_up:
      return search_bottom_up(swig, estimand, strategy.depth, label);
  }
  throw IdentError("unknown strategy");
}

namespace {

constexpr std::pair<Strategy::Kind, std::string_view> strategy_names[] = {
    {Strategy::Kind::backdoor, "backdoor"},
    {Strategy::Kind::frontdoor, "frontdoor"},
    {Strategy::Kind::sequential_backdoor, "sequential_backdoor"},
    {Strategy::Kind::sequential_frontdoor, "sequential_frontdoor"},
    {Strategy::Kind::mediator_intervention, "mediator_intervention"},
    {Strategy::Kind::top_down, "top_down"},
    {Strategy::Kind::bottom_up, "bottom_up"},
};

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

Strategy parse_strategy(std::string_view text) {
  auto colon = text.find(':');
  std::string head = trim(text.substr(0, colon));
  Strategy s;
  bool known = false;
  for (const auto& [kind, name] : strategy_names) {
    if (head == name) {
      s.kind = kind;
      known = true;
    }
  }
  if (!known) throw IdentError("unknown strategy '" + head + "'");
  if (colon == std::string_view::npos) return s;

  std::vector<std::string> items;
  std::string_view rest = text.substr(colon + 1);
  while (true) {
    auto comma = rest.find(',');
    std::string item = trim(rest.substr(0, comma));
    if (item.empty()) throw IdentError("empty item in strategy '" + std::string(text) + "'");
    items.push_back(item);
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  if (s.kind == Strategy::Kind::top_down || s.kind == Strategy::Kind::bottom_up) {
    if (items.size() != 1) throw IdentError("search strategies take a single depth");
    try {
      std::size_t used = 0;
      s.depth = std::stoi(items[0], &used);
      if (used != items[0].size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw IdentError("invalid depth '" + items[0] + "'");
    }
    if (s.depth < 1) throw IdentError("search depth must be at least 1");
    return s;
  }
  if (s.kind == Strategy::Kind::sequential_backdoor) throw IdentError("sequential_backdoor takes no variable list");
  s.vars = items;
  return s;
}

std::string to_string(const Strategy& s) {
  std::string out;
  for (const auto& [kind, name] : strategy_names)
    if (kind == s.kind) out = name;
  if (s.kind == Strategy::Kind::top_down || s.kind == Strategy::Kind::bottom_up) {
    if (s.depth != Strategy{}.depth) out += ":" + std::to_string(s.depth);
  } else if (s.vars) {
    for (std::size_t i = 0; i < s.vars->size(); ++i) out += (i ? "," : ":") + (*s.vars)[i];
  }
  return out;
}

std::string_view to_string(Status s) { return s == Status::identified ? "identified" : "not_identified"; }

}  // namespace swigid
