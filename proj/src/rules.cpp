#include <algorithm>
#include <cctype>
#include <set>

#include "swigid/ident_engine.hpp"

namespace swigid {

namespace {

struct Context {
  FlatExpr flat;
  Term* term;
};

Context open(const Expr& e, std::size_t term) {
  validate_expr(e);
  Context c{flatten(e), nullptr};
  if (term >= c.flat.factors.size())
    throw RuleError("term index " + std::to_string(term) + " out of range (" +
                    std::to_string(c.flat.factors.size()) + " factors)");
  c.term = &c.flat.factors[term];
  return c;
}

DerivationStep finish(std::string rule, const Expr& input, std::size_t term, const FlatExpr& flat,
                      Justification why) {
  Expr output = to_expr(flat);
  try {
    validate_expr(output);
  } catch (const ExprError& err) {
    throw RuleError(rule + " would produce an invalid expression: " + err.what());
  }
  return DerivationStep{std::move(rule), term, input, std::move(output), std::move(why)};
}

std::vector<std::string> names(const std::vector<Assignment>& list) {
  std::vector<std::string> out;
  for (const auto& a : list) out.push_back(a.var);
  return out;
}

Assignment* find_in(std::vector<Assignment>& list, std::string_view var) {
  for (auto& a : list)
    if (a.var == var) return &a;
  return nullptr;
}

std::string lowercase(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

void require_known(const Swig& swig, std::string_view var) {
  if (!swig.find(var)) throw RuleError("unknown variable '" + std::string(var) + "'");
}

bool holds(const Swig& swig, const CiQuery& q) {
  try {
    return d_separated(swig, q);
  } catch (const ModelError& err) {
    throw RuleError(err.what());
  }
}

void require_binders_used(const FlatExpr& flat) {
  std::set<std::string> used;
  for (const auto& t : flat.factors)
    for (const auto* list : {&t.dependents, &t.conditioners})
      for (const auto& a : *list)
        if (a.value)
          if (const auto* s = std::get_if<Symbol>(&*a.value)) used.insert(s->name);
  for (const auto& b : flat.binders)
    if (!used.count(b)) throw RuleError("edit would leave the summed symbol '" + b + "' unused");
}

}  // namespace

DerivationStep rule_total_probability(const Swig& swig, const Expr& e, std::size_t term,
                                      const std::vector<std::string>& vars) {
  auto c = open(e, term);
  if (vars.empty()) throw RuleError("total probability needs at least one variable");
  std::set<std::string> taken = all_symbols(e);
  std::string note = "total probability over";
  for (const auto& v : vars) {
    require_known(swig, v);
    if (c.term->mentions(v)) throw RuleError("variable '" + v + "' already appears in the term");
    std::string name = lowercase(v);
    while (taken.count(name)) name += '\'';
    taken.insert(name);
    c.flat.binders.push_back(name);
    c.term->dependents.push_back({v, Symbol{name}});
    note += " " + v;
  }
  return finish("total_probability", e, term, c.flat, {std::nullopt, note});
}

DerivationStep rule_product(const Swig& /*swig*/, const Expr& e, std::size_t term,
                            const std::vector<std::vector<std::string>>& blocks) {
  auto c = open(e, term);
  if (blocks.size() < 2) throw RuleError("product rule needs at least two blocks");
  std::set<std::string> seen;
  for (const auto& block : blocks) {
    if (block.empty()) throw RuleError("product rule block is empty");
    for (const auto& v : block) {
      if (!find_in(c.term->dependents, v)) throw RuleError("'" + v + "' is not a dependent of the term");
      if (!seen.insert(v).second) throw RuleError("'" + v + "' appears in two blocks");
    }
  }
  if (seen.size() != c.term->dependents.size()) throw RuleError("blocks do not cover every dependent");

  const Term original = *c.term;
  std::vector<Term> pieces;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    Term piece{original.regime, {}, {}};
    for (const auto& v : blocks[i]) piece.dependents.push_back(*original.find(v));
    for (std::size_t k = i + 1; k < blocks.size(); ++k)
      for (const auto& v : blocks[k]) piece.conditioners.push_back(*original.find(v));
    piece.conditioners.insert(piece.conditioners.end(), original.conditioners.begin(), original.conditioners.end());
    pieces.push_back(std::move(piece));
  }
  auto& f = c.flat.factors;
  f.erase(f.begin() + static_cast<std::ptrdiff_t>(term));
  f.insert(f.begin() + static_cast<std::ptrdiff_t>(term), pieces.begin(), pieces.end());
  return finish("product", e, term, c.flat, {std::nullopt, "chain rule"});
}

DerivationStep rule_ci_modify(const Swig& swig, const Expr& e, std::size_t term, const CiEdit& edit) {
  auto c = open(e, term);
  require_known(swig, edit.var);
  Term& t = *c.term;
  if (find_in(t.dependents, edit.var)) throw RuleError("'" + edit.var + "' is a dependent of the term");
  Assignment* current = find_in(t.conditioners, edit.var);

  CiQuery ci{t.regime, names(t.dependents), {edit.var}, {}};
  for (const auto& a : t.conditioners)
    if (a.var != edit.var) ci.z.push_back(a.var);

  std::string note;
  switch (edit.action) {
    case CiAction::insert:
      if (current) throw RuleError("'" + edit.var + "' is already conditioned on");
      if (!edit.value) throw RuleError("insertion needs a value");
      t.conditioners.push_back({edit.var, edit.value});
      note = "insert " + edit.var + "=" + to_string(*edit.value);
      break;
    case CiAction::remove:
      if (!current) throw RuleError("'" + edit.var + "' is not conditioned on");
      t.conditioners.erase(t.conditioners.begin() + (current - t.conditioners.data()));
      note = "remove " + edit.var;
      break;
    case CiAction::change:
      if (!current) throw RuleError("'" + edit.var + "' is not conditioned on");
      if (!edit.value || !current->value) throw RuleError("value change needs old and new values");
      if (*current->value == *edit.value) throw RuleError("value of '" + edit.var + "' is unchanged");
      note = "change " + edit.var + " " + to_string(*current->value) + " -> " + to_string(*edit.value);
      current->value = edit.value;
      break;
  }
  require_binders_used(c.flat);
  if (!holds(swig, ci)) throw RuleError("independence fails: " + to_string(ci), ci);
  return finish("ci_modify", e, term, c.flat, {ci, note});
}

DerivationStep rule_consistency(const Swig& swig, const Expr& e, std::size_t term, int j) {
  auto c = open(e, term);
  Term& t = *c.term;
  if (j < 1 || j > swig.num_interventions()) throw RuleError("no intervention " + std::to_string(j));
  if (!t.regime.active(j)) throw RuleError("intervention " + std::to_string(j) + " is not active in " + t.regime.label());
  const auto& x = swig.variable(swig.target_node(j)).name;
  const auto& xo = swig.variable(swig.intervention_node(j)).name;
  const Assignment* a = find_in(t.conditioners, x);
  const Assignment* b = find_in(t.conditioners, xo);
  if (!a || !b) throw RuleError("consistency needs both " + x + " and " + xo + " as conditioners");
  if (!a->value || !b->value || *a->value != *b->value)
    throw RuleError(x + " and " + xo + " are not conditioned on the same value");
  t.regime = t.regime.without(j);
  return finish("consistency", e, term, c.flat, {std::nullopt, x + " = " + xo + " = " + to_string(*a->value)});
}

DerivationStep rule_drop_later(const Swig& swig, const Expr& e, std::size_t term, int cutoff) {
  auto c = open(e, term);
  Term& t = *c.term;
  auto later = [&](const std::string& name) {
    int v = swig.index_of(name);
    return swig.is_intervention_node(v) && swig.variable(v).time > cutoff;
  };
  CiQuery ci{t.regime, names(t.dependents), {}, {}};
  std::vector<Assignment> kept;
  for (const auto& a : t.conditioners) {
    require_known(swig, a.var);
    if (later(a.var)) {
      ci.y.push_back(a.var);
    } else {
      ci.z.push_back(a.var);
      kept.push_back(a);
    }
  }
  Regime truncated = t.regime;
  std::vector<std::string> deactivated;
  for (int j : t.regime.members()) {
    if (j > swig.num_interventions()) throw RuleError("regime " + t.regime.label() + " exceeds the declared targets");
    int node = swig.intervention_node(j);
    if (swig.variable(node).time > cutoff) {
      truncated = truncated.without(j);
      deactivated.push_back(swig.variable(node).name);
    }
  }
  if (ci.y.empty() && deactivated.empty())
    throw RuleError("no intervention later than time " + std::to_string(cutoff));

  Estimand view{t.regime, t.dependents, t.conditioners};
  if (!later_interventions_droppable(swig, view, cutoff)) {
    CiQuery blocking = ci;
    if (blocking.y.empty()) blocking.y = deactivated;
    std::string msg = "interventions after time " + std::to_string(cutoff) + " cannot be dropped";
    // When the independence holds, the obstacle is a conditioner downstream of a dropped node.
    if (d_separated(swig, blocking)) throw RuleError(msg + ": a conditioner descends from a dropped intervention");
    throw RuleError(msg, blocking);
  }
  t.conditioners = std::move(kept);
  t.regime = truncated;
  std::optional<CiQuery> why;
  if (!ci.y.empty()) why = ci;
  return finish("drop_later", e, term, c.flat, {why, "drop interventions after time " + std::to_string(cutoff)});
}

DerivationStep rule_redundancy(const Swig& swig, const Expr& e, std::size_t term) {
  auto c = open(e, term);
  Term& t = *c.term;
  if (!t.regime.empty()) throw RuleError("redundancy applies to q0 terms only");
  bool changed = false;
  for (int j = 1; j <= swig.num_interventions(); ++j) {
    const auto& x = swig.variable(swig.target_node(j)).name;
    const auto& xo = swig.variable(swig.intervention_node(j)).name;
    Assignment* xo_dep = find_in(t.dependents, xo);
    Assignment* xo_cond = find_in(t.conditioners, xo);
    if (!xo_dep && !xo_cond) continue;
    Assignment* xo_at = xo_dep ? xo_dep : xo_cond;
    if (!xo_at->value) throw RuleError(xo + " has no value");
    Assignment* x_dep = find_in(t.dependents, x);
    Assignment* x_cond = find_in(t.conditioners, x);
    if (!x_dep && !x_cond) {
      xo_at->var = x;
    } else {
      Assignment* x_at = x_dep ? x_dep : x_cond;
      if (!x_at->value || *x_at->value != *xo_at->value)
        throw RuleError(x + " and " + xo + " carry different values");
      if (x_dep && xo_cond) throw RuleError(xo + " is conditioned on while " + x + " is a dependent");
      auto& list = xo_dep ? t.dependents : t.conditioners;
      list.erase(list.begin() + (xo_at - list.data()));
    }
    changed = true;
  }
  if (!changed) throw RuleError("no intervention node in the term");
  return finish("redundancy", e, term, c.flat, {std::nullopt, "intervention nodes equal their targets in q0"});
}

bool recheck(const Swig& swig, const DerivationStep& step) {
  if (!step.justification.ci) return true;
  return d_separated(swig, *step.justification.ci);
}

}  // namespace swigid
