#pragma once

// Test-side oracles and helpers, independent of the SWIG machinery where it
// matters: interventional laws come from a direct truncated factorization
// over the base DAG.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "swigid/ident_engine.hpp"
#include "swigid/oracle.hpp"

namespace swigid::testing {

inline std::string fixture_path(const std::string& name) { return std::string(SWIGID_FIXTURE_DIR) + "/" + name; }

inline std::string read_text(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Joint law of `outcomes` under do(targets = forced levels), by enumerating
/// the base DAG with each target's children reading the forced level.
/// Row-major over the outcomes.
inline std::vector<double> truncated_do(const DiscreteModel& model, const std::map<std::string, int>& forced,
                                        const std::vector<std::string>& outcomes) {
  const BaseDag& base = model.swig().base();
  const auto& vars = base.variables;
  const std::size_t n = vars.size();
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) index[vars[i].name] = i;

  std::size_t cells = 1;
  for (const auto& o : outcomes) cells *= base.variable(o).levels;
  std::vector<double> out(cells, 0.0);
  std::vector<int> state(n, 0);
  while (true) {
    double p = 1.0;
    for (std::size_t i = 0; i < n && p > 0; ++i) {
      const Cpt& cpt = model.cpt(vars[i].name);
      std::size_t row = 0;
      for (const auto& parent : cpt.parents) {
        int level = state[index[parent]];
        if (auto f = forced.find(parent); f != forced.end()) level = f->second;
        row = row * base.variable(parent).levels + level;
      }
      p *= cpt.rows[row][state[i]];
    }
    std::size_t cell = 0;
    for (const auto& o : outcomes) cell = cell * base.variable(o).levels + state[index[o]];
    out[cell] += p;
    std::size_t k = n;
    while (k > 0) {
      if (++state[k - 1] < vars[k - 1].levels) break;
      state[k - 1] = 0;
      --k;
    }
    if (k == 0) break;
  }
  return out;
}

/// Looks up the entry of a table at named axis levels.
inline double at(const Table& t, const std::map<std::string, int>& levels) {
  std::vector<int> idx;
  for (const auto& ax : t.axes) idx.push_back(levels.at(ax.name));
  return t.values[t.index(idx)];
}

/// Largest deviation of `e` (free variables `outcomes`, free symbols
/// `symbols` standing for the forced levels of `targets`) from the
/// truncated-factorization law. Binary targets and outcomes.
inline double deviation_from_do(const DiscreteModel& model, const Expr& e, const std::vector<std::string>& targets,
                                const std::vector<std::string>& symbols, const std::vector<std::string>& outcomes) {
  Table t = eval_expr(model, e);
  double worst = 0.0;
  const std::size_t k = targets.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
    std::map<std::string, int> forced, levels;
    for (std::size_t i = 0; i < k; ++i) {
      int bit = static_cast<int>((mask >> i) & 1U);
      forced[targets[i]] = bit;
      levels[symbols[i]] = bit;
    }
    auto truth = truncated_do(model, forced, outcomes);
    for (std::size_t cell = 0; cell < truth.size(); ++cell) {
      for (std::size_t o = 0; o < outcomes.size(); ++o)
        levels[outcomes[o]] = static_cast<int>((cell >> (outcomes.size() - 1 - o)) & 1U);
      worst = std::max(worst, std::abs(at(t, levels) - truth[cell]));
    }
  }
  return worst;
}

inline std::vector<std::string> numbered(const std::string& prefix, int n) {
  std::vector<std::string> out;
  for (int t = 1; t <= n; ++t) out.push_back(prefix + std::to_string(t));
  return out;
}

/// "q[n](Y<n> | do D1=d1, ..., do Dn=dn)"
inline std::string outcome_query(int n) {
  std::string q = "q[" + std::to_string(n) + "](Y" + std::to_string(n) + " |";
  for (int t = 1; t <= n; ++t) q += std::string(t > 1 ? "," : "") + " do D" + std::to_string(t) + "=d" + std::to_string(t);
  return q + ")";
}

/// "q[n](M1, ..., Mn | do D1=d1, ..., do Dn=dn)"
inline std::string mediator_query(int n) {
  std::string q = "q[" + std::to_string(n) + "](";
  for (int t = 1; t <= n; ++t) q += std::string(t > 1 ? ", " : "") + "M" + std::to_string(t);
  q += " |";
  for (int t = 1; t <= n; ++t) q += std::string(t > 1 ? "," : "") + " do D" + std::to_string(t) + "=d" + std::to_string(t);
  return q + ")";
}

/// Sequential g-formula: prod_t q0(M_t | M1..M_{t-1}, D1=d1..Dt=dt).
inline std::string sequential_gformula(int n) {
  std::string s;
  for (int t = 1; t <= n; ++t) {
    if (t > 1) s += " * ";
    s += "q0(M" + std::to_string(t) + " |";
    for (int u = 1; u < t; ++u) s += " M" + std::to_string(u) + ",";
    for (int u = 1; u <= t; ++u) s += " D" + std::to_string(u) + "=d" + std::to_string(u) + (u < t ? "," : "");
    s += ")";
  }
  return s;
}

/// Longitudinal front-door product: outcome term, mediator terms at the
/// intervened doses, dose terms at the summed doses.
inline std::string longitudinal_frontdoor(int n) {
  auto D = [](int t) { return "D" + std::to_string(t); };
  auto M = [](int t) { return "M" + std::to_string(t); };
  auto m = [](int t) { return "m" + std::to_string(t); };
  auto e = [](int t) { return "e" + std::to_string(t); };
  std::string binders, s = "q0(Y" + std::to_string(n) + " |";
  for (int t = 1; t <= n; ++t) {
    binders += std::string(t > 1 ? "," : "") + m(t) + "," + e(t);
    s += " " + D(t) + "=" + e(t) + ", " + M(t) + "=" + m(t) + (t < n ? "," : "");
  }
  s += ")";
  for (int t = 1; t <= n; ++t) {
    s += " * q0(" + M(t) + "=" + m(t) + " |";
    for (int u = 1; u < t; ++u) s += " " + M(u) + "=" + m(u) + ",";
    for (int u = 1; u <= t; ++u) s += " " + D(u) + "=d" + std::to_string(u) + (u < t ? "," : "");
    s += ")";
    s += " * q0(" + D(t) + "=" + e(t);
    if (t > 1) {
      s += " |";
      for (int u = 1; u < t; ++u) s += " " + D(u) + "=" + e(u) + ", " + M(u) + "=" + m(u) + (u < t - 1 ? "," : "");
    }
    s += ")";
  }
  return "sum{" + binders + "} " + s;
}

/// Corrupts the rewritten factor of step `i`: swaps its first dependent
/// with its first ordinary conditioner, else moves its last dependent into
/// the conditioners, else drops the factor. nullopt when neither edit yields a valid expression.
inline std::optional<Derivation> mutate_step(const Derivation& d, std::size_t i, const Swig& swig) {
  FlatExpr flat = flatten(d.steps.at(i).output);
  std::size_t k = d.steps[i].term;
  if (k >= flat.factors.size()) return std::nullopt;
  Term& t = flat.factors[k];
  auto plain = std::find_if(t.conditioners.begin(), t.conditioners.end(), [&](const Assignment& a) {
    auto v = swig.find(a.var);
    return v && !swig.is_intervention_node(*v);
  });
  if (plain != t.conditioners.end() && !t.dependents.empty()) {
    std::swap(t.dependents.front(), *plain);
  } else if (t.dependents.size() > 1) {
    t.conditioners.push_back(t.dependents.back());
    t.dependents.pop_back();
  } else if (flat.factors.size() > 1) {
    flat.factors.erase(flat.factors.begin() + static_cast<std::ptrdiff_t>(k));
  } else {
    return std::nullopt;
  }
  Derivation out = d;
  try {
    out.steps[i].output = to_expr(flat);
    validate_expr(out.steps[i].output);
  } catch (const ExprError&) {
    return std::nullopt;
  }
  return out;
}

}  // namespace swigid::testing
