#include "swigid/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <random>
#include <sstream>

#include "swigid/graph_query.hpp"

namespace swigid {

namespace {

std::uint64_t state_count(const std::vector<int>& levels, const std::vector<int>& vars) {
  std::uint64_t n = 1;
  for (int v : vars) {
    n *= static_cast<std::uint64_t>(levels[v]);
    if (n > RegimeJoint::max_states) throw OracleError("state space exceeds 2^22 entries");
  }
  return n;
}

std::vector<int> all_indices(int n) {
  std::vector<int> out(n);
  for (int i = 0; i < n; ++i) out[i] = i;
  return out;
}

/// Increments a mixed-radix counter, last digit fastest. False on wrap.
bool next_state(std::vector<int>& digits, const std::vector<int>& radix) {
  for (int i = static_cast<int>(digits.size()) - 1; i >= 0; --i) {
    if (++digits[i] < radix[i]) return true;
    digits[i] = 0;
  }
  return false;
}

}  // namespace

DiscreteModel::DiscreteModel(Swig swig, std::map<std::string, Cpt> cpts)
    : swig_(std::move(swig)), cpts_(std::move(cpts)), parent_index_(swig_.size()) {
  const BaseDag& base = swig_.base();
  for (const auto& [name, cpt] : cpts_)
    if (!base.find(name)) throw OracleError("CPT given for unknown variable '" + name + "'");

  for (const auto& var : base.variables) {
    auto it = cpts_.find(var.name);
    if (it == cpts_.end()) throw OracleError("missing CPT for '" + var.name + "'");
    const Cpt& cpt = it->second;

    std::vector<std::string> expected;
    for (const auto& [from, to] : base.edges)
      if (to == var.name) expected.push_back(from);
    std::vector<std::string> given = cpt.parents;
    std::sort(expected.begin(), expected.end());
    std::sort(given.begin(), given.end());
    if (expected != given) throw OracleError("CPT parents of '" + var.name + "' do not match the graph");

    std::size_t rows = 1;
    int self = *base.find(var.name);
    for (const auto& p : cpt.parents) {
      int pi = *base.find(p);
      rows *= static_cast<std::size_t>(base.variables[pi].levels);
      bool split = std::find(base.targets.begin(), base.targets.end(), p) != base.targets.end();
      parent_index_[self].push_back(split ? swig_.intervention_node(*swig_.pair_index(pi)) : pi);
    }
    if (cpt.rows.size() != rows)
      throw OracleError("CPT of '" + var.name + "' has " + std::to_string(cpt.rows.size()) + " rows, expected " +
                        std::to_string(rows));
    for (const auto& row : cpt.rows) {
      if (static_cast<int>(row.size()) != var.levels)
        throw OracleError("CPT row of '" + var.name + "' has the wrong number of levels");
      double total = 0.0;
      for (double p : row) {
        if (!(p >= 0.0)) throw OracleError("negative or NaN probability in CPT of '" + var.name + "'");
        total += p;
      }
      if (std::abs(total - 1.0) > 1e-12) throw OracleError("CPT row of '" + var.name + "' does not sum to 1");
    }
  }
}

DiscreteModel DiscreteModel::rebind(const Swig& other) const {
  const BaseDag& a = swig_.base();
  const BaseDag& b = other.base();
  if (a.variables != b.variables || a.edges != b.edges)
    throw OracleError("cannot rebind a model to a SWIG of a different base graph");
  return DiscreteModel(other, cpts_);
}

double DiscreteModel::probability(int var, int level, const std::vector<int>& assignment) const {
  const Cpt& cpt = cpts_.at(swig_.variable(var).name);
  std::size_t row = 0;
  for (int p : parent_index_[var]) row = row * swig_.variable(p).levels + assignment[p];
  return cpt.rows[row][level];
}

RegimeJoint::RegimeJoint(const DiscreteModel& model, const Regime& regime, const InterventionLaws& laws)
    : regime_(regime) {
  const Swig& swig = model.swig();
  for (int j : regime.members())
    if (j > swig.num_interventions()) throw OracleError("regime " + regime.label() + " exceeds the declared targets");
  for (const auto& v : swig.variables()) levels_.push_back(v.levels);
  const int n = swig.size();
  p_.assign(state_count(levels_, all_indices(n)), 0.0);

  // Per variable: how its factor is computed.
  enum class Kind { cpt, copy, exogenous };
  std::vector<Kind> kind(n, Kind::cpt);
  std::vector<int> copy_of(n, -1);
  std::vector<std::vector<double>> law(n);
  for (int j = 1; j <= swig.num_interventions(); ++j) {
    int node = swig.intervention_node(j);
    if (regime.active(j)) {
      kind[node] = Kind::exogenous;
      auto it = laws.find(j);
      if (it != laws.end()) {
        if (static_cast<int>(it->second.size()) != levels_[node]) throw OracleError("intervention law has wrong size");
        law[node] = it->second;
      } else {
        law[node].assign(levels_[node], 1.0 / levels_[node]);
      }
    } else {
      kind[node] = Kind::copy;
      copy_of[node] = swig.target_node(j);
    }
  }

  std::vector<int> digits(n, 0);
  std::size_t index = 0;
  do {
    double p = 1.0;
    for (int v = 0; v < n && p != 0.0; ++v) {
      switch (kind[v]) {
        case Kind::cpt:
          p *= model.probability(v, digits[v], digits);
          break;
        case Kind::copy:
          p *= digits[v] == digits[copy_of[v]] ? 1.0 : 0.0;
          break;
        case Kind::exogenous:
          p *= law[v][digits[v]];
          break;
      }
    }
    p_[index++] = p;
  } while (next_state(digits, levels_));
}

double RegimeJoint::total() const {
  double t = 0.0;
  for (double p : p_) t += p;
  return t;
}

std::vector<double> RegimeJoint::marginal(const std::vector<int>& vars) const {
  std::vector<double> out(state_count(levels_, vars), 0.0);
  const int n = static_cast<int>(levels_.size());
  std::vector<std::size_t> stride(n, 0);
  std::size_t s = 1;
  for (int i = static_cast<int>(vars.size()) - 1; i >= 0; --i) {
    stride[vars[i]] += s;
    s *= static_cast<std::size_t>(levels_[vars[i]]);
  }
  std::vector<int> digits(n, 0);
  std::size_t index = 0;
  do {
    std::size_t k = 0;
    for (int v : vars) k += stride[v] * digits[v];
    // Repeated variables would double-count the stride; callers pass distinct vars.
    out[k] += p_[index++];
  } while (next_state(digits, levels_));
  return out;
}

RegimeJoint joint(const DiscreteModel& model, const Regime& regime, const InterventionLaws& laws) {
  return RegimeJoint(model, regime, laws);
}

std::size_t Table::index(const std::vector<int>& levels) const {
  std::size_t k = 0;
  for (std::size_t i = 0; i < axes.size(); ++i) k = k * axes[i].levels + levels[i];
  return k;
}

double max_abs_diff(const Table& a, const Table& b) {
  // Union of axes; a parameter axis missing from one side is constant there.
  std::vector<Axis> axes = a.axes;
  for (const auto& ax : b.axes)
    if (std::find(axes.begin(), axes.end(), ax) == axes.end()) axes.push_back(ax);
  auto position = [&](const Table& t) {
    std::vector<std::optional<std::size_t>> pos(axes.size());
    for (std::size_t i = 0; i < axes.size(); ++i) {
      auto it = std::find(t.axes.begin(), t.axes.end(), axes[i]);
      if (it != t.axes.end())
        pos[i] = static_cast<std::size_t>(it - t.axes.begin());
      else if (!axes[i].symbol)
        throw OracleError("tables range over different axes ('" + axes[i].name + "')");
    }
    return pos;
  };
  auto pa = position(a), pb = position(b);

  std::vector<int> radix, digits(axes.size(), 0), la(a.axes.size()), lb(b.axes.size());
  for (const auto& ax : axes) radix.push_back(ax.levels);
  double worst = 0.0;
  do {
    for (std::size_t i = 0; i < axes.size(); ++i) {
      if (pa[i]) la[*pa[i]] = digits[i];
      if (pb[i]) lb[*pb[i]] = digits[i];
    }
    worst = std::max(worst, std::abs(a.values[a.index(la)] - b.values[b.index(lb)]));
  } while (next_state(digits, radix));
  return worst;
}

std::ostream& operator<<(std::ostream& os, const Table& t) {
  std::vector<int> radix, digits(t.axes.size(), 0);
  for (const auto& ax : t.axes) radix.push_back(ax.levels);
  std::size_t index = 0;
  do {
    for (std::size_t i = 0; i < t.axes.size(); ++i) os << (i ? " " : "") << t.axes[i].name << '=' << digits[i];
    if (t.axes.empty()) os << "(scalar)";
    os << " : " << t.values[index++] << '\n';
  } while (next_state(digits, radix));
  return os;
}

// ---------------------------------------------------------------------------
// Expression evaluation

namespace {

struct VarInfo {
  int index;
  int levels;
};

using Catalog = std::function<std::optional<VarInfo>(const std::string&)>;

/// A value position: literal level or slot number.
struct ValueSlot {
  bool literal = false;
  int value = 0;
};

/// Variables of a marginal table sorted by index, and where each sits in the term.
struct MarginalLayout {
  std::vector<int> vars;
  std::vector<std::size_t> positions;
};

struct CompiledTerm {
  Regime regime;
  std::vector<int> vars;  // dependents first, then conditioners
  std::vector<ValueSlot> values;
  std::size_t num_dependents = 0;
  std::string text;
  MarginalLayout joint, given;
};

MarginalLayout layout(const std::vector<int>& vars, std::size_t from) {
  MarginalLayout m;
  for (std::size_t i = from; i < vars.size(); ++i) m.positions.push_back(i);
  std::sort(m.positions.begin(), m.positions.end(), [&](std::size_t a, std::size_t b) { return vars[a] < vars[b]; });
  for (auto i : m.positions) m.vars.push_back(vars[i]);
  return m;
}

struct Compiled {
  std::vector<Axis> axes;          // slots [0, axes.size())
  std::vector<int> binder_levels;  // slots after the axes
  std::vector<CompiledTerm> terms;
};

Compiled compile(const Expr& e, const Catalog& catalog) {
  validate_expr(e);
  FlatExpr flat = flatten(e);
  Compiled c;

  std::map<std::string, int> symbol_levels;
  std::map<std::string, int> var_levels;
  for (const auto& t : flat.factors) {
    for (const auto* list : {&t.dependents, &t.conditioners}) {
      for (const auto& a : *list) {
        auto info = catalog(a.var);
        if (!info) throw OracleError("unknown variable '" + a.var + "'");
        var_levels[a.var] = info->levels;
        if (!a.value) continue;
        if (const auto* lit = std::get_if<Literal>(&*a.value)) {
          if (lit->level < 0 || lit->level >= info->levels)
            throw OracleError("level " + std::to_string(lit->level) + " out of range for '" + a.var + "'");
          continue;
        }
        const auto& name = std::get<Symbol>(*a.value).name;
        auto [it, fresh] = symbol_levels.emplace(name, info->levels);
        if (!fresh && it->second != info->levels)
          throw OracleError("symbol '" + name + "' ranges over variables with different level counts");
      }
    }
  }

  std::map<std::string, int> var_slot, sym_slot;
  for (const auto& v : free_variables(e)) {
    var_slot[v] = static_cast<int>(c.axes.size());
    c.axes.push_back({v, false, var_levels.at(v)});
  }
  std::set<std::string> bound(flat.binders.begin(), flat.binders.end());
  for (const auto& [name, levels] : symbol_levels) {
    if (bound.count(name)) continue;
    sym_slot[name] = static_cast<int>(c.axes.size());
    c.axes.push_back({name, true, levels});
  }
  for (const auto& b : flat.binders) {
    sym_slot[b] = static_cast<int>(c.axes.size() + c.binder_levels.size());
    c.binder_levels.push_back(symbol_levels.at(b));
  }

  for (const auto& t : flat.factors) {
    CompiledTerm ct;
    ct.regime = t.regime;
    ct.text = to_text(t);
    ct.num_dependents = t.dependents.size();
    for (const auto* list : {&t.dependents, &t.conditioners}) {
      for (const auto& a : *list) {
        ct.vars.push_back(catalog(a.var)->index);
        if (!a.value)
          ct.values.push_back({false, var_slot.at(a.var)});
        else if (const auto* lit = std::get_if<Literal>(&*a.value))
          ct.values.push_back({true, lit->level});
        else
          ct.values.push_back({false, sym_slot.at(std::get<Symbol>(*a.value).name)});
      }
    }
    ct.joint = layout(ct.vars, 0);
    ct.given = layout(ct.vars, ct.num_dependents);
    c.terms.push_back(std::move(ct));
  }
  return c;
}

class ProbabilitySource {
 public:
  virtual ~ProbabilitySource() = default;
  /// Mass table over `vars` (sorted) under `regime`, row-major.
  virtual const std::vector<double>& table(const Regime& regime, const std::vector<int>& vars) = 0;
  /// Mass of the empty event.
  virtual double total() const = 0;
  /// Conditional probability from the joint and conditioning masses.
  virtual double conditional(const CompiledTerm& term, double joint, double given) const = 0;
};

/// Marginal tables keyed by regime and variable set.
class MarginalCache {
 public:
  using Builder = std::function<std::vector<double>(const Regime&, const std::vector<int>&)>;
  explicit MarginalCache(Builder build) : build_(std::move(build)) {}

  const std::vector<double>& get(const Regime& regime, const std::vector<int>& vars) {
    auto key = std::make_pair(regime.mask(), vars);
    auto it = cache_.find(key);
    if (it == cache_.end()) it = cache_.emplace(key, build_(regime, vars)).first;
    return it->second;
  }

 private:
  Builder build_;
  std::map<std::pair<std::uint64_t, std::vector<int>>, std::vector<double>> cache_;
};

class OracleSource : public ProbabilitySource {
 public:
  OracleSource(const DiscreteModel& model, const InterventionLaws& laws)
      : model_(model), laws_(laws), cache_([this](const Regime& r, const std::vector<int>& vars) {
          return joint_for(r).marginal(vars);
        }) {}

  OracleSource(const OracleSource&) = delete;  // the cache builder captures `this`
  OracleSource& operator=(const OracleSource&) = delete;

  const std::vector<double>& table(const Regime& regime, const std::vector<int>& vars) override {
    return cache_.get(regime, vars);
  }

  double total() const override { return 1.0; }

  double conditional(const CompiledTerm& term, double joint, double given) const override {
    if (given <= 0.0) throw ZeroProbabilityError("conditioning event of " + term.text + " has probability zero");
    return joint / given;
  }

 private:
  const RegimeJoint& joint_for(const Regime& r) {
    auto it = joints_.find(r);
    if (it == joints_.end()) it = joints_.emplace(r, std::make_unique<RegimeJoint>(model_, r, laws_)).first;
    return *it->second;
  }

  const DiscreteModel& model_;
  InterventionLaws laws_;
  std::map<Regime, std::unique_ptr<RegimeJoint>> joints_;
  MarginalCache cache_;
};

/// A term bound to its marginal tables, with per-position strides.
struct BoundTerm {
  const CompiledTerm* term;
  const std::vector<double>* joint;
  const std::vector<double>* given;
  std::vector<std::size_t> joint_stride, given_stride;  // by term position
};

std::vector<std::size_t> strides(const MarginalLayout& m, const std::vector<int>& levels, std::size_t width) {
  std::vector<std::size_t> out(width, 0);
  std::size_t stride = 1;
  for (std::size_t k = m.positions.size(); k-- > 0;) {
    out[m.positions[k]] = stride;
    stride *= static_cast<std::size_t>(levels[k]);
  }
  return out;
}

Table evaluate(const Compiled& c, ProbabilitySource& source, const std::function<int(int)>& levels_of) {
  std::vector<BoundTerm> bound;
  for (const auto& t : c.terms) {
    BoundTerm b{&t, &source.table(t.regime, t.joint.vars), nullptr, {}, {}};
    if (!t.given.vars.empty()) b.given = &source.table(t.regime, t.given.vars);
    auto levels = [&](const MarginalLayout& m) {
      std::vector<int> out;
      for (int v : m.vars) out.push_back(levels_of(v));
      return out;
    };
    b.joint_stride = strides(t.joint, levels(t.joint), t.vars.size());
    b.given_stride = strides(t.given, levels(t.given), t.vars.size());
    bound.push_back(std::move(b));
  }

  Table out;
  out.axes = c.axes;
  std::vector<int> axis_radix;
  for (const auto& ax : c.axes) axis_radix.push_back(ax.levels);

  std::vector<int> slots(c.axes.size() + c.binder_levels.size(), 0);
  std::vector<int> axis_digits(c.axes.size(), 0);
  do {
    std::copy(axis_digits.begin(), axis_digits.end(), slots.begin());
    std::vector<int> binder_digits(c.binder_levels.size(), 0);
    double total = 0.0;
    do {
      std::copy(binder_digits.begin(), binder_digits.end(), slots.begin() + c.axes.size());
      double product = 1.0;
      for (const auto& b : bound) {
        std::size_t jk = 0, gk = 0;
        const auto& values = b.term->values;
        for (std::size_t i = 0; i < values.size(); ++i) {
          std::size_t level = static_cast<std::size_t>(values[i].literal ? values[i].value : slots[values[i].value]);
          jk += level * b.joint_stride[i];
          gk += level * b.given_stride[i];
        }
            double given = b.given ? (*b.given)[gk] : source.total();
        product *= source.conditional(*b.term, (*b.joint)[jk], given);
      }
      total += product;
    } while (next_state(binder_digits, c.binder_levels));
    out.values.push_back(total);
  } while (next_state(axis_digits, axis_radix));
  return out;
}

Catalog swig_catalog(const Swig& swig) {
  return [&swig](const std::string& name) -> std::optional<VarInfo> {
    auto v = swig.find(name);
    if (!v) return std::nullopt;
    return VarInfo{*v, swig.variable(*v).levels};
  };
}

}  // namespace

Table query(const DiscreteModel& model, const Regime& regime, const std::vector<std::string>& dependents,
            const std::vector<std::pair<std::string, int>>& conditioners, const InterventionLaws& laws) {
  const Swig& swig = model.swig();
  RegimeJoint j(model, regime, laws);
  std::vector<int> vars, cond_vars;
  Table out;
  for (const auto& d : dependents) {
    int v = swig.index_of(d);
    vars.push_back(v);
    out.axes.push_back({d, false, swig.variable(v).levels});
  }
  std::size_t cond_index = 0;
  for (const auto& [name, level] : conditioners) {
    int v = swig.index_of(name);
    if (level < 0 || level >= swig.variable(v).levels) throw OracleError("level out of range for '" + name + "'");
    vars.push_back(v);
    cond_vars.push_back(v);
    cond_index = cond_index * swig.variable(v).levels + level;
  }
  double denom = cond_vars.empty() ? 1.0 : j.marginal(cond_vars)[cond_index];
  if (denom <= 0.0) throw ZeroProbabilityError("conditioning event has probability zero");
  auto joint_table = j.marginal(vars);
  std::size_t cond_states = 1;
  for (int v : cond_vars) cond_states *= swig.variable(v).levels;
  std::size_t dep_states = joint_table.size() / cond_states;
  for (std::size_t k = 0; k < dep_states; ++k) out.values.push_back(joint_table[k * cond_states + cond_index] / denom);
  return out;
}

struct ExprEvaluator::Impl {
  const DiscreteModel& model;
  OracleSource source;
};

ExprEvaluator::ExprEvaluator(const DiscreteModel& model, const InterventionLaws& laws)
    : impl_(new Impl{model, OracleSource(model, laws)}) {}

ExprEvaluator::~ExprEvaluator() = default;

Table ExprEvaluator::operator()(const Expr& e) {
  const Swig& swig = impl_->model.swig();
  Compiled c = compile(e, swig_catalog(swig));
  return evaluate(c, impl_->source, [&](int v) { return swig.variable(v).levels; });
}

Table eval_expr(const DiscreteModel& model, const Expr& e, const InterventionLaws& laws) {
  return ExprEvaluator(model, laws)(e);
}

DiscreteModel random_model(const Swig& swig, std::uint64_t seed, double concentration) {
  if (!(concentration > 0.0)) throw OracleError("Dirichlet concentration must be positive");
  std::mt19937_64 rng(seed);
  std::gamma_distribution<double> gamma(concentration, 1.0);
  const BaseDag& base = swig.base();
  std::map<std::string, Cpt> cpts;
  for (const auto& var : base.variables) {
    Cpt cpt;
    std::size_t rows = 1;
    for (const auto& [from, to] : base.edges) {
      if (to != var.name) continue;
      cpt.parents.push_back(from);
      rows *= static_cast<std::size_t>(base.variable(from).levels);
    }
    for (std::size_t r = 0; r < rows; ++r) {
      std::vector<double> row(var.levels);
      double total = 0.0;
      while (total <= 0.0) {
        total = 0.0;
        for (auto& p : row) total += (p = gamma(rng));
      }
      for (auto& p : row) p /= total;
      // Renormalize the last entry so the row sums to 1 within rounding.
      double head = 0.0;
      for (std::size_t k = 0; k + 1 < row.size(); ++k) head += row[k];
      row.back() = std::max(0.0, 1.0 - head);
      cpt.rows.push_back(std::move(row));
    }
    cpts.emplace(var.name, std::move(cpt));
  }
  return DiscreteModel(swig, std::move(cpts));
}

std::optional<std::size_t> Dataset::column(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return i;
  return std::nullopt;
}

Dataset sample(const DiscreteModel& model, const Regime& regime, std::size_t n, std::uint64_t seed) {
  const Swig& swig = model.swig();
  auto order = topological_order(regime_graph(swig, regime));
  if (!order) throw OracleError("regime graph is cyclic");
  Dataset data;
  for (const auto& v : swig.variables()) {
    data.names.push_back(v.name);
    data.levels.push_back(v.levels);
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<int> row(swig.size(), 0);
  data.cells.reserve(n * swig.size());
  for (std::size_t r = 0; r < n; ++r) {
    for (int v : *order) {
      if (auto j = swig.pair_index(v); j && swig.is_intervention_node(v)) {
        if (regime.active(*j)) {
          row[v] = std::uniform_int_distribution<int>(0, swig.variable(v).levels - 1)(rng);
        } else {
          row[v] = row[swig.target_node(*j)];
        }
        continue;
      }
      double u = unit(rng), acc = 0.0;
      int levels = swig.variable(v).levels;
      int pick = levels - 1;
      for (int l = 0; l < levels; ++l) {
        acc += model.probability(v, l, row);
        if (u < acc) {
          pick = l;
          break;
        }
      }
      row[v] = pick;
    }
    data.cells.insert(data.cells.end(), row.begin(), row.end());
  }
  return data;
}

void write_csv(std::ostream& os, const Dataset& data) {
  for (std::size_t c = 0; c < data.names.size(); ++c) os << (c ? "," : "") << data.names[c];
  os << '\n';
  for (std::size_t r = 0; r < data.rows(); ++r) {
    for (std::size_t c = 0; c < data.names.size(); ++c) os << (c ? "," : "") << data.at(r, c);
    os << '\n';
  }
}

namespace {

class EmpiricalSource : public ProbabilitySource {
 public:
  explicit EmpiricalSource(const Dataset& data)
      : data_(data), cache_([this](const Regime&, const std::vector<int>& vars) { return counts(vars); }) {}

  const std::vector<double>& table(const Regime& regime, const std::vector<int>& vars) override {
    return cache_.get(regime, vars);
  }

  double total() const override { return static_cast<double>(data_.rows()); }

  double conditional(const CompiledTerm& term, double joint, double given) const override {
    if (!term.regime.empty())
      throw OracleError("plug-in estimation needs observed-data terms, got " + term.text);
    double dep_states = 1.0;
    for (std::size_t i = 0; i < term.num_dependents; ++i) dep_states *= data_.levels[term.vars[i]];
    return (joint + 1.0) / (given + dep_states);
  }

 private:
  std::vector<double> counts(const std::vector<int>& vars) const {
    std::size_t states = 1;
    for (int v : vars) states *= static_cast<std::size_t>(data_.levels[v]);
    std::vector<double> out(states, 0.0);
    for (std::size_t r = 0; r < data_.rows(); ++r) {
      std::size_t k = 0;
      for (int v : vars) k = k * data_.levels[v] + data_.at(r, v);
      out[k] += 1.0;
    }
    return out;
  }

  const Dataset& data_;
  MarginalCache cache_;
};

}  // namespace

Table plugin_estimate(const Expr& e, const Dataset& data) {
  for (const auto& r : regimes_used(e))
    if (!r.empty()) throw OracleError("plug-in estimation needs an expression over observed data (q0) only");
  Catalog catalog = [&data](const std::string& name) -> std::optional<VarInfo> {
    auto c = data.column(name);
    if (!c) return std::nullopt;
    return VarInfo{static_cast<int>(*c), data.levels[*c]};
  };
  Compiled c = compile(e, catalog);
  EmpiricalSource source(data);
  return evaluate(c, source, [&](int v) { return data.levels[v]; });
}

nlohmann::json model_to_json(const DiscreteModel& model) {
  nlohmann::json vars = nlohmann::json::array();
  for (const auto& v : model.swig().base().variables) {
    const Cpt& cpt = model.cpt(v.name);
    vars.push_back({{"name", v.name}, {"levels", v.levels}, {"parents", cpt.parents}, {"cpt", cpt.rows}});
  }
  return {{"graph", model.swig().base().name}, {"variables", vars}};
}

DiscreteModel model_from_json(const Swig& swig, const nlohmann::json& j) {
  std::map<std::string, Cpt> cpts;
  for (const auto& v : j.at("variables")) {
    const auto name = v.at("name").get<std::string>();
    if (auto levels = v.value("levels", -1); levels >= 0 && swig.find(name) &&
                                             swig.variable(swig.index_of(name)).levels != levels)
      throw OracleError("model levels of '" + name + "' disagree with the graph");
    cpts[name] = Cpt{v.at("parents").get<std::vector<std::string>>(),
                     v.at("cpt").get<std::vector<std::vector<double>>>()};
  }
  return DiscreteModel(swig, std::move(cpts));
}

CiCheck brute_force_ci(const DiscreteModel& model, const CiQuery& q, double tol) {
  const Swig& swig = model.swig();
  auto resolve = [&](const std::vector<std::string>& names) {
    std::vector<int> out;
    for (const auto& n : names) out.push_back(swig.index_of(n));
    return out;
  };
  std::vector<int> x = resolve(q.x), y = resolve(q.y), z = resolve(q.z);
  std::vector<int> vars = x;
  vars.insert(vars.end(), y.begin(), y.end());
  vars.insert(vars.end(), z.begin(), z.end());
  RegimeJoint j(model, q.regime);
  auto full = j.marginal(vars);

  auto states = [&](const std::vector<int>& vs) {
    std::size_t n = 1;
    for (int v : vs) n *= swig.variable(v).levels;
    return n;
  };
  const std::size_t nx = states(x), ny = states(y), nz = states(z);
  CiCheck check;
  for (std::size_t c = 0; c < nz; ++c) {
    double pz = 0.0;
    std::vector<double> px(nx, 0.0), py(ny, 0.0);
    for (std::size_t a = 0; a < nx; ++a)
      for (std::size_t b = 0; b < ny; ++b) {
        double p = full[(a * ny + b) * nz + c];
        pz += p;
        px[a] += p;
        py[b] += p;
      }
    if (pz < 1e-12) {
      ++check.skipped;
      continue;
    }
    for (std::size_t a = 0; a < nx; ++a)
      for (std::size_t b = 0; b < ny; ++b) {
        double dev = std::abs(full[(a * ny + b) * nz + c] / pz - (px[a] / pz) * (py[b] / pz));
        check.max_deviation = std::max(check.max_deviation, dev);
      }
  }
  check.independent = check.max_deviation <= tol;
  return check;
}

}  // namespace swigid
