#pragma once

// Exact ground truth: discrete models over a SWIG, regime joints by
// enumeration, expression evaluation, ancestral sampling and plug-in
// (g-computation style) estimation from data.

#include <cstdint>
#include <map>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "swigid/model_ir.hpp"
#include "swigid/prob_expr.hpp"

namespace swigid {

class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A term conditioned on an event of probability zero.
class ZeroProbabilityError : public OracleError {
 public:
  using OracleError::OracleError;
};

/// P(var | parents). Parents are base-DAG names; rows are indexed row-major
/// over the parents' levels (first parent most significant).
struct Cpt {
  std::vector<std::string> parents;
  std::vector<std::vector<double>> rows;
};

class DiscreteModel {
 public:
  /// Validates parent sets against the base DAG and row normalization (1e-12).
  DiscreteModel(Swig swig, std::map<std::string, Cpt> cpts);

  const Swig& swig() const { return swig_; }
  const Cpt& cpt(const std::string& var) const { return cpts_.at(var); }
  const std::map<std::string, Cpt>& cpts() const { return cpts_; }

  /// Same CPTs on another SWIG of the same base DAG (different targets).
  DiscreteModel rebind(const Swig& other) const;

  /// P(var = level | parents), parent levels given in swig variable indices.
  double probability(int var, int level, const std::vector<int>& assignment) const;

 private:
  Swig swig_;
  std::map<std::string, Cpt> cpts_;
  // Per swig variable: swig indices of the CPT parents, or empty for intervention nodes.
  std::vector<std::vector<int>> parent_index_;
};

/// Marginals of active intervention nodes, by intervention index. Missing
/// entries are uniform.
using InterventionLaws = std::map<int, std::vector<double>>;

class RegimeJoint {
 public:
  static constexpr std::uint64_t max_states = std::uint64_t{1} << 22;

  RegimeJoint(const DiscreteModel& model, const Regime& regime, const InterventionLaws& laws = {});

  const Regime& regime() const { return regime_; }
  const std::vector<int>& levels() const { return levels_; }
  const std::vector<double>& probabilities() const { return p_; }
  double total() const;

  /// Marginal table over `vars` (swig indices), row-major in the given order.
  std::vector<double> marginal(const std::vector<int>& vars) const;

 private:
  Regime regime_;
  std::vector<int> levels_;
  std::vector<double> p_;
};

RegimeJoint joint(const DiscreteModel& model, const Regime& regime, const InterventionLaws& laws = {});

/// Axis of a probability table: a free variable or a free parameter symbol.
struct Axis {
  std::string name;
  bool symbol = false;
  int levels = 2;

  friend bool operator==(const Axis&, const Axis&) = default;
};

/// Dense table, row-major over its axes (first axis most significant).
struct Table {
  std::vector<Axis> axes;
  std::vector<double> values;

  std::size_t index(const std::vector<int>& levels) const;
};

/// Largest absolute difference after aligning axes by name. A parameter
/// axis present on one side only is broadcast (the other side does not
/// depend on it); differing variable axes throw OracleError.
double max_abs_diff(const Table& a, const Table& b);

std::ostream& operator<<(std::ostream& os, const Table& t);

/// Exact conditional table P_s(dependents | conditioners = values) over
/// the dependents' levels. Throws ZeroProbabilityError.
Table query(const DiscreteModel& model, const Regime& regime, const std::vector<std::string>& dependents,
            const std::vector<std::pair<std::string, int>>& conditioners, const InterventionLaws& laws = {});

/// Numeric value of `e` for every assignment of its free variables and free
/// symbols. Axes: free variables sorted by name, then free symbols sorted by name.
Table eval_expr(const DiscreteModel& model, const Expr& e, const InterventionLaws& laws = {});

/// Evaluates many expressions against one model, sharing regime joints and
/// marginal tables between them.
class ExprEvaluator {
 public:
  explicit ExprEvaluator(const DiscreteModel& model, const InterventionLaws& laws = {});
  ~ExprEvaluator();
  ExprEvaluator(const ExprEvaluator&) = delete;
  ExprEvaluator& operator=(const ExprEvaluator&) = delete;

  Table operator()(const Expr& e);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Dirichlet(concentration) rows for every base variable.
DiscreteModel random_model(const Swig& swig, std::uint64_t seed, double concentration = 1.0);

struct Dataset {
  std::vector<std::string> names;
  std::vector<int> levels;
  /// Row-major, names.size() values per row.
  std::vector<int> cells;

  std::size_t rows() const { return names.empty() ? 0 : cells.size() / names.size(); }
  int at(std::size_t row, std::size_t col) const { return cells[row * names.size() + col]; }
  std::optional<std::size_t> column(std::string_view name) const;
};

/// Ancestral sampling of all swig variables under `regime`. Active
/// intervention nodes are drawn uniformly.
Dataset sample(const DiscreteModel& model, const Regime& regime, std::size_t n, std::uint64_t seed);

void write_csv(std::ostream& os, const Dataset& data);

/// Evaluates a q_0-only expression with each term replaced by its empirical
/// conditional frequency, add-one smoothed.
Table plugin_estimate(const Expr& e, const Dataset& data);

nlohmann::json model_to_json(const DiscreteModel& model);
DiscreteModel model_from_json(const Swig& swig, const nlohmann::json& j);

}  // namespace swigid
