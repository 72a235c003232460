#pragma once

// Base causal DAGs, single-world intervention graphs (node splitting),
// regimes and estimands.

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace swigid {

enum class Role { covariate, target, intervention, mediator, outcome, other };

std::string_view to_string(Role role);
std::optional<Role> parse_role(std::string_view text);

struct Variable {
  std::string name;
  int time = 0;
  Role role = Role::other;
  bool observed = true;
  int levels = 2;

  friend bool operator==(const Variable&, const Variable&) = default;
};

/// Thrown when a graph cannot be built or split.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Pre-intervention causal DAG as written by the user. It may be invalid;
/// `validate` reports what is wrong and `to_swig` refuses invalid input.
struct BaseDag {
  std::string name;
  std::vector<Variable> variables;
  std::vector<std::pair<std::string, std::string>> edges;
  /// Intervention targets; position i carries intervention index i + 1.
  std::vector<std::string> targets;

  std::optional<int> find(std::string_view var) const;
  const Variable& variable(std::string_view var) const;
  Variable& variable(std::string_view var);

  friend bool operator==(const BaseDag&, const BaseDag&) = default;
};

struct Violation {
  std::string rule;
  std::string message;
};

std::vector<Violation> validate(const BaseDag& base);

/// Name of the intervention node split off a target: "D1" -> "Do1".
std::string intervention_name(std::string_view target);

struct Edge {
  int from = 0;
  int to = 0;
  auto operator<=>(const Edge&) const = default;
};

class DirectedGraph {
 public:
  DirectedGraph() = default;
  explicit DirectedGraph(int n) : parents_(n), children_(n) {}

  void add_edge(int from, int to);
  int size() const { return static_cast<int>(parents_.size()); }
  std::size_t num_edges() const { return num_edges_; }
  const std::vector<int>& parents(int v) const { return parents_[v]; }
  const std::vector<int>& children(int v) const { return children_[v]; }
  bool has_edge(int from, int to) const;
  std::vector<Edge> edges() const;

 private:
  std::vector<std::vector<int>> parents_;
  std::vector<std::vector<int>> children_;
  std::size_t num_edges_ = 0;
};

/// Set of active interventions, identified by 1-based intervention index.
class Regime {
 public:
  static constexpr int max_interventions = 63;

  Regime() = default;
  static Regime prefix(int t);
  static Regime of(const std::vector<int>& active);

  bool active(int j) const { return j >= 1 && j <= max_interventions && (mask_ >> j) & 1U; }
  bool empty() const { return mask_ == 0; }
  int size() const;
  std::vector<int> members() const;
  /// t when the regime is {1..t}.
  std::optional<int> prefix_length() const;
  Regime with(int j) const;
  Regime without(int j) const;
  std::uint64_t mask() const { return mask_; }

  /// "q0", "q2" for prefixes, "q{1,3}" otherwise.
  std::string label() const;

  auto operator<=>(const Regime&) const = default;

 private:
  std::uint64_t mask_ = 0;
};

struct SplitPair {
  int target = 0;
  int intervention = 0;
};

/// A base DAG after node splitting. Variables keep their base indices;
/// intervention nodes are appended in intervention order.
class Swig {
 public:
  const BaseDag& base() const { return base_; }
  const std::vector<Variable>& variables() const { return variables_; }
  const Variable& variable(int v) const { return variables_[v]; }
  int size() const { return static_cast<int>(variables_.size()); }
  /// Regime-0 graph: children of each target read the intervention node.
  const DirectedGraph& graph() const { return graph_; }
  const std::vector<SplitPair>& pairs() const { return pairs_; }
  int num_interventions() const { return static_cast<int>(pairs_.size()); }

  std::optional<int> find(std::string_view name) const;
  int index_of(std::string_view name) const;

  int target_node(int j) const { return pairs_.at(j - 1).target; }
  int intervention_node(int j) const { return pairs_.at(j - 1).intervention; }
  /// Intervention index j if `v` is a target or an intervention node.
  std::optional<int> pair_index(int v) const;
  bool is_intervention_node(int v) const;
  bool is_target(int v) const;

 private:
  friend Swig to_swig(const BaseDag& base);
  BaseDag base_;
  std::vector<Variable> variables_;
  DirectedGraph graph_;
  std::vector<SplitPair> pairs_;
};

Swig to_swig(const BaseDag& base);

/// Swig edges minus the copy edge X_t -> Xo_t for every active t.
DirectedGraph regime_graph(const Swig& swig, const Regime& regime);

struct Literal {
  int level = 0;
  auto operator<=>(const Literal&) const = default;
};

struct Symbol {
  std::string name;
  auto operator<=>(const Symbol&) const = default;
};

using ValueRef = std::variant<Literal, Symbol>;

std::string to_string(const ValueRef& value);

/// A variable, optionally pinned to a value. Unpinned means
/// distribution-valued: the expression ranges over all its levels.
struct Assignment {
  std::string var;
  std::optional<ValueRef> value;

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

struct Estimand {
  Regime regime;
  std::vector<Assignment> dependents;
  std::vector<Assignment> conditioners;

  friend bool operator==(const Estimand&, const Estimand&) = default;
};

/// Empty when the estimand is well-formed against `swig`.
std::vector<std::string> check_estimand(const Swig& swig, const Estimand& estimand);

}  // namespace swigid
