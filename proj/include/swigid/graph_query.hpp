#pragma once

// Graph queries on regime graphs: ordering, ancestry, d-separation and the
// regime-indexed conditional-independence test behind every rewrite rule.

#include <optional>
#include <string>
#include <vector>

#include "swigid/model_ir.hpp"

namespace swigid {

/// Kahn order with ties broken by index; nullopt when the graph has a cycle.
std::optional<std::vector<int>> topological_order(const DirectedGraph& g);

/// Membership masks (size g.size()); the seed nodes are included.
std::vector<bool> ancestors(const DirectedGraph& g, const std::vector<int>& seeds);
std::vector<bool> descendants(const DirectedGraph& g, const std::vector<int>& seeds);

/// Reachable-set (Bayes-ball) d-separation of x and y given z.
bool d_separated(const DirectedGraph& g, const std::vector<int>& x, const std::vector<int>& y,
                 const std::vector<int>& z);

/// X ⫫ Y | Z in the distribution q_s.
struct CiQuery {
  Regime regime;
  std::vector<std::string> x;
  std::vector<std::string> y;
  std::vector<std::string> z;

  friend bool operator==(const CiQuery&, const CiQuery&) = default;
};

/// "q1: Y1 _||_ D1 | Do1, L"
std::string to_string(const CiQuery& q);

/// Throws ModelError for unknown variables, overlapping sets or a regime
/// naming undeclared interventions.
bool d_separated(const Swig& swig, const CiQuery& q);

/// True when every intervention node with time > `t` can be removed from the
/// estimand's conditioners and the regime truncated to interventions at time <= t:
/// the dependents are d-separated from the dropped nodes given the remaining
/// conditioners, and no remaining variable descends from a dropped node.
bool later_interventions_droppable(const Swig& swig, const Estimand& estimand, int t);

class DiscreteModel;

struct CiCheck {
  bool independent = true;
  double max_deviation = 0.0;
  /// Conditioning assignments skipped for probability below 1e-12.
  int skipped = 0;
};

/// Exhaustive check of max |P(x,y|z) - P(x|z)P(y|z)| <= tol under the
/// regime joint of `model`.
CiCheck brute_force_ci(const DiscreteModel& model, const CiQuery& q, double tol);

}  // namespace swigid
