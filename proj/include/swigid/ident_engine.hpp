#pragma once

// Rewrite calculus over probability expressions. Each rule either proves its
// side condition (a d-separation in the term's regime graph) or refuses.
// Recipes and searches chain rules into derivations ending in q0-only terms.

#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "swigid/graph_query.hpp"
#include "swigid/model_ir.hpp"
#include "swigid/prob_expr.hpp"

namespace swigid {

/// A rule whose precondition or side condition does not hold. `ci()` is the
/// failed independence when the refusal is graphical.
class RuleError : public std::runtime_error {
 public:
  explicit RuleError(const std::string& message, std::optional<CiQuery> ci = std::nullopt)
      : std::runtime_error(message), ci_(std::move(ci)) {}
  const std::optional<CiQuery>& ci() const { return ci_; }

 private:
  std::optional<CiQuery> ci_;
};

/// Malformed identification request: unknown strategy, bad variable list.
class IdentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Justification {
  std::optional<CiQuery> ci;
  std::string note;
};

/// One rule application. Expressions are kept flat (one sum over a product)
/// and positional: `term` indexes the factor that was rewritten.
struct DerivationStep {
  std::string rule;
  std::size_t term = 0;
  Expr input;
  Expr output;
  Justification justification;
};

// Rules. Each takes the current expression and returns the step producing
// the next one, or throws RuleError.

/// Sums the term over fresh binders for `vars`, which join its dependents.
DerivationStep rule_total_probability(const Swig& swig, const Expr& e, std::size_t term,
                                      const std::vector<std::string>& vars);

/// Chain rule over an ordered partition of the dependents (at least two
/// blocks): block i is conditioned on the blocks after it.
DerivationStep rule_product(const Swig& swig, const Expr& e, std::size_t term,
                            const std::vector<std::vector<std::string>>& blocks);

enum class CiAction { insert, remove, change };

struct CiEdit {
  CiAction action = CiAction::insert;
  std::string var;
  std::optional<ValueRef> value;
};

/// Inserts, removes or re-values a conditioner. Requires
/// dependents _||_ var | other conditioners in the term's regime.
DerivationStep rule_ci_modify(const Swig& swig, const Expr& e, std::size_t term, const CiEdit& edit);

/// Deactivates intervention j when X_j and Xo_j are conditioned on
/// syntactically equal values.
DerivationStep rule_consistency(const Swig& swig, const Expr& e, std::size_t term, int j);

/// Removes intervention nodes later than `cutoff` (a time) from the
/// conditioners and deactivates their interventions.
DerivationStep rule_drop_later(const Swig& swig, const Expr& e, std::size_t term, int cutoff);

/// In a q0 term, Xo carries no information beyond X: drops Xo next to an
/// equal-valued X and renames a lone Xo to X.
DerivationStep rule_redundancy(const Swig& swig, const Expr& e, std::size_t term);

/// Re-checks the graphical side condition of a recorded step.
bool recheck(const Swig& swig, const DerivationStep& step);

struct Strategy {
  enum class Kind { backdoor, frontdoor, sequential_backdoor, sequential_frontdoor, mediator_intervention, top_down, bottom_up };

  Kind kind = Kind::backdoor;
  /// Explicit adjustment / mediator set; nullopt means search for one.
  std::optional<std::vector<std::string>> vars;
  /// Largest introduced set for the searches.
  int depth = 6;
};

/// "backdoor", "backdoor:L", "frontdoor:M1", "top_down:4", ...
Strategy parse_strategy(std::string_view text);
std::string to_string(const Strategy& s);

enum class Status { identified, not_identified };

std::string_view to_string(Status s);

struct Derivation {
  Estimand estimand;
  std::string strategy;
  /// Intervention targets of the SWIG the steps live on.
  std::vector<std::string> targets;
  Status status = Status::not_identified;
  std::vector<DerivationStep> steps;
  /// Canonical q0 expression when identified, else where the attempt stopped.
  Expr final = Expr(Term{});
  std::optional<CiQuery> blocking;
  std::string message;
  /// Sub-derivations of a composition, each on its own SWIG.
  std::vector<Derivation> parts;
};

/// not_identified is a result; IdentError is thrown only for malformed input.
Derivation identify(const Swig& swig, const Estimand& estimand, const Strategy& strategy);

/// q_s(Y | Do=d) = sum_m q'(Y | Mo=m) q_s(M=m | Do=d), each factor identified
/// on its own SWIG (`mediators` splits the mediators instead of the doses).
Derivation compose_mediator_intervention(const Swig& doses, const Swig& mediators, const Estimand& estimand);

/// Mediators used when none are given: observed, untargeted variables at
/// time >= 1 downstream of an active intervention, outside the estimand.
std::vector<std::string> default_mediators(const Swig& swig, const Estimand& estimand);

struct VerifyOptions {
  int models = 100;
  std::uint64_t seed = 0;
  double tol = 1e-9;
  bool parallel = true;
};

struct StepCheck {
  std::string label;
  double max_deviation = 0.0;
  int models = 0;
  int skipped = 0;
  bool passed = true;
  std::string error;
};

struct VerifyReport {
  std::vector<StepCheck> steps;
  /// Final expression against the exact estimand.
  StepCheck final_check;
  bool chained = true;
  std::vector<VerifyReport> parts;
  bool passed = true;
};

/// Numeric audit on random models of `base` (seed + k for model k), using
/// the derivation's own target list to build each SWIG.
VerifyReport verify(const Derivation& d, const BaseDag& base, const VerifyOptions& options = {});

std::string format_report(const VerifyReport& report);
/// Step-by-step rewrite trace with one justification per line.
std::string format_trace(const Derivation& d);

nlohmann::json to_json(const Derivation& d);
Derivation derivation_from_json(const nlohmann::json& j);

nlohmann::json to_json(const CiQuery& q);
CiQuery ci_query_from_json(const nlohmann::json& j);

}  // namespace swigid
