#pragma once

// Probability expressions: regime-tagged conditional terms, sums over bound
// values and products. This is the object the rewrite engine transforms.
//
// Text grammar (round-trips through to_text / parse_expr):
//
//   expr    := 'sum' '{' sym (',' sym)* '}' expr | factor ('*' factor)*
//   factor  := term | '(' expr ')'
//   term    := 'q' regime '(' items ['|' items] ')'
//   regime  := INT | '[' INT ']' | '{' [INT (',' INT)*] '}'
//   items   := item (',' item)*
//   item    := IDENT ['=' (INT | sym)]
//   sym     := IDENT followed by any number of '\''
//
// A symbol bound by an enclosing sum ranges over the levels of the variable it
// is attached to; any other symbol is a free parameter of the expression.

#include <map>
#include <memory>
#include <nlohmann/json.hpp>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "swigid/diagnostics.hpp"
#include "swigid/model_ir.hpp"

namespace swigid {

class ExprError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// q_s(dependents | conditioners).
struct Term {
  Regime regime;
  std::vector<Assignment> dependents;
  std::vector<Assignment> conditioners;

  const Assignment* find(std::string_view var) const;
  bool mentions(std::string_view var) const { return find(var) != nullptr; }

  friend bool operator==(const Term&, const Term&) = default;
};

Term to_term(const Estimand& estimand);

struct Sum;
struct Product;

class Expr {
 public:
  using Node = std::variant<Term, Sum, Product>;

  Expr(Term term);
  Expr(Sum sum);
  Expr(Product product);

  const Node& node() const;
  const Term* term() const;
  const Sum* sum() const;
  const Product* product() const;

 private:
  std::shared_ptr<const Node> node_;
};

struct Sum {
  std::vector<std::string> binders;
  Expr body;
};

struct Product {
  std::vector<Expr> factors;
};

inline Expr::Expr(Term term) : node_(std::make_shared<const Node>(std::move(term))) {}
inline Expr::Expr(Sum sum) : node_(std::make_shared<const Node>(std::move(sum))) {}
inline Expr::Expr(Product product) : node_(std::make_shared<const Node>(std::move(product))) {}
inline const Expr::Node& Expr::node() const { return *node_; }
inline const Term* Expr::term() const { return std::get_if<Term>(node_.get()); }
inline const Sum* Expr::sum() const { return std::get_if<Sum>(node_.get()); }
inline const Product* Expr::product() const { return std::get_if<Product>(node_.get()); }

/// Time index per variable name; unknown names sort as time 0.
class VariableOrder {
 public:
  VariableOrder() = default;
  static VariableOrder of(const Swig& swig);
  int time(std::string_view var) const;

 private:
  std::map<std::string, int, std::less<>> time_;
};

/// Sum over `binders` of the product of `factors`. Every expression has
/// this shape once sums are hoisted out of products.
struct FlatExpr {
  std::vector<std::string> binders;
  std::vector<Term> factors;
};

/// Hoists sums and flattens products. Bound symbols that clash with another
/// symbol in scope are renamed by appending primes; other names are kept.
FlatExpr flatten(const Expr& e);
/// Term, Product or Sum(Product) as appropriate; factor order is kept.
Expr to_expr(const FlatExpr& flat);

/// Throws ExprError: repeated variable in a term, dependent also conditioned,
/// unused or duplicate binder, empty product.
void validate_expr(const Expr& e);

/// Flattened form with dependents and conditioners sorted by (time, name),
/// factors sorted, and bound symbols renamed in first-use order. Idempotent.
Expr canonicalize(const Expr& e, const VariableOrder& order = {});
bool struct_eq(const Expr& a, const Expr& b, const VariableOrder& order = {});

/// Variables appearing without a value (the axes of a distribution-valued expression).
std::set<std::string> free_variables(const Expr& e);
/// Symbols not bound by any enclosing sum (parameters such as d1).
std::set<std::string> free_symbols(const Expr& e);
std::set<Regime> regimes_used(const Expr& e);
std::set<std::string> variables_used(const Expr& e);
/// Every symbol name, bound or free.
std::set<std::string> all_symbols(const Expr& e);

std::string to_text(const Term& t);
std::string to_text(const Expr& e);
Expr parse_expr(std::string_view text);
Term parse_term(std::string_view text);

nlohmann::json to_json(const Expr& e);
Expr expr_from_json(const nlohmann::json& j);

}  // namespace swigid
