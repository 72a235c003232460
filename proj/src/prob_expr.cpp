#include "swigid/prob_expr.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <sstream>

namespace swigid {

const Assignment* Term::find(std::string_view var) const {
  for (const auto& a : dependents)
    if (a.var == var) return &a;
  for (const auto& a : conditioners)
    if (a.var == var) return &a;
  return nullptr;
}

Term to_term(const Estimand& estimand) {
  return Term{estimand.regime, estimand.dependents, estimand.conditioners};
}

VariableOrder VariableOrder::of(const Swig& swig) {
  VariableOrder order;
  for (const auto& v : swig.variables()) order.time_[v.name] = v.time;
  return order;
}

int VariableOrder::time(std::string_view var) const {
  auto it = time_.find(var);
  return it == time_.end() ? 0 : it->second;
}

namespace {

using Renames = std::map<std::string, std::string>;

const std::string* symbol_of(const Assignment& a) {
  if (!a.value) return nullptr;
  if (const auto* s = std::get_if<Symbol>(&*a.value)) return &s->name;
  return nullptr;
}

template <class F>
void for_each_assignment(const Term& t, F&& f) {
  for (const auto& a : t.dependents) f(a);
  for (const auto& a : t.conditioners) f(a);
}

/// Walks terms with the set of symbols bound at that point.
void walk(const Expr& e, std::vector<std::string>& scope,
          const std::function<void(const Term&, const std::vector<std::string>&)>& visit) {
  if (const auto* t = e.term()) {
    visit(*t, scope);
  } else if (const auto* p = e.product()) {
    for (const auto& f : p->factors) walk(f, scope, visit);
  } else {
    const auto& s = *e.sum();
    std::size_t mark = scope.size();
    scope.insert(scope.end(), s.binders.begin(), s.binders.end());
    walk(s.body, scope, visit);
    scope.resize(mark);
  }
}

bool bound_in(const std::vector<std::string>& scope, const std::string& name) {
  return std::find(scope.begin(), scope.end(), name) != scope.end();
}

Term rename_term(Term t, const Renames& renames) {
  auto fix = [&](Assignment& a) {
    if (!a.value) return;
    if (auto* s = std::get_if<Symbol>(&*a.value)) {
      auto it = renames.find(s->name);
      if (it != renames.end()) s->name = it->second;
    }
  };
  for (auto& a : t.dependents) fix(a);
  for (auto& a : t.conditioners) fix(a);
  return t;
}

std::string fresh_name(std::string base, const std::set<std::string>& taken) {
  while (taken.count(base)) base += '\'';
  return base;
}

struct Flattener {
  std::set<std::string> taken;
  std::set<std::string> global_free;
  FlatExpr out;

  void run(const Expr& e, Renames renames) {
    if (const auto* t = e.term()) {
      out.factors.push_back(rename_term(*t, renames));
    } else if (const auto* p = e.product()) {
      for (const auto& f : p->factors) run(f, renames);
    } else {
      const auto& s = *e.sum();
      for (const auto& b : s.binders) {
        std::string name = b;
        bool clash = global_free.count(b) ||
                     std::find(out.binders.begin(), out.binders.end(), b) != out.binders.end();
        if (clash) name = fresh_name(b, taken);
        taken.insert(name);
        out.binders.push_back(name);
        renames[b] = name;
      }
      run(s.body, renames);
    }
  }
};

}  // namespace

std::set<std::string> free_variables(const Expr& e) {
  std::set<std::string> out;
  std::vector<std::string> scope;
  walk(e, scope, [&](const Term& t, const std::vector<std::string>&) {
    for_each_assignment(t, [&](const Assignment& a) {
      if (!a.value) out.insert(a.var);
    });
  });
  return out;
}

std::set<std::string> free_symbols(const Expr& e) {
  std::set<std::string> out;
  std::vector<std::string> scope;
  walk(e, scope, [&](const Term& t, const std::vector<std::string>& bound) {
    for_each_assignment(t, [&](const Assignment& a) {
      if (const auto* s = symbol_of(a); s && !bound_in(bound, *s)) out.insert(*s);
    });
  });
  return out;
}

std::set<std::string> all_symbols(const Expr& e) {
  std::set<std::string> out;
  std::vector<std::string> scope;
  std::function<void(const Expr&)> binders = [&](const Expr& x) {
    if (const auto* s = x.sum()) {
      out.insert(s->binders.begin(), s->binders.end());
      binders(s->body);
    } else if (const auto* p = x.product()) {
      for (const auto& f : p->factors) binders(f);
    }
  };
  binders(e);
  walk(e, scope, [&](const Term& t, const std::vector<std::string>&) {
    for_each_assignment(t, [&](const Assignment& a) {
      if (const auto* s = symbol_of(a)) out.insert(*s);
    });
  });
  return out;
}

std::set<Regime> regimes_used(const Expr& e) {
  std::set<Regime> out;
  std::vector<std::string> scope;
  walk(e, scope, [&](const Term& t, const std::vector<std::string>&) { out.insert(t.regime); });
  return out;
}

std::set<std::string> variables_used(const Expr& e) {
  std::set<std::string> out;
  std::vector<std::string> scope;
  walk(e, scope, [&](const Term& t, const std::vector<std::string>&) {
    for_each_assignment(t, [&](const Assignment& a) { out.insert(a.var); });
  });
  return out;
}

void validate_expr(const Expr& e) {
  std::function<void(const Expr&, std::vector<std::string>&)> check = [&](const Expr& x,
                                                                          std::vector<std::string>& scope) {
    if (const auto* t = x.term()) {
      if (t->dependents.empty()) throw ExprError("term " + to_text(*t) + " has no dependent variable");
      std::set<std::string> seen;
      for_each_assignment(*t, [&](const Assignment& a) {
        if (!seen.insert(a.var).second)
          throw ExprError("variable '" + a.var + "' appears twice in " + to_text(*t));
      });
    } else if (const auto* p = x.product()) {
      if (p->factors.empty()) throw ExprError("empty product");
      for (const auto& f : p->factors) check(f, scope);
    } else {
      const auto& s = *x.sum();
      if (s.binders.empty()) throw ExprError("sum without binders");
      std::set<std::string> unique(s.binders.begin(), s.binders.end());
      if (unique.size() != s.binders.size()) throw ExprError("duplicate binder in sum");
      std::set<std::string> used;
      std::vector<std::string> inner;
      walk(s.body, inner, [&](const Term& t, const std::vector<std::string>& shadow) {
        for_each_assignment(t, [&](const Assignment& a) {
          if (const auto* sym = symbol_of(a); sym && !bound_in(shadow, *sym)) used.insert(*sym);
        });
      });
      for (const auto& b : s.binders)
        if (!used.count(b)) throw ExprError("binder '" + b + "' is never used");
      std::size_t mark = scope.size();
      scope.insert(scope.end(), s.binders.begin(), s.binders.end());
      check(s.body, scope);
      scope.resize(mark);
    }
  };
  std::vector<std::string> scope;
  check(e, scope);
}

FlatExpr flatten(const Expr& e) {
  Flattener f;
  f.taken = all_symbols(e);
  f.global_free = free_symbols(e);
  f.run(e, {});
  return f.out;
}

Expr to_expr(const FlatExpr& flat) {
  if (flat.factors.empty()) throw ExprError("expression without factors");
  std::vector<Expr> factors(flat.factors.begin(), flat.factors.end());
  Expr body = factors.size() == 1 ? factors.front() : Expr(Product{std::move(factors)});
  if (flat.binders.empty()) return body;
  return Sum{flat.binders, std::move(body)};
}

namespace {

std::string lowercase(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

struct Canonicalizer {
  const VariableOrder& order;
  std::set<std::string> bound;
  Renames names;

  std::string value_key(const Assignment& a, bool erase) const {
    if (!a.value) return "_";
    if (const auto* lit = std::get_if<Literal>(&*a.value)) return "#" + std::to_string(lit->level);
    const auto& s = std::get<Symbol>(*a.value).name;
    if (!bound.count(s)) return "$" + s;
    if (erase) return "%";
    auto it = names.find(s);
    return "%" + (it == names.end() ? s : it->second);
  }

  std::string key(const Term& t, bool erase) const {
    std::ostringstream os;
    os << t.regime.mask() << '(';
    for (const auto& a : t.dependents) os << order.time(a.var) << ':' << a.var << '=' << value_key(a, erase) << ',';
    os << '|';
    for (const auto& a : t.conditioners) os << order.time(a.var) << ':' << a.var << '=' << value_key(a, erase) << ',';
    os << ')';
    return os.str();
  }

  void sort_factors(std::vector<Term>& factors) const {
    std::vector<std::pair<std::pair<std::string, std::string>, Term>> keyed;
    for (auto& t : factors) keyed.push_back({{key(t, true), key(t, false)}, std::move(t)});
    std::stable_sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    factors.clear();
    for (auto& [k, t] : keyed) factors.push_back(std::move(t));
  }

  Renames assign_names(const std::vector<Term>& factors, const std::set<std::string>& free,
                       std::vector<std::string>& first_use) const {
    Renames out;
    std::set<std::string> taken = free;
    first_use.clear();
    for (const auto& t : factors) {
      for_each_assignment(t, [&](const Assignment& a) {
        const auto* s = symbol_of(a);
        if (!s || !bound.count(*s) || out.count(*s)) return;
        std::string name = fresh_name(lowercase(a.var), taken);
        taken.insert(name);
        out[*s] = name;
        first_use.push_back(*s);
      });
    }
    return out;
  }
};

}  // namespace

Expr canonicalize(const Expr& e, const VariableOrder& order) {
  validate_expr(e);
  FlatExpr flat = flatten(e);

  auto by_time = [&](const Assignment& a, const Assignment& b) {
    int ta = order.time(a.var), tb = order.time(b.var);
    return ta != tb ? ta < tb : a.var < b.var;
  };
  for (auto& t : flat.factors) {
    std::sort(t.dependents.begin(), t.dependents.end(), by_time);
    std::sort(t.conditioners.begin(), t.conditioners.end(), by_time);
  }

  Canonicalizer c{order, {flat.binders.begin(), flat.binders.end()}, {}};
  std::set<std::string> free;
  for (const auto& t : flat.factors)
    for_each_assignment(t, [&](const Assignment& a) {
      if (const auto* s = symbol_of(a); s && !c.bound.count(*s)) free.insert(*s);
    });

  std::vector<std::string> first_use;
  for (int round = 0; round < 8; ++round) {
    c.sort_factors(flat.factors);
    Renames next = c.assign_names(flat.factors, free, first_use);
    if (next == c.names) break;
    c.names = std::move(next);
  }

  FlatExpr out;
  for (const auto& b : first_use) out.binders.push_back(c.names.at(b));
  for (const auto& t : flat.factors) out.factors.push_back(rename_term(t, c.names));
  return to_expr(out);
}

bool struct_eq(const Expr& a, const Expr& b, const VariableOrder& order) {
  return to_text(canonicalize(a, order)) == to_text(canonicalize(b, order));
}

std::string to_text(const Term& t) {
  std::ostringstream os;
  auto items = [&](const std::vector<Assignment>& list) {
    for (std::size_t i = 0; i < list.size(); ++i) {
      os << (i ? ", " : "") << list[i].var;
      if (list[i].value) os << '=' << to_string(*list[i].value);
    }
  };
  os << t.regime.label() << '(';
  items(t.dependents);
  if (!t.conditioners.empty()) {
    os << " | ";
    items(t.conditioners);
  }
  os << ')';
  return os.str();
}

std::string to_text(const Expr& e) {
  if (const auto* t = e.term()) return to_text(*t);
  if (const auto* s = e.sum()) {
    std::string out = "sum{";
    for (std::size_t i = 0; i < s->binders.size(); ++i) out += (i ? "," : "") + s->binders[i];
    return out + "} " + to_text(s->body);
  }
  std::string out;
  const auto& p = *e.product();
  for (std::size_t i = 0; i < p.factors.size(); ++i) {
    const auto& f = p.factors[i];
    if (i) out += " * ";
    if (f.term())
      out += to_text(f);
    else
      out += "(" + to_text(f) + ")";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct Token {
  enum Kind { ident, integer, punct, end } kind = end;
  std::string text;
  int line = 1;
  int column = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) { advance(); }

  const Token& peek() const { return current_; }

  Token take() {
    Token t = current_;
    advance();
    return t;
  }

  bool accept(std::string_view punct) {
    if (current_.kind == Token::punct && current_.text == punct) {
      advance();
      return true;
    }
    return false;
  }

  Token expect(std::string_view punct) {
    if (current_.kind != Token::punct || current_.text != punct) fail("expected '" + std::string(punct) + "'");
    return take();
  }

  Token expect_ident(std::string_view what) {
    if (current_.kind != Token::ident) fail("expected " + std::string(what));
    return take();
  }

  [[noreturn]] void fail(const std::string& message) const {
    std::string found = current_.kind == Token::end ? "end of input" : "'" + current_.text + "'";
    throw ParseError(message + ", found " + found, current_.line, current_.column);
  }

 private:
  void advance() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) step();
    current_ = Token{};
    current_.line = line_;
    current_.column = column_;
    if (pos_ >= text_.size()) return;
    char c = text_[pos_];
    auto is_word = [](char ch) { return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_'; };
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      current_.kind = Token::ident;
      while (pos_ < text_.size() && is_word(text_[pos_])) current_.text += step();
      while (pos_ < text_.size() && text_[pos_] == '\'') current_.text += step();
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      current_.kind = Token::integer;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) current_.text += step();
    } else if (std::string_view("(){}[],|*=:").find(c) != std::string_view::npos) {
      current_.kind = Token::punct;
      current_.text = step();
    } else {
      throw ParseError(std::string("unexpected character '") + c + "'", line_, column_);
    }
  }

  char step() {
    char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    return c;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
  Token current_;
};

bool is_plain_ident(const std::string& s) { return !s.empty() && s.back() != '\''; }

class ExprParser {
 public:
  explicit ExprParser(std::string_view text) : lex_(text) {}

  Expr parse_all() {
    Expr e = expr();
    if (lex_.peek().kind != Token::end) lex_.fail("unexpected trailing input");
    return e;
  }

  Term parse_term_only() {
    Term t = term();
    if (lex_.peek().kind != Token::end) lex_.fail("unexpected trailing input");
    return t;
  }

 private:
  Expr expr() {
    if (lex_.peek().kind == Token::ident && lex_.peek().text == "sum") {
      lex_.take();
      lex_.expect("{");
      std::vector<std::string> binders;
      do {
        binders.push_back(lex_.expect_ident("binder symbol").text);
      } while (lex_.accept(","));
      lex_.expect("}");
      return Sum{std::move(binders), expr()};
    }
    std::vector<Expr> factors;
    factors.push_back(factor());
    while (lex_.accept("*")) factors.push_back(factor());
    if (factors.size() == 1) return factors.front();
    return Product{std::move(factors)};
  }

  Expr factor() {
    if (lex_.accept("(")) {
      Expr e = expr();
      lex_.expect(")");
      return e;
    }
    return term();
  }

  Regime regime_after_q(const Token& head) {
    std::string rest = head.text.substr(1);
    if (!rest.empty()) {
      if (!std::all_of(rest.begin(), rest.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
        throw ParseError("expected a term 'q<regime>(...)'", head.line, head.column);
      return Regime::prefix(std::stoi(rest));
    }
    if (lex_.accept("[")) {
      Token n = lex_.take();
      if (n.kind != Token::integer) throw ParseError("expected regime index", n.line, n.column);
      lex_.expect("]");
      return Regime::prefix(std::stoi(n.text));
    }
    if (lex_.accept("{")) {
      std::vector<int> active;
      if (!lex_.accept("}")) {
        do {
          Token n = lex_.take();
          if (n.kind != Token::integer) throw ParseError("expected intervention index", n.line, n.column);
          active.push_back(std::stoi(n.text));
        } while (lex_.accept(","));
        lex_.expect("}");
      }
      return Regime::of(active);
    }
    lex_.fail("expected regime after 'q'");
  }

  Term term() {
    Token head = lex_.expect_ident("term 'q<regime>(...)'");
    if (head.text.empty() || head.text[0] != 'q')
      throw ParseError("expected a term 'q<regime>(...)'", head.line, head.column);
    Term t;
    t.regime = regime_after_q(head);
    lex_.expect("(");
    t.dependents = items();
    if (lex_.accept("|")) t.conditioners = items();
    lex_.expect(")");
    return t;
  }

  std::vector<Assignment> items() {
    std::vector<Assignment> out;
    do {
      Token var = lex_.expect_ident("variable");
      if (!is_plain_ident(var.text)) throw ParseError("variable names cannot carry primes", var.line, var.column);
      Assignment a{var.text, std::nullopt};
      if (lex_.accept("=")) {
        Token v = lex_.take();
        if (v.kind == Token::integer)
          a.value = Literal{std::stoi(v.text)};
        else if (v.kind == Token::ident)
          a.value = Symbol{v.text};
        else
          throw ParseError("expected a level or a symbol", v.line, v.column);
      }
      out.push_back(std::move(a));
    } while (lex_.accept(","));
    return out;
  }

  Lexer lex_;
};

}  // namespace

Expr parse_expr(std::string_view text) { return ExprParser(text).parse_all(); }

Term parse_term(std::string_view text) { return ExprParser(text).parse_term_only(); }

// ---------------------------------------------------------------------------
// JSON

namespace {

nlohmann::json assignment_json(const Assignment& a) {
  nlohmann::json j{{"var", a.var}};
  if (a.value) {
    if (const auto* lit = std::get_if<Literal>(&*a.value))
      j["value"] = {{"level", lit->level}};
    else
      j["value"] = {{"symbol", std::get<Symbol>(*a.value).name}};
  }
  return j;
}

Assignment assignment_from_json(const nlohmann::json& j) {
  Assignment a{j.at("var").get<std::string>(), std::nullopt};
  if (j.contains("value")) {
    const auto& v = j.at("value");
    if (v.contains("level"))
      a.value = Literal{v.at("level").get<int>()};
    else
      a.value = Symbol{v.at("symbol").get<std::string>()};
  }
  return a;
}

}  // namespace

nlohmann::json to_json(const Expr& e) {
  if (const auto* t = e.term()) {
    nlohmann::json deps = nlohmann::json::array(), conds = nlohmann::json::array();
    for (const auto& a : t->dependents) deps.push_back(assignment_json(a));
    for (const auto& a : t->conditioners) conds.push_back(assignment_json(a));
    return {{"node", "term"}, {"regime", t->regime.members()}, {"dependents", deps}, {"conditioners", conds}};
  }
  if (const auto* s = e.sum()) return {{"node", "sum"}, {"binders", s->binders}, {"body", to_json(s->body)}};
  nlohmann::json factors = nlohmann::json::array();
  for (const auto& f : e.product()->factors) factors.push_back(to_json(f));
  return {{"node", "product"}, {"factors", factors}};
}

Expr expr_from_json(const nlohmann::json& j) {
  const auto node = j.at("node").get<std::string>();
  if (node == "term") {
    Term t;
    t.regime = Regime::of(j.at("regime").get<std::vector<int>>());
    for (const auto& a : j.at("dependents")) t.dependents.push_back(assignment_from_json(a));
    for (const auto& a : j.at("conditioners")) t.conditioners.push_back(assignment_from_json(a));
    return t;
  }
  if (node == "sum") return Sum{j.at("binders").get<std::vector<std::string>>(), expr_from_json(j.at("body"))};
  if (node == "product") {
    std::vector<Expr> factors;
    for (const auto& f : j.at("factors")) factors.push_back(expr_from_json(f));
    return Product{std::move(factors)};
  }
  throw ExprError("unknown expression node '" + node + "'");
}

}  // namespace swigid
