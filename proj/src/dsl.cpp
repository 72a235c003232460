#include "swigid/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <sstream>

#include "swigid/prob_expr.hpp"

namespace swigid {

namespace {

struct Token {
  enum Kind { ident, integer, punct, end } kind = end;
  std::string text;
  int line = 1;
  int column = 1;
};

class GraphLexer {
 public:
  explicit GraphLexer(std::string_view src) : src_(src) {}

  Token next() {
    skip();
    Token t;
    t.line = line_;
    t.column = column_;
    if (pos_ >= src_.size()) return t;
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      t.kind = Token::ident;
      while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        t.text += advance();
      while (pos_ < src_.size() && src_[pos_] == '\'') t.text += advance();
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || (c == '-' && peek_digit())) {
      t.kind = Token::integer;
      t.text += advance();
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) t.text += advance();
      return t;
    }
    t.kind = Token::punct;
    if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
      t.text = "->";
      advance();
      advance();
      return t;
    }
    if (std::string_view("{};@=").find(c) == std::string_view::npos)
      throw ParseError(std::string("unexpected character '") + c + "'", line_, column_);
    t.text = std::string(1, advance());
    return t;
  }

 private:
  bool peek_digit() const {
    return pos_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]));
  }

  char advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    return c;
  }

  void skip() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

class GraphParser {
 public:
  explicit GraphParser(std::string_view text) : lex_(text) { tok_ = lex_.next(); }

  BaseDag parse() {
    expect_word("graph");
    BaseDag g;
    g.name = ident("graph name");
    expect("{");
    std::vector<std::pair<std::optional<int>, std::string>> targets;
    std::map<std::string, Token> target_at;
    while (!is("}")) {
      if (tok_.kind == Token::end) fail("unterminated graph body, expected '}'");
      Token head = tok_;
      std::string word = ident("statement");
      if (word == "var") {
        g.variables.push_back(variable());
      } else if (word == "edge") {
        std::string from = ident("edge source");
        expect("->");
        std::string to = ident("edge target");
        g.edges.emplace_back(from, to);
      } else if (word == "target") {
        Token at = tok_;
        std::string name = ident("target name");
        std::optional<int> order;
        while (tok_.kind == Token::ident) {
          Token key = tok_;
          std::string k = ident("attribute");
          if (k != "order") throw ParseError("unknown target attribute '" + k + "'", key.line, key.column);
          if (order) throw ParseError("repeated attribute 'order'", key.line, key.column);
          expect("=");
          order = integer("order");
          if (*order < 1) throw ParseError("order must be at least 1", key.line, key.column);
        }
        targets.emplace_back(order, name);
        target_at.emplace(name, at);
      } else {
        throw ParseError("unknown statement '" + word + "'", head.line, head.column);
      }
      expect(";");
    }
    expect("}");
    if (tok_.kind != Token::end) fail("trailing input after graph");

    std::size_t with_order = std::count_if(targets.begin(), targets.end(), [](auto& t) { return t.first.has_value(); });
    if (with_order != 0) {
      if (with_order != targets.size()) fail_at(target_at.begin()->second, "either every target has an order or none");
      std::stable_sort(targets.begin(), targets.end(), [](auto& a, auto& b) { return *a.first < *b.first; });
      for (std::size_t i = 0; i < targets.size(); ++i)
        if (*targets[i].first != static_cast<int>(i + 1))
          fail_at(target_at.at(targets[i].second), "target orders must be 1..n without gaps or repeats");
    }
    for (auto& [order, name] : targets) g.targets.push_back(name);
    return g;
  }

 private:
  Variable variable() {
    Variable v;
    v.name = ident("variable name");
    if (is("@")) {
      advance();
      v.time = integer("time");
    }
    std::set<std::string> seen;
    while (tok_.kind == Token::ident) {
      Token key = tok_;
      std::string k = ident("attribute");
      if (!seen.insert(k).second) throw ParseError("repeated attribute '" + k + "'", key.line, key.column);
      if (k == "unobserved") {
        v.observed = false;
      } else if (k == "role") {
        expect("=");
        Token at = tok_;
        auto role = parse_role(ident("role"));
        if (!role) throw ParseError("unknown role '" + at.text + "'", at.line, at.column);
        v.role = *role;
      } else if (k == "levels") {
        expect("=");
        v.levels = integer("levels");
      } else {
        throw ParseError("unknown variable attribute '" + k + "'", key.line, key.column);
      }
    }
    return v;
  }

  bool is(std::string_view p) const { return tok_.kind == Token::punct && tok_.text == p; }
  void advance() { tok_ = lex_.next(); }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, tok_.line, tok_.column); }
  [[noreturn]] static void fail_at(const Token& t, const std::string& msg) { throw ParseError(msg, t.line, t.column); }

  std::string describe() const { return tok_.kind == Token::end ? "end of input" : "'" + tok_.text + "'"; }

  void expect(std::string_view p) {
    if (!is(p)) fail("expected '" + std::string(p) + "', found " + describe());
    advance();
  }

  void expect_word(std::string_view w) {
    if (tok_.kind != Token::ident || tok_.text != w) fail("expected '" + std::string(w) + "', found " + describe());
    advance();
  }

  std::string ident(const std::string& what) {
    if (tok_.kind != Token::ident) fail("expected " + what + ", found " + describe());
    std::string s = tok_.text;
    advance();
    return s;
  }

  int integer(const std::string& what) {
    if (tok_.kind != Token::integer) fail("expected integer " + what + ", found " + describe());
    int value = 0;
    try {
      value = std::stoi(tok_.text);
    } catch (const std::out_of_range&) {
      fail("integer out of range");
    }
    advance();
    return value;
  }

  GraphLexer lex_;
  Token tok_;
};

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string strip_word(std::string_view text, std::string_view word) {
  std::string s = trim(text);
  if (s.rfind(word, 0) == 0 && s.size() > word.size() && std::isspace(static_cast<unsigned char>(s[word.size()])))
    return trim(s.substr(word.size()));
  return s;
}

std::vector<std::string> split_names(std::string_view text, const std::string& where) {
  std::vector<std::string> out;
  std::string s = trim(text);
  if (s.empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ParseError("empty name in " + where, 1, 1);
    out.push_back(item);
  }
  return out;
}

}  // namespace

BaseDag parse_graph(std::string_view text) { return GraphParser(text).parse(); }

std::string emit_graph(const BaseDag& base) {
  std::ostringstream os;
  os << "graph " << base.name << " {\n";
  for (const auto& v : base.variables) {
    os << "  var " << v.name << " @" << v.time;
    if (v.role != Role::other) os << " role=" << to_string(v.role);
    if (v.levels != 2) os << " levels=" << v.levels;
    if (!v.observed) os << " unobserved";
    os << ";\n";
  }
  for (const auto& [from, to] : base.edges) os << "  edge " << from << " -> " << to << ";\n";
  for (const auto& t : base.targets) os << "  target " << t << ";\n";
  os << "}\n";
  return os.str();
}

BaseDag load_graph(std::string_view text) {
  BaseDag g = parse_graph(text);
  auto problems = validate(g);
  if (!problems.empty()) {
    std::string msg = "invalid graph '" + g.name + "':";
    for (const auto& p : problems) msg += "\n  " + p.rule + ": " + p.message;
    throw ModelError(msg);
  }
  return g;
}

Estimand parse_estimand(std::string_view text, const Swig& swig) {
  static const std::regex do_prefix(R"(\bdo\s+([A-Za-z_][A-Za-z0-9_]*))");
  std::string src = strip_word(text, "identify");
  std::string rewritten;
  auto begin = std::sregex_iterator(src.begin(), src.end(), do_prefix);
  std::size_t last = 0;
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    rewritten += src.substr(last, it->position() - last);
    rewritten += intervention_name((*it)[1].str());
    last = it->position() + it->length();
  }
  rewritten += src.substr(last);

  Term t = parse_term(rewritten);
  Estimand e{t.regime, t.dependents, t.conditioners};
  auto problems = check_estimand(swig, e);
  if (!problems.empty()) {
    std::string msg = "invalid estimand:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw ModelError(msg);
  }
  return e;
}

Regime parse_regime(std::string_view text) {
  std::string s = trim(text);
  if (!s.empty() && s[0] == 'q') s = trim(s.substr(1));
  auto number = [&](const std::string& item) {
    std::size_t used = 0;
    int v = -1;
    try {
      v = std::stoi(item, &used);
    } catch (const std::exception&) {
    }
    if (used != item.size() || v < 0 || v > Regime::max_interventions)
      throw ParseError("invalid regime '" + std::string(text) + "'", 1, 1);
    return v;
  };
  if (s.size() >= 2 && s.front() == '[' && s.back() == ']') return Regime::prefix(number(trim(s.substr(1, s.size() - 2))));
  if (s.size() >= 2 && s.front() == '{' && s.back() == '}') {
    std::vector<int> active;
    for (const auto& item : split_names(s.substr(1, s.size() - 2), "regime")) {
      int j = number(item);
      if (j < 1) throw ParseError("regime members start at 1", 1, 1);
      active.push_back(j);
    }
    return Regime::of(active);
  }
  return Regime::prefix(number(s));
}

CiQuery parse_ci_query(std::string_view text) {
  std::string s = strip_word(text, "dsep");
  auto colon = s.find(':');
  if (colon == std::string::npos) throw ParseError("expected ':' after the regime", 1, 1);
  CiQuery q;
  q.regime = parse_regime(s.substr(0, colon));
  std::string body = s.substr(colon + 1);
  auto indep = body.find("_||_");
  if (indep == std::string::npos) throw ParseError("expected '_||_'", 1, static_cast<int>(colon + 2));
  std::string rest = body.substr(indep + 4);
  auto bar = rest.find('|');
  q.x = split_names(body.substr(0, indep), "left-hand set");
  q.y = split_names(rest.substr(0, bar), "right-hand set");
  if (bar != std::string::npos) q.z = split_names(rest.substr(bar + 1), "conditioning set");
  if (q.x.empty() || q.y.empty()) throw ParseError("both sides of '_||_' need variables", 1, 1);
  return q;
}

std::string emit_dot(const Swig& swig, const Regime& regime) {
  DirectedGraph g = regime_graph(swig, regime);
  std::ostringstream os;
  os << "digraph \"" << swig.base().name << "\" {\n";
  os << "  label=\"" << regime.label() << "\";\n";
  for (int v = 0; v < swig.size(); ++v) {
    const auto& var = swig.variable(v);
    std::vector<std::string> attrs;
    if (swig.is_intervention_node(v)) {
      attrs.push_back("shape=box");
      auto j = swig.pair_index(v);
      attrs.push_back(regime.active(*j) ? "style=\"filled,bold\"" : "style=filled");
      attrs.push_back("fillcolor=lightgrey");
    } else if (!var.observed) {
      attrs.push_back("style=dashed");
    }
    os << "  \"" << var.name << "\"";
    if (!attrs.empty()) {
      os << " [";
      for (std::size_t i = 0; i < attrs.size(); ++i) os << (i ? ", " : "") << attrs[i];
      os << "]";
    }
    os << ";\n";
  }
  for (const auto& e : g.edges()) {
    os << "  \"" << swig.variable(e.from).name << "\" -> \"" << swig.variable(e.to).name << "\"";
    if (swig.is_intervention_node(e.to) && swig.is_target(e.from)) os << " [style=dotted, arrowhead=none]";
    os << ";\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace swigid
