#include <gtest/gtest.h>

#include "swigid/diagnostics.hpp"
#include "swigid/fixtures.hpp"
#include "swigid/prob_expr.hpp"

using namespace swigid;

namespace {

const char* const kSamples[] = {
    "q0(Y1)",
    "q1(Y1 | Do1=d1)",
    "q{1,3}(Y3, M1=0 | Do1=d1, Do3=1)",
    "sum{l} q0(Y1 | L=l, D1=d1) * q0(L=l)",
    "sum{m,e} q0(Y1 | D1=e, M1=m) * q0(D1=e) * q0(M1=m | D1=d1)",
    "sum{a} q0(A=a) * (sum{b} q0(B=b | A=a) * q0(Y | B=b))",
    "sum{x} q0(Y | X=x) * (sum{x} q0(X=x))",
};

VariableOrder longitudinal_order() { return VariableOrder::of(to_swig(fixtures::longitudinal(2))); }

}  // namespace

TEST(ExprText, ParseEmitRoundTrip) {
  for (const char* s : kSamples) {
    Expr e = parse_expr(s);
    EXPECT_EQ(to_text(parse_expr(to_text(e))), to_text(e)) << s;
  }
}

TEST(ExprText, ParseErrorsCarryPosition) {
  try {
    parse_expr("q0(Y1 | D1=)");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1);
    EXPECT_GT(e.column(), 1);
  }
  EXPECT_THROW(parse_expr("p0(Y)"), ParseError);
  EXPECT_THROW(parse_expr("q0(Y'"), ParseError);
  EXPECT_THROW(parse_expr("q0(Y) *"), ParseError);
}

TEST(ExprJson, RoundTrip) {
  for (const char* s : kSamples) {
    Expr e = parse_expr(s);
    EXPECT_EQ(to_text(expr_from_json(to_json(e))), to_text(e)) << s;
  }
}

TEST(Validate, RejectsMalformedExpressions) {
  EXPECT_THROW(validate_expr(parse_expr("sum{z} q0(Y)")), ExprError);
  EXPECT_THROW(validate_expr(parse_expr("q0(Y | Y=1)")), ExprError);
  EXPECT_THROW(validate_expr(parse_expr("sum{x,x} q0(Y=x)")), ExprError);
  EXPECT_THROW(validate_expr(Expr(Term{})), ExprError);
  EXPECT_NO_THROW(validate_expr(parse_expr(kSamples[4])));
}

TEST(Symbols, FreeAndBound) {
  Expr e = parse_expr("sum{m} q0(Y1 | D1=d1, M1=m) * q0(M1=m | L=0)");
  EXPECT_EQ(free_symbols(e), (std::set<std::string>{"d1"}));
  EXPECT_EQ(free_variables(e), (std::set<std::string>{"Y1"}));
  EXPECT_EQ(all_symbols(e), (std::set<std::string>{"d1", "m"}));
  EXPECT_EQ(variables_used(e), (std::set<std::string>{"D1", "L", "M1", "Y1"}));
  EXPECT_EQ(regimes_used(e), (std::set<Regime>{Regime{}}));
}

TEST(Flatten, PrenexWithCaptureAvoidance) {
  FlatExpr f = flatten(parse_expr("sum{x} q0(Y | X=x) * (sum{x} q0(X=x))"));
  ASSERT_EQ(f.binders.size(), 2u);
  EXPECT_NE(f.binders[0], f.binders[1]);
  ASSERT_EQ(f.factors.size(), 2u);
  validate_expr(to_expr(f));
}

TEST(Canonicalize, Idempotent) {
  VariableOrder order = longitudinal_order();
  for (const char* s : kSamples) {
    Expr once = canonicalize(parse_expr(s), order);
    EXPECT_EQ(to_text(canonicalize(once, order)), to_text(once)) << s;
  }
}

TEST(Canonicalize, InvariantToRenamingAndOrder) {
  VariableOrder order = longitudinal_order();
  Expr a = parse_expr("sum{m,e} q0(Y1 | D1=e, M1=m) * q0(D1=e) * q0(M1=m | D1=d1)");
  Expr b = parse_expr("sum{u,v} q0(M1=v | D1=d1) * q0(D1=u) * q0(Y1 | M1=v, D1=u)");
  EXPECT_TRUE(struct_eq(a, b, order));
  EXPECT_EQ(to_text(canonicalize(a, order)), to_text(canonicalize(b, order)));
}

TEST(Canonicalize, DistinguishesDifferentFormulas) {
  VariableOrder order = longitudinal_order();
  Expr a = parse_expr("sum{l} q0(Y1 | L=l, D1=d1) * q0(L=l)");
  EXPECT_FALSE(struct_eq(a, parse_expr("sum{l} q0(Y1 | L=l, D1=d1) * q0(L=l | D1=d1)"), order));
  EXPECT_FALSE(struct_eq(a, parse_expr("sum{l} q1(Y1 | L=l, Do1=d1) * q0(L=l)"), order));
  EXPECT_FALSE(struct_eq(a, parse_expr("sum{l} q0(Y1 | L=l, D1=0) * q0(L=l)"), order));
  // A free symbol is not a bound one.
  EXPECT_FALSE(struct_eq(parse_expr("q0(Y1 | D1=d1)"), parse_expr("q0(Y1 | D1=e)"), order));
}

TEST(Canonicalize, OrdersAssignmentsByTime) {
  Expr e = canonicalize(parse_expr("q0(Y2 | M2, M1, D2=d2, D1=d1)"), longitudinal_order());
  EXPECT_EQ(to_text(e), "q0(Y2 | D1=d1, M1, D2=d2, M2)");
}

TEST(Term, FromEstimand) {
  Estimand est{Regime::prefix(1), {{"Y1", std::nullopt}}, {{"Do1", Symbol{"d1"}}}};
  Term t = to_term(est);
  EXPECT_EQ(to_text(t), "q1(Y1 | Do1=d1)");
  EXPECT_TRUE(t.mentions("Do1"));
  EXPECT_FALSE(t.mentions("D1"));
}
