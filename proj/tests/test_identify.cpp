#include <gtest/gtest.h>

#include <filesystem>
#include <nlohmann/json.hpp>
#include <random>

#include "support.hpp"
#include "swigid/dsl.hpp"
#include "swigid/fixtures.hpp"

using namespace swigid;
using namespace swigid::testing;

namespace {

const std::vector<std::string> kStrategies = {"backdoor", "frontdoor", "sequential_backdoor", "sequential_frontdoor",
                                              "mediator_intervention", "top_down", "bottom_up"};

Derivation run(const BaseDag& g, const std::string& query, const std::string& strategy) {
  Swig s = to_swig(g);
  return identify(s, parse_estimand(query, s), parse_strategy(strategy));
}

// Graph each bundled derivation was produced on, by file name.
BaseDag bundled_graph(const std::string& file) {
  if (file.rfind("point_treatment_latent", 0) == 0)
    return fixtures::with_unobserved(fixtures::point_treatment(), {"L"});
  if (file.rfind("point_treatment", 0) == 0) return fixtures::point_treatment();
  return fixtures::longitudinal(file[std::string("longitudinal_n").size()] - '0');
}

// Small random DAG over V1..Vn in time order, one target, last variable as outcome.
BaseDag random_dag(std::mt19937_64& rng, int n) {
  BaseDag g;
  g.name = "random";
  for (int i = 1; i <= n; ++i) g.variables.push_back({"V" + std::to_string(i), i, Role::other, true, 2});
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j)
      if (rng() % 5 < 2) g.edges.push_back({"V" + std::to_string(i), "V" + std::to_string(j)});
  int target = 1 + static_cast<int>(rng() % (n - 1));
  g.targets = {"V" + std::to_string(target)};
  for (int i = 1; i < n; ++i)
    if (i != target && rng() % 4 == 0) g.variables[i - 1].observed = false;
  return g;
}

}  // namespace

TEST(Strategy, ParseAndPrint) {
  for (const char* s : {"backdoor", "backdoor:L", "frontdoor:M1,M2", "top_down:3", "bottom_up", "sequential_frontdoor"})
    EXPECT_EQ(to_string(parse_strategy(s)), s);
  EXPECT_THROW(parse_strategy("sideways"), IdentError);
  EXPECT_EQ(parse_strategy("top_down:4").depth, 4);
}

TEST(Identify, MalformedRequestsThrow) {
  EXPECT_THROW(run(fixtures::point_treatment(), "q[1](Y1 | do D1=d1)", "backdoor:Q"), IdentError);
}

TEST(Identify, ExplicitSetRefusalCarriesBlockingQuery) {
  Derivation d = run(fixtures::point_treatment(), "q[1](Y1 | do D1=d1)", "backdoor:M1");
  EXPECT_EQ(d.status, Status::not_identified);
  ASSERT_TRUE(d.blocking);
  EXPECT_FALSE(d_separated(to_swig(fixtures::point_treatment()), *d.blocking));
  EXPECT_FALSE(d.message.empty());
}

TEST(Identify, LatentConfounderBlocksBackdoorButNotFrontdoor) {
  BaseDag latent = fixtures::with_unobserved(fixtures::point_treatment(), {"L"});
  EXPECT_EQ(run(latent, "q[1](Y1 | do D1=d1)", "backdoor").status, Status::not_identified);
  EXPECT_EQ(run(latent, "q[1](Y1 | do D1=d1)", "frontdoor").status, Status::identified);
  EXPECT_EQ(run(latent, "q[1](Y1 | do D1=d1)", "top_down").status, Status::identified);
}

TEST(Identify, FinalUsesObservedDataOnly) {
  BaseDag latent = fixtures::with_unobserved(fixtures::point_treatment(), {"L"});
  for (const auto& s : kStrategies) {
    Derivation d = run(latent, "q[1](Y1 | do D1=d1)", s);
    if (d.status != Status::identified) continue;
    EXPECT_EQ(regimes_used(d.final), (std::set<Regime>{Regime{}})) << s;
    EXPECT_FALSE(variables_used(d.final).count("L")) << s;
  }
}

TEST(Identify, DefaultMediators) {
  Swig s = to_swig(fixtures::longitudinal(2));
  EXPECT_EQ(default_mediators(s, parse_estimand(outcome_query(2), s)), (std::vector<std::string>{"M1", "M2"}));
}

// Whatever a strategy returns as identified must hold numerically.
TEST(Identify, SearchesAreSoundOnRandomGraphs) {
  std::mt19937_64 rng(2024);
  int identified = 0;
  for (int k = 0; k < 25; ++k) {
    BaseDag g = random_dag(rng, 5);
    Swig s = to_swig(g);
    std::string t = g.targets[0];
    std::string query = "q[1](V5 | do " + t + "=x)";
    for (const auto& strategy : {"backdoor", "frontdoor", "top_down", "bottom_up"}) {
      Derivation d = identify(s, parse_estimand(query, s), parse_strategy(strategy));
      if (d.status != Status::identified) {
        EXPECT_TRUE(d.blocking) << strategy;
        continue;
      }
      ++identified;
      VerifyReport r = verify(d, g, {30, 1, 1e-9, true});
      EXPECT_TRUE(r.passed) << strategy << " on " << emit_graph(g) << format_report(r);
      for (const auto& v : variables_used(d.final)) {
        auto idx = g.find(v);
        ASSERT_TRUE(idx) << v;
        EXPECT_TRUE(g.variables[*idx].observed) << v;
      }
    }
  }
  EXPECT_GT(identified, 10);
}

TEST(Identify, TraceListsEveryStep) {
  Derivation d = run(fixtures::point_treatment(), "q[1](Y1 | do D1=d1)", "backdoor:L");
  std::string trace = format_trace(d);
  EXPECT_NE(trace.find("[q1: Y1 _||_ D1 | L, Do1]"), std::string::npos);
  std::size_t lines = 0;
  for (std::size_t p = trace.find("\n= "); p != std::string::npos; p = trace.find("\n= ", p + 1)) ++lines;
  EXPECT_EQ(lines, d.steps.size());
}

TEST(Verify, FlagsBrokenChainsAndFinals) {
  BaseDag g = fixtures::point_treatment();
  Derivation d = run(g, "q[1](Y1 | do D1=d1)", "backdoor:L");
  EXPECT_TRUE(verify(d, g, {20, 0, 1e-9, true}).passed);

  Derivation gap = d;
  gap.steps.erase(gap.steps.begin() + 2);
  VerifyReport r = verify(gap, g, {20, 0, 1e-9, true});
  EXPECT_FALSE(r.chained);
  EXPECT_FALSE(r.passed);

  Derivation wrong = d;
  wrong.final = parse_expr("q0(Y1 | D1=d1)");
  EXPECT_FALSE(verify(wrong, g, {20, 0, 1e-9, true}).final_check.passed);

  VerifyReport serial = verify(d, g, {20, 0, 1e-9, false});
  EXPECT_EQ(serial.final_check.models, 20);
}

TEST(Verify, ComposedPartsAreChecked) {
  BaseDag g = fixtures::longitudinal(2);
  Derivation d = run(g, outcome_query(2), "mediator_intervention");
  ASSERT_EQ(d.status, Status::identified);
  ASSERT_EQ(d.parts.size(), 2u);
  VerifyReport r = verify(d, g, {20, 0, 1e-9, true});
  EXPECT_TRUE(r.passed) << format_report(r);
  ASSERT_EQ(r.parts.size(), 2u);

  Derivation broken = d;
  broken.parts[1].final = parse_expr("q0(Y2 | M1=0)");
  EXPECT_FALSE(verify(broken, g, {20, 0, 1e-9, true}).passed);
}

TEST(DerivationJson, RoundTrip) {
  for (const auto& s : kStrategies) {
    Derivation d = run(fixtures::longitudinal(2), outcome_query(2), s);
    nlohmann::json j = to_json(d);
    EXPECT_EQ(to_json(derivation_from_json(j)), j) << s;
  }
  CiQuery q = parse_ci_query("q{1,2}: Y2 _||_ Do1, Do2 | D1");
  EXPECT_EQ(ci_query_from_json(to_json(q)), q);
}

TEST(DerivationJson, BundledFilesMatchFreshRuns) {
  namespace fs = std::filesystem;
  int seen = 0;
  for (const auto& entry : fs::directory_iterator(fixture_path("derivations"))) {
    std::string file = entry.path().filename().string();
    nlohmann::json stored = nlohmann::json::parse(read_text(entry.path().string()));
    Derivation d = derivation_from_json(stored);
    Swig s = to_swig(bundled_graph(file));
    Derivation fresh = identify(s, d.estimand, parse_strategy(d.strategy));
    EXPECT_EQ(to_json(fresh), stored) << file;
    ++seen;
  }
  EXPECT_EQ(seen, 11);
}
