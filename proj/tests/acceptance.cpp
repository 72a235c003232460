// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <filesystem>
#include <functional>
#include <iostream>
#include <nlohmann/json.hpp>
#include <random>
#include <sstream>

#include "support.hpp"
#include "swigid/cli.hpp"
#include "swigid/dsl.hpp"
#include "swigid/fixtures.hpp"

using namespace swigid;
using namespace swigid::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Derivation run_identify(const BaseDag& base, const std::string& query, const std::string& strategy) {
  Swig swig = to_swig(base);
  return identify(swig, parse_estimand(query, swig), parse_strategy(strategy));
}

double worst_do_deviation(const BaseDag& base, const Expr& e, const std::vector<std::string>& outcomes, int models,
                          std::uint64_t seed0) {
  Swig swig = to_swig(base);
  int n = static_cast<int>(base.targets.size());
  double worst = 0.0;
  for (int k = 0; k < models; ++k) {
    DiscreteModel m = random_model(swig, seed0 + k);
    worst = std::max(worst, deviation_from_do(m, e, base.targets, numbered("d", n), outcomes));
  }
  return worst;
}

void backdoor_fidelity(Outcome& o) {
  auto start = std::chrono::steady_clock::now();
  BaseDag g = fixtures::point_treatment();
  Derivation d = run_identify(g, "q[1](Y1 | do D1=d1)", "backdoor:L");
  Expr expected = parse_expr("sum{l} q0(Y1 | D1=d1, L=l) * q0(L=l)");
  o.require(d.status == Status::identified, "identified");
  o.require(struct_eq(d.final, expected, VariableOrder::of(to_swig(g))), "struct_eq");
  double dev = worst_do_deviation(g, d.final, {"Y1"}, 100, 1000);
  o.require(dev <= 1e-9, "oracle deviation");
  double secs = seconds_since(start);
  o.require(secs < 5.0, "runtime");
  o.detail << "formula " << to_text(d.final) << "; max dev " << dev << " over 100 models; " << secs << " s";
}

Expr frontdoor_formula() { return parse_expr("sum{m, d'} q0(Y1 | D1=d', M1=m) * q0(D1=d') * q0(M1=m | D1=d1)"); }

void frontdoor_fidelity(Outcome& o) {
  BaseDag g = fixtures::with_unobserved(fixtures::point_treatment(), {"L"});
  Derivation d = run_identify(g, "q[1](Y1 | do D1=d1)", "frontdoor:M1");
  o.require(d.status == Status::identified, "identified");
  o.require(struct_eq(d.final, frontdoor_formula(), VariableOrder::of(to_swig(g))), "struct_eq");
  double dev = worst_do_deviation(g, d.final, {"Y1"}, 100, 2000);
  o.require(dev <= 1e-9, "oracle deviation");
  o.detail << "formula " << to_text(d.final) << "; max dev " << dev << " over 100 models";
}

void sequential_gformula_fidelity(Outcome& o) {
  for (int n = 1; n <= 3; ++n) {
    auto start = std::chrono::steady_clock::now();
    BaseDag g = fixtures::longitudinal(n);
    Derivation d = run_identify(g, mediator_query(n), "sequential_backdoor");
    o.require(d.status == Status::identified, "identified n=" + std::to_string(n));
    o.require(struct_eq(d.final, parse_expr(sequential_gformula(n)), VariableOrder::of(to_swig(g))),
              "struct_eq n=" + std::to_string(n));
    double dev = worst_do_deviation(g, d.final, numbered("M", n), 50, 3000 + 100 * n);
    o.require(dev <= 1e-9, "oracle deviation n=" + std::to_string(n));
    double secs = seconds_since(start);
    o.require(secs < 60.0, "runtime n=" + std::to_string(n));
    o.detail << " n=" << n << ": dev " << dev << ", " << secs << " s;";
  }
}

void longitudinal_frontdoor_fidelity(Outcome& o) {
  for (int n = 1; n <= 3; ++n) {
    auto start = std::chrono::steady_clock::now();
    BaseDag g = fixtures::longitudinal(n);
    Derivation d = run_identify(g, outcome_query(n), "sequential_frontdoor");
    VariableOrder order = VariableOrder::of(to_swig(g));
    o.require(d.status == Status::identified, "identified n=" + std::to_string(n));
    o.require(struct_eq(d.final, parse_expr(longitudinal_frontdoor(n)), order), "struct_eq n=" + std::to_string(n));
    if (n == 1) o.require(struct_eq(d.final, frontdoor_formula(), order), "n=1 equals the front-door formula");
    std::string y = "Y" + std::to_string(n);
    double dev = worst_do_deviation(g, d.final, {y}, 50, 4000 + 100 * n);
    o.require(dev <= 1e-9, "oracle deviation n=" + std::to_string(n));
    double secs = seconds_since(start);
    o.require(secs < 60.0, "runtime n=" + std::to_string(n));
    o.detail << " n=" << n << ": dev " << dev << ", " << secs << " s;";
  }
}

void mediator_equivalence(Outcome& o) {
  for (int n = 1; n <= 3; ++n) {
    Swig doses = to_swig(fixtures::longitudinal(n));
    Swig mediators = to_swig(fixtures::mediator_split(n));
    Estimand e = parse_estimand(outcome_query(n), doses);
    Derivation composed = compose_mediator_intervention(doses, mediators, e);
    Derivation direct = identify(doses, e, parse_strategy("sequential_frontdoor"));
    o.require(composed.status == Status::identified, "compose identified n=" + std::to_string(n));
    o.require(struct_eq(composed.final, direct.final, VariableOrder::of(doses)), "struct_eq n=" + std::to_string(n));
    o.detail << " n=" << n << (struct_eq(composed.final, direct.final, VariableOrder::of(doses)) ? " equal;" : " differ;");
  }
}

BaseDag graph_for(const Derivation& d) {
  // Bundled derivations name their graph through the outcome index.
  const std::string est = to_text(to_term(d.estimand));
  for (int n = 3; n >= 2; --n)
    if (est.find(std::to_string(n) + "=d" + std::to_string(n)) != std::string::npos) return fixtures::longitudinal(n);
  return fixtures::point_treatment();
}

void rule_soundness(Outcome& o) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(fixture_path("derivations")))
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  o.require(files.size() >= 5, "bundled derivations present");

  std::size_t steps = 0, mutants = 0, caught = 0;
  for (const auto& path : files) {
    Derivation d = derivation_from_json(nlohmann::json::parse(read_text(path.string())));
    BaseDag base = graph_for(d);
    VerifyReport r = verify(d, base, {100, 7, 1e-9, true});
    o.require(r.passed, "verify " + path.filename().string());
    std::vector<const Derivation*> all{&d};
    for (const auto& p : d.parts) all.push_back(&p);
    for (const Derivation* part : all) {
      BaseDag split = base;
      split.targets = part->targets;
      Swig swig = to_swig(split);
      for (std::size_t i = 0; i < part->steps.size(); ++i) {
        ++steps;
        auto bad = mutate_step(*part, i, swig);
        o.require(bad.has_value(), "mutation possible " + path.filename().string() + " step " + std::to_string(i + 1));
        if (!bad) continue;
        ++mutants;
        VerifyReport m = verify(*bad, base, {20, 11, 1e-9, true});
        bool flagged = !m.steps[i].passed;
        caught += flagged;
        o.require(flagged, "mutant caught " + path.filename().string() + " step " + std::to_string(i + 1));
      }
    }
  }

  // Changing the intervention value without an independence to license it.
  BaseDag g = fixtures::point_treatment();
  Derivation d = run_identify(g, "q[1](Y1 | do D1=d1)", "backdoor:L");
  Derivation bad = d;
  bool changed = false;
  for (auto& s : bad.steps) {
    if (s.rule != "ci_modify" || changed) continue;
    std::string text = to_text(s.output);
    auto at = text.find("Do1=d1");
    text.replace(at, 6, "Do1=1");
    s.output = parse_expr(text);
    changed = true;
  }
  VerifyReport r = verify(bad, g, {20, 13, 1e-9, true});
  o.require(changed && !r.passed, "intervention value corruption flagged");
  o.detail << files.size() << " derivations, " << steps << " steps verified on 100 models; " << caught << "/"
           << mutants << " single-step mutants caught";
}

std::vector<BaseDag> fixture_graphs() {
  return {fixtures::point_treatment(), fixtures::longitudinal(2), fixtures::longitudinal(3), fixtures::mediator_split(2),
          fixtures::collider(), fixtures::negative_control()};
}

void dsep_soundness(Outcome& o) {
  std::mt19937_64 rng(99);
  std::size_t separated = 0, total = 0, checks = 0;
  for (const BaseDag& g : fixture_graphs()) {
    Swig swig = to_swig(g);
    std::vector<CiQuery> queries;
    while (queries.size() < 200) {
      CiQuery q;
      std::vector<int> active;
      for (int j = 1; j <= swig.num_interventions(); ++j)
        if (rng() & 1U) active.push_back(j);
      q.regime = Regime::of(active);
      for (int v = 0; v < swig.size(); ++v) {
        switch (rng() % 5) {
          case 0: q.x.push_back(swig.variable(v).name); break;
          case 1: q.y.push_back(swig.variable(v).name); break;
          case 2: q.z.push_back(swig.variable(v).name); break;
          default: break;
        }
      }
      if (q.x.empty() || q.y.empty()) continue;
      queries.push_back(q);
    }
    for (const auto& q : queries) {
      ++total;
      if (!d_separated(swig, q)) continue;
      ++separated;
      for (int k = 0; k < 50; ++k) {
        ++checks;
        CiCheck c = brute_force_ci(random_model(swig, 500 + k), q, 1e-9);
        o.require(c.independent, g.name + " " + to_string(q));
      }
    }
  }

  // The independences the derivations rest on.
  std::vector<std::pair<BaseDag, std::string>> quoted = {
      {fixtures::collider(), "q2: Y1 _||_ Do2"},
      {fixtures::longitudinal(2), "q2: M1 _||_ Do2 | Do1"},
      {fixtures::point_treatment(), "q1: Y1 _||_ D1 | L, Do1"},
      {fixtures::point_treatment(), "q1: Y1 _||_ Do1 | M1, D1"},
      {fixtures::point_treatment(), "q1: M1 _||_ D1 | Do1"},
      {fixtures::point_treatment(), "q1: D1 _||_ M1, Do1"},
  };
  for (int n = 1; n <= 3; ++n) {
    BaseDag g2 = fixtures::longitudinal(n), g3 = fixtures::mediator_split(n);
    auto list = [](const std::string& p, int upto) {
      std::string s;
      for (int u = 1; u <= upto; ++u) s += (u > 1 ? ", " : "") + p + std::to_string(u);
      return s;
    };
    auto join = [](const std::string& a, const std::string& b) { return a.empty() ? b : b.empty() ? a : a + ", " + b; };
    std::string N = std::to_string(n);
    quoted.push_back({g2, "q" + N + ": Y" + N + " _||_ " + list("Do", n) + " | " + join(list("D", n), list("M", n))});
    quoted.push_back({g3, "q" + N + ": Y" + N + " _||_ " + list("M", n) + " | " + join(list("Mo", n), list("D", n))});
    for (int t = 1; t <= n; ++t) {
      std::string T = std::to_string(t);
      quoted.push_back({g2, "q" + T + ": M" + T + " _||_ " + list("D", t) + " | " + join(list("M", t - 1), list("Do", t))});
      if (t > 1) {
        quoted.push_back({g2, "q" + std::to_string(t - 1) + ": D" + T + " _||_ " + list("Do", t - 1) + " | " +
                                  join(list("M", t - 1), list("D", t - 1))});
        quoted.push_back({g3, "q" + std::to_string(t - 1) + ": D" + T + " _||_ " + list("M", t - 1) + " | " +
                                  join(list("Mo", t - 1), list("D", t - 1))});
      }
    }
  }
  std::size_t held = 0;
  for (const auto& [g, text] : quoted) {
    Swig swig = to_swig(g);
    CiQuery q = parse_ci_query(text);
    bool ok = d_separated(swig, q) && brute_force_ci(random_model(swig, 77), q, 1e-9).independent;
    held += ok;
    o.require(ok, "quoted independence " + g.name + " " + text);
  }
  o.detail << separated << "/" << total << " random queries d-separated, " << checks
           << " brute-force checks; " << held << "/" << quoted.size() << " quoted independences hold";
}

void consistency_invariant(Outcome& o) {
  double worst = 0.0;
  int compared = 0;
  for (int n = 1; n <= 2; ++n) {
    Swig swig = to_swig(fixtures::longitudinal(n));
    std::string y = "Y" + std::to_string(n);
    for (int k = 0; k < 100; ++k) {
      DiscreteModel m = random_model(swig, 6000 + k);
      for (int t = 1; t <= n; ++t) {
        for (int mask = 0; mask < (1 << t); ++mask) {
          std::vector<std::pair<std::string, int>> conds;
          for (int u = 1; u <= t; ++u) conds.push_back({"Do" + std::to_string(u), (mask >> (u - 1)) & 1});
          conds.push_back({"D" + std::to_string(t), (mask >> (t - 1)) & 1});
          Table with = query(m, Regime::prefix(t), {y}, conds);
          Table without = query(m, Regime::prefix(t - 1), {y}, conds);
          worst = std::max(worst, max_abs_diff(with, without));
          ++compared;
        }
      }
    }
  }
  o.require(worst <= 1e-10, "q_t equals q_{t-1}");
  o.detail << compared << " comparisons, max dev " << worst;
}

void negative_control(Outcome& o) {
  BaseDag g = fixtures::negative_control();
  const std::vector<std::string> strategies = {"backdoor",         "frontdoor", "sequential_backdoor",
                                               "sequential_frontdoor", "mediator_intervention",
                                               "top_down",         "bottom_up"};
  for (const auto& s : strategies) {
    Derivation d = run_identify(g, "q[1](Y1 | do D1=d1)", s);
    o.require(d.status == Status::not_identified && d.blocking.has_value(), s + " not identified with blocking query");
    std::ostringstream out, err;
    int code = run_cli({"swigid", "identify", fixture_path("negative_control.swig"), "q[1](Y1 | do D1=d1)",
                        "--strategy", s},
                       out, err);
    o.require(code == exit_not_identified, s + " exit code 2");
    if (d.blocking) o.detail << s << ": " << to_string(*d.blocking) << "; ";
  }
}

void plugin_gcomputation(Outcome& o) {
  BaseDag g = fixtures::point_treatment();
  Swig swig = to_swig(g);
  Derivation d = run_identify(g, "q[1](Y1 | do D1=d1)", "backdoor:L");
  DiscreteModel m = random_model(swig, 424242);
  Dataset data = sample(m, Regime{}, 200000, 17);
  Table estimate = plugin_estimate(d.final, data);
  double worst = 0.0;
  for (int dose = 0; dose <= 1; ++dose) {
    auto truth = truncated_do(m, {{"D1", dose}}, {"Y1"});
    for (int y = 0; y <= 1; ++y) worst = std::max(worst, std::abs(at(estimate, {{"Y1", y}, {"d1", dose}}) - truth[y]));
  }
  o.require(worst <= 0.02, "plug-in within 0.02");
  o.detail << "max abs error " << worst << " on 200000 samples";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"1 back-door fidelity", backdoor_fidelity},
      {"2 front-door fidelity", frontdoor_fidelity},
      {"3 sequential g-formula", sequential_gformula_fidelity},
      {"4 longitudinal front-door", longitudinal_frontdoor_fidelity},
      {"5 mediator-intervention equivalence", mediator_equivalence},
      {"6 rule soundness and mutation detection", rule_soundness},
      {"7 d-separation soundness", dsep_soundness},
      {"8 consistency invariant", consistency_invariant},
      {"9 negative control", negative_control},
      {"10 g-computation plug-in", plugin_gcomputation},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    auto start = std::chrono::steady_clock::now();
    try {
      check(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << name << ": " << o.detail.str() << " (" << seconds_since(start)
              << " s)" << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
