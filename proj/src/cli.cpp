#include "swigid/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "swigid/dsl.hpp"
#include "swigid/ident_engine.hpp"
#include "swigid/oracle.hpp"

namespace swigid {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

BaseDag read_graph(const std::string& path, const std::vector<std::string>& unobserved) {
  std::string text = read_file(path);
  BaseDag g;
  try {
    g = parse_graph(text);
  } catch (const ParseError& err) {
    throw std::runtime_error(path + ":" + err.what());
  }
  for (const auto& name : unobserved) {
    if (!g.find(name)) throw std::runtime_error("--unobserved: no variable '" + name + "' in " + path);
    g.variable(name).observed = false;
  }
  auto problems = validate(g);
  if (!problems.empty()) {
    std::string msg = path + ": invalid graph";
    for (const auto& p : problems) msg += "\n  " + p.rule + ": " + p.message;
    throw std::runtime_error(msg);
  }
  return g;
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("SWIG_IDENT_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw std::runtime_error(std::string("SWIG_IDENT_SEED is not an unsigned integer: ") + env);
    }
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Identification of interventional distributions on single-world intervention graphs", "swigid"};
  app.require_subcommand(1);

  std::string graph_path, query, strategy_text = "top_down", derivation_path, model_path;
  std::vector<std::string> unobserved;
  bool as_json = false;
  int models = 100;
  std::uint64_t seed = 0;
  double tol = 1e-9, concentration = 1.0;
  std::size_t rows = 1000;
  std::string regime_text = "0";

  auto* identify_cmd = app.add_subcommand("identify", "Rewrite an interventional query into observed-data terms");
  identify_cmd->add_option("graph", graph_path, "Graph file (.swig)")->required();
  identify_cmd->add_option("query", query, "Estimand, e.g. \"q[1](Y1 | do D1=d1)\"")->required();
  identify_cmd->add_option("--strategy", strategy_text, "name[:v1,v2,...]")->capture_default_str();
  identify_cmd->add_option("--unobserved", unobserved, "Mark variables unobserved")->delimiter(',');
  identify_cmd->add_flag("--json", as_json, "Print the derivation as JSON");

  auto* verify_cmd = app.add_subcommand("verify", "Check every derivation step on random models");
  verify_cmd->add_option("graph", graph_path, "Graph file (.swig)")->required();
  verify_cmd->add_option("derivation", derivation_path, "Derivation JSON")->required();
  verify_cmd->add_option("--models", models, "Number of random models")->capture_default_str()->check(
      CLI::PositiveNumber);
  auto* verify_seed = verify_cmd->add_option("--seed", seed, "Seed of the first model");
  verify_cmd->add_option("--tol", tol, "Largest accepted deviation")->capture_default_str();

  auto* dsep_cmd = app.add_subcommand("dsep", "d-separation in a regime graph");
  dsep_cmd->add_option("graph", graph_path, "Graph file (.swig)")->required();
  dsep_cmd->add_option("query", query, "e.g. \"q[1]: Y1 _||_ Do1 | M1, D1\"")->required();

  auto* simulate_cmd = app.add_subcommand("simulate", "Sample a dataset as CSV");
  simulate_cmd->add_option("graph", graph_path, "Graph file (.swig)")->required();
  simulate_cmd->add_option("--n", rows, "Rows")->capture_default_str();
  auto* simulate_seed = simulate_cmd->add_option("--seed", seed, "Sampling seed (also the model seed)");
  simulate_cmd->add_option("--regime", regime_text, "Regime, e.g. 0, 2, {1,3}")->capture_default_str();
  simulate_cmd->add_option("--model", model_path, "Model JSON (default: random model from the seed)");

  auto* dot_cmd = app.add_subcommand("dot", "Graphviz rendering of a regime graph");
  dot_cmd->add_option("graph", graph_path, "Graph file (.swig)")->required();
  dot_cmd->add_option("--regime", regime_text, "Regime, e.g. 0, 2, {1,3}")->capture_default_str();

  auto* model_cmd = app.add_subcommand("random-model", "Random Dirichlet model as JSON");
  model_cmd->add_option("graph", graph_path, "Graph file (.swig)")->required();
  auto* model_seed = model_cmd->add_option("--seed", seed, "Model seed");
  model_cmd->add_option("--concentration", concentration, "Dirichlet concentration")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_error;
  }

  try {
    auto seed_fallback = [&](const CLI::Option* given) {
      if (given->count() == 0) seed = default_seed();
    };

    if (identify_cmd->parsed()) {
      BaseDag base = read_graph(graph_path, unobserved);
      Swig swig = to_swig(base);
      Estimand estimand = parse_estimand(query, swig);
      Derivation d = identify(swig, estimand, parse_strategy(strategy_text));
      if (as_json)
        out << to_json(d).dump(2) << '\n';
      else
        out << format_trace(d);
      if (d.status != Status::identified) {
        if (as_json && d.blocking) err << "blocking: " << to_string(*d.blocking) << '\n';
        return exit_not_identified;
      }
      return exit_ok;
    }

    if (verify_cmd->parsed()) {
      seed_fallback(verify_seed);
      BaseDag base = read_graph(graph_path, {});
      Derivation d = derivation_from_json(nlohmann::json::parse(read_file(derivation_path)));
      VerifyReport report = verify(d, base, {models, seed, tol, true});
      out << format_report(report);
      return report.passed ? exit_ok : exit_verify_failed;
    }

    if (dsep_cmd->parsed()) {
      Swig swig = to_swig(read_graph(graph_path, {}));
      out << (d_separated(swig, parse_ci_query(query)) ? "true" : "false") << '\n';
      return exit_ok;
    }

    if (simulate_cmd->parsed()) {
      seed_fallback(simulate_seed);
      Swig swig = to_swig(read_graph(graph_path, {}));
      DiscreteModel model = model_path.empty() ? random_model(swig, seed)
                                               : model_from_json(swig, nlohmann::json::parse(read_file(model_path)));
      write_csv(out, sample(model, parse_regime(regime_text), rows, seed));
      return exit_ok;
    }

    if (dot_cmd->parsed()) {
      Swig swig = to_swig(read_graph(graph_path, {}));
      out << emit_dot(swig, parse_regime(regime_text));
      return exit_ok;
    }

    if (model_cmd->parsed()) {
      seed_fallback(model_seed);
      Swig swig = to_swig(read_graph(graph_path, {}));
      out << model_to_json(random_model(swig, seed, concentration)).dump(2) << '\n';
      return exit_ok;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_error;
  }
  return exit_error;
}

}  // namespace swigid
