#include <algorithm>
#include <future>
#include <sstream>
#include <thread>

#include "swigid/ident_engine.hpp"
#include "swigid/oracle.hpp"

namespace swigid {

namespace {

struct Check {
  std::string label;
  Expr input;
  Expr output;
};

/// Runs every check on models [begin, end).
std::vector<StepCheck> run_models(const Swig& swig, const std::vector<Check>& checks, const VerifyOptions& o,
                                  int begin, int end) {
  std::vector<StepCheck> out(checks.size());
  for (std::size_t i = 0; i < checks.size(); ++i) out[i].label = checks[i].label;
  for (int k = begin; k < end; ++k) {
    DiscreteModel model = random_model(swig, o.seed + static_cast<std::uint64_t>(k));
    ExprEvaluator eval(model);
    for (std::size_t i = 0; i < checks.size(); ++i) {
      StepCheck& c = out[i];
      if (!c.error.empty()) continue;
      Table before;
      try {
        before = eval(checks[i].input);
      } catch (const ZeroProbabilityError&) {
        ++c.skipped;
        continue;
      } catch (const std::exception& err) {
        c.error = err.what();
        continue;
      }
      try {
        Table after = eval(checks[i].output);
        c.max_deviation = std::max(c.max_deviation, max_abs_diff(before, after));
        ++c.models;
      } catch (const std::exception& err) {
        c.error = err.what();
      }
    }
  }
  return out;
}

std::vector<StepCheck> run_checks(const Swig& swig, const std::vector<Check>& checks, const VerifyOptions& o) {
  int workers = 1;
  if (o.parallel) workers = static_cast<int>(std::max(1U, std::min(8U, std::thread::hardware_concurrency())));
  workers = std::max(1, std::min(workers, o.models));
  std::vector<std::future<std::vector<StepCheck>>> jobs;
  for (int w = 0; w < workers; ++w) {
    int begin = o.models * w / workers, end = o.models * (w + 1) / workers;
    jobs.push_back(std::async(workers > 1 ? std::launch::async : std::launch::deferred, run_models, std::cref(swig),
                              std::cref(checks), std::cref(o), begin, end));
  }
  std::vector<StepCheck> merged(checks.size());
  for (std::size_t i = 0; i < checks.size(); ++i) merged[i].label = checks[i].label;
  for (auto& job : jobs) {
    auto part = job.get();
    for (std::size_t i = 0; i < part.size(); ++i) {
      merged[i].max_deviation = std::max(merged[i].max_deviation, part[i].max_deviation);
      merged[i].models += part[i].models;
      merged[i].skipped += part[i].skipped;
      if (merged[i].error.empty()) merged[i].error = part[i].error;
    }
  }
  for (auto& c : merged) c.passed = c.error.empty() && c.max_deviation <= o.tol;
  return merged;
}

}  // namespace

VerifyReport verify(const Derivation& d, const BaseDag& base, const VerifyOptions& options) {
  BaseDag split = base;
  split.targets = d.targets;
  Swig swig = to_swig(split);

  VerifyReport report;
  std::vector<Check> checks;
  for (std::size_t i = 0; i < d.steps.size(); ++i) {
    const auto& s = d.steps[i];
    checks.push_back({"step " + std::to_string(i + 1) + " " + s.rule, s.input, s.output});
    if (i > 0 && to_text(s.input) != to_text(d.steps[i - 1].output)) report.chained = false;
  }
  if (!d.steps.empty() && to_text(d.steps.front().input) != to_text(Expr(to_term(d.estimand)))) report.chained = false;
  checks.push_back({"final vs estimand", Expr(to_term(d.estimand)), d.final});

  auto results = run_checks(swig, checks, options);
  report.final_check = results.back();
  results.pop_back();
  report.steps = std::move(results);
  for (const auto& part : d.parts) report.parts.push_back(verify(part, base, options));

  report.passed = report.chained && report.final_check.passed;
  for (const auto& s : report.steps) report.passed = report.passed && s.passed;
  for (const auto& p : report.parts) report.passed = report.passed && p.passed;
  return report;
}

namespace {

void write_report(std::ostream& os, const VerifyReport& r, const std::string& indent) {
  auto line = [&](const StepCheck& c) {
    os << indent << (c.passed ? "ok   " : "FAIL ") << c.label << "  max_dev=" << c.max_deviation
       << " models=" << c.models << " skipped=" << c.skipped;
    if (!c.error.empty()) os << " error: " << c.error;
    os << '\n';
  };
  for (const auto& s : r.steps) line(s);
  line(r.final_check);
  if (!r.chained) os << indent << "FAIL steps do not chain\n";
  for (std::size_t i = 0; i < r.parts.size(); ++i) {
    os << indent << "part " << i + 1 << ":\n";
    write_report(os, r.parts[i], indent + "  ");
  }
}

}  // namespace

std::string format_report(const VerifyReport& report) {
  std::ostringstream os;
  write_report(os, report, "");
  os << (report.passed ? "PASS" : "FAIL") << '\n';
  return os.str();
}

}  // namespace swigid
