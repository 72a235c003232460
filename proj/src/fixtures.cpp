#include "swigid/fixtures.hpp"

namespace swigid::fixtures {

namespace {

std::string at(const char* prefix, int t) { return prefix + std::to_string(t); }

}  // namespace

BaseDag longitudinal(int n) {
  if (n < 1) throw ModelError("longitudinal needs at least one time point");
  BaseDag g;
  g.name = "longitudinal_n" + std::to_string(n);
  const std::string y = at("Y", n);
  g.variables.push_back({"L", 0, Role::covariate, true, 2});
  for (int t = 1; t <= n; ++t) {
    g.variables.push_back({at("D", t), t, Role::target, true, 2});
    g.variables.push_back({at("M", t), t, Role::mediator, true, 2});
  }
  g.variables.push_back({y, n, Role::outcome, true, 2});

  for (int t = 1; t <= n; ++t) g.edges.emplace_back("L", at("D", t));
  g.edges.emplace_back("L", y);
  for (int t = 1; t <= n; ++t) {
    if (t > 1) g.edges.emplace_back(at("M", t - 1), at("D", t));
    g.edges.emplace_back(at("D", t), at("M", t));
    if (t > 1) g.edges.emplace_back(at("M", t - 1), at("M", t));
    g.edges.emplace_back(at("M", t), y);
  }
  for (int t = 1; t <= n; ++t) g.targets.push_back(at("D", t));
  return g;
}

BaseDag point_treatment() {
  BaseDag g = longitudinal(1);
  g.name = "point_treatment";
  return g;
}

BaseDag mediator_split(int n) {
  BaseDag g = longitudinal(n);
  g.name = "mediator_split_n" + std::to_string(n);
  g.targets.clear();
  for (int t = 1; t <= n; ++t) g.targets.push_back(at("M", t));
  return g;
}

BaseDag collider() {
  BaseDag g;
  g.name = "collider";
  g.variables = {{"D1", 1, Role::target, true, 2},
                 {"Y1", 1, Role::outcome, true, 2},
                 {"D2", 2, Role::target, true, 2},
                 {"C", 2, Role::other, true, 2}};
  g.edges = {{"D1", "Y1"}, {"Y1", "C"}, {"D2", "C"}};
  g.targets = {"D1", "D2"};
  return g;
}

BaseDag negative_control() {
  BaseDag g;
  g.name = "negative_control";
  g.variables = {{"L", 0, Role::covariate, false, 2}, {"D1", 1, Role::target, true, 2}, {"Y1", 1, Role::outcome, true, 2}};
  g.edges = {{"L", "D1"}, {"L", "Y1"}, {"D1", "Y1"}};
  g.targets = {"D1"};
  return g;
}

BaseDag with_unobserved(BaseDag base, const std::vector<std::string>& names) {
  for (const auto& n : names) base.variable(n).observed = false;
  return base;
}

}  // namespace swigid::fixtures
