#include "swigid/graph_query.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <queue>
#include <set>
#include <sstream>

namespace swigid {

std::optional<std::vector<int>> topological_order(const DirectedGraph& g) {
  std::vector<int> indegree(g.size());
  for (int v = 0; v < g.size(); ++v) indegree[v] = static_cast<int>(g.parents(v).size());
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (int v = 0; v < g.size(); ++v)
    if (indegree[v] == 0) ready.push(v);
  std::vector<int> order;
  while (!ready.empty()) {
    int v = ready.top();
    ready.pop();
    order.push_back(v);
    for (int c : g.children(v))
      if (--indegree[c] == 0) ready.push(c);
  }
  if (static_cast<int>(order.size()) != g.size()) return std::nullopt;
  return order;
}

namespace {

std::vector<bool> closure(const DirectedGraph& g, const std::vector<int>& seeds, bool upward) {
  std::vector<bool> mark(g.size(), false);
  std::deque<int> work(seeds.begin(), seeds.end());
  while (!work.empty()) {
    int v = work.front();
    work.pop_front();
    if (mark[v]) continue;
    mark[v] = true;
    for (int n : upward ? g.parents(v) : g.children(v))
      if (!mark[n]) work.push_back(n);
  }
  return mark;
}

}  // namespace

std::vector<bool> ancestors(const DirectedGraph& g, const std::vector<int>& seeds) {
  return closure(g, seeds, true);
}

std::vector<bool> descendants(const DirectedGraph& g, const std::vector<int>& seeds) {
  return closure(g, seeds, false);
}

bool d_separated(const DirectedGraph& g, const std::vector<int>& x, const std::vector<int>& y,
                 const std::vector<int>& z) {
  std::vector<bool> observed(g.size(), false);
  for (int v : z) observed[v] = true;
  const auto opens_collider = ancestors(g, z);

  // State: node plus direction of arrival. `up` = reached from a child.
  enum Dir { up = 0, down = 1 };
  std::vector<std::array<bool, 2>> visited(g.size(), {false, false});
  std::vector<bool> reachable(g.size(), false);
  std::deque<std::pair<int, Dir>> work;
  for (int v : x) work.emplace_back(v, up);

  while (!work.empty()) {
    auto [v, dir] = work.front();
    work.pop_front();
    if (visited[v][dir]) continue;
    visited[v][dir] = true;
    if (!observed[v]) reachable[v] = true;

    if (dir == up && !observed[v]) {
      for (int p : g.parents(v)) work.emplace_back(p, up);
      for (int c : g.children(v)) work.emplace_back(c, down);
    } else if (dir == down) {
      if (!observed[v])
        for (int c : g.children(v)) work.emplace_back(c, down);
      if (opens_collider[v])
        for (int p : g.parents(v)) work.emplace_back(p, up);
    }
  }
  return std::none_of(y.begin(), y.end(), [&](int v) { return reachable[v]; });
}

std::string to_string(const CiQuery& q) {
  std::ostringstream os;
  auto list = [&](const std::vector<std::string>& vs) {
    for (std::size_t i = 0; i < vs.size(); ++i) os << (i ? ", " : "") << vs[i];
  };
  os << q.regime.label() << ": ";
  list(q.x);
  os << " _||_ ";
  list(q.y);
  if (!q.z.empty()) {
    os << " | ";
    list(q.z);
  }
  return os.str();
}

namespace {

std::vector<int> resolve(const Swig& swig, const std::vector<std::string>& names, std::set<int>& used) {
  std::vector<int> out;
  for (const auto& n : names) {
    int v = swig.index_of(n);
    if (!used.insert(v).second) throw ModelError("variable '" + n + "' appears in more than one set of the query");
    out.push_back(v);
  }
  return out;
}

}  // namespace

bool d_separated(const Swig& swig, const CiQuery& q) {
  std::set<int> used;
  auto x = resolve(swig, q.x, used);
  auto y = resolve(swig, q.y, used);
  auto z = resolve(swig, q.z, used);
  return d_separated(regime_graph(swig, q.regime), x, y, z);
}

bool later_interventions_droppable(const Swig& swig, const Estimand& estimand, int t) {
  auto later = [&](int v) { return swig.is_intervention_node(v) && swig.variable(v).time > t; };

  CiQuery ci{estimand.regime, {}, {}, {}};
  std::vector<int> remaining;
  for (const auto& a : estimand.dependents) {
    ci.x.push_back(a.var);
    remaining.push_back(swig.index_of(a.var));
  }
  for (const auto& a : estimand.conditioners) {
    int v = swig.index_of(a.var);
    if (later(v)) {
      ci.y.push_back(a.var);
    } else {
      ci.z.push_back(a.var);
      remaining.push_back(v);
    }
  }
  if (!ci.y.empty() && !d_separated(swig, ci)) return false;

  std::vector<int> deactivated;
  for (int j : estimand.regime.members())
    if (swig.variable(swig.intervention_node(j)).time > t) deactivated.push_back(swig.intervention_node(j));
  if (deactivated.empty()) return true;
  auto below = descendants(swig.graph(), deactivated);
  return std::none_of(remaining.begin(), remaining.end(), [&](int v) { return below[v]; });
}

}  // namespace swigid
