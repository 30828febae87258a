#include <ccl/measure.hpp>

#include <algorithm>
#include <numeric>

namespace ccl {

int count_components(const Graph& g, Config omega) {
  std::vector<int> parent(g.num_vertices());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  int components = g.num_vertices();
  omega.for_each([&](int i) {
    int a = find(g.edge(i).tail), b = find(g.edge(i).head);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  });
  return components;
}

std::vector<int> component_labels(const Graph& g, Config omega) {
  std::vector<int> parent(g.num_vertices());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  omega.for_each([&](int i) {
    int a = find(g.edge(i).tail), b = find(g.edge(i).head);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  });
  std::vector<int> label(g.num_vertices(), -1), out(g.num_vertices());
  int next = 0;
  for (int v = 0; v < g.num_vertices(); ++v) {
    int r = find(v);
    if (label[r] < 0) label[r] = next++;
    out[v] = label[r];
  }
  return out;
}

EdgeSet cluster_boundary(const Graph& g, VertexSet s, EdgeSet f) {
  return f | edges_meeting(g, s | vertex_support(g, f));
}

VertexSet boundary_vertices(const Graph& g, VertexSet z) {
  VertexSet n;
  for (const auto& e : g.edges()) {
    if (z.test(e.head) && !z.test(e.tail)) n = n.with(e.tail);
    if (!e.oriented && z.test(e.tail) && !z.test(e.head)) n = n.with(e.head);
  }
  return n;
}

LogModularity check_log_modular(const std::map<VertexSet, Rational>& dist, VertexSet n) {
  auto pr = [&](VertexSet s) {
    auto it = dist.find(s);
    return it == dist.end() ? Rational(0) : it->second;
  };
  std::vector<VertexSet> subsets;
  // Enumerate subsets of n by the standard submask walk.
  for (std::uint64_t m = n.bits;; m = (m - 1) & n.bits) {
    subsets.push_back(VertexSet(m));
    if (m == 0) break;
  }
  for (auto s : subsets)
    for (auto t : subsets)
      if (pr(s) * pr(t) != pr(s & t) * pr(s | t)) return {false, std::make_pair(s, t)};
  return {};
}

nlohmann::json measure_to_json(const Measure<Rational>& mu) {
  nlohmann::json weights = nlohmann::json::array();
  for (const auto& w : mu.weights()) weights.push_back(to_string(w));
  return {{"graph", graph_to_json(mu.graph())},
          {"backend", "rational"},
          {"normalizer", to_string(mu.normalizer())},
          {"weights", weights}};
}

Measure<Rational> measure_from_json(const nlohmann::json& j) {
  if (j.value("backend", "rational") != "rational") throw InputError("only rational measures can be loaded");
  Graph g = graph_from_json(j.at("graph"));
  std::vector<Rational> w;
  for (const auto& v : j.at("weights")) w.push_back(parse_rational(v.get<std::string>()));
  Rational z = j.contains("normalizer") ? parse_rational(j.at("normalizer").get<std::string>()) : Rational(1);
  for (auto& x : w) x *= z;
  return Measure<Rational>(std::move(g), std::move(w));
}

}  // namespace ccl
