#include <ccl/error.hpp>
#include <ccl/graph.hpp>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>

namespace ccl {

const char* to_string(Directedness d) {
  switch (d) {
    case Directedness::Undirected: return "undirected";
    case Directedness::Directed: return "directed";
    case Directedness::Mixed: return "mixed";
  }
  return "?";
}

Graph::Graph(std::vector<std::string> vertex_names, std::vector<Edge> edges, int edge_cap)
    : names_(std::move(vertex_names)), edges_(std::move(edges)), edge_cap_(edge_cap) {
  if (edge_cap_ < 0 || edge_cap_ > kMaxEdges)
    throw InputError("edge cap must lie in [0, " + std::to_string(kMaxEdges) + "]");
  if (num_vertices() > kMaxVertices)
    throw InputError("at most " + std::to_string(kMaxVertices) + " vertices supported");
  if (num_edges() > edge_cap_)
    throw BudgetError("graph has " + std::to_string(num_edges()) + " edges; edge cap is " +
                      std::to_string(edge_cap_));
  std::set<std::string> seen;
  for (const auto& n : names_) {
    if (n.empty()) throw InputError("empty vertex name");
    if (!seen.insert(n).second) throw InputError("duplicate vertex '" + n + "'");
  }

  bool any_oriented = false;
  bool any_unoriented = false;
  for (auto& e : edges_) {
    if (e.tail < 0 || e.tail >= num_vertices() || e.head < 0 || e.head >= num_vertices())
      throw InputError("edge endpoint is not a declared vertex");
    if (e.tail == e.head) throw InputError("self-loop at '" + names_[e.tail] + "' rejected");
    if (!(e.p > 0 && e.p < 1))
      throw InputError("edge probability " + to_string(e.p) + " outside the open interval (0,1)");
    if (!e.oriented && e.tail > e.head) std::swap(e.tail, e.head);
    (e.oriented ? any_oriented : any_unoriented) = true;
  }
  directedness_ = any_oriented ? (any_unoriented ? Directedness::Mixed : Directedness::Directed)
                               : Directedness::Undirected;

  std::vector<Arc> arcs;
  for (int i = 0; i < num_edges(); ++i) {
    const auto& e = edges_[i];
    arcs.push_back({i, e.tail, e.head});
    if (!e.oriented) arcs.push_back({i, e.head, e.tail});
  }
  std::stable_sort(arcs.begin(), arcs.end(), [](const Arc& a, const Arc& b) { return a.from < b.from; });
  arcs_ = std::move(arcs);
  arc_begin_.assign(num_vertices() + 1, 0);
  for (const auto& a : arcs_) ++arc_begin_[a.from + 1];
  std::partial_sum(arc_begin_.begin(), arc_begin_.end(), arc_begin_.begin());
}

std::span<const Arc> Graph::arcs_from(int v) const {
  return std::span<const Arc>(arcs_).subspan(arc_begin_[v], arc_begin_[v + 1] - arc_begin_[v]);
}

int Graph::vertex(std::string_view name) const {
  for (int v = 0; v < num_vertices(); ++v)
    if (names_[v] == name) return v;
  throw InputError("unknown vertex '" + std::string(name) + "'");
}

VertexSet Graph::vertices(std::initializer_list<std::string_view> names) const {
  VertexSet s;
  for (auto n : names) s = s.with(vertex(n));
  return s;
}

VertexSet Graph::vertices(std::span<const std::string> names) const {
  VertexSet s;
  for (const auto& n : names) s = s.with(vertex(n));
  return s;
}

Graph make_graph(std::vector<std::string> vertex_names, const std::vector<EdgeSpec>& edges, int edge_cap) {
  auto index = [&](const std::string& n) {
    auto it = std::find(vertex_names.begin(), vertex_names.end(), n);
    if (it == vertex_names.end()) throw InputError("unknown vertex '" + n + "'");
    return static_cast<int>(it - vertex_names.begin());
  };
  std::vector<Edge> es;
  es.reserve(edges.size());
  for (const auto& s : edges) es.push_back({index(s.tail), index(s.head), s.oriented, s.p});
  return Graph(std::move(vertex_names), std::move(es), edge_cap);
}

EdgeSet Surgery::map_edges(EdgeSet old) const {
  EdgeSet out;
  old.for_each([&](int i) {
    if (edge_map[i] >= 0) out = out.with(edge_map[i]);
  });
  return out;
}

VertexSet Surgery::map_vertices(VertexSet old) const {
  VertexSet out;
  old.for_each([&](int v) {
    if (vertex_map[v] >= 0) out = out.with(vertex_map[v]);
  });
  return out;
}

EdgeSet edges_meeting(const Graph& g, VertexSet x) {
  if (!x.subset_of(g.all_vertices())) throw InputError("vertex set contains unknown vertex ids");
  EdgeSet out;
  for (int i = 0; i < g.num_edges(); ++i)
    if (x.test(g.edge(i).tail) || x.test(g.edge(i).head)) out = out.with(i);
  return out;
}

VertexSet vertex_support(const Graph& g, EdgeSet f) {
  VertexSet v;
  f.for_each([&](int i) { v = v.with(g.edge(i).tail).with(g.edge(i).head); });
  return v;
}

EdgeSet closure(const Graph& g, EdgeSet f) {
  if (!f.subset_of(g.all_edges())) throw InputError("edge set not contained in the graph");
  return f | edges_meeting(g, vertex_support(g, f));
}

namespace {

// Rebuilds g with vertices relabelled by `label` (several old vertices may share
// a label) and the edges in `drop` removed. Edges that become loops are dropped.
Surgery relabel(const Graph& g, const std::vector<int>& label, std::vector<std::string> names, EdgeSet drop) {
  Surgery out;
  out.vertex_map = label;
  out.edge_map.assign(g.num_edges(), -1);
  std::vector<Edge> es;
  for (int i = 0; i < g.num_edges(); ++i) {
    if (drop.test(i)) continue;
    Edge e = g.edge(i);
    e.tail = label[e.tail];
    e.head = label[e.head];
    if (e.tail < 0 || e.head < 0 || e.tail == e.head) continue;
    out.edge_map[i] = static_cast<int>(es.size());
    es.push_back(e);
  }
  out.graph = Graph(std::move(names), std::move(es), g.edge_cap());
  return out;
}

}  // namespace

Surgery delete_edges(const Graph& g, EdgeSet f) {
  if (!f.subset_of(g.all_edges())) throw InputError("edge set not contained in the graph");
  std::vector<int> label(g.num_vertices());
  std::iota(label.begin(), label.end(), 0);
  return relabel(g, label, g.names(), f);
}

Surgery contract_edges(const Graph& g, EdgeSet f) {
  if (!f.subset_of(g.all_edges())) throw InputError("edge set not contained in the graph");
  f.for_each([&](int i) {
    if (g.edge(i).oriented) throw UnsupportedOperation("contraction of an oriented edge is not supported");
  });
  std::vector<int> parent(g.num_vertices());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  f.for_each([&](int i) {
    int a = find(g.edge(i).tail), b = find(g.edge(i).head);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  });
  std::vector<int> label(g.num_vertices(), -1);
  std::vector<std::string> names;
  std::vector<int> root_label(g.num_vertices(), -1);
  for (int v = 0; v < g.num_vertices(); ++v) {
    int r = find(v);
    if (root_label[r] < 0) {
      root_label[r] = static_cast<int>(names.size());
      names.push_back(g.name(v));
    } else {
      names[root_label[r]] += "+" + g.name(v);
    }
    label[v] = root_label[r];
  }
  return relabel(g, label, std::move(names), f);
}

Surgery merge_vertices(const Graph& g, VertexSet x) {
  if (!x.subset_of(g.all_vertices())) throw InputError("vertex set contains unknown vertex ids");
  if (x.empty()) return delete_edges(g, EdgeSet{});
  std::vector<int> label(g.num_vertices(), -1);
  std::vector<std::string> names;
  int merged = -1;
  for (int v = 0; v < g.num_vertices(); ++v) {
    if (x.test(v)) {
      if (merged < 0) {
        merged = static_cast<int>(names.size());
        names.push_back(g.name(v));
      } else {
        names[merged] += "+" + g.name(v);
      }
      label[v] = merged;
    } else {
      label[v] = static_cast<int>(names.size());
      names.push_back(g.name(v));
    }
  }
  return relabel(g, label, std::move(names), EdgeSet{});
}

Surgery induced_subgraph(const Graph& g, VertexSet u) {
  if (!u.subset_of(g.all_vertices())) throw InputError("vertex set contains unknown vertex ids");
  std::vector<int> label(g.num_vertices(), -1);
  std::vector<std::string> names;
  u.for_each([&](int v) {
    label[v] = static_cast<int>(names.size());
    names.push_back(g.name(v));
  });
  return relabel(g, label, std::move(names), EdgeSet{});
}

std::string describe(const Graph& g, EdgeSet f) {
  std::string out = "{";
  bool first = true;
  f.for_each([&](int i) {
    if (!first) out += ",";
    first = false;
    const auto& e = g.edge(i);
    out += e.oriented ? "(" + g.name(e.tail) + "," + g.name(e.head) + ")"
                      : g.name(e.tail) + "-" + g.name(e.head);
  });
  return out + "}";
}

std::string describe(const Graph& g, VertexSet v) {
  std::string out = "{";
  bool first = true;
  v.for_each([&](int i) {
    if (!first) out += ",";
    first = false;
    out += g.name(i);
  });
  return out + "}";
}

Graph graph_from_json(const nlohmann::json& j, int edge_cap) {
  if (!j.is_object() || !j.contains("vertices") || !j.contains("edges"))
    throw InputError("graph JSON needs 'vertices' and 'edges'");
  std::vector<std::string> names;
  for (const auto& v : j.at("vertices")) {
    if (!v.is_string()) throw InputError("vertex ids must be strings");
    names.push_back(v.get<std::string>());
  }
  std::vector<EdgeSpec> specs;
  for (const auto& e : j.at("edges")) {
    if (!e.contains("tail") || !e.contains("head")) throw InputError("edge needs 'tail' and 'head'");
    EdgeSpec s;
    s.tail = e.at("tail").get<std::string>();
    s.head = e.at("head").get<std::string>();
    s.oriented = e.value("oriented", false);
    const auto& p = e.contains("p") ? e.at("p") : nlohmann::json("1/2");
    if (p.is_string())
      s.p = parse_rational(p.get<std::string>());
    else if (p.is_number_integer())
      s.p = Rational(p.get<long long>());
    else if (p.is_number())
      s.p = parse_rational(p.dump());
    else
      throw InputError("edge probability must be a string or number");
    specs.push_back(std::move(s));
  }
  return make_graph(std::move(names), specs, edge_cap);
}

nlohmann::json graph_to_json(const Graph& g) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : g.edges())
    edges.push_back({{"tail", g.name(e.tail)}, {"head", g.name(e.head)}, {"oriented", e.oriented},
                     {"p", to_string(e.p)}});
  return {{"vertices", g.names()}, {"edges", edges}};
}

Graph load_graph(const std::string& path, int edge_cap) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open graph file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("graph file '" + path + "': " + e.what());
  }
  return graph_from_json(j, edge_cap);
}

}  // namespace ccl
