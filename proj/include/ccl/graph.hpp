#pragma once

#include <ccl/bitmask.hpp>
#include <ccl/rational.hpp>

#include <json.hpp>

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace ccl {

struct Edge {
  int tail = 0;
  int head = 0;
  bool oriented = false;
  Rational p;

  friend bool operator==(const Edge&, const Edge&) = default;
};

enum class Directedness { Undirected, Directed, Mixed };

const char* to_string(Directedness d);

// One traversable direction of an edge; undirected edges contribute two arcs.
struct Arc {
  int edge;
  int from;
  int to;
};

/// Finite graph with per-edge orientation flag and open probability.
///
/// Vertices are addressed by dense index 0..n-1 and carry string names. The
/// edge order given at construction is the canonical order: bit i of every
/// EdgeSet / Config refers to edges()[i]. Unoriented edges are stored with
/// tail < head.
class Graph {
 public:
  static constexpr int kDefaultEdgeCap = 20;
  static constexpr int kMaxEdges = 24;
  static constexpr int kMaxVertices = 64;

  Graph() = default;
  Graph(std::vector<std::string> vertex_names, std::vector<Edge> edges,
        int edge_cap = kDefaultEdgeCap);

  int num_vertices() const { return static_cast<int>(names_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  std::uint64_t num_configs() const { return std::uint64_t{1} << num_edges(); }
  int edge_cap() const { return edge_cap_; }

  const Edge& edge(int i) const { return edges_[i]; }
  std::span<const Edge> edges() const { return edges_; }
  const std::string& name(int v) const { return names_[v]; }
  const std::vector<std::string>& names() const { return names_; }

  /// Index of a named vertex; InputError if unknown.
  int vertex(std::string_view name) const;
  VertexSet vertices(std::initializer_list<std::string_view> names) const;
  VertexSet vertices(std::span<const std::string> names) const;

  VertexSet all_vertices() const { return VertexSet::first(num_vertices()); }
  EdgeSet all_edges() const { return EdgeSet::first(num_edges()); }
  Directedness directedness() const { return directedness_; }

  std::span<const Arc> arcs() const { return arcs_; }
  std::span<const Arc> arcs_from(int v) const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.names_ == b.names_ && a.edges_ == b.edges_;
  }

 private:
  std::vector<std::string> names_;
  std::vector<Edge> edges_;
  int edge_cap_ = kDefaultEdgeCap;
  Directedness directedness_ = Directedness::Undirected;
  std::vector<Arc> arcs_;  // grouped by `from`
  std::vector<int> arc_begin_;
};

/// Edge description by vertex name; used by tests and the JSON loader.
struct EdgeSpec {
  std::string tail;
  std::string head;
  bool oriented = false;
  Rational p{1, 2};
};

Graph make_graph(std::vector<std::string> vertex_names, const std::vector<EdgeSpec>& edges,
                 int edge_cap = Graph::kDefaultEdgeCap);

/// Result of graph surgery. edge_map[old] is the new index or -1 when the edge
/// is gone; vertex_map[old] likewise for vertices.
struct Surgery {
  Graph graph;
  std::vector<int> edge_map;
  std::vector<int> vertex_map;

  /// Transports an edge set of the old graph (dropping removed edges).
  EdgeSet map_edges(EdgeSet old) const;
  VertexSet map_vertices(VertexSet old) const;
};

/// E_X: edges with at least one endpoint in X.
EdgeSet edges_meeting(const Graph& g, VertexSet x);

/// bar(F): F together with every edge sharing a vertex with an edge of F.
EdgeSet closure(const Graph& g, EdgeSet f);

/// V(F): endpoints of the edges of F. V(empty) is empty.
VertexSet vertex_support(const Graph& g, EdgeSet f);

Surgery delete_edges(const Graph& g, EdgeSet f);

/// Identifies the endpoints of every edge of F. Loops created by the quotient
/// are dropped, parallel edges are kept. Undirected edges only.
Surgery contract_edges(const Graph& g, EdgeSet f);

/// Collapses the vertex set X to a single vertex; edges inside X are dropped.
Surgery merge_vertices(const Graph& g, VertexSet x);

/// G[U]: vertices of U and the edges with both endpoints in U.
Surgery induced_subgraph(const Graph& g, VertexSet u);

std::string describe(const Graph& g, EdgeSet f);
std::string describe(const Graph& g, VertexSet v);

// JSON: {"vertices":[...],"edges":[{"tail","head","oriented","p"}]}; p may be
// a decimal string, a "num/den" string, or a JSON number.
Graph graph_from_json(const nlohmann::json& j, int edge_cap = Graph::kDefaultEdgeCap);
nlohmann::json graph_to_json(const Graph& g);
Graph load_graph(const std::string& path, int edge_cap = Graph::kDefaultEdgeCap);

}  // namespace ccl
