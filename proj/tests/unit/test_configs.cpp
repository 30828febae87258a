#include "oracle.hpp"

#include <ccl/configs.hpp>
#include <ccl/error.hpp>

#include <doctest.h>

using namespace ccl;

namespace {

Graph path_svt() { return make_graph({"s", "v", "t"}, {{"s", "v"}, {"v", "t"}}); }

// Oriented edges (s,v), (t,v), (v,a).
Graph directed_cex() {
  return make_graph({"s", "t", "v", "a"}, {{"s", "v", true}, {"t", "v", true}, {"v", "a", true}});
}

Graph mixed_graph() {
  return make_graph({"s", "a", "b", "c", "t"},
                    {{"s", "a"}, {"a", "b", true}, {"b", "c"}, {"c", "a", true}, {"c", "t"}, {"s", "b", true}, {"t", "b"}});
}

}  // namespace

TEST_CASE("open_cluster examples") {
  Graph p = path_svt();
  CHECK(open_cluster(p, Config(0b11), p.vertices({"s"})) == EdgeSet(0b11));
  CHECK(open_cluster(p, Config(0), p.vertices({"s"})).empty());
  CHECK(open_cluster(p, Config(0b11), VertexSet{}).empty());
  Graph d = directed_cex();
  CHECK(open_cluster(d, Config(0b111), d.vertices({"s"})) == EdgeSet(0b101));
}

TEST_CASE("open_cluster agrees with the fixpoint oracle on a mixed graph") {
  Graph g = mixed_graph();
  for (std::uint64_t src = 1; src < 32; src += 3) {
    std::vector<int> from;
    for (int v = 0; v < 5; ++v)
      if ((src >> v) & 1u) from.push_back(v);
    auto table = cluster_table(g, VertexSet(src));
    for (std::uint64_t w = 0; w < g.num_configs(); ++w) {
      CHECK(table.cluster[w].bits == oracle::cluster(g, w, from));
      auto r = oracle::reach(g, w, from);
      for (int v = 0; v < 5; ++v) CHECK(table.reach[w].test(v) == r[v]);
    }
  }
}

TEST_CASE("clusters are monotone in omega and local") {
  Graph g = mixed_graph();
  VertexSet s = g.vertices({"s"});
  for (std::uint64_t w = 0; w < g.num_configs(); ++w) {
    EdgeSet c = open_cluster(g, Config(w), s);
    for (int i = 0; i < g.num_edges(); ++i)
      CHECK(c.subset_of(open_cluster(g, Config(w | (1u << i)), s)));
    // Closing everything outside bar(C) leaves the cluster unchanged.
    EdgeSet keep = closure(g, c) | edges_meeting(g, s);
    CHECK(open_cluster(g, Config(w & keep.bits), s) == c);
  }
}

TEST_CASE("event_reach") {
  Graph e = make_graph({"s", "t"}, {{"s", "t"}});
  CHECK(event_reach(e, 0, 1) == event_edge_open(e, 0));
  Graph p = path_svt();
  CHECK(event_reach(p, 0, 0).is_full());
  Event st = event_reach(p, 0, 2);
  CHECK(st.count() == 1);
  CHECK(st.contains(0b11));
}

TEST_CASE("event_R") {
  Graph p = path_svt();
  VertexSet s = p.vertices({"s"});
  CHECK(event_R(p, s, p.vertices({"t"})).count() == 3);
  CHECK(event_R(p, s, VertexSet{}).is_full());
  Graph d = directed_cex();
  CHECK(event_R(d, d.vertices({"s"}), d.vertices({"t"})).is_full());
  Graph g = mixed_graph();
  VertexSet gs = g.vertices({"s"});
  for (std::uint64_t x = 0; x < 32; ++x)
    for (std::uint64_t y = 0; y < 32; ++y) {
      if ((x | y) & 1u) continue;
      CHECK(event_R(g, gs, VertexSet(x | y)) == (event_R(g, gs, VertexSet(x)) & event_R(g, gs, VertexSet(y))));
    }
}

TEST_CASE("undirected graphs: reachability is symmetric") {
  Graph g = make_graph({"a", "b", "c", "d"}, {{"a", "b"}, {"b", "c"}, {"c", "d"}, {"d", "a"}, {"a", "c"}});
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) CHECK(event_reach(g, a, b) == event_reach(g, b, a));
}

TEST_CASE("event_Q_disjoint_clusters") {
  Graph d = directed_cex();
  Event q = event_Q_disjoint_clusters(d, d.vertex("s"), d.vertex("t"));
  CHECK(q.contains(0));
  CHECK_FALSE(q.contains(0b011));
  Graph two = make_graph({"s", "a", "t", "b"}, {{"s", "a", true}, {"t", "b", true}});
  CHECK(event_Q_disjoint_clusters(two, 0, 2).contains(0b11));
  CHECK_THROWS_AS(event_Q_disjoint_clusters(path_svt(), 0, 2), UnsupportedOperation);
  CHECK_THROWS_AS(event_Q_disjoint_clusters(mixed_graph(), 0, 4), UnsupportedOperation);
}

TEST_CASE("parse_event") {
  Graph p = path_svt();
  CHECK(parse_event(p, "reach(s,t)") == event_reach(p, 0, 2));
  CHECK(parse_event(p, "R(s;t)") == event_R(p, p.vertices({"s"}), p.vertices({"t"})));
  CHECK(parse_event(p, "!reach(s,t)") == event_R(p, p.vertices({"s"}), p.vertices({"t"})));
  CHECK(parse_event(p, "open(s-v) & open(#1)") == event_reach(p, 0, 2));
  CHECK(parse_event(p, "cluster_contains(s;v-t)") == event_reach(p, 0, 2));
  CHECK(parse_event(p, "true").is_full());
  CHECK(parse_event(p, "(false | open(v-t))") == event_edge_open(p, 1));
  CHECK_THROWS_AS(parse_event(p, "reach(s,"), InputError);
  CHECK_THROWS_AS(parse_event(p, "reach(s,q)"), InputError);
  CHECK_THROWS_AS(parse_event(p, "open(s-t)"), InputError);
}

TEST_CASE("verify_monotone") {
  Graph g = make_graph({"s", "a", "b"}, {{"s", "a"}, {"a", "b"}, {"s", "b"}});
  VertexSet s = g.vertices({"s"});
  Event sa = event_reach(g, 0, 1);
  CHECK(certify(g, sa, {MonotoneKind::ClusterIncreasing, s, {}}).verified());
  CHECK(certify(g, sa, {MonotoneKind::Increasing, {}, {}}).verified());
  auto bad = certify(g, ~sa, {MonotoneKind::Increasing, {}, {}});
  CHECK(bad.checked());
  CHECK_FALSE(bad.verified());
  REQUIRE(bad.witness());
  CHECK(bad.witness()->lower.subset_of(bad.witness()->upper));
  RealFunction constant(g.num_edges(), Rational(7));
  for (auto kind : {MonotoneKind::Increasing, MonotoneKind::Decreasing, MonotoneKind::ClusterIncreasing,
                    MonotoneKind::ClusterDecreasing, MonotoneKind::PairMonotone})
    CHECK(certify(g, constant, {kind, s, g.vertices({"b"})}).verified());
  // Increasing in omega but not determined by C_s.
  CHECK_FALSE(certify(g, event_edge_open(g, 1), {MonotoneKind::ClusterIncreasing, s, {}}).verified());
}

TEST_CASE("pair-monotone certificates") {
  Graph p = make_graph({"s", "v", "t"}, {{"s", "v"}, {"v", "t"}});
  VertexSet s = p.vertices({"s"}), t = p.vertices({"t"});
  Event sv = event_reach(p, 0, 1);
  Event not_tv = ~event_reach(p, 2, 1);
  CHECK(certify(p, sv, {MonotoneKind::PairMonotone, s, t}).verified());
  CHECK(certify(p, not_tv, {MonotoneKind::PairMonotone, s, t}).verified());
  CHECK_FALSE(certify(p, event_reach(p, 2, 1), {MonotoneKind::PairMonotone, s, t}).verified());
}

TEST_CASE("reduce_event_off_EX") {
  Graph p = path_svt();
  auto a = certify(p, event_reach(p, 0, 1), {MonotoneKind::ClusterIncreasing, p.vertices({"s"}), {}});
  CHECK(reduce_event_off_EX(p, a, 0, p.vertices({"t"})) == event_edge_open(p, 0));
  auto omega = certify(p, Event(p.num_edges(), true), {MonotoneKind::ClusterIncreasing, p.vertices({"s"}), {}});
  CHECK(reduce_event_off_EX(p, omega, 0, p.vertices({"t"})).is_full());

  Graph g = make_graph({"s", "a", "x", "b"}, {{"s", "a"}, {"a", "x"}, {"x", "b"}, {"s", "b"}, {"a", "b"}});
  VertexSet x = g.vertices({"x"});
  auto reach_b = certify(g, event_reach(g, 0, 3), {MonotoneKind::ClusterIncreasing, g.vertices({"s"}), {}});
  Event reduced = reduce_event_off_EX(g, reach_b, 0, x);
  Event rx = event_R(g, g.vertices({"s"}), x);
  CHECK((reduced & rx) == (event_reach(g, 0, 3) & rx));
  CHECK(reduced.subset_of(event_reach(g, 0, 3)));
  auto unverified = MonotoneCertificate(event_reach(g, 0, 3), {MonotoneKind::ClusterIncreasing, g.vertices({"s"}), {}});
  CHECK_THROWS_AS(reduce_event_off_EX(g, unverified, 0, x), HypothesisError);
}
