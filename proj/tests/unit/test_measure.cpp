#include "oracle.hpp"

#include <ccl/configs.hpp>
#include <ccl/measure.hpp>

#include <doctest.h>

using namespace ccl;

namespace {

Graph path_svt(Rational p = Rational(1, 2)) {
  return make_graph({"s", "v", "t"}, {{"s", "v", false, p}, {"v", "t", false, p}});
}

Graph test_graph() {
  return make_graph({"a", "b", "c", "d", "e"}, {{"a", "b", false, Rational(1, 3)},
                                                 {"b", "c", false, Rational(1, 2)},
                                                 {"c", "a", false, Rational(3, 4)},
                                                 {"c", "d", false, Rational(2, 3)},
                                                 {"d", "e", false, Rational(1, 4)},
                                                 {"e", "b", false, Rational(1, 2)},
                                                 {"a", "d", false, Rational(1, 3)}});
}

}  // namespace

TEST_CASE("product measure examples") {
  Graph e = make_graph({"s", "t"}, {{"s", "t"}});
  auto mu = product_measure<Rational>(e);
  CHECK(mu[0] == Rational(1, 2));
  CHECK(mu[1] == Rational(1, 2));
  auto third = product_measure<Rational>(make_graph({"s", "t"}, {{"s", "t", false, Rational(1, 3)}}));
  CHECK(third[0] == Rational(2, 3));
  CHECK(third[1] == Rational(1, 3));
  auto two = product_measure<Rational>(path_svt());
  for (int w = 0; w < 4; ++w) CHECK(two[w] == Rational(1, 4));
  Graph g = test_graph();
  auto pm = product_measure<Rational>(g);
  Rational total = 0;
  for (std::uint64_t w = 0; w < g.num_configs(); ++w) {
    CHECK(pm[w] == oracle::product_weight(g, w));
    total += pm[w];
  }
  CHECK(total == 1);
}

TEST_CASE("count_components") {
  Graph t = make_graph({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}, {"a", "c"}});
  CHECK(count_components(t, Config(0)) == 3);
  CHECK(count_components(t, Config(0b111)) == 1);
  CHECK(count_components(path_svt(), Config(0b01)) == 2);
  Graph g = test_graph();
  for (std::uint64_t w = 0; w < g.num_configs(); ++w)
    CHECK(count_components(g, Config(static_cast<std::uint32_t>(w))) == oracle::components(g, w));
}

TEST_CASE("random-cluster measure") {
  Graph e = make_graph({"s", "t"}, {{"s", "t"}});
  CHECK(random_cluster_measure<Rational>(e, 2)[1] == Rational(1, 3));
  CHECK(random_cluster_measure<Rational>(e, 1)[1] == Rational(1, 2));
  Graph g = test_graph();
  auto pm = product_measure<Rational>(g);
  auto rc1 = random_cluster_measure<Rational>(g, 1);
  for (std::uint64_t w = 0; w < g.num_configs(); ++w) CHECK(rc1[w] == pm[w]);
  for (Rational q : {Rational(3, 2), Rational(2), Rational(3)}) {
    auto rc = random_cluster_measure<Rational>(g, q);
    Rational z = 0;
    for (std::uint64_t w = 0; w < g.num_configs(); ++w) z += oracle::rcm_weight(g, w, q);
    CHECK(rc.normalizer() == z);
    for (std::uint64_t w = 0; w < g.num_configs(); ++w) CHECK(rc[w] == oracle::rcm_weight(g, w, q) / z);
  }
  auto rd = random_cluster_measure<double>(g, 2);
  auto rr = random_cluster_measure<Rational>(g, 2);
  for (std::uint64_t w = 0; w < g.num_configs(); ++w) CHECK(rd[w] == doctest::Approx(to_double(rr[w])));
}

TEST_CASE("conditioning") {
  Graph p = path_svt();
  auto mu = product_measure<Rational>(p);
  auto same = condition(mu, Event(2, true));
  for (int w = 0; w < 4; ++w) CHECK(same[w] == mu[w]);
  Graph e = make_graph({"s", "t"}, {{"s", "t"}});
  auto point = condition(product_measure<Rational>(e), event_edge_open(e, 0));
  CHECK(point[1] == 1);
  auto c = condition(mu, event_R(p, p.vertices({"s"}), p.vertices({"t"})));
  Rational oracle_value = oracle::prob(
      p, [&](std::uint64_t w) { return oracle::product_weight(p, w) * (w != 0b11 ? 1 : 0); },
      [](std::uint64_t w) { return (w & 1u) != 0; });
  CHECK(c.probability(event_reach(p, 0, 1)) == oracle_value);
  CHECK(oracle_value == Rational(1, 3));
  CHECK_THROWS_AS(condition(mu, Event(2, false)), ZeroProbabilityError);
}

TEST_CASE("expectation and covariance") {
  Graph e = make_graph({"s", "t"}, {{"s", "t"}});
  auto mu = product_measure<Rational>(e);
  RealFunction open = RealFunction::indicator(event_edge_open(e, 0));
  RealFunction constant(1, Rational(5));
  CHECK(expectation(mu, constant) == 5);
  CHECK(covariance(mu, constant, open) == 0);
  CHECK(expectation(mu, open) == Rational(1, 2));
  Rational var = oracle::cond_cov(
      e, [&](std::uint64_t w) { return oracle::product_weight(e, w); }, [](std::uint64_t) { return true; },
      [](std::uint64_t w) { return Rational(w & 1u); }, [](std::uint64_t w) { return Rational(w & 1u); });
  CHECK(covariance(mu, open, open) == var);
  CHECK(var == Rational(1, 4));
}

TEST_CASE("cluster marginals") {
  Graph empty = make_graph({"s"}, {});
  auto m0 = cluster_marginal(product_measure<Rational>(empty), empty.vertices({"s"}));
  CHECK(m0.size() == 1);
  CHECK(m0.at(EdgeSet{}) == 1);
  Graph e = make_graph({"s", "t"}, {{"s", "t"}});
  auto m1 = cluster_marginal(product_measure<Rational>(e), e.vertices({"s"}));
  CHECK(m1.at(EdgeSet{}) == Rational(1, 2));
  CHECK(m1.at(EdgeSet(1)) == Rational(1, 2));
  Graph p = path_svt();
  auto m = cluster_marginal(product_measure<Rational>(p), p.vertices({"s"}));
  CHECK(m.size() == 3);
  for (auto [value, mass] : m) {
    Rational expected = oracle::prob(
        p, [&](std::uint64_t w) { return oracle::product_weight(p, w); },
        [&](std::uint64_t w) { return oracle::cluster(p, w, {0}) == value.bits; });
    CHECK(mass == expected);
  }
  CHECK(m.at(EdgeSet{}) == Rational(1, 2));
  CHECK(m.at(EdgeSet(0b01)) == Rational(1, 4));
  CHECK(m.at(EdgeSet(0b11)) == Rational(1, 4));
}

TEST_CASE("conditional restriction given the cluster reproduces a fresh measure on the remaining graph") {
  Graph p = path_svt();
  auto phi = random_cluster_measure<Rational>(p, 2);
  Surgery s;
  auto r = conditional_given_cluster(phi, p.vertices({"s"}), EdgeSet{}, &s);
  CHECK(r.dims() == 1);
  CHECK(r[1] == Rational(1, 3));

  Graph g = test_graph();
  for (Rational q : {Rational(1), Rational(3, 2), Rational(2), Rational(3)}) {
    auto phi_g = random_cluster_measure<Rational>(g, q);
    for (VertexSet src : {g.vertices({"a"}), g.vertices({"a", "e"})}) {
      for (auto [f, mass] : cluster_marginal(phi_g, src)) {
        Surgery surgery;
        auto cond = conditional_given_cluster(phi_g, src, f, &surgery);
        auto fresh = random_cluster_measure<Rational>(surgery.graph, q);
        for (std::uint64_t w = 0; w < cond.weights().size(); ++w) CHECK(cond[w] == fresh[w]);
        if (q == 1) {
          auto prod = product_measure<Rational>(surgery.graph);
          for (std::uint64_t w = 0; w < cond.weights().size(); ++w) CHECK(cond[w] == prod[w]);
        }
      }
    }
  }
}

TEST_CASE("conditioning on mutual unreachability first gives the same restriction") {
  Graph g = test_graph();
  VertexSet s = g.vertices({"a"}), t = g.vertices({"e"});
  for (Rational q : {Rational(1), Rational(2)}) {
    auto phi = random_cluster_measure<Rational>(g, q);
    auto phi_st = condition(phi, event_mutually_unreachable(g, s, t));
    for (auto [f, mass] : cluster_marginal(phi_st, s)) {
      auto a = conditional_given_cluster(phi, s, f);
      auto b = conditional_given_cluster(phi_st, s, f);
      for (std::uint64_t w = 0; w < a.weights().size(); ++w) CHECK(a[w] == b[w]);
    }
  }
}

TEST_CASE("conditioning on an edge equals contraction or deletion") {
  Graph g = test_graph();
  for (Rational q : {Rational(1), Rational(3, 2), Rational(3)}) {
    auto phi = random_cluster_measure<Rational>(g, q);
    for (int e = 0; e < g.num_edges(); ++e) {
      auto surgery_open = contract_edges(g, EdgeSet::single(e));
      auto surgery_closed = delete_edges(g, EdgeSet::single(e));
      auto on = random_cluster_measure<Rational>(surgery_open.graph, q);
      auto off = random_cluster_measure<Rational>(surgery_closed.graph, q);
      auto phi_on = condition(phi, event_edge_open(g, e));
      auto phi_off = condition(phi, ~event_edge_open(g, e));
      for (std::uint64_t w = 0; w < g.num_configs(); ++w) {
        Config c(static_cast<std::uint32_t>(w));
        if (c.test(e)) {
          CHECK(phi_on[w] == on[surgery_open.map_edges(c).bits]);
        } else {
          CHECK(phi_off[w] == off[surgery_closed.map_edges(c).bits]);
        }
      }
    }
  }
}

TEST_CASE("boundary set distribution") {
  Graph lone = make_graph({"z", "a", "b"}, {{"a", "b"}});
  auto d0 = boundary_set_distribution<Rational>(lone, lone.vertices({"z"}));
  CHECK(d0.size() == 1);
  CHECK(d0.at(VertexSet{}) == 1);
  Graph star = make_graph({"z", "a", "b"}, {{"z", "a"}, {"z", "b"}});
  auto d = boundary_set_distribution<Rational>(star, star.vertices({"z"}));
  CHECK(d.at(star.vertices({"a"})) == Rational(1, 4));
  CHECK(d.at(star.vertices({"a", "b"})) == Rational(1, 4));
  Graph g = make_graph({"z1", "z2", "a", "b", "c", "d"},
                       {{"z1", "a", false, Rational(1, 3)}, {"z2", "a", false, Rational(1, 4)},
                        {"z1", "b", false, Rational(2, 3)}, {"c", "z2", true, Rational(1, 2)},
                        {"z2", "d", true, Rational(3, 4)}, {"z1", "z2"}, {"a", "c"}});
  VertexSet z = g.vertices({"z1", "z2"});
  VertexSet n = boundary_vertices(g, z);
  CHECK(n == g.vertices({"a", "b", "c"}));
  auto dist = boundary_set_distribution<Rational>(g, z);
  CHECK(check_log_modular(dist, n).holds);
  std::map<VertexSet, Rational> skewed{{VertexSet{}, Rational(1, 2)}, {VertexSet(0b11), Rational(1, 2)}};
  CHECK_FALSE(check_log_modular(skewed, VertexSet(0b11)).holds);
}

TEST_CASE("measure json round trip") {
  auto phi = random_cluster_measure<Rational>(path_svt(Rational(1, 3)), 2);
  auto back = measure_from_json(measure_to_json(phi));
  CHECK(back.normalizer() == phi.normalizer());
  for (int w = 0; w < 4; ++w) CHECK(back[w] == phi[w]);
}
