#include "oracle.hpp"

#include <ccl/chains.hpp>
#include <ccl/configs.hpp>
#include <ccl/error.hpp>
#include <ccl/fuzz.hpp>

#include <doctest.h>

using namespace ccl;

namespace {

Graph path_svt(Rational p = Rational(1, 2)) {
  return make_graph({"s", "v", "t"}, {{"s", "v", false, p}, {"v", "t", false, p}});
}

Graph triangle() { return make_graph({"s", "v", "t"}, {{"s", "v"}, {"v", "t"}, {"s", "t", false, Rational(1, 3)}}); }

Graph star3() { return make_graph({"s", "c", "t", "u"}, {{"s", "c"}, {"c", "t", false, Rational(2, 3)}, {"c", "u"}}); }

VertexSet vs(const Graph& g, const char* name) { return VertexSet::single(g.vertex(name)); }

using Pair = std::pair<std::uint32_t, std::uint32_t>;

// Law of (C_S, C_T) given no open S-T path, by brute force.
std::map<Pair, Rational> joint_oracle(const Graph& g, int s, int t, const Rational& q) {
  std::map<Pair, Rational> joint;
  Rational z = 0;
  for (std::uint64_t w = 0; w < g.num_configs(); ++w) {
    if (oracle::reach(g, w, {s})[t]) continue;
    Rational x = oracle::rcm_weight(g, w, q);
    joint[{oracle::cluster(g, w, {s}), oracle::cluster(g, w, {t})}] += x;
    z += x;
  }
  for (auto& e : joint) e.second /= z;
  return joint;
}

// One step from (cs, ct): C_T' ~ law given C_S = cs, then C_S' ~ law given C_T'.
std::map<Pair, Rational> row_oracle(const std::map<Pair, Rational>& joint, Pair from) {
  std::map<Pair, Rational> out;
  Rational ms = 0;
  for (const auto& [st, p] : joint)
    if (st.first == from.first) ms += p;
  for (const auto& [mid, p1] : joint) {
    if (mid.first != from.first) continue;
    Rational mt = 0;
    for (const auto& [st, p] : joint)
      if (st.second == mid.second) mt += p;
    for (const auto& [to, p2] : joint)
      if (to.second == mid.second) out[to] += (p1 / ms) * (p2 / mt);
  }
  return out;
}

void check_against_oracle(const Graph& g, const char* s, const char* t, const Rational& q) {
  auto c = build_pair_chain(g, vs(g, s), vs(g, t), q);
  auto joint = joint_oracle(g, g.vertex(s), g.vertex(t), q);
  REQUIRE(c.states.size() == joint.size());
  for (std::size_t i = 0; i < c.states.size(); ++i) {
    Pair key{c.states[i].cs.bits, c.states[i].ct.bits};
    CHECK(c.stationary[i] == joint.at(key));
    auto expect = row_oracle(joint, key);
    std::map<Pair, Rational> got;
    for (const auto& [j, a] : c.kernel[i]) got[{c.states[j].cs.bits, c.states[j].ct.bits}] = a;
    CHECK(got == expect);
  }
}

}  // namespace

TEST_CASE("pair chain: forced state spaces") {
  auto edgeless = make_graph({"s", "t"}, {});
  auto c = build_pair_chain(edgeless, vs(edgeless, "s"), vs(edgeless, "t"), Rational(2));
  REQUIRE(c.states.size() == 1);
  auto d = diagnose(c, 0);
  CHECK(d.ok());
  CHECK(d.mixing_step == 0);

  auto single = make_graph({"s", "t"}, {{"s", "t"}});
  auto c1 = build_pair_chain(single, vs(single, "s"), vs(single, "t"), Rational(1));
  REQUIRE(c1.states.size() == 1);
  CHECK(c1.states[0] == ClusterPairState{});
  CHECK(pair_step_distribution(c1, 0) == SparseRow{{0, Rational(1)}});
  Rng rng(3);
  CHECK(step_pair_chain(c1, 0, rng) == 0);
}

TEST_CASE("pair chain on the path is exactly stationary") {
  for (Rational q : {Rational(1), Rational(2), Rational(1, 2)}) {
    auto g = path_svt();
    auto c = build_pair_chain(g, vs(g, "s"), vs(g, "t"), q);
    auto d = diagnose(c, c.empty_state());
    CHECK(d.residual == 0);
    CHECK(d.ok());
    CHECK(d.tv.back() < 1e-6);
    check_against_oracle(g, "s", "t", q);
  }
}

TEST_CASE("pair chain step from the empty state, path, q = 1") {
  auto g = path_svt();
  auto c = build_pair_chain(g, vs(g, "s"), vs(g, "t"), Rational(1));
  REQUIRE(c.states.size() == 3);
  const int sv = 0, vt = 1;
  std::map<ClusterPairState, Rational> got;
  for (const auto& [j, a] : pair_step_distribution(c, c.empty_state())) got[c.states[j]] = a;
  // Given C_S empty, C_T is empty or {vt} with probability 1/2 each; given
  // C_T empty, C_S is empty or {sv} with probability 1/2 each.
  std::map<ClusterPairState, Rational> expect{{{EdgeSet{}, EdgeSet{}}, Rational(1, 4)},
                                              {{EdgeSet::single(sv), EdgeSet{}}, Rational(1, 4)},
                                              {{EdgeSet{}, EdgeSet::single(vt)}, Rational(1, 2)}};
  CHECK(got == expect);

  // From ({sv}, empty) C_T must avoid V(C_S) = {s, v}, so it stays empty.
  int full = c.index_of({EdgeSet::single(sv), EdgeSet{}});
  for (const auto& [j, a] : c.ct_update[full]) CHECK(c.states[j].ct.empty());
}

TEST_CASE("pair chain matches brute force on larger graphs") {
  check_against_oracle(triangle(), "s", "t", Rational(2));
  check_against_oracle(star3(), "s", "t", Rational(3, 2));
  auto k4 = make_graph({"s", "t", "a", "b"}, {{"s", "a"}, {"s", "b"}, {"t", "a"}, {"t", "b"}, {"a", "b"}});
  check_against_oracle(k4, "s", "t", Rational(2));
  auto c = build_pair_chain(k4, vs(k4, "s"), vs(k4, "t"), Rational(2));
  auto d = diagnose(c, c.empty_state());
  CHECK(d.ok());
  CHECK(d.mixing_step > 0);
}

TEST_CASE("pair chain diagnostics hold on random graphs") {
  Rng rng(77);
  for (int i = 0; i < 40; ++i) {
    auto g = random_graph(rng, Directedness::Undirected, 5, 6, 2);
    int s = 0, t = 1 + static_cast<int>(rng.below(g.num_vertices() - 1));
    Rational q = rng.pick(fuzz_q_grid());
    auto c = build_pair_chain(g, VertexSet::single(s), VertexSet::single(t), q);
    for (int start : {c.empty_state(), static_cast<int>(c.states.size()) - 1}) {
      auto d = diagnose(c, start);
      CHECK(d.ok());
    }
  }
}

TEST_CASE("sampled pair chain steps follow the exact row") {
  auto g = triangle();
  auto c = build_pair_chain(g, vs(g, "s"), vs(g, "t"), Rational(2));
  int from = c.empty_state();
  std::map<int, int> counts;
  Rng rng(11);
  const int n = 40000;
  for (int i = 0; i < n; ++i) ++counts[step_pair_chain(c, from, rng)];
  for (const auto& [j, a] : pair_step_distribution(c, from)) {
    double p = to_double(a);
    double sd = std::sqrt(n * p * (1 - p));
    CHECK(std::fabs(counts[j] - n * p) <= 4 * sd + 1);
  }
}

TEST_CASE("pair chain input errors") {
  auto g = path_svt();
  CHECK_THROWS_AS(build_pair_chain(g, vs(g, "s"), vs(g, "s"), Rational(1)), ZeroProbabilityError);
  auto d = make_graph({"s", "t"}, {{"s", "t", true}});
  CHECK_THROWS_AS(build_pair_chain(d, vs(d, "s"), vs(d, "t"), Rational(1)), UnsupportedOperation);
  auto big = make_graph({"s", "a", "b", "c", "t"}, {{"s", "a"}, {"a", "b"}, {"b", "c"}, {"c", "t"}, {"a", "c"}});
  CHECK_THROWS_AS(build_pair_chain(big, vs(big, "s"), vs(big, "t"), Rational(1), 3), BudgetError);
}

TEST_CASE("trace indicators are positively associated") {
  auto g = path_svt();
  auto t0 = check_trace_association(g, vs(g, "s"), vs(g, "t"), Rational(1), 0);
  CHECK(t0.holds());
  CHECK(t0.verdict.proof);

  auto single = make_graph({"s", "t"}, {{"s", "t"}});
  auto t1 = check_trace_association(single, vs(single, "s"), vs(single, "t"), Rational(2), 2);
  CHECK(t1.holds());
  CHECK(t1.law.atoms.size() == 1);

  auto p1 = check_trace_association(g, vs(g, "s"), vs(g, "t"), Rational(1), 1);
  CHECK(p1.holds());
  CHECK(p1.verdict.proof);

  for (int n = 1; n <= 3; ++n)
    for (Rational q : {Rational(1), Rational(2), Rational(3)}) {
      CHECK(check_trace_association(g, vs(g, "s"), vs(g, "t"), q, n).holds());
      CHECK(check_trace_association(triangle(), vs(g, "s"), vs(g, "t"), q, n).holds());
      auto st = star3();
      CHECK(check_trace_association(st, vs(st, "s"), vs(st, "t"), q, n).holds());
    }
}

TEST_CASE("trace law: marginal of the first step is the kernel row") {
  auto g = triangle();
  auto c = build_pair_chain(g, vs(g, "s"), vs(g, "t"), Rational(2));
  auto tr = check_trace_association(g, vs(g, "s"), vs(g, "t"), Rational(2), 2);
  const int m = g.num_edges();
  Rational total = 0;
  std::map<std::uint64_t, Rational> first;
  for (const auto& [w, p] : tr.law.atoms) {
    total += p;
    first[w & ((std::uint64_t{1} << (2 * m)) - 1)] += p;
  }
  CHECK(total == 1);
  std::map<std::uint64_t, Rational> expect;
  for (const auto& [j, a] : c.kernel[c.empty_state()]) expect[trace_indicators(c, {c.empty_state(), j})] += a;
  CHECK(first == expect);
  // Indicators agree with the states they encode.
  for (std::size_t j = 0; j < c.states.size(); ++j) {
    auto w = trace_indicators(c, {0, static_cast<int>(j)});
    for (int e = 0; e < m; ++e) {
      CHECK(((w >> x_coord(m, 1, e)) & 1u) == !c.states[j].ct.test(e));
      CHECK(((w >> y_coord(m, 1, e)) & 1u) == c.states[j].cs.test(e));
    }
  }
}

TEST_CASE("trace association budget") {
  auto g = make_graph({"s", "a", "b", "t"}, {{"s", "a"}, {"a", "b"}, {"b", "t"}, {"s", "b"}});
  CHECK_THROWS_AS(check_trace_association(g, vs(g, "s"), vs(g, "t"), Rational(1), 1), BudgetError);
  auto p = path_svt();
  CHECK_THROWS_AS(check_trace_association(p, vs(p, "s"), vs(p, "t"), Rational(1), 4), BudgetError);
}

TEST_CASE("config chain: sequential alphas reproduce the conditionals") {
  for (Rational q : {Rational(1), Rational(2), Rational(1, 2)}) {
    for (const auto& g : {path_svt(), triangle(), star3()}) {
      ConfigChain chain(g, vs(g, "s"), vs(g, "t"), q);
      auto st = check_config_chain_stationary(chain);
      CHECK(st.ok());
      CHECK(st.residual == 0);
    }
  }
  auto g = path_svt();
  ConfigChain chain(g, vs(g, "s"), vs(g, "t"), Rational(1));
  // Given C_S empty, sv is closed; vt is open with probability 1/2.
  CHECK(chain.alpha_tau(EdgeSet{}, 0, Config{}) == 0);
  CHECK(chain.alpha_tau(EdgeSet{}, 1, Config{}) == Rational(1, 2));
  CHECK(chain.alpha_omega(EdgeSet::single(1), 0, Config{}) == 0);
  CHECK(chain.alpha_omega(EdgeSet::single(1), 1, Config{}) == 1);
}

TEST_CASE("config chain threshold semantics") {
  auto g = triangle();
  ConfigChain chain(g, vs(g, "s"), vs(g, "t"), Rational(2));
  std::vector<double> zeros(3, 0.0), ones(3, 0.999999);
  for (Config w : chain.support()) {
    EdgeSet cs = open_cluster(g, w, vs(g, "s"));
    // X = 0 opens every edge whose conditional probability is positive.
    std::vector<Config> taus;
    chain.sweep(false, cs, 1, taus);
    Config tau = taus[0];
    for (int e = 0; e < 3; ++e) {
      bool positive = chain.alpha_tau(cs, e, tau) > 0;
      CHECK(tau.test(e) == positive);
    }
    CHECK(open_cluster(g, tau, vs(g, "s")) == cs);
    // Y = 0 leaves closed every edge with alpha < 1.
    Config next = chain.step(w, zeros.data(), zeros.data());
    EdgeSet ct = open_cluster(g, tau, vs(g, "t"));
    for (int e = 0; e < 3; ++e) CHECK(next.test(e) == (chain.alpha_omega(ct, e, next) == 1));
    CHECK(chain.target_law()[next.bits] > 0);
  }
}

TEST_CASE("config chain traces stay in S not-> T") {
  auto g = star3();
  ConfigChain chain(g, vs(g, "s"), vs(g, "t"), Rational(2));
  auto noise = DrivingNoise::sample(5, g.num_edges(), 200);
  auto again = DrivingNoise::sample(5, g.num_edges(), 200);
  CHECK(noise.x == again.x);
  CHECK(noise.y == again.y);
  auto trace = chain.run(Config{}, noise, 200);
  CHECK(trace == chain.run(Config{}, again, 200));
  for (Config w : trace) {
    CHECK(chain.target_law()[w.bits] > 0);
    auto a = vertex_support(g, open_cluster(g, w, vs(g, "s")));
    auto b = vertex_support(g, open_cluster(g, w, vs(g, "t")));
    CHECK(!a.intersects(b));
  }
  CHECK_THROWS_AS(chain.run(Config(0b011), noise, 2), InputError);
}

TEST_CASE("config chain empirical law on the path") {
  auto g = path_svt();
  ConfigChain chain(g, vs(g, "s"), vs(g, "t"), Rational(1));
  auto f = config_chain_frequencies(chain, 100000, 2024);
  REQUIRE(f.rows.size() == 3);
  for (const auto& row : f.rows) CHECK(row.exact == Rational(1, 3));
  CHECK(f.within_3_sigma);
}

TEST_CASE("config chain monotonicity in the driving noise") {
  auto g = path_svt();
  ConfigChain chain(g, vs(g, "s"), vs(g, "t"), Rational(2));
  auto r0 = check_config_chain_monotone(chain, Config{}, 0);
  CHECK(r0.omega_increasing);
  CHECK(r0.clusters_monotone);

  auto r = check_config_chain_monotone(chain, Config{}, 2, 8);
  CHECK(r.clusters_monotone);
  CHECK(r.pairs_propagated > 0);
  // Coordinatewise the statement fails: from omega^0 = empty, X[v-t] below
  // alpha opens v-t in tau, so C_T = {v-t} and omega^1 = {v-t}; raising it
  // closes v-t in tau, C_T becomes empty and omega^1 loses v-t.
  REQUIRE_FALSE(r.omega_increasing);
  auto one = check_config_chain_monotone(chain, Config{}, 1, 8);
  REQUIRE(one.omega_witness);
  CHECK((*one.omega_witness)["variate"] == "X[{v-t}]");
  CHECK((*one.omega_witness)["lower_final"] == "{v-t}");

  auto single = make_graph({"s", "v", "t"}, {{"s", "v"}});
  ConfigChain c1(single, vs(single, "s"), vs(single, "t"), Rational(2));
  auto r1 = check_config_chain_monotone(c1, Config{}, 2, 8);
  CHECK(r1.omega_increasing);
  CHECK(r1.clusters_monotone);

  for (Rational q : {Rational(1), Rational(2), Rational(3)}) {
    ConfigChain tri(triangle(), vs(g, "s"), vs(g, "t"), q);
    CHECK(check_config_chain_monotone(tri, Config{}, 2, 4).clusters_monotone);
    auto st = star3();
    ConfigChain cst(st, vs(st, "s"), vs(st, "t"), q);
    CHECK(check_config_chain_monotone(cst, Config{}, 2, 4).clusters_monotone);
  }
}

TEST_CASE("grid sweep agrees with single steps") {
  auto g = triangle();
  ConfigChain chain(g, vs(g, "s"), vs(g, "t"), Rational(2));
  Rng rng(9);
  const int grid = 8;
  for (Config w : chain.support())
    for (int k = 0; k < 50; ++k) {
      std::vector<Rational> x, y;
      std::size_t ix = 0, iy = 0, stride = 1;
      for (int e = 0; e < 3; ++e, stride *= grid + 1) {
        auto dx = rng.below(grid + 1), dy = rng.below(grid + 1);
        x.emplace_back(static_cast<long>(dx), grid);
        y.emplace_back(static_cast<long>(dy), grid);
        ix += dx * stride;
        iy += dy * stride;
      }
      std::vector<Config> taus, omegas;
      chain.sweep(false, open_cluster(g, w, vs(g, "s")), grid, taus);
      chain.sweep(true, open_cluster(g, taus[ix], vs(g, "t")), grid, omegas);
      CHECK(omegas[iy] == chain.step(w, x.data(), y.data()));
    }
}

TEST_CASE("config chain: cluster order is monotone on random small graphs") {
  Rng rng(41);
  for (int i = 0; i < 60; ++i) {
    auto g = random_graph(rng, Directedness::Undirected, 4, 3, 2);
    int t = 1 + static_cast<int>(rng.below(g.num_vertices() - 1));
    Rational q = rng.pick(fuzz_q_grid());
    ConfigChain c(g, VertexSet::single(0), VertexSet::single(t), q);
    CHECK(check_config_chain_stationary(c).ok());
    for (Config w0 : c.support()) CHECK(check_config_chain_monotone(c, w0, 2, 2).clusters_monotone);
  }
}
