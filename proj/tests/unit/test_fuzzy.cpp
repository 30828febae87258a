#include "oracle.hpp"

#include <ccl/configs.hpp>
#include <ccl/error.hpp>
#include <ccl/fuzz.hpp>
#include <ccl/fuzzy.hpp>
#include <ccl/measure.hpp>
#include <ccl/theorems.hpp>

#include <doctest.h>

using namespace ccl;

namespace {

Graph single_edge() { return make_graph({"s", "t"}, {{"s", "t"}}); }
Graph path_svt() { return make_graph({"s", "v", "t"}, {{"s", "v"}, {"v", "t"}}); }
Graph triangle() { return make_graph({"s", "t", "u"}, {{"s", "t"}, {"t", "u"}, {"s", "u"}}); }

// Unnormalized weight of (omega, sigma): zero unless sigma is constant on
// open edges, else product weight times alpha^{#1-components} beta^{#0-components}.
Rational joint_weight(const Graph& g, std::uint64_t omega, std::uint64_t sigma, const FuzzyParams& fp) {
  for (int e = 0; e < g.num_edges(); ++e)
    if (oracle::open(omega, e) && ((sigma >> g.edge(e).tail) & 1u) != ((sigma >> g.edge(e).head) & 1u)) return 0;
  Rational w = oracle::product_weight(g, omega);
  std::vector<bool> seen(g.num_vertices(), false);
  for (int v = 0; v < g.num_vertices(); ++v) {
    if (seen[v]) continue;
    auto r = oracle::reach(g, omega, {v});
    for (int u = 0; u < g.num_vertices(); ++u)
      if (r[u]) seen[u] = true;
    w *= ((sigma >> v) & 1u) ? fp.alpha : fp.beta;
  }
  return w;
}

Rational joint_total(const Graph& g, const FuzzyParams& fp) {
  Rational z = 0;
  for (std::uint64_t w = 0; w < g.num_configs(); ++w)
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << g.num_vertices()); ++s) z += joint_weight(g, w, s, fp);
  return z;
}

const FuzzyParams kIsing{Rational(2), Rational(1), Rational(1)};

}  // namespace

TEST_CASE("fuzzy coupling on a single edge") {
  auto g = single_edge();
  auto c = build_coupling_forward(g, kIsing);
  // sigma = (s=1, t=0) has bit 0 set.
  CHECK(marginal_spin(c)[0b01] == Rational(1, 6));
  CHECK(marginal_spin(c)[0b10] == Rational(1, 6));
  CHECK(marginal_spin(c)[0b11] == Rational(1, 3));
  CHECK(marginal_spin(c)[0b00] == Rational(1, 3));
  CHECK(c.at(Config(1), 0b01) == 0);  // discordant spins force the edge closed
  auto rev = build_coupling_reverse(g, kIsing);
  for (std::uint32_t w = 0; w < 2; ++w)
    for (Spin s = 0; s < 4; ++s) CHECK(c.at(Config(w), s) == rev.at(Config(w), s));
  CHECK(compare_couplings(g, kIsing).ok());

  auto hat = conditional_spin_measure(g, kIsing, 0, 1);
  CHECK(hat[0b01] == 1);
  auto key = check_key_identity(g, kIsing, 0, 1);
  CHECK(key.equal);
  CHECK(key.target[0] == 1);
}

TEST_CASE("fuzzy coupling agrees with brute force") {
  for (const auto& g : {single_edge(), path_svt(), triangle()})
    for (const auto& fp : fuzzy_grid()) {
      auto c = build_coupling_forward(g, fp);
      Rational z = joint_total(g, fp);
      for (std::uint64_t w = 0; w < g.num_configs(); ++w)
        for (Spin s = 0; s < (Spin{1} << g.num_vertices()); ++s)
          CHECK(c.at(Config(static_cast<std::uint32_t>(w)), s) == joint_weight(g, w, s, fp) / z);
    }
}

TEST_CASE("edgeless graph gives independent spins") {
  auto g = make_graph({"a", "b", "c"}, {});
  FuzzyParams fp{Rational(3), Rational(1), Rational(2)};
  auto mu = spin_measure(g, fp);
  for (Spin s = 0; s < 8; ++s) {
    Rational expect = 1;
    for (int v = 0; v < 3; ++v) expect *= ((s >> v) & 1u) ? Rational(1, 3) : Rational(2, 3);
    CHECK(mu[s] == expect);
  }
  CHECK(compare_couplings(g, fp).ok());
}

TEST_CASE("forward and reverse couplings agree on random graphs") {
  Rng rng(123);
  for (int i = 0; i < 30; ++i) {
    auto g = random_graph(rng, Directedness::Undirected, 5, 6, 2);
    for (const auto& fp : fuzzy_grid()) {
      auto r = compare_couplings(g, fp);
      CHECK(r.ok());
      CHECK(check_lattice_condition<Rational>(g.num_vertices(), spin_measure(g, fp)).holds);
    }
  }
}

TEST_CASE("reverse description: constant spin slices") {
  auto g = triangle();
  FuzzyParams fp{Rational(3), Rational(1), Rational(2)};
  auto all_one = config_given_spin(g, fp, 0b111);
  auto phi_alpha = random_cluster_measure<Rational>(g, fp.alpha);
  CHECK(std::equal(all_one.begin(), all_one.end(), phi_alpha.weights().begin()));
  auto all_zero = config_given_spin(g, fp, 0);
  auto phi_beta = random_cluster_measure<Rational>(g, fp.beta);
  CHECK(std::equal(all_zero.begin(), all_zero.end(), phi_beta.weights().begin()));
}

TEST_CASE("mu is flip symmetric when alpha = beta") {
  auto g = path_svt();
  for (const auto& fp : {kIsing, FuzzyParams{Rational(3), Rational(3, 2), Rational(3, 2)}}) {
    auto mu = spin_measure(g, fp);
    for (Spin s = 0; s < 8; ++s) CHECK(mu[s] == mu[~s & 7]);
    auto st = conditional_spin_measure(g, fp, 0, 2);
    auto ts = conditional_spin_measure(g, fp, 2, 0);
    for (Spin s = 0; s < 8; ++s) CHECK(st[s] == ts[~s & 7]);
  }
}

TEST_CASE("mu-hat on the path") {
  auto g = path_svt();
  auto hat = conditional_spin_measure(g, kIsing, 0, 2);
  // Brute force: P(sigma(v) = 1 | sigma(s) = 1, sigma(t) = 0).
  Rational num = 0, den = 0;
  for (std::uint64_t w = 0; w < 4; ++w)
    for (Spin s : {Spin{0b001}, Spin{0b011}}) {
      Rational x = joint_weight(g, w, s, kIsing);
      den += x;
      if (s & 0b010) num += x;
    }
  CHECK(hat[0b011] == num / den);
  CHECK(hat[0b011] == Rational(1, 2));
  CHECK(hat[0b001] == Rational(1, 2));
  CHECK_THROWS_AS(conditional_spin_measure(g, kIsing, 0, 0), InputError);
}

TEST_CASE("key identity") {
  for (const auto& fp : fuzzy_grid()) {
    CHECK(check_key_identity(path_svt(), fp, 0, 2).equal);
    CHECK(check_key_identity(triangle(), fp, 0, 1).equal);
  }
  Rng rng(8);
  for (int i = 0; i < 20; ++i) {
    auto g = random_graph(rng, Directedness::Undirected, 5, 6, 2);
    for (const auto& fp : fuzzy_grid()) CHECK(check_key_identity(g, fp, 0, g.num_vertices() - 1).equal);
  }
  // The identity does not need alpha, beta >= 1.
  CHECK(check_key_identity(triangle(), FuzzyParams{Rational(3, 2), Rational(1, 2), Rational(1)}, 0, 1).equal);
}

TEST_CASE("lattice condition and association of mu-hat") {
  Rng rng(19);
  for (int i = 0; i < 20; ++i) {
    auto g = random_graph(rng, Directedness::Undirected, 6, 6, 3);
    for (const auto& fp : fuzzy_grid()) {
      auto r = check_spin_lattice(g, fp, 0, 1);
      CHECK(r.holds());
    }
  }
}

TEST_CASE("lattice condition can fail below alpha = 1") {
  // Informational search: the lattice condition is only claimed for alpha, beta >= 1.
  Rng rng(4);
  int failures = 0;
  for (int i = 0; i < 60; ++i) {
    auto g = random_graph(rng, Directedness::Undirected, 4, 5, 3);
    FuzzyParams fp{Rational(5, 4), Rational(1, 4), Rational(1)};
    if (!check_lattice_condition<Rational>(g.num_vertices(), spin_measure(g, fp)).holds) ++failures;
  }
  MESSAGE("lattice failures at (q, alpha, beta) = (5/4, 1/4, 1): " << failures << " of 60");
}

TEST_CASE("fact (c)") {
  auto g = path_svt();
  const int s = 0, v = 1, t = 2;
  auto f = certify(g, RealFunction::indicator(event_reach(g, s, v)),
                   {MonotoneKind::PairMonotone, VertexSet::single(s), VertexSet::single(t)});
  auto r = check_fact_c(g, kIsing, s, t, f);
  CHECK(r.monotone);
  CHECK(r.spins == 2);
  CHECK(r.pairs_checked == 1);

  auto one = certify(g, RealFunction(2, Rational(5)), {MonotoneKind::PairMonotone, VertexSet::single(s), VertexSet::single(t)});
  auto rc = check_fact_c(g, kIsing, s, t, one);
  CHECK(rc.monotone);
  CHECK(rc.monotone_all_spins);

  auto e = single_edge();
  auto fe = certify(e, RealFunction(1, Rational(1)), {MonotoneKind::PairMonotone, VertexSet::single(0), VertexSet::single(1)});
  CHECK(check_fact_c(e, kIsing, 0, 1, fe).pairs_checked == 0);

  CHECK_THROWS_AS(check_fact_c(g, FuzzyParams{Rational(3, 2), Rational(1, 2), Rational(1)}, s, t, f), HypothesisError);
  auto wrong = certify(g, RealFunction::indicator(event_reach(g, s, v)),
                       {MonotoneKind::ClusterIncreasing, VertexSet::single(s), {}});
  CHECK_THROWS_AS(check_fact_c(g, kIsing, s, t, wrong), HypothesisError);
}

TEST_CASE("fact (c) on random pair-monotone functions") {
  Rng rng(31);
  for (int i = 0; i < 40; ++i) {
    auto g = random_graph(rng, Directedness::Undirected, 5, 6, 3);
    const int s = 0, t = 1;
    auto f = random_pair_function(g, VertexSet::single(s), VertexSet::single(t), rng);
    auto cf = certify(g, f, {MonotoneKind::PairMonotone, VertexSet::single(s), VertexSet::single(t)});
    REQUIRE(cf.verified());
    for (const auto& fp : fuzzy_grid()) CHECK(check_fact_c(g, fp, s, t, cf).monotone);
  }
}

TEST_CASE("fuzzy chain reproduces T2.5 slack") {
  Rng rng(57);
  for (int i = 0; i < 40; ++i) {
    auto g = random_graph(rng, Directedness::Undirected, 5, 6, 3);
    const int s = 0, t = 1;
    VertexSet S = VertexSet::single(s), T = VertexSet::single(t);
    auto f = random_pair_function(g, S, T, rng);
    auto h = random_pair_function(g, S, T, rng);
    const auto& fp = fuzzy_grid()[i % fuzzy_grid().size()];
    auto c = fuzzy_chain(g, fp, s, t, f, h);
    CHECK(c.ok());
    auto cf = certify(g, f, {MonotoneKind::PairMonotone, S, T});
    auto ch = certify(g, h, {MonotoneKind::PairMonotone, S, T});
    auto rep = check_thm_2_5(g, S, T, fp.q, cf, ch);
    CHECK(rep.rhs == c.e_fh);
    CHECK(rep.lhs == c.e_f_e_h);
    CHECK(rep.verdict == Verdict::Holds);
  }
}

TEST_CASE("fuzzy input errors") {
  CHECK_THROWS_AS(fuzzy_params(Rational(2), Rational(1), Rational(2)), InputError);
  CHECK_THROWS_AS(fuzzy_params(Rational(1), Rational(0), Rational(1)), InputError);
  auto d = make_graph({"a", "b"}, {{"a", "b", true}});
  CHECK_THROWS_AS(build_coupling_forward(d, kIsing), UnsupportedOperation);
  auto big = make_graph({"a", "b", "c", "d"}, {{"a", "b"}});
  CHECK_THROWS_AS(spin_measure(big, kIsing, 3), BudgetError);
}

TEST_CASE("fuzzy report") {
  auto g = path_svt();
  auto f = certify(g, RealFunction::indicator(event_reach(g, 0, 1)),
                   {MonotoneKind::PairMonotone, VertexSet::single(0), VertexSet::single(2)});
  auto j = fuzzy_report(g, kIsing, std::make_pair(0, 2), f);
  CHECK(j["ok"] == true);
  CHECK(j["mu"]["101"] == "1/18");  // 18 equally weighted valid (omega, sigma) pairs
  CHECK(j["fact_c"]["monotone"] == true);
  CHECK(j.dump() == fuzzy_report(g, kIsing, std::make_pair(0, 2), f).dump());
}
