#include <ccl/contact.hpp>
#include <ccl/error.hpp>

#include <doctest.h>

#include <cmath>

using namespace ccl;

namespace {

using Dense = std::vector<std::vector<double>>;

// Generator written out directly from the rates, then exp(Qt) by scaling and
// squaring a Taylor polynomial.
Dense dense_generator(const ContactSpec& s) {
  const int n = s.num_sites();
  const std::size_t N = std::size_t{1} << n;
  Dense q(N, std::vector<double>(N, 0.0));
  for (std::size_t a = 0; a < N; ++a) {
    for (int x = 0; x < n; ++x) {
      const std::size_t b = a ^ (std::size_t{1} << x);
      double r = 0;
      if ((a >> x) & 1u) {
        r = to_double(s.delta[x]);
      } else {
        for (int y = 0; y < n; ++y)
          if ((a >> y) & 1u) r += to_double(s.lambda[x][y]);
      }
      q[a][b] += r;
      q[a][a] -= r;
    }
  }
  return q;
}

Dense multiply(const Dense& a, const Dense& b) {
  const std::size_t n = a.size();
  Dense c(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

std::vector<double> oracle_law(const ContactSpec& s, double t) {
  Dense q = dense_generator(s);
  const std::size_t N = q.size();
  int squarings = 0;
  double norm = 0;
  for (const auto& row : q)
    for (double v : row) norm = std::max(norm, std::abs(v));
  double scale = t;
  while (norm * N * scale > 0.5) {
    scale /= 2;
    ++squarings;
  }
  Dense e(N, std::vector<double>(N, 0.0)), term(N, std::vector<double>(N, 0.0));
  for (std::size_t i = 0; i < N; ++i) e[i][i] = term[i][i] = 1;
  for (auto& row : q)
    for (double& v : row) v *= scale;
  for (int k = 1; k <= 24; ++k) {
    term = multiply(term, q);
    for (auto& row : term)
      for (double& v : row) v /= k;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) e[i][j] += term[i][j];
  }
  for (int k = 0; k < squarings; ++k) e = multiply(e, e);
  return e[s.eta0];
}

ContactSpec two_sites(const Rational& d1, const Rational& d2, const Rational& l12, const Rational& l21) {
  ContactSpec s;
  s.sites = {"a", "b"};
  s.delta = {d1, d2};
  s.lambda = {{Rational(0), l12}, {l21, Rational(0)}};
  s.eta0 = 0b11;
  return s;
}

ContactSpec no_infection(std::vector<Rational> delta, SiteConfig eta0) {
  ContactSpec s;
  for (std::size_t x = 0; x < delta.size(); ++x) s.sites.push_back("y" + std::to_string(x));
  s.lambda.assign(delta.size(), std::vector<Rational>(delta.size(), Rational(0)));
  s.delta = std::move(delta);
  s.eta0 = eta0;
  return s;
}

Event up_on(int dims, SiteConfig m) {
  return Event::from_predicate(dims, [&](std::uint64_t e) { return (e & m) != 0; });
}
Event vacant_on(int dims, SiteConfig m) {
  return Event::from_predicate(dims, [&](std::uint64_t e) { return (e & m) == 0; });
}

}  // namespace

TEST_CASE("contact generator rates") {
  auto s = two_sites(Rational(1), Rational(2), Rational(3), Rational(1, 2));
  auto q = build_generator(s);
  REQUIRE(q.num_states() == 4);
  // From {a}: a recovers at 1, b is infected by a at lambda(b, a) = 1/2.
  CHECK(q.exit[0b01] == Rational(3, 2));
  CHECK(q.exit[0b10] == Rational(5));
  CHECK(q.exit[0b11] == Rational(3));
  CHECK(q.exit[0b00] == 0);
  CHECK(q.rows[0b00].empty());
}

TEST_CASE("one site pure death") {
  auto s = no_infection({Rational(1)}, 1);
  auto d = transient_distribution(s, 1.0);
  CHECK(std::abs(d.infected(0) - std::exp(-1.0)) < 1e-9);
  CHECK(std::abs(d.infected(0) - 0.36788) < 1e-5);
  CHECK(d.truncation_bound <= 1e-12);
  auto d0 = transient_distribution(s, 0.0);
  CHECK(d0.p[1] == 1.0);
  for (double t : {0.1, 0.5, 2.0, 7.5}) CHECK(std::abs(transient_distribution(s, t).infected(0) - std::exp(-t)) < 1e-9);
}

TEST_CASE("independent sites give product form") {
  auto s = no_infection({Rational(1, 2), Rational(1), Rational(2)}, 0b101);
  auto d = transient_distribution(s, 0.7);
  const double live[3] = {std::exp(-0.5 * 0.7), 0.0, std::exp(-2 * 0.7)};
  for (SiteConfig eta = 0; eta < 8; ++eta) {
    double want = 1;
    for (int x = 0; x < 3; ++x) want *= ((eta >> x) & 1u) ? live[x] : 1 - live[x];
    CHECK(std::abs(d.p[eta] - want) < 1e-10);
  }
}

TEST_CASE("no recovery keeps every site infected") {
  auto s = contact_path(3, Rational(0), Rational(1));
  auto d = transient_distribution(s, 2.0);
  CHECK(std::abs(d.p[0b111] - 1.0) < 1e-12);
}

TEST_CASE("uniformization against the matrix exponential") {
  std::vector<ContactSpec> specs{two_sites(Rational(1), Rational(1), Rational(1), Rational(1)),
                                 two_sites(Rational(1, 2), Rational(2), Rational(3), Rational(0)),
                                 two_sites(Rational(2), Rational(1, 3), Rational(1, 2), Rational(5, 2)),
                                 contact_path(3, Rational(1), Rational(2))};
  specs[1].eta0 = 0b01;
  for (const auto& s : specs)
    for (double t : {0.25, 1.0, 3.0}) {
      auto d = transient_distribution(s, t);
      auto want = oracle_law(s, t);
      double total = 0;
      for (std::size_t i = 0; i < want.size(); ++i) {
        CHECK(std::abs(d.p[i] - want[i]) < 1e-9);
        total += d.p[i];
      }
      CHECK(std::abs(total - 1) <= d.error_bound());
    }
}

TEST_CASE("uniformization on random instances") {
  Rng rng(99);
  for (int i = 0; i < 20; ++i) {
    auto s = random_contact(rng, 4);
    auto d = transient_distribution(s, 1.5);
    auto want = oracle_law(s, 1.5);
    for (std::size_t k = 0; k < want.size(); ++k) CHECK(std::abs(d.p[k] - want[k]) < 1e-9);
  }
}

TEST_CASE("conditional association of the contact process") {
  SUBCASE("independent sites, W empty") {
    auto s = no_infection({Rational(1), Rational(2), Rational(1, 2)}, 0b111);
    auto a = check_thm_contact(s, 1.0, 0);
    CHECK(a.holds());
    CHECK(a.verdict.proof);
    CHECK(std::abs(a.verdict.min_covariance) <= a.tol);
  }
  SUBCASE("path with the middle site healthy") {
    auto s = contact_path(3, Rational(1), Rational(1));
    auto a = check_thm_contact(s, 1.0, 0b010);
    CHECK(a.holds());
    CHECK(a.verdict.proof);
    CHECK(a.free_sites == std::vector<int>{0, 2});
    CHECK(a.verdict.min_covariance > 0);
    // Same quantity from the oracle: Cov(eta(x1), eta(x3) | eta(x2) = 0).
    auto law = oracle_law(s, 1.0);
    double p0 = 0, p1 = 0, p3 = 0, p13 = 0;
    for (SiteConfig e = 0; e < 8; ++e) {
      if (e & 0b010) continue;
      p0 += law[e];
      if (e & 1) p1 += law[e];
      if (e & 4) p3 += law[e];
      if ((e & 5) == 5) p13 += law[e];
    }
    const double cov = p13 / p0 - (p1 / p0) * (p3 / p0);
    CHECK(cov > 0);
    CHECK(std::abs(a.conditioning_probability - p0) < 1e-9);
  }
  SUBCASE("W is every site") {
    auto s = contact_path(3, Rational(1), Rational(1));
    auto a = check_thm_contact(s, 1.0, 0b111);
    CHECK(a.holds());
    CHECK(a.free_sites.empty());
  }
  SUBCASE("zero-probability conditioning") {
    auto s = contact_path(2, Rational(0), Rational(1));
    CHECK_THROWS_AS(check_thm_contact(s, 1.0, 0b01), ZeroProbabilityError);
  }
  SUBCASE("json") {
    auto s = contact_path(3, Rational(1), Rational(1));
    auto j = association_to_json(s, check_thm_contact(s, 1.0, 0b010));
    CHECK(j["W"] == nlohmann::json::array({"x2"}));
    CHECK(j["holds"] == true);
    CHECK(j["strategy"] == "exhaustive");
  }
}

TEST_CASE("finite-time correlation shapes") {
  auto s = contact_path(3, Rational(1), Rational(1));
  const Event any(3, true);
  SUBCASE("K = L is an equality") {
    auto c = check_finite_time_correlations(s, 1.0, 0b011, 0b011, 0, any, any);
    CHECK(c.vacancy.equality);
    CHECK(c.vacancy.slack == 0);
  }
  SUBCASE("left and right sites") {
    auto c = check_finite_time_correlations(s, 1.0, 0b001, 0b100, 0, any, any);
    CHECK(c.vacancy.holds);
    CHECK(c.vacancy.slack >= 0);
    auto law = oracle_law(s, 1.0);
    auto nu = [&](SiteConfig m) {
      double v = 0;
      for (SiteConfig e = 0; e < 8; ++e)
        if ((e & m) == 0) v += law[e];
      return v;
    };
    CHECK(std::abs(c.vacancy.rhs - nu(0) * nu(0b101)) < 1e-9);
    CHECK(std::abs(c.vacancy.lhs - nu(1) * nu(4)) < 1e-9);
    CHECK(c.stationary_lhs == 1);
    CHECK(c.stationary_rhs == 1);
  }
  SUBCASE("conditional form with vacancy events") {
    // A = {0 on K \ L}, B = {0 on L \ K}, W = K cap L.
    const SiteConfig k = 0b011, l = 0b110;
    auto c = check_finite_time_correlations(s, 1.0, k, l, k & l, vacant_on(3, k & ~l), vacant_on(3, l & ~k));
    CHECK(c.ok());
    CHECK(c.conditional.slack >= 0);
    // nu(A B | W) nu(W)^2 = nu(K cup L) nu(K cap L) and so on.
    const auto d = transient_distribution(s, 1.0);
    const double w = d.vacant(k & l);
    CHECK(std::abs(c.conditional.rhs * w * w - d.vacant(k | l) * w) < 1e-9);
    CHECK(std::abs(c.conditional.lhs * w * w - d.vacant(k) * d.vacant(l)) < 1e-9);
  }
  SUBCASE("increasing events") {
    auto c = check_finite_time_correlations(s, 2.0, 0, 0, 0b010, up_on(3, 1), up_on(3, 4));
    CHECK(c.conditional.holds);
  }
  SUBCASE("mixed directions are refused") {
    CHECK_THROWS_AS(check_finite_time_correlations(s, 1.0, 0, 0, 0b010, up_on(3, 1), vacant_on(3, 4)),
                    HypothesisError);
  }
}

TEST_CASE("infection probability decreases in time from all infected") {
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(0.25 * i);
  for (const auto& s : {contact_path(3, Rational(1), Rational(2)), contact_path(4, Rational(1, 2), Rational(1)),
                        two_sites(Rational(2), Rational(1, 2), Rational(3), Rational(1))}) {
    auto m = check_monotone_in_time(s, grid);
    CHECK(m.nonincreasing);
    CHECK(m.infected.size() == grid.size());
  }
  auto s = contact_path(2, Rational(1), Rational(1));
  s.eta0 = 1;
  CHECK_THROWS_AS(check_monotone_in_time(s, grid), HypothesisError);
}

TEST_CASE("space-time discretization") {
  SUBCASE("pure death is exact") {
    auto s = no_infection({Rational(3, 2)}, 1);
    for (int n : {1, 3, 8}) {
      auto m = layer_marginals(discretize(s, 1.0, n));
      CHECK(std::abs(m[0] - std::exp(-1.5)) < 1e-14);
    }
  }
  SUBCASE("no recovery and no infection") {
    auto s = no_infection({Rational(0), Rational(0), Rational(0)}, 0b101);
    auto m = layer_marginals(discretize(s, 1.0, 4));
    CHECK(m == std::vector<double>{1.0, 0.0, 1.0});
    CHECK_THROWS_AS(discretize(s, 1.0, 2).graph(), UnsupportedOperation);
  }
  SUBCASE("layered structure") {
    auto g = discretize(contact_path(2, Rational(1), Rational(1)), 0.5, 3);
    CHECK(g.edges.size() == 12);
    CHECK(g.dt == doctest::Approx(0.5 / 3));
    auto gr = g.graph();
    CHECK(gr.directedness() == Directedness::Directed);
    for (const auto& e : gr.edges()) CHECK(e.head / 2 == e.tail / 2 + 1);
    CHECK(std::abs(g.edges[0].p - std::exp(-0.5 / 3)) < 1e-15);
  }
  SUBCASE("transfer agrees with enumeration") {
    for (int n : {1, 2, 4}) {
      auto g = discretize(two_sites(Rational(1), Rational(2), Rational(1, 2), Rational(3)), 0.5, n);
      auto a = layer_marginals(g), b = layer_marginals(g, ReachMethod::Enumeration);
      for (int x = 0; x < 2; ++x) CHECK(std::abs(a[x] - b[x]) < 1e-12);
    }
    auto g = discretize(contact_path(2, Rational(1), Rational(1)), 0.5, 8);
    CHECK_THROWS_AS(layer_marginals(g, ReachMethod::Enumeration), BudgetError);
  }
  SUBCASE("first-order convergence") {
    auto s = contact_path(2, Rational(1), Rational(1));
    auto r = check_discretization(s, 0.5, {2, 4, 8});
    CHECK(r.first_order);
    REQUIRE(r.ratios.size() == 2);
    for (double q : r.ratios) {
      CHECK(q >= 1.5);
      CHECK(q <= 3);
    }
    CHECK(r.rows[2].error < r.rows[0].error);
    auto e = check_discretization(s, 0.5, {2, 4}, ReachMethod::Enumeration);
    CHECK(std::abs(e.rows[1].error - r.rows[1].error) < 1e-12);
    CHECK_THROWS_AS(check_discretization(s, 0.5, {2, 3}), InputError);
  }
}

TEST_CASE("discrete association on the space-time digraph") {
  SUBCASE("one layer, no infection edges") {
    auto g = discretize(no_infection({Rational(1), Rational(1)}, 0b11), 1.0, 1);
    auto a = check_discrete_association(g, 0);
    CHECK(a.holds());
    CHECK(a.verdict.min_covariance == 0);
  }
  SUBCASE("two sites, two layers") {
    auto g = discretize(contact_path(2, Rational(1), Rational(1)), 0.5, 2);
    for (SiteConfig w : {0u, 1u, 2u}) {
      auto a = check_discrete_association(g, w);
      CHECK(a.holds());
      CHECK(a.conditioning_probability > 0);
      CHECK(a.conditioning_probability <= 1);
    }
    auto a = check_discrete_association(g, 0);
    CHECK(a.pair_reports.size() == 3);
    CHECK(a.verdict.min_covariance >= 0);
  }
  SUBCASE("three sites from a single source") {
    auto s = contact_path(3, Rational(1), Rational(1));
    s.eta0 = 0b001;
    auto g = discretize(s, 1.0, 2);
    CHECK(check_discrete_association(g, 0b010).holds());
    CHECK(check_discrete_association(g, 0).holds());
  }
}

TEST_CASE("contact campaigns") {
  auto c = run_contact_campaign(7, 150);
  CHECK(c.clean());
  CHECK(c.instances == 150);
  CHECK(c.holds + c.skipped == 150);
  // Conditioning on infected sites: association can fail, and the checker
  // should see it.
  auto l = run_contact_campaign(1, 400, true);
  CHECK(l.violations > 0);
  CHECK(!l.witnesses.empty());
  CHECK(run_contact_campaign(7, 150).holds == c.holds);
}

TEST_CASE("contact spec json") {
  nlohmann::json j = {{"sites", {"a", "b", "c"}},
                      {"delta", {{"a", "1"}, {"b", "1/2"}, {"c", 2}}},
                      {"lambda", {{{"to", "b"}, {"from", "a"}, {"rate", "3/2"}}, {{"to", "c"}, {"from", "b"}, {"rate", 1}}}},
                      {"symmetric", true},
                      {"eta0", {"a"}}};
  auto s = contact_from_json(j);
  CHECK(s.delta[1] == Rational(1, 2));
  CHECK(s.lambda[1][0] == Rational(3, 2));
  CHECK(s.lambda[0][1] == Rational(3, 2));
  CHECK(s.lambda[1][2] == 1);
  CHECK(s.lambda[0][2] == 0);
  CHECK(s.eta0 == 1);
  auto back = contact_from_json(contact_to_json(s));
  CHECK(back.lambda == s.lambda);
  CHECK(back.delta == s.delta);
  CHECK(back.eta0 == s.eta0);

  CHECK_THROWS_AS(contact_from_json({{"sites", {"a"}}, {"delta", "-1"}}), InputError);
  CHECK_THROWS_AS(contact_from_json({{"sites", {"a", "a"}}}), InputError);
  CHECK_THROWS_AS(contact_from_json({{"sites", {"a"}}, {"eta0", {"z"}}}), InputError);
  CHECK_THROWS_AS(transient_distribution(contact_path(11, Rational(1), Rational(1)), 1.0), BudgetError);
  CHECK_THROWS_AS(transient_distribution(contact_path(2, Rational(1), Rational(1)), -1.0), InputError);
}
