#include <ccl/error.hpp>
#include <ccl/fuzzy.hpp>
#include <ccl/measure.hpp>

#include <algorithm>
#include <bit>

namespace ccl {

namespace {

void need_fuzzy_graph(const Graph& g, int max_vertices) {
  if (g.directedness() != Directedness::Undirected)
    throw UnsupportedOperation("the fuzzy Potts coupling is defined for undirected graphs");
  if (g.num_vertices() > max_vertices)
    throw BudgetError("fuzzy Potts enumeration is capped at " + std::to_string(max_vertices) + " vertices, graph has " +
                      std::to_string(g.num_vertices()));
}

void need_pair(const Graph& g, int s, int t) {
  if (s < 0 || s >= g.num_vertices() || t < 0 || t >= g.num_vertices()) throw InputError("unknown vertex");
  if (s == t) throw InputError("s and t must differ");
}

Rational power(const Rational& x, int k) {
  Rational r(1);
  for (int i = 0; i < k; ++i) r *= x;
  return r;
}

// Random-cluster law on G[U] together with the map from its edges back to g.
struct Induced {
  std::vector<Rational> law;
  Rational z;
  std::vector<int> to_parent;
};

Induced induced_rcm(const Graph& g, VertexSet u, const Rational& c) {
  if (u.empty()) return {{Rational(1)}, Rational(1), {}};
  auto sur = induced_subgraph(g, u);
  auto mu = random_cluster_measure<Rational>(sur.graph, c);
  Induced r{{mu.weights().begin(), mu.weights().end()}, mu.normalizer(), std::vector<int>(sur.graph.num_edges())};
  for (int e = 0; e < g.num_edges(); ++e)
    if (sur.edge_map[e] >= 0) r.to_parent[sur.edge_map[e]] = e;
  return r;
}

Config lift(const Induced& part, std::uint64_t x) {
  Config w;
  for (std::size_t e = 0; e < part.to_parent.size(); ++e)
    if ((x >> e) & 1u) w = w.with(part.to_parent[e]);
  return w;
}

VertexSet ones(const Graph& g, Spin sigma) { return VertexSet(sigma) & g.all_vertices(); }
VertexSet zeros(const Graph& g, Spin sigma) { return g.all_vertices() - VertexSet(sigma); }

Rational discordant_weight(const Graph& g, Spin sigma) {
  Rational w(1);
  for (const auto& e : g.edges())
    if (((sigma >> e.tail) & 1u) != ((sigma >> e.head) & 1u)) w *= 1 - e.p;
  return w;
}

MonotoneCertificate need_pair_monotone(const Graph& g, const MonotoneCertificate& f, int s, int t) {
  auto c = f.checked() ? f : verify_monotone(g, f);
  if (!c.verified()) {
    std::string why = c.witness() ? " (" + c.witness()->reason + ")" : "";
    throw HypothesisError("f fails its monotonicity claim" + why);
  }
  if (c.claim().kind != MonotoneKind::PairMonotone || c.claim().s != VertexSet::single(s) ||
      c.claim().t != VertexSet::single(t))
    throw HypothesisError("f must be certified pair-monotone for ({" + g.name(s) + "}, {" + g.name(t) + "})");
  return c;
}

Rational conditional_expectation(const std::vector<Rational>& law, const RealFunction& f) {
  Rational sum(0);
  for (std::uint64_t x = 0; x < law.size(); ++x)
    if (law[x] != 0) sum += law[x] * f[x];
  return sum;
}

}  // namespace

FuzzyParams fuzzy_params(const Rational& q, const Rational& alpha, const Rational& beta) {
  if (!(alpha > 0) || !(beta > 0)) throw InputError("alpha and beta must be positive");
  if (alpha + beta != q) throw InputError("q must equal alpha + beta");
  return {q, alpha, beta};
}

Rational Coupling::at(Config omega, Spin sigma) const {
  const auto& row = rows.at(omega.bits);
  auto it = std::lower_bound(row.begin(), row.end(), sigma, [](const auto& e, Spin x) { return e.first < x; });
  return it != row.end() && it->first == sigma ? it->second : Rational(0);
}

std::size_t Coupling::cells() const {
  std::size_t n = 0;
  for (const auto& r : rows) n += r.size();
  return n;
}

Coupling build_coupling_forward(const Graph& g, const FuzzyParams& fp0, int max_vertices) {
  need_fuzzy_graph(g, max_vertices);
  auto fp = fuzzy_params(fp0.q, fp0.alpha, fp0.beta);
  auto phi = random_cluster_measure<Rational>(g, fp.q);
  const Rational a = fp.alpha / fp.q, b = fp.beta / fp.q;
  Coupling c{g, fp, std::vector<std::vector<std::pair<Spin, Rational>>>(g.num_configs())};
  for (std::uint64_t x = 0; x < g.num_configs(); ++x) {
    if (!(phi[x] > 0)) continue;
    auto label = component_labels(g, Config(static_cast<std::uint32_t>(x)));
    const int k = g.num_vertices() == 0 ? 0 : *std::max_element(label.begin(), label.end()) + 1;
    std::vector<Rational> pa(k + 1), pb(k + 1);
    for (int i = 0; i <= k; ++i) pa[i] = power(a, i), pb[i] = power(b, i);
    auto& row = c.rows[x];
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
      Spin sigma = 0;
      for (int v = 0; v < g.num_vertices(); ++v)
        if ((mask >> label[v]) & 1u) sigma |= Spin{1} << v;
      const int up = std::popcount(mask);
      row.emplace_back(sigma, phi[x] * pa[up] * pb[k - up]);
    }
    std::sort(row.begin(), row.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
  }
  return c;
}

std::vector<Rational> spin_measure(const Graph& g, const FuzzyParams& fp0, int max_vertices) {
  need_fuzzy_graph(g, max_vertices);
  auto fp = fuzzy_params(fp0.q, fp0.alpha, fp0.beta);
  const Rational z = random_cluster_measure<Rational>(g, fp.q).normalizer();
  std::vector<Rational> mu(std::uint64_t{1} << g.num_vertices());
  for (Spin sigma = 0; sigma < mu.size(); ++sigma) {
    Rational z1 = induced_rcm(g, ones(g, sigma), fp.alpha).z;
    Rational z0 = induced_rcm(g, zeros(g, sigma), fp.beta).z;
    mu[sigma] = discordant_weight(g, sigma) * z1 * z0 / z;
  }
  return mu;
}

std::vector<Rational> config_given_spin(const Graph& g, const FuzzyParams& fp, Spin sigma) {
  auto one = induced_rcm(g, ones(g, sigma), fp.alpha);
  auto zero = induced_rcm(g, zeros(g, sigma), fp.beta);
  std::vector<Rational> law(g.num_configs(), Rational(0));
  for (std::uint64_t x1 = 0; x1 < one.law.size(); ++x1)
    for (std::uint64_t x0 = 0; x0 < zero.law.size(); ++x0) {
      Config w = lift(one, x1) | lift(zero, x0);
      law[w.bits] += one.law[x1] * zero.law[x0];
    }
  return law;
}

Coupling build_coupling_reverse(const Graph& g, const FuzzyParams& fp0, int max_vertices) {
  auto fp = fuzzy_params(fp0.q, fp0.alpha, fp0.beta);
  auto mu = spin_measure(g, fp, max_vertices);
  Coupling c{g, fp, std::vector<std::vector<std::pair<Spin, Rational>>>(g.num_configs())};
  for (Spin sigma = 0; sigma < mu.size(); ++sigma) {
    if (!(mu[sigma] > 0)) continue;
    auto law = config_given_spin(g, fp, sigma);
    for (std::uint64_t x = 0; x < law.size(); ++x)
      if (law[x] > 0) c.rows[x].emplace_back(sigma, mu[sigma] * law[x]);
  }
  return c;  // rows are filled in increasing sigma
}

std::vector<Rational> marginal_spin(const Coupling& c) {
  std::vector<Rational> mu(std::uint64_t{1} << c.graph.num_vertices(), Rational(0));
  for (const auto& row : c.rows)
    for (const auto& [sigma, p] : row) mu[sigma] += p;
  return mu;
}

std::vector<Rational> marginal_config(const Coupling& c) {
  std::vector<Rational> phi(c.rows.size(), Rational(0));
  for (std::size_t x = 0; x < c.rows.size(); ++x)
    for (const auto& e : c.rows[x]) phi[x] += e.second;
  return phi;
}

std::vector<Rational> conditional_spin_measure(const Graph& g, const FuzzyParams& fp, int s, int t, int max_vertices) {
  need_pair(g, s, t);
  auto mu = spin_measure(g, fp, max_vertices);
  Rational mass(0);
  for (Spin sigma = 0; sigma < mu.size(); ++sigma) {
    if (((sigma >> s) & 1u) && !((sigma >> t) & 1u))
      mass += mu[sigma];
    else
      mu[sigma] = 0;
  }
  if (!(mass > 0)) throw ZeroProbabilityError("mu(sigma(s) = 1, sigma(t) = 0) = 0");
  for (auto& m : mu) m /= mass;
  return mu;
}

CouplingComparison compare_couplings(const Graph& g, const FuzzyParams& fp, int max_vertices) {
  CouplingComparison r;
  auto fwd = build_coupling_forward(g, fp, max_vertices);
  auto rev = build_coupling_reverse(g, fp, max_vertices);
  r.cells = fwd.cells();
  r.forward_equals_reverse = fwd.rows == rev.rows;
  if (!r.forward_equals_reverse) {
    for (std::uint64_t x = 0; x < g.num_configs() && !r.first_difference; ++x)
      for (Spin sigma = 0; sigma < (Spin{1} << g.num_vertices()); ++sigma)
        if (fwd.at(Config(static_cast<std::uint32_t>(x)), sigma) != rev.at(Config(static_cast<std::uint32_t>(x)), sigma)) {
          r.first_difference = std::make_pair(Config(static_cast<std::uint32_t>(x)), sigma);
          break;
        }
  }
  Rational total(0);
  for (const auto& row : rev.rows)
    for (const auto& e : row) total += e.second;
  r.reverse_total_one = total == 1;
  auto phi = random_cluster_measure<Rational>(g, fp.q);
  auto cm = marginal_config(fwd);
  r.config_marginal_is_rcm = std::equal(cm.begin(), cm.end(), phi.weights().begin(), phi.weights().end());
  r.spin_marginal_matches = marginal_spin(fwd) == spin_measure(g, fp, max_vertices);
  return r;
}

KeyIdentity check_key_identity(const Graph& g, const FuzzyParams& fp, int s, int t, int max_vertices) {
  KeyIdentity k;
  auto mu_hat = conditional_spin_measure(g, fp, s, t, max_vertices);
  k.mixture.assign(g.num_configs(), Rational(0));
  for (Spin sigma = 0; sigma < mu_hat.size(); ++sigma) {
    if (!(mu_hat[sigma] > 0)) continue;
    auto law = config_given_spin(g, fp, sigma);
    for (std::uint64_t x = 0; x < law.size(); ++x) k.mixture[x] += mu_hat[sigma] * law[x];
  }
  auto target = condition(random_cluster_measure<Rational>(g, fp.q),
                          event_R(g, VertexSet::single(s), VertexSet::single(t)));
  k.target.assign(target.weights().begin(), target.weights().end());
  k.equal = k.mixture == k.target;
  for (std::uint64_t x = 0; x < k.target.size() && !k.equal; ++x)
    if (k.mixture[x] != k.target[x]) {
      k.first_difference = Config(static_cast<std::uint32_t>(x));
      break;
    }
  return k;
}

SpinLatticeCheck check_spin_lattice(const Graph& g, const FuzzyParams& fp, int s, int t, int max_vertices) {
  SpinLatticeCheck r;
  const int n = g.num_vertices();
  auto mu = spin_measure(g, fp, max_vertices);
  auto mu_hat = conditional_spin_measure(g, fp, s, t, max_vertices);
  r.mu = check_lattice_condition<Rational>(n, mu);
  r.mu_hat = check_lattice_condition<Rational>(n, mu_hat);
  AssociationOptions<Rational> opt;
  try {
    r.mu_hat_association = check_positive_association<Rational>(n, mu_hat, opt);
  } catch (const BudgetError&) {
    opt.strategy = AssociationStrategy::Sampled;
    r.mu_hat_association = check_positive_association<Rational>(n, mu_hat, opt);
  }
  return r;
}

FactC check_fact_c(const Graph& g, const FuzzyParams& fp0, int s, int t, const MonotoneCertificate& f,
                   int max_vertices) {
  need_fuzzy_graph(g, max_vertices);
  need_pair(g, s, t);
  auto fp = fuzzy_params(fp0.q, fp0.alpha, fp0.beta);
  if (fp.alpha < 1 || fp.beta < 1) throw HypothesisError("fact (c) needs alpha, beta >= 1");
  auto cf = need_pair_monotone(g, f, s, t);
  const int n = g.num_vertices();
  std::vector<Rational> cond(std::uint64_t{1} << n);
  for (Spin sigma = 0; sigma < cond.size(); ++sigma)
    cond[sigma] = conditional_expectation(config_given_spin(g, fp, sigma), cf.subject());
  FactC r;
  for (Spin sigma = 0; sigma < cond.size(); ++sigma) {
    const bool in_hat = ((sigma >> s) & 1u) && !((sigma >> t) & 1u);
    if (in_hat) ++r.spins;
    for (int v = 0; v < n; ++v) {
      if ((sigma >> v) & 1u) continue;
      const Spin up = sigma | (Spin{1} << v);
      const bool down = cond[up] < cond[sigma];
      if (in_hat && v != s && v != t) {
        ++r.pairs_checked;
        if (down && r.monotone) {
          r.monotone = false;
          r.witness = std::make_pair(sigma, up);
        }
      }
      if (down && r.monotone_all_spins) {
        r.monotone_all_spins = false;
        r.all_spins_witness = std::make_pair(sigma, up);
      }
    }
  }
  return r;
}

FuzzyChain fuzzy_chain(const Graph& g, const FuzzyParams& fp, int s, int t, const RealFunction& f,
                       const RealFunction& h, int max_vertices) {
  auto mu_hat = conditional_spin_measure(g, fp, s, t, max_vertices);
  RealFunction fh = f;
  for (std::uint64_t x = 0; x < fh.size(); ++x) fh[x] *= h[x];
  FuzzyChain c;
  Rational mf(0), mh(0);
  c.mixture_fh = 0;
  c.mixture_of_products = 0;
  for (Spin sigma = 0; sigma < mu_hat.size(); ++sigma) {
    if (!(mu_hat[sigma] > 0)) continue;
    auto law = config_given_spin(g, fp, sigma);
    Rational ef = conditional_expectation(law, f), eh = conditional_expectation(law, h);
    c.mixture_fh += mu_hat[sigma] * conditional_expectation(law, fh);
    c.mixture_of_products += mu_hat[sigma] * ef * eh;
    mf += mu_hat[sigma] * ef;
    mh += mu_hat[sigma] * eh;
  }
  c.product_of_mixtures = mf * mh;
  auto phi = condition(random_cluster_measure<Rational>(g, fp.q), event_R(g, VertexSet::single(s), VertexSet::single(t)));
  c.e_fh = expectation(phi, fh);
  c.e_f_e_h = expectation(phi, f) * expectation(phi, h);
  c.first_equality = c.e_fh == c.mixture_fh;
  c.first_inequality = c.mixture_fh >= c.mixture_of_products;
  c.second_inequality = c.mixture_of_products >= c.product_of_mixtures;
  c.last_equality = c.product_of_mixtures == c.e_f_e_h;
  return c;
}

const std::vector<FuzzyParams>& fuzzy_grid() {
  static const std::vector<FuzzyParams> grid{{Rational(2), Rational(1), Rational(1)},
                                             {Rational(3), Rational(1), Rational(2)},
                                             {Rational(3), Rational(3, 2), Rational(3, 2)},
                                             {Rational(4), Rational(2), Rational(2)}};
  return grid;
}

nlohmann::json fuzzy_report(const Graph& g, const FuzzyParams& fp, std::optional<std::pair<int, int>> st,
                            const std::optional<MonotoneCertificate>& f, int max_vertices) {
  auto spin_name = [&](Spin sigma) {
    std::string out;
    for (int v = 0; v < g.num_vertices(); ++v) out += ((sigma >> v) & 1u) ? '1' : '0';
    return out;
  };
  nlohmann::json j{{"q", to_string(fp.q)}, {"alpha", to_string(fp.alpha)}, {"beta", to_string(fp.beta)}};
  auto cmp = compare_couplings(g, fp, max_vertices);
  j["coupling"] = {{"cells", cmp.cells},
                   {"forward_equals_reverse", cmp.forward_equals_reverse},
                   {"reverse_total_one", cmp.reverse_total_one},
                   {"config_marginal_is_rcm", cmp.config_marginal_is_rcm},
                   {"spin_marginal_matches", cmp.spin_marginal_matches}};
  if (cmp.first_difference)
    j["coupling"]["first_difference"] = {{"omega", describe(g, cmp.first_difference->first)},
                                         {"sigma", spin_name(cmp.first_difference->second)}};
  auto mu = spin_measure(g, fp, max_vertices);
  nlohmann::json spins = nlohmann::json::object();
  for (Spin sigma = 0; sigma < mu.size(); ++sigma) spins[spin_name(sigma)] = to_string(mu[sigma]);
  j["spin_order"] = g.names();
  j["mu"] = spins;
  auto lat = check_lattice_condition<Rational>(g.num_vertices(), mu);
  j["mu_lattice"] = lat.holds;
  bool ok = cmp.ok() && (lat.holds || fp.alpha < 1 || fp.beta < 1);
  if (st) {
    auto [s, t] = *st;
    auto key = check_key_identity(g, fp, s, t, max_vertices);
    j["key_identity"] = key.equal;
    auto sl = check_spin_lattice(g, fp, s, t, max_vertices);
    j["mu_hat_lattice"] = sl.mu_hat.holds;
    j["mu_hat_associated"] = sl.mu_hat_association.holds;
    j["mu_hat_association_strategy"] = to_string(sl.mu_hat_association.strategy);
    ok = ok && key.equal && (sl.holds() || fp.alpha < 1 || fp.beta < 1);
    if (f) {
      auto fc = check_fact_c(g, fp, s, t, *f, max_vertices);
      j["fact_c"] = {{"spins", fc.spins}, {"pairs_checked", fc.pairs_checked}, {"monotone", fc.monotone},
                     {"monotone_all_spins", fc.monotone_all_spins}};
      if (fc.witness) j["fact_c"]["witness"] = {spin_name(fc.witness->first), spin_name(fc.witness->second)};
      ok = ok && fc.monotone;
    }
  }
  j["ok"] = ok;
  return j;
}

}  // namespace ccl
