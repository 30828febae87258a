#include <ccl/contact.hpp>

#include <ccl/configs.hpp>
#include <ccl/error.hpp>
#include <ccl/measure.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

namespace ccl {

using nlohmann::json;

namespace {

Rational rate_from_json(const json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number()) return parse_rational(j.dump());
  throw InputError("rate must be a string or a number");
}

bool in(SiteConfig m, int x) { return (m >> x) & 1u; }

json names_of(const std::vector<std::string>& names, SiteConfig m) {
  json out = json::array();
  for (int x = 0; x < static_cast<int>(names.size()); ++x)
    if (in(m, x)) out.push_back(names[x]);
  return out;
}

std::vector<double> as_doubles(const std::vector<Rational>& v) {
  std::vector<double> out;
  for (const auto& r : v) out.push_back(to_double(r));
  return out;
}

}  // namespace

int ContactSpec::site(std::string_view name) const {
  for (int x = 0; x < num_sites(); ++x)
    if (sites[x] == name) return x;
  throw InputError("unknown site '" + std::string(name) + "'");
}

SiteConfig ContactSpec::site_set(const std::vector<std::string>& names) const {
  SiteConfig m = 0;
  for (const auto& n : names) m |= SiteConfig{1} << site(n);
  return m;
}

void validate(const ContactSpec& spec, int max_sites) {
  const int n = spec.num_sites();
  if (n == 0) throw InputError("contact process needs at least one site");
  if (n > max_sites)
    throw BudgetError(std::to_string(n) + " sites exceed the budget of " + std::to_string(max_sites));
  if (n > 20) throw BudgetError("at most 20 sites supported");
  std::set<std::string> seen;
  for (const auto& s : spec.sites) {
    if (s.empty()) throw InputError("empty site name");
    if (!seen.insert(s).second) throw InputError("duplicate site '" + s + "'");
  }
  if (static_cast<int>(spec.delta.size()) != n) throw InputError("delta needs one rate per site");
  if (static_cast<int>(spec.lambda.size()) != n) throw InputError("lambda needs one row per site");
  for (int x = 0; x < n; ++x) {
    if (spec.delta[x] < 0) throw InputError("negative recovery rate at '" + spec.sites[x] + "'");
    if (static_cast<int>(spec.lambda[x].size()) != n) throw InputError("lambda rows need one rate per site");
    for (int y = 0; y < n; ++y)
      if (spec.lambda[x][y] < 0) throw InputError("negative infection rate");
    if (spec.lambda[x][x] != 0) throw InputError("self-infection rate at '" + spec.sites[x] + "' must be 0");
  }
  if ((spec.eta0 & ~spec.all_sites()) != 0) throw InputError("initial configuration names unknown sites");
}

ContactSpec contact_from_json(const json& j) {
  if (!j.is_object() || !j.contains("sites")) throw InputError("contact spec needs a \"sites\" array");
  ContactSpec spec;
  for (const auto& s : j.at("sites")) spec.sites.push_back(s.get<std::string>());
  const int n = spec.num_sites();
  if (n == 0 || n > 20) throw InputError("contact spec needs between 1 and 20 sites");
  spec.delta.assign(n, Rational(1));
  spec.lambda.assign(n, std::vector<Rational>(n, Rational(0)));
  if (j.contains("delta")) {
    const auto& d = j.at("delta");
    if (d.is_object()) {
      for (const auto& [name, r] : d.items()) spec.delta[spec.site(name)] = rate_from_json(r);
    } else {
      spec.delta.assign(n, rate_from_json(d));
    }
  }
  const bool symmetric = j.value("symmetric", false);
  if (j.contains("lambda")) {
    for (const auto& e : j.at("lambda")) {
      const int x = spec.site(e.at("to").get<std::string>());
      const int y = spec.site(e.at("from").get<std::string>());
      if (x == y) throw InputError("self-infection rate at '" + spec.sites[x] + "'");
      const Rational r = rate_from_json(e.at("rate"));
      spec.lambda[x][y] = r;
      if (symmetric) spec.lambda[y][x] = r;
    }
  }
  spec.eta0 = spec.all_sites();
  if (j.contains("eta0")) {
    const auto& e = j.at("eta0");
    if (e.is_string()) {
      if (e.get<std::string>() == "all") spec.eta0 = spec.all_sites();
      else if (e.get<std::string>() == "none") spec.eta0 = 0;
      else throw InputError("eta0 must be \"all\", \"none\" or a list of sites");
    } else {
      spec.eta0 = spec.site_set(e.get<std::vector<std::string>>());
    }
  }
  validate(spec, 20);
  return spec;
}

json contact_to_json(const ContactSpec& spec) {
  json j;
  j["sites"] = spec.sites;
  json d = json::object();
  for (int x = 0; x < spec.num_sites(); ++x) d[spec.sites[x]] = to_string(spec.delta[x]);
  j["delta"] = d;
  json l = json::array();
  for (int x = 0; x < spec.num_sites(); ++x)
    for (int y = 0; y < spec.num_sites(); ++y)
      if (spec.lambda[x][y] != 0)
        l.push_back({{"to", spec.sites[x]}, {"from", spec.sites[y]}, {"rate", to_string(spec.lambda[x][y])}});
  j["lambda"] = l;
  j["eta0"] = names_of(spec.sites, spec.eta0);
  return j;
}

ContactSpec load_contact(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError("'" + path + "': " + e.what());
  }
  return contact_from_json(j);
}

ContactSpec contact_path(int n, const Rational& delta, const Rational& lambda) {
  if (n < 1) throw InputError("path needs at least one site");
  ContactSpec spec;
  for (int x = 0; x < n; ++x) spec.sites.push_back("x" + std::to_string(x + 1));
  spec.delta.assign(n, delta);
  spec.lambda.assign(n, std::vector<Rational>(n, Rational(0)));
  for (int x = 0; x + 1 < n; ++x) spec.lambda[x][x + 1] = spec.lambda[x + 1][x] = lambda;
  spec.eta0 = spec.all_sites();
  validate(spec, 20);
  return spec;
}

RateMatrix build_generator(const ContactSpec& spec, int max_sites) {
  validate(spec, max_sites);
  const int n = spec.num_sites();
  RateMatrix q;
  q.sites = n;
  const SiteConfig states = SiteConfig{1} << n;
  q.rows.resize(states);
  q.exit.assign(states, Rational(0));
  for (SiteConfig eta = 0; eta < states; ++eta) {
    for (int x = 0; x < n; ++x) {
      Rational r(0);
      if (in(eta, x)) {
        r = spec.delta[x];
      } else {
        for (int y = 0; y < n; ++y)
          if (in(eta, y)) r += spec.lambda[x][y];
      }
      if (r == 0) continue;
      q.rows[eta].emplace_back(eta ^ (SiteConfig{1} << x), r);
      q.exit[eta] += r;
    }
  }
  return q;
}

double CtmcDistribution::vacant(SiteConfig m) const {
  double s = 0;
  for (SiteConfig eta = 0; eta < p.size(); ++eta)
    if ((eta & m) == 0) s += p[eta];
  return s;
}

double CtmcDistribution::infected(int x) const {
  double s = 0;
  for (SiteConfig eta = 0; eta < p.size(); ++eta)
    if (in(eta, x)) s += p[eta];
  return s;
}

double CtmcDistribution::error_bound() const {
  // Each uniformized step is a stochastic vector-matrix product; rounding
  // perturbs the L1 mass by a few units in the last place per step.
  return truncation_bound + 4.0 * (terms + 1) * (sites + 2) * 0x1.0p-52 + 1e-15;
}

CtmcDistribution transient_distribution(const ContactSpec& spec, double t, double tail, int max_sites) {
  if (!(t >= 0) || !std::isfinite(t)) throw InputError("time must be finite and nonnegative");
  if (!(tail > 0)) throw InputError("truncation target must be positive");
  const RateMatrix q = build_generator(spec, max_sites);
  const std::size_t states = q.num_states();
  CtmcDistribution d;
  d.t = t;
  d.sites = q.sites;
  d.p.assign(states, 0.0);
  std::vector<double> exit = as_doubles(q.exit);
  const double rate = *std::max_element(exit.begin(), exit.end());
  d.rate = rate;
  if (rate == 0 || t == 0) {
    d.p[spec.eta0] = 1;
    return d;
  }
  const double m = rate * t;
  auto log_weight = [&](int k) { return -m + k * std::log(m) - std::lgamma(k + 1.0); };
  // Smallest K >= m with sum_{k > K} w_k <= tail, bounded by the geometric
  // series w_{K+1} sum_j (m / (K + 2))^j.
  int K = static_cast<int>(std::ceil(m));
  double bound = 0;
  for (;; ++K) {
    const double ratio = m / (K + 2.0);
    bound = std::exp(log_weight(K + 1)) / (1.0 - ratio);
    if (bound <= tail) break;
    if (K > 100000000) throw BudgetError("uniformization needs too many terms");
  }
  d.terms = K + 1;
  d.truncation_bound = bound;

  std::vector<std::vector<std::pair<SiteConfig, double>>> rows(states);
  std::vector<double> stay(states);
  for (std::size_t s = 0; s < states; ++s) {
    for (const auto& [to, r] : q.rows[s]) rows[s].emplace_back(to, to_double(r) / rate);
    stay[s] = 1.0 - exit[s] / rate;
  }
  std::vector<double> v(states, 0.0), next(states);
  v[spec.eta0] = 1;
  for (int k = 0; k <= K; ++k) {
    const double w = std::exp(log_weight(k));
    for (std::size_t s = 0; s < states; ++s) d.p[s] += w * v[s];
    if (k == K) break;
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t s = 0; s < states; ++s) {
      if (v[s] == 0) continue;
      next[s] += v[s] * stay[s];
      for (const auto& [to, r] : rows[s]) next[to] += v[s] * r;
    }
    v.swap(next);
  }
  return d;
}

json distribution_to_json(const ContactSpec& spec, const CtmcDistribution& d) {
  json probs = json::object();
  for (SiteConfig eta = 0; eta < d.p.size(); ++eta) {
    std::string key;
    for (int x = 0; x < d.sites; ++x) key += in(eta, x) ? '1' : '0';
    probs[key] = d.p[eta];
  }
  json infected = json::object();
  for (int x = 0; x < d.sites; ++x) infected[spec.sites[x]] = d.infected(x);
  return {{"t", d.t},
          {"uniformization_rate", d.rate},
          {"terms", d.terms},
          {"truncation_bound", d.truncation_bound},
          {"error_bound", d.error_bound()},
          {"infected", infected},
          {"law", probs}};
}

// ---------------------------------------------------------------- association

namespace {

ContactAssociation conditional_association(const ContactSpec& spec, double t, SiteConfig w, bool ones,
                                           AssociationOptions<double> opt) {
  validate(spec);
  if ((w & ~spec.all_sites()) != 0) throw InputError("W names unknown sites");
  const auto d = transient_distribution(spec, t);
  ContactAssociation a;
  a.t = t;
  a.w = w;
  a.condition_on_infected = ones;
  for (int x = 0; x < spec.num_sites(); ++x)
    if (!in(w, x)) a.free_sites.push_back(x);
  std::map<std::uint64_t, double> atoms;
  double mass = 0;
  for (SiteConfig eta = 0; eta < d.p.size(); ++eta) {
    const bool keep = ones ? (eta & w) == w : (eta & w) == 0;
    if (!keep || d.p[eta] <= 0) continue;
    std::uint64_t y = 0;
    for (std::size_t i = 0; i < a.free_sites.size(); ++i)
      if (in(eta, a.free_sites[i])) y |= std::uint64_t{1} << i;
    atoms[y] += d.p[eta];
    mass += d.p[eta];
  }
  const double err = d.error_bound();
  a.conditioning_probability = mass;
  if (!(mass > 2 * err))
    throw ZeroProbabilityError(std::string("P(eta_t = ") + (ones ? "1" : "0") + " on W) is zero within " +
                               std::to_string(err));
  // Cov of conditional probabilities: each of P(UV), P(U), P(V) carries an
  // error of at most 2 err / mass.
  a.tol = 8 * err / mass;
  opt.tol = std::max(opt.tol, a.tol);
  if (a.free_sites.empty()) {
    a.verdict.holds = true;
    a.verdict.proof = true;
    a.verdict.strategy = opt.strategy;
    return a;
  }
  SparseLaw<double> law{static_cast<int>(a.free_sites.size()), {atoms.begin(), atoms.end()}};
  a.verdict = check_positive_association(law, opt);
  // Report coordinates and witnesses as site indices.
  for (auto& c : a.verdict.coords) c = a.free_sites[c];
  if (a.verdict.witness) {
    auto lift = [&](std::vector<std::uint64_t>& v) {
      for (auto& x : v) {
        std::uint64_t out = 0;
        for (std::size_t i = 0; i < a.free_sites.size(); ++i)
          if ((x >> i) & 1u) out |= std::uint64_t{1} << a.free_sites[i];
        x = out;
      }
    };
    lift(a.verdict.witness->first);
    lift(a.verdict.witness->second);
  }
  return a;
}

}  // namespace

ContactAssociation check_thm_contact(const ContactSpec& spec, double t, SiteConfig w, AssociationOptions<double> opt) {
  return conditional_association(spec, t, w, false, std::move(opt));
}

ContactAssociation check_contact_given_infected(const ContactSpec& spec, double t, SiteConfig w,
                                                AssociationOptions<double> opt) {
  return conditional_association(spec, t, w, true, std::move(opt));
}

json association_to_json(const ContactSpec& spec, const ContactAssociation& a) {
  json j = {{"theorem", a.condition_on_infected ? "T3.4-infected" : "T3.4"},
            {"t", a.t},
            {"W", names_of(spec.sites, a.w)},
            {"conditioning", a.condition_on_infected ? "eta=1 on W" : "eta=0 on W"},
            {"conditioning_probability", a.conditioning_probability},
            {"strategy", to_string(a.verdict.strategy)},
            {"proof", a.verdict.proof},
            {"pairs_checked", a.verdict.pairs_checked},
            {"min_covariance", a.verdict.min_covariance},
            {"tol", a.tol},
            {"holds", a.holds()}};
  json coords = json::array();
  for (int c : a.verdict.coords) coords.push_back(spec.sites[c]);
  j["effective_sites"] = coords;
  if (a.verdict.witness) {
    auto sets = [&](const std::vector<std::uint64_t>& gens) {
      json out = json::array();
      for (auto g : gens) out.push_back(names_of(spec.sites, g));
      return out;
    };
    j["witness"] = {{"U", sets(a.verdict.witness->first)},
                    {"V", sets(a.verdict.witness->second)},
                    {"covariance", a.verdict.witness_covariance}};
  }
  return j;
}

// ------------------------------------------------------- finite-time shapes

namespace {

struct Direction {
  bool increasing = true;
  bool decreasing = true;
};

Direction direction_off(const Event& e, int n, SiteConfig w) {
  Direction d;
  const SiteConfig states = SiteConfig{1} << n;
  for (SiteConfig eta = 0; eta < states; ++eta) {
    if ((eta & w) != 0) continue;
    for (int x = 0; x < n; ++x) {
      if (in(eta, x) || in(w, x)) continue;
      const bool lo = e.contains(eta), hi = e.contains(eta | (SiteConfig{1} << x));
      if (lo && !hi) d.increasing = false;
      if (hi && !lo) d.decreasing = false;
    }
  }
  return d;
}

FiniteTimeSide side(double lhs, double rhs, double tol) {
  FiniteTimeSide s;
  s.lhs = lhs;
  s.rhs = rhs;
  s.slack = rhs - lhs;
  s.tol = tol;
  s.holds = s.slack >= -tol;
  s.equality = std::abs(s.slack) <= tol;
  return s;
}

}  // namespace

FiniteTimeCorrelations check_finite_time_correlations(const ContactSpec& spec, double t, SiteConfig k, SiteConfig l,
                                                      SiteConfig w, const Event& a, const Event& b) {
  validate(spec);
  const int n = spec.num_sites();
  const SiteConfig all = spec.all_sites();
  if (((k | l | w) & ~all) != 0) throw InputError("K, L and W must be sets of sites");
  if (a.dims() != n || b.dims() != n) throw InputError("A and B must be events on {0,1}^sites");
  const Direction da = direction_off(a, n, w), db = direction_off(b, n, w);
  if (!((da.increasing && db.increasing) || (da.decreasing && db.decreasing)))
    throw HypothesisError("A and B must be both increasing or both decreasing in the sites off W");

  const auto d = transient_distribution(spec, t);
  const double err = d.error_bound();
  FiniteTimeCorrelations c;
  c.t = t;

  double p0 = 0, pa = 0, pb = 0, pab = 0;
  for (SiteConfig eta = 0; eta < d.p.size(); ++eta) {
    if ((eta & w) != 0) continue;
    p0 += d.p[eta];
    if (a.contains(eta)) pa += d.p[eta];
    if (b.contains(eta)) pb += d.p[eta];
    if (a.contains(eta) && b.contains(eta)) pab += d.p[eta];
  }
  if (!(p0 > 2 * err)) throw ZeroProbabilityError("P(eta_t = 0 on W) is zero within the error bound");
  c.conditional = side((pa / p0) * (pb / p0), pab / p0, 8 * err / p0);
  c.vacancy = side(d.vacant(k) * d.vacant(l), d.vacant(k & l) * d.vacant(k | l), 4 * err);
  return c;
}

json correlations_to_json(const FiniteTimeCorrelations& c) {
  auto s = [](const FiniteTimeSide& x) {
    return json{{"lhs", x.lhs}, {"rhs", x.rhs}, {"slack", x.slack}, {"tol", x.tol},
                {"holds", x.holds}, {"equality", x.equality}};
  };
  return {{"t", c.t},
          {"conditional", s(c.conditional)},
          {"vacancy", s(c.vacancy)},
          {"stationary", {{"lhs", c.stationary_lhs}, {"rhs", c.stationary_rhs}}},
          {"ok", c.ok()}};
}

TimeMonotonicity check_monotone_in_time(const ContactSpec& spec, const std::vector<double>& times) {
  validate(spec);
  if (spec.eta0 != spec.all_sites()) throw HypothesisError("monotonicity in t needs every site infected at time 0");
  if (!std::is_sorted(times.begin(), times.end())) throw InputError("times must be ascending");
  TimeMonotonicity m;
  m.times = times;
  double prev_err = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const auto d = transient_distribution(spec, times[i]);
    std::vector<double> row;
    for (int x = 0; x < spec.num_sites(); ++x) row.push_back(d.infected(x));
    if (i > 0 && m.nonincreasing)
      for (int x = 0; x < spec.num_sites(); ++x)
        if (row[x] > m.infected.back()[x] + prev_err + d.error_bound()) {
          m.nonincreasing = false;
          m.witness = std::make_pair(x, static_cast<int>(i));
          break;
        }
    prev_err = d.error_bound();
    m.infected.push_back(std::move(row));
  }
  return m;
}

// ------------------------------------------------------------ discretization

Graph SpaceTimeGraph::graph(int edge_cap) const {
  std::vector<std::string> names;
  for (int k = 0; k <= layers; ++k)
    for (int x = 0; x < sites; ++x) names.push_back(site_names[x] + "@" + std::to_string(k));
  if (static_cast<int>(edges.size()) > edge_cap)
    throw BudgetError("space-time graph has " + std::to_string(edges.size()) + " edges; edge cap is " +
                      std::to_string(edge_cap));
  const long long scale = 1LL << 30;
  std::vector<Edge> out;
  for (const auto& e : edges) {
    const long long num = std::llround(e.p * static_cast<double>(scale));
    if (num <= 0 || num >= scale)
      throw UnsupportedOperation("edge probability " + std::to_string(e.p) +
                                 " rounds to 0 or 1; the graph model needs p in (0,1)");
    out.push_back({vertex(e.from_site, e.layer), vertex(e.to_site, e.layer + 1), true, Rational(num, scale)});
  }
  return Graph(std::move(names), std::move(out), edge_cap);
}

SpaceTimeGraph discretize(const ContactSpec& spec, double t, int layers) {
  validate(spec);
  if (!(t > 0) || !std::isfinite(t)) throw InputError("time must be positive");
  if (layers < 1) throw InputError("at least one layer needed");
  if (layers > 4096) throw BudgetError("too many layers");
  SpaceTimeGraph g;
  g.sites = spec.num_sites();
  g.layers = layers;
  g.t = t;
  g.dt = t / layers;
  g.site_names = spec.sites;
  g.sources = spec.eta0;
  for (int k = 0; k < layers; ++k) {
    for (int x = 0; x < g.sites; ++x)
      g.edges.push_back({x, x, k, true, std::exp(-to_double(spec.delta[x]) * g.dt)});
    for (int x = 0; x < g.sites; ++x)
      for (int y = 0; y < g.sites; ++y)
        if (spec.lambda[x][y] > 0) g.edges.push_back({y, x, k, false, -std::expm1(-to_double(spec.lambda[x][y]) * g.dt)});
  }
  return g;
}

std::vector<double> layer_marginals(const SpaceTimeGraph& g, ReachMethod method, int edge_cap) {
  const int n = g.sites;
  std::vector<double> marg(n, 0.0);
  if (method == ReachMethod::Enumeration) {
    const int m = static_cast<int>(g.edges.size());
    if (m > edge_cap || m > Graph::kMaxEdges)
      throw BudgetError("space-time graph has " + std::to_string(m) + " edges; edge cap is " + std::to_string(edge_cap));
    for (std::uint64_t omega = 0; omega < (std::uint64_t{1} << m); ++omega) {
      double w = 1;
      for (int e = 0; e < m; ++e) w *= ((omega >> e) & 1u) ? g.edges[e].p : 1 - g.edges[e].p;
      if (w == 0) continue;
      SiteConfig cur = g.sources;
      int e = 0;
      for (int k = 0; k < g.layers; ++k) {
        SiteConfig next = 0;
        for (; e < m && g.edges[e].layer == k; ++e)
          if (((omega >> e) & 1u) && in(cur, g.edges[e].from_site)) next |= SiteConfig{1} << g.edges[e].to_site;
        cur = next;
      }
      for (int x = 0; x < n; ++x)
        if (in(cur, x)) marg[x] += w;
    }
    return marg;
  }
  if (n > kContactMaxSites) throw BudgetError("transfer method supports at most 10 sites");
  // Edge probabilities do not depend on the layer; read them off layer 0.
  std::vector<double> vertical(n, 0.0);
  std::vector<std::vector<double>> infect(n, std::vector<double>(n, 0.0));
  for (const auto& e : g.edges) {
    if (e.layer != 0) continue;
    if (e.vertical) vertical[e.to_site] = e.p;
    else infect[e.to_site][e.from_site] = e.p;
  }
  const SiteConfig states = SiteConfig{1} << n;
  std::vector<double> law(states, 0.0), next(states);
  law[g.sources] = 1;
  std::vector<double> hit(n);
  for (int k = 0; k < g.layers; ++k) {
    std::fill(next.begin(), next.end(), 0.0);
    for (SiteConfig cur = 0; cur < states; ++cur) {
      if (law[cur] == 0) continue;
      for (int x = 0; x < n; ++x) {
        double miss = in(cur, x) ? 1 - vertical[x] : 1;
        for (int y = 0; y < n; ++y)
          if (in(cur, y)) miss *= 1 - infect[x][y];
        hit[x] = 1 - miss;
      }
      for (SiteConfig to = 0; to < states; ++to) {
        double w = law[cur];
        for (int x = 0; x < n && w != 0; ++x) w *= in(to, x) ? hit[x] : 1 - hit[x];
        next[to] += w;
      }
    }
    law.swap(next);
  }
  for (SiteConfig s = 0; s < states; ++s)
    for (int x = 0; x < n; ++x)
      if (in(s, x)) marg[x] += law[s];
  return marg;
}

DiscretizationReport check_discretization(const ContactSpec& spec, double t, const std::vector<int>& schedule,
                                          ReachMethod method) {
  if (schedule.empty()) throw InputError("empty layer schedule");
  for (std::size_t i = 1; i < schedule.size(); ++i)
    if (schedule[i] != 2 * schedule[i - 1]) throw InputError("layer schedule must double at each step");
  DiscretizationReport r;
  r.t = t;
  const auto d = transient_distribution(spec, t);
  for (int x = 0; x < spec.num_sites(); ++x) r.exact.push_back(d.infected(x));
  for (int layers : schedule) {
    DiscretizationRow row;
    row.layers = layers;
    const auto g = discretize(spec, t, layers);
    row.dt = g.dt;
    row.marginals = layer_marginals(g, method);
    for (int x = 0; x < spec.num_sites(); ++x) row.error = std::max(row.error, std::abs(row.marginals[x] - r.exact[x]));
    r.rows.push_back(std::move(row));
  }
  r.first_order = r.rows.size() >= 2;
  for (std::size_t i = 1; i < r.rows.size(); ++i) {
    const double ratio = r.rows[i].error > 0 ? r.rows[i - 1].error / r.rows[i].error : INFINITY;
    r.ratios.push_back(ratio);
    if (!(ratio >= 1.5 && ratio <= 3)) r.first_order = false;
  }
  return r;
}

json discretization_to_json(const DiscretizationReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"layers", row.layers}, {"dt", row.dt}, {"marginals", row.marginals}, {"error", row.error}});
  return {{"t", r.t}, {"exact", r.exact}, {"rows", rows}, {"ratios", r.ratios}, {"first_order", r.first_order}};
}

DiscreteAssociation check_discrete_association(const SpaceTimeGraph& stg, SiteConfig w) {
  if ((w & ~((SiteConfig{1} << stg.sites) - 1)) != 0) throw InputError("W names unknown sites");
  DiscreteAssociation a;
  a.w = w;
  a.edges = static_cast<int>(stg.edges.size());
  const Graph full = stg.graph();
  std::vector<int> free_sites;
  for (int x = 0; x < stg.sites; ++x)
    if (!in(w, x)) free_sites.push_back(x);
  if (stg.sources == 0) {
    // Nothing is ever reached: every indicator is 0.
    a.conditioning_probability = 1;
    a.verdict.holds = a.verdict.proof = true;
    return a;
  }
  VertexSet src;
  for (int x = 0; x < stg.sites; ++x)
    if (in(stg.sources, x)) src = src | VertexSet::single(stg.vertex(x, 0));
  const Surgery sg = merge_vertices(full, src);
  const Graph& g = sg.graph;
  const int s = sg.vertex_map[stg.vertex(std::countr_zero(stg.sources), 0)];
  auto top = [&](int x) { return sg.vertex_map[stg.vertex(x, stg.layers)]; };
  VertexSet xw;
  for (int x = 0; x < stg.sites; ++x)
    if (in(w, x)) xw = xw | VertexSet::single(top(x));

  const auto mu = product_measure<Rational>(g);
  std::map<std::uint64_t, Rational> atoms;
  Rational mass(0);
  for (std::uint64_t omega = 0; omega < g.num_configs(); ++omega) {
    const VertexSet r = reachable(g, Config(static_cast<std::uint32_t>(omega)), VertexSet::single(s));
    if (r.intersects(xw)) continue;
    std::uint64_t y = 0;
    for (std::size_t i = 0; i < free_sites.size(); ++i)
      if (r.test(top(free_sites[i]))) y |= std::uint64_t{1} << i;
    atoms[y] += mu[omega];
    mass += mu[omega];
  }
  a.conditioning_probability = mass;
  if (free_sites.empty()) {
    a.verdict.holds = a.verdict.proof = true;
  } else {
    SparseLaw<Rational> law{static_cast<int>(free_sites.size()), {atoms.begin(), atoms.end()}};
    try {
      a.verdict = check_positive_association(law);
    } catch (const BudgetError&) {
      AssociationOptions<Rational> opt;
      opt.strategy = AssociationStrategy::Sampled;
      a.verdict = check_positive_association(law, opt);
    }
    for (auto& c : a.verdict.coords) c = free_sites[c];
  }
  const MonotoneClaim claim{MonotoneKind::ClusterIncreasing, VertexSet::single(s), {}};
  for (std::size_t i = 0; i < free_sites.size(); ++i)
    for (std::size_t j = i; j < free_sites.size(); ++j) {
      const auto f = certify(g, event_reach(g, s, top(free_sites[i])), claim);
      const auto h = certify(g, event_reach(g, s, top(free_sites[j])), claim);
      a.pair_reports.push_back(check_thm_3_3(g, s, xw, f, h));
      if (a.pair_reports.back().verdict != Verdict::Holds) a.pair_reports_hold = false;
    }
  return a;
}

json discrete_association_to_json(const SpaceTimeGraph& g, const DiscreteAssociation& a) {
  json reports = json::array();
  for (const auto& r : a.pair_reports) reports.push_back(report_to_json(r));
  json coords = json::array();
  for (int c : a.verdict.coords) coords.push_back(g.site_names[c]);
  return {{"layers", g.layers},
          {"dt", g.dt},
          {"edges", a.edges},
          {"W", names_of(g.site_names, a.w)},
          {"conditioning_probability", to_string(a.conditioning_probability)},
          {"effective_sites", coords},
          {"strategy", to_string(a.verdict.strategy)},
          {"proof", a.verdict.proof},
          {"min_covariance", to_string(a.verdict.min_covariance)},
          {"pair_reports", reports},
          {"holds", a.holds()}};
}

// ------------------------------------------------------------ random instances

ContactSpec random_contact(Rng& rng, int max_sites) {
  if (max_sites < 1 || max_sites > kContactMaxSites) throw InputError("max_sites must lie in [1, 10]");
  static const std::vector<Rational> deltas{Rational(1, 2), Rational(1), Rational(2)};
  static const std::vector<Rational> lambdas{Rational(1, 2), Rational(1), Rational(2)};
  const int n = max_sites == 1 ? 1 : 2 + static_cast<int>(rng.below(max_sites - 1));
  ContactSpec spec;
  for (int x = 0; x < n; ++x) spec.sites.push_back("x" + std::to_string(x + 1));
  for (int x = 0; x < n; ++x) spec.delta.push_back(rng.pick(deltas));
  spec.lambda.assign(n, std::vector<Rational>(n, Rational(0)));
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      if (x != y && rng.coin()) spec.lambda[x][y] = rng.pick(lambdas);
  spec.eta0 = 1 + rng.below(spec.all_sites());
  return spec;
}

ContactFuzzSummary run_contact_campaign(std::uint64_t seed, int instances, bool condition_on_infected, int max_sites) {
  static const std::vector<double> times{0.5, 1.0, 2.0};
  ContactFuzzSummary s;
  s.condition_on_infected = condition_on_infected;
  for (int i = 0; i < instances; ++i) {
    Rng rng(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(i) + 0x5eed)));
    const ContactSpec spec = random_contact(rng, max_sites);
    const double t = rng.pick(times);
    const SiteConfig w = rng.below(spec.all_sites() + 1);
    ++s.instances;
    try {
      const auto a = condition_on_infected ? check_contact_given_infected(spec, t, w) : check_thm_contact(spec, t, w);
      s.min_covariance = std::min(s.min_covariance, a.verdict.min_covariance);
      if (a.holds()) {
        ++s.holds;
      } else {
        ++s.violations;
        if (s.witnesses.size() < 10) {
          json wj = association_to_json(spec, a);
          wj["spec"] = contact_to_json(spec);
          wj["index"] = i;
          s.witnesses.push_back(std::move(wj));
        }
      }
    } catch (const ZeroProbabilityError&) {
      ++s.skipped;
    }
  }
  return s;
}

json contact_summary_to_json(const ContactFuzzSummary& s) {
  return {{"campaign", s.condition_on_infected ? "contact-infected" : "contact"},
          {"instances", s.instances},
          {"holds", s.holds},
          {"violations", s.violations},
          {"skipped", s.skipped},
          {"min_covariance", s.min_covariance},
          {"witnesses", s.witnesses}};
}

}  // namespace ccl
