#include <ccl/chains.hpp>
#include <ccl/configs.hpp>
#include <ccl/error.hpp>
#include <ccl/measure.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <set>

namespace ccl {

namespace {

void need_pair_inputs(const Graph& g, VertexSet s, VertexSet t) {
  if (g.directedness() != Directedness::Undirected)
    throw UnsupportedOperation("the cluster chains are defined for undirected graphs");
  if (s.empty() || t.empty()) throw InputError("S and T must be nonempty");
  if (!s.subset_of(g.all_vertices()) || !t.subset_of(g.all_vertices())) throw InputError("unknown vertex in S or T");
  if (s.intersects(t)) throw ZeroProbabilityError("S and T overlap, so S -> T surely");
}

SparseRow row_times(const SparseRow& row, const std::vector<SparseRow>& m) {
  std::map<int, Rational> acc;
  for (const auto& [j, a] : row)
    for (const auto& [k, b] : m[j]) acc[k] += a * b;
  return SparseRow(acc.begin(), acc.end());
}

std::vector<Rational> vec_times(const std::vector<Rational>& v, const std::vector<SparseRow>& m) {
  std::vector<Rational> out(v.size(), Rational(0));
  for (std::size_t i = 0; i < v.size(); ++i)
    for (const auto& [j, a] : m[i]) out[j] += v[i] * a;
  return out;
}

bool rows_stochastic(const std::vector<SparseRow>& m) {
  for (const auto& row : m) {
    Rational total(0);
    for (const auto& e : row) total += e.second;
    if (total != 1) return false;
  }
  return true;
}

Rational max_abs_diff(const std::vector<Rational>& a, const std::vector<Rational>& b) {
  Rational worst(0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    Rational d = a[i] - b[i];
    if (d < 0) d = -d;
    if (d > worst) worst = d;
  }
  return worst;
}

std::vector<bool> reach_from(const std::vector<SparseRow>& m, int start, bool reverse) {
  const std::size_t n = m.size();
  std::vector<std::vector<int>> adj(n);
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& [j, a] : m[i])
      if (a > 0) reverse ? adj[j].push_back(static_cast<int>(i)) : adj[i].push_back(j);
  std::vector<bool> seen(n, false);
  std::queue<int> todo;
  todo.push(start);
  seen[start] = true;
  while (!todo.empty()) {
    int u = todo.front();
    todo.pop();
    for (int v : adj[u])
      if (!seen[v]) seen[v] = true, todo.push(v);
  }
  return seen;
}

// gcd of cycle lengths through BFS levels; valid for an irreducible chain.
int chain_period(const std::vector<SparseRow>& m) {
  std::vector<int> level(m.size(), -1);
  std::queue<int> todo;
  level[0] = 0;
  todo.push(0);
  int g = 0;
  while (!todo.empty()) {
    int u = todo.front();
    todo.pop();
    for (const auto& [v, a] : m[u]) {
      if (!(a > 0)) continue;
      if (level[v] < 0) {
        level[v] = level[u] + 1;
        todo.push(v);
      } else {
        g = std::gcd(g, std::abs(level[u] + 1 - level[v]));
      }
    }
  }
  return g;
}

std::vector<std::vector<double>> to_double_rows(const std::vector<SparseRow>& m) {
  std::vector<std::vector<double>> out(m.size(), std::vector<double>(m.size(), 0.0));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (const auto& [j, a] : m[i]) out[i][j] = to_double(a);
  return out;
}

double tv_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::fabs(a[i] - b[i]);
  return s / 2;
}

int sample_row(const SparseRow& row, Rng& rng) {
  double u = rng.uniform(), acc = 0;
  for (const auto& [j, a] : row) {
    acc += to_double(a);
    if (u < acc) return j;
  }
  return row.back().first;
}

}  // namespace

// ------------------------------------------------------------------ pair chain

int PairChain::index_of(const ClusterPairState& s) const {
  auto it = std::lower_bound(states.begin(), states.end(), s);
  return it != states.end() && *it == s ? static_cast<int>(it - states.begin()) : -1;
}

int PairChain::empty_state() const { return index_of({}); }

PairChain build_pair_chain(const Graph& g, VertexSet s, VertexSet t, const Rational& q, std::size_t max_states) {
  need_pair_inputs(g, s, t);
  auto mu = random_cluster_measure<Rational>(g, q);
  auto rq = event_R(g, s, t);
  auto ts = cluster_table(g, s), tt = cluster_table(g, t);
  std::map<ClusterPairState, Rational> joint;
  Rational mass(0);
  for (std::uint64_t x = 0; x < g.num_configs(); ++x) {
    if (!rq.contains(x) || !(mu[x] > 0)) continue;
    joint[{ts.cluster[x], tt.cluster[x]}] += mu[x];
    mass += mu[x];
    if (joint.size() > max_states)
      throw BudgetError("pair chain state space exceeds " + std::to_string(max_states) + " states");
  }
  if (!(mass > 0)) throw ZeroProbabilityError("phi_q(S not-> T) = 0");

  PairChain c{g, s, t, q, {}, {}, {}, {}, {}};
  for (const auto& [st, w] : joint) {
    c.states.push_back(st);
    c.stationary.push_back(w / mass);
  }
  const int n = static_cast<int>(c.states.size());
  std::map<EdgeSet, std::vector<int>> by_cs, by_ct;
  std::map<EdgeSet, Rational> marg_s, marg_t;
  for (int i = 0; i < n; ++i) {
    by_cs[c.states[i].cs].push_back(i);
    by_ct[c.states[i].ct].push_back(i);
    marg_s[c.states[i].cs] += c.stationary[i];
    marg_t[c.states[i].ct] += c.stationary[i];
  }
  c.ct_update.resize(n);
  c.cs_update.resize(n);
  for (int i = 0; i < n; ++i) {
    const auto& cs = c.states[i].cs;
    const auto& ct = c.states[i].ct;
    for (int j : by_cs[cs]) c.ct_update[i].emplace_back(j, c.stationary[j] / marg_s[cs]);
    for (int j : by_ct[ct]) c.cs_update[i].emplace_back(j, c.stationary[j] / marg_t[ct]);
  }
  c.kernel.resize(n);
  for (int i = 0; i < n; ++i) c.kernel[i] = row_times(c.ct_update[i], c.cs_update);
  return c;
}

ChainDiagnostics diagnose(const PairChain& c, int start, int max_steps, double tv_target) {
  ChainDiagnostics d;
  const int n = static_cast<int>(c.states.size());
  if (start < 0 || start >= n) throw InputError("start state out of range");
  d.num_states = n;
  d.start = start;
  d.rows_sum_to_one = rows_stochastic(c.kernel) && rows_stochastic(c.ct_update) && rows_stochastic(c.cs_update);
  d.residual = max_abs_diff(vec_times(c.stationary, c.kernel), c.stationary);
  d.stationary = d.residual == 0;
  d.ct_update_fixes = vec_times(c.stationary, c.ct_update) == c.stationary;
  d.cs_update_fixes = vec_times(c.stationary, c.cs_update) == c.stationary;
  d.disjoint = std::all_of(c.states.begin(), c.states.end(), [&](const ClusterPairState& s) {
    return !vertex_support(c.graph, s.cs).intersects(vertex_support(c.graph, s.ct));
  });
  auto fwd = reach_from(c.kernel, 0, false), bwd = reach_from(c.kernel, 0, true);
  d.irreducible = std::all_of(fwd.begin(), fwd.end(), [](bool b) { return b; }) &&
                  std::all_of(bwd.begin(), bwd.end(), [](bool b) { return b; });
  d.period = d.irreducible ? (n == 1 ? 1 : chain_period(c.kernel)) : 0;
  d.aperiodic = d.period == 1;

  auto k = to_double_rows(c.kernel);
  std::vector<double> pi(n), dist(n, 0.0);
  for (int i = 0; i < n; ++i) pi[i] = to_double(c.stationary[i]);
  dist[start] = 1.0;
  for (int step = 0;; ++step) {
    double tv = tv_distance(dist, pi);
    d.tv.push_back(tv);
    if (tv < tv_target) {
      d.mixing_step = step;
      break;
    }
    if (step == max_steps) break;
    std::vector<double> next(n, 0.0);
    for (int i = 0; i < n; ++i)
      if (dist[i] != 0)
        for (int j = 0; j < n; ++j) next[j] += dist[i] * k[i][j];
    dist.swap(next);
  }
  d.tv_nonincreasing = true;
  for (std::size_t i = 1; i < d.tv.size(); ++i)
    if (d.tv[i] > d.tv[i - 1] + 1e-12) d.tv_nonincreasing = false;
  return d;
}

const SparseRow& pair_step_distribution(const PairChain& c, int state) {
  if (state < 0 || state >= static_cast<int>(c.states.size())) throw InputError("state out of range");
  return c.kernel[state];
}

int step_pair_chain(const PairChain& c, int state, Rng& rng) {
  if (state < 0 || state >= static_cast<int>(c.states.size())) throw InputError("state out of range");
  int mid = sample_row(c.ct_update[state], rng);
  return sample_row(c.cs_update[mid], rng);
}

nlohmann::json state_to_json(const Graph& g, const ClusterPairState& s) {
  return {{"C_S", describe(g, s.cs)}, {"C_T", describe(g, s.ct)}};
}

nlohmann::json diagnostics_to_json(const PairChain& c, const ChainDiagnostics& d) {
  nlohmann::json states = nlohmann::json::array();
  for (std::size_t i = 0; i < c.states.size(); ++i) {
    auto j = state_to_json(c.graph, c.states[i]);
    j["stationary"] = to_string(c.stationary[i]);
    states.push_back(j);
  }
  return {{"states", states},
          {"num_states", d.num_states},
          {"rows_sum_to_one", d.rows_sum_to_one},
          {"stationarity_residual", to_string(d.residual)},
          {"stationary", d.stationary},
          {"ct_update_fixes", d.ct_update_fixes},
          {"cs_update_fixes", d.cs_update_fixes},
          {"disjoint", d.disjoint},
          {"irreducible", d.irreducible},
          {"period", d.period},
          {"aperiodic", d.aperiodic},
          {"start", state_to_json(c.graph, c.states[d.start])},
          {"tv", d.tv},
          {"mixing_step", d.mixing_step},
          {"tv_nonincreasing", d.tv_nonincreasing},
          {"ok", d.ok()}};
}

// ------------------------------------------------------------ trace association

std::uint64_t trace_indicators(const PairChain& c, const std::vector<int>& states) {
  const int m = c.graph.num_edges();
  std::uint64_t word = 0;
  for (std::size_t i = 1; i < states.size(); ++i) {
    const auto& st = c.states[states[i]];
    for (int e = 0; e < m; ++e) {
      if (!st.ct.test(e)) word |= std::uint64_t{1} << x_coord(m, static_cast<int>(i), e);
      if (st.cs.test(e)) word |= std::uint64_t{1} << y_coord(m, static_cast<int>(i), e);
    }
  }
  return word;
}

TraceAssociation check_trace_association(const Graph& g, VertexSet s, VertexSet t, const Rational& q, int n,
                                         AssociationOptions<Rational> opt) {
  if (n < 0) throw InputError("negative step count");
  if (n > 3 || g.num_edges() > 3) throw BudgetError("trace association is limited to n <= 3 and |E| <= 3");
  auto c = build_pair_chain(g, s, t, q);
  TraceAssociation r;
  r.steps = n;
  r.edges = g.num_edges();
  r.law.dims = 2 * r.edges * n;
  if (n == 0) {
    r.histories = 1;
    r.law.atoms = {{0, Rational(1)}};
    r.verdict.proof = true;
    r.monotone_states = true;
    return r;
  }

  struct Leaf {
    std::uint64_t word;
    int last;
  };
  std::vector<Leaf> leaves;
  std::map<std::uint64_t, Rational> law;
  std::vector<int> path{c.empty_state()};
  auto walk = [&](auto&& self, const Rational& prob) -> void {
    if (static_cast<int>(path.size()) == n + 1) {
      auto w = trace_indicators(c, path);
      law[w] += prob;
      leaves.push_back({w, path.back()});
      return;
    }
    for (const auto& [j, a] : c.kernel[path.back()]) {
      path.push_back(j);
      self(self, prob * a);
      path.pop_back();
    }
  };
  walk(walk, Rational(1));
  r.histories = leaves.size();
  r.law.atoms.assign(law.begin(), law.end());

  try {
    r.verdict = check_positive_association(r.law, opt);
  } catch (const BudgetError&) {
    opt.strategy = AssociationStrategy::Sampled;
    r.verdict = check_positive_association(r.law, opt);
  }

  r.monotone_states = true;
  for (const auto& a : leaves)
    for (const auto& b : leaves) {
      if ((a.word & ~b.word) != 0) continue;
      const auto& sa = c.states[a.last];
      const auto& sb = c.states[b.last];
      if (!sa.cs.subset_of(sb.cs) || !sb.ct.subset_of(sa.ct)) r.monotone_states = false;
    }
  return r;
}

// --------------------------------------------------------- configuration chain

DrivingNoise DrivingNoise::sample(std::uint64_t seed, int edges, int steps) {
  DrivingNoise d{seed, edges, steps, {}, {}};
  Rng rng(seed);
  for (int i = 0; i < steps; ++i) {
    for (int e = 0; e < edges; ++e) d.x.push_back(rng.uniform());
    for (int e = 0; e < edges; ++e) d.y.push_back(rng.uniform());
  }
  return d;
}

ConfigChain::ConfigChain(const Graph& g, VertexSet s, VertexSet t, const Rational& q) : graph_(g), s_(s), t_(t) {
  need_pair_inputs(g, s, t);
  auto mu = condition(random_cluster_measure<Rational>(g, q), event_R(g, s, t));
  law_.assign(mu.weights().begin(), mu.weights().end());
  auto ts = cluster_table(g, s), tt = cluster_table(g, t);
  cs_of_ = ts.cluster;
  ct_of_ = tt.cluster;
  for (std::uint64_t x = 0; x < g.num_configs(); ++x) {
    if (!(law_[x] > 0)) continue;
    Config w(static_cast<std::uint32_t>(x));
    support_.push_back(w);
    by_cs_[cs_of_[x]].push_back(w);
    by_ct_[ct_of_[x]].push_back(w);
  }
}

const ConfigChain::Alpha& ConfigChain::alpha(bool omega_phase, EdgeSet cluster, int e, Config prefix) const {
  const std::uint32_t below_e = (std::uint32_t{1} << e) - 1;
  const std::uint64_t key = std::uint64_t{omega_phase} | (std::uint64_t(e) << 1) |
                            (std::uint64_t(prefix.bits & below_e) << 6) | (std::uint64_t(cluster.bits) << 30);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  const auto& groups = omega_phase ? by_ct_ : by_cs_;
  auto g = groups.find(cluster);
  if (g == groups.end())
    throw ZeroProbabilityError("cluster value " + describe(graph_, cluster) + " has probability zero");
  Rational num(0), den(0);
  for (Config w : g->second) {
    if ((w.bits & below_e) != (prefix.bits & below_e)) continue;
    den += law_[w.bits];
    if (w.test(e)) num += law_[w.bits];
  }
  if (!(den > 0)) throw ZeroProbabilityError("partial assignment has probability zero");
  Rational a = num / den;
  return cache_.emplace(key, Alpha{a, to_double(a)}).first->second;
}

const Rational& ConfigChain::alpha_tau(EdgeSet cs, int e, Config prefix) const { return alpha(false, cs, e, prefix).exact; }

const Rational& ConfigChain::alpha_omega(EdgeSet ct, int e, Config prefix) const {
  return alpha(true, ct, e, prefix).exact;
}

namespace {

// v < a, exactly.
bool less_than(double v, const Rational& a, double approx) {
  if (v < approx - 1e-9) return true;
  if (v > approx + 1e-9) return false;
  return exact_rational(v) < a;
}
bool less_than(const Rational& v, const Rational& a, double) { return v < a; }

// v > 1 - a, exactly.
bool above_complement(double v, const Rational& a, double approx) {
  if (v > 1 - approx + 1e-9) return true;
  if (v < 1 - approx - 1e-9) return false;
  return exact_rational(v) > 1 - a;
}
bool above_complement(const Rational& v, const Rational& a, double) { return v > 1 - a; }

}  // namespace

template <class N>
Config ConfigChain::step(Config omega, const N* x, const N* y) const {
  const int m = graph_.num_edges();
  EdgeSet cs = cs_of_[omega.bits];
  Config tau;
  for (int e = 0; e < m; ++e) {
    const Alpha& a = alpha(false, cs, e, tau);
    bool open = a.exact == 1 || (a.exact != 0 && less_than(x[e], a.exact, a.approx));
    if (open) tau = tau.with(e);
  }
  EdgeSet ct = ct_of_[tau.bits];
  Config next;
  for (int e = 0; e < m; ++e) {
    const Alpha& a = alpha(true, ct, e, next);
    bool open = a.exact == 1 || (a.exact != 0 && above_complement(y[e], a.exact, a.approx));
    if (open) next = next.with(e);
  }
  return next;
}

template Config ConfigChain::step<double>(Config, const double*, const double*) const;
template Config ConfigChain::step<Rational>(Config, const Rational*, const Rational*) const;

std::vector<Config> ConfigChain::run(Config omega0, const DrivingNoise& noise, int n) const {
  if (!(law_[omega0.bits] > 0)) throw InputError("omega^0 must satisfy S not-> T");
  if (noise.edges != graph_.num_edges() || noise.steps < n) throw InputError("noise does not cover the run");
  std::vector<Config> trace{omega0};
  for (int i = 1; i <= n; ++i) {
    const std::size_t off = static_cast<std::size_t>(i - 1) * noise.edges;
    trace.push_back(step(trace.back(), noise.x.data() + off, noise.y.data() + off));
  }
  return trace;
}

std::map<Config, Rational> ConfigChain::tau_law(EdgeSet cs) const {
  std::map<Config, Rational> out;
  const int m = graph_.num_edges();
  auto walk = [&](auto&& self, int e, Config prefix, const Rational& p) -> void {
    if (e == m) {
      out[prefix] += p;
      return;
    }
    const Rational& a = alpha(false, cs, e, prefix).exact;
    if (a > 0) self(self, e + 1, prefix.with(e), p * a);
    if (a < 1) self(self, e + 1, prefix, p * (1 - a));
  };
  walk(walk, 0, Config{}, Rational(1));
  return out;
}

std::map<Config, Rational> ConfigChain::omega_law(EdgeSet ct) const {
  std::map<Config, Rational> out;
  const int m = graph_.num_edges();
  auto walk = [&](auto&& self, int e, Config prefix, const Rational& p) -> void {
    if (e == m) {
      out[prefix] += p;
      return;
    }
    const Rational& a = alpha(true, ct, e, prefix).exact;
    if (a > 0) self(self, e + 1, prefix.with(e), p * a);
    if (a < 1) self(self, e + 1, prefix, p * (1 - a));
  };
  walk(walk, 0, Config{}, Rational(1));
  return out;
}

std::vector<SparseRow> ConfigChain::exact_kernel() const {
  std::map<Config, int> index;
  for (std::size_t i = 0; i < support_.size(); ++i) index[support_[i]] = static_cast<int>(i);
  std::map<EdgeSet, std::map<EdgeSet, Rational>> ct_given_cs;
  std::map<EdgeSet, std::map<Config, Rational>> omega_given_ct;
  std::vector<SparseRow> k;
  for (Config w : support_) {
    EdgeSet cs = cs_of_[w.bits];
    auto it = ct_given_cs.find(cs);
    if (it == ct_given_cs.end()) {
      std::map<EdgeSet, Rational> m;
      for (const auto& [tau, p] : tau_law(cs)) m[ct_of_[tau.bits]] += p;
      it = ct_given_cs.emplace(cs, std::move(m)).first;
    }
    std::map<int, Rational> row;
    for (const auto& [ct, p] : it->second) {
      auto ot = omega_given_ct.find(ct);
      if (ot == omega_given_ct.end()) ot = omega_given_ct.emplace(ct, omega_law(ct)).first;
      for (const auto& [next, r] : ot->second) {
        auto ix = index.find(next);
        if (ix == index.end()) throw InternalError("configuration chain left the support");
        row[ix->second] += p * r;
      }
    }
    k.emplace_back(row.begin(), row.end());
  }
  return k;
}

ConfigChainStationarity check_config_chain_stationary(const ConfigChain& chain) {
  ConfigChainStationarity r;
  const Graph& g = chain.graph();
  const auto& supp = chain.support();
  const auto& law = chain.target_law();
  r.num_states = supp.size();
  // Conditional laws given each cluster value, straight from the target law.
  std::map<EdgeSet, std::map<Config, Rational>> by_cs, by_ct;
  for (Config w : supp) {
    by_cs[open_cluster(g, w, chain.source())][w] = law[w.bits];
    by_ct[open_cluster(g, w, chain.target())][w] = law[w.bits];
  }
  auto normalized = [](std::map<Config, Rational> m) {
    Rational total(0);
    for (const auto& e : m) total += e.second;
    for (auto& e : m) e.second /= total;
    return m;
  };
  r.laws_match = true;
  for (const auto& [cs, m] : by_cs)
    if (chain.tau_law(cs) != normalized(m)) r.laws_match = false;
  for (const auto& [ct, m] : by_ct)
    if (chain.omega_law(ct) != normalized(m)) r.laws_match = false;
  auto k = chain.exact_kernel();
  r.rows_sum_to_one = rows_stochastic(k);
  std::vector<Rational> pi;
  for (Config w : supp) pi.push_back(law[w.bits]);
  r.residual = max_abs_diff(vec_times(pi, k), pi);
  r.stationary = r.residual == 0;
  return r;
}

FrequencyTest config_chain_frequencies(const ConfigChain& chain, int samples, std::uint64_t seed, int thin) {
  if (samples <= 0) throw InputError("samples must be positive");
  const auto& supp = chain.support();
  const auto& law = chain.target_law();
  if (!(law[0] > 0)) throw InputError("all-closed configuration is not in the support");
  FrequencyTest f;
  f.samples = samples;
  f.seed = seed;
  if (thin <= 0) {
    auto k = to_double_rows(chain.exact_kernel());
    const std::size_t n = k.size();
    std::vector<double> pi(n);
    for (std::size_t i = 0; i < n; ++i) pi[i] = to_double(law[supp[i].bits]);
    auto power = k;
    thin = 1;
    for (;; ++thin) {
      double worst = 0;
      for (const auto& row : power) worst = std::max(worst, tv_distance(row, pi));
      if (worst < 0.01 || thin == 1000) break;
      std::vector<std::vector<double>> next(n, std::vector<double>(n, 0.0));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (power[i][j] != 0)
            for (std::size_t l = 0; l < n; ++l) next[i][l] += power[i][j] * k[j][l];
      power.swap(next);
    }
  }
  f.thin = thin;

  const int m = chain.graph().num_edges();
  std::map<Config, int> counts;
  Rng rng(seed);
  std::vector<double> x(m), y(m);
  Config omega;
  for (long long step = 1; step <= static_cast<long long>(samples) * thin; ++step) {
    for (auto& v : x) v = rng.uniform();
    for (auto& v : y) v = rng.uniform();
    omega = chain.step(omega, x.data(), y.data());
    if (step % thin == 0) ++counts[omega];
  }
  f.within_3_sigma = true;
  for (Config w : supp) {
    FrequencyTest::Row row{w, law[w.bits], counts[w], 0.0};
    double p = to_double(row.exact);
    double sd = std::sqrt(samples * p * (1 - p));
    double diff = row.count - samples * p;
    row.z = sd > 0 ? diff / sd : (std::fabs(diff) < 0.5 ? 0.0 : INFINITY);
    f.max_abs_z = std::max(f.max_abs_z, std::fabs(row.z));
    f.rows.push_back(row);
  }
  f.within_3_sigma = f.max_abs_z <= 3.0;
  return f;
}

void ConfigChain::sweep(bool omega_phase, EdgeSet cluster, int grid, std::vector<Config>& out) const {
  const int m = graph_.num_edges();
  const int base = grid + 1;
  std::size_t total = 1;
  for (int e = 0; e < m; ++e) total *= base;
  out.assign(total, Config{});
  std::vector<Rational> values;
  for (int d = 0; d <= grid; ++d) values.emplace_back(d, grid);
  auto walk = [&](auto&& self, int e, Config prefix, std::size_t index, std::size_t stride) -> void {
    if (e == m) {
      out[index] = prefix;
      return;
    }
    const Alpha& a = alpha(omega_phase, cluster, e, prefix);
    for (int d = 0; d <= grid; ++d) {
      bool open = a.exact == 1 ||
                  (a.exact != 0 && (omega_phase ? above_complement(values[d], a.exact, a.approx)
                                                : less_than(values[d], a.exact, a.approx)));
      self(self, e + 1, open ? prefix.with(e) : prefix, index + d * stride, stride * base);
    }
  };
  walk(walk, 0, Config{}, 0, 1);
}

MonotonicityCheck check_config_chain_monotone(const ConfigChain& chain, Config omega0, int n, int grid) {
  const Graph& g = chain.graph();
  const int m = g.num_edges();
  if (n < 0) throw InputError("negative step count");
  if (grid < 1 || grid > 16) throw InputError("grid must be between 1 and 16");
  if (m > 3 || n > 4) throw BudgetError("monotonicity grid check is limited to |E| <= 3 and n <= 4");
  if (!(chain.target_law()[omega0.bits] > 0)) throw InputError("omega^0 must satisfy S not-> T");
  MonotonicityCheck r;
  r.steps = n;
  r.grid = grid;
  if (n == 0 || m == 0) return r;


  const auto& supp = chain.support();
  std::vector<int> index(g.num_configs(), -1);
  for (std::size_t i = 0; i < supp.size(); ++i) index[supp[i].bits] = static_cast<int>(i);
  const std::size_t base = grid + 1;
  std::size_t half = 1;
  for (int e = 0; e < m; ++e) half *= base;
  const std::size_t points = half * half;  // X digits low, Y digits high

  // table[state][point] = next state
  std::map<EdgeSet, std::vector<Config>> taus, omegas;
  std::vector<std::vector<int>> table(supp.size(), std::vector<int>(points));
  for (std::size_t si = 0; si < supp.size(); ++si) {
    EdgeSet cs = open_cluster(g, supp[si], chain.source());
    auto& tv = taus[cs];
    if (tv.empty()) chain.sweep(false, cs, grid, tv);
    for (std::size_t px = 0; px < half; ++px) {
      EdgeSet ct = open_cluster(g, tv[px], chain.target());
      auto& ov = omegas[ct];
      if (ov.empty()) chain.sweep(true, ct, grid, ov);
      for (std::size_t py = 0; py < half; ++py) table[si][px + half * py] = index[ov[py].bits];
    }
  }

  std::vector<std::set<int>> reach(n + 1);
  reach[0].insert(index[omega0.bits]);
  for (int i = 1; i <= n; ++i)
    for (int a : reach[i - 1])
      for (std::size_t p = 0; p < points; ++p) reach[i].insert(table[a][p]);

  std::vector<EdgeSet> cs(supp.size()), ct(supp.size());
  for (std::size_t i = 0; i < supp.size(); ++i) {
    cs[i] = open_cluster(g, supp[i], chain.source());
    ct[i] = open_cluster(g, supp[i], chain.target());
  }
  auto variate = [&](int c) {
    return std::string(c < m ? "X" : "Y") + "[" + describe(g, EdgeSet::single(c % m)) + "]";
  };
  for (int j = 1; j <= n; ++j) {
    // Pairs (lower, upper) of omega^j from raising one variate of step j,
    // keyed to the first variate that produced them.
    std::map<std::pair<int, int>, int> pairs;
    for (int a : reach[j - 1])
      for (int c = 0; c < 2 * m; ++c) {
        std::size_t stride = 1;
        for (int k = 0; k < c; ++k) stride *= base;
        for (std::size_t p = 0; p < points; ++p) {
          if ((p / stride) % base == base - 1) continue;
          int lo = table[a][p], hi = table[a][p + stride];
          if (lo != hi) pairs.emplace(std::make_pair(lo, hi), c);
        }
      }
    for (int i = j + 1; i <= n; ++i) {
      std::map<std::pair<int, int>, int> next;
      for (const auto& [pr, c] : pairs)
        for (std::size_t p = 0; p < points; ++p) {
          int a = table[pr.first][p], b = table[pr.second][p];
          if (a != b) next.emplace(std::make_pair(a, b), c);
        }
      pairs.swap(next);
    }
    r.pairs_propagated += pairs.size();
    for (const auto& [pr, c] : pairs) {
      const auto [lo, hi] = pr;
      auto witness = [&] {
        return nlohmann::json{{"step", j},
                              {"variate", variate(c)},
                              {"lower_final", describe(g, supp[lo])},
                              {"upper_final", describe(g, supp[hi])}};
      };
      if (r.omega_increasing && !supp[lo].subset_of(supp[hi])) {
        r.omega_increasing = false;
        r.omega_witness = witness();
      }
      if (r.clusters_monotone && !(cs[lo].subset_of(cs[hi]) && ct[hi].subset_of(ct[lo]))) {
        r.clusters_monotone = false;
        r.cluster_witness = witness();
      }
    }
  }
  return r;
}

nlohmann::json monotonicity_to_json(const MonotonicityCheck& m) {
  nlohmann::json j{{"steps", m.steps},
                   {"grid", m.grid},
                   {"pairs_propagated", m.pairs_propagated},
                   {"omega_increasing", m.omega_increasing},
                   {"clusters_monotone", m.clusters_monotone}};
  if (m.omega_witness) j["omega_witness"] = *m.omega_witness;
  if (m.cluster_witness) j["cluster_witness"] = *m.cluster_witness;
  return j;
}

}  // namespace ccl
