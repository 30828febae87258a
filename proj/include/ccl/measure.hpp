#pragma once

#include <ccl/configs.hpp>
#include <ccl/error.hpp>
#include <ccl/event.hpp>
#include <ccl/graph.hpp>
#include <ccl/rational.hpp>

#include <json.hpp>

#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

namespace ccl {

/// Number of connected components of (V, open edges), ignoring orientations;
/// isolated vertices count.
int count_components(const Graph& g, Config omega);

/// Component index of every vertex, numbered 0, 1, ... in order of each
/// component's smallest vertex.
std::vector<int> component_labels(const Graph& g, Config omega);

/// A probability measure on {0,1}^E of a fixed graph, stored densely.
/// `normalizer` is the total unnormalized weight the measure was built from
/// (the partition function for random-cluster measures).
template <class T>
class Measure {
 public:
  Measure() = default;
  Measure(Graph g, std::vector<T> unnormalized) : graph_(std::move(g)), weights_(std::move(unnormalized)) {
    if (weights_.size() != graph_.num_configs()) throw InputError("measure length must be 2^|E|");
    normalizer_ = T(0);
    for (const auto& w : weights_) {
      if (w < 0) throw InputError("negative weight");
      normalizer_ += w;
    }
    if (!(normalizer_ > 0)) throw ZeroProbabilityError("measure has zero total mass");
    for (auto& w : weights_) w /= normalizer_;
  }

  const Graph& graph() const { return graph_; }
  int dims() const { return graph_.num_edges(); }
  std::span<const T> weights() const { return weights_; }
  const T& operator[](std::uint64_t omega) const { return weights_[omega]; }
  const T& normalizer() const { return normalizer_; }

  T probability(const Event& a) const {
    T sum(0);
    for (std::uint64_t w = 0; w < weights_.size(); ++w)
      if (a.contains(w)) sum += weights_[w];
    return sum;
  }

  Event support() const {
    return Event::from_predicate(dims(), [&](std::uint64_t w) { return weights_[w] > 0; }, "supp");
  }

 private:
  Graph graph_;
  std::vector<T> weights_;
  T normalizer_{};
};

template <class T>
Measure<T> product_measure(const Graph& g) {
  std::vector<T> p(g.num_edges()), q(g.num_edges());
  for (int i = 0; i < g.num_edges(); ++i) {
    p[i] = scalar_from<T>(g.edge(i).p);
    q[i] = T(1) - p[i];
  }
  // Gray-code style doubling keeps this O(2^|E|) multiplications.
  std::vector<T> w(g.num_configs());
  w[0] = T(1);
  for (int i = 0; i < g.num_edges(); ++i) w[0] *= q[i];
  std::uint64_t filled = 1;
  for (int i = 0; i < g.num_edges(); ++i) {
    T ratio = p[i] / q[i];
    for (std::uint64_t x = 0; x < filled; ++x) w[x | filled] = w[x] * ratio;
    filled <<= 1;
  }
  return Measure<T>(g, std::move(w));
}

/// phi_{G,q}(omega) proportional to q^k(omega) prod p_e prod (1-p_e).
template <class T>
Measure<T> random_cluster_measure(const Graph& g, const Rational& q) {
  if (!(q > 0)) throw InputError("random-cluster parameter q must be positive");
  auto base = product_measure<T>(g);
  const T qs = scalar_from<T>(q);
  std::vector<T> powers(g.num_vertices() + 1, T(1));
  for (std::size_t k = 1; k < powers.size(); ++k) powers[k] = powers[k - 1] * qs;
  std::vector<T> w(g.num_configs());
  // Undo the product normalization so the stored normalizer is the partition
  // function Z = sum_omega q^k prod p prod (1-p).
  for (std::uint64_t x = 0; x < g.num_configs(); ++x)
    w[x] = base[x] * base.normalizer() * powers[count_components(g, Config(static_cast<std::uint32_t>(x)))];
  return Measure<T>(g, std::move(w));
}

template <class T>
Measure<T> condition(const Measure<T>& mu, const Event& a) {
  if (a.dims() != mu.dims()) throw InputError("event dimension does not match the measure");
  std::vector<T> w(mu.weights().begin(), mu.weights().end());
  for (std::uint64_t x = 0; x < w.size(); ++x)
    if (!a.contains(x)) w[x] = T(0);
  T mass(0);
  for (const auto& v : w) mass += v;
  if (!(mass > 0))
    throw ZeroProbabilityError("conditioning on an event of probability zero (" + a.provenance() + ")");
  return Measure<T>(mu.graph(), std::move(w));
}

template <class T>
T expectation(const Measure<T>& mu, const RealFunction& f) {
  if (f.dims() != mu.dims()) throw InputError("function dimension does not match the measure");
  T sum(0);
  for (std::uint64_t x = 0; x < f.size(); ++x)
    if (mu[x] != 0) sum += mu[x] * scalar_from<T>(f[x]);
  return sum;
}

template <class T>
T covariance(const Measure<T>& mu, const RealFunction& f, const RealFunction& g) {
  if (f.dims() != mu.dims() || g.dims() != mu.dims()) throw InputError("function dimension does not match the measure");
  T ef(0), eg(0), efg(0);
  for (std::uint64_t x = 0; x < f.size(); ++x) {
    if (mu[x] == 0) continue;
    T fx = scalar_from<T>(f[x]), gx = scalar_from<T>(g[x]);
    ef += mu[x] * fx;
    eg += mu[x] * gx;
    efg += mu[x] * fx * gx;
  }
  return efg - ef * eg;
}

/// Law of C_S under mu, keyed by cluster value.
template <class T>
std::map<EdgeSet, T> cluster_marginal(const Measure<T>& mu, VertexSet s) {
  auto table = cluster_table(mu.graph(), s);
  std::map<EdgeSet, T> out;
  for (std::uint64_t x = 0; x < mu.weights().size(); ++x) {
    if (mu[x] == 0) continue;
    auto [it, inserted] = out.try_emplace(table.cluster[x], mu[x]);
    if (!inserted) it->second += mu[x];
  }
  return out;
}

/// Edges whose state is pinned by {C_S = F}: every edge meeting S or V(F).
/// On undirected graphs with F nonempty this is bar(F) together with the
/// edges at the vertices of S that F does not touch.
EdgeSet cluster_boundary(const Graph& g, VertexSet s, EdgeSet f);

/// mu(. | C_S = F) restricted to the edges outside cluster_boundary(S, F),
/// as a measure on the graph with those boundary edges deleted.
template <class T>
Measure<T> conditional_given_cluster(const Measure<T>& mu, VertexSet s, EdgeSet f, Surgery* surgery_out = nullptr) {
  const Graph& g = mu.graph();
  auto table = cluster_table(g, s);
  EdgeSet pinned = cluster_boundary(g, s, f);
  Surgery surgery = delete_edges(g, pinned);
  std::vector<T> w(surgery.graph.num_configs(), T(0));
  bool any = false;
  for (std::uint64_t x = 0; x < g.num_configs(); ++x) {
    if (table.cluster[x] != f || mu[x] == 0) continue;
    any = true;
    w[surgery.map_edges(Config(static_cast<std::uint32_t>(x))).bits] += mu[x];
  }
  if (!any) throw ZeroProbabilityError("cluster value " + describe(g, f) + " has probability zero");
  if (surgery_out) *surgery_out = surgery;
  return Measure<T>(surgery.graph, std::move(w));
}

/// Law of the random set of vertices outside Z joined to Z by an open edge
/// (an unoriented edge, or an oriented edge pointing into Z), under the
/// product measure.
template <class T>
std::map<VertexSet, T> boundary_set_distribution(const Graph& g, VertexSet z) {
  auto mu = product_measure<T>(g);
  std::map<VertexSet, T> out;
  for (std::uint64_t x = 0; x < g.num_configs(); ++x) {
    VertexSet attached;
    for (int i = 0; i < g.num_edges(); ++i) {
      if (!((x >> i) & 1u)) continue;
      const Edge& e = g.edge(i);
      if (z.test(e.head) && !z.test(e.tail)) attached = attached.with(e.tail);
      if (!e.oriented && z.test(e.tail) && !z.test(e.head)) attached = attached.with(e.head);
    }
    auto [it, inserted] = out.try_emplace(attached, mu[x]);
    if (!inserted) it->second += mu[x];
  }
  return out;
}

/// N: vertices outside Z that can be attached to Z by a single edge.
VertexSet boundary_vertices(const Graph& g, VertexSet z);

/// Checks Pr(S)Pr(T) = Pr(S & T)Pr(S | T) for all S, T within N.
struct LogModularity {
  bool holds = true;
  std::optional<std::pair<VertexSet, VertexSet>> witness;
};

LogModularity check_log_modular(const std::map<VertexSet, Rational>& dist, VertexSet n);

nlohmann::json measure_to_json(const Measure<Rational>& mu);
Measure<Rational> measure_from_json(const nlohmann::json& j);

}  // namespace ccl
