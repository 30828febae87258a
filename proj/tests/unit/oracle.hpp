#pragma once

// Naive reference computations used to cross-check the library. These are
// deliberately written differently from the production code: fixpoint
// iteration instead of BFS, per-configuration products instead of the
// doubling construction, and so on.

#include <ccl/graph.hpp>
#include <ccl/rational.hpp>

#include <functional>
#include <set>
#include <vector>

namespace oracle {

using ccl::Graph;
using ccl::Rational;

inline bool open(std::uint64_t omega, int e) { return (omega >> e) & 1u; }

// Vertices reachable from `from`, by repeated relaxation until nothing changes.
inline std::vector<bool> reach(const Graph& g, std::uint64_t omega, const std::vector<int>& from) {
  std::vector<bool> r(g.num_vertices(), false);
  for (int v : from) r[v] = true;
  for (bool changed = true; changed;) {
    changed = false;
    for (int e = 0; e < g.num_edges(); ++e) {
      if (!open(omega, e)) continue;
      const auto& ed = g.edge(e);
      if (r[ed.tail] && !r[ed.head]) r[ed.head] = changed = true;
      if (!ed.oriented && r[ed.head] && !r[ed.tail]) r[ed.tail] = changed = true;
    }
  }
  return r;
}

inline std::uint32_t cluster(const Graph& g, std::uint64_t omega, const std::vector<int>& from) {
  auto r = reach(g, omega, from);
  std::uint32_t c = 0;
  for (int e = 0; e < g.num_edges(); ++e) {
    if (!open(omega, e)) continue;
    const auto& ed = g.edge(e);
    if (r[ed.tail] || (!ed.oriented && r[ed.head])) c |= 1u << e;
  }
  return c;
}

inline Rational product_weight(const Graph& g, std::uint64_t omega) {
  Rational w = 1;
  for (int e = 0; e < g.num_edges(); ++e) w *= open(omega, e) ? g.edge(e).p : Rational(1) - g.edge(e).p;
  return w;
}

inline int components(const Graph& g, std::uint64_t omega) {
  std::vector<int> label(g.num_vertices(), -1);
  int count = 0;
  for (int v = 0; v < g.num_vertices(); ++v) {
    if (label[v] >= 0) continue;
    std::vector<int> stack{v};
    label[v] = count;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int e = 0; e < g.num_edges(); ++e) {
        if (!open(omega, e)) continue;
        int a = g.edge(e).tail, b = g.edge(e).head;
        int other = a == u ? b : (b == u ? a : -1);
        if (other >= 0 && label[other] < 0) {
          label[other] = count;
          stack.push_back(other);
        }
      }
    }
    ++count;
  }
  return count;
}

inline Rational rcm_weight(const Graph& g, std::uint64_t omega, const Rational& q) {
  Rational w = product_weight(g, omega);
  for (int i = 0; i < components(g, omega); ++i) w *= q;
  return w;
}

// Probability of a predicate under the (unnormalized) weight function.
inline Rational prob(const Graph& g, const std::function<Rational(std::uint64_t)>& weight,
                     const std::function<bool(std::uint64_t)>& event) {
  Rational num = 0, den = 0;
  for (std::uint64_t w = 0; w < g.num_configs(); ++w) {
    Rational x = weight(w);
    den += x;
    if (event(w)) num += x;
  }
  return num / den;
}

// E[f g | cond] - E[f | cond] E[g | cond].
inline Rational cond_cov(const Graph& g, const std::function<Rational(std::uint64_t)>& weight,
                         const std::function<bool(std::uint64_t)>& cond, const std::function<Rational(std::uint64_t)>& f,
                         const std::function<Rational(std::uint64_t)>& h) {
  Rational z = 0, ef = 0, eh = 0, efh = 0;
  for (std::uint64_t w = 0; w < g.num_configs(); ++w) {
    if (!cond(w)) continue;
    Rational x = weight(w);
    z += x;
    ef += x * f(w);
    eh += x * h(w);
    efh += x * f(w) * h(w);
  }
  return efh / z - (ef / z) * (eh / z);
}

}  // namespace oracle
