#pragma once

#include <ccl/configs.hpp>
#include <ccl/error.hpp>
#include <ccl/event.hpp>
#include <ccl/maxflow.hpp>
#include <ccl/measure.hpp>
#include <ccl/rational.hpp>
#include <ccl/rng.hpp>

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ccl {

namespace detail {
template <class T>
bool leq(const T& a, const T& b, const T& tol) {
  return a <= b + tol;
}
inline bool below_eq(std::uint64_t a, std::uint64_t b) { return (a & ~b) == 0; }
}  // namespace detail

/// An event closed upward in the coordinatewise order.
class UpSet {
 public:
  explicit UpSet(Event e) : event_(std::move(e)) {
    if (!event_.is_increasing()) throw InputError("event is not increasing: " + event_.provenance());
  }
  static UpSet closure_of(const Event& e) { return UpSet(e.up_closure()); }
  const Event& event() const { return event_; }
  bool contains(std::uint64_t x) const { return event_.contains(x); }

 private:
  Event event_;
};

/// Minimal elements of an up-set.
std::vector<std::uint64_t> minimal_elements(const Event& up);

/// {x : x >= a for some generator a}.
Event upset_from_generators(int dims, std::span<const std::uint64_t> generators);

/// Every up-set of {0,1}^k (k <= 5), built from pairs f0 <= f1 of up-sets on
/// k-1 coordinates. Counts are the Dedekind numbers 2, 3, 6, 20, 168, 7581.
const std::vector<Event>& all_upsets(int k);

// ---------------------------------------------------------------- lattice

enum class LatticeMode { Auto, TwoCoordinate, Full };

struct LatticeVerdict {
  bool holds = true;
  std::optional<std::pair<std::uint64_t, std::uint64_t>> witness;
  LatticeMode mode_used = LatticeMode::Full;
  std::uint64_t pairs_checked = 0;
};

/// mu(s)mu(t) <= mu(s meet t)mu(s join t) for all s, t. Auto uses the
/// two-coordinate reduction when the support is a face of the cube (all
/// points agreeing with the a.s.-constant coordinates) and the full pair
/// scan otherwise; the reduction is only sound on such supports.
template <class T>
LatticeVerdict check_lattice_condition(int dims, std::span<const T> mu, LatticeMode mode = LatticeMode::Auto,
                                       const T& tol = T(0)) {
  const std::uint64_t n = std::uint64_t{1} << dims;
  if (mu.size() != n) throw InputError("measure length must be 2^dims");
  std::uint64_t and_all = n - 1, or_all = 0, support = 0;
  for (std::uint64_t x = 0; x < n; ++x)
    if (mu[x] > 0) {
      and_all &= x;
      or_all |= x;
      ++support;
    }
  const std::uint64_t free = or_all & ~and_all;
  if (mode == LatticeMode::Auto)
    mode = support == (std::uint64_t{1} << std::popcount(free)) ? LatticeMode::TwoCoordinate : LatticeMode::Full;
  else if (mode == LatticeMode::TwoCoordinate && support != (std::uint64_t{1} << std::popcount(free)))
    throw HypothesisError("two-coordinate reduction needs a support that is a face of the cube");

  LatticeVerdict v;
  v.mode_used = mode;
  if (mode == LatticeMode::TwoCoordinate) {
    // Walk the face: base points are and_all plus a subset of the free bits.
    for (std::uint64_t sub = 0;; sub = (sub - free) & free) {
      const std::uint64_t xi = and_all | sub;
      const std::uint64_t open = free & ~sub;
      for (int i = 0; i < dims; ++i) {
        const std::uint64_t bi = std::uint64_t{1} << i;
        if (!(open & bi)) continue;
        for (int j = i + 1; j < dims; ++j) {
          const std::uint64_t bj = std::uint64_t{1} << j;
          if (!(open & bj)) continue;
          ++v.pairs_checked;
          if (!detail::leq<T>(mu[xi | bi] * mu[xi | bj], mu[xi] * mu[xi | bi | bj], tol)) {
            v.holds = false;
            v.witness = std::make_pair(xi | bi, xi | bj);
            return v;
          }
        }
      }
      if (sub == free) break;
    }
    return v;
  }
  for (std::uint64_t s = 0; s < n; ++s) {
    if (!(mu[s] > 0)) continue;
    for (std::uint64_t t = s + 1; t < n; ++t) {
      if (detail::below_eq(s, t) || detail::below_eq(t, s) || !(mu[t] > 0)) continue;
      ++v.pairs_checked;
      if (!detail::leq<T>(mu[s] * mu[t], mu[s & t] * mu[s | t], tol)) {
        v.holds = false;
        v.witness = std::make_pair(s, t);
        return v;
      }
    }
  }
  return v;
}

template <class T>
LatticeVerdict check_lattice_condition(const Measure<T>& mu, LatticeMode mode = LatticeMode::Auto,
                                       const T& tol = T(0)) {
  return check_lattice_condition<T>(mu.dims(), mu.weights(), mode, tol);
}

// ---------------------------------------------------------- four functions

struct FourFunctionsVerdict {
  bool holds = true;
  bool equality_everywhere = true;
  std::optional<std::pair<std::uint64_t, std::uint64_t>> witness;
};

/// alpha(a)beta(b) <= gamma(a join b)delta(a meet b) for all a, b.
template <class T>
FourFunctionsVerdict check_ad_hypothesis(int dims, std::span<const T> alpha, std::span<const T> beta,
                                         std::span<const T> gamma, std::span<const T> delta, const T& tol = T(0)) {
  const std::uint64_t n = std::uint64_t{1} << dims;
  if (alpha.size() != n || beta.size() != n || gamma.size() != n || delta.size() != n)
    throw InputError("four functions must share the configuration space");
  if (dims > 12) throw BudgetError("four-functions check is limited to 12 coordinates");
  for (std::uint64_t k = 0; k < n; ++k)
    if (alpha[k] < 0 || beta[k] < 0 || gamma[k] < 0 || delta[k] < 0)
      throw InputError("four-functions inputs must be nonnegative");
  FourFunctionsVerdict v;
  for (std::uint64_t a = 0; a < n; ++a)
    for (std::uint64_t b = 0; b < n; ++b) {
      T lhs = alpha[a] * beta[b];
      T rhs = gamma[a | b] * delta[a & b];
      if (!detail::leq<T>(lhs, rhs, tol)) {
        v.holds = false;
        v.equality_everywhere = false;
        v.witness = std::make_pair(a, b);
        return v;
      }
      if (lhs != rhs) v.equality_everywhere = false;
    }
  return v;
}

// ------------------------------------------------- positive association

/// A law on {0,1}^dims (dims <= 64) given by its atoms.
template <class T>
struct SparseLaw {
  int dims = 0;
  std::vector<std::pair<std::uint64_t, T>> atoms;

  static SparseLaw dense(int dims, std::span<const T> mu) {
    SparseLaw law{dims, {}};
    for (std::uint64_t x = 0; x < mu.size(); ++x)
      if (mu[x] > 0) law.atoms.emplace_back(x, mu[x]);
    return law;
  }
};

/// Removes a.s.-constant coordinates and coordinates that a.s. duplicate an
/// earlier one; positive association is unchanged by this projection.
template <class T>
struct Projection {
  std::vector<int> coords;  // surviving original coordinates, in order
  SparseLaw<T> law;         // pushforward onto {0,1}^coords.size()

  std::uint64_t project(std::uint64_t x) const {
    std::uint64_t y = 0;
    for (std::size_t i = 0; i < coords.size(); ++i)
      if ((x >> coords[i]) & 1u) y |= std::uint64_t{1} << i;
    return y;
  }
  std::uint64_t lift(std::uint64_t y) const {
    std::uint64_t x = 0;
    for (std::size_t i = 0; i < coords.size(); ++i)
      if ((y >> i) & 1u) x |= std::uint64_t{1} << coords[i];
    return x;
  }
};

template <class T>
Projection<T> project_effective(const SparseLaw<T>& law) {
  Projection<T> p;
  auto column = [&](int i) {
    std::vector<bool> c;
    c.reserve(law.atoms.size());
    for (const auto& [x, w] : law.atoms) c.push_back((x >> i) & 1u);
    return c;
  };
  std::vector<std::vector<bool>> kept;
  for (int i = 0; i < law.dims; ++i) {
    auto c = column(i);
    bool constant = std::all_of(c.begin(), c.end(), [&](bool b) { return b == c.front(); });
    if (c.empty() || constant) continue;
    if (std::find(kept.begin(), kept.end(), c) != kept.end()) continue;
    kept.push_back(std::move(c));
    p.coords.push_back(i);
  }
  p.law.dims = static_cast<int>(p.coords.size());
  std::map<std::uint64_t, T> merged;
  for (const auto& [x, w] : law.atoms) {
    auto [it, inserted] = merged.try_emplace(p.project(x), w);
    if (!inserted) it->second += w;
  }
  p.law.atoms.assign(merged.begin(), merged.end());
  return p;
}

enum class AssociationStrategy { Exhaustive, Sampled, Supplied };

const char* to_string(AssociationStrategy s);

template <class T>
struct AssociationOptions {
  AssociationStrategy strategy = AssociationStrategy::Exhaustive;
  int max_exhaustive_coords = 4;  // 5 is allowed when explicitly requested
  int samples = 64;
  std::uint64_t seed = 1;
  std::vector<RealFunction> family;  // Supplied: all increasing or all decreasing
  T tol = T(0);
};

template <class T>
struct AssociationVerdict {
  bool holds = true;
  bool proof = false;  // true only for an exhaustive pass
  AssociationStrategy strategy = AssociationStrategy::Exhaustive;
  std::vector<int> coords;
  std::size_t sets = 0;
  std::size_t pairs_checked = 0;
  std::uint64_t seed = 0;
  T min_covariance = T(0);
  // Up-set witnesses as minimal elements in the original coordinates; for
  // the supplied strategy, indices into the family.
  std::optional<std::pair<std::vector<std::uint64_t>, std::vector<std::uint64_t>>> witness;
  std::optional<std::pair<std::size_t, std::size_t>> family_witness;
  T witness_covariance = T(0);
};

namespace detail {

struct AtomMask {
  std::vector<std::uint64_t> words;
};

template <class T>
T mass_of(const AtomMask& m, const std::vector<T>& w) {
  T s(0);
  for (std::size_t k = 0; k < m.words.size(); ++k)
    for (std::uint64_t b = m.words[k]; b; b &= b - 1) s += w[64 * k + std::countr_zero(b)];
  return s;
}

template <class T>
T mass_of_meet(const AtomMask& a, const AtomMask& b, const std::vector<T>& w) {
  T s(0);
  for (std::size_t k = 0; k < a.words.size(); ++k)
    for (std::uint64_t bits = a.words[k] & b.words[k]; bits; bits &= bits - 1)
      s += w[64 * k + std::countr_zero(bits)];
  return s;
}

// Random antichain over k coordinates: draw small random points, keep those
// incomparable with everything kept so far.
inline std::vector<std::uint64_t> random_antichain(int k, Rng& rng) {
  std::vector<std::uint64_t> chain;
  const int draws = 1 + static_cast<int>(rng.below(3));
  for (int d = 0; d < draws; ++d) {
    const int size = 1 + static_cast<int>(rng.below(std::min(k, 4)));
    std::uint64_t x = 0;
    while (std::popcount(x) < size) x |= std::uint64_t{1} << rng.below(k);
    bool comparable = false;
    for (auto a : chain)
      if (below_eq(a, x) || below_eq(x, a)) comparable = true;
    if (!comparable) chain.push_back(x);
  }
  std::sort(chain.begin(), chain.end());
  return chain;
}

}  // namespace detail

/// Positive association of the coordinate variables under `law`: every pair
/// of increasing events has nonnegative covariance. Exhaustive runs over all
/// up-sets of the effective coordinates and is a proof; Sampled covers the
/// single-coordinate up-sets plus `samples` random up-sets and is evidence.
template <class T>
AssociationVerdict<T> check_positive_association(const SparseLaw<T>& law, const AssociationOptions<T>& opt = {}) {
  AssociationVerdict<T> v;
  v.strategy = opt.strategy;
  v.seed = opt.seed;
  if (opt.strategy == AssociationStrategy::Supplied)
    throw InputError("supplied families need the dense overload of check_positive_association");
  auto proj = project_effective(law);
  v.coords = proj.coords;
  const int k = proj.law.dims;
  const auto& atoms = proj.law.atoms;
  std::vector<T> w;
  for (const auto& a : atoms) w.push_back(a.second);
  T total(0);
  for (const auto& x : w) total += x;
  if (!(total > 0)) throw ZeroProbabilityError("law has no mass");
  for (auto& x : w) x /= total;

  struct Candidate {
    std::vector<std::uint64_t> generators;  // projected coordinates
    detail::AtomMask mask;
    T mass;
  };
  std::vector<Candidate> sets;
  auto add = [&](std::vector<std::uint64_t> gens, auto&& member) {
    Candidate c{std::move(gens), {std::vector<std::uint64_t>((atoms.size() + 63) / 64, 0)}, T(0)};
    for (std::size_t a = 0; a < atoms.size(); ++a)
      if (member(atoms[a].first)) c.mask.words[a / 64] |= std::uint64_t{1} << (a % 64);
    c.mass = detail::mass_of(c.mask, w);
    // Up-sets of mass 0 or 1 have zero covariance with everything.
    if (c.mass > 0 && c.mass < 1) sets.push_back(std::move(c));
  };

  if (opt.strategy == AssociationStrategy::Exhaustive) {
    if (k > opt.max_exhaustive_coords || k > 5)
      throw BudgetError("exhaustive positive association needs at most " + std::to_string(opt.max_exhaustive_coords) +
                        " effective coordinates, found " + std::to_string(k));
    for (const Event& u : all_upsets(k)) add(minimal_elements(u), [&](std::uint64_t y) { return u.contains(y); });
  } else {
    if (k > 64) throw BudgetError("too many coordinates");
    for (int i = 0; i < k; ++i)
      add({std::uint64_t{1} << i}, [&](std::uint64_t y) { return ((y >> i) & 1u) != 0; });
    Rng rng(opt.seed);
    for (int s = 0; s < opt.samples && k > 0; ++s) {
      auto gens = detail::random_antichain(k, rng);
      add(gens, [&](std::uint64_t y) {
        for (auto a : gens)
          if (detail::below_eq(a, y)) return true;
        return false;
      });
    }
  }
  v.sets = sets.size();
  bool first = true;
  for (std::size_t i = 0; i < sets.size(); ++i)
    for (std::size_t j = i; j < sets.size(); ++j) {
      ++v.pairs_checked;
      T cov = detail::mass_of_meet(sets[i].mask, sets[j].mask, w) - sets[i].mass * sets[j].mass;
      if (first || cov < v.min_covariance) v.min_covariance = cov;
      first = false;
      if (cov + opt.tol < 0) {
        v.holds = false;
        auto lift = [&](const std::vector<std::uint64_t>& gens) {
          std::vector<std::uint64_t> out;
          for (auto g : gens) out.push_back(proj.lift(g));
          return out;
        };
        auto first_gens = lift(sets[i].generators), second_gens = lift(sets[j].generators);
        if (second_gens < first_gens) std::swap(first_gens, second_gens);
        v.witness = std::make_pair(std::move(first_gens), std::move(second_gens));
        v.witness_covariance = cov;
        return v;
      }
    }
  v.proof = opt.strategy == AssociationStrategy::Exhaustive;
  return v;
}

bool function_is_increasing(const RealFunction& f);
bool function_is_decreasing(const RealFunction& f);

template <class T>
AssociationVerdict<T> check_positive_association(int dims, std::span<const T> mu, const AssociationOptions<T>& opt = {}) {
  if (mu.size() != (std::uint64_t{1} << dims)) throw InputError("measure length must be 2^dims");
  if (opt.strategy != AssociationStrategy::Supplied)
    return check_positive_association(SparseLaw<T>::dense(dims, mu), opt);
  AssociationVerdict<T> v;
  v.strategy = opt.strategy;
  const auto& fam = opt.family;
  bool inc = std::all_of(fam.begin(), fam.end(), [](const RealFunction& f) { return function_is_increasing(f); });
  bool dec = std::all_of(fam.begin(), fam.end(), [](const RealFunction& f) { return function_is_decreasing(f); });
  if (!inc && !dec) throw HypothesisError("supplied family must be all increasing or all decreasing");
  for (const auto& f : fam)
    if (f.dims() != dims) throw InputError("supplied function has the wrong dimension");
  std::vector<T> ef;
  for (const auto& f : fam) {
    T e(0);
    for (std::uint64_t x = 0; x < mu.size(); ++x)
      if (mu[x] > 0) e += mu[x] * scalar_from<T>(f[x]);
    ef.push_back(e);
  }
  v.sets = fam.size();
  bool first = true;
  for (std::size_t i = 0; i < fam.size(); ++i)
    for (std::size_t j = i; j < fam.size(); ++j) {
      ++v.pairs_checked;
      T efg(0);
      for (std::uint64_t x = 0; x < mu.size(); ++x)
        if (mu[x] > 0) efg += mu[x] * scalar_from<T>(fam[i][x]) * scalar_from<T>(fam[j][x]);
      T cov = efg - ef[i] * ef[j];
      if (first || cov < v.min_covariance) v.min_covariance = cov;
      first = false;
      if (cov + opt.tol < 0) {
        v.holds = false;
        v.family_witness = std::make_pair(i, j);
        v.witness_covariance = cov;
        return v;
      }
    }
  return v;
}

template <class T>
AssociationVerdict<T> check_positive_association(const Measure<T>& mu, const AssociationOptions<T>& opt = {}) {
  return check_positive_association<T>(mu.dims(), mu.weights(), opt);
}

// ------------------------------------------------------------- dominance

template <class T>
struct CouplingAtom {
  std::uint64_t lower;  // drawn from the dominated law
  std::uint64_t upper;  // drawn from the dominating law
  T mass;
};

template <class T>
struct DominanceVerdict {
  bool holds = true;
  T flow = T(0);
  std::vector<CouplingAtom<T>> coupling;
  std::optional<Event> violating_upset;
  T upper_mass = T(0);  // nu(U) on the violating up-set
  T lower_mass = T(0);  // nu'(U)
};

/// Decides nu dominates nu' (nu(f) >= nu'(f) for increasing f) by a
/// transportation problem: source -> x with capacity nu'(x), x -> y for
/// x <= y with capacity 2, y -> sink with capacity nu(y). Dominance holds iff
/// the maximum flow carries all the mass. Otherwise the x-nodes on the source
/// side of the minimum cut generate an up-set U with nu(U) < nu'(U).
template <class T>
DominanceVerdict<T> check_dominance(int dims, std::span<const T> nu, std::span<const T> nu_prime,
                                    const T& tol = T(0)) {
  const std::uint64_t n = std::uint64_t{1} << dims;
  if (nu.size() != n || nu_prime.size() != n) throw InputError("dominance inputs live on different spaces");
  if (dims > 20) throw BudgetError("dominance check is limited to 20 coordinates");
  T m1(0), m2(0);
  for (std::uint64_t x = 0; x < n; ++x) {
    if (nu[x] < 0 || nu_prime[x] < 0) throw InputError("negative probability");
    m1 += nu[x];
    m2 += nu_prime[x];
  }
  if (!detail::leq<T>(m1, m2, tol) || !detail::leq<T>(m2, m1, tol))
    throw InputError("dominance inputs have different total mass");

  std::vector<std::uint64_t> lows, highs;
  for (std::uint64_t x = 0; x < n; ++x) {
    if (nu_prime[x] > 0) lows.push_back(x);
    if (nu[x] > 0) highs.push_back(x);
  }
  const int source = 0, sink = 1;
  const int base_low = 2, base_high = 2 + static_cast<int>(lows.size());
  FlowNetwork<T> net(base_high + static_cast<int>(highs.size()));
  for (std::size_t i = 0; i < lows.size(); ++i) net.add_arc(source, base_low + i, nu_prime[lows[i]]);
  for (std::size_t j = 0; j < highs.size(); ++j) net.add_arc(base_high + j, sink, nu[highs[j]]);
  std::vector<std::vector<std::pair<std::size_t, int>>> middle(lows.size());
  for (std::size_t i = 0; i < lows.size(); ++i)
    for (std::size_t j = 0; j < highs.size(); ++j)
      if (detail::below_eq(lows[i], highs[j]))
        middle[i].emplace_back(j, net.add_arc(base_low + i, base_high + j, T(2) * m2));

  DominanceVerdict<T> v;
  v.flow = net.max_flow(source, sink, tol);
  v.holds = detail::leq<T>(m2, v.flow, tol);
  if (v.holds) {
    for (std::size_t i = 0; i < lows.size(); ++i)
      for (const auto& [j, pos] : middle[i]) {
        const T& f = net.flow_on(base_low + i, pos);
        if (f > tol) v.coupling.push_back({lows[i], highs[j], f});
      }
    return v;
  }
  auto side = net.residual_reachable(source);
  std::vector<std::uint64_t> gens;
  for (std::size_t i = 0; i < lows.size(); ++i)
    if (side[base_low + i]) gens.push_back(lows[i]);
  Event u = upset_from_generators(dims, gens);
  u.set_provenance("violating up-set");
  for (std::uint64_t x = 0; x < n; ++x)
    if (u.contains(x)) {
      v.upper_mass += nu[x];
      v.lower_mass += nu_prime[x];
    }
  if (!(v.lower_mass > v.upper_mass + tol)) throw InternalError("min-cut did not produce a violating up-set");
  v.violating_upset = std::move(u);
  return v;
}

template <class T>
DominanceVerdict<T> check_dominance(const Measure<T>& nu, const Measure<T>& nu_prime, const T& tol = T(0)) {
  if (nu.dims() != nu_prime.dims()) throw InputError("dominance inputs live on different spaces");
  return check_dominance<T>(nu.dims(), nu.weights(), nu_prime.weights(), tol);
}

/// Up-set enumeration: the first up-set U with nu(U) < nu'(U), if any.
template <class T>
std::optional<Event> dominance_counterexample_by_upsets(int dims, std::span<const T> nu, std::span<const T> nu_prime,
                                                        const T& tol = T(0)) {
  if (dims > 5) throw BudgetError("up-set enumeration is limited to 5 coordinates");
  for (const Event& u : all_upsets(dims)) {
    T a(0), b(0);
    for (std::uint64_t x = 0; x < u.size(); ++x)
      if (u.contains(x)) {
        a += nu[x];
        b += nu_prime[x];
      }
    if (b > a + tol) return u;
  }
  return std::nullopt;
}

// ------------------------------------------------- conditional shift

template <class T>
struct ShiftVerdict {
  bool holds = true;
  bool equality = false;
  DominanceVerdict<T> dominance;
  std::vector<T> lhs;  // Pr(e in C_T | C_S = F) per edge
  std::vector<T> rhs;  // Pr(e in C_T | C_S = F')
};

/// Law of C_T (as a point of {0,1}^E) given C_S = F.
template <class T>
std::vector<T> cluster_law_given(const Measure<T>& phi, VertexSet s, VertexSet t, EdgeSet f) {
  const Graph& g = phi.graph();
  auto ts = cluster_table(g, s);
  auto tt = cluster_table(g, t);
  std::vector<T> law(g.num_configs(), T(0));
  T mass(0);
  for (std::uint64_t x = 0; x < g.num_configs(); ++x)
    if (ts.cluster[x] == f && phi[x] > 0) {
      law[tt.cluster[x].bits] += phi[x];
      mass += phi[x];
    }
  if (!(mass > 0)) throw ZeroProbabilityError("cluster value " + describe(g, f) + " has probability zero");
  for (auto& x : law) x /= mass;
  return law;
}

/// For F subset of F', the law of C_T given C_S = F dominates its law given
/// C_S = F': phi(h | C_S = F) >= phi(h | C_S = F') for every increasing
/// function h of C_T. T must avoid S and every vertex of F'.
template <class T>
ShiftVerdict<T> check_conditional_monotone_shift(const Measure<T>& phi, VertexSet s, VertexSet t, EdgeSet f,
                                                 EdgeSet f_prime, const T& tol = T(0)) {
  const Graph& g = phi.graph();
  if (!f.subset_of(f_prime)) throw InputError("cluster values must satisfy F subset of F'");
  if (g.directedness() != Directedness::Undirected)
    throw UnsupportedOperation("conditional shift is stated for undirected graphs");
  if (t.intersects(s | vertex_support(g, f_prime)))
    throw HypothesisError("T must avoid S and the vertices of F'");
  auto lo = cluster_law_given(phi, s, t, f);
  auto hi = cluster_law_given(phi, s, t, f_prime);
  ShiftVerdict<T> v;
  v.dominance = check_dominance<T>(g.num_edges(), lo, hi, tol);
  v.holds = v.dominance.holds;
  v.equality = lo == hi;
  for (int e = 0; e < g.num_edges(); ++e) {
    T a(0), b(0);
    for (std::uint64_t x = 0; x < lo.size(); ++x)
      if ((x >> e) & 1u) {
        a += lo[x];
        b += hi[x];
      }
    v.lhs.push_back(a);
    v.rhs.push_back(b);
  }
  return v;
}

// ----------------------------------------------------------------- LPA

/// Joint law of (W, Z) with W in the low `a` bits and Z in the next `b` bits.
template <class T>
struct LpaReport {
  bool w_associated = false;
  bool z_conditionally_associated = false;
  bool monotone_conditionals = false;
  std::optional<std::pair<std::uint64_t, std::uint64_t>> dominance_witness;  // (w, w') with w <= w'
  bool hypotheses() const { return w_associated && z_conditionally_associated && monotone_conditionals; }
  AssociationVerdict<T> conclusion;
};

template <class T>
LpaReport<T> check_lpa(int a, int b, std::span<const T> psi, const AssociationOptions<T>& opt = {}) {
  const int dims = a + b;
  if (psi.size() != (std::uint64_t{1} << dims)) throw InputError("joint law length must be 2^(a+b)");
  const std::uint64_t nw = std::uint64_t{1} << a, nz = std::uint64_t{1} << b;
  LpaReport<T> r;
  std::vector<T> wlaw(nw, T(0));
  std::vector<std::vector<T>> cond(nw, std::vector<T>(nz, T(0)));
  for (std::uint64_t x = 0; x < psi.size(); ++x) {
    wlaw[x & (nw - 1)] += psi[x];
    cond[x & (nw - 1)][x >> a] += psi[x];
  }
  r.w_associated = check_positive_association<T>(a, wlaw, opt).holds;
  r.z_conditionally_associated = true;
  for (std::uint64_t w = 0; w < nw; ++w) {
    if (!(wlaw[w] > 0)) continue;
    for (auto& x : cond[w]) x /= wlaw[w];
    if (!check_positive_association<T>(b, cond[w], opt).holds) r.z_conditionally_associated = false;
  }
  r.monotone_conditionals = true;
  for (std::uint64_t w = 0; w < nw && r.monotone_conditionals; ++w)
    for (std::uint64_t w2 = 0; w2 < nw; ++w2) {
      if (w == w2 || !detail::below_eq(w, w2) || !(wlaw[w] > 0) || !(wlaw[w2] > 0)) continue;
      if (!check_dominance<T>(b, cond[w2], cond[w], opt.tol).holds) {
        r.monotone_conditionals = false;
        r.dominance_witness = std::make_pair(w, w2);
        break;
      }
    }
  r.conclusion = check_positive_association<T>(dims, psi, opt);
  return r;
}

}  // namespace ccl
