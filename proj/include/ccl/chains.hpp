#pragma once

#include <ccl/graph.hpp>
#include <ccl/order.hpp>
#include <ccl/rng.hpp>

#include <json.hpp>

#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

namespace ccl {

/// A state (C_S, C_T) of the pair-of-clusters chain.
struct ClusterPairState {
  EdgeSet cs;
  EdgeSet ct;
  friend bool operator==(const ClusterPairState&, const ClusterPairState&) = default;
  friend auto operator<=>(const ClusterPairState&, const ClusterPairState&) = default;
};

using SparseRow = std::vector<std::pair<int, Rational>>;

/// Gibbs chain on pairs of clusters under phi_q conditioned on {S not-> T}.
/// One step resamples C_T given C_S, then C_S given C_T.
struct PairChain {
  Graph graph;
  VertexSet source;
  VertexSet target;
  Rational q;
  std::vector<ClusterPairState> states;  // sorted
  std::vector<Rational> stationary;      // the law of (C_S, C_T)
  std::vector<SparseRow> ct_update;      // (cs, ct) -> (cs, ct')
  std::vector<SparseRow> cs_update;      // (cs, ct) -> (cs', ct)
  std::vector<SparseRow> kernel;         // ct_update * cs_update

  /// Index of a state, or -1.
  int index_of(const ClusterPairState& s) const;
  /// (empty, empty); always a state.
  int empty_state() const;
};

/// Enumerates the state space and builds the exact kernel. Undirected graphs
/// only; S and T disjoint; throws ZeroProbabilityError when phi_q(S not-> T)
/// is 0 and BudgetError past max_states.
PairChain build_pair_chain(const Graph& g, VertexSet s, VertexSet t, const Rational& q, std::size_t max_states = 512);

struct ChainDiagnostics {
  std::size_t num_states = 0;
  bool rows_sum_to_one = false;
  Rational residual;  // max |(pi K)(y) - pi(y)|
  bool stationary = false;
  bool ct_update_fixes = false;
  bool cs_update_fixes = false;
  bool disjoint = false;  // V(C_S) and V(C_T) disjoint in every state
  bool irreducible = false;
  int period = 0;  // 0 when reducible
  bool aperiodic = false;
  int start = 0;
  std::vector<double> tv;  // tv[n] = TV(delta_start K^n, pi), n = 0..mixing_step
  int mixing_step = -1;    // first n with tv < target, -1 if not reached
  bool tv_nonincreasing = false;

  bool ok() const {
    return rows_sum_to_one && stationary && ct_update_fixes && cs_update_fixes && disjoint && irreducible && aperiodic &&
           tv_nonincreasing && mixing_step >= 0;
  }
};

ChainDiagnostics diagnose(const PairChain& chain, int start, int max_steps = 10000, double tv_target = 1e-6);

/// Row of the exact kernel.
const SparseRow& pair_step_distribution(const PairChain& chain, int state);
/// One sampled two-phase update.
int step_pair_chain(const PairChain& chain, int state, Rng& rng);

nlohmann::json state_to_json(const Graph& g, const ClusterPairState& s);
nlohmann::json diagnostics_to_json(const PairChain& chain, const ChainDiagnostics& d);

// --- indicator histories ------------------------------------------------------

/// Coordinate of X_e^i = 1{e not in C_T^i} (step i >= 1) in the indicator word;
/// Y_e^i = 1{e in C_S^i} sits m places later.
inline int x_coord(int m, int step, int e) { return (step - 1) * 2 * m + e; }
inline int y_coord(int m, int step, int e) { return (step - 1) * 2 * m + m + e; }

/// Indicator word of a trace of states 1..n (states[0] is the start).
std::uint64_t trace_indicators(const PairChain& chain, const std::vector<int>& states);

struct TraceAssociation {
  int steps = 0;
  int edges = 0;
  std::size_t histories = 0;
  SparseLaw<Rational> law;  // law of the indicator word
  AssociationVerdict<Rational> verdict;
  bool monotone_states = false;  // larger indicator words give larger C_S^n, smaller C_T^n
  bool holds() const { return verdict.holds && monotone_states; }
};

/// Exact law of the indicators X_e^i, Y_e^i for i = 1..n started from
/// (empty, empty), checked for positive association. n <= 3 and |E| <= 3.
/// An exhaustive request over too many effective coordinates falls back to
/// the sampled strategy.
TraceAssociation check_trace_association(const Graph& g, VertexSet s, VertexSet t, const Rational& q, int n,
                                         AssociationOptions<Rational> opt = {});

// --- configuration chain -----------------------------------------------------

/// Uniform variates driving the configuration chain: X_e^i and Y_e^i for
/// steps i = 1..steps, stored step-major.
struct DrivingNoise {
  std::uint64_t seed = 0;
  int edges = 0;
  int steps = 0;
  std::vector<double> x;
  std::vector<double> y;

  static DrivingNoise sample(std::uint64_t seed, int edges, int steps);
  double X(int step, int e) const { return x[(step - 1) * edges + e]; }
  double Y(int step, int e) const { return y[(step - 1) * edges + e]; }
};

/// The chain omega^0, omega^1, ... on {S not-> T}: tau^i is drawn from phi
/// given C_S = C_S(omega^{i-1}) edge by edge in canonical order with
/// tau_e = 1 iff X_e < alpha, then omega^i from phi given C_T = C_T(tau^i)
/// with omega_e = 1 iff Y_e > 1 - alpha. alpha = 0 and alpha = 1 force the
/// bit regardless of the variate.
class ConfigChain {
 public:
  ConfigChain(const Graph& g, VertexSet s, VertexSet t, const Rational& q);

  const Graph& graph() const { return graph_; }
  VertexSet source() const { return s_; }
  VertexSet target() const { return t_; }
  /// phi_q(. | S not-> T), dense over configurations.
  const std::vector<Rational>& target_law() const { return law_; }
  /// Configurations of positive target probability, ascending.
  const std::vector<Config>& support() const { return support_; }

  /// phi(tau_e = 1 | C_S = cs, tau agrees with prefix below e).
  const Rational& alpha_tau(EdgeSet cs, int e, Config prefix) const;
  /// phi(omega_e = 1 | C_T = ct, omega agrees with prefix below e).
  const Rational& alpha_omega(EdgeSet ct, int e, Config prefix) const;

  /// One update; x and y hold one variate per edge. Noise may be double or
  /// Rational; comparisons with alpha are exact.
  template <class N>
  Config step(Config omega, const N* x, const N* y) const;

  /// omega^0..omega^n; omega^0 must be in the support.
  std::vector<Config> run(Config omega0, const DrivingNoise& noise, int n) const;

  /// Law of tau under the threshold rule for uniform variates, i.e. the
  /// product of the sequential alphas; should equal phi(. | C_S = cs).
  std::map<Config, Rational> tau_law(EdgeSet cs) const;
  std::map<Config, Rational> omega_law(EdgeSet ct) const;

  /// Exact kernel over support(), built from tau_law and omega_law.
  std::vector<SparseRow> exact_kernel() const;

  /// Outcome of one phase for every grid setting of its m variates
  /// (value d / grid); index = sum of d_e (grid + 1)^e.
  void sweep(bool omega_phase, EdgeSet cluster, int grid, std::vector<Config>& out) const;

 private:
  Graph graph_;
  VertexSet s_, t_;
  std::vector<Rational> law_;
  std::vector<Config> support_;
  std::vector<EdgeSet> cs_of_, ct_of_;
  std::map<EdgeSet, std::vector<Config>> by_cs_, by_ct_;
  struct Alpha {
    Rational exact;
    double approx;
  };
  mutable std::unordered_map<std::uint64_t, Alpha> cache_;
  const Alpha& alpha(bool omega_phase, EdgeSet cluster, int e, Config prefix) const;
};

struct ConfigChainStationarity {
  std::size_t num_states = 0;
  bool rows_sum_to_one = false;
  bool laws_match = false;  // sequential alphas reproduce the cluster conditionals
  Rational residual;
  bool stationary = false;
  bool ok() const { return rows_sum_to_one && laws_match && stationary; }
};

ConfigChainStationarity check_config_chain_stationary(const ConfigChain& chain);

struct FrequencyTest {
  int samples = 0;
  int thin = 1;
  std::uint64_t seed = 0;
  struct Row {
    Config omega;
    Rational exact;
    int count = 0;
    double z = 0;
  };
  std::vector<Row> rows;
  double max_abs_z = 0;
  bool within_3_sigma = false;
};

/// Runs samples * thin steps from all-closed, recording every thin-th state,
/// and compares per-state frequencies with phi(. | S not-> T). thin = 0
/// picks the smallest lag at which every exact kernel row is within total
/// variation 0.01 of the target.
FrequencyTest config_chain_frequencies(const ConfigChain& chain, int samples, std::uint64_t seed, int thin = 0);

struct MonotonicityCheck {
  int steps = 0;
  int grid = 0;  // variates range over {0, 1/grid, ..., 1}
  std::size_t pairs_propagated = 0;
  bool omega_increasing = true;     // omega^n coordinatewise
  bool clusters_monotone = true;    // C_S(omega^n) up, C_T(omega^n) down
  std::optional<nlohmann::json> omega_witness;
  std::optional<nlohmann::json> cluster_witness;
};

/// Exhaustive over the noise grid: for every step i, edge e, variate X or
/// Y, and every setting of all other variates, compares omega^n before and
/// after raising that variate by one grid step. Both the coordinatewise
/// order on omega^n and the order on (C_S, C_T) used by pair-monotone
/// functions are checked. |E| <= 3, n <= 4.
MonotonicityCheck check_config_chain_monotone(const ConfigChain& chain, Config omega0, int n, int grid = 8);

nlohmann::json monotonicity_to_json(const MonotonicityCheck& m);

}  // namespace ccl
