#pragma once

#include <ccl/graph.hpp>
#include <ccl/order.hpp>
#include <ccl/rng.hpp>
#include <ccl/theorems.hpp>

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace ccl {

/// Site configurations are bit masks: bit x set means site x is infected.
using SiteConfig = std::uint64_t;

/// Finite contact process. A healthy site x becomes infected at rate
/// sum_y lambda(x, y) eta(y); an infected site x recovers at rate delta_x.
struct ContactSpec {
  std::vector<std::string> sites;
  std::vector<Rational> delta;
  std::vector<std::vector<Rational>> lambda;  // lambda[x][y]: y infects x
  SiteConfig eta0 = 0;

  int num_sites() const { return static_cast<int>(sites.size()); }
  int site(std::string_view name) const;
  SiteConfig site_set(const std::vector<std::string>& names) const;
  SiteConfig all_sites() const { return (SiteConfig{1} << num_sites()) - 1; }
};

inline constexpr int kContactMaxSites = 10;

/// Checks lengths, nonnegative rates, lambda(x, x) = 0 and the site budget.
void validate(const ContactSpec& spec, int max_sites = kContactMaxSites);

/// {"sites": [...], "delta": "1" | {"x": "1", ...},
///  "lambda": [{"to": x, "from": y, "rate": "1"}, ...],
///  "symmetric": false, "eta0": "all" | [names]}
/// Rates are rational strings or JSON numbers. With "symmetric" every listed
/// rate is also applied in the reverse direction.
ContactSpec contact_from_json(const nlohmann::json& j);
nlohmann::json contact_to_json(const ContactSpec& spec);
ContactSpec load_contact(const std::string& path);

/// Nearest-neighbour path x1 - x2 - ... - xn, both directions at rate
/// lambda, started from all infected.
ContactSpec contact_path(int n, const Rational& delta, const Rational& lambda);

/// Off-diagonal rates of the generator; the diagonal is minus the row sum.
struct RateMatrix {
  int sites = 0;
  std::vector<std::vector<std::pair<SiteConfig, Rational>>> rows;
  std::vector<Rational> exit;

  std::size_t num_states() const { return rows.size(); }
};

RateMatrix build_generator(const ContactSpec& spec, int max_sites = kContactMaxSites);

/// Law of eta_t. truncation_bound bounds the total mass dropped from the
/// Poisson series, hence the L1 error before floating-point rounding.
struct CtmcDistribution {
  double t = 0;
  int sites = 0;
  std::vector<double> p;
  double rate = 0;  // uniformization rate
  int terms = 0;
  double truncation_bound = 0;

  /// P(eta_t is 0 on every site of m).
  double vacant(SiteConfig m) const;
  /// P(eta_t(x) = 1).
  double infected(int x) const;
  /// Absolute error bound on a single event probability, rounding included.
  double error_bound() const;
};

inline constexpr double kTruncationTarget = 1e-12;

CtmcDistribution transient_distribution(const ContactSpec& spec, double t, double tail = kTruncationTarget,
                                        int max_sites = kContactMaxSites);

nlohmann::json distribution_to_json(const ContactSpec& spec, const CtmcDistribution& d);

// --- association at finite times ---------------------------------------------

struct ContactAssociation {
  double t = 0;
  SiteConfig w = 0;
  bool condition_on_infected = false;  // {eta_t = 1 on W} instead of {eta_t = 0 on W}
  double conditioning_probability = 0;
  std::vector<int> free_sites;
  double tol = 0;
  AssociationVerdict<double> verdict;

  bool holds() const { return verdict.holds; }
};

/// Conditions eta_t on {eta_t = 0 on W} and checks positive association of
/// (eta_t(x): x not in W) over up-sets; exhaustive for at most four free
/// sites unless opt asks otherwise. The tolerance comes from the
/// distribution's error bound.
ContactAssociation check_thm_contact(const ContactSpec& spec, double t, SiteConfig w,
                                     AssociationOptions<double> opt = {});

/// The same check given {eta_t = 1 on W}, where association is not claimed.
ContactAssociation check_contact_given_infected(const ContactSpec& spec, double t, SiteConfig w,
                                                AssociationOptions<double> opt = {});

nlohmann::json association_to_json(const ContactSpec& spec, const ContactAssociation& a);

struct FiniteTimeSide {
  double lhs = 0;
  double rhs = 0;
  double slack = 0;  // rhs - lhs
  double tol = 0;
  bool holds = false;
  bool equality = false;
};

/// Finite-time versions of the two correlation statements built on the
/// vacancy function nu_t(M) = P(eta_t = 0 on M):
///   conditional: nu_t(A B | 0 on W) >= nu_t(A | 0 on W) nu_t(B | 0 on W)
///                for events A, B both increasing or both decreasing in
///                the free coordinates;
///   vacancy:     nu_t(K cap L) nu_t(K cup L) >= nu_t(K) nu_t(L).
/// The stationary law on a finite site set is the point mass at all-healthy,
/// where both vacancy sides equal 1; that pair is reported as well.
struct FiniteTimeCorrelations {
  double t = 0;
  FiniteTimeSide conditional;
  FiniteTimeSide vacancy;
  double stationary_lhs = 1;
  double stationary_rhs = 1;
  bool ok() const { return conditional.holds && vacancy.holds; }
};

/// A and B are events on {0,1}^sites. HypothesisError unless both are
/// increasing or both decreasing under single-site flips off W.
FiniteTimeCorrelations check_finite_time_correlations(const ContactSpec& spec, double t, SiteConfig k, SiteConfig l,
                                                      SiteConfig w, const Event& a, const Event& b);

nlohmann::json correlations_to_json(const FiniteTimeCorrelations& c);

/// P(eta_t(x) = 1) on a grid of times; from all-infected these should not
/// increase. Returns the first (site, time index) where one does, if any.
struct TimeMonotonicity {
  std::vector<double> times;
  std::vector<std::vector<double>> infected;  // [time][site]
  bool nonincreasing = true;
  std::optional<std::pair<int, int>> witness;
};

TimeMonotonicity check_monotone_in_time(const ContactSpec& spec, const std::vector<double>& times);

// --- space-time discretization ------------------------------------------------

struct SpaceTimeEdge {
  int from_site = 0;
  int to_site = 0;
  int layer = 0;  // from (from_site, layer) to (to_site, layer + 1)
  bool vertical = false;
  double p = 0;
};

/// Layered digraph on (site, k), k = 0..layers. Vertical edges survive with
/// probability exp(-delta dt); infection edges open with probability
/// 1 - exp(-lambda dt). Edges with p = 0 are omitted.
struct SpaceTimeGraph {
  int sites = 0;
  int layers = 0;
  double t = 0;
  double dt = 0;
  std::vector<std::string> site_names;
  SiteConfig sources = 0;  // infected sites at layer 0
  std::vector<SpaceTimeEdge> edges;

  int vertex(int site, int layer) const { return layer * sites + site; }
  /// The digraph with each p rounded to a multiple of 2^-30. UnsupportedOperation
  /// if some rounded p is 0 or 1 or the edge count passes the cap.
  Graph graph(int edge_cap = Graph::kDefaultEdgeCap) const;
};

SpaceTimeGraph discretize(const ContactSpec& spec, double t, int layers);

/// P((x, layers) reachable from the layer-0 sources), per site. The transfer
/// method propagates the law of the infected set layer by layer; the
/// enumeration method runs over every edge configuration (edge cap applies).
enum class ReachMethod { Transfer, Enumeration };
std::vector<double> layer_marginals(const SpaceTimeGraph& g, ReachMethod method = ReachMethod::Transfer,
                                    int edge_cap = Graph::kDefaultEdgeCap);

struct DiscretizationRow {
  int layers = 0;
  double dt = 0;
  std::vector<double> marginals;
  double error = 0;  // max over sites of |discrete - continuous|
};

struct DiscretizationReport {
  double t = 0;
  std::vector<double> exact;
  std::vector<DiscretizationRow> rows;
  std::vector<double> ratios;  // error(n) / error(2n) for consecutive rows
  bool first_order = false;    // every ratio in [1.5, 3]
};

/// Schedule entries must double from one to the next.
DiscretizationReport check_discretization(const ContactSpec& spec, double t, const std::vector<int>& schedule,
                                          ReachMethod method = ReachMethod::Transfer);

nlohmann::json discretization_to_json(const DiscretizationReport& r);

struct DiscreteAssociation {
  SiteConfig w = 0;
  int edges = 0;
  Rational conditioning_probability;
  AssociationVerdict<Rational> verdict;
  std::vector<Report> pair_reports;  // T3.3 on 1{s -> (x, n)}, 1{s -> (y, n)}
  bool pair_reports_hold = true;
  bool holds() const { return verdict.holds && pair_reports_hold; }
};

/// Layer-0 sources merged into one vertex s; conditions on {s -/-> (w, n)}
/// for w in W and checks the reachability indicators of the other top-layer
/// sites, both through their exact joint law and through the T3.3 checker.
DiscreteAssociation check_discrete_association(const SpaceTimeGraph& g, SiteConfig w);

nlohmann::json discrete_association_to_json(const SpaceTimeGraph& g, const DiscreteAssociation& a);

// --- random instances -------------------------------------------------------

/// Up to max_sites sites, delta from {1/2, 1, 2}, lambda from {0, 1/2, 1, 2}
/// on a random set of ordered pairs, eta0 nonzero.
ContactSpec random_contact(Rng& rng, int max_sites = 4);

struct ContactFuzzSummary {
  int instances = 0;
  int holds = 0;
  int violations = 0;
  int skipped = 0;  // conditioning event of probability zero
  bool condition_on_infected = false;
  double min_covariance = 0;
  std::vector<nlohmann::json> witnesses;  // at most 10

  bool clean() const { return violations == 0; }
};

/// Random specs, t from {1/2, 1, 2} and random W. With condition_on_infected
/// the campaign looks for failures given {eta_t = 1 on W}; finding one shows
/// the checker can tell the two conditionings apart.
ContactFuzzSummary run_contact_campaign(std::uint64_t seed, int instances, bool condition_on_infected = false,
                                        int max_sites = 4);

nlohmann::json contact_summary_to_json(const ContactFuzzSummary& s);

}  // namespace ccl
