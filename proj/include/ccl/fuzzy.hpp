#pragma once

#include <ccl/configs.hpp>
#include <ccl/graph.hpp>
#include <ccl/order.hpp>
#include <ccl/theorems.hpp>

#include <json.hpp>

#include <optional>
#include <vector>

namespace ccl {

/// sigma in {0,1}^V; bit v is the spin of vertex v.
using Spin = std::uint64_t;

struct FuzzyParams {
  Rational q;
  Rational alpha;
  Rational beta;
};

/// Checks alpha, beta > 0 and q = alpha + beta; InputError otherwise.
FuzzyParams fuzzy_params(const Rational& q, const Rational& alpha, const Rational& beta);

/// Exact joint law of (omega, sigma). rows[omega] lists the spins of
/// positive probability in increasing order.
struct Coupling {
  Graph graph;
  FuzzyParams params;
  std::vector<std::vector<std::pair<Spin, Rational>>> rows;

  Rational at(Config omega, Spin sigma) const;
  std::size_t cells() const;
};

/// Default cap on |V| for spin enumeration.
inline constexpr int kFuzzyMaxVertices = 12;

/// omega from phi_q, then each omega-component independently all 1 with
/// probability alpha/q, all 0 with probability beta/q.
Coupling build_coupling_forward(const Graph& g, const FuzzyParams& fp, int max_vertices = kFuzzyMaxVertices);

/// sigma from mu_{alpha,beta}, then omega closed on discordant edges and
/// drawn from phi_{G(1),alpha} x phi_{G(0),beta} on the induced subgraphs.
/// mu is computed from its closed form
///   mu(sigma) = prod_{discordant e} (1 - p_e) Z_{G(1),alpha} Z_{G(0),beta} / Z_{G,q}
/// and is not normalized afterwards, so the total mass is itself a check.
Coupling build_coupling_reverse(const Graph& g, const FuzzyParams& fp, int max_vertices = kFuzzyMaxVertices);

/// Law of sigma, dense over 2^|V| spins.
std::vector<Rational> marginal_spin(const Coupling& c);
/// Law of omega, dense over 2^|E| configurations.
std::vector<Rational> marginal_config(const Coupling& c);

/// mu_{alpha,beta}, dense; same closed form as the reverse coupling.
std::vector<Rational> spin_measure(const Graph& g, const FuzzyParams& fp, int max_vertices = kFuzzyMaxVertices);

/// mu-hat = mu(. | sigma(s) = 1, sigma(t) = 0), dense.
std::vector<Rational> conditional_spin_measure(const Graph& g, const FuzzyParams& fp, int s, int t,
                                               int max_vertices = kFuzzyMaxVertices);

/// P(omega | sigma) from the reverse description, dense over configurations.
std::vector<Rational> config_given_spin(const Graph& g, const FuzzyParams& fp, Spin sigma);

struct CouplingComparison {
  bool forward_equals_reverse = false;
  bool reverse_total_one = false;
  bool config_marginal_is_rcm = false;
  bool spin_marginal_matches = false;  // marginal of the forward coupling equals spin_measure
  std::size_t cells = 0;
  std::optional<std::pair<Config, Spin>> first_difference;
  bool ok() const { return forward_equals_reverse && reverse_total_one && config_marginal_is_rcm && spin_marginal_matches; }
};

CouplingComparison compare_couplings(const Graph& g, const FuzzyParams& fp, int max_vertices = kFuzzyMaxVertices);

struct KeyIdentity {
  bool equal = false;
  std::vector<Rational> mixture;  // sum_sigma mu-hat(sigma) P(. | sigma)
  std::vector<Rational> target;   // phi_q(. | s not<-> t)
  std::optional<Config> first_difference;
};

KeyIdentity check_key_identity(const Graph& g, const FuzzyParams& fp, int s, int t,
                               int max_vertices = kFuzzyMaxVertices);

struct SpinLatticeCheck {
  LatticeVerdict mu;
  LatticeVerdict mu_hat;
  AssociationVerdict<Rational> mu_hat_association;  // exhaustive when small, else sampled
  bool holds() const { return mu.holds && mu_hat.holds && mu_hat_association.holds; }
};

/// Lattice condition for mu and mu-hat, plus positive association of mu-hat.
SpinLatticeCheck check_spin_lattice(const Graph& g, const FuzzyParams& fp, int s, int t,
                                    int max_vertices = kFuzzyMaxVertices);

struct FactC {
  std::size_t spins = 0;          // sigma with sigma(s) = 1, sigma(t) = 0
  std::size_t pairs_checked = 0;  // covering pairs sigma < sigma + v
  bool monotone = true;
  std::optional<std::pair<Spin, Spin>> witness;
  // Same check over every spin, not only the conditioned ones.
  bool monotone_all_spins = true;
  std::optional<std::pair<Spin, Spin>> all_spins_witness;
};

/// E_P[f | sigma] increasing in sigma, for f increasing in C_s and decreasing
/// in C_t. alpha, beta >= 1 and the certificate must be pair-monotone for
/// ({s}, {t}); HypothesisError otherwise. Only covering pairs are compared,
/// which covers all comparable pairs because every spin has positive mass.
FactC check_fact_c(const Graph& g, const FuzzyParams& fp, int s, int t, const MonotoneCertificate& f,
                   int max_vertices = kFuzzyMaxVertices);

/// The four quantities of the fuzzy-Potts argument for Thm 2.5:
///   E[fh | Q] = sum mu-hat E[fh | sigma]
///            >= sum mu-hat E[f | sigma] E[h | sigma]
///            >= (sum mu-hat E[f | sigma]) (sum mu-hat E[h | sigma]) = E[f | Q] E[h | Q]
struct FuzzyChain {
  Rational e_fh;
  Rational mixture_fh;
  Rational mixture_of_products;
  Rational product_of_mixtures;
  Rational e_f_e_h;
  bool first_equality = false;
  bool first_inequality = false;
  bool second_inequality = false;
  bool last_equality = false;
  bool ok() const { return first_equality && first_inequality && second_inequality && last_equality; }
};

FuzzyChain fuzzy_chain(const Graph& g, const FuzzyParams& fp, int s, int t, const RealFunction& f,
                       const RealFunction& h, int max_vertices = kFuzzyMaxVertices);

/// The grid of (q, alpha, beta) used by the coupling checks.
const std::vector<FuzzyParams>& fuzzy_grid();

/// Everything above as JSON. Checks needing s, t are skipped when st is
/// empty; fact (c) needs f as well.
nlohmann::json fuzzy_report(const Graph& g, const FuzzyParams& fp, std::optional<std::pair<int, int>> st,
                            const std::optional<MonotoneCertificate>& f = std::nullopt,
                            int max_vertices = kFuzzyMaxVertices);

}  // namespace ccl
