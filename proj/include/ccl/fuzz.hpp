#pragma once

#include <ccl/graph.hpp>
#include <ccl/rng.hpp>
#include <ccl/theorems.hpp>

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace ccl {

/// Open probabilities used by the generators.
const std::vector<Rational>& fuzz_p_grid();
/// Random-cluster parameters cycled through by T2.5 campaigns.
const std::vector<Rational>& fuzz_q_grid();

/// Random simple graph on 2..max_vertices vertices named v0, v1, ... with
/// 1..max_edges edges and p_e from fuzz_p_grid(). For Mixed each edge is
/// oriented with probability 1/2 (the result may come out all one kind).
Graph random_graph(Rng& rng, Directedness kind, int max_vertices = 6, int max_edges = 10, int min_vertices = 2);

/// {C_S contains one of a few randomly chosen attained cluster values}.
/// increasing = false returns the complement.
Event random_cluster_event(const Graph& g, VertexSet s, Rng& rng, bool increasing = true);

/// Positive combination of cluster-value indicators (and sometimes |C_S|)
/// plus a constant; negated when increasing = false.
RealFunction random_cluster_function(const Graph& g, VertexSet s, Rng& rng, bool increasing = true);

/// Positive combination of products 1{C_S contains W} 1{C_T inside U} and of
/// the single factors: increasing in C_S, decreasing in C_T.
RealFunction random_pair_function(const Graph& g, VertexSet s, VertexSet t, Rng& rng);

/// Theorem ids a campaign accepts. T1.3 and T3.3 alternate between the
/// same-direction and mixed branches; T2.5 cycles q through fuzz_q_grid().
const std::vector<std::string>& campaign_theorems();
/// Campaigns over known-false statements, expected to find violations.
const std::vector<std::string>& false_variant_theorems();

struct FuzzOptions {
  std::string theorem;
  int instances = 1000;
  std::uint64_t seed = 1;
  Backend backend = Backend::Rational;
  int max_vertices = 6;
  int max_edges = 10;
  int threads = 1;
  bool keep_reports = false;
};

struct FuzzSummary {
  std::string theorem;
  std::uint64_t seed = 0;
  int instances = 0;
  int holds = 0;
  int violations = 0;           // unexpected: slack < 0 where the statement is claimed
  int expected_violations = 0;  // false variants that did fail
  int missing_violations = 0;   // false variants that happened to hold here
  int equalities = 0;
  int errors = 0;               // generator produced an instance the checker refused
  std::optional<Rational> min_slack;
  nlohmann::json branches = nlohmann::json::object();
  std::vector<nlohmann::json> witnesses;  // at most 10
  std::vector<std::string> error_messages;  // at most 10
  std::vector<Report> reports;            // when keep_reports

  bool clean() const { return violations == 0 && errors == 0; }
};

nlohmann::json summary_to_json(const FuzzSummary& s, bool with_reports = false);

/// Generates and checks instance i of a campaign; deterministic in (theorem,
/// seed, i). Campaign graphs have 3..max_vertices vertices.
Report fuzz_instance(const std::string& theorem, std::uint64_t seed, int index, Backend backend = Backend::Rational,
                     int max_vertices = 6, int max_edges = 10);

FuzzSummary run_campaign(const FuzzOptions& opt);

// --- report merging ---------------------------------------------------------

/// Reports found in a JSON document: a single report, an array of them, a
/// campaign summary with a "reports" array, or an array of summaries.
std::vector<Report> reports_from_json(const nlohmann::json& j);

struct MergedRow {
  std::string theorem;
  int instances = 0;
  int holds = 0;
  int violations = 0;
  int expected_violations = 0;
  int missing_violations = 0;
  int equalities = 0;
  std::optional<Rational> min_slack;
};

/// One row per theorem, counting distinct instance hashes.
std::vector<MergedRow> merge_reports(const std::vector<Report>& reports);
nlohmann::json merged_to_json(const std::vector<MergedRow>& rows);
std::string merged_to_csv(const std::vector<MergedRow>& rows);

}  // namespace ccl
