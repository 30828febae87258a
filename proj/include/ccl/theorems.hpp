#pragma once

#include <ccl/configs.hpp>
#include <ccl/graph.hpp>
#include <ccl/rational.hpp>

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace ccl {

enum class Verdict { Holds, Violated, ViolationAsExpected, ExpectedViolationMissing };

const char* to_string(Verdict v);

/// Float adds a double-precision pre-screen whose slack is recorded in the
/// report details. Verdicts always come from the exact evaluation.
enum class Backend { Rational, Float };

/// Outcome of one checker run. slack = rhs - lhs with each theorem's
/// orientation chosen so that slack >= 0 means the inequality holds.
struct Report {
  std::string theorem;
  std::string instance_hash;
  Rational lhs;
  Rational rhs;
  Rational slack;
  Verdict verdict = Verdict::Holds;
  bool equality = false;
  bool screened = false;  // a float pre-screen ran (details.float_slack)
  nlohmann::json details = nlohmann::json::object();
  nlohmann::json witness;  // null unless the verdict is a violation

  bool expected_outcome() const { return verdict == Verdict::Holds || verdict == Verdict::ViolationAsExpected; }
};

nlohmann::json report_to_json(const Report& r);
Report report_from_json(const nlohmann::json& j);

/// FNV-1a 64 of a canonical JSON serialization, as 16 hex digits.
std::string instance_hash(const nlohmann::json& canonical);

// --- product-measure statements on undirected graphs ---------------------

/// Pr(A R_X) Pr(B R_Y) <= Pr(A B R_{X cap Y}) Pr(R_{X cup Y}); A, B
/// cluster-increasing for {s}; X, Y subsets of V \ {s}.
Report check_thm_1_1(const Graph& g, int s, const MonotoneCertificate& a, const MonotoneCertificate& b, VertexSet x,
                     VertexSet y, Backend backend = Backend::Rational);

/// Pr(A B | R_X) >= Pr(A | R_X) Pr(B | R_X).
Report check_thm_1_2(const Graph& g, int s, const MonotoneCertificate& a, const MonotoneCertificate& b, VertexSet x, Backend backend = Backend::Rational);

/// Pr(s<->a, s<->b | s!<->t) >= Pr(s<->a | .) Pr(s<->b | .).
Report check_vdBK1(const Graph& g, int s, int t, int a, int b, Backend backend = Backend::Rational);

/// Pr(s<->a, t<->b | s!<->t) <= Pr(s<->a | .) Pr(t<->b | .).
Report check_new1(const Graph& g, int s, int t, int a, int b, Backend backend = Backend::Rational);

/// Cov(f, h | R_X) >= 0 when f, h are both increasing (or both decreasing)
/// functions of C_s, <= 0 when one is increasing and the other decreasing.
Report check_thm_1_3(const Graph& g, int s, VertexSet x, const MonotoneCertificate& f, const MonotoneCertificate& h, Backend backend = Backend::Rational);

/// Cov(f, h | S!<->T) <= 0 for f increasing in C_S and h increasing in C_T.
Report check_thm_1_4(const Graph& g, VertexSet s, VertexSet t, const MonotoneCertificate& f,
                     const MonotoneCertificate& h, Backend backend = Backend::Rational);

/// Cov(f, h | S!<->T) >= 0 for f, h increasing in C_S and decreasing in C_T.
Report check_thm_1_5(const Graph& g, VertexSet s, VertexSet t, const MonotoneCertificate& f,
                     const MonotoneCertificate& h, Backend backend = Backend::Rational);

// --- random-cluster measures ---------------------------------------------

/// As check_thm_1_5 under phi_{G,q}, q >= 1 (OutOfScopeError otherwise).
Report check_thm_2_5(const Graph& g, VertexSet s, VertexSet t, const Rational& q, const MonotoneCertificate& f,
                     const MonotoneCertificate& h, Backend backend = Backend::Rational);

// --- directed and mixed graphs ---------------------------------------------

Report check_thm_3_1(const Graph& g, int s, const MonotoneCertificate& a, const MonotoneCertificate& b, VertexSet x,
                     VertexSet y, Backend backend = Backend::Rational);
Report check_thm_3_3(const Graph& g, int s, VertexSet x, const MonotoneCertificate& f, const MonotoneCertificate& h, Backend backend = Backend::Rational);

/// Pr(R_X) Pr(R_Y) <= Pr(R_{X cup Y}) Pr(R_{X cap Y}).
Report check_conv(const Graph& g, int s, VertexSet x, VertexSet y, Backend backend = Backend::Rational);

/// Cov(f, h | Q) >= 0 with Q = {V(C_s) and V(C_t) disjoint}; all edges oriented.
Report check_thm_3_5(const Graph& g, int s, int t, const MonotoneCertificate& f, const MonotoneCertificate& h, Backend backend = Backend::Rational);

enum class CexVariant { NotST, NeitherWay };

/// The would-be directed analogue of check_thm_1_4 with f = 1{s->a},
/// h = 1{t->a}, conditioned on {s -/-> t} or {s -/-> t, t -/-> s}. The
/// verdict is ViolationAsExpected when the covariance comes out positive.
Report check_counterexample_directed(const Graph& g, int s, int t, int a, CexVariant variant, Backend backend = Backend::Rational);

/// Deliberately false: Pr(AB | R_X) >= Pr(A | R_X) Pr(B | R_X) with A
/// decreasing and B increasing in C_s. Used as a sensitivity control; the
/// verdict is ViolationAsExpected when the covariance is strictly negative.
Report check_false_mixed_pair(const Graph& g, int s, const MonotoneCertificate& a, const MonotoneCertificate& b,
                              VertexSet x, Backend backend = Backend::Rational);

// --- cross-checks ------------------------------------------------------------

/// Rebuilds both sides of the four-probability inequality from quantities
/// under Pr' = Pr(. | R_{X cap Y}) and checks the correlation chain
/// Pr'(A R1)Pr'(B R2) <= Pr'(A)Pr'(R1)Pr'(B)Pr'(R2) <= Pr'(AB)Pr'(R1 R2),
/// R1 = R_{X \ Y}, R2 = R_{Y \ X}.
struct EquivalenceTrace {
  Rational direct_lhs, direct_rhs;
  Rational rebuilt_lhs, rebuilt_rhs;
  Rational middle;  // Pr'(A)Pr'(R1)Pr'(B)Pr'(R2) scaled by Pr(R_{X cap Y})^2
  bool matches = false;
  bool chain_holds = false;
};

EquivalenceTrace equivalence_trace(const Graph& g, int s, const MonotoneCertificate& a, const MonotoneCertificate& b,
                                   VertexSet x, VertexSet y);

/// Conditional-correlation form on X against the same form on the graph
/// with X merged into one vertex (product measure only).
struct SingletonReduction {
  Report original;
  Report merged;
  bool agrees = false;
};

SingletonReduction singleton_reduction(const Graph& g, int s, const MonotoneCertificate& a,
                                       const MonotoneCertificate& b, VertexSet x);

/// Checkable steps of the inductive argument for the four-probability
/// inequality: the E_X-independent replacements of A and B, the
/// log-modularity of the boundary-set law, the four-functions hypothesis on
/// the boundary lattice, and that the four sums rebuild both sides.
struct ProofTrace {
  bool reductions_ok = false;
  bool log_modular = true;
  bool four_functions = true;
  bool sums_match = true;
  int boundary_size = 0;
  bool base_case = false;  // X cap Y empty: the two-step FKG chain instead
  bool ok() const { return reductions_ok && log_modular && four_functions && sums_match; }
};

ProofTrace proof_trace_thm_1_1(const Graph& g, int s, const MonotoneCertificate& a, const MonotoneCertificate& b,
                               VertexSet x, VertexSet y);

// --- instances ----------------------------------------------------------------

/// One checker invocation in serializable form. Events are given as
/// expressions for parse_event; functions by the grammar of parse_function.
struct TheoremInstance {
  std::string theorem;  // T1.1 T1.2 T1.3 T1.4 T1.5 T2.5 T3.1 T3.2 T3.3 E-conv T3.5 E-vdBK1 E-new1 CEX-directed FALSE-mixed
  Graph graph;
  nlohmann::json params = nlohmann::json::object();
};

/// Numeric functions of a configuration:
///   EVENT                 indicator of an event expression
///   size(S)               number of edges in C_S   (S = v or v,w,...)
///   vsize(S)              number of vertices in V(C_S)
///   touches(S;v)          1{v in V(C_S)}
///   const(r)              constant
///   -F, r*F, F+F, (F)     negation, scaling, sums
RealFunction parse_function(const Graph& g, std::string_view text);

nlohmann::json canonical_instance(const TheoremInstance& inst);

/// Runs the named checker on the parsed instance.
Report run_instance(const TheoremInstance& inst, Backend backend = Backend::Rational);

TheoremInstance instance_from_json(const nlohmann::json& graph, const nlohmann::json& params,
                                   const std::string& theorem, int edge_cap = Graph::kDefaultEdgeCap);

}  // namespace ccl
