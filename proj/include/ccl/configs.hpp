#pragma once

#include <ccl/event.hpp>
#include <ccl/graph.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ccl {

/// Vertices reachable from S along open edges, respecting orientations.
VertexSet reachable(const Graph& g, Config omega, VertexSet s);

/// C_S(omega): open edges lying on an open orientation-respecting path that
/// starts in S. An oriented edge qualifies when its tail is reachable, an
/// unoriented one when either endpoint is.
EdgeSet open_cluster(const Graph& g, Config omega, VertexSet s);

/// Open clusters and reachable sets of S for every configuration.
struct ClusterTable {
  VertexSet source;
  std::vector<EdgeSet> cluster;
  std::vector<VertexSet> reach;
};

ClusterTable cluster_table(const Graph& g, VertexSet s);

/// {a -> b}; a == b is the sure event.
Event event_reach(const Graph& g, int a, int b);

/// R_X = {no vertex of S reaches any vertex of X}. X empty gives Omega.
Event event_R(const Graph& g, VertexSet s, VertexSet x);

/// {S not-> T and T not-> S}.
Event event_mutually_unreachable(const Graph& g, VertexSet s, VertexSet t);

/// Q = {V(C_s) and V(C_t) disjoint}; all-directed graphs only.
Event event_Q_disjoint_clusters(const Graph& g, int s, int t);

/// {edge e belongs to C_S}.
Event event_cluster_contains(const Graph& g, VertexSet s, int edge);

Event event_edge_open(const Graph& g, int edge);

/// Parses the event expression language used on the command line:
///   reach(a,b)  R(s;x,y)  Q(s,t)  cluster_contains(s;a-b)  open(a-b)
///   true  false  !E  E & F  E | F  (E)
/// Edge references are "a-b" (unoriented), "a->b" (oriented) or "#index".
Event parse_event(const Graph& g, std::string_view text);

int parse_edge_ref(const Graph& g, std::string_view text);

enum class MonotoneKind { Increasing, Decreasing, ClusterIncreasing, ClusterDecreasing, PairMonotone };

const char* to_string(MonotoneKind k);

/// The claimed structure of an event/function:
///  - Increasing/Decreasing in omega;
///  - ClusterIncreasing/Decreasing: a monotone function of C_S;
///  - PairMonotone: a function of (C_S, C_T), increasing in C_S and
///    decreasing in C_T.
struct MonotoneClaim {
  MonotoneKind kind = MonotoneKind::Increasing;
  VertexSet s;
  VertexSet t;

  friend bool operator==(const MonotoneClaim&, const MonotoneClaim&) = default;
};

struct MonotoneWitness {
  Config lower;
  Config upper;
  std::string reason;
};

class MonotoneCertificate {
 public:
  MonotoneCertificate(RealFunction subject, MonotoneClaim claim);
  MonotoneCertificate(const Event& subject, MonotoneClaim claim);

  const RealFunction& subject() const { return subject_; }
  const std::optional<Event>& event() const { return event_; }
  const MonotoneClaim& claim() const { return claim_; }
  bool checked() const { return checked_; }
  bool verified() const { return verified_; }
  const std::optional<MonotoneWitness>& witness() const { return witness_; }

 private:
  friend MonotoneCertificate verify_monotone(const Graph& g, MonotoneCertificate cert);

  RealFunction subject_;
  std::optional<Event> event_;
  MonotoneClaim claim_;
  bool checked_ = false;
  bool verified_ = false;
  std::optional<MonotoneWitness> witness_;
};

/// Exhaustive check of the claimed structure over all configurations. For
/// cluster claims: constancy on every fiber {C = W} plus monotonicity across
/// every comparable pair of attained cluster values.
MonotoneCertificate verify_monotone(const Graph& g, MonotoneCertificate cert);

/// verify_monotone(g, MonotoneCertificate(subject, claim)).
template <class Subject>
MonotoneCertificate certify(const Graph& g, const Subject& subject, MonotoneClaim claim) {
  return verify_monotone(g, MonotoneCertificate(subject, claim));
}

/// The event A-tilde: omega belongs iff omega with every edge of E_X closed
/// lies in A. It does not depend on E_X and agrees with A on R_X. Requires a
/// verified ClusterIncreasing({s}) certificate for A.
Event reduce_event_off_EX(const Graph& g, const MonotoneCertificate& a, int s, VertexSet x);

}  // namespace ccl
