#include <ccl/configs.hpp>
#include <ccl/error.hpp>

#include <algorithm>
#include <cctype>
#include <unordered_map>

namespace ccl {

VertexSet reachable(const Graph& g, Config omega, VertexSet s) {
  VertexSet seen = s;
  VertexSet frontier = s;
  while (!frontier.empty()) {
    VertexSet next;
    frontier.for_each([&](int v) {
      for (const Arc& a : g.arcs_from(v))
        if (omega.test(a.edge) && !seen.test(a.to)) next = next.with(a.to);
    });
    seen |= next;
    frontier = next;
  }
  return seen;
}

namespace {

EdgeSet cluster_from_reach(const Graph& g, Config omega, VertexSet reach) {
  EdgeSet c;
  omega.for_each([&](int i) {
    const Edge& e = g.edge(i);
    if (reach.test(e.tail) || (!e.oriented && reach.test(e.head))) c = c.with(i);
  });
  return c;
}

}  // namespace

EdgeSet open_cluster(const Graph& g, Config omega, VertexSet s) {
  return cluster_from_reach(g, omega, reachable(g, omega, s));
}

ClusterTable cluster_table(const Graph& g, VertexSet s) {
  ClusterTable t;
  t.source = s;
  t.cluster.resize(g.num_configs());
  t.reach.resize(g.num_configs());
  for (std::uint64_t w = 0; w < g.num_configs(); ++w) {
    Config omega(static_cast<std::uint32_t>(w));
    t.reach[w] = reachable(g, omega, s);
    t.cluster[w] = cluster_from_reach(g, omega, t.reach[w]);
  }
  return t;
}

namespace {

void require_vertex(const Graph& g, int v) {
  if (v < 0 || v >= g.num_vertices()) throw InputError("vertex index out of range");
}

void require_vertices(const Graph& g, VertexSet s) {
  if (!s.subset_of(g.all_vertices())) throw InputError("vertex set contains unknown vertex ids");
}

}  // namespace

Event event_reach(const Graph& g, int a, int b) {
  require_vertex(g, a);
  require_vertex(g, b);
  std::string tag = "reach(" + g.name(a) + "," + g.name(b) + ")";
  if (a == b) return Event(g.num_edges(), true, tag);
  auto src = VertexSet::single(a);
  return Event::from_predicate(
      g.num_edges(), [&](std::uint64_t w) { return reachable(g, Config(static_cast<std::uint32_t>(w)), src).test(b); },
      tag);
}

Event event_R(const Graph& g, VertexSet s, VertexSet x) {
  require_vertices(g, s);
  require_vertices(g, x);
  std::string tag = "R(" + describe(g, s) + ";" + describe(g, x) + ")";
  if (x.empty()) return Event(g.num_edges(), true, tag);
  return Event::from_predicate(
      g.num_edges(),
      [&](std::uint64_t w) { return !reachable(g, Config(static_cast<std::uint32_t>(w)), s).intersects(x); }, tag);
}

Event event_mutually_unreachable(const Graph& g, VertexSet s, VertexSet t) {
  auto e = event_R(g, s, t) & event_R(g, t, s);
  return e.set_provenance("R(" + describe(g, s) + ";" + describe(g, t) + ")&R(" + describe(g, t) + ";" +
                          describe(g, s) + ")");
}

Event event_Q_disjoint_clusters(const Graph& g, int s, int t) {
  require_vertex(g, s);
  require_vertex(g, t);
  if (g.directedness() != Directedness::Directed)
    throw UnsupportedOperation("the disjoint-cluster event Q is defined here only for all-directed graphs");
  if (s == t) throw InputError("Q(s,t) needs distinct vertices");
  auto ss = VertexSet::single(s), ts = VertexSet::single(t);
  return Event::from_predicate(
      g.num_edges(),
      [&](std::uint64_t w) {
        Config omega(static_cast<std::uint32_t>(w));
        return !vertex_support(g, open_cluster(g, omega, ss))
                    .intersects(vertex_support(g, open_cluster(g, omega, ts)));
      },
      "Q(" + g.name(s) + "," + g.name(t) + ")");
}

Event event_cluster_contains(const Graph& g, VertexSet s, int edge) {
  require_vertices(g, s);
  if (edge < 0 || edge >= g.num_edges()) throw InputError("edge index out of range");
  return Event::from_predicate(
      g.num_edges(),
      [&](std::uint64_t w) { return open_cluster(g, Config(static_cast<std::uint32_t>(w)), s).test(edge); },
      "cluster_contains(" + describe(g, s) + ";" + describe(g, EdgeSet::single(edge)) + ")");
}

Event event_edge_open(const Graph& g, int edge) {
  if (edge < 0 || edge >= g.num_edges()) throw InputError("edge index out of range");
  return Event::from_predicate(
      g.num_edges(), [&](std::uint64_t w) { return (w >> edge) & 1u; },
      "open(" + describe(g, EdgeSet::single(edge)) + ")");
}

// ---------------------------------------------------------------------------
// Event expressions

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      auto piece = trim(s.substr(start, i - start));
      if (!piece.empty()) out.push_back(piece);
      start = i + 1;
    }
  }
  return out;
}

VertexSet parse_vertex_list(const Graph& g, std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '{' && s.back() == '}') s = s.substr(1, s.size() - 2);
  VertexSet out;
  for (auto name : split(s, ',')) out = out.with(g.vertex(name));
  return out;
}

class EventParser {
 public:
  EventParser(const Graph& g, std::string_view text) : g_(g), text_(text) {}

  Event parse() {
    Event e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) {
    throw InputError("event expression '" + std::string(text_) + "': " + what + " at offset " +
                     std::to_string(pos_));
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Event expr() {
    Event e = term();
    while (eat('|')) e = e | term();
    return e;
  }

  Event term() {
    Event e = factor();
    while (eat('&')) e = e & factor();
    return e;
  }

  Event factor() {
    if (eat('!')) return ~factor();
    if (eat('(')) {
      Event e = expr();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    return atom();
  }

  Event atom() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    std::string name(text_.substr(start, pos_ - start));
    if (name.empty()) fail("expected an event");
    if (name == "true" || name == "Omega") return Event(g_.num_edges(), true, "Omega");
    if (name == "false") return Event(g_.num_edges(), false, "empty");
    if (!eat('(')) fail("expected '(' after " + name);
    std::size_t arg_start = pos_;
    int depth = 1;
    while (pos_ < text_.size() && depth > 0) {
      if (text_[pos_] == '(') ++depth;
      if (text_[pos_] == ')') --depth;
      ++pos_;
    }
    if (depth != 0) fail("unbalanced parentheses");
    std::string_view args = text_.substr(arg_start, pos_ - arg_start - 1);

    auto groups = split(args, ';');
    if (name == "reach") {
      auto v = split(args, ',');
      if (v.size() != 2) fail("reach takes two vertices");
      return event_reach(g_, g_.vertex(v[0]), g_.vertex(v[1]));
    }
    if (name == "R") {
      if (groups.size() != 2) fail("R takes 'sources;targets'");
      return event_R(g_, parse_vertex_list(g_, groups[0]), parse_vertex_list(g_, groups[1]));
    }
    if (name == "Q") {
      auto v = split(args, ',');
      if (v.size() != 2) fail("Q takes two vertices");
      return event_Q_disjoint_clusters(g_, g_.vertex(v[0]), g_.vertex(v[1]));
    }
    if (name == "cluster_contains") {
      if (groups.size() != 2) fail("cluster_contains takes 'sources;edge'");
      return event_cluster_contains(g_, parse_vertex_list(g_, groups[0]), parse_edge_ref(g_, groups[1]));
    }
    if (name == "open") return event_edge_open(g_, parse_edge_ref(g_, args));
    fail("unknown event constructor '" + name + "'");
  }

  const Graph& g_;
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

int parse_edge_ref(const Graph& g, std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '#') {
    int idx = std::stoi(std::string(text.substr(1)));
    if (idx < 0 || idx >= g.num_edges()) throw InputError("edge index out of range");
    return idx;
  }
  bool oriented = false;
  std::size_t split_at = text.find("->");
  std::size_t skip = 2;
  if (split_at != std::string_view::npos) {
    oriented = true;
  } else {
    split_at = text.find('-');
    skip = 1;
  }
  if (split_at == std::string_view::npos) throw InputError("malformed edge reference '" + std::string(text) + "'");
  int a = g.vertex(trim(text.substr(0, split_at)));
  int b = g.vertex(trim(text.substr(split_at + skip)));
  for (int i = 0; i < g.num_edges(); ++i) {
    const Edge& e = g.edge(i);
    if (e.oriented != oriented) continue;
    if ((e.tail == a && e.head == b) || (!oriented && e.tail == b && e.head == a)) return i;
  }
  throw InputError("no edge matches '" + std::string(text) + "'");
}

Event parse_event(const Graph& g, std::string_view text) {
  Event e = EventParser(g, text).parse();
  e.set_provenance(std::string(trim(text)));
  return e;
}

// ---------------------------------------------------------------------------
// Monotone certificates

const char* to_string(MonotoneKind k) {
  switch (k) {
    case MonotoneKind::Increasing: return "increasing";
    case MonotoneKind::Decreasing: return "decreasing";
    case MonotoneKind::ClusterIncreasing: return "cluster-increasing";
    case MonotoneKind::ClusterDecreasing: return "cluster-decreasing";
    case MonotoneKind::PairMonotone: return "pair-monotone";
  }
  return "?";
}

MonotoneCertificate::MonotoneCertificate(RealFunction subject, MonotoneClaim claim)
    : subject_(std::move(subject)), claim_(claim) {}

MonotoneCertificate::MonotoneCertificate(const Event& subject, MonotoneClaim claim)
    : subject_(RealFunction::indicator(subject)), event_(subject), claim_(claim) {}

namespace {

std::optional<MonotoneWitness> check_in_omega(const Graph& g, const RealFunction& f, bool increasing) {
  for (std::uint64_t w = 0; w < g.num_configs(); ++w) {
    for (int i = 0; i < g.num_edges(); ++i) {
      if ((w >> i) & 1u) continue;
      std::uint64_t up = w | (std::uint64_t{1} << i);
      bool bad = increasing ? f[w] > f[up] : f[w] < f[up];
      if (bad)
        return MonotoneWitness{Config(static_cast<std::uint32_t>(w)), Config(static_cast<std::uint32_t>(up)),
                               std::string("value ") + (increasing ? "drops" : "rises") + " when an edge opens"};
    }
  }
  return std::nullopt;
}

// Cluster-valued key of a configuration; `order` says whether key a lies below
// key b in the order the claim is monotone in.
template <class KeyOf, class Below>
std::optional<MonotoneWitness> check_on_fibers(const Graph& g, const RealFunction& f, KeyOf key_of, Below below,
                                               int direction) {
  std::unordered_map<std::uint64_t, std::size_t> index;
  std::vector<std::uint64_t> keys;
  std::vector<std::uint64_t> reps;
  for (std::uint64_t w = 0; w < g.num_configs(); ++w) {
    std::uint64_t k = key_of(w);
    auto [it, inserted] = index.try_emplace(k, keys.size());
    if (inserted) {
      keys.push_back(k);
      reps.push_back(w);
    } else if (f[reps[it->second]] != f[w]) {
      return MonotoneWitness{Config(static_cast<std::uint32_t>(reps[it->second])),
                             Config(static_cast<std::uint32_t>(w)), "not determined by the cluster value"};
    }
  }
  for (std::size_t a = 0; a < keys.size(); ++a) {
    for (std::size_t b = 0; b < keys.size(); ++b) {
      if (a == b || !below(keys[a], keys[b])) continue;
      const Rational& lo = f[reps[a]];
      const Rational& hi = f[reps[b]];
      if (direction > 0 ? lo > hi : lo < hi)
        return MonotoneWitness{Config(static_cast<std::uint32_t>(reps[a])), Config(static_cast<std::uint32_t>(reps[b])),
                               "monotonicity fails across comparable cluster values"};
    }
  }
  return std::nullopt;
}

}  // namespace

MonotoneCertificate verify_monotone(const Graph& g, MonotoneCertificate cert) {
  const auto& f = cert.subject_;
  if (f.dims() != g.num_edges()) throw InputError("subject dimension does not match the graph");
  const auto& claim = cert.claim_;
  std::optional<MonotoneWitness> witness;
  switch (claim.kind) {
    case MonotoneKind::Increasing:
    case MonotoneKind::Decreasing:
      witness = check_in_omega(g, f, claim.kind == MonotoneKind::Increasing);
      break;
    case MonotoneKind::ClusterIncreasing:
    case MonotoneKind::ClusterDecreasing: {
      auto table = cluster_table(g, claim.s);
      witness = check_on_fibers(
          g, f, [&](std::uint64_t w) { return std::uint64_t{table.cluster[w].bits}; },
          [](std::uint64_t a, std::uint64_t b) { return (a & ~b) == 0; },
          claim.kind == MonotoneKind::ClusterIncreasing ? 1 : -1);
      break;
    }
    case MonotoneKind::PairMonotone: {
      auto ts = cluster_table(g, claim.s);
      auto tt = cluster_table(g, claim.t);
      witness = check_on_fibers(
          g, f,
          [&](std::uint64_t w) {
            return std::uint64_t{ts.cluster[w].bits} | (std::uint64_t{tt.cluster[w].bits} << 32);
          },
          [](std::uint64_t a, std::uint64_t b) {
            std::uint64_t as = a & 0xffffffffu, bs = b & 0xffffffffu;
            std::uint64_t at = a >> 32, bt = b >> 32;
            return (as & ~bs) == 0 && (bt & ~at) == 0;
          },
          1);
      break;
    }
  }
  cert.checked_ = true;
  cert.verified_ = !witness.has_value();
  cert.witness_ = std::move(witness);
  return cert;
}

Event reduce_event_off_EX(const Graph& g, const MonotoneCertificate& a, int s, VertexSet x) {
  if (!a.verified() || a.claim().kind != MonotoneKind::ClusterIncreasing || a.claim().s != VertexSet::single(s))
    throw HypothesisError("A must carry a verified cluster-increasing certificate for {s}");
  if (x.test(s)) throw InputError("X must not contain s");
  const EdgeSet ex = edges_meeting(g, x);
  const auto& f = a.subject();
  Event reduced = Event::from_predicate(
      g.num_edges(), [&](std::uint64_t w) { return f[w & ~std::uint64_t{ex.bits}] != 0; },
      "reduce(" + (a.event() ? a.event()->provenance() : std::string("A")) + ";" + describe(g, x) + ")");

  // The construction is correct by argument; these checks catch regressions.
  Event original = Event::from_predicate(g.num_edges(), [&](std::uint64_t w) { return f[w] != 0; });
  Event rx = event_R(g, VertexSet::single(s), x);
  if (!reduced.subset_of(original)) throw InternalError("reduced event is not contained in A");
  if ((reduced & rx) != (original & rx)) throw InternalError("reduced event disagrees with A on R_X");
  for (std::uint64_t w = 0; w < g.num_configs(); ++w)
    if (reduced.contains(w) != reduced.contains(w & ~std::uint64_t{ex.bits}))
      throw InternalError("reduced event depends on E_X");
  if (!certify(g, reduced, {MonotoneKind::ClusterIncreasing, VertexSet::single(s), {}}).verified())
    throw InternalError("reduced event is not cluster-increasing");
  return reduced;
}

}  // namespace ccl
