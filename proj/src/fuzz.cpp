#include <ccl/fuzz.hpp>

#include <ccl/error.hpp>

#include <algorithm>
#include <future>
#include <map>
#include <set>
#include <sstream>

namespace ccl {

namespace {

using nlohmann::json;

std::uint64_t fnv64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

struct PlannedEdge {
  int tail, head;
  bool oriented;
};

Graph build(Rng& rng, int n, const std::vector<PlannedEdge>& edges) {
  std::vector<std::string> names;
  for (int v = 0; v < n; ++v) names.push_back("v" + std::to_string(v));
  std::vector<EdgeSpec> specs;
  for (const auto& e : edges)
    specs.push_back({names[e.tail], names[e.head], e.oriented, rng.pick(fuzz_p_grid())});
  return make_graph(std::move(names), specs);
}

// Adds up to `extra` random edges on pairs not already used.
void add_random_edges(Rng& rng, int n, Directedness kind, int extra, std::vector<PlannedEdge>& edges) {
  std::vector<std::pair<int, int>> pairs;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) {
      bool used = false;
      for (const auto& e : edges) used = used || (std::min(e.tail, e.head) == u && std::max(e.tail, e.head) == v);
      if (!used) pairs.emplace_back(u, v);
    }
  rng.shuffle(pairs);
  for (int i = 0; i < extra && i < static_cast<int>(pairs.size()); ++i) {
    auto [u, v] = pairs[i];
    bool oriented = kind == Directedness::Directed || (kind == Directedness::Mixed && rng.coin());
    if (oriented && rng.coin()) std::swap(u, v);
    edges.push_back({u, v, oriented});
  }
}

int random_vertex(Rng& rng, const Graph& g) { return static_cast<int>(rng.below(g.num_vertices())); }

// Random subset avoiding `exclude`; empty only with probability about 1/8.
VertexSet random_subset(Rng& rng, const Graph& g, VertexSet exclude) {
  VertexSet out;
  std::vector<int> allowed;
  for (int v = 0; v < g.num_vertices(); ++v)
    if (!exclude.test(v)) {
      allowed.push_back(v);
      if (rng.below(3) == 0) out = out.with(v);
    }
  if (out.empty() && !allowed.empty() && rng.below(8) != 0) out = out.with(rng.pick(allowed));
  return out;
}

std::vector<EdgeSet> attained_clusters(const Graph& g, VertexSet s) {
  auto table = cluster_table(g, s);
  std::set<EdgeSet> values(table.cluster.begin(), table.cluster.end());
  return {values.begin(), values.end()};
}

// Small attained values make events that survive conditioning on R_X.
EdgeSet pick_small(Rng& rng, const std::vector<EdgeSet>& values) {
  const int limit = 1 + static_cast<int>(rng.below(3));
  std::vector<EdgeSet> small;
  for (auto v : values)
    if (!v.empty() && v.count() <= limit) small.push_back(v);
  return small.empty() ? rng.pick(values) : rng.pick(small);
}

Rational random_coefficient(Rng& rng) {
  static const std::vector<Rational> c{Rational(1, 2), Rational(1), Rational(2), Rational(3)};
  return rng.pick(c);
}

std::vector<std::uint32_t> cluster_values(const Graph& g, VertexSet s) {
  auto table = cluster_table(g, s);
  std::vector<std::uint32_t> out(g.num_configs());
  for (std::size_t w = 0; w < out.size(); ++w) out[w] = table.cluster[w].bits;
  return out;
}

MonotoneCertificate cluster_cert(const Graph& g, const Event& e, int s, bool increasing) {
  return certify(g, e,
                 {increasing ? MonotoneKind::ClusterIncreasing : MonotoneKind::ClusterDecreasing, VertexSet::single(s), {}});
}

MonotoneCertificate function_cert(const Graph& g, const RealFunction& f, int s, bool increasing) {
  return certify(g, f,
                 {increasing ? MonotoneKind::ClusterIncreasing : MonotoneKind::ClusterDecreasing, VertexSet::single(s), {}});
}

MonotoneCertificate pair_cert(const Graph& g, const RealFunction& f, VertexSet s, VertexSet t) {
  return certify(g, f, {MonotoneKind::PairMonotone, s, t});
}

// Disjoint nonempty S, T with |S|, |T| <= 2.
std::pair<VertexSet, VertexSet> random_pair_sets(Rng& rng, const Graph& g) {
  std::vector<int> order(g.num_vertices());
  for (int v = 0; v < g.num_vertices(); ++v) order[v] = v;
  rng.shuffle(order);
  const int n = g.num_vertices();
  int ns = 1, nt = 1;
  if (n >= 4 && rng.below(4) == 0) ns = 2;
  if (n >= ns + 2 && rng.below(4) == 0) nt = 2;
  VertexSet s, t;
  for (int i = 0; i < ns; ++i) s = s.with(order[i]);
  for (int i = ns; i < ns + nt; ++i) t = t.with(order[i]);
  return {s, t};
}

Directedness directed_mix(Rng& rng) {
  switch (rng.below(4)) {
    case 0: return Directedness::Undirected;
    case 1: return Directedness::Mixed;
    default: return Directedness::Directed;
  }
}

}  // namespace

const std::vector<Rational>& fuzz_p_grid() {
  static const std::vector<Rational> g{Rational(1, 4), Rational(1, 3), Rational(1, 2), Rational(2, 3), Rational(3, 4)};
  return g;
}

const std::vector<Rational>& fuzz_q_grid() {
  static const std::vector<Rational> g{Rational(1), Rational(3, 2), Rational(2), Rational(3)};
  return g;
}

Graph random_graph(Rng& rng, Directedness kind, int max_vertices, int max_edges, int min_vertices) {
  if (min_vertices < 2 || max_vertices < min_vertices || max_edges < 1)
    throw InputError("random_graph needs 2 <= min_vertices <= max_vertices and max_edges >= 1");
  const int n = min_vertices + static_cast<int>(rng.below(max_vertices - min_vertices + 1));
  const int pairs = n * (n - 1) / 2;
  const int cap = std::min(max_edges, pairs);
  // A random spanning tree (when the edge budget allows) keeps most instances
  // connected, then extra edges up to a random total.
  std::vector<PlannedEdge> edges;
  std::vector<int> order(n);
  for (int v = 0; v < n; ++v) order[v] = v;
  rng.shuffle(order);
  for (int i = 1; i < n && static_cast<int>(edges.size()) < cap; ++i) {
    int u = order[i], v = order[rng.below(i)];
    bool oriented = kind == Directedness::Directed || (kind == Directedness::Mixed && rng.coin());
    if (oriented && rng.coin()) std::swap(u, v);
    edges.push_back({u, v, oriented});
  }
  const int base = static_cast<int>(edges.size());
  const int m = base + static_cast<int>(rng.below(cap - base + 1));
  add_random_edges(rng, n, kind, m - base, edges);
  return build(rng, n, edges);
}

Event random_cluster_event(const Graph& g, VertexSet s, Rng& rng, bool increasing) {
  auto values = attained_clusters(g, s);
  std::vector<EdgeSet> gens;
  if (rng.below(8) != 0) {
    const int k = 1 + static_cast<int>(rng.below(3));
    for (int i = 0; i < k; ++i) gens.push_back(pick_small(rng, values));
  } else {
    gens.push_back(EdgeSet{});  // the sure event
  }
  auto cv = cluster_values(g, s);
  Event e = Event::from_predicate(g.num_edges(), [&](std::uint64_t w) {
    for (auto gen : gens)
      if (gen.subset_of(EdgeSet(cv[w]))) return true;
    return false;
  });
  return increasing ? e : ~e;
}

RealFunction random_cluster_function(const Graph& g, VertexSet s, Rng& rng, bool increasing) {
  auto values = attained_clusters(g, s);
  auto cv = cluster_values(g, s);
  static const std::vector<Rational> offsets{Rational(0), Rational(1), Rational(-1)};
  RealFunction f(g.num_edges(), rng.pick(offsets));
  const int k = static_cast<int>(rng.below(4));
  for (int i = 0; i < k; ++i) {
    const EdgeSet w = pick_small(rng, values);
    const Rational c = random_coefficient(rng);
    for (std::uint64_t x = 0; x < g.num_configs(); ++x)
      if (w.subset_of(EdgeSet(cv[x]))) f[x] += c;
  }
  if (k == 0 || rng.coin()) {
    const Rational c = random_coefficient(rng);
    for (std::uint64_t x = 0; x < g.num_configs(); ++x) f[x] += c * EdgeSet(cv[x]).count();
  }
  return increasing ? f : -f;
}

RealFunction random_pair_function(const Graph& g, VertexSet s, VertexSet t, Rng& rng) {
  auto vs = attained_clusters(g, s);
  auto vt = attained_clusters(g, t);
  auto cs = cluster_values(g, s);
  auto ct = cluster_values(g, t);
  static const std::vector<Rational> offsets{Rational(0), Rational(1), Rational(-2)};
  RealFunction f(g.num_edges(), rng.pick(offsets));
  const int k = 1 + static_cast<int>(rng.below(3));
  for (int i = 0; i < k; ++i) {
    const int shape = static_cast<int>(rng.below(3));  // 0 product, 1 C_S only, 2 C_T only
    const EdgeSet w = pick_small(rng, vs);
    const EdgeSet u = rng.pick(vt);
    const Rational c = random_coefficient(rng);
    for (std::uint64_t x = 0; x < g.num_configs(); ++x) {
      const bool up = w.subset_of(EdgeSet(cs[x]));
      const bool down = EdgeSet(ct[x]).subset_of(u);
      if ((shape == 0 && up && down) || (shape == 1 && up) || (shape == 2 && down)) f[x] += c;
    }
  }
  return f;
}

const std::vector<std::string>& campaign_theorems() {
  static const std::vector<std::string> t{"T1.1", "T1.2", "T1.3", "T1.4",    "T1.5",    "T2.5",  "T3.1",
                                          "T3.3", "E-conv", "T3.5", "E-vdBK1", "E-new1"};
  return t;
}

const std::vector<std::string>& false_variant_theorems() {
  static const std::vector<std::string> t{"CEX-directed", "FALSE-mixed"};
  return t;
}

Report fuzz_instance(const std::string& theorem, std::uint64_t seed, int index, Backend backend, int max_vertices,
                     int max_edges) {
  std::uint64_t key = splitmix64(seed);
  key = splitmix64(key ^ fnv64(theorem));
  key = splitmix64(key + static_cast<std::uint64_t>(index));
  Rng rng(key);
  const int nv = max_vertices, ne = max_edges;
  const int lo = std::min(3, std::max(2, nv));

  if (theorem == "T1.1" || theorem == "T3.1") {
    Graph g = random_graph(rng, theorem == "T1.1" ? Directedness::Undirected : directed_mix(rng), nv, ne, lo);
    const int s = random_vertex(rng, g);
    const VertexSet src = VertexSet::single(s);
    auto a = cluster_cert(g, random_cluster_event(g, src, rng), s, true);
    auto b = cluster_cert(g, random_cluster_event(g, src, rng), s, true);
    const VertexSet x = random_subset(rng, g, src), y = random_subset(rng, g, src);
    return theorem == "T1.1" ? check_thm_1_1(g, s, a, b, x, y, backend) : check_thm_3_1(g, s, a, b, x, y, backend);
  }
  if (theorem == "T1.2") {
    Graph g = random_graph(rng, Directedness::Undirected, nv, ne, lo);
    const int s = random_vertex(rng, g);
    const VertexSet src = VertexSet::single(s);
    auto a = cluster_cert(g, random_cluster_event(g, src, rng), s, true);
    auto b = cluster_cert(g, random_cluster_event(g, src, rng), s, true);
    return check_thm_1_2(g, s, a, b, random_subset(rng, g, src), backend);
  }
  if (theorem == "T1.3" || theorem == "T3.3") {
    Graph g = random_graph(rng, theorem == "T1.3" ? Directedness::Undirected : directed_mix(rng), nv, ne, lo);
    const int s = random_vertex(rng, g);
    const VertexSet src = VertexSet::single(s);
    const bool mixed = index % 2 == 1;
    const bool f_up = rng.coin();
    const bool h_up = mixed ? !f_up : f_up;
    auto f = function_cert(g, random_cluster_function(g, src, rng, f_up), s, f_up);
    auto h = function_cert(g, random_cluster_function(g, src, rng, h_up), s, h_up);
    const VertexSet x = random_subset(rng, g, src);
    Report r = theorem == "T1.3" ? check_thm_1_3(g, s, x, f, h, backend) : check_thm_3_3(g, s, x, f, h, backend);
    r.details["branch"] = mixed ? "mixed" : "same";
    return r;
  }
  if (theorem == "T1.4") {
    Graph g = random_graph(rng, Directedness::Undirected, nv, ne, lo);
    auto [s, t] = random_pair_sets(rng, g);
    auto f = certify(g, random_cluster_function(g, s, rng, true), {MonotoneKind::ClusterIncreasing, s, {}});
    auto h = certify(g, random_cluster_function(g, t, rng, true), {MonotoneKind::ClusterIncreasing, t, {}});
    return check_thm_1_4(g, s, t, f, h, backend);
  }
  if (theorem == "T1.5" || theorem == "T2.5") {
    Graph g = random_graph(rng, Directedness::Undirected, nv, ne, lo);
    auto [s, t] = random_pair_sets(rng, g);
    auto f = pair_cert(g, random_pair_function(g, s, t, rng), s, t);
    auto h = pair_cert(g, random_pair_function(g, s, t, rng), s, t);
    if (theorem == "T1.5") return check_thm_1_5(g, s, t, f, h, backend);
    const Rational& q = fuzz_q_grid()[index % fuzz_q_grid().size()];
    Report r = check_thm_2_5(g, s, t, q, f, h, backend);
    r.details["branch"] = "q=" + to_string(q);
    return r;
  }
  if (theorem == "E-conv") {
    Graph g = random_graph(rng, directed_mix(rng), nv, ne, lo);
    const int s = random_vertex(rng, g);
    const VertexSet src = VertexSet::single(s);
    return check_conv(g, s, random_subset(rng, g, src), random_subset(rng, g, src), backend);
  }
  if (theorem == "T3.5") {
    Graph g = random_graph(rng, Directedness::Directed, nv, ne, lo);
    const int s = random_vertex(rng, g);
    int t = random_vertex(rng, g);
    while (t == s) t = random_vertex(rng, g);
    const VertexSet src = VertexSet::single(s), dst = VertexSet::single(t);
    auto f = pair_cert(g, random_pair_function(g, src, dst, rng), src, dst);
    auto h = pair_cert(g, random_pair_function(g, src, dst, rng), src, dst);
    return check_thm_3_5(g, s, t, f, h, backend);
  }
  if (theorem == "E-vdBK1" || theorem == "E-new1") {
    Graph g = random_graph(rng, Directedness::Undirected, nv, ne, lo);
    const int s = random_vertex(rng, g);
    int t = random_vertex(rng, g);
    while (t == s) t = random_vertex(rng, g);
    int a = random_vertex(rng, g), b = random_vertex(rng, g);
    while (g.num_vertices() > 2 && (a == s || a == t)) a = random_vertex(rng, g);
    while (g.num_vertices() > 2 && (b == s || b == t)) b = random_vertex(rng, g);
    return theorem == "E-vdBK1" ? check_vdBK1(g, s, t, a, b, backend) : check_new1(g, s, t, a, b, backend);
  }
  if (theorem == "CEX-directed") {
    // Half the instances embed the gadget s->v, t->v, v->a on v0..v3.
    const int n = 4 + static_cast<int>(rng.below(std::max(1, nv - 3)));
    std::vector<PlannedEdge> edges;
    int s, t, a;
    if (rng.coin()) {
      edges = {{0, 2, true}, {1, 2, true}, {2, 3, true}};
      s = 0, t = 1, a = 3;
      add_random_edges(rng, n, Directedness::Directed, static_cast<int>(rng.below(std::max(1, ne - 2))), edges);
    } else {
      add_random_edges(rng, n, Directedness::Directed, 1 + static_cast<int>(rng.below(ne)), edges);
      s = static_cast<int>(rng.below(n));
      do t = static_cast<int>(rng.below(n)); while (t == s);
      do a = static_cast<int>(rng.below(n)); while (a == s || a == t);
    }
    Graph g = build(rng, n, edges);
    return check_counterexample_directed(g, s, t, a, rng.coin() ? CexVariant::NotST : CexVariant::NeitherWay,
                                         backend);
  }
  if (theorem == "FALSE-mixed") {
    Graph g = random_graph(rng, Directedness::Undirected, nv, ne, lo);
    const int s = random_vertex(rng, g);
    const VertexSet src = VertexSet::single(s);
    auto a = cluster_cert(g, random_cluster_event(g, src, rng, false), s, false);
    auto b = cluster_cert(g, random_cluster_event(g, src, rng, true), s, true);
    return check_false_mixed_pair(g, s, a, b, random_subset(rng, g, src), backend);
  }
  throw InputError("no fuzz generator for theorem '" + theorem + "'");
}

FuzzSummary run_campaign(const FuzzOptions& opt) {
  FuzzSummary sum;
  sum.theorem = opt.theorem;
  sum.seed = opt.seed;
  sum.instances = opt.instances;
  if (opt.instances < 0) throw InputError("instance count must be nonnegative");
  const auto& all = campaign_theorems();
  const auto& bad = false_variant_theorems();
  if (std::find(all.begin(), all.end(), opt.theorem) == all.end() &&
      std::find(bad.begin(), bad.end(), opt.theorem) == bad.end())
    throw InputError("no fuzz generator for theorem '" + opt.theorem + "'");

  struct Outcome {
    std::optional<Report> report;
    std::string error;
  };
  std::vector<Outcome> out(opt.instances);
  auto work = [&](int begin, int end) {
    for (int i = begin; i < end; ++i) {
      try {
        out[i].report = fuzz_instance(opt.theorem, opt.seed, i, opt.backend, opt.max_vertices, opt.max_edges);
      } catch (const Error& e) {
        out[i].error = std::string(e.kind()) + ": " + e.what();
      }
    }
  };
  const int threads = std::max(1, std::min(opt.threads, opt.instances));
  if (threads <= 1) {
    work(0, opt.instances);
  } else {
    std::vector<std::future<void>> jobs;
    const int chunk = (opt.instances + threads - 1) / threads;
    for (int k = 0; k < threads; ++k) {
      const int begin = k * chunk, end = std::min(opt.instances, begin + chunk);
      if (begin < end) jobs.push_back(std::async(std::launch::async, work, begin, end));
    }
    for (auto& j : jobs) j.get();
  }

  // Aggregation runs in index order so the summary does not depend on scheduling.
  for (auto& o : out) {
    if (!o.report) {
      ++sum.errors;
      if (sum.error_messages.size() < 10) sum.error_messages.push_back(o.error);
      continue;
    }
    const Report& r = *o.report;
    switch (r.verdict) {
      case Verdict::Holds: ++sum.holds; break;
      case Verdict::Violated: ++sum.violations; break;
      case Verdict::ViolationAsExpected: ++sum.expected_violations; break;
      case Verdict::ExpectedViolationMissing: ++sum.missing_violations; break;
    }
    if (r.equality) ++sum.equalities;
    if (!sum.min_slack || r.slack < *sum.min_slack) sum.min_slack = r.slack;
    if (r.details.contains("branch")) {
      const auto b = r.details["branch"].get<std::string>();
      sum.branches[b] = sum.branches.value(b, 0) + 1;
    }
    if (!r.witness.is_null() && sum.witnesses.size() < 10) sum.witnesses.push_back(report_to_json(r));
    if (opt.keep_reports) sum.reports.push_back(r);
  }
  return sum;
}

nlohmann::json summary_to_json(const FuzzSummary& s, bool with_reports) {
  json j{{"theorem", s.theorem},
         {"seed", s.seed},
         {"instances", s.instances},
         {"holds", s.holds},
         {"violations", s.violations},
         {"expected_violations", s.expected_violations},
         {"missing_violations", s.missing_violations},
         {"equalities", s.equalities},
         {"errors", s.errors},
         {"min_slack", s.min_slack ? json(to_string(*s.min_slack)) : json(nullptr)},
         {"branches", s.branches},
         {"witnesses", s.witnesses},
         {"error_messages", s.error_messages}};
  if (with_reports) {
    json arr = json::array();
    for (const auto& r : s.reports) arr.push_back(report_to_json(r));
    j["reports"] = std::move(arr);
  }
  return j;
}

std::vector<Report> reports_from_json(const nlohmann::json& j) {
  std::vector<Report> out;
  if (j.is_array()) {
    for (const auto& item : j) {
      auto part = reports_from_json(item);
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  }
  if (!j.is_object()) throw InputError("report files must contain JSON objects or arrays");
  if (j.contains("reports")) return reports_from_json(j.at("reports"));
  if (j.contains("instance_hash")) {
    out.push_back(report_from_json(j));
    return out;
  }
  if (j.contains("instances") && j.contains("theorem")) return out;  // summary saved without reports
  throw InputError("JSON object is neither a report nor a campaign summary");
}

std::vector<MergedRow> merge_reports(const std::vector<Report>& reports) {
  std::map<std::string, MergedRow> rows;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& r : reports) {
    if (!seen.insert({r.theorem, r.instance_hash}).second) continue;
    auto& row = rows[r.theorem];
    row.theorem = r.theorem;
    ++row.instances;
    switch (r.verdict) {
      case Verdict::Holds: ++row.holds; break;
      case Verdict::Violated: ++row.violations; break;
      case Verdict::ViolationAsExpected: ++row.expected_violations; break;
      case Verdict::ExpectedViolationMissing: ++row.missing_violations; break;
    }
    if (r.equality) ++row.equalities;
    if (!row.min_slack || r.slack < *row.min_slack) row.min_slack = r.slack;
  }
  std::vector<MergedRow> out;
  for (auto& [k, v] : rows) out.push_back(v);
  return out;
}

nlohmann::json merged_to_json(const std::vector<MergedRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows)
    arr.push_back({{"theorem", r.theorem},
                   {"instances", r.instances},
                   {"holds", r.holds},
                   {"violations", r.violations},
                   {"expected_violations", r.expected_violations},
                   {"missing_violations", r.missing_violations},
                   {"equalities", r.equalities},
                   {"min_slack", r.min_slack ? json(to_string(*r.min_slack)) : json(nullptr)}});
  return arr;
}

std::string merged_to_csv(const std::vector<MergedRow>& rows) {
  std::ostringstream os;
  os << "theorem,instances,holds,violations,expected_violations,missing_violations,equalities,min_slack\n";
  for (const auto& r : rows)
    os << r.theorem << ',' << r.instances << ',' << r.holds << ',' << r.violations << ',' << r.expected_violations
       << ',' << r.missing_violations << ',' << r.equalities << ',' << (r.min_slack ? to_string(*r.min_slack) : "")
       << '\n';
  return os.str();
}

}  // namespace ccl
