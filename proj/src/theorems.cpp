#include <ccl/theorems.hpp>

#include <ccl/error.hpp>
#include <ccl/measure.hpp>
#include <ccl/order.hpp>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <functional>

namespace ccl {

namespace {

using nlohmann::json;

// Everything a checker needs once hypotheses are validated.
struct Plan {
  std::string theorem;
  Graph g;
  std::optional<Rational> q;  // random-cluster parameter; product measure otherwise
  bool four = false;
  Event a, b, rx, ry, rcap, rcup;
  Event cond;
  RealFunction f, h;
  bool expect_nonneg = true;
  bool expect_violation = false;
  json canonical;
};

std::string hex_of(const Event& e) {
  std::string out;
  static const char* digits = "0123456789abcdef";
  for (std::uint64_t base = 0; base < e.size(); base += 4) {
    int nib = 0;
    for (int k = 0; k < 4 && base + k < e.size(); ++k)
      if (e.contains(base + k)) nib |= 1 << k;
    out += digits[nib];
  }
  return out;
}

json subject_key(const RealFunction& f) {
  bool indicator = true;
  for (const auto& v : f.values())
    if (v != 0 && v != 1) indicator = false;
  if (indicator)
    return "e:" + hex_of(Event::from_predicate(f.dims(), [&](std::uint64_t w) { return f[w] != 0; }));
  json arr = json::array();
  for (const auto& v : f.values()) arr.push_back(to_string(v));
  return arr;
}

json names_of(const Graph& g, VertexSet v) {
  json arr = json::array();
  v.for_each([&](int i) { arr.push_back(g.name(i)); });
  return arr;
}

json base_canonical(const std::string& theorem, const Graph& g) {
  return json{{"theorem", theorem}, {"graph", graph_to_json(g)}, {"params", json::object()}};
}

std::string config_text(const Graph& g, Config c) { return describe(g, EdgeSet(c.bits)); }

MonotoneCertificate ensure(const Graph& g, MonotoneCertificate c, const std::string& role) {
  if (c.subject().dims() != g.num_edges())
    throw InputError(role + " is defined on " + std::to_string(c.subject().dims()) + " edges, graph has " +
                     std::to_string(g.num_edges()));
  if (!c.checked()) c = verify_monotone(g, std::move(c));
  if (!c.verified()) {
    std::string msg = role + " fails its " + to_string(c.claim().kind) + " certificate";
    if (c.witness())
      msg += ": " + c.witness()->reason + " (lower " + config_text(g, c.witness()->lower) + ", upper " +
             config_text(g, c.witness()->upper) + ")";
    throw HypothesisError(msg);
  }
  return c;
}

void need_claim(const Graph& g, const MonotoneCertificate& c, std::initializer_list<MonotoneKind> kinds, VertexSet s,
                VertexSet t, const std::string& role) {
  bool kind_ok = false;
  for (auto k : kinds) kind_ok = kind_ok || c.claim().kind == k;
  std::string wanted;
  for (auto k : kinds) wanted += std::string(wanted.empty() ? "" : " or ") + to_string(k);
  if (!kind_ok) throw HypothesisError(role + " is certified " + to_string(c.claim().kind) + ", need " + wanted);
  if (c.claim().s != s) throw HypothesisError(role + " is certified for source " + describe(g, c.claim().s) +
                                              ", need " + describe(g, s));
  if (c.claim().kind == MonotoneKind::PairMonotone && c.claim().t != t)
    throw HypothesisError(role + " is certified for target " + describe(g, c.claim().t) + ", need " + describe(g, t));
}

Event event_of(const MonotoneCertificate& c, const std::string& role) {
  if (c.event()) return *c.event();
  const auto& f = c.subject();
  for (const auto& v : f.values())
    if (v != 0 && v != 1) throw InputError(role + " must be an event (0/1 valued)");
  return Event::from_predicate(f.dims(), [&](std::uint64_t w) { return f[w] != 0; });
}

void need_undirected(const Graph& g, const std::string& theorem, const std::string& directed_version) {
  if (g.directedness() != Directedness::Undirected)
    throw UnsupportedOperation(theorem + " is stated for undirected graphs; use " + directed_version +
                               " for directed or mixed input");
}

void need_vertex(const Graph& g, int v, const std::string& role) {
  if (v < 0 || v >= g.num_vertices()) throw InputError(role + " is not a vertex id");
}

void need_avoids(const Graph& g, VertexSet x, int s, const std::string& role) {
  if (!x.subset_of(g.all_vertices())) throw InputError(role + " contains unknown vertex ids");
  if (x.test(s)) throw HypothesisError(role + " must not contain the source " + g.name(s));
}

template <class T>
Measure<T> plan_measure(const Plan& p) {
  return p.q ? random_cluster_measure<T>(p.g, *p.q) : product_measure<T>(p.g);
}

template <class T>
struct Sides {
  T lhs, rhs;
  std::optional<T> cov;
};

template <class T>
Sides<T> evaluate(const Plan& p) {
  auto mu = plan_measure<T>(p);
  Sides<T> s;
  if (p.four) {
    s.lhs = mu.probability(p.a & p.rx) * mu.probability(p.b & p.ry);
    s.rhs = mu.probability(p.a & p.b & p.rcap) * mu.probability(p.rcup);
    return s;
  }
  auto m = condition(mu, p.cond);
  T ef = expectation(m, p.f), eh = expectation(m, p.h);
  T efh(0);
  for (std::uint64_t x = 0; x < p.f.size(); ++x)
    if (m[x] != 0) efh += m[x] * scalar_from<T>(p.f[x]) * scalar_from<T>(p.h[x]);
  s.cov = efh - ef * eh;
  if (p.expect_nonneg) {
    s.lhs = ef * eh;
    s.rhs = efh;
  } else {
    s.lhs = efh;
    s.rhs = ef * eh;
  }
  return s;
}

Report finish(const Plan& p, Backend backend) {
  Report r;
  r.theorem = p.theorem;
  r.instance_hash = instance_hash(p.canonical);
  std::optional<double> float_slack;
  if (backend == Backend::Float) {
    auto d = evaluate<double>(p);
    float_slack = d.rhs - d.lhs;
  }
  auto e = evaluate<Rational>(p);
  r.lhs = e.lhs;
  r.rhs = e.rhs;
  if (e.cov) r.details["covariance"] = to_string(*e.cov);
  r.slack = r.rhs - r.lhs;
  r.equality = r.slack == 0;
  const bool holds = r.slack >= 0;
  if (p.expect_violation)
    r.verdict = holds ? Verdict::ExpectedViolationMissing : Verdict::ViolationAsExpected;
  else
    r.verdict = holds ? Verdict::Holds : Verdict::Violated;
  if (float_slack) {
    r.screened = true;
    r.details["float_slack"] = *float_slack;
    r.details["float_agrees"] = (*float_slack >= 0) == holds || std::abs(*float_slack) < 1e-9;
  }
  r.details["measure"] = p.q ? "random-cluster q=" + to_string(*p.q) : std::string("product");
  if (!holds) r.witness = json{{"lhs", to_string(r.lhs)}, {"rhs", to_string(r.rhs)}, {"instance", p.canonical}};
  return r;
}

// Shared body of the four-probability statements (Thm 1.1 / 3.1 / conv).
Plan plan_four(const std::string& theorem, const Graph& g, int s, const Event& a, const Event& b, VertexSet x,
               VertexSet y) {
  need_vertex(g, s, "s");
  need_avoids(g, x, s, "X");
  need_avoids(g, y, s, "Y");
  Plan p;
  p.theorem = theorem;
  p.g = g;
  p.four = true;
  const VertexSet src = VertexSet::single(s);
  p.a = a;
  p.b = b;
  p.rx = event_R(g, src, x);
  p.ry = event_R(g, src, y);
  p.rcap = event_R(g, src, x & y);
  p.rcup = event_R(g, src, x | y);
  p.canonical = base_canonical(theorem, g);
  p.canonical["params"] = {{"s", g.name(s)}, {"X", names_of(g, x)}, {"Y", names_of(g, y)},
                           {"A", subject_key(RealFunction::indicator(a))},
                           {"B", subject_key(RealFunction::indicator(b))}};
  return p;
}

Plan plan_cov(const std::string& theorem, const Graph& g, const Event& cond, const RealFunction& f,
              const RealFunction& h, bool expect_nonneg, json params) {
  Plan p;
  p.theorem = theorem;
  p.g = g;
  p.cond = cond;
  p.f = f;
  p.h = h;
  p.expect_nonneg = expect_nonneg;
  p.canonical = base_canonical(theorem, g);
  params["f"] = subject_key(f);
  params["g"] = subject_key(h);
  p.canonical["params"] = std::move(params);
  return p;
}

Plan plan_thm_1_1(const std::string& theorem, const Graph& g, int s, const MonotoneCertificate& a,
                  const MonotoneCertificate& b, VertexSet x, VertexSet y) {
  need_vertex(g, s, "s");
  const VertexSet src = VertexSet::single(s);
  auto ca = ensure(g, a, "A");
  auto cb = ensure(g, b, "B");
  need_claim(g, ca, {MonotoneKind::ClusterIncreasing}, src, {}, "A");
  need_claim(g, cb, {MonotoneKind::ClusterIncreasing}, src, {}, "B");
  return plan_four(theorem, g, s, event_of(ca, "A"), event_of(cb, "B"), x, y);
}

// Conditional-correlation form Pr(AB | R_X) >= Pr(A | R_X) Pr(B | R_X).
Plan plan_conditional_pair(const std::string& theorem, const Graph& g, int s, const MonotoneCertificate& a,
                           const MonotoneCertificate& b, VertexSet x) {
  need_vertex(g, s, "s");
  need_avoids(g, x, s, "X");
  const VertexSet src = VertexSet::single(s);
  auto ca = ensure(g, a, "A");
  auto cb = ensure(g, b, "B");
  need_claim(g, ca, {MonotoneKind::ClusterIncreasing}, src, {}, "A");
  need_claim(g, cb, {MonotoneKind::ClusterIncreasing}, src, {}, "B");
  return plan_cov(theorem, g, event_R(g, src, x), RealFunction::indicator(event_of(ca, "A")),
                  RealFunction::indicator(event_of(cb, "B")), true, {{"s", g.name(s)}, {"X", names_of(g, x)}});
}

bool is_increasing_kind(MonotoneKind k) { return k == MonotoneKind::ClusterIncreasing; }

Plan plan_cluster_functions(const std::string& theorem, const Graph& g, int s, VertexSet x,
                            const MonotoneCertificate& f, const MonotoneCertificate& h) {
  need_vertex(g, s, "s");
  need_avoids(g, x, s, "X");
  const VertexSet src = VertexSet::single(s);
  auto cf = ensure(g, f, "f");
  auto ch = ensure(g, h, "g");
  need_claim(g, cf, {MonotoneKind::ClusterIncreasing, MonotoneKind::ClusterDecreasing}, src, {}, "f");
  need_claim(g, ch, {MonotoneKind::ClusterIncreasing, MonotoneKind::ClusterDecreasing}, src, {}, "g");
  const bool same = is_increasing_kind(cf.claim().kind) == is_increasing_kind(ch.claim().kind);
  auto p = plan_cov(theorem, g, event_R(g, src, x), cf.subject(), ch.subject(), same,
                    {{"s", g.name(s)},
                     {"X", names_of(g, x)},
                     {"f_kind", to_string(cf.claim().kind)},
                     {"g_kind", to_string(ch.claim().kind)}});
  return p;
}

void need_disjoint_sets(const Graph& g, VertexSet s, VertexSet t) {
  if (s.empty() || t.empty()) throw InputError("S and T must be nonempty");
  if (!s.subset_of(g.all_vertices()) || !t.subset_of(g.all_vertices()))
    throw InputError("S or T contains unknown vertex ids");
  if (s.intersects(t)) throw HypothesisError("S and T must be disjoint");
}

Plan plan_pair(const std::string& theorem, const Graph& g, VertexSet s, VertexSet t, const MonotoneCertificate& f,
               const MonotoneCertificate& h) {
  need_disjoint_sets(g, s, t);
  auto cf = ensure(g, f, "f");
  auto ch = ensure(g, h, "g");
  need_claim(g, cf, {MonotoneKind::PairMonotone}, s, t, "f");
  need_claim(g, ch, {MonotoneKind::PairMonotone}, s, t, "g");
  return plan_cov(theorem, g, event_R(g, s, t), cf.subject(), ch.subject(), true,
                  {{"S", names_of(g, s)}, {"T", names_of(g, t)}});
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "HOLDS";
    case Verdict::Violated: return "VIOLATED";
    case Verdict::ViolationAsExpected: return "VIOLATION-AS-EXPECTED";
    case Verdict::ExpectedViolationMissing: return "EXPECTED-VIOLATION-MISSING";
  }
  return "?";
}

nlohmann::json report_to_json(const Report& r) {
  json j{{"theorem", r.theorem},
         {"instance_hash", r.instance_hash},
         {"lhs", to_string(r.lhs)},
         {"rhs", to_string(r.rhs)},
         {"slack", to_string(r.slack)},
         {"verdict", to_string(r.verdict)},
         {"equality", r.equality},
         {"screened", r.screened},
         {"details", r.details}};
  if (!r.witness.is_null()) j["witness"] = r.witness;
  return j;
}

Report report_from_json(const nlohmann::json& j) {
  Report r;
  try {
    r.theorem = j.at("theorem").get<std::string>();
    r.instance_hash = j.at("instance_hash").get<std::string>();
    r.lhs = parse_rational(j.at("lhs").get<std::string>());
    r.rhs = parse_rational(j.at("rhs").get<std::string>());
    r.slack = parse_rational(j.at("slack").get<std::string>());
    const auto v = j.at("verdict").get<std::string>();
    bool found = false;
    for (auto cand : {Verdict::Holds, Verdict::Violated, Verdict::ViolationAsExpected,
                      Verdict::ExpectedViolationMissing})
      if (v == to_string(cand)) {
        r.verdict = cand;
        found = true;
      }
    if (!found) throw InputError("unknown verdict " + v);
    r.equality = j.value("equality", false);
    r.screened = j.value("screened", false);
    r.details = j.value("details", json::object());
    if (j.contains("witness")) r.witness = j.at("witness");
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed report: ") + e.what());
  }
  return r;
}

std::string instance_hash(const nlohmann::json& canonical) {
  // nlohmann objects are key-sorted, so dump() is canonical.
  const std::string text = canonical.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Report check_thm_1_1(const Graph& g, int s, const MonotoneCertificate& a, const MonotoneCertificate& b, VertexSet x,
                     VertexSet y, Backend backend) {
  need_undirected(g, "T1.1", "check_thm_3_1");
  return finish(plan_thm_1_1("T1.1", g, s, a, b, x, y), backend);
}

Report check_thm_1_2(const Graph& g, int s, const MonotoneCertificate& a, const MonotoneCertificate& b, VertexSet x,
                     Backend backend) {
  need_undirected(g, "T1.2", "check_thm_3_1");
  return finish(plan_conditional_pair("T1.2", g, s, a, b, x), backend);
}

Report check_vdBK1(const Graph& g, int s, int t, int a, int b, Backend backend) {
  need_undirected(g, "E-vdBK1", "check_thm_3_1");
  for (int v : {s, t, a, b}) need_vertex(g, v, "vertex");
  if (s == t) throw HypothesisError("s and t must differ");
  const VertexSet src = VertexSet::single(s);
  auto ca = certify(g, event_reach(g, s, a), {MonotoneKind::ClusterIncreasing, src, {}});
  auto cb = certify(g, event_reach(g, s, b), {MonotoneKind::ClusterIncreasing, src, {}});
  auto p = plan_conditional_pair("E-vdBK1", g, s, ca, cb, VertexSet::single(t));
  p.canonical["params"] = {{"s", g.name(s)}, {"t", g.name(t)}, {"a", g.name(a)}, {"b", g.name(b)}};
  return finish(p, backend);
}

Report check_new1(const Graph& g, int s, int t, int a, int b, Backend backend) {
  need_undirected(g, "E-new1", "check_counterexample_directed");
  for (int v : {s, t, a, b}) need_vertex(g, v, "vertex");
  if (s == t) throw HypothesisError("s and t must differ");
  auto p = plan_cov("E-new1", g, event_R(g, VertexSet::single(s), VertexSet::single(t)),
                    RealFunction::indicator(event_reach(g, s, a)), RealFunction::indicator(event_reach(g, t, b)),
                    false, {});
  p.canonical["params"] = {{"s", g.name(s)}, {"t", g.name(t)}, {"a", g.name(a)}, {"b", g.name(b)}};
  return finish(p, backend);
}

Report check_thm_1_3(const Graph& g, int s, VertexSet x, const MonotoneCertificate& f, const MonotoneCertificate& h,
                     Backend backend) {
  need_undirected(g, "T1.3", "check_thm_3_3");
  return finish(plan_cluster_functions("T1.3", g, s, x, f, h), backend);
}

Report check_thm_1_4(const Graph& g, VertexSet s, VertexSet t, const MonotoneCertificate& f,
                     const MonotoneCertificate& h, Backend backend) {
  need_undirected(g, "T1.4", "check_counterexample_directed");
  need_disjoint_sets(g, s, t);
  auto cf = ensure(g, f, "f");
  auto ch = ensure(g, h, "g");
  need_claim(g, cf, {MonotoneKind::ClusterIncreasing}, s, {}, "f");
  need_claim(g, ch, {MonotoneKind::ClusterIncreasing}, t, {}, "g");
  return finish(plan_cov("T1.4", g, event_R(g, s, t), cf.subject(), ch.subject(), false,
                         {{"S", names_of(g, s)}, {"T", names_of(g, t)}}),
                backend);
}

Report check_thm_1_5(const Graph& g, VertexSet s, VertexSet t, const MonotoneCertificate& f,
                     const MonotoneCertificate& h, Backend backend) {
  need_undirected(g, "T1.5", "check_thm_3_5");
  return finish(plan_pair("T1.5", g, s, t, f, h), backend);
}

Report check_thm_2_5(const Graph& g, VertexSet s, VertexSet t, const Rational& q, const MonotoneCertificate& f,
                     const MonotoneCertificate& h, Backend backend) {
  if (q < 1) throw OutOfScopeError("T2.5 requires q >= 1, got q = " + to_string(q));
  need_undirected(g, "T2.5", "nothing (random-cluster measures are undirected)");
  auto p = plan_pair("T2.5", g, s, t, f, h);
  p.q = q;
  p.canonical["params"]["q"] = to_string(q);
  return finish(p, backend);
}

Report check_thm_3_1(const Graph& g, int s, const MonotoneCertificate& a, const MonotoneCertificate& b, VertexSet x,
                     VertexSet y, Backend backend) {
  return finish(plan_thm_1_1("T3.1", g, s, a, b, x, y), backend);
}

Report check_thm_3_3(const Graph& g, int s, VertexSet x, const MonotoneCertificate& f, const MonotoneCertificate& h,
                     Backend backend) {
  return finish(plan_cluster_functions("T3.3", g, s, x, f, h), backend);
}

Report check_conv(const Graph& g, int s, VertexSet x, VertexSet y, Backend backend) {
  Event all(g.num_edges(), true);
  auto p = plan_four("E-conv", g, s, all, all, x, y);
  p.canonical["params"].erase("A");
  p.canonical["params"].erase("B");
  return finish(p, backend);
}

Report check_thm_3_5(const Graph& g, int s, int t, const MonotoneCertificate& f, const MonotoneCertificate& h,
                     Backend backend) {
  if (g.directedness() != Directedness::Directed)
    throw UnsupportedOperation("T3.5 needs every edge oriented; the mixed and undirected versions are conjectures");
  need_vertex(g, s, "s");
  need_vertex(g, t, "t");
  if (s == t) throw HypothesisError("s and t must differ");
  const VertexSet src = VertexSet::single(s), dst = VertexSet::single(t);
  auto cf = ensure(g, f, "f");
  auto ch = ensure(g, h, "g");
  need_claim(g, cf, {MonotoneKind::PairMonotone}, src, dst, "f");
  need_claim(g, ch, {MonotoneKind::PairMonotone}, src, dst, "g");
  return finish(plan_cov("T3.5", g, event_Q_disjoint_clusters(g, s, t), cf.subject(), ch.subject(), true,
                         {{"s", g.name(s)}, {"t", g.name(t)}}),
                backend);
}

Report check_counterexample_directed(const Graph& g, int s, int t, int a, CexVariant variant, Backend backend) {
  for (int v : {s, t, a}) need_vertex(g, v, "vertex");
  if (s == t) throw HypothesisError("s and t must differ");
  const VertexSet src = VertexSet::single(s), dst = VertexSet::single(t);
  Event cond = variant == CexVariant::NotST ? event_R(g, src, dst) : event_mutually_unreachable(g, src, dst);
  auto p = plan_cov("CEX-directed", g, cond, RealFunction::indicator(event_reach(g, s, a)),
                    RealFunction::indicator(event_reach(g, t, a)), false, {});
  p.expect_violation = true;
  p.canonical["params"] = {{"s", g.name(s)},
                           {"t", g.name(t)},
                           {"a", g.name(a)},
                           {"variant", variant == CexVariant::NotST ? "s!->t" : "s!->t!->s"}};
  return finish(p, backend);
}

Report check_false_mixed_pair(const Graph& g, int s, const MonotoneCertificate& a, const MonotoneCertificate& b,
                              VertexSet x, Backend backend) {
  need_vertex(g, s, "s");
  need_avoids(g, x, s, "X");
  const VertexSet src = VertexSet::single(s);
  auto ca = ensure(g, a, "A");
  auto cb = ensure(g, b, "B");
  need_claim(g, ca, {MonotoneKind::ClusterDecreasing}, src, {}, "A");
  need_claim(g, cb, {MonotoneKind::ClusterIncreasing}, src, {}, "B");
  auto p = plan_cov("FALSE-mixed", g, event_R(g, src, x), RealFunction::indicator(event_of(ca, "A")),
                    RealFunction::indicator(event_of(cb, "B")), true, {{"s", g.name(s)}, {"X", names_of(g, x)}});
  p.expect_violation = true;
  return finish(p, backend);
}

EquivalenceTrace equivalence_trace(const Graph& g, int s, const MonotoneCertificate& a, const MonotoneCertificate& b,
                                   VertexSet x, VertexSet y) {
  auto p = plan_thm_1_1("T1.1", g, s, a, b, x, y);
  auto mu = product_measure<Rational>(g);
  const VertexSet src = VertexSet::single(s);
  const Event r1 = event_R(g, src, x - y), r2 = event_R(g, src, y - x);
  const Rational c = mu.probability(p.rcap);
  if (c == 0) throw ZeroProbabilityError("R_{X cap Y} has probability zero");
  auto cond = condition(mu, p.rcap);
  auto pr = [&](const Event& e) { return cond.probability(e); };

  EquivalenceTrace t;
  t.direct_lhs = mu.probability(p.a & p.rx) * mu.probability(p.b & p.ry);
  t.direct_rhs = mu.probability(p.a & p.b & p.rcap) * mu.probability(p.rcup);
  t.rebuilt_lhs = c * c * pr(p.a & r1) * pr(p.b & r2);
  t.rebuilt_rhs = c * c * pr(p.a & p.b) * pr(r1 & r2);
  t.middle = c * c * pr(p.a) * pr(r1) * pr(p.b) * pr(r2);
  t.matches = t.rebuilt_lhs == t.direct_lhs && t.rebuilt_rhs == t.direct_rhs;
  t.chain_holds = pr(p.a & r1) <= pr(p.a) * pr(r1) && pr(p.b & r2) <= pr(p.b) * pr(r2) &&
                  pr(p.a) * pr(p.b) <= pr(p.a & p.b) && pr(r1) * pr(r2) <= pr(r1 & r2);
  return t;
}

SingletonReduction singleton_reduction(const Graph& g, int s, const MonotoneCertificate& a,
                                       const MonotoneCertificate& b, VertexSet x) {
  if (x.empty()) throw InputError("X must be nonempty");
  need_vertex(g, s, "s");
  need_avoids(g, x, s, "X");
  SingletonReduction out;
  out.original = finish(plan_conditional_pair("T1.2", g, s, a, b, x), Backend::Rational);

  Surgery m = merge_vertices(g, x);
  const Graph& h = m.graph;
  const int s2 = m.vertex_map[s];
  int x2 = -1;
  x.for_each([&](int v) { x2 = m.vertex_map[v]; });
  // A'(omega') = A(configuration whose open edges are the preimage of C'_s).
  auto table = cluster_table(h, VertexSet::single(s2));
  auto transport = [&](const MonotoneCertificate& c) {
    std::vector<Rational> vals(h.num_configs());
    for (std::uint64_t w = 0; w < h.num_configs(); ++w) {
      std::uint32_t orig = 0;
      for (int e = 0; e < g.num_edges(); ++e)
        if (m.edge_map[e] >= 0 && table.cluster[w].test(m.edge_map[e])) orig |= 1u << e;
      vals[w] = c.subject()[orig];
    }
    return certify(h, RealFunction(h.num_edges(), std::move(vals)),
                   {MonotoneKind::ClusterIncreasing, VertexSet::single(s2), {}});
  };
  auto ha = transport(ensure(g, a, "A"));
  auto hb = transport(ensure(g, b, "B"));
  out.merged = finish(plan_conditional_pair("T1.2", h, s2, ha, hb, VertexSet::single(x2)), Backend::Rational);
  out.agrees = out.original.lhs == out.merged.lhs && out.original.rhs == out.merged.rhs;
  return out;
}

ProofTrace proof_trace_thm_1_1(const Graph& g, int s, const MonotoneCertificate& a, const MonotoneCertificate& b,
                               VertexSet x, VertexSet y) {
  auto p = plan_thm_1_1("T1.1", g, s, a, b, x, y);
  auto ca = ensure(g, a, "A");
  auto cb = ensure(g, b, "B");
  const Event at = reduce_event_off_EX(g, ca, s, x);
  const Event bt = reduce_event_off_EX(g, cb, s, y);
  auto mu = product_measure<Rational>(g);
  auto pr = [&](const Event& e) { return mu.probability(e); };

  ProofTrace t;
  t.reductions_ok = (at & p.rx) == (p.a & p.rx) && (bt & p.ry) == (p.b & p.ry) && at.subset_of(p.a) &&
                    bt.subset_of(p.b);
  const VertexSet z = x & y;
  if (z.empty()) {
    t.base_case = true;
    Rational lhs = pr(at & p.rx) * pr(bt & p.ry);
    Rational mid = pr(at) * pr(bt) * pr(p.rx) * pr(p.ry);
    Rational rhs = pr(at & bt) * pr(p.rcup);
    t.four_functions = lhs <= mid && mid <= rhs && rhs <= pr(p.a & p.b) * pr(p.rcup);
    t.sums_match = lhs == pr(p.a & p.rx) * pr(p.b & p.ry);
    return t;
  }

  const VertexSet n = boundary_vertices(g, z);
  t.boundary_size = n.count();
  auto dist = boundary_set_distribution<Rational>(g, z);
  t.log_modular = check_log_modular(dist, n).holds;
  if (t.boundary_size > 12) return t;

  // Dense index of each boundary set S within N.
  std::vector<int> pos(g.num_vertices(), -1);
  int k = 0;
  n.for_each([&](int v) { pos[v] = k++; });
  const std::size_t size = std::size_t{1} << k;
  std::vector<Rational> alpha(size), beta(size), join(size), meet(size);
  const Event ea = at & p.rx, eb = bt & p.ry, ec = at & bt & p.rcap, ed = p.rcup;
  for (std::uint64_t w = 0; w < g.num_configs(); ++w) {
    std::size_t idx = 0;
    for (int i = 0; i < g.num_edges(); ++i) {
      if (!((w >> i) & 1u)) continue;
      const Edge& e = g.edge(i);
      if (z.test(e.head) && !z.test(e.tail)) idx |= std::size_t{1} << pos[e.tail];
      if (!e.oriented && z.test(e.tail) && !z.test(e.head)) idx |= std::size_t{1} << pos[e.head];
    }
    if (ea.contains(w)) alpha[idx] += mu[w];
    if (eb.contains(w)) beta[idx] += mu[w];
    if (ed.contains(w)) join[idx] += mu[w];
    if (ec.contains(w)) meet[idx] += mu[w];
  }
  t.four_functions = check_ad_hypothesis<Rational>(k, alpha, beta, join, meet).holds;
  auto total = [](const std::vector<Rational>& v) {
    Rational s(0);
    for (const auto& x : v) s += x;
    return s;
  };
  t.sums_match = total(alpha) == pr(p.a & p.rx) && total(beta) == pr(p.b & p.ry) &&
                 total(join) == pr(p.rcup) && total(meet) <= pr(p.a & p.b & p.rcap);
  return t;
}

}  // namespace ccl
