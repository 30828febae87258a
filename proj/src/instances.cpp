#include <ccl/theorems.hpp>

#include <ccl/error.hpp>

#include <cctype>
#include <set>

namespace ccl {

namespace {

using nlohmann::json;

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

VertexSet vertex_list(const Graph& g, std::string_view text) {
  VertexSet out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    auto name = trim(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (name.empty()) throw InputError("empty vertex name in '" + std::string(text) + "'");
    out = out.with(g.vertex(name));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

RealFunction pointwise(const RealFunction& a, const RealFunction& b) {
  std::vector<Rational> v(a.size());
  for (std::uint64_t x = 0; x < a.size(); ++x) v[x] = a[x] * b[x];
  return RealFunction(a.dims(), std::move(v));
}

class FunctionParser {
 public:
  FunctionParser(const Graph& g, std::string_view text) : g_(g), s_(text) {}

  RealFunction parse() {
    auto f = expr();
    skip();
    if (i_ != s_.size()) fail("unexpected '" + std::string(1, s_[i_]) + "'");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw InputError("function '" + std::string(s_) + "': " + why + " at offset " + std::to_string(i_));
  }
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  bool eat(char c) {
    skip();
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }

  RealFunction expr() {
    auto f = term();
    for (;;) {
      if (eat('+'))
        f = f + term();
      else if (eat('-'))
        f = f + (-term());
      else
        return f;
    }
  }

  RealFunction term() {
    auto f = unary();
    while (eat('*')) f = pointwise(f, unary());
    return f;
  }

  RealFunction unary() {
    if (eat('-')) return -unary();
    return primary();
  }

  // Extent of "ident(...)" starting at i_, including balanced parentheses.
  std::string_view call_text() {
    std::size_t start = i_;
    while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) ++i_;
    if (i_ == start) fail("expected a name");
    if (i_ < s_.size() && s_[i_] == '(') {
      int depth = 0;
      for (; i_ < s_.size(); ++i_) {
        if (s_[i_] == '(') ++depth;
        if (s_[i_] == ')' && --depth == 0) {
          ++i_;
          break;
        }
      }
      if (depth != 0) fail("unbalanced parentheses");
    }
    return s_.substr(start, i_ - start);
  }

  RealFunction primary() {
    skip();
    if (i_ >= s_.size()) fail("unexpected end");
    const char c = s_[i_];
    if (c == '(') {
      ++i_;
      auto f = expr();
      if (!eat(')')) fail("expected ')'");
      return f;
    }
    if (c == '[') {
      auto close = s_.find(']', i_);
      if (close == std::string_view::npos) fail("expected ']'");
      auto inner = s_.substr(i_ + 1, close - i_ - 1);
      i_ = close + 1;
      return RealFunction::indicator(parse_event(g_, inner));
    }
    if (c == '!') {
      ++i_;
      skip();
      auto text = call_text();
      return RealFunction::indicator(parse_event(g_, "!" + std::string(text)));
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t start = i_;
      while (i_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[i_])) || s_[i_] == '.' || s_[i_] == '/'))
        ++i_;
      return RealFunction(g_.num_edges(), parse_rational(s_.substr(start, i_ - start)));
    }
    auto text = call_text();
    auto paren = text.find('(');
    const std::string name(text.substr(0, paren));
    const std::string args =
        paren == std::string_view::npos ? std::string() : std::string(text.substr(paren + 1, text.size() - paren - 2));
    if (name == "const") return RealFunction(g_.num_edges(), parse_rational(args));
    if (name == "size" || name == "vsize" || name == "touches") {
      VertexSet src;
      int target = -1;
      if (name == "touches") {
        auto semi = args.find(';');
        if (semi == std::string::npos) fail("touches needs 'S;v'");
        src = vertex_list(g_, args.substr(0, semi));
        target = g_.vertex(trim(args.substr(semi + 1)));
      } else {
        src = vertex_list(g_, args);
      }
      auto table = cluster_table(g_, src);
      std::vector<Rational> vals(g_.num_configs());
      for (std::uint64_t w = 0; w < g_.num_configs(); ++w) {
        const EdgeSet c = table.cluster[w];
        if (name == "size")
          vals[w] = c.count();
        else if (name == "vsize")
          vals[w] = vertex_support(g_, c).count();
        else
          vals[w] = vertex_support(g_, c).test(target) ? 1 : 0;
      }
      return RealFunction(g_.num_edges(), std::move(vals));
    }
    return RealFunction::indicator(parse_event(g_, text));
  }

  const Graph& g_;
  std::string_view s_;
  std::size_t i_ = 0;
};

const std::set<std::string>& known_theorems() {
  static const std::set<std::string> k{"T1.1", "T1.2",  "T1.3",   "T1.4", "T1.5",    "T2.5",   "T3.1",
                                       "T3.2", "T3.3", "E-conv", "T3.5", "E-vdBK1", "E-new1", "CEX-directed", "FALSE-mixed"};
  return k;
}

struct Params {
  const Graph& g;
  const json& j;

  bool has(const char* key) const { return j.contains(key); }
  std::string str(const char* key) const {
    if (!j.contains(key)) throw InputError(std::string("missing parameter '") + key + "'");
    const auto& v = j.at(key);
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number()) return v.dump();
    throw InputError(std::string("parameter '") + key + "' must be a string");
  }
  int vertex(const char* key) const { return g.vertex(str(key)); }
  VertexSet set(const char* key) const {
    if (!j.contains(key)) throw InputError(std::string("missing parameter '") + key + "'");
    const auto& v = j.at(key);
    if (v.is_string()) return vertex_list(g, v.get<std::string>());
    if (!v.is_array()) throw InputError(std::string("parameter '") + key + "' must be a list of vertex names");
    VertexSet out;
    for (const auto& name : v) out = out.with(g.vertex(name.get<std::string>()));
    return out;
  }
  // S given as "S" (set) or "s" (single vertex).
  VertexSet set_or_vertex(const char* set_key, const char* vertex_key) const {
    return has(set_key) ? set(set_key) : VertexSet::single(vertex(vertex_key));
  }
  Event event(const char* key, const char* fallback = nullptr) const {
    if (!has(key) && fallback) return parse_event(g, fallback);
    return parse_event(g, str(key));
  }
  RealFunction function(const char* key) const { return parse_function(g, str(key)); }
};

MonotoneCertificate cluster_monotone(const Graph& g, const RealFunction& f, VertexSet s, const Params& p,
                                     const char* kind_key, const std::string& role) {
  if (p.has(kind_key)) {
    auto k = p.str(kind_key);
    if (k == "increasing" || k == "cluster-increasing")
      return certify(g, f, {MonotoneKind::ClusterIncreasing, s, {}});
    if (k == "decreasing" || k == "cluster-decreasing")
      return certify(g, f, {MonotoneKind::ClusterDecreasing, s, {}});
    throw InputError(std::string(kind_key) + " must be 'increasing' or 'decreasing'");
  }
  auto inc = certify(g, f, {MonotoneKind::ClusterIncreasing, s, {}});
  if (inc.verified()) return inc;
  auto dec = certify(g, f, {MonotoneKind::ClusterDecreasing, s, {}});
  if (dec.verified()) return dec;
  std::string why = inc.witness() ? ": " + inc.witness()->reason : std::string();
  throw HypothesisError(role + " is neither increasing nor decreasing in the cluster" + why);
}

}  // namespace

RealFunction parse_function(const Graph& g, std::string_view text) { return FunctionParser(g, text).parse(); }

nlohmann::json canonical_instance(const TheoremInstance& inst) {
  return json{{"theorem", inst.theorem}, {"graph", graph_to_json(inst.graph)}, {"params", inst.params}};
}

TheoremInstance instance_from_json(const nlohmann::json& graph, const nlohmann::json& params,
                                   const std::string& theorem, int edge_cap) {
  if (!known_theorems().count(theorem)) throw InputError("unknown theorem id '" + theorem + "'");
  if (!params.is_object()) throw InputError("parameters must be a JSON object");
  return TheoremInstance{theorem, graph_from_json(graph, edge_cap), params};
}

Report run_instance(const TheoremInstance& inst, Backend backend) {
  const Graph& g = inst.graph;
  const std::string& th = inst.theorem;
  if (!known_theorems().count(th)) throw InputError("unknown theorem id '" + th + "'");
  Params p{g, inst.params};

  if (th == "T1.1" || th == "T3.1") {
    const int s = p.vertex("s");
    const VertexSet src = VertexSet::single(s);
    auto a = certify(g, p.event("A", "true"), {MonotoneKind::ClusterIncreasing, src, {}});
    auto b = certify(g, p.event("B", "true"), {MonotoneKind::ClusterIncreasing, src, {}});
    return th == "T1.1" ? check_thm_1_1(g, s, a, b, p.set("X"), p.set("Y"), backend)
                        : check_thm_3_1(g, s, a, b, p.set("X"), p.set("Y"), backend);
  }
  if (th == "T1.2") {
    const int s = p.vertex("s");
    const VertexSet src = VertexSet::single(s);
    auto a = certify(g, p.event("A", "true"), {MonotoneKind::ClusterIncreasing, src, {}});
    auto b = certify(g, p.event("B", "true"), {MonotoneKind::ClusterIncreasing, src, {}});
    return check_thm_1_2(g, s, a, b, p.set("X"), backend);
  }
  if (th == "E-vdBK1") return check_vdBK1(g, p.vertex("s"), p.vertex("t"), p.vertex("a"), p.vertex("b"), backend);
  if (th == "E-new1") return check_new1(g, p.vertex("s"), p.vertex("t"), p.vertex("a"), p.vertex("b"), backend);
  if (th == "T1.3" || th == "T3.2" || th == "T3.3") {
    const int s = p.vertex("s");
    const VertexSet src = VertexSet::single(s);
    auto f = cluster_monotone(g, p.function("f"), src, p, "f_kind", "f");
    auto h = cluster_monotone(g, p.function("g"), src, p, "g_kind", "g");
    const VertexSet x = p.has("X") ? p.set("X") : VertexSet{};
    return th == "T1.3" ? check_thm_1_3(g, s, x, f, h, backend) : check_thm_3_3(g, s, x, f, h, backend);
  }
  if (th == "T1.4") {
    const VertexSet s = p.set_or_vertex("S", "s"), t = p.set_or_vertex("T", "t");
    auto f = certify(g, p.function("f"), {MonotoneKind::ClusterIncreasing, s, {}});
    auto h = certify(g, p.function("g"), {MonotoneKind::ClusterIncreasing, t, {}});
    return check_thm_1_4(g, s, t, f, h, backend);
  }
  if (th == "T1.5" || th == "T2.5") {
    const VertexSet s = p.set_or_vertex("S", "s"), t = p.set_or_vertex("T", "t");
    auto f = certify(g, p.function("f"), {MonotoneKind::PairMonotone, s, t});
    auto h = certify(g, p.function("g"), {MonotoneKind::PairMonotone, s, t});
    if (th == "T1.5") return check_thm_1_5(g, s, t, f, h, backend);
    return check_thm_2_5(g, s, t, parse_rational(p.str("q")), f, h, backend);
  }
  if (th == "E-conv") return check_conv(g, p.vertex("s"), p.set("X"), p.set("Y"), backend);
  if (th == "T3.5") {
    const int s = p.vertex("s"), t = p.vertex("t");
    const VertexSet src = VertexSet::single(s), dst = VertexSet::single(t);
    auto f = certify(g, p.function("f"), {MonotoneKind::PairMonotone, src, dst});
    auto h = certify(g, p.function("g"), {MonotoneKind::PairMonotone, src, dst});
    return check_thm_3_5(g, s, t, f, h, backend);
  }
  if (th == "FALSE-mixed") {
    const int s = p.vertex("s");
    const VertexSet src = VertexSet::single(s);
    auto a = certify(g, p.event("A"), {MonotoneKind::ClusterDecreasing, src, {}});
    auto b = certify(g, p.event("B"), {MonotoneKind::ClusterIncreasing, src, {}});
    return check_false_mixed_pair(g, s, a, b, p.has("X") ? p.set("X") : VertexSet{}, backend);
  }
  // CEX-directed
  const std::string variant = p.has("variant") ? p.str("variant") : std::string("s!->t");
  CexVariant v;
  if (variant == "s!->t" || variant == "NotST")
    v = CexVariant::NotST;
  else if (variant == "s!->t!->s" || variant == "NeitherWay")
    v = CexVariant::NeitherWay;
  else
    throw InputError("variant must be 's!->t' or 's!->t!->s'");
  return check_counterexample_directed(g, p.vertex("s"), p.vertex("t"), p.vertex("a"), v, backend);
}

}  // namespace ccl
