// cclab: command-line front end for the checkers.
//
// Exit status: 0 when the outcome is the expected one, 1 on input or
// hypothesis errors, 2 on an unexpected violation.

#include <ccl/chains.hpp>
#include <ccl/contact.hpp>
#include <ccl/error.hpp>
#include <ccl/fuzz.hpp>
#include <ccl/fuzzy.hpp>
#include <ccl/theorems.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace ccl;
using nlohmann::json;

namespace {

constexpr const char* kSchema = "cclab-report/1";

struct Global {
  std::string backend = "rational";
  std::uint64_t seed = 1;
  int edge_cap = Graph::kDefaultEdgeCap;
  std::string json_path;

  Backend parsed_backend() const { return backend == "float" ? Backend::Float : Backend::Rational; }
};

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError("'" + path + "': " + e.what());
  }
}

// A file path, or inline JSON when the text starts with '{'.
json json_arg(const std::string& text) {
  if (!text.empty() && text.front() == '{') {
    try {
      return json::parse(text);
    } catch (const json::exception& e) {
      throw InputError(std::string("inline JSON: ") + e.what());
    }
  }
  return read_json(text);
}

std::vector<std::string> split_names(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

VertexSet vertex_list(const Graph& g, const std::string& text) {
  VertexSet out;
  for (const auto& n : split_names(text)) out = out.with(g.vertex(n));
  return out;
}

int emit(const Global& cfg, json out, int code) {
  out["schema"] = kSchema;
  out["seed"] = cfg.seed;
  const std::string text = out.dump(2) + "\n";
  std::cout << text;
  if (!cfg.json_path.empty()) {
    std::ofstream f(cfg.json_path, std::ios::binary);
    if (!f) throw InputError("cannot write '" + cfg.json_path + "'");
    f << text;
  }
  return code;
}

// --- check ---------------------------------------------------------------

struct CheckArgs {
  std::string theorem, graph, params, instance;
};

int cmd_check(const Global& cfg, const CheckArgs& a) {
  TheoremInstance inst;
  if (!a.instance.empty()) {
    json j = json_arg(a.instance);
    inst = instance_from_json(j.at("graph"), j.value("params", json::object()),
                              a.theorem.empty() ? j.at("theorem").get<std::string>() : a.theorem, cfg.edge_cap);
  } else {
    if (a.theorem.empty() || a.graph.empty()) throw InputError("check needs --theorem and --graph (or --instance)");
    inst = instance_from_json(json_arg(a.graph), a.params.empty() ? json::object() : json_arg(a.params), a.theorem,
                              cfg.edge_cap);
  }
  const Report r = run_instance(inst, cfg.parsed_backend());
  json out = report_to_json(r);
  out["backend"] = cfg.backend;
  return emit(cfg, out, r.expected_outcome() ? 0 : 2);
}

// --- fuzz ----------------------------------------------------------------

struct FuzzArgs {
  std::vector<std::string> theorems;
  int instances = 1000;
  int max_vertices = 6;
  int max_edges = 10;
  int max_sites = 4;
  int threads = 1;
  bool keep_reports = false;
};

int cmd_fuzz(const Global& cfg, const FuzzArgs& a) {
  std::vector<std::string> names;
  for (const auto& t : a.theorems) {
    if (t == "all") {
      for (const auto& c : campaign_theorems()) names.push_back(c);
    } else if (t == "false-variants") {
      for (const auto& c : false_variant_theorems()) names.push_back(c);
    } else {
      names.push_back(t);
    }
  }
  if (names.empty()) throw InputError("fuzz needs at least one --theorem");
  if (a.instances < 0) throw InputError("--instances must be nonnegative");
  json campaigns = json::array();
  bool unexpected = false;
  for (const auto& name : names) {
    if (name == "T3.4" || name == "T3.4-infected") {
      const bool ones = name == "T3.4-infected";
      auto s = run_contact_campaign(cfg.seed, a.instances, ones, a.max_sites);
      json j = contact_summary_to_json(s);
      j["theorem"] = name;
      j["seed"] = cfg.seed;
      campaigns.push_back(j);
      if (!ones && !s.clean()) unexpected = true;
      continue;
    }
    FuzzOptions opt;
    opt.theorem = name;
    opt.instances = a.instances;
    opt.seed = cfg.seed;
    opt.backend = cfg.parsed_backend();
    opt.max_vertices = a.max_vertices;
    opt.max_edges = a.max_edges;
    opt.threads = a.threads;
    opt.keep_reports = a.keep_reports;
    auto s = run_campaign(opt);
    campaigns.push_back(summary_to_json(s, a.keep_reports));
    const bool false_variant = std::find(false_variant_theorems().begin(), false_variant_theorems().end(), name) !=
                               false_variant_theorems().end();
    if (!s.clean()) unexpected = true;
    if (false_variant && s.instances > 0 && s.expected_violations == 0) unexpected = true;
  }
  json out{{"command", "fuzz"}, {"instances_per_campaign", a.instances}, {"campaigns", campaigns}};
  return emit(cfg, out, unexpected ? 2 : 0);
}

// --- mcmc ----------------------------------------------------------------

struct McmcArgs {
  std::string mode = "pair";
  std::string graph, s = "s", t = "t", q = "1";
  int steps = 100000;
  bool exact = false;
};

int cmd_mcmc(const Global& cfg, const McmcArgs& a) {
  const Graph g = graph_from_json(json_arg(a.graph), cfg.edge_cap);
  const VertexSet s = vertex_list(g, a.s), t = vertex_list(g, a.t);
  const Rational q = parse_rational(a.q);
  if (a.steps < 0) throw InputError("--steps must be nonnegative");
  json out{{"command", "mcmc"}, {"mode", a.mode}, {"q", to_string(q)}};
  bool ok = true;
  if (a.mode == "pair") {
    const auto chain = build_pair_chain(g, s, t, q);
    const auto d = diagnose(chain, chain.empty_state());
    out["diagnostics"] = diagnostics_to_json(chain, d);
    ok = d.ok();
    if (!a.exact && a.steps > 0) {
      Rng rng(cfg.seed);
      std::vector<int> visits(chain.states.size(), 0);
      int state = chain.empty_state();
      for (int i = 0; i < a.steps; ++i) {
        state = step_pair_chain(chain, state, rng);
        ++visits[state];
      }
      double tv = 0;
      for (std::size_t k = 0; k < visits.size(); ++k)
        tv += std::abs(static_cast<double>(visits[k]) / a.steps - to_double(chain.stationary[k]));
      out["sample"] = {{"steps", a.steps}, {"tv_empirical", tv / 2}, {"final_state", state_to_json(g, chain.states[state])}};
    }
  } else if (a.mode == "config") {
    const ConfigChain chain(g, s, t, q);
    const auto st = check_config_chain_stationary(chain);
    out["stationarity"] = {{"states", st.num_states},
                           {"rows_sum_to_one", st.rows_sum_to_one},
                           {"laws_match", st.laws_match},
                           {"residual", to_string(st.residual)},
                           {"stationary", st.stationary}};
    ok = st.ok();
    if (!a.exact && a.steps > 0) {
      const auto f = config_chain_frequencies(chain, a.steps, cfg.seed);
      json rows = json::array();
      for (const auto& r : f.rows)
        rows.push_back({{"omega", describe(g, r.omega)}, {"exact", to_string(r.exact)}, {"count", r.count}, {"z", r.z}});
      out["frequencies"] = {{"samples", f.samples},
                            {"thin", f.thin},
                            {"rows", rows},
                            {"max_abs_z", f.max_abs_z},
                            {"within_3_sigma", f.within_3_sigma}};
      ok = ok && f.within_3_sigma;
    }
  } else {
    throw InputError("--mode must be pair or config");
  }
  out["ok"] = ok;
  return emit(cfg, out, ok ? 0 : 2);
}

// --- fuzzy ---------------------------------------------------------------

struct FuzzyArgs {
  std::string graph, q = "2", alpha = "1", beta = "1", check = "all";
  std::string s, t, f, h;
};

int cmd_fuzzy(const Global& cfg, const FuzzyArgs& a) {
  const Graph g = graph_from_json(json_arg(a.graph), cfg.edge_cap);
  const FuzzyParams fp = fuzzy_params(parse_rational(a.q), parse_rational(a.alpha), parse_rational(a.beta));
  std::optional<std::pair<int, int>> st;
  if (!a.s.empty() || !a.t.empty()) {
    if (a.s.empty() || a.t.empty()) throw InputError("--s and --t go together");
    st = std::make_pair(g.vertex(a.s), g.vertex(a.t));
  }
  std::optional<MonotoneCertificate> cf;
  if (!a.f.empty()) {
    if (!st) throw InputError("--f needs --s and --t");
    cf = certify(g, parse_function(g, a.f),
                 {MonotoneKind::PairMonotone, VertexSet::single(st->first), VertexSet::single(st->second)});
  }
  json out{{"command", "fuzzy"}};
  bool ok = true;
  if (a.check == "all" || a.check == "coupling") {
    out["report"] = fuzzy_report(g, fp, a.check == "all" ? st : std::nullopt,
                                 a.check == "all" ? cf : std::nullopt);
    ok = out["report"]["ok"].get<bool>();
  } else if (a.check != "chain") {
    throw InputError("--check must be all, coupling or chain");
  }
  if ((a.check == "all" || a.check == "chain") && cf) {
    const RealFunction h = a.h.empty() ? cf->subject() : parse_function(g, a.h);
    const auto c = fuzzy_chain(g, fp, st->first, st->second, cf->subject(), h);
    out["chain"] = {{"e_fh", to_string(c.e_fh)},
                    {"mixture_fh", to_string(c.mixture_fh)},
                    {"mixture_of_products", to_string(c.mixture_of_products)},
                    {"product_of_mixtures", to_string(c.product_of_mixtures)},
                    {"e_f_e_h", to_string(c.e_f_e_h)},
                    {"ok", c.ok()}};
    ok = ok && c.ok();
  } else if (a.check == "chain") {
    throw InputError("--check chain needs --s, --t and --f");
  }
  out["ok"] = ok;
  return emit(cfg, out, ok ? 0 : 2);
}

// --- contact -------------------------------------------------------------

struct ContactArgs {
  std::string spec, check = "assoc", w, k, l, layers = "2,4,8";
  double t = 1.0;
};

int cmd_contact(const Global& cfg, const ContactArgs& a) {
  const ContactSpec spec = contact_from_json(json_arg(a.spec));
  const SiteConfig w = spec.site_set(split_names(a.w));
  json out{{"command", "contact"}, {"check", a.check}, {"spec", contact_to_json(spec)}};
  bool ok = true;
  if (a.check == "assoc" || a.check == "assoc-infected") {
    const auto r = a.check == "assoc" ? check_thm_contact(spec, a.t, w) : check_contact_given_infected(spec, a.t, w);
    out["result"] = association_to_json(spec, r);
    ok = a.check == "assoc-infected" || r.holds();
  } else if (a.check == "law") {
    out["result"] = distribution_to_json(spec, transient_distribution(spec, a.t));
  } else if (a.check == "correlations") {
    const SiteConfig k = spec.site_set(split_names(a.k)), l = spec.site_set(split_names(a.l));
    const int n = spec.num_sites();
    const SiteConfig wk = a.w.empty() ? (k & l) : w;
    auto vacant = [&](SiteConfig m) {
      return Event::from_predicate(n, [m](std::uint64_t e) { return (e & m) == 0; });
    };
    const auto c = check_finite_time_correlations(spec, a.t, k, l, wk, vacant(k & ~l), vacant(l & ~k));
    out["result"] = correlations_to_json(c);
    ok = c.ok();
  } else if (a.check == "discretize") {
    std::vector<int> schedule;
    for (const auto& s : split_names(a.layers)) schedule.push_back(std::stoi(s));
    const auto r = check_discretization(spec, a.t, schedule);
    out["result"] = discretization_to_json(r);
    ok = r.first_order;
  } else if (a.check == "discrete-assoc") {
    const auto split = split_names(a.layers);
    const auto g = discretize(spec, a.t, split.empty() ? 2 : std::stoi(split.front()));
    const auto r = check_discrete_association(g, w);
    out["result"] = discrete_association_to_json(g, r);
    ok = r.holds();
  } else if (a.check == "monotone") {
    std::vector<double> times;
    for (int i = 0; i <= 20; ++i) times.push_back(a.t * i / 20);
    const auto m = check_monotone_in_time(spec, times);
    out["result"] = {{"times", m.times}, {"infected", m.infected}, {"nonincreasing", m.nonincreasing}};
    ok = m.nonincreasing;
  } else {
    throw InputError("--check must be assoc, assoc-infected, law, correlations, discretize, discrete-assoc or monotone");
  }
  out["ok"] = ok;
  return emit(cfg, out, ok ? 0 : 2);
}

// --- report --------------------------------------------------------------

int cmd_report(const Global& cfg, const std::vector<std::string>& paths, const std::string& csv) {
  std::vector<Report> all;
  for (const auto& p : paths) {
    auto part = reports_from_json(read_json(p));
    all.insert(all.end(), part.begin(), part.end());
  }
  const auto rows = merge_reports(all);
  if (!csv.empty()) {
    std::ofstream f(csv, std::ios::binary);
    if (!f) throw InputError("cannot write '" + csv + "'");
    f << merged_to_csv(rows);
  }
  return emit(cfg, {{"command", "report"}, {"inputs", paths.size()}, {"table", merged_to_json(rows)}}, 0);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cclab: exact checkers for cluster correlation inequalities"};
  app.require_subcommand(1);
  app.fallthrough();
  Global cfg;
  app.add_option("--backend", cfg.backend, "rational or float (float adds a pre-screen; verdicts stay exact)")
      ->check(CLI::IsMember({"rational", "float"}));
  app.add_option("--seed", cfg.seed, "random seed");
  app.add_option("--edge-cap", cfg.edge_cap, "maximum number of edges to enumerate")->check(CLI::Range(0, Graph::kMaxEdges));
  app.add_option("--json", cfg.json_path, "also write the JSON output to this path");

  CheckArgs ca;
  auto* check = app.add_subcommand("check", "run one theorem checker");
  check->add_option("--theorem", ca.theorem, "theorem id, e.g. T1.5");
  check->add_option("--graph", ca.graph, "graph JSON file");
  check->add_option("--params", ca.params, "parameter JSON file or inline object");
  check->add_option("--instance", ca.instance, "JSON with theorem, graph and params");

  FuzzArgs fa;
  auto* fuzz = app.add_subcommand("fuzz", "seeded random campaign");
  fuzz->add_option("--theorem", fa.theorems, "theorem id, all, false-variants, T3.4 or T3.4-infected")->required();
  fuzz->add_option("--instances", fa.instances, "instances per campaign");
  fuzz->add_option("--max-vertices", fa.max_vertices);
  fuzz->add_option("--max-edges", fa.max_edges);
  fuzz->add_option("--max-sites", fa.max_sites, "contact campaigns");
  fuzz->add_option("--threads", fa.threads);
  fuzz->add_flag("--keep-reports", fa.keep_reports, "include every report in the summary");

  McmcArgs ma;
  auto* mcmc = app.add_subcommand("mcmc", "pair-of-clusters and configuration chains");
  mcmc->add_option("--mode", ma.mode, "pair or config")->check(CLI::IsMember({"pair", "config"}));
  mcmc->add_option("--graph", ma.graph, "graph JSON file")->required();
  mcmc->add_option("--s", ma.s, "source vertices, comma separated");
  mcmc->add_option("--t", ma.t, "target vertices, comma separated");
  mcmc->add_option("--q", ma.q, "random-cluster parameter");
  mcmc->add_option("--steps", ma.steps, "sampled steps");
  mcmc->add_flag("--exact", ma.exact, "exact checks only");

  FuzzyArgs za;
  auto* fuzzy = app.add_subcommand("fuzzy", "fuzzy Potts coupling checks");
  fuzzy->add_option("--graph", za.graph, "graph JSON file")->required();
  fuzzy->add_option("--q", za.q);
  fuzzy->add_option("--alpha", za.alpha);
  fuzzy->add_option("--beta", za.beta);
  fuzzy->add_option("--check", za.check, "all, coupling or chain");
  fuzzy->add_option("--s", za.s);
  fuzzy->add_option("--t", za.t);
  fuzzy->add_option("--f", za.f, "pair-monotone function expression");
  fuzzy->add_option("--g", za.h, "second function (defaults to f)");

  ContactArgs xa;
  auto* contact = app.add_subcommand("contact", "finite contact process");
  contact->add_option("--spec", xa.spec, "contact spec JSON file")->required();
  contact->add_option("--t", xa.t, "time");
  contact->add_option("--check", xa.check,
                      "assoc, assoc-infected, law, correlations, discretize, discrete-assoc or monotone");
  contact->add_option("--W", xa.w, "conditioning sites, comma separated");
  contact->add_option("--K", xa.k);
  contact->add_option("--L", xa.l);
  contact->add_option("--layers", xa.layers, "layer schedule, comma separated");

  std::vector<std::string> paths;
  std::string csv;
  auto* report = app.add_subcommand("report", "merge report files");
  report->add_option("paths", paths, "report or summary JSON files");
  report->add_option("--csv", csv, "also write the table as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*check) return cmd_check(cfg, ca);
    if (*fuzz) return cmd_fuzz(cfg, fa);
    if (*mcmc) return cmd_mcmc(cfg, ma);
    if (*fuzzy) return cmd_fuzzy(cfg, za);
    if (*contact) return cmd_contact(cfg, xa);
    if (*report) return cmd_report(cfg, paths, csv);
  } catch (const Error& e) {
    std::cerr << "cclab: " << e.kind() << ": " << e.what() << "\n";
    return 1;
  } catch (const json::exception& e) {
    std::cerr << "cclab: input-error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "cclab: input-error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
