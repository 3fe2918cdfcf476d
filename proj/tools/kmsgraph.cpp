#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kms/classify.hpp"
#include "kms/conformal.hpp"
#include "kms/eigensolver.hpp"
#include "kms/errors.hpp"
#include "kms/families.hpp"
#include "kms/graph.hpp"
#include "kms/lattice.hpp"
#include "kms/periods.hpp"
#include "kms/report.hpp"
#include "kms/spectral.hpp"
#include "kms/structure.hpp"

namespace {

using kms::Json;

struct Options {
  std::string graph_path;
  std::string family;
  std::string params;
  std::vector<std::string> steps;
  int dim = 0;
  double beta = 0.0;
  bool beta_set = false;
  std::vector<double> betas;
  std::string f0_path;
  int depth = 50;
  double tol = 1e-12;
  std::string base;
  std::string output = "json";
  int jobs = 1;
  std::string cylinder;
  int check_depth = 3;
  int blocks = 2;
  bool stochastic = false;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

// "key=value" pairs, comma separated, integer values.
std::map<std::string, int> parse_params(const std::string& text) {
  std::map<std::string, int> out;
  if (text.empty()) return out;
  for (const auto& item : split(text, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("bad --params entry '" + item + "', expected key=value");
    try {
      out[item.substr(0, eq)] = std::stoi(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw std::invalid_argument("bad --params value in '" + item + "'");
    }
  }
  return out;
}

// "1,0:2" -> step (1,0) with multiplicity 2; the multiplicity defaults to 1.
std::pair<std::vector<int>, std::int64_t> parse_step(const std::string& text) {
  std::string vec = text;
  std::int64_t mult = 1;
  if (auto colon = text.find(':'); colon != std::string::npos) {
    vec = text.substr(0, colon);
    try {
      mult = std::stoll(text.substr(colon + 1));
    } catch (const std::exception&) {
      throw std::invalid_argument("bad --step multiplicity in '" + text + "'");
    }
  }
  std::vector<int> step;
  for (const auto& part : split(vec, ',')) {
    try {
      step.push_back(std::stoi(part));
    } catch (const std::exception&) {
      throw std::invalid_argument("bad --step component in '" + text + "'");
    }
  }
  return {step, mult};
}

kms::GraphFamily resolve_family(const Options& o) {
  if (!o.graph_path.empty()) return kms::load_graph_file(o.graph_path);
  std::string family = o.family;
  if (family.empty() && !o.steps.empty()) family = "lattice";  // bare --step means a walk
  if (family.empty())
    throw std::invalid_argument("no graph given; use --graph FILE or --family NAME");
  auto params = parse_params(o.params);
  if (family == "arms") {
    auto it = params.find("n");
    return kms::GraphFamily::arms(it == params.end() ? 3 : it->second);
  }
  if (family == "ladder") return kms::GraphFamily::ladder();
  if (family == "rose") {
    auto it = params.find("n");
    return kms::GraphFamily::rose(it == params.end() ? 2 : it->second);
  }
  if (family == "lattice") {
    if (o.steps.empty())
      throw std::invalid_argument("lattice needs at least one --step VECTOR[:MULT]");
    std::vector<std::pair<std::vector<int>, std::int64_t>> support;
    for (const auto& s : o.steps) support.push_back(parse_step(s));
    int dim = o.dim > 0 ? o.dim : static_cast<int>(support.front().first.size());
    return kms::GraphFamily::lattice_walk(kms::LatticeWalk::make(dim, support));
  }
  throw std::invalid_argument("unknown family '" + family +
                              "'; known: arms, ladder, rose, lattice");
}

kms::VertexPotential load_potential(const std::string& path) {
  if (path.empty()) return kms::VertexPotential::gauge();
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open potential file " + path);
  Json doc = Json::parse(in);
  kms::VertexPotential f0;
  f0.default_value = doc.value("default", 1.0);
  if (doc.contains("overrides"))
    for (auto& [k, v] : doc["overrides"].items()) f0.overrides[k] = v.get<double>();
  return f0;
}

void require_beta(const Options& o) {
  if (!o.beta_set) throw std::invalid_argument("this command needs --beta");
}

std::vector<kms::EigenSolution> solve_with(const kms::GraphFamily& family, const Options& o,
                                           double beta_match_tol) {
  kms::FamilySolveOptions so;
  so.beta = o.beta;
  so.depth = o.depth;
  so.f0 = load_potential(o.f0_path);
  so.solve.tol = o.tol;
  so.solve.beta_match_tol = beta_match_tol;
  if (!o.base.empty()) so.solve.base = o.base;
  return kms::solve_family(family, so);
}

void emit(const Json& report, const Options& o, const std::string& text) {
  if (o.output == "text")
    std::cout << text;
  else
    std::cout << report.dump(2) << "\n";
}

int cmd_analyze(const kms::GraphFamily& family, const Options& o) {
  auto report = kms::report_envelope("analyze");
  report["family"] = family.label();
  auto g = family.truncation(std::min(o.depth, 24));
  report["window"] = {{"depth", family.is_infinite() ? std::min(o.depth, 24) : 0},
                      {"vertices", g.vertex_count()},
                      {"edges", g.edge_count()},
                      {"frontier", g.frontier_vertices().size()}};
  auto scc = kms::strongly_connected_components(g);
  std::size_t cyclic = 0;
  for (std::size_t c = 0; c < scc.components.size(); ++c)
    if (scc.has_cycle(static_cast<int>(c))) ++cyclic;
  report["scc"] = {{"components", scc.components.size()}, {"with_cycle", cyclic}};
  if (!g.has_frontier()) report["cofinal"] = kms::is_cofinal(g);
  report["non_wandering"] = kms::to_json(kms::non_wandering(family, std::min(o.depth, 24)));

  std::ostringstream text;
  text << family.label() << ": " << g.vertex_count() << " vertices, " << g.edge_count()
       << " edges in the analyzed window; " << scc.components.size() << " strongly connected "
       << "components (" << cyclic << " with a cycle); non-wandering class "
       << kms::to_string(kms::non_wandering(family, std::min(o.depth, 24)).nw_class) << "\n";
  emit(report, o, text.str());
  return 0;
}

int cmd_beta0(const kms::GraphFamily& family, const Options& o) {
  auto report = kms::report_envelope("beta0");
  report["family"] = family.label();
  auto b = kms::beta0(family);
  report["beta0"] = kms::to_json(b);
  std::ostringstream text;
  text << family.label() << ": beta0 = " << b.value << " (" << kms::to_string(b.method);
  if (!b.converged) text << ", lower bound only";
  text << ")\n";
  if (family.kind() == kms::GraphFamily::Kind::lattice_walk) {
    auto m = kms::minimize_mgf(family.walk());
    report["mgf"] = kms::to_json(m);
    report["gap"] = std::abs(m.beta0 - b.value);
    text << "moment generating function minimum gives beta0 = " << m.beta0 << " (gap "
         << std::abs(m.beta0 - b.value) << ")\n";
  }
  emit(report, o, text.str());
  return 0;
}

int cmd_eigvec(const kms::GraphFamily& family, const Options& o) {
  require_beta(o);
  auto report = kms::report_envelope("eigvec");
  report["family"] = family.label();
  report["beta"] = o.beta;
  auto sols = solve_with(family, o, 1e-6);
  Json arr = Json::array();
  std::ostringstream text;
  text << family.label() << " at beta = " << o.beta << ": " << sols.size() << " solution(s)\n";
  for (const auto& s : sols) {
    Json j = kms::to_json(s);
    if (o.stochastic) {
      auto st = kms::to_stochastic(*s.graph, s.beta, s.potential, s.xi);
      j["stochastic"] = kms::to_json(st);
    }
    arr.push_back(std::move(j));
    text << "  " << s.description << " (residual " << s.residual << ")\n";
    for (std::size_t v = 0; v < std::min<std::size_t>(s.graph->vertex_count(), 8); ++v)
      text << "    xi[" << s.graph->vertex_id(static_cast<int>(v)) << "] = " << s.xi[v] << "\n";
    if (s.graph->vertex_count() > 8) text << "    ...\n";
  }
  report["solutions"] = arr;
  emit(report, o, text.str());
  return 0;
}

int cmd_measure(const kms::GraphFamily& family, const Options& o) {
  require_beta(o);
  if (o.cylinder.empty())
    throw std::invalid_argument("measure needs --cylinder EDGE,EDGE,... (';' also separates)");
  auto report = kms::report_envelope("measure");
  report["family"] = family.label();
  report["beta"] = o.beta;
  auto sols = solve_with(family, o, 1e-6);
  kms::CylinderMeasure m(sols.front());
  char sep = o.cylinder.find(';') != std::string::npos ? ';' : ',';
  auto ids = split(o.cylinder, sep);
  double value = m.measure_of(ids);
  report["cylinder"] = ids;
  report["measure"] = value;
  report["solution_residual"] = sols.front().residual;
  auto add = kms::check_additivity(m, o.check_depth);
  auto dual = kms::ruelle_dual_check(m, o.check_depth);
  report["additivity"] = kms::to_json(add);
  report["shift_duality"] = kms::to_json(dual);
  std::ostringstream text;
  text << "m(Z(" << o.cylinder << ")) = " << value << "\n"
       << "additivity defect " << add.max_error << " over " << add.cylinders_checked
       << " cylinders; shift-duality defect " << dual.max_error << " over "
       << dual.paths_checked << " paths\n";
  emit(report, o, text.str());
  return 0;
}

int cmd_periods(const kms::GraphFamily& family, const Options& o) {
  auto report = kms::report_envelope("periods");
  report["family"] = family.label();
  kms::PeriodOptions po;
  po.depth = std::min(o.depth, 24);
  auto d = kms::period_d(family, po);
  kms::DPrimeOptions dpo;
  dpo.depth = std::min(o.depth, 24);
  auto dp = kms::d_prime_search(family, dpo);
  report["d"] = kms::to_json(d);
  report["d_prime"] = kms::to_json(dp);
  std::ostringstream text;
  text << family.label() << ": d = " << d.d << " (" << kms::to_string(d.method) << "); d' = ";
  if (dp.exact)
    text << *dp.exact;
  else
    text << "between " << dp.lower_certificate << " and " << dp.upper_bound << " (undetermined)";
  text << "\n";
  emit(report, o, text.str());
  return 0;
}

int cmd_classify(const kms::GraphFamily& family, const Options& o) {
  auto report = kms::report_envelope("classify");
  kms::ClassifyOptions co;
  co.betas = o.betas;
  co.depth = o.depth;
  co.jobs = o.jobs;
  auto inv = kms::classify(family, co);
  report["classification"] = kms::to_json(inv);
  std::ostringstream text;
  text << inv.family << "\n"
       << "  weight range: " << inv.weight_range_text << "\n"
       << "  state range:  " << inv.state_range_text << "\n";
  if (inv.beta0) text << "  beta0 = " << inv.beta0->value << "\n";
  if (inv.uniqueness_at_beta0) text << "  at beta0: " << *inv.uniqueness_at_beta0 << "\n";
  text << "  d = " << inv.d.d << ", d' = ";
  if (inv.d_prime.exact)
    text << *inv.d_prime.exact;
  else
    text << "undetermined";
  text << "\n";
  for (const auto& s : inv.samples) {
    text << "  beta = " << s.beta << ": ";
    if (!s.feasible) {
      text << "no weight (" << s.note << ")\n";
      continue;
    }
    text << s.ray_count << " ray(s)";
    if (s.state) text << (s.state->is_state ? ", normalizes to a state" : ", weight only");
    if (s.factor && s.factor->type != kms::FactorType::inconclusive) {
      if (s.factor->type == kms::FactorType::type_ii_infinity)
        text << ", factor II_inf";
      else
        text << ", factor III with scale " << s.factor->lambda;
    }
    text << "\n";
  }
  emit(report, o, text.str());
  return 0;
}

int cmd_recode(const kms::GraphFamily& family, const Options& o) {
  auto report = kms::report_envelope("recode");
  report["family"] = family.label();
  report["blocks"] = o.blocks;
  auto g = family.truncation(family.is_infinite() ? o.depth : 1);
  auto h = kms::recode(g, o.blocks);
  report["vertices"] = h.vertex_count();
  report["edges"] = h.edge_count();
  report["graph"] = Json::parse(kms::graph_document(h));
  std::ostringstream text;
  text << family.label() << " recoded with blocks of " << o.blocks << ": " << h.vertex_count()
       << " vertices, " << h.edge_count() << " edges\n";
  if (!h.has_frontier()) {
    auto hb = kms::beta0(kms::GraphFamily::explicit_graph(h));
    report["beta0"] = kms::to_json(hb);
    text << "critical value " << hb.value << "\n";
  }
  emit(report, o, text.str());
  return 0;
}

int cmd_lattice(const kms::GraphFamily& family, const Options& o) {
  if (family.kind() != kms::GraphFamily::Kind::lattice_walk)
    throw std::invalid_argument("the lattice command needs --family lattice with --step flags");
  const auto& walk = family.walk();
  auto report = kms::report_envelope("lattice");
  report["family"] = family.label();
  auto m = kms::minimize_mgf(walk);
  report["mgf"] = kms::to_json(m);
  report["semigroup_generates"] = kms::semigroup_generates(walk);
  double beta = o.beta_set ? o.beta : m.beta0;
  auto rays = kms::ray_structure(walk, beta);
  report["rays"] = kms::to_json(rays);
  std::ostringstream text;
  text << family.label() << ": c_min = (";
  for (std::size_t i = 0; i < m.c_min.size(); ++i) text << (i ? ", " : "") << m.c_min[i];
  text << "), beta0 = " << m.beta0 << ", drift = (";
  for (std::size_t i = 0; i < m.drift.size(); ++i) text << (i ? ", " : "") << m.drift[i];
  text << ")\nat beta = " << beta << ": " << rays.description << "\n";
  emit(report, o, text.str());
  return 0;
}

int cmd_reproduce(const Options& o) {
  auto report = kms::report_envelope("reproduce");
  auto golden = kms::reproduce_examples();
  report["golden"] = kms::to_json(golden);
  std::ostringstream text;
  for (const auto& r : golden.rows) {
    text << (r.pass ? "[pass] " : "[FAIL] ") << r.example << ": " << r.quantity
         << " expected " << r.expected << " got " << r.actual << " (tol " << r.tol << ")\n";
  }
  text << (golden.all_pass() ? "all rows match\n" : "MISMATCH\n");
  emit(report, o, text.str());
  return golden.all_pass() ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"KMS weight and state classification for gauge actions on graph algebras"};
  app.require_subcommand(1);

  Options o;
  auto add_graph_flags = [&](CLI::App* sub) {
    sub->add_option("--graph", o.graph_path, "graph document (JSON file)");
    sub->add_option("--family", o.family, "built-in family: arms, ladder, rose, lattice");
    sub->add_option("--params", o.params, "family parameters, e.g. n=3");
    sub->add_option("--dim", o.dim, "lattice dimension (default: from the first step)");
    sub->add_option("--step", o.steps, "lattice step VECTOR[:MULT], e.g. 1:2 or 1,0:1");
    sub->add_option("--depth", o.depth, "truncation depth")->capture_default_str();
    sub->add_option("--tol", o.tol, "solver tolerance")->capture_default_str();
    sub->add_option("--output", o.output, "json|text")->capture_default_str()
        ->check(CLI::IsMember({"json", "text"}));
  };

  auto* analyze = app.add_subcommand("analyze", "structure: components, cycles, non-wandering class");
  add_graph_flags(analyze);
  auto* beta0 = app.add_subcommand("beta0", "critical inverse temperature");
  add_graph_flags(beta0);
  auto* eigvec = app.add_subcommand("eigvec", "eigenvector solutions at a given beta");
  add_graph_flags(eigvec);
  eigvec->add_option("--beta", o.beta, "inverse temperature")->each([&](const std::string&) {
    o.beta_set = true;
  });
  eigvec->add_option("--f0", o.f0_path, "vertex potential JSON {\"default\":..,\"overrides\":{..}}");
  eigvec->add_option("--base-vertex,--base", o.base, "normalization vertex");
  eigvec->add_flag("--stochastic", o.stochastic, "include the row-stochastic rescaling");
  auto* measure = app.add_subcommand("measure", "cylinder measure and consistency checks");
  add_graph_flags(measure);
  measure->add_option("--beta", o.beta, "inverse temperature")->each([&](const std::string&) {
    o.beta_set = true;
  });
  measure->add_option("--f0", o.f0_path, "vertex potential JSON");
  measure->add_option("--base-vertex,--base", o.base, "normalization vertex");
  measure->add_option("--cylinder", o.cylinder, "edge ids, comma separated (';' if ids hold commas)");
  measure->add_option("--check-depth", o.check_depth, "refinement depth for the checks")->capture_default_str();
  auto* periods = app.add_subcommand("periods", "length-difference group generators d and d'");
  add_graph_flags(periods);
  auto* classify = app.add_subcommand("classify", "full invariant report");
  add_graph_flags(classify);
  classify->add_option("--betas", o.betas, "inverse temperatures to sample");
  classify->add_option("--jobs", o.jobs, "parallel sample evaluation (deterministic merge)")->capture_default_str();
  auto* recode = app.add_subcommand("recode", "higher-block recoding");
  add_graph_flags(recode);
  recode->add_option("--blocks", o.blocks, "block length")->capture_default_str();
  auto* lattice = app.add_subcommand("lattice", "moment generating function minimum and rays");
  add_graph_flags(lattice);
  lattice->add_option("--beta", o.beta, "inverse temperature for the ray structure")
      ->each([&](const std::string&) { o.beta_set = true; });
  auto* reproduce = app.add_subcommand("reproduce", "recompute the worked examples against stored values");
  reproduce->add_option("--output", o.output, "json|text")->capture_default_str()
      ->check(CLI::IsMember({"json", "text"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);  // prints usage or the requested help text
    return code == 0 ? 0 : 1;
  }

  try {
    if (reproduce->parsed()) return cmd_reproduce(o);
    auto family = resolve_family(o);
    if (analyze->parsed()) return cmd_analyze(family, o);
    if (beta0->parsed()) return cmd_beta0(family, o);
    if (eigvec->parsed()) return cmd_eigvec(family, o);
    if (measure->parsed()) return cmd_measure(family, o);
    if (periods->parsed()) return cmd_periods(family, o);
    if (classify->parsed()) return cmd_classify(family, o);
    if (recode->parsed()) return cmd_recode(family, o);
    if (lattice->parsed()) return cmd_lattice(family, o);
    throw std::invalid_argument("no command");
  } catch (const Json::parse_error& e) {
    std::cout << Json{{"error", e.what()}, {"kind", "validation"}}.dump(2) << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cout << Json{{"error", e.what()}, {"kind", "validation"}}.dump(2) << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cout << Json{{"error", e.what()}, {"kind", "computation"}}.dump(2) << "\n";
    return 2;
  }
}
