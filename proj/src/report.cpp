#include "kms/report.hpp"

#include <cmath>

namespace kms {

Json json_number(double x) {
  if (std::isinf(x)) return x > 0 ? Json("inf") : Json("-inf");
  return Json(x);
}

Json report_envelope(const std::string& command) {
  Json j;
  j["schema"] = kReportSchema;
  j["command"] = command;
  return j;
}

Json to_json(const StructureReport& r) {
  Json j;
  j["nw_class"] = to_string(r.nw_class);
  j["nw_vertices"] = r.nw_vertices;
  j["analyzed_depth"] = r.analyzed_depth;
  j["from_family_traits"] = r.from_family_traits;
  j["notes"] = r.notes;
  return j;
}

Json to_json(const Beta0Result& r) {
  Json j;
  j["value"] = r.value;
  j["method"] = to_string(r.method);
  j["converged"] = r.converged;
  Json cert = Json::array();
  for (const auto& [depth, estimate] : r.certificate) cert.push_back({{"depth", depth}, {"estimate", estimate}});
  j["certificate"] = cert;
  j["notes"] = r.notes;
  return j;
}

Json to_json(const RecurrenceResult& r) {
  Json j;
  j["beta"] = r.beta;
  j["vertex"] = r.vertex;
  j["n_max"] = r.n_max;
  j["partial_sum"] = r.partial_sum;
  j["divergent"] = r.divergent;
  j["tail_ratio"] = r.tail_ratio;
  j["tail_estimate"] = json_number(r.tail_estimate);
  j["classification"] = r.classification;
  return j;
}

Json to_json(const PeriodResult& r) {
  Json j;
  j["d"] = r.d;
  j["method"] = to_string(r.method);
  j["stabilized"] = r.stabilized;
  Json windows = Json::array();
  for (const auto& [depth, d] : r.per_window) windows.push_back({{"depth", depth}, {"d", d}});
  j["per_window"] = windows;
  return j;
}

Json to_json(const DPrimeWitness& w) {
  Json j;
  j["d"] = w.d;
  j["closure_seed"] = w.closure_seed;
  j["path_length"] = w.m;
  j["length_bound"] = w.l;
  j["example_source"] = w.example_source;
  j["example_target"] = w.example_target;
  j["example_walk_lengths"] = {w.example_short, w.example_long};
  return j;
}

Json to_json(const DPrimeResult& r) {
  Json j;
  j["certified_values"] = r.certified;
  j["lower_certificate"] = r.lower_certificate;
  j["upper_bound"] = r.upper_bound;
  if (r.exact)
    j["exact"] = *r.exact;
  else
    j["exact"] = nullptr;
  j["method"] = to_string(r.method);
  j["stabilized"] = r.stabilized;
  Json ws = Json::array();
  for (const auto& w : r.witnesses) ws.push_back(to_json(w));
  j["witnesses"] = ws;
  j["notes"] = r.notes;
  return j;
}

Json to_json(const FactorResult& r) {
  Json j;
  j["type"] = to_string(r.type);
  if (r.type == FactorType::type_iii_lambda) j["lambda"] = r.lambda;
  if (!r.sandwich.empty()) j["sandwich"] = r.sandwich;
  return j;
}

Json to_json(const StateCheck& r) {
  Json j;
  j["is_state"] = r.is_state;
  j["determined"] = r.determined;
  j["total_mass"] = json_number(r.total_mass);
  j["certificate"] = r.certificate;
  if (r.threshold) j["threshold"] = *r.threshold;
  if (r.tail_ratio) j["tail_ratio"] = *r.tail_ratio;
  return j;
}

Json to_json(const ResidualReport& r) {
  Json j;
  j["residual"] = r.residual;
  j["worst_vertex"] = r.worst_vertex;
  j["checked_vertices"] = r.checked_vertices;
  j["excluded_frontier"] = r.excluded_frontier.size();
  return j;
}

Json to_json(const EigenSolution& s) {
  Json j;
  j["beta"] = s.beta;
  j["base_vertex"] = s.graph->vertex_id(s.base);
  j["closed_form"] = s.closed_form;
  j["description"] = s.description;
  j["residual"] = s.residual;
  Json xi = Json::object();
  for (std::size_t v = 0; v < s.graph->vertex_count(); ++v)
    xi[s.graph->vertex_id(static_cast<int>(v))] = s.xi[v];
  j["xi"] = xi;
  return j;
}

Json to_json(const AdditivityReport& r) {
  Json j;
  j["max_error"] = r.max_error;
  j["worst_cylinder"] = r.worst_cylinder;
  j["cylinders_checked"] = r.cylinders_checked;
  j["skipped_frontier"] = r.skipped_frontier;
  return j;
}

Json to_json(const DualityReport& r) {
  Json j;
  j["max_error"] = r.max_error;
  j["worst_cylinder"] = r.worst_cylinder;
  j["paths_checked"] = r.paths_checked;
  return j;
}

Json to_json(const MgfMinimum& m) {
  Json j;
  j["c_min"] = m.c_min;
  j["min_value"] = m.min_value;
  j["beta0"] = m.beta0;
  j["drift"] = m.drift;
  j["support_spans"] = m.support_spans;
  j["iterations"] = m.iterations;
  return j;
}

Json to_json(const RayStructure& r) {
  Json j;
  j["beta"] = r.beta;
  j["beta0"] = r.beta0;
  j["c_min"] = r.c_min;
  j["drift"] = r.drift;
  j["degenerate"] = r.degenerate;
  j["rays"] = r.rays;
  j["description"] = r.description;
  return j;
}

Json to_json(const StochasticResult& r) {
  Json j;
  Json rows = Json::object();
  for (const auto& row : r.rows) {
    Json t = Json::object();
    for (const auto& [w, p] : row.transitions) t[w] = p;
    rows[row.vertex] = {{"transitions", t}, {"row_sum", row.row_sum}};
  }
  j["rows"] = rows;
  j["worst_row_defect"] = r.worst_row_defect;
  return j;
}

Json to_json(const BetaSample& s) {
  Json j;
  j["beta"] = s.beta;
  j["feasible"] = s.feasible;
  if (s.feasible) {
    j["ray_count"] = s.ray_count;
    j["worst_residual"] = s.worst_residual;
  }
  if (s.state) j["state"] = to_json(*s.state);
  if (s.factor) j["factor"] = to_json(*s.factor);
  if (!s.note.empty()) j["note"] = s.note;
  return j;
}

Json to_json(const InvariantReport& r) {
  Json j;
  j["family"] = r.family;
  j["structure"] = to_json(r.structure);
  if (r.cofinal)
    j["cofinal"] = *r.cofinal;
  else
    j["cofinal"] = nullptr;
  if (r.beta0)
    j["beta0"] = to_json(*r.beta0);
  else
    j["beta0"] = nullptr;
  j["kms_weight_range"] = to_string(r.weight_range);
  j["kms_weight_range_text"] = r.weight_range_text;
  j["kms_state_range"] = r.state_range_text;
  if (r.recurrence_at_beta0) j["recurrence_at_beta0"] = to_json(*r.recurrence_at_beta0);
  if (r.uniqueness_at_beta0) j["uniqueness_at_beta0"] = *r.uniqueness_at_beta0;
  j["periods"] = {{"d", to_json(r.d)}, {"d_prime", to_json(r.d_prime)}};
  Json samples = Json::array();
  for (const auto& s : r.samples) samples.push_back(to_json(s));
  j["samples"] = samples;
  if (r.mgf) j["mgf"] = to_json(*r.mgf);
  if (r.truncation_crosscheck) j["truncation_crosscheck"] = to_json(*r.truncation_crosscheck);
  if (r.spectral_gap) j["spectral_gap"] = *r.spectral_gap;
  j["notes"] = r.notes;
  return j;
}

Json to_json(const GoldenRow& r) {
  Json j;
  j["example"] = r.example;
  j["quantity"] = r.quantity;
  j["expected"] = r.expected;
  j["actual"] = r.actual;
  j["tol"] = r.tol;
  j["pass"] = r.pass;
  return j;
}

Json to_json(const GoldenReport& r) {
  Json j;
  Json rows = Json::array();
  for (const auto& row : r.rows) rows.push_back(to_json(row));
  j["rows"] = rows;
  j["all_pass"] = r.all_pass();
  return j;
}

}  // namespace kms
