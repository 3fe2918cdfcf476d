#include "kms/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kms/errors.hpp"
#include "kms/structure.hpp"

namespace kms {

PowerIterationResult spectral_radius(const SparseRows& rows, double tol, int max_iterations) {
  const std::size_t n = rows.size();
  PowerIterationResult r;
  if (n == 0) return r;
  // Nilpotent pre-pass. For a nonnegative matrix A, A^n kills the all-ones
  // vector exactly iff A^n = 0 (no cancellation can occur), and the shifted
  // iteration below would stall on the defective eigenvalue of A + I.
  {
    std::vector<double> z(n, 1.0), zn(n, 0.0);
    for (std::size_t step = 1; step <= n; ++step) {
      bool any = false;
      for (std::size_t v = 0; v < n; ++v) {
        double acc = 0.0;
        for (const auto& [w, a] : rows[v]) acc += a * z[static_cast<std::size_t>(w)];
        zn[v] = acc;
        any = any || acc != 0.0;
      }
      z.swap(zn);
      if (!any) {
        r.radius = 0.0;
        r.vec.assign(n, 0.0);
        r.iterations = static_cast<int>(step);
        r.converged = true;
        return r;
      }
    }
  }
  std::vector<double> x(n, 1.0), y(n, 0.0);
  double rho_shifted = 1.0;
  for (int it = 1; it <= max_iterations; ++it) {
    // y = (A + I) x, the shift making the peripheral eigenvalue unique.
    for (std::size_t v = 0; v < n; ++v) {
      double acc = x[v];
      for (const auto& [w, a] : rows[v]) acc += a * x[static_cast<std::size_t>(w)];
      y[v] = acc;
    }
    double num = 0.0, den = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      num += y[v] * x[v];
      den += x[v] * x[v];
    }
    rho_shifted = num / den;
    double resid = 0.0, scale = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
      resid = std::max(resid, std::abs(y[v] - rho_shifted * x[v]));
      scale = std::max(scale, std::abs(x[v]));
    }
    double norm = 0.0;
    for (double t : y) norm = std::max(norm, std::abs(t));
    if (norm == 0.0) {  // nilpotent corner: spectral radius 0
      r.radius = 0.0;
      r.vec.assign(n, 0.0);
      r.iterations = it;
      r.converged = true;
      return r;
    }
    for (std::size_t v = 0; v < n; ++v) x[v] = y[v] / norm;
    r.iterations = it;
    if (resid <= tol * std::max(1.0, rho_shifted) * std::max(1.0, scale)) {
      r.converged = true;
      break;
    }
  }
  r.radius = rho_shifted - 1.0;
  if (std::abs(r.radius) < 1e-15) r.radius = std::abs(r.radius);
  r.vec = std::move(x);
  return r;
}

std::vector<BigInt> loop_counts(const FiniteGraph& g, int v, int n_max) {
  if (v < 0 || v >= static_cast<int>(g.vertex_count()))
    throw std::invalid_argument("vertex out of range");
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  std::vector<BigInt> vec(g.vertex_count(), 0), next(g.vertex_count(), 0);
  vec[static_cast<std::size_t>(v)] = 1;
  std::vector<BigInt> counts;
  counts.reserve(static_cast<std::size_t>(n_max));
  for (int n = 1; n <= n_max; ++n) {
    for (auto& t : next) t = 0;
    for (int u = 0; u < static_cast<int>(g.vertex_count()); ++u) {
      if (vec[static_cast<std::size_t>(u)] == 0) continue;
      for (const auto& [w, a] : g.adjacency_row(u))
        next[static_cast<std::size_t>(w)] += vec[static_cast<std::size_t>(u)] * a;
    }
    std::swap(vec, next);
    counts.push_back(vec[static_cast<std::size_t>(v)]);
  }
  return counts;
}

namespace {

// Depth containing every loop of length <= n_max through the canonical base:
// any such loop needs as many steps back as it went out.
int loop_safe_depth(int n_max) { return n_max / 2 + 2; }

std::vector<int> default_schedule(const GraphFamily& family) {
  switch (family.kind()) {
    case GraphFamily::Kind::lattice_walk: {
      // Window volume grows like depth^d; keep the default modest.
      if (family.walk().dim >= 3) return {2, 4, 6, 8};
      if (family.walk().dim == 2) return {4, 8, 12, 16, 20};
      return {5, 10, 15, 20, 25, 30};
    }
    default: return {5, 10, 15, 20, 25, 30, 35, 40, 45, 50};
  }
}

// Spectral radius of the adjacency induced on the cycle-carrying vertices.
double nw_radius(const FiniteGraph& g, double power_tol, int max_iters, bool* any_cycle) {
  std::vector<int> nw = cycle_vertices(g);
  if (any_cycle) *any_cycle = !nw.empty();
  if (nw.empty()) return 0.0;
  std::vector<int> pos(g.vertex_count(), -1);
  for (std::size_t i = 0; i < nw.size(); ++i) pos[static_cast<std::size_t>(nw[i])] = static_cast<int>(i);
  SparseRows rows(nw.size());
  for (std::size_t i = 0; i < nw.size(); ++i)
    for (const auto& [w, a] : g.adjacency_row(nw[i]))
      if (pos[static_cast<std::size_t>(w)] >= 0)
        rows[i].emplace_back(pos[static_cast<std::size_t>(w)], static_cast<double>(a));
  PowerIterationResult p = spectral_radius(rows, power_tol, max_iters);
  if (!p.converged)
    throw NonConvergenceError("power iteration did not converge on the induced submatrix");
  return p.radius;
}

}  // namespace

std::vector<BigInt> family_loop_counts(const GraphFamily& family, int n_max) {
  FiniteGraph t = family.truncation(loop_safe_depth(n_max));
  std::optional<VertexId> base = family.canonical_base();
  int v = base ? t.index_of(*base) : t.default_base_vertex();
  return loop_counts(t, v, n_max);
}

std::string to_string(Beta0Method m) {
  switch (m) {
    case Beta0Method::exact_closed_form: return "exact-closed-form";
    case Beta0Method::finite_perron: return "finite-perron";
    case Beta0Method::truncation_limit: return "truncation-limit";
    case Beta0Method::mgf_minimum: return "mgf-minimum";
  }
  return "truncation-limit";
}

Beta0Result beta0(const GraphFamily& family, const Beta0Options& options) {
  Beta0Result r;
  if (family.kind() == GraphFamily::Kind::rose) {
    r.value = std::log(static_cast<double>(family.loop_count_param()));
    r.method = Beta0Method::exact_closed_form;
    r.converged = true;
    r.certificate = {{1, r.value}};
    r.notes = "single vertex with n loops has loop growth rate n";
    return r;
  }
  if (family.is_explicit_finite()) {
    FiniteGraph g = family.truncation(1);
    bool any_cycle = false;
    double rho = nw_radius(g, options.power_tol, options.max_power_iterations, &any_cycle);
    if (!any_cycle) throw EmptyNonWanderingError("graph has no cycles; no loop growth rate");
    r.value = std::log(rho);
    r.method = Beta0Method::finite_perron;
    r.converged = true;
    r.certificate = {{1, r.value}};
    r.notes = "spectral radius of the adjacency induced on the cycle vertices";
    return r;
  }
  if (family.traits().nw_class == NwClass::empty)
    throw EmptyNonWanderingError("family has no cycles; no loop growth rate");

  std::vector<int> schedule =
      options.depth_schedule.empty() ? default_schedule(family) : options.depth_schedule;
  r.method = Beta0Method::truncation_limit;
  double last = -std::numeric_limits<double>::infinity();
  for (int depth : schedule) {
    FiniteGraph t = family.truncation(depth);
    bool any_cycle = false;
    double rho = nw_radius(t, options.power_tol, options.max_power_iterations, &any_cycle);
    if (!any_cycle) continue;  // window too small to exhibit a cycle yet
    double est = std::log(rho);
    if (est < last - 1e-12)
      throw std::logic_error("truncation estimates must be nondecreasing");
    r.certificate.emplace_back(depth, est);
    if (std::abs(est - last) <= options.tol) {
      r.value = est;
      r.converged = true;
      r.notes = "successive truncation estimates agree to tolerance";
      return r;
    }
    last = est;
  }
  if (r.certificate.empty())
    throw EmptyNonWanderingError("no cycle appeared in any analyzed truncation");
  r.value = r.certificate.back().second;
  r.converged = false;
  r.notes = "schedule exhausted; the value is a lower bound for the limit";
  return r;
}

RecurrenceResult recurrence_test(const GraphFamily& family, double beta,
                                 const RecurrenceOptions& options) {
  RecurrenceResult r;
  r.beta = beta;
  r.n_max = options.n_max;
  std::optional<VertexId> base = family.canonical_base();
  r.vertex = base ? *base : family.truncation(1).vertex_id(0);
  std::vector<BigInt> counts = family_loop_counts(family, options.n_max);

  std::vector<double> terms(static_cast<std::size_t>(options.n_max) + 1, 0.0);
  terms[0] = 1.0;  // the empty loop
  double sum = 1.0;
  for (int n = 1; n <= options.n_max; ++n) {
    double t = static_cast<double>(counts[static_cast<std::size_t>(n - 1)]) *
               std::exp(-beta * static_cast<double>(n));
    terms[static_cast<std::size_t>(n)] = t;
    sum += t;
  }
  r.partial_sum = sum;

  // Align on the gcd of the lengths that occur, then compare trailing terms.
  long d = 0;
  for (int n = 1; n <= options.n_max; ++n)
    if (counts[static_cast<std::size_t>(n - 1)] > 0) d = std::gcd(d, static_cast<long>(n));
  if (d == 0) {
    r.divergent = false;
    r.tail_ratio = 0.0;
    r.tail_estimate = 0.0;
    r.classification = "convergent-so-far";
    return r;
  }
  int last = options.n_max - options.n_max % static_cast<int>(d);
  while (last > 0 && terms[static_cast<std::size_t>(last)] == 0.0) last -= static_cast<int>(d);
  int prev = last - static_cast<int>(d);
  double ratio = 0.0;
  if (prev > 0 && terms[static_cast<std::size_t>(prev)] > 0.0)
    ratio = terms[static_cast<std::size_t>(last)] / terms[static_cast<std::size_t>(prev)];
  r.tail_ratio = ratio;
  if (sum >= options.divergence_bound || ratio >= options.flat_ratio) {
    r.divergent = true;
    r.classification = "divergent";
  } else {
    r.divergent = false;
    r.classification = "convergent-so-far";
    if (ratio > 0.0 && ratio < 1.0)
      r.tail_estimate = terms[static_cast<std::size_t>(last)] * ratio / (1.0 - ratio);
  }
  return r;
}

}  // namespace kms
