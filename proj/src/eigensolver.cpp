#include "kms/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kms/errors.hpp"
#include "kms/lattice.hpp"
#include "kms/spectral.hpp"
#include "kms/structure.hpp"

namespace kms {

double VertexPotential::at(const FiniteGraph& g, int v) const {
  auto it = overrides.find(g.vertex_id(v));
  return it == overrides.end() ? default_value : it->second;
}

double VertexPotential::along(const FiniteGraph& g, const FinitePath& p) const {
  double acc = 0.0;
  int v = p.start;
  for (int e : p.edges) {
    acc += at(g, v);
    v = g.edge_dst(e);
  }
  return acc;
}

std::vector<double> VertexPotential::materialize(const FiniteGraph& g) const {
  std::vector<double> f(g.vertex_count(), default_value);
  for (const auto& [id, value] : overrides)
    if (g.has_vertex(id)) f[static_cast<std::size_t>(g.index_of(id))] = value;
  return f;
}

bool VertexPotential::is_gauge() const {
  if (default_value != 1.0) return false;
  for (const auto& [id, value] : overrides)
    if (value != 1.0) return false;
  return true;
}

int VertexPotential::sign_on(const FiniteGraph& g) const {
  bool pos = false, neg = false, zero = false;
  for (double f : materialize(g)) {
    if (f > 0) pos = true;
    else if (f < 0) neg = true;
    else zero = true;
  }
  if (zero || (pos && neg)) return 0;
  return pos ? 1 : -1;
}

double EigenSolution::at(const VertexId& id) const {
  return xi[static_cast<std::size_t>(graph->index_of(id))];
}

ResidualReport verify(const FiniteGraph& g, double beta, const VertexPotential& f0,
                      const std::vector<double>& xi) {
  if (xi.size() != g.vertex_count())
    throw std::invalid_argument("vector length does not match the vertex count");
  ResidualReport r;
  std::vector<double> f = f0.materialize(g);
  for (int v = 0; v < static_cast<int>(g.vertex_count()); ++v) {
    if (g.is_frontier(v)) {
      r.excluded_frontier.push_back(g.vertex_id(v));
      continue;
    }
    double lhs = 0.0;
    for (const auto& [w, a] : g.adjacency_row(v))
      lhs += static_cast<double>(a) * xi[static_cast<std::size_t>(w)];
    double rhs = std::exp(beta * f[static_cast<std::size_t>(v)]) * xi[static_cast<std::size_t>(v)];
    double defect = std::abs(lhs - rhs) / std::max(1.0, xi[static_cast<std::size_t>(v)]);
    ++r.checked_vertices;
    if (defect > r.residual) {
      r.residual = defect;
      r.worst_vertex = g.vertex_id(v);
    }
  }
  return r;
}

ResidualReport verify(const EigenSolution& s) {
  return verify(*s.graph, s.beta, s.potential, s.xi);
}

namespace {

int resolve_base(const FiniteGraph& g, const std::optional<VertexId>& requested) {
  return requested ? g.index_of(*requested) : g.default_base_vertex();
}

SparseRows scaled_rows(const FiniteGraph& g, double beta, const std::vector<double>& f) {
  SparseRows rows(g.vertex_count());
  for (int v = 0; v < static_cast<int>(g.vertex_count()); ++v) {
    double scale = std::exp(-beta * f[static_cast<std::size_t>(v)]);
    for (const auto& [w, a] : g.adjacency_row(v))
      rows[static_cast<std::size_t>(v)].emplace_back(w, scale * static_cast<double>(a));
  }
  return rows;
}

EigenSolution finish_solution(std::shared_ptr<const FiniteGraph> g, double beta,
                              const VertexPotential& f0, std::vector<double> xi, int base,
                              bool closed_form, std::string description) {
  EigenSolution s;
  s.graph = std::move(g);
  s.beta = beta;
  s.potential = f0;
  s.xi = std::move(xi);
  s.base = base;
  s.closed_form = closed_form;
  s.description = std::move(description);
  s.residual = verify(s).residual;
  return s;
}

}  // namespace

EigenSolution solve_finite(const FiniteGraph& g, const VertexPotential& f0,
                           const SolveOptions& options) {
  if (g.has_frontier())
    throw std::invalid_argument("solve_finite needs a frontier-free graph");
  SccDecomposition scc = strongly_connected_components(g);
  if (scc.components.size() != 1)
    throw std::invalid_argument("solve_finite needs a strongly connected graph");

  std::vector<double> f = f0.materialize(g);
  int base = resolve_base(g, options.base);
  auto graph = std::make_shared<const FiniteGraph>(g);

  bool constant = std::all_of(f.begin(), f.end(), [&](double x) { return x == f[0]; });
  double beta = 0.0;
  if (constant) {
    PowerIterationResult p = spectral_radius(scaled_rows(g, 0.0, f), options.tol * 1e-1,
                                             options.max_iterations);
    if (!p.converged) throw NonConvergenceError("power iteration did not converge");
    if (f[0] == 0.0) {
      if (std::abs(p.radius - 1.0) > options.beta_match_tol)
        throw InfeasibleError("F0 == 0 admits a solution only when the spectral radius is 1");
      beta = 0.0;
    } else {
      beta = std::log(p.radius) / f[0];
    }
  } else {
    int sign = f0.sign_on(g);
    if (sign == 0)
      throw std::invalid_argument(
          "mixed-sign or vanishing potential: the matched beta is not monotone, unsupported");
    // Reduce to a positive potential, for which rho(beta) is strictly
    // decreasing; a negative potential mirrors through beta -> -beta.
    std::vector<double> fpos = f;
    if (sign < 0)
      for (double& x : fpos) x = -x;
    auto rho = [&](double b) {
      PowerIterationResult p =
          spectral_radius(scaled_rows(g, b, fpos), options.tol * 1e-1, options.max_iterations);
      if (!p.converged) throw NonConvergenceError("power iteration did not converge");
      return p.radius;
    };
    double lo, hi;  // invariant: rho(lo) >= 1 >= rho(hi)
    if (rho(0.0) >= 1.0) {
      lo = 0.0;
      hi = 1.0;
      int guard = 0;
      while (rho(hi) > 1.0) {
        lo = hi;
        hi *= 2.0;
        if (++guard > 60) throw NonConvergenceError("could not bracket the matched beta");
      }
    } else {
      hi = 0.0;
      lo = -1.0;
      int guard = 0;
      while (rho(lo) < 1.0) {
        hi = lo;
        lo *= 2.0;
        if (++guard > 60) throw NonConvergenceError("could not bracket the matched beta");
      }
    }
    for (int k = 0; k < 200 && (hi - lo) > options.tol * std::max(1.0, std::abs(lo)); ++k) {
      double mid = 0.5 * (lo + hi);
      if (rho(mid) >= 1.0) lo = mid; else hi = mid;
    }
    beta = 0.5 * (lo + hi);
    if (sign < 0) beta = -beta;
  }

  PowerIterationResult p =
      spectral_radius(scaled_rows(g, beta, f), options.tol * 1e-1, options.max_iterations);
  if (!p.converged) throw NonConvergenceError("power iteration did not converge");
  std::vector<double> xi = p.vec;

  // Polish: extra shifted multiplications drive the Collatz-Wielandt spread
  // of (W xi)_v / xi_v toward the roundoff floor. The spread bounds the worst
  // row-sum defect of the stochastic form; for a constant potential the ratio
  // center also refines the matched beta.
  {
    SparseRows rows = scaled_rows(g, beta, f);
    const std::size_t n = xi.size();
    std::vector<double> y(n, 0.0);
    std::vector<double> best = xi;
    double best_spread = std::numeric_limits<double>::infinity();
    double best_center = 1.0;
    for (int sweep = 0; sweep < 4000; ++sweep) {
      double lo_r = std::numeric_limits<double>::infinity(), hi_r = 0.0;
      for (std::size_t v = 0; v < n; ++v) {
        double acc = 0.0;
        for (const auto& [w, a] : rows[v]) acc += a * xi[static_cast<std::size_t>(w)];
        y[v] = acc;
        double ratio = acc / xi[v];
        lo_r = std::min(lo_r, ratio);
        hi_r = std::max(hi_r, ratio);
      }
      if (hi_r - lo_r < best_spread) {
        best_spread = hi_r - lo_r;
        best = xi;
        best_center = 0.5 * (lo_r + hi_r);
      }
      if (best_spread <= 4e-15) break;
      double norm = 0.0;
      for (std::size_t v = 0; v < n; ++v) {
        y[v] += xi[v];
        norm = std::max(norm, y[v]);
      }
      for (std::size_t v = 0; v < n; ++v) xi[v] = y[v] / norm;
    }
    xi = std::move(best);
    if (constant && f[0] != 0.0) beta += std::log(best_center) / f[0];
  }

  double scale = xi[static_cast<std::size_t>(base)];
  if (scale <= 0.0) throw NonConvergenceError("dominant eigenvector vanishes at the base vertex");
  for (double& x : xi) x /= scale;
  return finish_solution(graph, beta, f0, std::move(xi), base, false,
                         "dominant eigenvector of the rescaled adjacency");
}

double arms_min_beta(int n_arms) {
  // Smallest x with x^3 - x >= k, bisected to machine precision.
  double k = static_cast<double>(n_arms);
  double lo = 1.0, hi = 2.0;
  while (hi * hi * hi - hi < k) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (mid * mid * mid - mid < k) lo = mid; else hi = mid;
  }
  return std::log(0.5 * (lo + hi));
}

double arms_floor(double beta) {
  double q = std::exp(-2.0 * beta);
  return q / (1.0 - q);
}

namespace {

std::vector<double> arms_vector(const FiniteGraph& t, int n_arms, int depth, double beta,
                                const std::vector<double>& excess_values) {
  // Outward chain for arm value floor + s: split into the geometric floor
  // profile plus the excess growing like e^{n beta}; both parts are sign-safe,
  // so no cancellation builds up along deep arms.
  const double q = std::exp(-2.0 * beta);
  const double tail0 = q / (1.0 - q);  // the floor itself
  std::vector<double> xi(t.vertex_count(), 0.0);
  xi[static_cast<std::size_t>(t.index_of("1"))] = 1.0;
  for (int a = 0; a < n_arms; ++a) {
    char arm = static_cast<char>('a' + a);
    double s = excess_values[static_cast<std::size_t>(a)];
    for (int n = 1; n <= depth; ++n) {
      double value = s * std::exp(beta * static_cast<double>(n - 1)) +
                     tail0 * std::exp(-beta * static_cast<double>(n - 1));
      xi[static_cast<std::size_t>(t.index_of(std::string(1, arm) + std::to_string(n)))] = value;
      xi[static_cast<std::size_t>(t.index_of(std::string(1, arm) + "-" + std::to_string(n)))] =
          std::exp(-beta * n);
    }
  }
  return xi;
}

std::vector<EigenSolution> solve_arms(const GraphFamily& family,
                                      const FamilySolveOptions& options) {
  const int k = family.arm_count();
  const double beta = options.beta;
  double min_beta = arms_min_beta(k);
  double eb = std::exp(beta);
  double floor = beta > 0 ? arms_floor(beta) : std::numeric_limits<double>::infinity();
  double slack = eb - k * floor;
  if (!(beta > 0) || slack < -options.solve.ray_tol)
    throw InfeasibleError(
        "no nonnegative solution for arms(" + std::to_string(k) + ") at beta=" +
        std::to_string(beta) + "; the minimal beta is " + std::to_string(min_beta));

  auto graph = std::make_shared<const FiniteGraph>(family.truncation(options.depth));
  std::vector<EigenSolution> out;
  if (slack <= options.solve.ray_tol) {
    // All arms pinned to the positivity floor: the unique solution.
    std::vector<double> excess(static_cast<std::size_t>(k), 0.0);
    out.push_back(finish_solution(graph, beta, VertexPotential::gauge(),
                                  arms_vector(*graph, k, options.depth, beta, excess),
                                  graph->index_of("1"), true,
                                  "unique solution with every arm at the positivity floor"));
    return out;
  }
  // One extreme ray per arm: that arm takes all mass above the floors.
  for (int a = 0; a < k; ++a) {
    std::vector<double> excess(static_cast<std::size_t>(k), 0.0);
    excess[static_cast<std::size_t>(a)] = slack;
    out.push_back(finish_solution(
        graph, beta, VertexPotential::gauge(),
        arms_vector(*graph, k, options.depth, beta, excess), graph->index_of("1"), true,
        std::string("extreme ray loading arm ") + static_cast<char>('a' + a)));
  }
  return out;
}

std::vector<EigenSolution> solve_ladder(const GraphFamily& family,
                                        const FamilySolveOptions& options) {
  const double beta = options.beta;
  auto graph = std::make_shared<const FiniteGraph>(family.truncation(options.depth));
  // log(1 + e^beta), stable for large |beta|
  const double log1peb = beta > 0 ? beta + std::log1p(std::exp(-beta)) : std::log1p(std::exp(beta));
  std::vector<double> xi(graph->vertex_count(), 0.0);
  xi[static_cast<std::size_t>(graph->index_of("1"))] = 1.0;
  for (int n = 0; n <= options.depth; ++n) {
    double xn = std::exp((2 * n + 1) * beta - (n + 1) * log1peb);
    double yn = std::exp((n + 1) * (2.0 * beta - log1peb));
    xi[static_cast<std::size_t>(graph->index_of("x" + std::to_string(n)))] = xn;
    xi[static_cast<std::size_t>(graph->index_of("y" + std::to_string(n)))] = yn;
  }
  std::vector<EigenSolution> out;
  out.push_back(finish_solution(graph, beta, VertexPotential::gauge(), std::move(xi),
                                graph->index_of("1"), true,
                                "unique solution of the level recursion"));
  return out;
}

std::vector<EigenSolution> solve_truncation(const GraphFamily& family,
                                            const FamilySolveOptions& options) {
  auto graph = std::make_shared<const FiniteGraph>(
      family.is_explicit_finite() ? family.truncation(1) : family.truncation(options.depth));
  const FiniteGraph& t = *graph;
  std::vector<double> f = options.f0.materialize(t);
  std::optional<VertexId> base_id = options.solve.base;
  if (!base_id) base_id = family.canonical_base();
  int base = resolve_base(t, base_id);

  std::vector<double> xi(t.vertex_count(), 0.0);
  for (int v : t.frontier_vertices()) {
    auto it = options.frontier_profile.find(t.vertex_id(v));
    xi[static_cast<std::size_t>(v)] =
        (options.boundary == BoundaryPolicy::profile && it != options.frontier_profile.end())
            ? it->second
            : 0.0;
  }
  const bool pin_base = options.boundary == BoundaryPolicy::zero;
  if (pin_base) xi[static_cast<std::size_t>(base)] = 1.0;

  // Monotone fixed-point iteration from below: xi_v <- e^{-beta F0(v)} (A xi)_v
  // at free vertices. Nonnegative coefficients keep the iterates nondecreasing.
  // Boundary data needs diameter-many sweeps to reach every vertex, so the
  // relative-diff test only applies after that many iterations.
  const int min_iterations =
      std::min(static_cast<int>(t.vertex_count()) + 10, options.solve.max_iterations / 2);
  std::vector<double> next = xi;
  int it = 0;
  for (; it < options.solve.max_iterations; ++it) {
    double diff = 0.0, scale = 1.0;
    for (int v = 0; v < static_cast<int>(t.vertex_count()); ++v) {
      if (t.is_frontier(v) || (pin_base && v == base)) continue;
      double acc = 0.0;
      for (const auto& [w, a] : t.adjacency_row(v))
        acc += static_cast<double>(a) * xi[static_cast<std::size_t>(w)];
      next[static_cast<std::size_t>(v)] = std::exp(-options.beta * f[static_cast<std::size_t>(v)]) * acc;
    }
    for (std::size_t v = 0; v < xi.size(); ++v) {
      diff = std::max(diff, std::abs(next[v] - xi[v]));
      scale = std::max(scale, std::abs(next[v]));
    }
    xi = next;
    if (!std::isfinite(diff) || !std::isfinite(scale))
      throw NonConvergenceError("truncation iteration overflowed; beta may be subcritical");
    if (it >= min_iterations && diff <= options.solve.tol * scale) break;
  }
  if (it >= options.solve.max_iterations)
    throw NonConvergenceError("truncation iteration did not converge; beta may be subcritical");

  std::string note = pin_base
      ? "minimal vector from the zero-boundary iteration; the base equation is not imposed"
      : "solution propagated from the supplied frontier profile";
  std::vector<EigenSolution> out;
  out.push_back(finish_solution(graph, options.beta, options.f0, std::move(xi), base, false, note));
  return out;
}

std::vector<EigenSolution> solve_lattice(const GraphFamily& family,
                                         const FamilySolveOptions& options) {
  if (!options.f0.is_gauge())
    throw std::invalid_argument("lattice closed forms cover the gauge potential only");
  std::vector<EigenSolution> out;
  for (const std::vector<double>& c : lattice_level_set(family.walk(), options.beta,
                                                        options.solve.ray_tol)) {
    out.push_back(exponential_eigenvector(family.walk(), c, options.depth));
  }
  return out;
}

}  // namespace

std::vector<EigenSolution> solve_family(const GraphFamily& family,
                                        const FamilySolveOptions& options) {
  // A profile boundary is an explicit request for the truncation solver,
  // whatever the potential.
  bool closed_form_ok = options.f0.is_gauge() && options.boundary == BoundaryPolicy::zero &&
                        options.frontier_profile.empty();
  switch (family.kind()) {
    case GraphFamily::Kind::arms:
      if (closed_form_ok) return solve_arms(family, options);
      return solve_truncation(family, options);
    case GraphFamily::Kind::ladder:
      if (closed_form_ok) return solve_ladder(family, options);
      return solve_truncation(family, options);
    case GraphFamily::Kind::lattice_walk:
      return solve_lattice(family, options);
    case GraphFamily::Kind::rose:
    case GraphFamily::Kind::explicit_finite: {
      FiniteGraph g = family.truncation(1);
      SccDecomposition scc = strongly_connected_components(g);
      if (scc.components.size() == 1 && !g.has_frontier()) {
        EigenSolution s = solve_finite(g, options.f0, options.solve);
        if (std::abs(s.beta - options.beta) > options.solve.beta_match_tol)
          throw InfeasibleError("finite strongly connected graph admits a solution only at beta=" +
                                std::to_string(s.beta));
        s.beta = options.beta;
        s.residual = verify(s).residual;
        return {std::move(s)};
      }
      return solve_truncation(family, options);
    }
  }
  throw std::logic_error("unhandled family kind");
}

StochasticResult to_stochastic(const FiniteGraph& g, double beta, const VertexPotential& f0,
                               const std::vector<double>& xi) {
  if (xi.size() != g.vertex_count())
    throw std::invalid_argument("vector length does not match the vertex count");
  StochasticResult r;
  std::vector<double> f = f0.materialize(g);
  for (int v = 0; v < static_cast<int>(g.vertex_count()); ++v) {
    if (g.is_frontier(v)) continue;
    double xv = xi[static_cast<std::size_t>(v)];
    if (xv <= 0.0)
      throw std::invalid_argument("zero weight at emitting vertex " + g.vertex_id(v));
    StochasticRow row;
    row.vertex = g.vertex_id(v);
    double scale = std::exp(-beta * f[static_cast<std::size_t>(v)]) / xv;
    for (const auto& [w, a] : g.adjacency_row(v)) {
      double p = scale * static_cast<double>(a) * xi[static_cast<std::size_t>(w)];
      row.transitions.emplace_back(g.vertex_id(w), p);
      row.row_sum += p;
    }
    r.worst_row_defect = std::max(r.worst_row_defect, std::abs(row.row_sum - 1.0));
    r.rows.push_back(std::move(row));
  }
  return r;
}

}  // namespace kms
