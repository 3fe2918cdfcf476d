#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kms/families.hpp"
#include "kms/graph.hpp"

namespace kms {

// Vertex potential F0 with a default value and per-vertex overrides; the
// weight of a path is the sum over the sources of its edges.
struct VertexPotential {
  double default_value = 1.0;
  std::map<VertexId, double> overrides;

  static VertexPotential gauge() { return {}; }  // F0 == 1
  double at(const FiniteGraph& g, int v) const;
  double along(const FiniteGraph& g, const FinitePath& p) const;
  std::vector<double> materialize(const FiniteGraph& g) const;
  bool is_gauge() const;
  // sign: +1 all positive, -1 all negative, 0 mixed or containing zeros
  int sign_on(const FiniteGraph& g) const;
};

// A nonnegative vector xi with sum_w A_vw xi_w = exp(beta * F0(v)) xi_v at
// every non-frontier vertex, normalized to 1 at the base vertex.
struct EigenSolution {
  std::shared_ptr<const FiniteGraph> graph;
  double beta = 0.0;
  VertexPotential potential;
  std::vector<double> xi;
  int base = 0;
  double residual = 0.0;
  bool closed_form = false;
  std::string description;

  double at(const VertexId& id) const;
};

struct ResidualReport {
  double residual = 0.0;  // max over non-frontier v, relative to max(1, xi_v)
  VertexId worst_vertex;
  std::size_t checked_vertices = 0;
  std::vector<VertexId> excluded_frontier;
  bool pass(double tol) const { return residual < tol; }
};

ResidualReport verify(const FiniteGraph& g, double beta, const VertexPotential& f0,
                      const std::vector<double>& xi);
ResidualReport verify(const EigenSolution& s);

struct SolveOptions {
  double tol = 1e-12;
  int max_iterations = 100000;
  std::optional<VertexId> base;   // default: family canonical base, else first id
  double ray_tol = 1e-8;          // ray collapse / feasibility slack
  double beta_match_tol = 1e-8;   // finite graphs: distance from the unique feasible beta
};

// Unique normalized solution on a strongly connected finite graph: the
// matched beta solves rho(D(beta)^{-1} A) = 1 by bisection (monotone for
// sign-definite F0; constant F0 is solved directly). Mixed-sign F0 is
// rejected.
EigenSolution solve_finite(const FiniteGraph& g, const VertexPotential& f0,
                           const SolveOptions& options = {});

enum class BoundaryPolicy { zero, profile };

struct FamilySolveOptions {
  double beta = 0.0;
  int depth = 50;
  VertexPotential f0 = VertexPotential::gauge();
  BoundaryPolicy boundary = BoundaryPolicy::zero;
  std::map<VertexId, double> frontier_profile;  // used by BoundaryPolicy::profile
  SolveOptions solve;
};

// All extreme normalized solutions at the given beta: closed forms for the
// built-in families, a monotone truncation iteration otherwise. Throws
// InfeasibleError when no nonnegative solution exists at this beta.
std::vector<EigenSolution> solve_family(const GraphFamily& family,
                                        const FamilySolveOptions& options);

// Feasibility threshold for the arms family: log of the real root of
// x^3 - x = k, the smallest beta admitting a nonnegative solution.
double arms_min_beta(int n_arms);
// Per-arm positivity floor at beta: the least admissible value at the first
// arm vertex.
double arms_floor(double beta);

struct StochasticRow {
  VertexId vertex;
  std::vector<std::pair<VertexId, double>> transitions;
  double row_sum = 0.0;
};

struct StochasticResult {
  std::vector<StochasticRow> rows;  // non-frontier vertices only
  double worst_row_defect = 0.0;    // max |row_sum - 1|
};

// Row-stochastic rescaling B_vw = exp(-beta F0(v)) xi_w A_vw / xi_v; the row
// sums restate the eigen-equation. Throws on a zero xi at an emitting vertex.
StochasticResult to_stochastic(const FiniteGraph& g, double beta, const VertexPotential& f0,
                               const std::vector<double>& xi);

}  // namespace kms
