#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>
#include <vector>

#include "kms/families.hpp"
#include "kms/graph.hpp"

namespace kms {

using BigInt = boost::multiprecision::cpp_int;

// Sparse nonnegative matrix given by rows of (column, weight) pairs.
using SparseRows = std::vector<std::vector<std::pair<int, double>>>;

struct PowerIterationResult {
  double radius = 0.0;
  std::vector<double> vec;  // sup-normalized dominant eigenvector
  int iterations = 0;
  bool converged = false;
};

// Spectral radius of a nonnegative matrix by power iteration on A + I,
// which is aperiodic whenever A is irreducible. Stops when the eigenpair
// residual drops below tol * max(1, radius).
PowerIterationResult spectral_radius(const SparseRows& rows, double tol = 1e-13,
                                     int max_iterations = 100000);

// Exact counts of length-n loops based at v, n = 1..n_max.
std::vector<BigInt> loop_counts(const FiniteGraph& g, int v, int n_max);

// Loop counts at the family's canonical base vertex, on a truncation deep
// enough to contain every loop of length <= n_max through that vertex.
std::vector<BigInt> family_loop_counts(const GraphFamily& family, int n_max);

enum class Beta0Method { exact_closed_form, finite_perron, truncation_limit, mgf_minimum };

std::string to_string(Beta0Method m);

struct Beta0Result {
  double value = 0.0;
  Beta0Method method = Beta0Method::truncation_limit;
  // True when the estimate sequence met the tolerance (or the value is
  // exact); false marks a lower bound only. The limit is never reported as
  // infinite, only as an unconverged lower bound.
  bool converged = false;
  std::vector<std::pair<int, double>> certificate;  // (depth, estimate), nondecreasing
  std::string notes;
};

struct Beta0Options {
  std::vector<int> depth_schedule;  // empty selects a per-family default
  double tol = 1e-9;                // stop when successive estimates agree to tol
  double power_tol = 1e-13;
  int max_power_iterations = 100000;
};

// Minimal inverse temperature: log of the growth rate of loop counts,
// computed as the spectral radius of the non-wandering-part-induced
// adjacency (exact for finite graphs, by nested truncations otherwise).
// Throws EmptyNonWanderingError when there are no cycles.
Beta0Result beta0(const GraphFamily& family, const Beta0Options& options = {});

struct RecurrenceResult {
  double beta = 0.0;
  VertexId vertex;
  int n_max = 0;
  double partial_sum = 0.0;         // includes the n = 0 term
  bool divergent = false;           // partial sums exceed the bound or terms do not decay
  double tail_ratio = 0.0;          // geometric ratio of trailing aligned terms
  double tail_estimate = 0.0;       // geometric tail bound when convergent so far
  std::string classification;       // "divergent" or "convergent-so-far"
};

struct RecurrenceOptions {
  int n_max = 60;
  double divergence_bound = 1e6;
  double flat_ratio = 0.999;  // trailing ratio at or above this flags divergence
};

// Partial sums of sum_n loops(n) * exp(-n * beta) at the canonical base
// vertex; the classification of the tail is heuristic and says so.
RecurrenceResult recurrence_test(const GraphFamily& family, double beta,
                                 const RecurrenceOptions& options = {});

}  // namespace kms
