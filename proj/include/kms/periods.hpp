#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kms/families.hpp"
#include "kms/graph.hpp"

namespace kms {

// Group of walk-length differences out of v: generated by
// {ref(u) + 1 - ref(w) : u -> w an edge reachable from v} with ref the BFS
// distance from v. Returns the nonnegative generator (0 for the trivial
// group).
long vertex_length_group(const FiniteGraph& g, int v);

enum class PeriodMethod { exact_finite, truncation_stabilized, translation_invariant };

std::string to_string(PeriodMethod m);

struct PeriodResult {
  long d = 0;  // generator of the intersection of the per-vertex groups
  PeriodMethod method = PeriodMethod::exact_finite;
  bool stabilized = true;  // equal across the comparison windows
  std::vector<std::pair<int, long>> per_window;  // (window depth, intersection)
};

struct PeriodOptions {
  int depth = 24;  // probe depth for infinite families
};

// d_G: the generator of the intersection over all vertices of the
// length-difference groups. Exact for explicit graphs; for families the
// per-vertex groups are evaluated on a deep probe truncation and the
// intersection is compared across growing windows.
PeriodResult period_d(const GraphFamily& family, const PeriodOptions& options = {});

struct DPrimeWitness {
  long d = 0;
  VertexId closure_seed;   // hereditary set used (forward closure of this vertex)
  int m = 0;               // path length quantified over
  int l = 0;               // length bound for the witness pair
  VertexId example_source;
  VertexId example_target;
  int example_long = 0;    // witness walk lengths at the example endpoints
  int example_short = 0;
};

struct DPrimeResult {
  std::vector<long> certified;      // all certified difference values (0 included)
  long lower_certificate = 0;       // gcd of the certified values
  long upper_bound = 0;             // d_G
  std::optional<long> exact;        // when certified or declared
  PeriodMethod method = PeriodMethod::exact_finite;
  bool stabilized = true;
  std::vector<DPrimeWitness> witnesses;
  std::string notes;
};

struct DPrimeOptions {
  int m_max = 8;
  int l_max = 8;
  int depth = 24;
};

// Certified search for the uniform length-difference group: a value d is
// certified when for some hereditary vertex class H (a single-vertex forward
// closure) and some path length M, every length-M path from H admits two
// companion walks with the same endpoints, lengths at most L, differing by
// d. Exhaustive over endpoint pairs; on truncations the start vertices are
// restricted to a frontier-safe zone and the result is depth-stabilized.
DPrimeResult d_prime_search(const GraphFamily& family, const DPrimeOptions& options = {});

enum class FactorType { type_iii_lambda, type_ii_infinity, inconclusive };

std::string to_string(FactorType t);

struct FactorResult {
  FactorType type = FactorType::inconclusive;
  double lambda = 0.0;  // exp(-d |beta|) for type III
  std::string sandwich;  // group bounds when inconclusive
};

// Factor classification from the period data at inverse temperature beta:
// conclusive exactly when the certified uniform value agrees with d_G.
FactorResult factor_type(const PeriodResult& d_g, const DPrimeResult& d_prime, double beta);

}  // namespace kms
