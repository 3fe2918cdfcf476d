#pragma once

#include <string>
#include <vector>

#include "kms/families.hpp"
#include "kms/graph.hpp"

namespace kms {

// Strongly connected components in reverse topological order of the
// condensation (every edge between components points to an earlier entry).
struct SccDecomposition {
  std::vector<std::vector<int>> components;
  std::vector<int> component_of;        // per vertex
  std::vector<bool> component_self_loop_;

  bool has_cycle(int component) const;  // component contains an edge
};

SccDecomposition strongly_connected_components(const FiniteGraph& g);

// Vertices lying on a directed cycle of the given finite graph.
std::vector<int> cycle_vertices(const FiniteGraph& g);

struct StructureReport {
  NwClass nw_class = NwClass::undetermined;
  std::vector<VertexId> nw_vertices;  // within the analyzed truncation
  int analyzed_depth = 0;
  bool from_family_traits = false;
  std::string notes;
};

// Non-wandering classification: exact for explicit finite graphs, declared
// by family traits otherwise (the truncation then only supplies the window).
StructureReport non_wandering(const GraphFamily& family, int depth);

// Every vertex reaches every cycle. For a finite sink-free graph this holds
// iff the condensation has exactly one terminal component and that component
// contains every cycle. Requires a frontier-free graph.
bool is_cofinal(const FiniteGraph& g);

// Smallest vertex set containing `seed` that is closed under out-edges.
std::vector<int> hereditary_closure(const FiniteGraph& g, const std::vector<int>& seed);

// Higher-block presentation: vertices are the length-k paths of g, and each
// length-(k+1) path of g contributes the edge prefix -> suffix. Conjugates
// the path-space shift; k = 1 gives the edge graph.
FiniteGraph recode(const FiniteGraph& g, int k);

}  // namespace kms
