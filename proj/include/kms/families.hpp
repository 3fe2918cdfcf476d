#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kms/graph.hpp"

namespace kms {

// Random-walk step distribution on Z^d: finitely supported nonnegative
// integer multiplicities, A_{vw} = mu(w - v).
struct LatticeWalk {
  int dim = 1;
  // (step, multiplicity), steps distinct, multiplicities >= 1; sorted by step.
  std::vector<std::pair<std::vector<int>, std::int64_t>> support;

  static LatticeWalk make(int dim,
                          std::vector<std::pair<std::vector<int>, std::int64_t>> support);
  std::int64_t multiplicity(const std::vector<int>& step) const;
  int max_step_norm() const;  // sup-norm radius of the support
};

enum class NwClass { empty, nonempty_finite, nonempty_infinite, undetermined };

std::string to_string(NwClass c);

// Certified structural facts about an infinite family that no finite
// truncation can establish by itself.
struct FamilyTraits {
  std::optional<NwClass> nw_class;
  std::optional<bool> cofinal;
  std::optional<bool> uniformly_bounded_out_degree;
  std::optional<long> certified_d_prime;  // exact d'_G where known
  std::string provenance;                 // one-line reason the traits hold
};

// A graph presented either explicitly or through a scheme of nested finite
// truncations. truncation(k) is an induced subgraph of truncation(k+1) and
// marks as frontier exactly the vertices missing part of their out-edges.
class GraphFamily {
public:
  enum class Kind { explicit_finite, arms, ladder, rose, lattice_walk };

  static GraphFamily explicit_graph(FiniteGraph g);
  static GraphFamily arms(int n_arms);
  static GraphFamily ladder();
  static GraphFamily rose(int n_loops);
  static GraphFamily lattice_walk(LatticeWalk walk);

  Kind kind() const { return kind_; }
  bool is_explicit_finite() const { return kind_ == Kind::explicit_finite; }
  bool is_infinite() const {
    return kind_ == Kind::arms || kind_ == Kind::ladder || kind_ == Kind::lattice_walk;
  }
  const FamilyTraits& traits() const { return traits_; }
  const LatticeWalk& walk() const;  // lattice_walk only
  int arm_count() const { return param_; }
  int loop_count_param() const { return param_; }
  std::string label() const;

  // depth >= 1; for explicit graphs every depth returns the full graph.
  FiniteGraph truncation(int depth) const;
  // Preferred normalization vertex id, if the family has a canonical one.
  std::optional<VertexId> canonical_base() const;

private:
  GraphFamily() = default;
  Kind kind_ = Kind::explicit_finite;
  int param_ = 0;  // arms: arm count; rose: loop count
  std::optional<FiniteGraph> explicit_;
  std::optional<LatticeWalk> walk_;
  FamilyTraits traits_;
};

// Vertex/edge naming helpers shared by generators and tests.
std::string lattice_vertex_name(const std::vector<int>& point);
std::vector<int> parse_lattice_vertex(const std::string& name, int dim);

// Parses the JSON graph document format:
//   {"family": "...", "params": {...}}   or
//   {"vertices": [...], "edges": [{"src": ..., "dst": ..., optional "count"/"id"}...]}
// Validates multiplicities, sink-freeness and referenced vertices.
GraphFamily load_graph_document(const std::string& json_text);
GraphFamily load_graph_file(const std::string& path);

// Serializes an explicit finite graph back to the document format.
std::string graph_document(const FiniteGraph& g);

}  // namespace kms
