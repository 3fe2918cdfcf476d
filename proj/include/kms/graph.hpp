#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace kms {

using VertexId = std::string;

// A directed edge between named vertices. Ids are unique within a graph and
// define the deterministic iteration order everywhere.
struct Edge {
  std::string id;
  VertexId src;
  VertexId dst;
};

// Finite directed multigraph, possibly a truncation of an infinite graph.
// Frontier vertices are present but lack part of their out-edge set; every
// non-frontier vertex carries its full out-edge set and must emit at least
// one edge (sink-free).
class FiniteGraph {
public:
  static FiniteGraph make(std::vector<VertexId> vertices, std::vector<Edge> edges,
                          std::set<VertexId> frontier = {});

  std::size_t vertex_count() const { return vertex_ids_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  const std::vector<VertexId>& vertex_ids() const { return vertex_ids_; }
  const VertexId& vertex_id(int v) const { return vertex_ids_[static_cast<std::size_t>(v)]; }
  bool has_vertex(const VertexId& id) const;
  int index_of(const VertexId& id) const;  // throws std::invalid_argument on unknown id

  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int e) const { return edges_[static_cast<std::size_t>(e)]; }
  int edge_index_of(const std::string& id) const;
  int edge_src(int e) const { return edge_src_[static_cast<std::size_t>(e)]; }
  int edge_dst(int e) const { return edge_dst_[static_cast<std::size_t>(e)]; }

  // Out-edges of v as indices into edges(), sorted by edge id.
  std::span<const int> out_edges(int v) const;
  // Aggregated adjacency row: (w, multiplicity) pairs sorted by w.
  const std::vector<std::pair<int, std::int64_t>>& adjacency_row(int v) const;
  std::int64_t adjacency(int v, int w) const;
  std::int64_t out_degree(int v) const;  // counts parallel edges

  bool is_frontier(int v) const { return frontier_[static_cast<std::size_t>(v)]; }
  const std::vector<int>& frontier_vertices() const { return frontier_indices_; }
  bool has_frontier() const { return !frontier_indices_.empty(); }

  // First vertex in id order, the default normalization point.
  int default_base_vertex() const { return 0; }

private:
  std::vector<VertexId> vertex_ids_;           // sorted
  std::map<VertexId, int> index_;
  std::vector<Edge> edges_;                    // sorted by id
  std::map<std::string, int> edge_index_;
  std::vector<int> edge_src_, edge_dst_;
  std::vector<std::vector<int>> out_edges_;    // per vertex, sorted by edge id
  std::vector<std::vector<std::pair<int, std::int64_t>>> adjacency_;
  std::vector<bool> frontier_;
  std::vector<int> frontier_indices_;
};

// A finite path: a start vertex and a composable run of edges. The empty
// path at v represents the full cylinder of infinite paths emitted by v.
struct FinitePath {
  int start = 0;
  std::vector<int> edges;  // indices into FiniteGraph::edges()

  std::size_t length() const { return edges.size(); }
  bool empty() const { return edges.empty(); }
};

// Builds a path from a start vertex and edge indices, checking composability.
FinitePath make_path(const FiniteGraph& g, int start, std::vector<int> edge_indices);
// Same from edge ids; the start vertex is the source of the first edge.
FinitePath make_path(const FiniteGraph& g, const std::vector<std::string>& edge_ids);

int path_source(const FiniteGraph& g, const FinitePath& p);
int path_range(const FiniteGraph& g, const FinitePath& p);
// Drops the first edge (one-sided shift); requires a nonempty path.
FinitePath shift_path(const FiniteGraph& g, const FinitePath& p);
std::string path_label(const FiniteGraph& g, const FinitePath& p);

// All paths of length exactly n starting at v, ordered lexicographically by
// edge id sequence. Throws std::length_error past the materialization cap.
std::vector<FinitePath> enumerate_paths(const FiniteGraph& g, int v, int n,
                                        std::size_t max_paths = std::size_t{1} << 22);

}  // namespace kms
