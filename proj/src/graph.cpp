#include "kms/graph.hpp"

#include <algorithm>
#include <stdexcept>

namespace kms {

FiniteGraph FiniteGraph::make(std::vector<VertexId> vertices, std::vector<Edge> edges,
                              std::set<VertexId> frontier) {
  FiniteGraph g;
  std::sort(vertices.begin(), vertices.end());
  if (std::adjacent_find(vertices.begin(), vertices.end()) != vertices.end())
    throw std::invalid_argument("duplicate vertex id");
  if (vertices.empty()) throw std::invalid_argument("graph needs at least one vertex");
  g.vertex_ids_ = std::move(vertices);
  for (int i = 0; i < static_cast<int>(g.vertex_ids_.size()); ++i)
    g.index_[g.vertex_ids_[static_cast<std::size_t>(i)]] = i;

  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) { return a.id < b.id; });
  for (std::size_t i = 0; i + 1 < edges.size(); ++i)
    if (edges[i].id == edges[i + 1].id)
      throw std::invalid_argument("duplicate edge id: " + edges[i].id);
  g.edges_ = std::move(edges);

  const auto n = g.vertex_ids_.size();
  g.out_edges_.resize(n);
  g.adjacency_.resize(n);
  g.edge_src_.reserve(g.edges_.size());
  g.edge_dst_.reserve(g.edges_.size());
  for (int e = 0; e < static_cast<int>(g.edges_.size()); ++e) {
    const Edge& ed = g.edges_[static_cast<std::size_t>(e)];
    auto s = g.index_.find(ed.src);
    auto d = g.index_.find(ed.dst);
    if (s == g.index_.end() || d == g.index_.end())
      throw std::invalid_argument("edge " + ed.id + " references unknown vertex");
    g.edge_index_[ed.id] = e;
    g.edge_src_.push_back(s->second);
    g.edge_dst_.push_back(d->second);
    g.out_edges_[static_cast<std::size_t>(s->second)].push_back(e);
  }
  for (std::size_t v = 0; v < n; ++v) {
    std::map<int, std::int64_t> row;
    for (int e : g.out_edges_[v]) ++row[g.edge_dst_[static_cast<std::size_t>(e)]];
    g.adjacency_[v].assign(row.begin(), row.end());
  }

  g.frontier_.assign(n, false);
  for (const auto& id : frontier) {
    auto it = g.index_.find(id);
    if (it == g.index_.end())
      throw std::invalid_argument("frontier references unknown vertex: " + id);
    g.frontier_[static_cast<std::size_t>(it->second)] = true;
  }
  for (int v = 0; v < static_cast<int>(n); ++v)
    if (g.frontier_[static_cast<std::size_t>(v)]) g.frontier_indices_.push_back(v);

  for (std::size_t v = 0; v < n; ++v)
    if (!g.frontier_[v] && g.out_edges_[v].empty())
      throw std::invalid_argument("vertex " + g.vertex_ids_[v] + " is a sink");
  return g;
}

bool FiniteGraph::has_vertex(const VertexId& id) const { return index_.count(id) > 0; }

int FiniteGraph::index_of(const VertexId& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw std::invalid_argument("unknown vertex: " + id);
  return it->second;
}

int FiniteGraph::edge_index_of(const std::string& id) const {
  auto it = edge_index_.find(id);
  if (it == edge_index_.end()) throw std::invalid_argument("unknown edge: " + id);
  return it->second;
}

std::span<const int> FiniteGraph::out_edges(int v) const {
  return out_edges_[static_cast<std::size_t>(v)];
}

const std::vector<std::pair<int, std::int64_t>>& FiniteGraph::adjacency_row(int v) const {
  return adjacency_[static_cast<std::size_t>(v)];
}

std::int64_t FiniteGraph::adjacency(int v, int w) const {
  const auto& row = adjacency_[static_cast<std::size_t>(v)];
  auto it = std::lower_bound(row.begin(), row.end(), w,
                             [](const auto& p, int k) { return p.first < k; });
  return (it != row.end() && it->first == w) ? it->second : 0;
}

std::int64_t FiniteGraph::out_degree(int v) const {
  return static_cast<std::int64_t>(out_edges_[static_cast<std::size_t>(v)].size());
}

FinitePath make_path(const FiniteGraph& g, int start, std::vector<int> edge_indices) {
  if (start < 0 || start >= static_cast<int>(g.vertex_count()))
    throw std::invalid_argument("path start out of range");
  int at = start;
  for (int e : edge_indices) {
    if (e < 0 || e >= static_cast<int>(g.edge_count()))
      throw std::invalid_argument("path edge index out of range");
    if (g.edge_src(e) != at)
      throw std::invalid_argument("path edges do not compose at " + g.vertex_id(at));
    at = g.edge_dst(e);
  }
  return FinitePath{start, std::move(edge_indices)};
}

FinitePath make_path(const FiniteGraph& g, const std::vector<std::string>& edge_ids) {
  if (edge_ids.empty()) throw std::invalid_argument("empty edge id list; use an anchored vertex");
  std::vector<int> idx;
  idx.reserve(edge_ids.size());
  for (const auto& id : edge_ids) idx.push_back(g.edge_index_of(id));
  const int start = g.edge_src(idx.front());
  return make_path(g, start, std::move(idx));
}

int path_source(const FiniteGraph&, const FinitePath& p) { return p.start; }

int path_range(const FiniteGraph& g, const FinitePath& p) {
  return p.empty() ? p.start : g.edge_dst(p.edges.back());
}

FinitePath shift_path(const FiniteGraph& g, const FinitePath& p) {
  if (p.empty()) throw std::invalid_argument("cannot shift an empty path");
  FinitePath q;
  q.start = g.edge_dst(p.edges.front());
  q.edges.assign(p.edges.begin() + 1, p.edges.end());
  return q;
}

std::string path_label(const FiniteGraph& g, const FinitePath& p) {
  if (p.empty()) return "(" + g.vertex_id(p.start) + ")";
  std::string s;
  for (std::size_t i = 0; i < p.edges.size(); ++i) {
    if (i) s += ',';
    s += g.edge(p.edges[i]).id;
  }
  return s;
}

std::vector<FinitePath> enumerate_paths(const FiniteGraph& g, int v, int n,
                                        std::size_t max_paths) {
  if (v < 0 || v >= static_cast<int>(g.vertex_count()))
    throw std::invalid_argument("vertex out of range");
  if (n < 0) throw std::invalid_argument("path length must be nonnegative");
  std::vector<FinitePath> acc{FinitePath{v, {}}};
  for (int step = 0; step < n; ++step) {
    std::vector<FinitePath> next;
    for (const auto& p : acc) {
      int at = path_range(g, p);
      for (int e : g.out_edges(at)) {
        if (next.size() >= max_paths)
          throw std::length_error("path enumeration exceeds materialization cap");
        FinitePath q = p;
        q.edges.push_back(e);
        next.push_back(std::move(q));
      }
    }
    acc = std::move(next);
  }
  return acc;
}

}  // namespace kms
