#include "kms/structure.hpp"

#include <algorithm>
#include <stdexcept>

namespace kms {

bool SccDecomposition::has_cycle(int component) const {
  return components[static_cast<std::size_t>(component)].size() > 1 ||
         component_self_loop_[static_cast<std::size_t>(component)];
}

namespace {

// Iterative Tarjan; assigns components in reverse topological order.
struct TarjanState {
  const FiniteGraph& g;
  std::vector<int> index, lowlink, stack;
  std::vector<bool> on_stack;
  std::vector<std::vector<int>> components;
  std::vector<int> component_of;
  int next_index = 0;

  explicit TarjanState(const FiniteGraph& graph)
      : g(graph),
        index(graph.vertex_count(), -1),
        lowlink(graph.vertex_count(), 0),
        on_stack(graph.vertex_count(), false),
        component_of(graph.vertex_count(), -1) {}

  void run(int root) {
    struct Frame {
      int v;
      std::size_t next_child = 0;
    };
    std::vector<Frame> frames{{root}};
    index[static_cast<std::size_t>(root)] = lowlink[static_cast<std::size_t>(root)] = next_index++;
    stack.push_back(root);
    on_stack[static_cast<std::size_t>(root)] = true;
    while (!frames.empty()) {
      Frame& f = frames.back();
      const auto& row = g.adjacency_row(f.v);
      if (f.next_child < row.size()) {
        int w = row[f.next_child++].first;
        if (index[static_cast<std::size_t>(w)] < 0) {
          index[static_cast<std::size_t>(w)] = lowlink[static_cast<std::size_t>(w)] = next_index++;
          stack.push_back(w);
          on_stack[static_cast<std::size_t>(w)] = true;
          frames.push_back({w});
        } else if (on_stack[static_cast<std::size_t>(w)]) {
          lowlink[static_cast<std::size_t>(f.v)] =
              std::min(lowlink[static_cast<std::size_t>(f.v)], index[static_cast<std::size_t>(w)]);
        }
      } else {
        int v = f.v;
        frames.pop_back();
        if (!frames.empty()) {
          int parent = frames.back().v;
          lowlink[static_cast<std::size_t>(parent)] =
              std::min(lowlink[static_cast<std::size_t>(parent)], lowlink[static_cast<std::size_t>(v)]);
        }
        if (lowlink[static_cast<std::size_t>(v)] == index[static_cast<std::size_t>(v)]) {
          std::vector<int> comp;
          while (true) {
            int w = stack.back();
            stack.pop_back();
            on_stack[static_cast<std::size_t>(w)] = false;
            component_of[static_cast<std::size_t>(w)] = static_cast<int>(components.size());
            comp.push_back(w);
            if (w == v) break;
          }
          std::sort(comp.begin(), comp.end());
          components.push_back(std::move(comp));
        }
      }
    }
  }
};

}  // namespace

SccDecomposition strongly_connected_components(const FiniteGraph& g) {
  TarjanState t(g);
  for (int v = 0; v < static_cast<int>(g.vertex_count()); ++v)
    if (t.index[static_cast<std::size_t>(v)] < 0) t.run(v);
  SccDecomposition d;
  d.components = std::move(t.components);
  d.component_of = std::move(t.component_of);
  d.component_self_loop_.assign(d.components.size(), false);
  for (std::size_t c = 0; c < d.components.size(); ++c)
    for (int v : d.components[c])
      if (g.adjacency(v, v) > 0) d.component_self_loop_[c] = true;
  return d;
}

std::vector<int> cycle_vertices(const FiniteGraph& g) {
  SccDecomposition d = strongly_connected_components(g);
  std::vector<int> out;
  for (int c = 0; c < static_cast<int>(d.components.size()); ++c)
    if (d.has_cycle(c))
      for (int v : d.components[static_cast<std::size_t>(c)]) out.push_back(v);
  std::sort(out.begin(), out.end());
  return out;
}

StructureReport non_wandering(const GraphFamily& family, int depth) {
  StructureReport r;
  r.analyzed_depth = depth;
  FiniteGraph t = family.truncation(depth);
  for (int v : cycle_vertices(t)) r.nw_vertices.push_back(t.vertex_id(v));
  if (family.is_explicit_finite() || family.kind() == GraphFamily::Kind::rose) {
    r.nw_class = r.nw_vertices.empty() ? NwClass::empty : NwClass::nonempty_finite;
    r.from_family_traits = false;
    r.notes = "computed exactly from the finite graph";
    return r;
  }
  if (family.traits().nw_class) {
    r.nw_class = *family.traits().nw_class;
    r.from_family_traits = true;
    r.notes = family.traits().provenance;
    // The declared class must not contradict the window evidence.
    if (r.nw_class == NwClass::empty && !r.nw_vertices.empty())
      throw std::logic_error("family declares an empty non-wandering part but the truncation has cycles");
    return r;
  }
  r.nw_class = NwClass::undetermined;
  r.notes = "no certified family traits; truncation window evidence only";
  return r;
}

bool is_cofinal(const FiniteGraph& g) {
  if (g.has_frontier())
    throw std::invalid_argument("cofinality check needs a frontier-free finite graph");
  SccDecomposition d = strongly_connected_components(g);
  const int n = static_cast<int>(d.components.size());
  std::vector<bool> terminal(static_cast<std::size_t>(n), true);
  for (int v = 0; v < static_cast<int>(g.vertex_count()); ++v)
    for (const auto& [w, count] : g.adjacency_row(v))
      if (d.component_of[static_cast<std::size_t>(v)] != d.component_of[static_cast<std::size_t>(w)])
        terminal[static_cast<std::size_t>(d.component_of[static_cast<std::size_t>(v)])] = false;
  int terminal_count = 0;
  int terminal_comp = -1;
  for (int c = 0; c < n; ++c)
    if (terminal[static_cast<std::size_t>(c)]) {
      ++terminal_count;
      terminal_comp = c;
    }
  if (terminal_count != 1) return false;
  // Every cycle must already live in the terminal component; a cycle in any
  // other component cannot be reached from the terminal one.
  for (int c = 0; c < n; ++c)
    if (c != terminal_comp && d.has_cycle(c)) return false;
  return true;
}

std::vector<int> hereditary_closure(const FiniteGraph& g, const std::vector<int>& seed) {
  std::vector<bool> in(g.vertex_count(), false);
  std::vector<int> queue;
  for (int v : seed) {
    if (v < 0 || v >= static_cast<int>(g.vertex_count()))
      throw std::invalid_argument("seed vertex out of range");
    if (!in[static_cast<std::size_t>(v)]) {
      in[static_cast<std::size_t>(v)] = true;
      queue.push_back(v);
    }
  }
  for (std::size_t i = 0; i < queue.size(); ++i)
    for (const auto& [w, count] : g.adjacency_row(queue[i]))
      if (!in[static_cast<std::size_t>(w)]) {
        in[static_cast<std::size_t>(w)] = true;
        queue.push_back(w);
      }
  std::sort(queue.begin(), queue.end());
  return queue;
}

FiniteGraph recode(const FiniteGraph& g, int k) {
  if (k < 1) throw std::invalid_argument("recode block length must be >= 1");
  std::vector<VertexId> vs;
  std::vector<std::pair<VertexId, FinitePath>> blocks;
  std::set<VertexId> frontier;
  for (int v = 0; v < static_cast<int>(g.vertex_count()); ++v) {
    if (g.is_frontier(v)) continue;  // paths from frontier vertices may be incomplete
    for (const FinitePath& p : enumerate_paths(g, v, k)) {
      // Skip blocks straying into the frontier mid-path; their shifts are partial.
      bool partial = false;
      for (std::size_t i = 0; i + 1 < p.edges.size(); ++i)
        if (g.is_frontier(g.edge_dst(p.edges[i]))) partial = true;
      if (partial) continue;
      vs.push_back(path_label(g, p));
      if (g.is_frontier(path_range(g, p)))
        frontier.insert(path_label(g, p));
      else
        blocks.emplace_back(path_label(g, p), p);
    }
  }
  std::vector<Edge> es;
  for (const auto& [id, p] : blocks) {
    for (int e : g.out_edges(path_range(g, p))) {
      FinitePath q = p;
      q.edges.push_back(e);
      es.push_back(Edge{path_label(g, q), id, path_label(g, shift_path(g, q))});
    }
  }
  return FiniteGraph::make(std::move(vs), std::move(es), std::move(frontier));
}

}  // namespace kms
