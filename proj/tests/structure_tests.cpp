#include <doctest.h>

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "kms/families.hpp"
#include "kms/structure.hpp"

using namespace kms;

namespace {

FiniteGraph cycle_with_tail() {
  // t feeds a 2-cycle {b, c}; t itself needs an out-edge, so it is sink-free.
  return FiniteGraph::make({"t", "b", "c"},
                           {Edge{"t>b", "t", "b"}, Edge{"b>c", "b", "c"}, Edge{"c>b", "c", "b"}});
}

FiniteGraph two_disjoint_cycles() {
  return FiniteGraph::make({"a1", "a2", "b1", "b2"},
                           {Edge{"a1>a2", "a1", "a2"}, Edge{"a2>a1", "a2", "a1"},
                            Edge{"b1>b2", "b1", "b2"}, Edge{"b2>b1", "b2", "b1"}});
}

FiniteGraph cycle_feeding_cycle() {
  // The cycle {a1, a2} drains into the cycle {b1, b2} but cannot be re-entered.
  return FiniteGraph::make({"a1", "a2", "b1", "b2"},
                           {Edge{"a1>a2", "a1", "a2"}, Edge{"a2>a1", "a2", "a1"},
                            Edge{"a1>b1", "a1", "b1"}, Edge{"b1>b2", "b1", "b2"},
                            Edge{"b2>b1", "b2", "b1"}});
}

}  // namespace

TEST_SUITE("structure") {

TEST_CASE("strongly connected components in reverse topological order") {
  FiniteGraph g = cycle_feeding_cycle();
  SccDecomposition d = strongly_connected_components(g);
  REQUIRE(d.components.size() == 2);
  // Edges between components must point to earlier entries: {b1,b2} first.
  std::vector<int> first = d.components[0];
  CHECK(first == std::vector<int>{g.index_of("b1"), g.index_of("b2")});
  CHECK(d.component_of[static_cast<std::size_t>(g.index_of("a1"))] == 1);
  CHECK(d.has_cycle(0));
  CHECK(d.has_cycle(1));

  FiniteGraph tail = cycle_with_tail();
  SccDecomposition dt = strongly_connected_components(tail);
  REQUIRE(dt.components.size() == 2);
  int t_comp = dt.component_of[static_cast<std::size_t>(tail.index_of("t"))];
  CHECK_FALSE(dt.has_cycle(t_comp));
}

TEST_CASE("self loops count as cycles") {
  FiniteGraph g = FiniteGraph::make({"a"}, {Edge{"a>a", "a", "a"}});
  SccDecomposition d = strongly_connected_components(g);
  REQUIRE(d.components.size() == 1);
  CHECK(d.has_cycle(0));
  CHECK(cycle_vertices(g) == std::vector<int>{0});
}

TEST_CASE("cycle vertices of mixed graphs") {
  FiniteGraph g = cycle_with_tail();
  CHECK(cycle_vertices(g) == std::vector<int>{g.index_of("b"), g.index_of("c")});
  CHECK(cycle_vertices(two_disjoint_cycles()).size() == 4);
}

TEST_CASE("non-wandering classification per family") {
  StructureReport rose = non_wandering(GraphFamily::rose(2), 4);
  CHECK(rose.nw_class == NwClass::nonempty_finite);
  CHECK(rose.nw_vertices == std::vector<VertexId>{"v"});
  CHECK_FALSE(rose.from_family_traits);

  StructureReport ladder = non_wandering(GraphFamily::ladder(), 6);
  CHECK(ladder.nw_class == NwClass::empty);
  CHECK(ladder.from_family_traits);
  CHECK(ladder.nw_vertices.empty());

  StructureReport arms = non_wandering(GraphFamily::arms(3), 6);
  CHECK(arms.nw_class == NwClass::nonempty_infinite);
  CHECK(arms.from_family_traits);
  // Within the window every vertex lies on a round trip through the hub.
  CHECK(arms.nw_vertices.size() == GraphFamily::arms(3).truncation(6).vertex_count());

  StructureReport expl = non_wandering(GraphFamily::explicit_graph(cycle_with_tail()), 1);
  CHECK(expl.nw_class == NwClass::nonempty_finite);
  CHECK(expl.nw_vertices == std::vector<VertexId>{"b", "c"});
}

TEST_CASE("cofinality") {
  CHECK(is_cofinal(GraphFamily::rose(2).truncation(1)));
  CHECK(is_cofinal(cycle_with_tail()));
  CHECK_FALSE(is_cofinal(two_disjoint_cycles()));
  CHECK_FALSE(is_cofinal(cycle_feeding_cycle()));
  CHECK_THROWS_AS((void)is_cofinal(GraphFamily::ladder().truncation(4)), std::invalid_argument);
}

TEST_CASE("hereditary closure follows out-edges") {
  FiniteGraph g = cycle_feeding_cycle();
  std::vector<int> from_b = hereditary_closure(g, {g.index_of("b1")});
  CHECK(from_b == std::vector<int>{g.index_of("b1"), g.index_of("b2")});
  std::vector<int> from_a = hereditary_closure(g, {g.index_of("a2")});
  CHECK(from_a.size() == 4);
  CHECK_THROWS_AS((void)hereditary_closure(g, {99}), std::invalid_argument);
}

TEST_CASE("recode produces the higher block presentation") {
  FiniteGraph rose = GraphFamily::rose(2).truncation(1);
  FiniteGraph r1 = recode(rose, 1);
  CHECK(r1.vertex_count() == 2);
  CHECK(r1.edge_count() == 4);

  FiniteGraph r2 = recode(rose, 2);
  CHECK(r2.vertex_count() == 4);
  CHECK(r2.edge_count() == 8);
  CHECK(r2.has_vertex("e1,e2"));
  // The block shift: e1,e1 extended by e2 lands on e1,e2.
  int e = r2.edge_index_of("e1,e1,e2");
  CHECK(r2.vertex_id(r2.edge_src(e)) == "e1,e1");
  CHECK(r2.vertex_id(r2.edge_dst(e)) == "e1,e2");
  // Out-degrees survive recoding: every block extends by the loops at v.
  for (int v = 0; v < static_cast<int>(r2.vertex_count()); ++v)
    CHECK(r2.out_degree(v) == 2);
  CHECK(is_cofinal(r2));
  CHECK_THROWS_AS((void)recode(rose, 0), std::invalid_argument);
}

TEST_CASE("recode marks blocks ending at the frontier") {
  FiniteGraph ladder = GraphFamily::ladder().truncation(3);
  FiniteGraph r = recode(ladder, 2);
  // Blocks ending at y3 (the cut vertex) become frontier vertices.
  int frontier_blocks = 0;
  for (int v : r.frontier_vertices()) {
    (void)v;
    ++frontier_blocks;
  }
  CHECK(frontier_blocks > 0);
  for (int v = 0; v < static_cast<int>(r.vertex_count()); ++v) {
    if (r.is_frontier(v)) continue;
    CHECK(r.out_degree(v) >= 1);
  }
}

}  // TEST_SUITE
