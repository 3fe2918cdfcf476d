#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "kms/conformal.hpp"
#include "kms/eigensolver.hpp"
#include "kms/errors.hpp"
#include "kms/families.hpp"
#include "kms/lattice.hpp"

using namespace kms;

namespace {

const double kArmsBeta0 = 0.5138410019345337;

EigenSolution rose_solution() {
  GraphFamily rose = GraphFamily::rose(2);
  FamilySolveOptions opt;
  opt.beta = std::log(2.0);
  return solve_family(rose, opt)[0];
}

}  // namespace

TEST_SUITE("conformal") {

TEST_CASE("cylinder masses scale by the path weight") {
  EigenSolution s = rose_solution();
  CylinderMeasure m(s);
  CHECK(m.vertex_mass(0) == doctest::Approx(1.0));
  CHECK(m.measure_of({"e1"}) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(m.measure_of({"e1", "e1"}) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(m.measure_of({"e2", "e1"}) == doctest::Approx(0.25).epsilon(1e-12));
  FinitePath empty = make_path(m.graph(), 0, {});
  CHECK(m.measure_of(empty) == doctest::Approx(1.0));
  CHECK_THROWS_AS((void)m.measure_of(std::vector<std::string>{}), std::invalid_argument);
  CHECK_THROWS_AS(CylinderMeasure(EigenSolution{}), std::invalid_argument);
}

TEST_CASE("additivity and shift duality hold on the rose") {
  CylinderMeasure m(rose_solution());
  AdditivityReport add = check_additivity(m, 4);
  CHECK(add.pass(1e-12));
  CHECK(add.skipped_frontier == 0);
  // Refined cylinders: 1 empty + 2 + 4 + 8 paths.
  CHECK(add.cylinders_checked == 15);

  DualityReport dual = ruelle_dual_check(m, 4);
  CHECK(dual.pass(1e-12));
  CHECK(dual.paths_checked == 2 + 4 + 8 + 16);
  CHECK_THROWS_AS((void)check_additivity(m, 0), std::invalid_argument);
  CHECK_THROWS_AS((void)ruelle_dual_check(m, 0), std::invalid_argument);
}

TEST_CASE("additivity on truncations skips frontier cylinders unless complete is required") {
  GraphFamily ladder = GraphFamily::ladder();
  FamilySolveOptions opt;
  opt.beta = 1.0;
  opt.depth = 8;
  CylinderMeasure m(solve_family(ladder, opt)[0]);
  AdditivityReport add = check_additivity(m, 3);
  CHECK(add.pass(1e-12));
  CHECK(add.skipped_frontier > 0);
  CHECK_THROWS_AS((void)check_additivity(m, 20, true), FrontierError);
  CHECK(ruelle_dual_check(m, 3).pass(1e-12));
}

TEST_CASE("identities hold for a non-constant potential") {
  FiniteGraph g = FiniteGraph::make(
      {"p", "q"},
      {Edge{"p>q", "p", "q"}, Edge{"q>p#1", "q", "p"}, Edge{"q>p#2", "q", "p"}});
  VertexPotential f0{1.0, {{"q", 2.0}}};
  EigenSolution s = solve_finite(g, f0);
  REQUIRE(verify(s).pass(1e-9));
  CylinderMeasure m(s);
  CHECK(check_additivity(m, 5).pass(1e-9));
  CHECK(ruelle_dual_check(m, 5).pass(1e-9));
}

TEST_CASE("finite graphs always normalize") {
  GraphFamily rose = GraphFamily::rose(2);
  StateCheck st = state_check(rose, rose_solution());
  CHECK(st.is_state);
  CHECK(st.determined);
  CHECK(st.total_mass == doctest::Approx(1.0));
}

TEST_CASE("arm states exist exactly at the critical value") {
  GraphFamily arms = GraphFamily::arms(3);
  FamilySolveOptions opt;
  opt.depth = 40;

  opt.beta = kArmsBeta0;
  StateCheck at_floor = state_check(arms, solve_family(arms, opt)[0]);
  CHECK(at_floor.is_state);
  CHECK(at_floor.total_mass == doctest::Approx(9.626740382976797).epsilon(1e-9));
  CHECK(at_floor.tail_ratio == doctest::Approx(std::exp(-kArmsBeta0)).epsilon(1e-12));

  opt.beta = kArmsBeta0 + 0.5;
  auto rays = solve_family(arms, opt);
  REQUIRE(rays.size() == 3);
  for (const auto& ray : rays) {
    StateCheck st = state_check(arms, ray);
    CHECK_FALSE(st.is_state);
    CHECK(st.total_mass == std::numeric_limits<double>::infinity());
  }
  StateCheck first = state_check(arms, rays[0]);
  CHECK(first.certificate.find("arm a") != std::string::npos);
}

TEST_CASE("ladder states exist strictly below the golden ratio threshold") {
  GraphFamily ladder = GraphFamily::ladder();
  const double threshold = std::log(0.5 * (1.0 + std::sqrt(5.0)));
  CHECK(ladder_state_threshold() == doctest::Approx(threshold).epsilon(1e-12));

  FamilySolveOptions opt;
  opt.depth = 30;
  opt.beta = 0.0;
  StateCheck at_zero = state_check(ladder, solve_family(ladder, opt)[0]);
  CHECK(at_zero.is_state);
  CHECK(at_zero.total_mass == doctest::Approx(3.0).epsilon(1e-12));
  REQUIRE(at_zero.threshold.has_value());
  CHECK(*at_zero.threshold == doctest::Approx(threshold).epsilon(1e-9));

  opt.beta = threshold - 0.05;
  CHECK(state_check(ladder, solve_family(ladder, opt)[0]).is_state);
  opt.beta = threshold + 0.05;
  StateCheck above = state_check(ladder, solve_family(ladder, opt)[0]);
  CHECK_FALSE(above.is_state);
  CHECK(above.total_mass == std::numeric_limits<double>::infinity());
  opt.beta = -2.0;
  CHECK(state_check(ladder, solve_family(ladder, opt)[0]).is_state);
}

TEST_CASE("shell ratio estimate covers solutions without a closed form") {
  // A doubled potential turns the arm equations into the gauge ones at 2*beta;
  // the truncation iteration then feeds the generic shell-ratio certificate.
  GraphFamily arms = GraphFamily::arms(3);
  FamilySolveOptions opt;
  opt.beta = 0.6;
  opt.depth = 30;
  opt.f0 = VertexPotential{2.0, {}};
  auto sols = solve_family(arms, opt);
  REQUIRE(sols.size() == 1);
  StateCheck st = state_check(arms, sols[0]);
  CHECK(st.determined);
  CHECK(st.is_state);
  REQUIRE(st.tail_ratio.has_value());
  CHECK(*st.tail_ratio < 1.0);
  CHECK(st.certificate.find("geometric") != std::string::npos);
  // The zero-boundary iterate approximates the summable arm pattern, whose
  // mass at effective inverse temperature 2*beta has a geometric closed form:
  // 1 + 3(floor + e^-b)/(1 - e^-b).
  const double b = 2.0 * opt.beta;
  const double floor = arms_floor(b);
  const double expect = 1.0 + 3.0 * (floor + std::exp(-b)) / (1.0 - std::exp(-b));
  CHECK(st.total_mass == doctest::Approx(expect).epsilon(1e-3));
}

TEST_CASE("subcritical truncation iterations fail loudly") {
  // With a profile boundary the base vertex stays free, the window update is
  // expansive below the threshold, and the iteration must refuse to converge.
  GraphFamily arms = GraphFamily::arms(3);
  FamilySolveOptions opt;
  opt.beta = 0.1;
  opt.depth = 20;
  opt.f0 = VertexPotential{2.0, {}};
  opt.solve.max_iterations = 2000;
  opt.boundary = BoundaryPolicy::profile;
  for (const char* arm : {"a", "b", "c"})
    opt.frontier_profile[std::string(arm) + "20"] = 1.0;
  CHECK_THROWS_AS((void)solve_family(arms, opt), NonConvergenceError);

  // The zero-boundary mode always converges here (pinning the base leaves an
  // acyclic free part) but the result cannot close the base equation.
  FamilySolveOptions pinned;
  pinned.beta = 0.1;
  pinned.depth = 20;
  pinned.f0 = VertexPotential{2.0, {}};
  auto sols = solve_family(arms, pinned);
  REQUIRE(sols.size() == 1);
  CHECK_FALSE(verify(sols[0]).pass(1e-6));
}

TEST_CASE("lattice weights never normalize") {
  LatticeWalk walk = LatticeWalk::make(1, {{{1}, 2}, {{-1}, 1}});
  GraphFamily family = GraphFamily::lattice_walk(walk);
  MgfMinimum m = minimize_mgf(walk);
  EigenSolution s = exponential_eigenvector(walk, m.c_min, 12);
  StateCheck st = state_check(family, s);
  CHECK_FALSE(st.is_state);
  CHECK(st.total_mass == std::numeric_limits<double>::infinity());
  CHECK(st.certificate.find("(-1)") != std::string::npos);
}

}  // TEST_SUITE
