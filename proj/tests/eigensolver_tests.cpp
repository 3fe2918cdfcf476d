#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "kms/eigensolver.hpp"
#include "kms/errors.hpp"
#include "kms/families.hpp"
#include "oracles.hpp"

using namespace kms;

namespace {

const double kArmsBeta0 = 0.5138410019345337;

}  // namespace

TEST_SUITE("eigensolver") {

TEST_CASE("vertex potentials evaluate pointwise and along paths") {
  FiniteGraph g = GraphFamily::rose(2).truncation(1);
  VertexPotential f0 = VertexPotential::gauge();
  CHECK(f0.is_gauge());
  CHECK(f0.at(g, 0) == 1.0);
  CHECK(f0.sign_on(g) == 1);

  VertexPotential shifted{2.0, {{"v", -0.5}}};
  CHECK_FALSE(shifted.is_gauge());
  CHECK(shifted.at(g, 0) == -0.5);
  CHECK(shifted.sign_on(g) == -1);
  FinitePath p = make_path(g, {"e1", "e2", "e1"});
  CHECK(shifted.along(g, p) == doctest::Approx(-1.5));
  CHECK(shifted.materialize(g) == std::vector<double>{-0.5});

  VertexPotential zeroed{0.0, {}};
  CHECK(zeroed.sign_on(g) == 0);
}

TEST_CASE("solve_finite on the rose") {
  FiniteGraph g = GraphFamily::rose(2).truncation(1);
  EigenSolution s = solve_finite(g, VertexPotential::gauge());
  CHECK(s.beta == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(s.xi == std::vector<double>{1.0});
  CHECK(s.residual < 1e-12);
  CHECK(verify(s).pass(1e-10));
}

TEST_CASE("solve_finite matches the exact eigenpair on a two-vertex graph") {
  FiniteGraph g = FiniteGraph::make(
      {"p", "q"},
      {Edge{"p>q", "p", "q"}, Edge{"q>p#1", "q", "p"}, Edge{"q>p#2", "q", "p"}});
  EigenSolution s = solve_finite(g, VertexPotential::gauge());
  CHECK(s.beta == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-11));
  CHECK(s.at("p") == doctest::Approx(1.0));
  CHECK(s.at("q") == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
  CHECK(s.base == g.index_of("p"));

  SolveOptions opt;
  opt.base = "q";
  EigenSolution t = solve_finite(g, VertexPotential::gauge(), opt);
  CHECK(t.at("q") == doctest::Approx(1.0));
  CHECK(t.at("p") == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-10));
}

TEST_CASE("solve_finite handles sign-definite potentials and rejects mixed signs") {
  FiniteGraph g = GraphFamily::rose(2).truncation(1);
  VertexPotential negative{-1.0, {}};
  EigenSolution s = solve_finite(g, negative);
  CHECK(s.beta == doctest::Approx(-std::log(2.0)).epsilon(1e-10));
  CHECK(s.residual < 1e-10);

  // Non-constant negative potential exercises the bisection path.
  FiniteGraph two = FiniteGraph::make(
      {"p", "q"}, {Edge{"p>q", "p", "q"}, Edge{"q>p", "q", "p"}, Edge{"q>q", "q", "q"}});
  VertexPotential neg{-1.0, {{"q", -2.0}}};
  EigenSolution ns = solve_finite(two, neg);
  CHECK(verify(ns).pass(1e-9));
  CHECK(ns.beta < 0.0);

  FiniteGraph mixed = two;
  VertexPotential bad{1.0, {{"q", -1.0}}};
  CHECK_THROWS_AS((void)solve_finite(mixed, bad), std::invalid_argument);

  VertexPotential zero{0.0, {}};
  CHECK_THROWS_AS((void)solve_finite(g, zero), InfeasibleError);  // radius 2 != 1
  FiniteGraph cycle = FiniteGraph::make({"p", "q"},
                                        {Edge{"p>q", "p", "q"}, Edge{"q>p", "q", "p"}});
  EigenSolution zs = solve_finite(cycle, zero);
  CHECK(zs.beta == 0.0);
}

TEST_CASE("solve_finite requires strongly connected frontier-free input") {
  CHECK_THROWS_AS((void)solve_finite(GraphFamily::ladder().truncation(3),
                                     VertexPotential::gauge()),
                  std::invalid_argument);
  FiniteGraph chain = FiniteGraph::make(
      {"a", "b"}, {Edge{"a>b", "a", "b"}, Edge{"b>b", "b", "b"}});
  CHECK_THROWS_AS((void)solve_finite(chain, VertexPotential::gauge()), std::invalid_argument);
}

TEST_CASE("feasibility threshold of the arm family") {
  const double alpha = oracle::bisect([](double x) { return x * x * x - x - 3.0; }, 1.0, 2.0);
  CHECK(arms_min_beta(3) == doctest::Approx(std::log(alpha)).epsilon(1e-13));
  CHECK(arms_min_beta(3) == doctest::Approx(kArmsBeta0).epsilon(1e-13));
  // At the threshold the hub equation pins every arm to the floor.
  double floor = arms_floor(kArmsBeta0);
  CHECK(floor == doctest::Approx(0.5572332938857203).epsilon(1e-12));
  CHECK(3.0 * floor == doctest::Approx(std::exp(kArmsBeta0)).epsilon(1e-10));
}

TEST_CASE("arm family solutions at and above the threshold") {
  GraphFamily arms = GraphFamily::arms(3);
  FamilySolveOptions opt;
  opt.depth = 40;

  opt.beta = kArmsBeta0;
  auto critical = solve_family(arms, opt);
  REQUIRE(critical.size() == 1);
  const EigenSolution& c = critical[0];
  CHECK(c.closed_form);
  CHECK(c.at("1") == 1.0);
  double floor = arms_floor(kArmsBeta0);
  CHECK(c.at("a1") == doctest::Approx(floor).epsilon(1e-12));
  CHECK(c.at("b1") == doctest::Approx(floor).epsilon(1e-12));
  // Inward chain decays geometrically, outward chain follows the floor law.
  CHECK(c.at("a-3") == doctest::Approx(std::exp(-3.0 * kArmsBeta0)).epsilon(1e-12));
  double q = std::exp(-2.0 * kArmsBeta0);
  CHECK(c.at("a4") == doctest::Approx(std::exp(-5.0 * kArmsBeta0) / (1.0 - q)).epsilon(1e-9));
  CHECK(verify(c).pass(1e-10));

  opt.beta = kArmsBeta0 + 0.5;
  auto rays = solve_family(arms, opt);
  REQUIRE(rays.size() == 3);
  double f = arms_floor(opt.beta);
  double big = std::exp(opt.beta) - 2.0 * f;
  CHECK(f == doctest::Approx(0.1515965226504628).epsilon(1e-12));
  CHECK(big == doctest::Approx(2.452974107814123).epsilon(1e-12));
  for (std::size_t a = 0; a < rays.size(); ++a) {
    std::vector<double> tips{rays[a].at("a1"), rays[a].at("b1"), rays[a].at("c1")};
    std::sort(tips.begin(), tips.end());
    CHECK(tips[0] == doctest::Approx(f).epsilon(1e-12));
    CHECK(tips[1] == doctest::Approx(f).epsilon(1e-12));
    CHECK(tips[2] == doctest::Approx(big).epsilon(1e-12));
    CHECK(verify(rays[a]).pass(1e-10));
    for (double x : rays[a].xi) CHECK(x >= 0.0);
  }

  opt.beta = kArmsBeta0 - 0.2;
  CHECK_THROWS_AS((void)solve_family(arms, opt), InfeasibleError);
  opt.beta = -1.0;
  CHECK_THROWS_AS((void)solve_family(arms, opt), InfeasibleError);
}

TEST_CASE("ladder closed form solves the level recursion at every beta") {
  GraphFamily ladder = GraphFamily::ladder();
  for (double beta : {-1.0, 0.0, 1.0, 2.5}) {
    FamilySolveOptions opt;
    opt.beta = beta;
    opt.depth = 30;
    auto sols = solve_family(ladder, opt);
    REQUIRE(sols.size() == 1);
    const EigenSolution& s = sols[0];
    CHECK(s.closed_form);
    double r = std::exp(2.0 * beta) / (1.0 + std::exp(beta));
    CHECK(s.at("x0") == doctest::Approx(r * std::exp(-beta)).epsilon(1e-12));
    CHECK(s.at("y0") == doctest::Approx(r).epsilon(1e-12));
    CHECK(s.at("y4") == doctest::Approx(std::pow(r, 5.0)).epsilon(1e-11));
    CHECK(verify(s).pass(1e-10));
  }
  FamilySolveOptions opt;
  opt.beta = 1.0;
  auto sols = solve_family(ladder, opt);
  CHECK(sols[0].at("x0") == doctest::Approx(0.7310585786300049).epsilon(1e-13));
  CHECK(sols[0].at("x3") == doctest::Approx(5.737096521863363).epsilon(1e-12));
}

TEST_CASE("profile boundary reproduces the ladder closed form by iteration") {
  GraphFamily ladder = GraphFamily::ladder();
  const double beta = 0.4;
  const int depth = 16;
  double r = std::exp(2.0 * beta) / (1.0 + std::exp(beta));

  FamilySolveOptions opt;
  opt.beta = beta;
  opt.depth = depth;
  opt.boundary = BoundaryPolicy::profile;
  opt.frontier_profile = {{"y" + std::to_string(depth), std::pow(r, depth + 1)}};
  auto sols = solve_family(ladder, opt);
  REQUIRE(sols.size() == 1);
  const EigenSolution& s = sols[0];
  CHECK_FALSE(s.closed_form);
  for (int n = 0; n < depth; ++n) {
    CHECK(s.at("x" + std::to_string(n)) ==
          doctest::Approx(std::pow(r, n + 1) * std::exp(-beta)).epsilon(1e-10));
    CHECK(s.at("y" + std::to_string(n)) == doctest::Approx(std::pow(r, n + 1)).epsilon(1e-10));
  }
  CHECK(s.at("1") == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("profile boundary reproduces a closed-form extreme ray on the window") {
  // The window system at fixed frontier data is subcritical for beta above
  // the threshold, so its solution is unique: seeding the frontier with the
  // closed-form ray's own tip values must reproduce the ray everywhere.
  GraphFamily arms = GraphFamily::arms(3);
  FamilySolveOptions closed;
  closed.beta = kArmsBeta0 + 0.5;
  closed.depth = 30;
  auto rays = solve_family(arms, closed);
  REQUIRE(!rays.empty());
  const EigenSolution& ray = rays[0];
  REQUIRE(ray.closed_form);

  FamilySolveOptions opt = closed;
  opt.boundary = BoundaryPolicy::profile;
  for (const char* arm : {"a", "b", "c"}) {
    std::string tip = std::string(arm) + std::to_string(opt.depth);
    opt.frontier_profile[tip] = ray.at(tip);
  }
  auto sols = solve_family(arms, opt);
  REQUIRE(sols.size() == 1);
  const EigenSolution& s = sols[0];
  CHECK_FALSE(s.closed_form);
  for (const char* id : {"1", "a1", "a14", "a29", "b2", "b-7", "c-2", "c1"})
    CHECK(s.at(id) == doctest::Approx(ray.at(id)).epsilon(1e-8));
  CHECK(verify(s).pass(1e-9));
}

TEST_CASE("explicit finite families reject mismatched beta") {
  GraphFamily rose = GraphFamily::rose(2);
  FamilySolveOptions opt;
  opt.beta = std::log(2.0);
  auto sols = solve_family(rose, opt);
  REQUIRE(sols.size() == 1);
  CHECK(sols[0].beta == opt.beta);
  CHECK(sols[0].residual < 1e-10);

  opt.beta = std::log(2.0) + 0.1;
  CHECK_THROWS_AS((void)solve_family(rose, opt), InfeasibleError);
}

TEST_CASE("stochastic rescaling rows sum to one") {
  FiniteGraph g = FiniteGraph::make(
      {"p", "q"},
      {Edge{"p>q", "p", "q"}, Edge{"q>p#1", "q", "p"}, Edge{"q>p#2", "q", "p"}});
  EigenSolution s = solve_finite(g, VertexPotential::gauge());
  StochasticResult r = to_stochastic(g, s.beta, s.potential, s.xi);
  CHECK(r.worst_row_defect < 1e-12);
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[0].vertex == "p");
  CHECK(r.rows[0].transitions.size() == 1);
  CHECK(r.rows[0].row_sum == doctest::Approx(1.0).epsilon(1e-13));

  std::vector<double> zeroed = s.xi;
  zeroed[0] = 0.0;
  CHECK_THROWS_AS((void)to_stochastic(g, s.beta, s.potential, zeroed), std::invalid_argument);
  CHECK_THROWS_AS((void)to_stochastic(g, s.beta, s.potential, {1.0}), std::invalid_argument);
}

TEST_CASE("random strongly connected graphs solve and verify") {
  std::mt19937 rng(20240817);
  for (int trial = 0; trial < 25; ++trial) {
    FiniteGraph g = oracle::random_strongly_connected(rng);
    EigenSolution s = solve_finite(g, VertexPotential::gauge());
    CHECK(verify(s).pass(1e-10));
    StochasticResult st = to_stochastic(g, s.beta, s.potential, s.xi);
    CHECK(st.worst_row_defect < 1e-11);
  }
}

}  // TEST_SUITE
