#pragma once

#include <string>
#include <vector>

#include "kms/eigensolver.hpp"
#include "kms/families.hpp"

namespace kms {

// Moment generating function M(c) = sum_w mu(w) exp(<c, w>) of a lattice
// walk, with first and second derivatives.
struct MgfValue {
  double value = 0.0;
  std::vector<double> gradient;
  std::vector<std::vector<double>> hessian;
};

MgfValue mgf(const LatticeWalk& walk, const std::vector<double>& c);

struct MgfMinimum {
  std::vector<double> c_min;
  double min_value = 0.0;
  double beta0 = 0.0;  // log(min_value)
  std::vector<double> drift;  // gradient at 0
  bool support_spans = true;  // support affinely spans R^d; else minimized on its span
  int iterations = 0;
};

// Newton descent from the origin with step halving; when the support does
// not span R^d the minimization runs inside the spanned subspace, where the
// function is strictly convex.
MgfMinimum minimize_mgf(const LatticeWalk& walk, double tol = 1e-12, int max_iterations = 100);

// Verifies that the origin and the signed unit steps are reachable as
// nonempty sums of support steps within the word-length budget, the sampled
// check behind declaring the walk graph cofinal with full non-wandering part.
bool semigroup_generates(const LatticeWalk& walk, int max_word_length = 10);

// The exponential vector f_c(v) = exp(<c, v>) on the radius-`radius` window,
// an exact solution at beta = log M(c); normalized at the origin.
EigenSolution exponential_eigenvector(const LatticeWalk& walk, const std::vector<double>& c,
                                      int radius);

// All real c on the level set M(c) = exp(beta) along a line through c_min
// for d = 1 (two points, or one at the minimum); for d >= 2 a section of
// sample points, one per signed coordinate direction. Throws InfeasibleError
// for beta below beta0 - tol.
std::vector<std::vector<double>> lattice_level_set(const LatticeWalk& walk, double beta,
                                                   double tol = 1e-9);

struct RayStructure {
  double beta = 0.0;
  double beta0 = 0.0;
  std::vector<double> c_min;
  std::vector<double> drift;
  bool degenerate = false;  // level set collapses to c_min at beta == beta0
  // d = 1: the level-set points themselves; d >= 2: samples along the
  // signed coordinate directions (the full set is a (d-1)-sphere section).
  std::vector<std::vector<double>> rays;
  std::string description;
};

// Shape of the extreme-ray set at the given beta: parametrized by the level
// set of the moment generating function, a strictly convex hypersurface for
// beta > beta0 degenerating to the single point c_min at beta0.
RayStructure ray_structure(const LatticeWalk& walk, double beta, double tol = 1e-9);

}  // namespace kms
