#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kms/eigensolver.hpp"
#include "kms/families.hpp"
#include "kms/graph.hpp"

namespace kms {

// Measure on the infinite-path space determined by an eigenvector solution:
// a cylinder Z(mu) gets mass exp(-beta * F0(mu)) * xi at the range of mu.
class CylinderMeasure {
public:
  explicit CylinderMeasure(EigenSolution solution);

  const EigenSolution& solution() const { return solution_; }
  const FiniteGraph& graph() const { return *solution_.graph; }
  double beta() const { return solution_.beta; }

  double measure_of(const FinitePath& p) const;
  double measure_of(const std::vector<std::string>& edge_ids) const;
  // Mass of the full cylinder at a vertex (the empty path there).
  double vertex_mass(int v) const;

private:
  EigenSolution solution_;
};

struct AdditivityReport {
  double max_error = 0.0;  // relative to max(1, m(Z(mu)))
  std::string worst_cylinder;
  std::size_t cylinders_checked = 0;
  std::size_t skipped_frontier = 0;  // cylinders ending at the frontier
  bool pass(double tol) const { return max_error < tol; }
};

// Checks m(Z(mu)) = sum over one-edge extensions of m(Z(mu e)) for every
// path of length < depth. Cylinders ending at a frontier vertex cannot be
// refined and are skipped (counted); with require_complete they throw
// FrontierError instead.
AdditivityReport check_additivity(const CylinderMeasure& m, int depth,
                                  bool require_complete = false);

struct DualityReport {
  double max_error = 0.0;
  std::string worst_cylinder;
  std::size_t paths_checked = 0;
  bool pass(double tol) const { return max_error < tol; }
};

// Checks the shift relation m(Z(mu)) = exp(-beta F0(s(mu))) m(Z(sigma mu))
// over all paths with 1 <= |mu| <= depth.
DualityReport ruelle_dual_check(const CylinderMeasure& m, int depth);

struct StateCheckOptions {
  double tol = 1e-9;
  int tail_window = 8;  // trailing shells used for the numeric ratio estimate
};

struct StateCheck {
  bool is_state = false;
  bool determined = true;   // false when the numeric tail is inconclusive
  double total_mass = 0.0;  // +inf when divergent; meaningful when is_state
  std::string certificate;
  std::optional<double> threshold;   // family state/weight boundary when known
  std::optional<double> tail_ratio;  // geometric ratio backing the verdict
};

// Decides whether the weight defined by the solution normalizes to a state
// (finite total mass over the infinite vertex set). Closed forms where the
// family admits them, a shell-ratio estimate with an explicit certificate
// otherwise.
StateCheck state_check(const GraphFamily& family, const EigenSolution& solution,
                       const StateCheckOptions& options = {});

// Inverse temperature where the ladder mass stops being finite, computed by
// bisection on the shell ratio reaching 1.
double ladder_state_threshold();

}  // namespace kms
