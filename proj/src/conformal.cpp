#include "kms/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

#include "kms/errors.hpp"
#include "kms/lattice.hpp"

namespace kms {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string letters(int n) {
  return std::string(1, "abcdefghijklmnopqrstuvwxyz"[n]);
}

// Shell masses by distance from the base vertex; frontier vertices count in
// their shell (they carry mass even though their out-edges are cut).
std::vector<double> shell_masses(const EigenSolution& s) {
  const FiniteGraph& g = *s.graph;
  std::vector<int> depth(g.vertex_count(), -1);
  std::deque<int> queue{s.base};
  depth[static_cast<std::size_t>(s.base)] = 0;
  int max_depth = 0;
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (int e : g.out_edges(v)) {
      int w = g.edge_dst(e);
      if (depth[static_cast<std::size_t>(w)] < 0) {
        depth[static_cast<std::size_t>(w)] = depth[static_cast<std::size_t>(v)] + 1;
        max_depth = std::max(max_depth, depth[static_cast<std::size_t>(w)]);
        queue.push_back(w);
      }
    }
  }
  std::vector<double> shells(static_cast<std::size_t>(max_depth) + 1, 0.0);
  for (std::size_t v = 0; v < g.vertex_count(); ++v)
    if (depth[v] >= 0) shells[static_cast<std::size_t>(depth[v])] += s.xi[v];
  return shells;
}

StateCheck shell_ratio_check(const EigenSolution& s, const StateCheckOptions& options) {
  StateCheck out;
  auto shells = shell_masses(s);
  int window = std::min<int>(options.tail_window, static_cast<int>(shells.size()) - 1);
  if (window < 2) {
    out.determined = false;
    out.certificate = "graph too shallow for a shell-ratio estimate";
    return out;
  }
  double lo = kInf, hi = 0.0;
  for (std::size_t k = shells.size() - static_cast<std::size_t>(window); k < shells.size(); ++k) {
    if (shells[k - 1] <= 0.0) continue;
    double r = shells[k] / shells[k - 1];
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  if (hi < 1.0 - 1e-6) {
    double partial = 0.0;
    for (double m : shells) partial += m;
    out.is_state = true;
    out.total_mass = partial + shells.back() * hi / (1.0 - hi);
    out.tail_ratio = hi;
    out.certificate = "trailing shell masses decay geometrically (ratio <= " +
                      std::to_string(hi) + "); total mass estimated with a geometric tail";
  } else if (lo >= 1.0) {
    out.is_state = false;
    out.total_mass = kInf;
    out.tail_ratio = lo;
    out.certificate = "trailing shell masses do not decay (ratio >= 1); the vertex sum diverges";
  } else {
    out.determined = false;
    out.certificate = "trailing shell ratios straddle 1; deepen the truncation to decide";
  }
  return out;
}

}  // namespace

CylinderMeasure::CylinderMeasure(EigenSolution solution) : solution_(std::move(solution)) {
  if (!solution_.graph) throw std::invalid_argument("solution carries no graph");
}

double CylinderMeasure::measure_of(const FinitePath& p) const {
  const FiniteGraph& g = *solution_.graph;
  double f = solution_.potential.along(g, p);
  int r = path_range(g, p);
  return std::exp(-solution_.beta * f) * solution_.xi[static_cast<std::size_t>(r)];
}

double CylinderMeasure::measure_of(const std::vector<std::string>& edge_ids) const {
  if (edge_ids.empty())
    throw std::invalid_argument("empty edge list does not name a cylinder; use vertex_mass");
  return measure_of(make_path(*solution_.graph, edge_ids));
}

double CylinderMeasure::vertex_mass(int v) const {
  return solution_.xi[static_cast<std::size_t>(v)];
}

AdditivityReport check_additivity(const CylinderMeasure& m, int depth, bool require_complete) {
  if (depth < 1) throw std::invalid_argument("refinement depth must be positive");
  const FiniteGraph& g = m.graph();
  AdditivityReport report;
  std::deque<FinitePath> queue;
  for (int v = 0; v < static_cast<int>(g.vertex_count()); ++v) queue.push_back(FinitePath{v, {}});
  while (!queue.empty()) {
    FinitePath p = queue.front();
    queue.pop_front();
    int r = path_range(g, p);
    if (g.is_frontier(r)) {
      if (require_complete)
        throw FrontierError("cylinder " + path_label(g, p) + " ends at frontier vertex " +
                            g.vertex_id(r) + "; its refinement is not in the window");
      ++report.skipped_frontier;
      continue;
    }
    double whole = m.measure_of(p);
    double sum = 0.0;
    for (int e : g.out_edges(r)) {
      FinitePath q = p;
      q.edges.push_back(e);
      sum += m.measure_of(q);
      if (static_cast<int>(q.length()) < depth) queue.push_back(std::move(q));
    }
    double err = std::abs(whole - sum) / std::max(1.0, std::abs(whole));
    if (err > report.max_error) {
      report.max_error = err;
      report.worst_cylinder = path_label(g, p);
    }
    ++report.cylinders_checked;
  }
  return report;
}

DualityReport ruelle_dual_check(const CylinderMeasure& m, int depth) {
  if (depth < 1) throw std::invalid_argument("depth must be positive");
  const FiniteGraph& g = m.graph();
  DualityReport report;
  for (int v = 0; v < static_cast<int>(g.vertex_count()); ++v) {
    for (int n = 1; n <= depth; ++n) {
      std::vector<FinitePath> paths;
      try {
        paths = enumerate_paths(g, v, n);
      } catch (const std::length_error&) {
        throw std::length_error("too many paths at depth " + std::to_string(n) +
                                "; lower the duality check depth");
      }
      for (const auto& p : paths) {
        double lhs = m.measure_of(p);
        double factor = std::exp(-m.beta() * m.solution().potential.at(g, v));
        double rhs = factor * m.measure_of(shift_path(g, p));
        double err = std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs));
        if (err > report.max_error) {
          report.max_error = err;
          report.worst_cylinder = path_label(g, p);
        }
        ++report.paths_checked;
      }
    }
  }
  return report;
}

StateCheck state_check(const GraphFamily& family, const EigenSolution& solution,
                       const StateCheckOptions& options) {
  StateCheck out;
  const double beta = solution.beta;

  switch (family.kind()) {
    case GraphFamily::Kind::explicit_finite:
    case GraphFamily::Kind::rose: {
      double total = 0.0;
      for (double x : solution.xi) total += x;
      out.is_state = true;
      out.total_mass = total;
      out.certificate = "finite vertex set; the mass is a finite sum";
      return out;
    }
    case GraphFamily::Kind::arms: {
      if (!solution.potential.is_gauge()) return shell_ratio_check(solution, options);
      int k = family.arm_count();
      double floor = arms_floor(beta);
      double worst_slack = 0.0;
      std::string worst_arm;
      for (int a = 0; a < k; ++a) {
        double t = solution.at(letters(a) + "1");
        double slack = t - floor;
        if (slack > worst_slack) {
          worst_slack = slack;
          worst_arm = letters(a);
        }
      }
      if (worst_slack > options.tol) {
        out.is_state = false;
        out.total_mass = kInf;
        out.tail_ratio = std::exp(beta);
        out.certificate = "arm " + worst_arm + " sits " + std::to_string(worst_slack) +
                          " above the geometric floor; its outward values grow like exp(n beta)";
        return out;
      }
      // All arms on the floor: outward values decay like exp(-n beta) and
      // both chains sum in closed form.
      double emb = std::exp(-beta);
      double outward = (emb * emb / (1.0 - emb)) / (1.0 - emb * emb);
      double inward = 1.0 / (std::exp(beta) - 1.0);
      out.is_state = true;
      out.total_mass = 1.0 + k * (outward + inward);
      out.tail_ratio = emb;
      out.certificate = "every arm sits on the geometric floor; chains sum geometrically";
      return out;
    }
    case GraphFamily::Kind::ladder: {
      if (!solution.potential.is_gauge()) return shell_ratio_check(solution, options);
      double r = std::exp(2.0 * beta) / (1.0 + std::exp(beta));
      out.threshold = ladder_state_threshold();
      out.tail_ratio = r;
      if (r < 1.0) {
        out.is_state = true;
        out.total_mass = 1.0 + (1.0 + std::exp(-beta)) * r / (1.0 - r);
        out.certificate = "rung masses form a geometric series with ratio " + std::to_string(r);
      } else {
        out.is_state = false;
        out.total_mass = kInf;
        out.certificate = "rung masses scale by " + std::to_string(r) +
                          " >= 1 per level; the vertex sum diverges";
      }
      return out;
    }
    case GraphFamily::Kind::lattice_walk: {
      const auto& walk = family.walk();
      const FiniteGraph& g = *solution.graph;
      std::vector<int> origin(walk.dim, 0);
      double at_origin = solution.at(lattice_vertex_name(origin));
      std::vector<double> c(static_cast<std::size_t>(walk.dim), 0.0);
      for (int i = 0; i < walk.dim; ++i) {
        std::vector<int> unit(walk.dim, 0);
        unit[static_cast<std::size_t>(i)] = 1;
        c[static_cast<std::size_t>(i)] =
            std::log(solution.at(lattice_vertex_name(unit))) - std::log(at_origin);
      }
      std::vector<int> u(walk.dim, 0);
      bool any = false;
      for (int i = 0; i < walk.dim; ++i) {
        if (c[static_cast<std::size_t>(i)] > 0) u[static_cast<std::size_t>(i)] = 1, any = true;
        if (c[static_cast<std::size_t>(i)] < 0) u[static_cast<std::size_t>(i)] = -1, any = true;
      }
      if (!any) u[0] = 1;
      out.is_state = false;
      out.total_mass = kInf;
      out.certificate = "vertex masses along direction " + lattice_vertex_name(u) +
                        " never decay (the exponent <c, u> is nonnegative), and the lattice "
                        "contains infinitely many such vertices";
      return out;
    }
  }
  throw std::logic_error("unknown family kind");
}

double ladder_state_threshold() {
  // Root of exp(2 beta) = 1 + exp(beta): below it the rung ratio is < 1.
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (std::exp(2.0 * mid) - 1.0 - std::exp(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace kms
