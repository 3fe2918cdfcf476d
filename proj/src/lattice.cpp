#include "kms/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "kms/errors.hpp"

namespace kms {

namespace {

double dot(const std::vector<double>& a, const std::vector<int>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * static_cast<double>(b[i]);
  return s;
}

// Solves H x = g for a small symmetric positive definite H (Gaussian
// elimination with partial pivoting).
std::vector<double> solve_dense(std::vector<std::vector<double>> h, std::vector<double> g) {
  const std::size_t n = g.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(h[i][k]) > std::abs(h[piv][k])) piv = i;
    std::swap(h[k], h[piv]);
    std::swap(g[k], g[piv]);
    if (h[k][k] == 0.0) throw NonConvergenceError("singular Newton system");
    for (std::size_t i = k + 1; i < n; ++i) {
      double m = h[i][k] / h[k][k];
      for (std::size_t j = k; j < n; ++j) h[i][j] -= m * h[k][j];
      g[i] -= m * g[k];
    }
  }
  std::vector<double> x(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double s = g[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= h[i][j] * x[j];
    x[i] = s / h[i][i];
  }
  return x;
}

// Orthonormal basis of the span of the support steps (Gram-Schmidt).
std::vector<std::vector<double>> support_span(const LatticeWalk& walk) {
  std::vector<std::vector<double>> basis;
  for (const auto& [step, count] : walk.support) {
    std::vector<double> v(step.begin(), step.end());
    for (const auto& b : basis) {
      double p = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) p += v[i] * b[i];
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= p * b[i];
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm > 1e-12) {
      for (double& x : v) x /= norm;
      basis.push_back(std::move(v));
    }
  }
  return basis;
}

}  // namespace

MgfValue mgf(const LatticeWalk& walk, const std::vector<double>& c) {
  if (static_cast<int>(c.size()) != walk.dim)
    throw std::invalid_argument("argument has wrong dimension");
  MgfValue r;
  const std::size_t d = static_cast<std::size_t>(walk.dim);
  r.gradient.assign(d, 0.0);
  r.hessian.assign(d, std::vector<double>(d, 0.0));
  for (const auto& [step, count] : walk.support) {
    double t = static_cast<double>(count) * std::exp(dot(c, step));
    r.value += t;
    for (std::size_t i = 0; i < d; ++i) {
      r.gradient[i] += t * static_cast<double>(step[i]);
      for (std::size_t j = 0; j < d; ++j)
        r.hessian[i][j] += t * static_cast<double>(step[i]) * static_cast<double>(step[j]);
    }
  }
  return r;
}

MgfMinimum minimize_mgf(const LatticeWalk& walk, double tol, int max_iterations) {
  const std::size_t d = static_cast<std::size_t>(walk.dim);
  std::vector<std::vector<double>> basis = support_span(walk);
  const std::size_t r = basis.size();

  MgfMinimum out;
  out.support_spans = (r == d);
  {
    MgfValue at0 = mgf(walk, std::vector<double>(d, 0.0));
    out.drift = at0.gradient;
  }

  // Work in span coordinates y, c = B^T y with rows of `basis` as B.
  std::vector<double> y(r, 0.0);
  auto to_c = [&](const std::vector<double>& yy) {
    std::vector<double> c(d, 0.0);
    for (std::size_t k = 0; k < r; ++k)
      for (std::size_t i = 0; i < d; ++i) c[i] += yy[k] * basis[k][i];
    return c;
  };
  double value = mgf(walk, to_c(y)).value;
  int it = 0;
  for (; it < max_iterations; ++it) {
    MgfValue m = mgf(walk, to_c(y));
    value = m.value;
    std::vector<double> gy(r, 0.0);
    std::vector<std::vector<double>> hy(r, std::vector<double>(r, 0.0));
    for (std::size_t k = 0; k < r; ++k) {
      for (std::size_t i = 0; i < d; ++i) gy[k] += basis[k][i] * m.gradient[i];
      for (std::size_t l = 0; l < r; ++l)
        for (std::size_t i = 0; i < d; ++i)
          for (std::size_t j = 0; j < d; ++j)
            hy[k][l] += basis[k][i] * m.hessian[i][j] * basis[l][j];
    }
    double gnorm = 0.0;
    for (double x : gy) gnorm = std::max(gnorm, std::abs(x));
    if (gnorm <= tol * std::max(1.0, value)) break;
    std::vector<double> step = solve_dense(hy, gy);
    double t = 1.0;
    bool moved = false;
    for (int halving = 0; halving < 60; ++halving) {
      std::vector<double> trial = y;
      for (std::size_t k = 0; k < r; ++k) trial[k] -= t * step[k];
      double trial_value = mgf(walk, to_c(trial)).value;
      if (trial_value < value) {
        y = std::move(trial);
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) break;  // at numeric stationarity
  }
  out.iterations = it;
  out.c_min = to_c(y);
  out.min_value = mgf(walk, out.c_min).value;
  out.beta0 = std::log(out.min_value);
  return out;
}

bool semigroup_generates(const LatticeWalk& walk, int max_word_length) {
  std::set<std::vector<int>> reach;
  std::set<std::vector<int>> layer{std::vector<int>(static_cast<std::size_t>(walk.dim), 0)};
  for (int len = 1; len <= max_word_length; ++len) {
    std::set<std::vector<int>> next;
    for (const auto& p : layer)
      for (const auto& [step, count] : walk.support) {
        std::vector<int> q = p;
        for (std::size_t i = 0; i < q.size(); ++i) q[i] += step[i];
        if (!reach.count(q)) next.insert(q);
      }
    for (const auto& q : next) reach.insert(q);
    layer = std::move(next);
    if (layer.empty()) break;
  }
  std::vector<int> origin(static_cast<std::size_t>(walk.dim), 0);
  if (!reach.count(origin)) return false;
  for (int axis = 0; axis < walk.dim; ++axis)
    for (int s : {1, -1}) {
      std::vector<int> unit(static_cast<std::size_t>(walk.dim), 0);
      unit[static_cast<std::size_t>(axis)] = s;
      if (!reach.count(unit)) return false;
    }
  return true;
}

EigenSolution exponential_eigenvector(const LatticeWalk& walk, const std::vector<double>& c,
                                      int radius) {
  if (radius < walk.max_step_norm())
    throw std::invalid_argument("window radius smaller than the walk's step radius");
  GraphFamily family = GraphFamily::lattice_walk(walk);
  auto graph = std::make_shared<const FiniteGraph>(family.truncation(radius));
  double beta = std::log(mgf(walk, c).value);
  std::vector<double> xi(graph->vertex_count(), 0.0);
  for (int v = 0; v < static_cast<int>(graph->vertex_count()); ++v) {
    std::vector<int> p = parse_lattice_vertex(graph->vertex_id(v), walk.dim);
    xi[static_cast<std::size_t>(v)] = std::exp(dot(c, p));
  }
  EigenSolution s;
  s.graph = graph;
  s.beta = beta;
  s.potential = VertexPotential::gauge();
  s.xi = std::move(xi);
  s.base = graph->index_of(lattice_vertex_name(std::vector<int>(static_cast<std::size_t>(walk.dim), 0)));
  s.closed_form = true;
  s.description = "exponential vector for c = " + [&] {
    std::string t = "(";
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (i) t += ',';
      t += std::to_string(c[i]);
    }
    return t + ")";
  }();
  s.residual = verify(s).residual;
  return s;
}

namespace {

// One-dimensional search outward from c_min along direction u for the point
// with M(c_min + t u) = target; the restriction is increasing in t >= 0.
std::vector<double> level_point(const LatticeWalk& walk, const std::vector<double>& c_min,
                                const std::vector<double>& u, double target) {
  auto value = [&](double t) {
    std::vector<double> c = c_min;
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += t * u[i];
    return mgf(walk, c).value;
  };
  double hi = 1.0;
  int guard = 0;
  while (value(hi) < target) {
    hi *= 2.0;
    if (++guard > 200) throw NonConvergenceError("level set escaped the search bracket");
  }
  double lo = 0.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (value(mid) < target) lo = mid; else hi = mid;
  }
  std::vector<double> c = c_min;
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += 0.5 * (lo + hi) * u[i];
  return c;
}

}  // namespace

std::vector<std::vector<double>> lattice_level_set(const LatticeWalk& walk, double beta,
                                                   double tol) {
  MgfMinimum m = minimize_mgf(walk);
  if (beta < m.beta0 - tol)
    throw InfeasibleError("no nonnegative solution below the minimal beta " +
                          std::to_string(m.beta0));
  if (beta <= m.beta0 + tol) return {m.c_min};
  double target = std::exp(beta);
  std::vector<std::vector<double>> out;
  if (walk.dim == 1 && m.support_spans) {
    out.push_back(level_point(walk, m.c_min, {-1.0}, target));
    out.push_back(level_point(walk, m.c_min, {1.0}, target));
    return out;
  }
  if (!m.support_spans) {
    // The level set is a cylinder over the spanned subspace; report the
    // in-span sections along the spanned signed axes.
    std::vector<std::vector<double>> basis = support_span(walk);
    for (const auto& b : basis) {
      std::vector<double> nb(b.size());
      for (std::size_t i = 0; i < b.size(); ++i) nb[i] = -b[i];
      out.push_back(level_point(walk, m.c_min, nb, target));
      out.push_back(level_point(walk, m.c_min, b, target));
    }
    return out;
  }
  for (int axis = 0; axis < walk.dim; ++axis)
    for (int s : {-1, 1}) {
      std::vector<double> u(static_cast<std::size_t>(walk.dim), 0.0);
      u[static_cast<std::size_t>(axis)] = static_cast<double>(s);
      out.push_back(level_point(walk, m.c_min, u, target));
    }
  std::sort(out.begin(), out.end());
  return out;
}

RayStructure ray_structure(const LatticeWalk& walk, double beta, double tol) {
  MgfMinimum m = minimize_mgf(walk);
  RayStructure r;
  r.beta = beta;
  r.beta0 = m.beta0;
  r.c_min = m.c_min;
  r.drift = m.drift;
  if (beta < m.beta0 - tol)
    throw InfeasibleError("no rays below the minimal beta " + std::to_string(m.beta0));
  r.degenerate = beta <= m.beta0 + tol;
  r.rays = lattice_level_set(walk, beta, tol);
  double drift_norm = 0.0;
  for (double x : m.drift) drift_norm = std::max(drift_norm, std::abs(x));
  if (r.degenerate) {
    r.description = drift_norm <= tol
        ? "level set degenerates to c_min; single ray (zero drift)"
        : "level set degenerates to c_min; single exponential ray";
  } else if (walk.dim == 1) {
    r.description = "two extreme rays, one per side of c_min";
  } else {
    r.description = "extreme rays parametrized by the level-set sphere (dimension " +
                    std::to_string(walk.dim - 1) + "); coordinate-direction samples listed";
  }
  return r;
}

}  // namespace kms
