#pragma once

#include <array>
#include <cmath>
#include <istream>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hcurl/geometry.hpp"
#include "hcurl/linalg.hpp"
#include "hcurl/mesh.hpp"
#include "hcurl/problems.hpp"
#include "hcurl/quadrature.hpp"

namespace hcurl {

using Matrix3 = std::array<std::array<double, 3>, 3>;

struct WhitneyValues {
  std::array<Vec2, 3> values;
  /// Scalar curl d1 v2 - d2 v1, constant over the element.
  std::array<double, 3> curls;
};

/**
 * Lowest-order Whitney 1-forms phi_k = l_i grad l_j - l_j grad l_i on the local
 * edge k = (i, j) = (k+1, k+2), multiplied by the global orientation sign.
 * The tangential moment of phi_k along its own oriented edge is sign_k.
 */
inline WhitneyValues whitney_eval(const TriangleGeometry& g, const std::array<int, 3>& signs,
                                  const Barycentric& l) {
  if (g.signed_area() == 0.0) throw std::invalid_argument("degenerate triangle");
  const auto grad = g.barycentric_gradients();
  WhitneyValues w;
  for (int k = 0; k < 3; ++k) {
    const int i = (k + 1) % 3, j = (k + 2) % 3;
    const double s = signs[k];
    w.values[k] = s * (l[i] * grad[j] - l[j] * grad[i]);
    w.curls[k] = s * 2.0 * cross(grad[i], grad[j]);
  }
  return w;
}

struct ElementMatrices {
  Matrix3 stiffness;
  Matrix3 mass;
};

/**
 * Exact element matrices: stiffness eps |T| curl_a curl_b and mass
 * kappa int phi_a . phi_b from int l_p l_q = |T| (1 + delta_pq) / 12.
 */
inline ElementMatrices element_matrices(const TriangleGeometry& g, const std::array<int, 3>& signs,
                                        double eps, double kappa) {
  const double area = g.area();
  if (area == 0.0) throw std::invalid_argument("degenerate triangle");
  if (eps < 0.0 || kappa < 0.0) throw std::invalid_argument("negative coefficient");
  const auto grad = g.barycentric_gradients();
  const double curl = 2.0 * cross(grad[1], grad[2]);
  auto lam = [area](int p, int q) { return area * (p == q ? 2.0 : 1.0) / 12.0; };
  auto gg = [&grad](int p, int q) { return dot(grad[p], grad[q]); };

  ElementMatrices m{};
  for (int a = 0; a < 3; ++a) {
    const int i = (a + 1) % 3, j = (a + 2) % 3;
    for (int b = 0; b < 3; ++b) {
      const int k = (b + 1) % 3, l = (b + 2) % 3;
      const double s = signs[a] * signs[b];
      // All three unsigned local curls equal 2 grad l_1 x grad l_2.
      m.stiffness[a][b] = s * eps * area * curl * curl;
      const double mass = lam(i, k) * gg(j, l) - lam(i, l) * gg(j, k) - lam(j, k) * gg(i, l) +
                          lam(j, l) * gg(i, k);
      m.mass[a][b] = s * kappa * mass;
    }
  }
  return m;
}

/// Edge to free-dof numbering. Constrained edges carry kNoIndex and value 0.
class DofMap {
 public:
  DofMap() = default;

  explicit DofMap(const Mesh& mesh, bool constrain_boundary = true) {
    edge_to_dof_.assign(mesh.num_edges(), kNoIndex);
    for (Index e = 0; e < mesh.num_edges(); ++e) {
      if (constrain_boundary && mesh.edge(e).is_boundary()) continue;
      edge_to_dof_[e] = num_free_++;
    }
  }

  std::size_t num_free() const { return num_free_; }
  std::size_t num_edges() const { return edge_to_dof_.size(); }
  Index dof(Index edge) const { return edge_to_dof_.at(edge); }
  bool is_constrained(Index edge) const { return edge_to_dof_.at(edge) == kNoIndex; }

 private:
  std::vector<Index> edge_to_dof_;
  Index num_free_ = 0;
};

struct LinearSystem {
  SparseMatrix matrix;
  Vector rhs;
  DofMap dofs;
};

inline double element_eps(const Mesh& mesh, const CoefficientField& c, Index t) {
  return c.eps(mesh.triangle(t).region);
}

/**
 * Galerkin system for (eps curl u, curl v) + (kappa u, v) = (f, v) with
 * boundary edges eliminated. The load vector uses the given quadrature rule.
 */
inline LinearSystem assemble_system(const Mesh& mesh, const CoefficientField& coefficients,
                                    const VectorField& f, const QuadratureRule& quad) {
  if (quad.degree < 4) throw std::invalid_argument("load quadrature must be exact to degree 4");
  LinearSystem sys;
  sys.dofs = DofMap(mesh);
  const std::size_t n = sys.dofs.num_free();
  sys.rhs.assign(n, 0.0);
  std::vector<Triplet> triplets;
  triplets.reserve(9 * mesh.num_triangles());

  for (Index t = 0; t < mesh.num_triangles(); ++t) {
    const TriangleGeometry g = mesh.geometry(t);
    const auto& signs = mesh.triangle_edge_signs(t);
    const auto& edges = mesh.triangle_edges(t);
    const auto em = element_matrices(g, signs, element_eps(mesh, coefficients, t),
                                     coefficients.kappa());
    std::array<double, 3> load{};
    if (f) {
      const double area = g.area();
      for (std::size_t q = 0; q < quad.size(); ++q) {
        const Vec2 fx = f(g.point(quad.points[q]));
        const auto w = whitney_eval(g, signs, quad.points[q]);
        for (int a = 0; a < 3; ++a) load[a] += quad.weights[q] * area * dot(fx, w.values[a]);
      }
    }
    for (int a = 0; a < 3; ++a) {
      const Index ra = sys.dofs.dof(edges[a]);
      if (ra == kNoIndex) continue;
      sys.rhs[ra] += load[a];
      for (int b = 0; b < 3; ++b) {
        const Index cb = sys.dofs.dof(edges[b]);
        if (cb == kNoIndex) continue;
        triplets.push_back({ra, cb, em.stiffness[a][b] + em.mass[a][b]});
      }
    }
  }
  sys.matrix = SparseMatrix::from_triplets(n, n, std::move(triplets));
  return sys;
}

/// Free-dof coefficients (tangential edge moments) of a discrete field.
struct DiscreteSolution {
  std::shared_ptr<const Mesh> mesh;
  DofMap dofs;
  Vector coefficients;
  std::size_t iterations = 0;
  double algebraic_residual = 0.0;

  double edge_value(Index edge) const {
    const Index d = dofs.dof(edge);
    return d == kNoIndex ? 0.0 : coefficients[d];
  }

  std::array<double, 3> local_coefficients(Index t) const {
    const auto& e = mesh->triangle_edges(t);
    return {edge_value(e[0]), edge_value(e[1]), edge_value(e[2])};
  }
};

struct SolveOptions {
  int load_degree = 4;
  double rel_tol = 1e-12;
  /// max CG iterations = factor * number of unknowns
  std::size_t max_iter_factor = 20;
  /// Also accept a CG iterate at this componentwise backward error (0 disables).
  double backward_tol = 1e-13;
};

inline DiscreteSolution solve(std::shared_ptr<const Mesh> mesh, const CoefficientField& coefficients,
                              const VectorField& f, const SolveOptions& options = {}) {
  LinearSystem sys = assemble_system(*mesh, coefficients, f, triangle_rule(options.load_degree));
  const std::size_t n = sys.dofs.num_free();
  DiscreteSolution sol{std::move(mesh), std::move(sys.dofs), {}, 0, 0.0};
  const CgResult cg = cg_solve(sys.matrix, sys.rhs, options.rel_tol,
                               std::max<std::size_t>(1, options.max_iter_factor * n),
                               options.backward_tol);
  sol.coefficients = cg.x;
  sol.iterations = cg.iterations;
  sol.algebraic_residual = cg.residual;
  return sol;
}

inline DiscreteSolution solve(std::shared_ptr<const Mesh> mesh, const ManufacturedProblem& problem,
                              const SolveOptions& options = {}) {
  return solve(std::move(mesh), problem.coefficients, problem.f, options);
}

/// u_h at barycentric coordinates of triangle t.
inline Vec2 eval_uh_local(const DiscreteSolution& sol, Index t, const Barycentric& l) {
  const auto w = whitney_eval(sol.mesh->geometry(t), sol.mesh->triangle_edge_signs(t), l);
  const auto c = sol.local_coefficients(t);
  return c[0] * w.values[0] + c[1] * w.values[1] + c[2] * w.values[2];
}

/// u_h at a physical point of triangle t (1e-12 barycentric tolerance).
inline Vec2 eval_uh(const DiscreteSolution& sol, Index t, Vec2 x) {
  const Barycentric l = sol.mesh->geometry(t).barycentric(x);
  for (double v : l) {
    if (v < -1e-12) throw std::out_of_range("point lies outside triangle " + std::to_string(t));
  }
  return eval_uh_local(sol, t, l);
}

inline double curl_uh(const DiscreteSolution& sol, Index t) {
  const auto w = whitney_eval(sol.mesh->geometry(t), sol.mesh->triangle_edge_signs(t),
                              {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
  const auto c = sol.local_coefficients(t);
  return c[0] * w.curls[0] + c[1] * w.curls[1] + c[2] * w.curls[2];
}

/// sqrt(sum_T int eps (curl u - curl u_h)^2 + kappa |u - u_h|^2).
inline double energy_error(const DiscreteSolution& sol, const CoefficientField& coefficients,
                           const VectorField& u, const ScalarField& curl_u, int degree = 6) {
  const QuadratureRule quad = triangle_rule(degree);
  const Mesh& mesh = *sol.mesh;
  const double kappa = coefficients.kappa();
  double total = 0.0;
  for (Index t = 0; t < mesh.num_triangles(); ++t) {
    const TriangleGeometry g = mesh.geometry(t);
    const double eps = element_eps(mesh, coefficients, t);
    const double ch = curl_uh(sol, t);
    double local = 0.0;
    for (std::size_t q = 0; q < quad.size(); ++q) {
      const Vec2 x = g.point(quad.points[q]);
      const Vec2 diff = u(x) - eval_uh_local(sol, t, quad.points[q]);
      const double dc = curl_u(x) - ch;
      local += quad.weights[q] * (eps * dc * dc + kappa * dot(diff, diff));
    }
    total += local * g.area();
  }
  return std::sqrt(total);
}

inline double energy_error(const DiscreteSolution& sol, const ManufacturedProblem& problem,
                           int degree = 6) {
  if (!problem.has_exact_solution()) throw std::invalid_argument("problem has no exact solution");
  return energy_error(sol, problem.coefficients, problem.u, problem.curl_u, degree);
}

/// Tangential edge moments int_E u . t ds of a field, for the free edges of dofs.
inline Vector interpolate(const Mesh& mesh, const DofMap& dofs, const VectorField& u,
                          int line_points = 4) {
  const LineRule rule = gauss_line_rule(line_points);
  Vector c(dofs.num_free(), 0.0);
  for (Index e = 0; e < mesh.num_edges(); ++e) {
    const Index d = dofs.dof(e);
    if (d == kNoIndex) continue;
    const auto& ev = mesh.edge(e).vertices;
    const Vec2 a = mesh.vertex(ev[0]), b = mesh.vertex(ev[1]);
    double s = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      s += rule.weights[q] * dot(u(a + rule.points[q] * (b - a)), b - a);
    }
    c[d] = s;
  }
  return c;
}

/// Plain text: one `edge_id coefficient` line per free dof.
inline void write_solution(std::ostream& os, const DiscreteSolution& sol) {
  const auto old = os.precision(17);
  for (Index e = 0; e < sol.dofs.num_edges(); ++e) {
    const Index d = sol.dofs.dof(e);
    if (d != kNoIndex) os << e << ' ' << sol.coefficients[d] << '\n';
  }
  os.precision(old);
}

inline DiscreteSolution read_solution(std::istream& is, std::shared_ptr<const Mesh> mesh) {
  DofMap dofs(*mesh);
  Vector c(dofs.num_free(), 0.0);
  std::vector<char> seen(dofs.num_free(), 0);
  Index e = 0;
  double v = 0.0;
  while (is >> e >> v) {
    if (e >= dofs.num_edges() || dofs.is_constrained(e)) {
      throw std::runtime_error("solution record for unknown or constrained edge " + std::to_string(e));
    }
    c[dofs.dof(e)] = v;
    seen[dofs.dof(e)] = 1;
  }
  for (char s : seen) {
    if (!s) throw std::runtime_error("solution file does not cover every free edge");
  }
  return DiscreteSolution{std::move(mesh), std::move(dofs), std::move(c), 0, 0.0};
}

}  // namespace hcurl
