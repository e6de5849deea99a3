#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "hcurl/edge_fem.hpp"
#include "hcurl/mesh.hpp"
#include "hcurl/problems.hpp"
#include "hcurl/quadrature.hpp"

namespace hcurl {

enum class EstimatorKind { robust, classical };

inline const char* to_string(EstimatorKind k) {
  return k == EstimatorKind::robust ? "robust" : "classical";
}

/**
 * How the element and edge sizes entering the indicator are measured.
 *
 * area_based: h_T = sqrt(|T|), and the edge terms collected by element T are
 *   weighted with h_T of that element (hbar_s = min(h_T / sqrt(eps_S), 1 / sqrt(kappa))).
 *   This is the default and the one the acceptance reference values use.
 * diameter: h_T = longest edge of T, edge terms weighted with the edge length h_S.
 */
enum class SizeConvention { area_based, diameter };

inline double weighted_size(double h, double eps, double kappa) {
  return std::min(h / std::sqrt(eps), 1.0 / std::sqrt(kappa));
}

/**
 * Mesh sizes scaled by the coefficients:
 *   hbar   = min(h_T / sqrt(eps_T), 1 / sqrt(kappa))
 *   hbar_s = min(h_S / sqrt(eps_S), 1 / sqrt(kappa)),  eps_S = max of the neighbours.
 * Edge entries always use the edge length; see SizeConvention for element sizes.
 */
struct WeightedSizes {
  std::vector<double> h;
  std::vector<double> eps;
  std::vector<double> hbar;
  std::vector<double> h_edge;
  std::vector<double> eps_edge;
  std::vector<double> hbar_edge;
};

inline double element_size(const Mesh& mesh, Index t, SizeConvention convention) {
  return convention == SizeConvention::area_based ? std::sqrt(mesh.geometry(t).area())
                                                  : mesh.diameter(t);
}

inline WeightedSizes weighted_sizes(const Mesh& mesh, const CoefficientField& c,
                                    SizeConvention convention = SizeConvention::area_based) {
  const double kappa = c.kappa();
  WeightedSizes w;
  const std::size_t nt = mesh.num_triangles(), ne = mesh.num_edges();
  w.h.resize(nt);
  w.eps.resize(nt);
  w.hbar.resize(nt);
  for (Index t = 0; t < nt; ++t) {
    w.h[t] = element_size(mesh, t, convention);
    w.eps[t] = element_eps(mesh, c, t);
    w.hbar[t] = weighted_size(w.h[t], w.eps[t], kappa);
  }
  w.h_edge.resize(ne);
  w.eps_edge.resize(ne);
  w.hbar_edge.resize(ne);
  for (Index e = 0; e < ne; ++e) {
    const Edge& edge = mesh.edge(e);
    w.h_edge[e] = mesh.edge_length(e);
    w.eps_edge[e] = edge.is_boundary() ? w.eps[edge.plus()]
                                       : std::max(w.eps[edge.plus()], w.eps[edge.minus()]);
    w.hbar_edge[e] = weighted_size(w.h_edge[e], w.eps_edge[e], kappa);
  }
  return w;
}

struct EstimatorOptions {
  int element_degree = 6;
  int edge_points = 4;
  SizeConvention sizes = SizeConvention::area_based;
};

struct ResidualNorms {
  double r1;
  double r2;
};

/**
 * ||R1||_T and ||R2||_T. For Whitney fields div u_h = 0 and eps curl u_h is
 * elementwise constant, so R1 = -div f and R2 = f - kappa u_h on each element.
 */
inline ResidualNorms element_residuals(const DiscreteSolution& sol, const ManufacturedProblem& p,
                                       Index t, const QuadratureRule& quad) {
  if (!p.div_f) throw std::invalid_argument("problem does not provide div f");
  const TriangleGeometry g = sol.mesh->geometry(t);
  const double kappa = p.coefficients.kappa();
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t q = 0; q < quad.size(); ++q) {
    const Vec2 x = g.point(quad.points[q]);
    const double r1 = -p.div_f(x);
    const Vec2 r2 = p.f(x) - kappa * eval_uh_local(sol, t, quad.points[q]);
    s1 += quad.weights[q] * r1 * r1;
    s2 += quad.weights[q] * dot(r2, r2);
  }
  const double area = g.area();
  return {std::sqrt(s1 * area), std::sqrt(s2 * area)};
}

namespace detail {

/// Barycentric coordinates in triangle t of the point a + s (b - a) on edge e.
inline Barycentric edge_point(const Mesh& mesh, Index t, Index e, double s) {
  const auto& tv = mesh.triangle(t).vertices;
  const auto& ev = mesh.edge(e).vertices;
  Barycentric l{0.0, 0.0, 0.0};
  for (int k = 0; k < 3; ++k) {
    if (tv[k] == ev[0]) l[k] = 1.0 - s;
    if (tv[k] == ev[1]) l[k] = s;
  }
  return l;
}

/// Samples of J1 = [[f - kappa u_h]] . n_S at the edge rule points.
inline std::vector<double> normal_jump_samples(const DiscreteSolution& sol,
                                               const ManufacturedProblem& p, Index e,
                                               const LineRule& rule) {
  const Mesh& mesh = *sol.mesh;
  const Edge& edge = mesh.edge(e);
  const double kappa = p.coefficients.kappa();
  const Vec2 a = mesh.vertex(edge.vertices[0]), b = mesh.vertex(edge.vertices[1]);
  std::vector<double> out(rule.points.size());
  for (std::size_t q = 0; q < rule.points.size(); ++q) {
    const double s = rule.points[q];
    const Vec2 x = a + s * (b - a);
    const Vec2 fx = p.f(x);
    const Vec2 plus = fx - kappa * eval_uh_local(sol, edge.plus(), edge_point(mesh, edge.plus(), e, s));
    const Vec2 minus =
        fx - kappa * eval_uh_local(sol, edge.minus(), edge_point(mesh, edge.minus(), e, s));
    out[q] = dot(plus - minus, edge.normal);
  }
  return out;
}

}  // namespace detail

struct JumpNorms {
  double j1;
  double j2;
};

/**
 * ||J1||_S and ||J2||_S on an interior edge. J2 = -[[eps curl u_h]] x n_S is
 * constant along S, so ||J2||_S^2 = (eps+ c+ - eps- c-)^2 h_S.
 */
inline JumpNorms edge_jumps(const DiscreteSolution& sol, const ManufacturedProblem& p, Index e,
                            const LineRule& rule) {
  const Mesh& mesh = *sol.mesh;
  const Edge& edge = mesh.edge(e);
  if (edge.is_boundary()) throw std::invalid_argument("jump requested on a boundary edge");
  const double h = mesh.edge_length(e);
  const auto j1 = detail::normal_jump_samples(sol, p, e, rule);
  double s1 = 0.0;
  for (std::size_t q = 0; q < j1.size(); ++q) s1 += rule.weights[q] * j1[q] * j1[q];
  const double jump = element_eps(mesh, p.coefficients, edge.plus()) * curl_uh(sol, edge.plus()) -
                      element_eps(mesh, p.coefficients, edge.minus()) * curl_uh(sol, edge.minus());
  return {std::sqrt(s1 * h), std::abs(jump) * std::sqrt(h)};
}

/// Squared indicator contributions of one element.
struct IndicatorParts {
  double r1 = 0.0;
  double r2 = 0.0;
  double j1 = 0.0;
  double j2 = 0.0;

  double total() const { return r1 + r2 + j1 + j2; }
};

struct IndicatorBreakdown {
  EstimatorKind kind;
  std::vector<IndicatorParts> parts;

  std::vector<double> totals() const {
    std::vector<double> out(parts.size());
    std::transform(parts.begin(), parts.end(), out.begin(), [](const auto& p) { return p.total(); });
    return out;
  }

  /// sqrt(sum_T eta_T^2)
  double estimate() const {
    double s = 0.0;
    for (const auto& p : parts) s += p.total();
    return std::sqrt(s);
  }
};

/**
 * Per-element squared indicators
 *   robust:    h^2/kappa ||R1||^2 + hbar^2 ||R2||^2
 *              + sum_S { h_S/kappa ||J1||^2 + hbar_S eps_S^{-1/2} ||J2||^2 }
 *   classical: h^2/kappa ||R1||^2 + h^2/eps ||R2||^2
 *              + sum_S { h_S/kappa ||J1||^2 + h_S/eps_S ||J2||^2 }
 * Each interior edge term is added in full to both neighbours; boundary
 * edges contribute nothing. Under SizeConvention::area_based, h_S is replaced
 * by the size of the collecting element.
 */
inline IndicatorBreakdown indicator(const DiscreteSolution& sol, const ManufacturedProblem& p,
                                    EstimatorKind kind, const EstimatorOptions& options = {}) {
  const Mesh& mesh = *sol.mesh;
  const WeightedSizes w = weighted_sizes(mesh, p.coefficients, options.sizes);
  const double kappa = p.coefficients.kappa();
  const QuadratureRule quad = triangle_rule(options.element_degree);
  const LineRule line = gauss_line_rule(options.edge_points);

  IndicatorBreakdown out{kind, std::vector<IndicatorParts>(mesh.num_triangles())};
  for (Index t = 0; t < mesh.num_triangles(); ++t) {
    const auto r = element_residuals(sol, p, t, quad);
    const double h2 = w.h[t] * w.h[t];
    out.parts[t].r1 = h2 / kappa * r.r1 * r.r1;
    out.parts[t].r2 = (kind == EstimatorKind::robust ? w.hbar[t] * w.hbar[t] : h2 / w.eps[t]) *
                      r.r2 * r.r2;
  }
  for (Index e = 0; e < mesh.num_edges(); ++e) {
    const Edge& edge = mesh.edge(e);
    if (edge.is_boundary()) continue;
    const auto j = edge_jumps(sol, p, e, line);
    const double eps_s = w.eps_edge[e];
    for (Index t : edge.triangles) {
      const double h = options.sizes == SizeConvention::area_based ? w.h[t] : w.h_edge[e];
      const double weight2 = kind == EstimatorKind::robust
                                 ? weighted_size(h, eps_s, kappa) / std::sqrt(eps_s)
                                 : h / eps_s;
      out.parts[t].j1 += h / kappa * j.j1 * j.j1;
      out.parts[t].j2 += weight2 * j.j2 * j.j2;
    }
  }
  return out;
}

/**
 * Data oscillation with piecewise-constant L2 projections:
 *   osc1 = ||h (R1 - Q R1)|| + ||h_s^{1/2} (J1 - Q_s J1)||
 *   osc2 = ||hbar (R2 - Q R2)|| + ||hbar_s^{1/2} (J2 - Q_s J2)||
 * Squared element and edge contributions are kept. Element sizes follow the
 * size convention; edge sizes are edge lengths.
 */
struct Oscillations {
  double osc1 = 0.0;
  double osc2 = 0.0;
  std::vector<double> element_osc1;
  std::vector<double> element_osc2;
  std::vector<double> edge_osc1;
  std::vector<double> edge_osc2;
};

inline Oscillations oscillations(const DiscreteSolution& sol, const ManufacturedProblem& p,
                                 const EstimatorOptions& options = {}) {
  if (!p.div_f) throw std::invalid_argument("problem does not provide div f");
  const Mesh& mesh = *sol.mesh;
  const WeightedSizes w = weighted_sizes(mesh, p.coefficients, options.sizes);
  const double kappa = p.coefficients.kappa();
  const QuadratureRule quad = triangle_rule(options.element_degree);
  const LineRule line = gauss_line_rule(options.edge_points);

  Oscillations o;
  o.element_osc1.assign(mesh.num_triangles(), 0.0);
  o.element_osc2.assign(mesh.num_triangles(), 0.0);
  o.edge_osc1.assign(mesh.num_edges(), 0.0);
  o.edge_osc2.assign(mesh.num_edges(), 0.0);

  std::vector<double> r1(quad.size());
  std::vector<Vec2> r2(quad.size());
  for (Index t = 0; t < mesh.num_triangles(); ++t) {
    const TriangleGeometry g = mesh.geometry(t);
    double m1 = 0.0;
    Vec2 m2{};
    for (std::size_t q = 0; q < quad.size(); ++q) {
      const Vec2 x = g.point(quad.points[q]);
      r1[q] = -p.div_f(x);
      r2[q] = p.f(x) - kappa * eval_uh_local(sol, t, quad.points[q]);
      m1 += quad.weights[q] * r1[q];
      m2 = m2 + quad.weights[q] * r2[q];
    }
    double d1 = 0.0, d2 = 0.0;
    for (std::size_t q = 0; q < quad.size(); ++q) {
      d1 += quad.weights[q] * (r1[q] - m1) * (r1[q] - m1);
      const Vec2 d = r2[q] - m2;
      d2 += quad.weights[q] * dot(d, d);
    }
    o.element_osc1[t] = w.h[t] * w.h[t] * d1 * g.area();
    o.element_osc2[t] = w.hbar[t] * w.hbar[t] * d2 * g.area();
  }
  for (Index e = 0; e < mesh.num_edges(); ++e) {
    if (mesh.edge(e).is_boundary()) continue;
    const auto j1 = detail::normal_jump_samples(sol, p, e, line);
    double mean = 0.0;
    for (std::size_t q = 0; q < j1.size(); ++q) mean += line.weights[q] * j1[q];
    double d1 = 0.0;
    for (std::size_t q = 0; q < j1.size(); ++q) d1 += line.weights[q] * (j1[q] - mean) * (j1[q] - mean);
    const double h = w.h_edge[e];
    o.edge_osc1[e] = h * d1 * h;
    // J2 is constant on every edge for lowest-order fields.
    o.edge_osc2[e] = 0.0;
  }
  auto sum = [](const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); };
  o.osc1 = std::sqrt(sum(o.element_osc1)) + std::sqrt(sum(o.edge_osc1));
  o.osc2 = std::sqrt(sum(o.element_osc2)) + std::sqrt(sum(o.edge_osc2));
  return o;
}

}  // namespace hcurl
