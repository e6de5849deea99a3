#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "hcurl/geometry.hpp"

namespace hcurl {

/// Rule on the reference triangle in barycentric coordinates; weights sum to 1.
struct QuadratureRule {
  std::vector<Barycentric> points;
  std::vector<double> weights;
  int degree = 0;

  std::size_t size() const { return points.size(); }
};

/// Gauss-Legendre rule on [0, 1]; weights sum to 1.
struct LineRule {
  std::vector<double> points;
  std::vector<double> weights;
  int degree = 0;
};

namespace detail {

inline void add_orbit_s3(QuadratureRule& q, double w) {
  q.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
  q.weights.push_back(w);
}

inline void add_orbit_s21(QuadratureRule& q, double a, double w) {
  const double b = 1.0 - 2.0 * a;
  for (const Barycentric& l : {Barycentric{a, a, b}, Barycentric{a, b, a}, Barycentric{b, a, a}}) {
    q.points.push_back(l);
    q.weights.push_back(w);
  }
}

inline void add_orbit_s111(QuadratureRule& q, double a, double b, double w) {
  const double c = 1.0 - a - b;
  for (const Barycentric& l : {Barycentric{a, b, c}, Barycentric{a, c, b}, Barycentric{b, a, c},
                               Barycentric{b, c, a}, Barycentric{c, a, b}, Barycentric{c, b, a}}) {
    q.points.push_back(l);
    q.weights.push_back(w);
  }
}

}  // namespace detail

/// Gauss-Legendre nodes on [-1, 1] by Newton iteration on the three-term recurrence.
inline void gauss_legendre_nodes(int n, std::vector<double>& x, std::vector<double>& w) {
  if (n < 1) throw std::invalid_argument("Gauss-Legendre rule needs at least one point");
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[n - 1 - i] = z;
    w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

inline LineRule gauss_line_rule(int n) {
  std::vector<double> x, w;
  gauss_legendre_nodes(n, x, w);
  LineRule r;
  r.degree = 2 * n - 1;
  for (int i = 0; i < n; ++i) {
    r.points.push_back(0.5 * (x[i] + 1.0));
    r.weights.push_back(0.5 * w[i]);
  }
  return r;
}

/**
 * Symmetric Dunavant rules of degree 1, 2, 4, 6 and 8 (1, 3, 6, 12 and 16
 * points). Other degrees are rounded up to the next available rule.
 */
inline QuadratureRule triangle_rule(int degree) {
  QuadratureRule q;
  if (degree <= 1) {
    q.degree = 1;
    detail::add_orbit_s3(q, 1.0);
  } else if (degree == 2) {
    q.degree = 2;
    detail::add_orbit_s21(q, 1.0 / 6.0, 1.0 / 3.0);
  } else if (degree <= 4) {
    q.degree = 4;
    detail::add_orbit_s21(q, 0.445948490915965, 0.223381589678011);
    detail::add_orbit_s21(q, 0.091576213509771, 0.109951743655322);
  } else if (degree <= 6) {
    q.degree = 6;
    detail::add_orbit_s21(q, 0.249286745170910, 0.116786275726379);
    detail::add_orbit_s21(q, 0.063089014491502, 0.050844906370207);
    detail::add_orbit_s111(q, 0.053145049844817, 0.310352451033784, 0.082851075618374);
  } else if (degree <= 8) {
    q.degree = 8;
    detail::add_orbit_s3(q, 0.144315607677787);
    detail::add_orbit_s21(q, 0.459292588292723, 0.095091634267285);
    detail::add_orbit_s21(q, 0.170569307751760, 0.103217370534718);
    detail::add_orbit_s21(q, 0.050547228317031, 0.032458497623198);
    detail::add_orbit_s111(q, 0.008394777409958, 0.263112829634638, 0.027230314174435);
  } else {
    throw std::invalid_argument("no symmetric triangle rule above degree 8");
  }
  return q;
}

/**
 * Collapsed (Duffy) tensor Gauss rule with n x (n + 1) points, exact to degree 2n - 1.
 * Coordinates: x = s (1 - t), y = t with Jacobian (1 - t).
 */
inline QuadratureRule collapsed_gauss_rule(int n) {
  const LineRule g = gauss_line_rule(n + 1);
  QuadratureRule q;
  q.degree = 2 * n - 1;
  const LineRule gs = gauss_line_rule(n);
  for (std::size_t j = 0; j < g.points.size(); ++j) {
    const double t = g.points[j];
    for (std::size_t i = 0; i < gs.points.size(); ++i) {
      const double s = gs.points[i];
      const double x = s * (1.0 - t);
      const double y = t;
      q.points.push_back({1.0 - x - y, x, y});
      // Reference area 1/2 is normalised away: weights sum to 1.
      q.weights.push_back(2.0 * gs.weights[i] * g.weights[j] * (1.0 - t));
    }
  }
  return q;
}

}  // namespace hcurl
