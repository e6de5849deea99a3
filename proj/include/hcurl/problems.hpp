#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

#include "hcurl/geometry.hpp"
#include "hcurl/mesh.hpp"

namespace hcurl {

using VectorField = std::function<Vec2(Vec2)>;
using ScalarField = std::function<double(Vec2)>;

/// Piecewise-constant epsilon per region and a constant positive kappa.
class CoefficientField {
 public:
  static CoefficientField constant(double eps, double kappa) {
    CoefficientField c(kappa);
    c.set(Region::omega1, eps);
    return c;
  }

  /// Two-phase field with eps1 >= eps2 > 0 on regions omega1 and omega2.
  static CoefficientField two_phase(double eps1, double eps2, double kappa) {
    if (!(eps1 >= eps2)) throw std::invalid_argument("two-phase coefficients need eps1 >= eps2");
    CoefficientField c(kappa);
    c.set(Region::omega1, eps1);
    c.set(Region::omega2, eps2);
    return c;
  }

  double kappa() const { return kappa_; }

  bool has(Region r) const { return eps_[slot(r)].has_value(); }

  double eps(Region r) const {
    const auto& e = eps_[slot(r)];
    if (!e) {
      throw std::out_of_range("no epsilon for region " + std::to_string(static_cast<int>(r)));
    }
    return *e;
  }

 private:
  explicit CoefficientField(double kappa) : kappa_(kappa) {
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw std::invalid_argument("kappa must be positive");
  }

  void set(Region r, double eps) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("epsilon must be positive");
    eps_[slot(r)] = eps;
  }

  static std::size_t slot(Region r) { return static_cast<std::size_t>(r) - 1; }

  std::array<std::optional<double>, 2> eps_;
  double kappa_;
};

/**
 * Problem eps curl* curl u + kappa u = f on the unit square with u x n = 0.
 * u and curl_u are empty when no exact solution is known.
 */
struct ManufacturedProblem {
  std::string name;
  CoefficientField coefficients;
  VectorField f;
  ScalarField div_f;
  VectorField u;
  ScalarField curl_u;
  std::function<Region(Vec2)> classifier = [](Vec2) { return Region::omega1; };

  bool has_exact_solution() const { return static_cast<bool>(u) && static_cast<bool>(curl_u); }
};

namespace detail {

inline Vec2 smooth_field(Vec2 x) {
  using std::numbers::pi;
  return {std::cos(pi * x.x) * std::sin(pi * x.y), std::sin(pi * x.x) * std::cos(pi * x.y)};
}

}  // namespace detail

/**
 * u = (cos(pi x) sin(pi y), sin(pi x) cos(pi y)) with constant eps, kappa.
 * curl u vanishes identically, so f = kappa u and div f = -2 kappa pi sin sin.
 */
inline ManufacturedProblem paper_problem(double eps, double kappa) {
  using std::numbers::pi;
  ManufacturedProblem p{"paper", CoefficientField::constant(eps, kappa), {}, {}, {}, {}};
  p.u = detail::smooth_field;
  p.curl_u = [](Vec2) { return 0.0; };
  p.f = [kappa](Vec2 x) { return kappa * detail::smooth_field(x); };
  p.div_f = [kappa](Vec2 x) { return -2.0 * kappa * pi * std::sin(pi * x.x) * std::sin(pi * x.y); };
  return p;
}

/**
 * Same exact field as paper_problem with eps1 on x < split and eps2 elsewhere.
 * The split must lie on a grid line of the initial n x n mesh.
 */
inline ManufacturedProblem interface_problem(double eps1, double eps2, double kappa,
                                             double split = 0.5, int initial_subdivisions = 4) {
  const double scaled = split * initial_subdivisions;
  if (!(split > 0.0 && split < 1.0) || std::abs(scaled - std::round(scaled)) > 1e-12) {
    throw std::invalid_argument("interface abscissa is not aligned with the initial mesh");
  }
  ManufacturedProblem p = paper_problem(1.0, kappa);
  p.name = "interface";
  p.coefficients = CoefficientField::two_phase(eps1, eps2, kappa);
  p.classifier = [split](Vec2 x) { return x.x < split ? Region::omega1 : Region::omega2; };
  return p;
}

struct ConsistencyReport {
  bool ok = true;
  double max_pde_residual = 0.0;
  Vec2 worst_pde_point;
  double max_boundary_trace = 0.0;
  Vec2 worst_boundary_point;
};

/**
 * Samples a regular interior grid (n_samples per direction) and n_samples points
 * per boundary side. The PDE residual f - eps curl*(curl u) - kappa u uses a
 * central difference of curl_u with step 1e-5 and must stay below
 * 1e-6 max(1, |f|); the tangential trace u.t must stay below 1e-12.
 */
inline ConsistencyReport verify_consistency(const ManufacturedProblem& p, int n_samples = 20) {
  if (!p.has_exact_solution()) throw std::invalid_argument("problem has no exact solution");
  ConsistencyReport rep;
  constexpr double step = 1e-5;
  const double kappa = p.coefficients.kappa();
  for (int j = 0; j < n_samples; ++j) {
    for (int i = 0; i < n_samples; ++i) {
      const Vec2 x{(i + 0.5) / n_samples, (j + 0.5) / n_samples};
      const double eps = p.coefficients.eps(p.classifier(x));
      // curl* w = (d2 w, -d1 w) for the scalar curl d1 v2 - d2 v1.
      const double d1 = (p.curl_u({x.x + step, x.y}) - p.curl_u({x.x - step, x.y})) / (2 * step);
      const double d2 = (p.curl_u({x.x, x.y + step}) - p.curl_u({x.x, x.y - step})) / (2 * step);
      const Vec2 fx = p.f(x);
      const Vec2 r = fx - eps * Vec2{d2, -d1} - kappa * p.u(x);
      const double scaled = norm(r) / std::max(1.0, norm(fx));
      if (scaled > rep.max_pde_residual) {
        rep.max_pde_residual = scaled;
        rep.worst_pde_point = x;
      }
    }
  }
  for (int i = 0; i < n_samples; ++i) {
    const double s = (i + 0.5) / n_samples;
    const std::array<std::pair<Vec2, Vec2>, 4> sides{{{{s, 0.0}, {1.0, 0.0}},
                                                       {{1.0, s}, {0.0, 1.0}},
                                                       {{s, 1.0}, {1.0, 0.0}},
                                                       {{0.0, s}, {0.0, 1.0}}}};
    for (const auto& [x, t] : sides) {
      const double trace = std::abs(dot(p.u(x), t));
      if (trace > rep.max_boundary_trace) {
        rep.max_boundary_trace = trace;
        rep.worst_boundary_point = x;
      }
    }
  }
  rep.ok = rep.max_pde_residual <= 1e-6 && rep.max_boundary_trace <= 1e-12;
  return rep;
}

}  // namespace hcurl
