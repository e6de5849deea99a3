#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hcurl/problems.hpp"

using namespace hcurl;
using std::numbers::pi;

TEST(Problems, PaperCurlVanishes) {
  const auto p = paper_problem(0.1, 10.0);
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const Vec2 x{u(rng), u(rng)};
    EXPECT_EQ(p.curl_u(x), 0.0);
    // independent check: d1 u2 - d2 u1 from the closed form
    const double c = pi * std::cos(pi * x.x) * std::cos(pi * x.y) - pi * std::cos(pi * x.x) * std::cos(pi * x.y);
    EXPECT_LE(std::abs(c), 1e-14);
  }
}

TEST(Problems, PaperFieldValues) {
  const auto p = paper_problem(0.1, 10.0);
  const Vec2 u = p.u({0.0, 0.5});
  EXPECT_NEAR(u.x, 1.0, 1e-15);
  EXPECT_NEAR(u.y, 0.0, 1e-15);
  const Vec2 f = p.f({0.5, 0.5});
  EXPECT_NEAR(f.x, 0.0, 1e-15);
  EXPECT_NEAR(f.y, 0.0, 1e-15);
  EXPECT_NEAR(p.div_f({0.5, 0.5}), -2.0 * 10.0 * pi, 1e-12);
  const Vec2 x{0.3, 0.7};
  EXPECT_NEAR(norm(p.f(x) - 10.0 * p.u(x)), 0.0, 1e-14);
}

TEST(Problems, PaperDivergenceMatchesFiniteDifference) {
  const auto p = paper_problem(1.0, 3.0);
  const double h = 1e-6;
  for (Vec2 x : {Vec2{0.2, 0.3}, Vec2{0.7, 0.1}, Vec2{0.45, 0.9}}) {
    const double fd = (p.f({x.x + h, x.y}).x - p.f({x.x - h, x.y}).x) / (2 * h) +
                      (p.f({x.x, x.y + h}).y - p.f({x.x, x.y - h}).y) / (2 * h);
    EXPECT_NEAR(p.div_f(x), fd, 1e-7);
  }
}

TEST(Problems, BoundaryTraceVanishes) {
  const auto p = paper_problem(1.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i <= 50; ++i) {
    const double s = i / 50.0;
    worst = std::max(worst, std::abs(p.u({s, 0.0}).x));
    worst = std::max(worst, std::abs(p.u({s, 1.0}).x));
    worst = std::max(worst, std::abs(p.u({0.0, s}).y));
    worst = std::max(worst, std::abs(p.u({1.0, s}).y));
  }
  EXPECT_LE(worst, 1e-14);
}

TEST(Problems, ConsistencyOfShippedProblems) {
  for (const auto& p : {paper_problem(1.0, 1.0), paper_problem(0.1, 10.0), paper_problem(1e-5, 1e5),
                        interface_problem(1e4, 1.0, 1.0), interface_problem(1.0, 1.0, 1e4)}) {
    const auto rep = verify_consistency(p);
    EXPECT_TRUE(rep.ok) << p.name;
    EXPECT_LE(rep.max_boundary_trace, 1e-14);
  }
  const auto rep = verify_consistency(paper_problem(1.0, 1.0), 50);
  EXPECT_TRUE(rep.ok);
}

TEST(Problems, ConsistencyDetectsPerturbedLoad) {
  auto p = paper_problem(1.0, 1.0);
  const auto f = p.f;
  p.f = [f](Vec2 x) { return f(x) + Vec2{1e-3, 0.0}; };
  const auto rep = verify_consistency(p);
  EXPECT_FALSE(rep.ok);
  EXPECT_NEAR(rep.max_pde_residual, 1e-3, 1e-4);
}

TEST(Problems, ConsistencyDetectsBadTrace) {
  auto p = paper_problem(1.0, 1.0);
  const auto u = p.u;
  p.u = [u](Vec2 x) { return u(x) + Vec2{0.0, 1e-9}; };
  p.f = [u](Vec2 x) { return u(x) + Vec2{0.0, 1e-9}; };
  const auto rep = verify_consistency(p);
  EXPECT_FALSE(rep.ok);
  EXPECT_NEAR(rep.max_boundary_trace, 1e-9, 1e-12);
}

TEST(Problems, CoefficientOrdering) {
  EXPECT_THROW(CoefficientField::two_phase(1.0, 2.0, 1.0), std::invalid_argument);
  EXPECT_THROW(CoefficientField::constant(0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(CoefficientField::constant(1.0, -1.0), std::invalid_argument);
  const auto c = CoefficientField::two_phase(1e4, 1.0, 2.0);
  EXPECT_EQ(c.eps(Region::omega1), 1e4);
  EXPECT_EQ(c.eps(Region::omega2), 1.0);
  EXPECT_EQ(c.kappa(), 2.0);
  const auto k = CoefficientField::constant(0.5, 1.0);
  EXPECT_FALSE(k.has(Region::omega2));
  EXPECT_THROW(k.eps(Region::omega2), std::out_of_range);
}

TEST(Problems, InterfaceClassifierAndAlignment) {
  const auto p = interface_problem(100.0, 1.0, 1.0);
  EXPECT_EQ(p.classifier({0.2, 0.5}), Region::omega1);
  EXPECT_EQ(p.classifier({0.8, 0.5}), Region::omega2);
  EXPECT_NO_THROW(interface_problem(1.0, 1.0, 1.0, 0.25, 4));
  EXPECT_THROW(interface_problem(1.0, 1.0, 1.0, 0.3, 4), std::invalid_argument);
  EXPECT_THROW(interface_problem(1.0, 1.0, 1.0, 1.0, 4), std::invalid_argument);
  EXPECT_THROW(interface_problem(1.0, 2.0, 1.0), std::invalid_argument);
}

TEST(Problems, InterfaceLoadIsConsistentForAnyJump) {
  for (double eps1 : {1.0, 1e2, 1e4}) {
    const auto p = interface_problem(eps1, 1.0, 7.0);
    for (Vec2 x : {Vec2{0.1, 0.1}, Vec2{0.49, 0.3}, Vec2{0.51, 0.8}}) {
      EXPECT_NEAR(norm(p.f(x) - 7.0 * p.u(x)), 0.0, 1e-14);
    }
  }
}
