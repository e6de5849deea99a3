#pragma once

#include <algorithm>
#include <functional>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "hcurl/edge_fem.hpp"
#include "hcurl/estimators.hpp"
#include "hcurl/mesh.hpp"
#include "hcurl/problems.hpp"

namespace hcurl {

/**
 * Smallest set M with sum_{T in M} eta_T >= theta sum_T eta_T, where the
 * entries are squared indicators. Greedy by descending value, ties by id.
 * Returned ids are in greedy order.
 */
inline std::vector<Index> doerfler_mark(std::span<const double> indicators, double theta) {
  if (!(theta > 0.0 && theta <= 1.0)) throw std::invalid_argument("theta must lie in (0, 1]");
  for (double v : indicators) {
    if (!(v >= 0.0)) throw std::invalid_argument("indicators must be nonnegative");
  }
  std::vector<Index> order(indicators.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return indicators[a] > indicators[b]; });
  // Summing in greedy order makes theta = 1 reach the total exactly.
  double total = 0.0;
  for (Index i : order) total += indicators[i];
  std::vector<Index> marked;
  if (total == 0.0) return marked;
  const double target = theta * total;
  double acc = 0.0;
  for (Index i : order) {
    if (acc >= target || indicators[i] == 0.0) break;
    acc += indicators[i];
    marked.push_back(i);
  }
  return marked;
}

struct AdaptiveRecord {
  int iteration = 0;
  std::size_t elements = 0;
  std::size_t dofs = 0;
  double eta = 0.0;
  std::optional<double> error;
  std::size_t marked = 0;
};

struct AdaptiveOptions {
  int initial_subdivisions = 4;
  int max_iterations = 200;
  SolveOptions solve;
  EstimatorOptions estimate;
  /// Called once per iteration with the marked set (empty on the last one).
  std::function<void(const AdaptiveRecord&, const Mesh&, std::span<const Index> marked)> observer;
};

/// solve -> estimate -> mark -> bisect until the free dof count reaches max_dofs.
inline std::vector<AdaptiveRecord> adaptive_solve(const ManufacturedProblem& problem,
                                                  EstimatorKind kind, double theta,
                                                  std::size_t max_dofs,
                                                  const AdaptiveOptions& options = {}) {
  auto mesh = std::make_shared<const Mesh>(
      tag_regions(build_structured_unit_square(options.initial_subdivisions), problem.classifier));
  if (max_dofs <= DofMap(*mesh).num_free()) {
    throw std::invalid_argument("max_dofs must exceed the initial dof count");
  }
  std::vector<AdaptiveRecord> records;
  for (int it = 0;; ++it) {
    const DiscreteSolution sol = solve(mesh, problem, options.solve);
    const IndicatorBreakdown ind = indicator(sol, problem, kind, options.estimate);
    AdaptiveRecord rec;
    rec.iteration = it;
    rec.elements = mesh->num_triangles();
    rec.dofs = sol.dofs.num_free();
    rec.eta = ind.estimate();
    if (problem.has_exact_solution()) rec.error = energy_error(sol, problem);

    std::vector<Index> marked;
    const bool done = rec.dofs >= max_dofs || it + 1 >= options.max_iterations;
    if (!done) {
      const auto totals = ind.totals();
      marked = doerfler_mark(totals, theta);
    }
    rec.marked = marked.size();
    records.push_back(rec);
    if (options.observer) options.observer(rec, *mesh, marked);
    if (marked.empty()) break;
    mesh = std::make_shared<const Mesh>(bisect_refine(*mesh, marked));
  }
  return records;
}

}  // namespace hcurl
