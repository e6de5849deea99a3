#pragma once

#include <algorithm>
#include <cstdio>
#include <functional>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hcurl/amr.hpp"
#include "hcurl/edge_fem.hpp"
#include "hcurl/estimators.hpp"
#include "hcurl/mesh.hpp"
#include "hcurl/problems.hpp"

namespace hcurl {

struct RunConfig {
  /// "paper" or "interface"
  std::string problem = "paper";
  double eps = 0.1;
  double kappa = 10.0;
  double eps1 = 1.0;
  double eps2 = 1.0;
  double split = 0.5;
  int levels = 5;
  int initial_subdivisions = 4;
  int energy_degree = 6;
  SolveOptions solve;
  EstimatorOptions estimate;

  void validate() const {
    if (levels < 1) throw std::invalid_argument("levels must be at least 1");
    if (initial_subdivisions < 1) throw std::invalid_argument("initial subdivisions must be positive");
    if (problem == "paper") {
      if (!(eps > 0.0 && kappa > 0.0)) throw std::invalid_argument("eps and kappa must be positive");
    } else if (problem == "interface") {
      if (!(eps1 > 0.0 && eps2 > 0.0 && kappa > 0.0)) {
        throw std::invalid_argument("eps1, eps2 and kappa must be positive");
      }
    } else {
      throw std::invalid_argument("unknown problem '" + problem + "'");
    }
  }
};

inline ManufacturedProblem make_problem(const RunConfig& c) {
  c.validate();
  if (c.problem == "interface") {
    return interface_problem(c.eps1, c.eps2, c.kappa, c.split, c.initial_subdivisions);
  }
  return paper_problem(c.eps, c.kappa);
}

struct ConvergenceRow {
  std::size_t elements = 0;
  double e = 0.0;
  double eta = 0.0;
  double eta_tilde = 0.0;
};

/// Per-level results; effectivities are arithmetic means of e/eta over the rows.
struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  std::optional<std::string> failure;

  double eff_eta() const { return mean_ratio([](const ConvergenceRow& r) { return r.eta; }); }
  double eff_eta_tilde() const {
    return mean_ratio([](const ConvergenceRow& r) { return r.eta_tilde; });
  }

 private:
  template <class Get>
  double mean_ratio(Get get) const {
    if (rows.empty()) return 0.0;
    double s = 0.0;
    for (const auto& r : rows) s += r.e / get(r);
    return s / static_cast<double>(rows.size());
  }
};

struct LevelData {
  int level;
  const Mesh& mesh;
  const DiscreteSolution& solution;
  const IndicatorBreakdown& robust;
  const IndicatorBreakdown& classical;
};

/**
 * Uniform red-refinement study from the n x n structured mesh. Solver
 * failures end the table early and are recorded in `failure`.
 */
inline ConvergenceTable run_table(const RunConfig& config,
                                  const std::function<void(const LevelData&)>& observer = {}) {
  const ManufacturedProblem problem = make_problem(config);
  ConvergenceTable table;
  auto mesh = std::make_shared<const Mesh>(
      tag_regions(build_structured_unit_square(config.initial_subdivisions), problem.classifier));
  for (int level = 0; level < config.levels; ++level) {
    if (level > 0) mesh = std::make_shared<const Mesh>(red_refine(*mesh));
    try {
      const DiscreteSolution sol = solve(mesh, problem, config.solve);
      const auto robust = indicator(sol, problem, EstimatorKind::robust, config.estimate);
      const auto classical = indicator(sol, problem, EstimatorKind::classical, config.estimate);
      table.rows.push_back({mesh->num_triangles(), energy_error(sol, problem, config.energy_degree),
                            robust.estimate(), classical.estimate()});
      if (observer) observer({level, *mesh, sol, robust, classical});
    } catch (const SolverError& err) {
      table.failure = "level " + std::to_string(level) + ": " + err.what();
      break;
    }
  }
  return table;
}

struct SweepEntry {
  double ratio;
  double kappa;
  ConvergenceTable table;
};

struct SweepReport {
  std::vector<SweepEntry> entries;

  /// max/min of eff(eta) (or eff(eta_tilde)) over all entries.
  double eff_spread(EstimatorKind kind) const {
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (const auto& e : entries) {
      const double v =
          kind == EstimatorKind::robust ? e.table.eff_eta() : e.table.eff_eta_tilde();
      lo = first ? v : std::min(lo, v);
      hi = first ? v : std::max(hi, v);
      first = false;
    }
    return first ? 1.0 : hi / lo;
  }
};

/// Two-phase sweep with eps2 fixed and eps1 = ratio * eps2.
inline SweepReport run_robustness_sweep(const std::vector<double>& ratios,
                                        const std::vector<double>& kappas, int levels = 4,
                                        double eps2 = 1.0, const RunConfig& base = {}) {
  SweepReport report;
  for (double kappa : kappas) {
    for (double ratio : ratios) {
      if (!(ratio >= 1.0)) throw std::invalid_argument("coefficient ratio must be >= 1");
      RunConfig c = base;
      c.problem = "interface";
      c.eps1 = ratio * eps2;
      c.eps2 = eps2;
      c.kappa = kappa;
      c.levels = levels;
      report.entries.push_back({ratio, kappa, run_table(c)});
    }
  }
  return report;
}

// Output

inline std::string format_number(double v, bool full_precision = false) {
  char buf[64];
  std::snprintf(buf, sizeof buf, full_precision ? "%.17g" : "%.2e", v);
  return buf;
}

inline void emit_csv(std::ostream& os, const ConvergenceTable& t, bool full_precision = false) {
  os << "elements,e,eta,eta_tilde\n";
  for (const auto& r : t.rows) {
    os << r.elements << ',' << format_number(r.e, full_precision) << ','
       << format_number(r.eta, full_precision) << ',' << format_number(r.eta_tilde, full_precision)
       << '\n';
  }
  if (!t.rows.empty()) {
    os << "eff,," << format_number(t.eff_eta(), full_precision) << ','
       << format_number(t.eff_eta_tilde(), full_precision) << '\n';
  }
  if (t.failure) os << "# failed: " << *t.failure << '\n';
}

inline void emit_markdown(std::ostream& os, const ConvergenceTable& t) {
  os << "| number of elements | e | eta | eta_tilde |\n";
  os << "|---:|---:|---:|---:|\n";
  for (const auto& r : t.rows) {
    os << "| " << r.elements << " | " << format_number(r.e) << " | " << format_number(r.eta)
       << " | " << format_number(r.eta_tilde) << " |\n";
  }
  if (!t.rows.empty()) {
    os << "| eff | N/A | " << format_number(t.eff_eta()) << " | "
       << format_number(t.eff_eta_tilde()) << " |\n";
  }
  if (t.failure) os << "\nFailed: " << *t.failure << '\n';
}

/// A convergence table as read back from CSV, with the footer as printed.
struct CsvTable {
  std::vector<ConvergenceRow> rows;
  std::optional<double> eff_eta;
  std::optional<double> eff_eta_tilde;
  std::optional<std::string> failure;
};

inline CsvTable parse_csv(std::istream& is) {
  CsvTable out;
  std::string line;
  if (!std::getline(is, line) || line != "elements,e,eta,eta_tilde") {
    throw std::runtime_error("missing convergence table header");
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line.rfind("# failed: ", 0) == 0) {
      out.failure = line.substr(10);
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (cells.size() != 4) throw std::runtime_error("malformed CSV row: " + line);
    if (cells[0] == "eff") {
      out.eff_eta = std::stod(cells[2]);
      out.eff_eta_tilde = std::stod(cells[3]);
    } else {
      out.rows.push_back({std::stoul(cells[0]), std::stod(cells[1]), std::stod(cells[2]),
                          std::stod(cells[3])});
    }
  }
  return out;
}

inline void emit_sweep_csv(std::ostream& os, const SweepReport& r, bool full_precision = false) {
  os << "ratio,kappa,eff_eta,eff_eta_tilde\n";
  for (const auto& e : r.entries) {
    os << format_number(e.ratio, full_precision) << ',' << format_number(e.kappa, full_precision)
       << ',' << format_number(e.table.eff_eta(), full_precision) << ','
       << format_number(e.table.eff_eta_tilde(), full_precision) << '\n';
  }
}

inline void emit_sweep_markdown(std::ostream& os, const SweepReport& r) {
  os << "| eps1/eps2 | kappa | eff(eta) | eff(eta_tilde) |\n";
  os << "|---:|---:|---:|---:|\n";
  for (const auto& e : r.entries) {
    os << "| " << format_number(e.ratio) << " | " << format_number(e.kappa) << " | "
       << format_number(e.table.eff_eta()) << " | " << format_number(e.table.eff_eta_tilde())
       << " |\n";
  }
  if (!r.entries.empty()) {
    os << "\nmax/min eff(eta) = " << format_number(r.eff_spread(EstimatorKind::robust))
       << ", max/min eff(eta_tilde) = " << format_number(r.eff_spread(EstimatorKind::classical))
       << '\n';
  }
}

inline void emit_adaptive_csv(std::ostream& os, const std::vector<AdaptiveRecord>& records,
                              bool full_precision = false) {
  os << "iter,elements,dofs,eta,error,marked\n";
  for (const auto& r : records) {
    os << r.iteration << ',' << r.elements << ',' << r.dofs << ','
       << format_number(r.eta, full_precision) << ','
       << (r.error ? format_number(*r.error, full_precision) : std::string()) << ',' << r.marked
       << '\n';
  }
}

/// `element_id,r1,r2,j1,j2,total` per element.
inline void emit_indicators_csv(std::ostream& os, const IndicatorBreakdown& b) {
  os << "element_id,r1,r2,j1,j2,total\n";
  for (std::size_t t = 0; t < b.parts.size(); ++t) {
    const auto& p = b.parts[t];
    os << t << ',' << format_number(p.r1, true) << ',' << format_number(p.r2, true) << ','
       << format_number(p.j1, true) << ',' << format_number(p.j2, true) << ','
       << format_number(p.total(), true) << '\n';
  }
}

}  // namespace hcurl
