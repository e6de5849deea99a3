// Command-line driver: convergence tables, interface sweeps and adaptive runs.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hcurl/hcurl.hpp"

namespace {

using namespace hcurl;

/// Writes to the named file, or to stdout when the path is empty.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot open output file " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

  void close() {
    if (!file_.is_open()) return;
    file_.close();
    if (file_.fail()) throw std::runtime_error("failed writing output file");
  }

 private:
  std::ofstream file_;
};

void add_problem_options(CLI::App* cmd, RunConfig& c) {
  cmd->add_option("--problem", c.problem, "paper | interface")
      ->check(CLI::IsMember({"paper", "interface"}));
  cmd->add_option("--eps", c.eps, "epsilon (paper problem)");
  cmd->add_option("--kappa", c.kappa, "kappa");
  cmd->add_option("--eps1", c.eps1, "epsilon on x < split (interface problem)");
  cmd->add_option("--eps2", c.eps2, "epsilon on x >= split (interface problem)");
}

const std::map<std::string, SizeConvention> kSizes{{"area", SizeConvention::area_based},
                                                  {"diameter", SizeConvention::diameter}};

void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& fn) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  fn(f);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lowest-order edge element solver with robust a posteriori estimators"};
  app.require_subcommand(1);

  RunConfig table_cfg;
  std::string table_out, table_format = "csv", dump_dir = ".";
  bool full_precision = false, dump_indicators = false, dump_mesh = false;
  SizeConvention sizes = SizeConvention::area_based;
  auto* table = app.add_subcommand("run-table", "uniform refinement study with e, eta, eta_tilde");
  add_problem_options(table, table_cfg);
  table->add_option("--levels", table_cfg.levels, "number of refinement levels")->check(CLI::PositiveNumber);
  table->add_option("--out", table_out, "output file (default stdout)");
  table->add_option("--format", table_format)->check(CLI::IsMember({"csv", "markdown"}));
  table->add_flag("--full-precision", full_precision, "print 17 significant digits");
  table->add_flag("--dump-indicators", dump_indicators, "write per-element indicators per level");
  table->add_flag("--dump-mesh", dump_mesh, "write the mesh of every level");
  table->add_option("--dump-dir", dump_dir, "directory for dump files");
  table->add_option("--sizes", sizes, "element size convention: area | diameter")
      ->transform(CLI::CheckedTransformer(kSizes, CLI::ignore_case));

  std::vector<double> ratios{1.0, 1e2, 1e4}, kappas{1.0, 1e4};
  int sweep_levels = 4;
  double sweep_eps2 = 1.0;
  std::string sweep_out, sweep_format = "csv";
  auto* sweep = app.add_subcommand("run-sweep", "two-phase robustness sweep");
  sweep->add_option("--ratios", ratios, "eps1/eps2 values")->delimiter(',');
  sweep->add_option("--kappas", kappas, "kappa values")->delimiter(',');
  sweep->add_option("--levels", sweep_levels)->check(CLI::PositiveNumber);
  sweep->add_option("--eps2", sweep_eps2);
  sweep->add_option("--out", sweep_out, "output file (default stdout)");
  sweep->add_option("--format", sweep_format)->check(CLI::IsMember({"csv", "markdown"}));
  sweep->add_flag("--full-precision", full_precision);

  RunConfig adapt_cfg;
  double theta = 0.5;
  std::size_t max_dofs = 2000;
  std::string adapt_out, estimator = "robust";
  auto* adapt = app.add_subcommand("run-adaptive", "adaptive solve-estimate-mark-refine loop");
  add_problem_options(adapt, adapt_cfg);
  adapt->add_option("--theta", theta, "marking fraction in (0, 1]");
  adapt->add_option("--max-dofs", max_dofs, "stop once the free dof count reaches this");
  adapt->add_option("--estimator", estimator)->check(CLI::IsMember({"robust", "classical"}));
  adapt->add_option("--out", adapt_out, "output file (default stdout)");
  adapt->add_flag("--full-precision", full_precision);

  CLI11_PARSE(app, argc, argv);

  try {
    if (table->parsed()) {
      table_cfg.estimate.sizes = sizes;
      table_cfg.validate();
      if (dump_indicators || dump_mesh) std::filesystem::create_directories(dump_dir);
      const auto result = run_table(table_cfg, [&](const LevelData& d) {
        const std::filesystem::path dir(dump_dir);
        const std::string level = std::to_string(d.level);
        if (dump_mesh) {
          write_file(dir / ("mesh_level" + level + ".txt"), [&](auto& os) { write_mesh(os, d.mesh); });
        }
        if (dump_indicators) {
          write_file(dir / ("indicators_level" + level + "_robust.csv"),
                     [&](auto& os) { emit_indicators_csv(os, d.robust); });
          write_file(dir / ("indicators_level" + level + "_classical.csv"),
                     [&](auto& os) { emit_indicators_csv(os, d.classical); });
        }
      });
      Output out(table_out);
      if (table_format == "markdown") {
        emit_markdown(out.stream(), result);
      } else {
        emit_csv(out.stream(), result, full_precision);
      }
      out.close();
      if (result.failure) {
        std::cerr << "error: " << *result.failure << '\n';
        return 2;
      }
    } else if (sweep->parsed()) {
      const auto report = run_robustness_sweep(ratios, kappas, sweep_levels, sweep_eps2);
      Output out(sweep_out);
      if (sweep_format == "markdown") {
        emit_sweep_markdown(out.stream(), report);
      } else {
        emit_sweep_csv(out.stream(), report, full_precision);
      }
      out.close();
      for (const auto& e : report.entries) {
        if (e.table.failure) {
          std::cerr << "error: " << *e.table.failure << '\n';
          return 2;
        }
      }
    } else if (adapt->parsed()) {
      const auto problem = make_problem(adapt_cfg);
      const auto kind = estimator == "classical" ? EstimatorKind::classical : EstimatorKind::robust;
      const auto records = adaptive_solve(problem, kind, theta, max_dofs);
      Output out(adapt_out);
      emit_adaptive_csv(out.stream(), records, full_precision);
      out.close();
    }
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  }
  return 0;
}
