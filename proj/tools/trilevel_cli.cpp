// Command-line front end: sweeps coupling grids, extracts crossover
// boundaries, runs the convergence study and emits figure-ready data files.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "trilevel/errors.hpp"
#include "trilevel/io.hpp"
#include "trilevel/model.hpp"
#include "trilevel/quantum.hpp"
#include "trilevel/scan.hpp"
#include "trilevel/semiclassical.hpp"

namespace {

using namespace trilevel;

constexpr double kRefineTol = 1e-4;

struct CommonOpts {
  std::string config = "xi";
  std::vector<double> omega;
  double mu12 = 0.0;
  double mu13 = 0.0;
  double mu23 = 0.0;
  int na = 1;
  std::string params_file;
  std::string out;
  std::string format = "csv";

  CLI::Option* config_opt = nullptr;
  CLI::Option* omega_opt = nullptr;
  CLI::Option* mu12_opt = nullptr;
  CLI::Option* mu13_opt = nullptr;
  CLI::Option* mu23_opt = nullptr;
  CLI::Option* na_opt = nullptr;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  opts.config_opt =
      cmd->add_option("--config", opts.config, "Level configuration")
          ->check(CLI::IsMember({"xi", "lambda", "v"}));
  opts.omega_opt = cmd->add_option("--omega", opts.omega,
                                   "Level energies w1,w2,w3 (field units)")
                       ->delimiter(',');
  opts.mu12_opt = cmd->add_option("--mu12", opts.mu12, "Coupling 1-2");
  opts.mu13_opt = cmd->add_option("--mu13", opts.mu13, "Coupling 1-3");
  opts.mu23_opt = cmd->add_option("--mu23", opts.mu23, "Coupling 2-3");
  opts.na_opt = cmd->add_option("--na", opts.na, "Number of atoms");
  cmd->add_option("--params", opts.params_file,
                  "Flat key-value parameter file (flags override it)");
  cmd->add_option("--out", opts.out, "Output path (default: stdout)");
  cmd->add_option("--format", opts.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));
}

ModelParams make_params(const CommonOpts& opts) {
  ModelParams params;
  if (!opts.params_file.empty()) {
    std::ifstream file(opts.params_file);
    if (!file) throw Error("cannot open parameter file " + opts.params_file);
    params = io::read_params_kv(file);
  }
  if (opts.config_opt->count() > 0 || opts.params_file.empty()) {
    params.config = configuration_from_string(opts.config);
  }
  if (opts.omega_opt->count() > 0) {
    if (opts.omega.size() != 3) {
      throw Error("--omega needs exactly three values w1,w2,w3");
    }
    params.omega1 = opts.omega[0];
    params.omega2 = opts.omega[1];
    params.omega3 = opts.omega[2];
  }
  if (opts.mu12_opt->count() > 0) params.mu12 = opts.mu12;
  if (opts.mu13_opt->count() > 0) params.mu13 = opts.mu13;
  if (opts.mu23_opt->count() > 0) params.mu23 = opts.mu23;
  if (opts.na_opt->count() > 0) params.n_atoms = opts.na;
  return validate(params);
}

// Streams to --out when given, stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw Error("cannot open output file " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

// scan.csv -> scan.quantum.csv; keeps Both-engine outputs apart.
std::string with_engine_suffix(const std::string& path, scan::Engine engine) {
  const std::string tag = std::string(".") + scan::to_string(engine);
  const std::size_t dot = path.find_last_of('.');
  const std::size_t slash = path.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
    return path + tag;
  }
  return path.substr(0, dot) + tag + path.substr(dot);
}

int cmd_separatrix(const CommonOpts& common, double tmin, double tmax,
                   int steps) {
  const ModelParams params = make_params(common);
  const auto curve = semiclassical::separatrix(params.config, params,
                                               {tmin, tmax, steps});
  Output out(common.out);
  if (common.format == "csv") {
    io::write_separatrix_csv(out.stream(), curve);
  } else {
    io::write_separatrix_json(out.stream(), curve);
  }
  return 0;
}

int cmd_minimize(const CommonOpts& common) {
  const ModelParams params = make_params(common);
  const auto result = semiclassical::minimize(params);
  Output out(common.out);
  if (common.format == "csv") {
    io::write_minimize_csv(out.stream(), result);
  } else {
    io::write_minimize_json(out.stream(), result);
  }
  return 0;
}

int cmd_ground(const CommonOpts& common, const quantum::SearchOptions& search) {
  const ModelParams params = make_params(common);
  const auto result = quantum::global_ground(params, search);
  Output out(common.out);
  if (common.format == "csv") {
    io::write_ground_csv(out.stream(), result);
  } else {
    const auto basis = quantum::enumerate_sector(params.config, params.n_atoms,
                                                 result.m_star);
    io::write_ground_json(out.stream(), result, basis);
  }
  return 0;
}

struct ScanCliOpts {
  std::string engine = "semiclassical";
  double xmin = 0.0, xmax = 3.0;
  double ymin = 0.0, ymax = 3.0;
  int xsteps = 61, ysteps = 61;
  std::string gnuplot;
  std::string crossovers;
  bool refine = false;
};

int cmd_scan(const CommonOpts& common, const ScanCliOpts& cli,
             const quantum::SearchOptions& search) {
  scan::ScanSpec spec;
  spec.base = make_params(common);
  spec.engine = scan::engine_from_string(cli.engine);
  const auto axes = allowed_couplings(spec.base.config);
  spec.x = {axes[0], cli.xmin, cli.xmax, cli.xsteps};
  spec.y = {axes[1], cli.ymin, cli.ymax, cli.ysteps};
  spec.search = search;

  const auto result = scan::run_scan(spec);
  const bool multi = result.tables.size() > 1;
  for (const auto& table : result.tables) {
    const std::string path =
        multi && !common.out.empty()
            ? with_engine_suffix(common.out, table.engine)
            : common.out;
    Output out(path);
    if (common.format == "csv") {
      io::write_scan_csv(out.stream(), table);
    } else {
      io::write_scan_jsonl(out.stream(), table);
    }
    if (!cli.gnuplot.empty()) {
      Output plot(multi ? with_engine_suffix(cli.gnuplot, table.engine)
                        : cli.gnuplot);
      io::write_gnuplot_matrix(plot.stream(), table);
    }
    if (!cli.crossovers.empty()) {
      const auto set = cli.refine
                           ? scan::extract_crossovers(table, spec, kRefineTol)
                           : scan::extract_crossovers(table);
      Output cross(multi ? with_engine_suffix(cli.crossovers, table.engine)
                         : cli.crossovers);
      if (common.format == "csv") {
        io::write_crossovers_csv(cross.stream(), set);
      } else {
        io::write_crossovers_json(cross.stream(), set);
      }
    }
  }
  if (result.failed_points > 0) {
    std::cerr << "warning: " << result.failed_points
              << " grid point(s) failed; see the error column\n";
    return 2;
  }
  return 0;
}

struct ConvergeCliOpts {
  std::vector<int> counts{2, 10};
  double xmin = 0.0, xmax = 3.0;
  double ymin = 0.0, ymax = 2.5;
  int xsteps = 31, ysteps = 11;
  double tol = kRefineTol;
};

int cmd_converge(const CommonOpts& common, const ConvergeCliOpts& cli,
                 const quantum::SearchOptions& search) {
  const ModelParams base = make_params(common);
  const auto axes = allowed_couplings(base.config);
  const scan::AxisSpec x{axes[0], cli.xmin, cli.xmax, cli.xsteps};
  const scan::AxisSpec y{axes[1], cli.ymin, cli.ymax, cli.ysteps};
  const auto study =
      scan::convergence_study(base, cli.counts, x, y, search, cli.tol);
  Output out(common.out);
  if (common.format == "csv") {
    io::write_convergence_csv(out.stream(), study);
  } else {
    io::write_convergence_json(out.stream(), study);
  }
  return 0;
}

void add_search_options(CLI::App* cmd, quantum::SearchOptions& search) {
  cmd->add_option("--window", search.window,
                  "Stop after this many non-improving sectors");
  cmd->add_option("--hard-cap", search.hard_cap,
                  "Absolute bound on the explored excitation number");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Ground-state phase structure of three-level atoms coupled to one "
      "field mode"};
  app.require_subcommand(1);
  int exit_code = 0;

  // separatrix
  auto* sep = app.add_subcommand(
      "separatrix", "Sample the normal/collective boundary curve");
  CommonOpts sep_common;
  add_common(sep, sep_common);
  double tmin = 0.0, tmax = 3.0;
  int tsteps = 121;
  sep->add_option("--tmin", tmin, "Sweep parameter lower bound");
  sep->add_option("--tmax", tmax, "Sweep parameter upper bound");
  sep->add_option("--steps", tsteps, "Number of samples");
  sep->callback(
      [&] { exit_code = cmd_separatrix(sep_common, tmin, tmax, tsteps); });

  // minimize
  auto* mini = app.add_subcommand(
      "minimize", "Minimize the variational energy surface at one point");
  CommonOpts mini_common;
  add_common(mini, mini_common);
  mini->callback([&] { exit_code = cmd_minimize(mini_common); });

  // ground
  auto* ground = app.add_subcommand(
      "ground", "Exact ground state by per-sector diagonalization");
  CommonOpts ground_common;
  add_common(ground, ground_common);
  quantum::SearchOptions ground_search;
  add_search_options(ground, ground_search);
  ground->callback(
      [&] { exit_code = cmd_ground(ground_common, ground_search); });

  // scan
  auto* scan_cmd = app.add_subcommand(
      "scan", "Evaluate an engine over a coupling grid");
  CommonOpts scan_common;
  add_common(scan_cmd, scan_common);
  ScanCliOpts scan_opts;
  quantum::SearchOptions scan_search;
  add_search_options(scan_cmd, scan_search);
  scan_cmd->add_option("--engine", scan_opts.engine, "Evaluation engine")
      ->check(CLI::IsMember({"semiclassical", "quantum", "both"}));
  scan_cmd->add_option("--xmin", scan_opts.xmin, "First-coupling lower bound");
  scan_cmd->add_option("--xmax", scan_opts.xmax, "First-coupling upper bound");
  scan_cmd->add_option("--xsteps", scan_opts.xsteps, "First-coupling samples");
  scan_cmd->add_option("--ymin", scan_opts.ymin, "Second-coupling lower bound");
  scan_cmd->add_option("--ymax", scan_opts.ymax, "Second-coupling upper bound");
  scan_cmd->add_option("--ysteps", scan_opts.ysteps, "Second-coupling samples");
  scan_cmd->add_option("--gnuplot", scan_opts.gnuplot,
                       "Also write a gnuplot matrix file here");
  scan_cmd->add_option("--crossovers", scan_opts.crossovers,
                       "Also write label-boundary polylines here");
  scan_cmd->add_flag("--refine", scan_opts.refine,
                     "Bisect crossover edges with fresh engine evaluations");
  scan_cmd->callback(
      [&] { exit_code = cmd_scan(scan_common, scan_opts, scan_search); });

  // converge
  auto* conv = app.add_subcommand(
      "converge", "Quantum M*=0 boundaries vs the separatrix for several N");
  CommonOpts conv_common;
  add_common(conv, conv_common);
  ConvergeCliOpts conv_opts;
  quantum::SearchOptions conv_search;
  add_search_options(conv, conv_search);
  conv->add_option("--counts", conv_opts.counts, "Atom counts, ascending")
      ->delimiter(',');
  conv->add_option("--xmin", conv_opts.xmin, "Boundary-coupling lower bound");
  conv->add_option("--xmax", conv_opts.xmax, "Boundary-coupling upper bound");
  conv->add_option("--xsteps", conv_opts.xsteps, "Boundary-coupling samples");
  conv->add_option("--ymin", conv_opts.ymin, "Abscissa lower bound");
  conv->add_option("--ymax", conv_opts.ymax, "Abscissa upper bound");
  conv->add_option("--ysteps", conv_opts.ysteps, "Abscissa samples");
  conv->add_option("--tol", conv_opts.tol, "Bisection tolerance");
  conv->callback(
      [&] { exit_code = cmd_converge(conv_common, conv_opts, conv_search); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& error) {
    const int code = app.exit(error);
    return code == 0 ? 0 : 1;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << '\n';
    return 1;
  }
  return exit_code;
}
