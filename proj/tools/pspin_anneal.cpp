#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "pspin/diagnostics.hpp"
#include "pspin/sweep.hpp"

using namespace pspin;

namespace {

struct RunFlags {
  std::string config;
  std::optional<std::string> engine;
  std::optional<int> n_spins;
  std::optional<int> p;
  std::optional<double> gamma;
  std::vector<double> t_f;
  std::vector<double> t_f_range;
  std::optional<int> per_decade;
  std::optional<int> points;
  std::vector<std::string> beta;
  std::vector<double> eta_g2;
  std::optional<double> omega_c;
  std::optional<double> nu;
  std::optional<std::string> lamb_shift;
  std::optional<double> t0;
  std::optional<double> tf;
  std::optional<double> dt;
  std::optional<double> bin_tol;
  std::optional<int> samples;
  std::optional<std::string> out;
  std::optional<std::string> trajectories;
  std::optional<int> workers;
  std::optional<std::uint64_t> seed;
  std::string meta;
  bool quiet = false;
};

bool parse_on_off(const std::string& value) {
  if (value == "on") return true;
  if (value == "off") return false;
  throw std::invalid_argument("--lamb-shift expects on or off");
}

ExperimentConfig build_config(const RunFlags& f) {
  ExperimentConfig c = f.config.empty() ? ExperimentConfig{} : load_config(f.config);
  if (f.engine) c.engine = parse_engine(*f.engine);
  if (f.n_spins) c.n_spins = *f.n_spins;
  if (f.p) c.p = *f.p;
  if (f.gamma) c.gamma = *f.gamma;
  if (!f.t_f.empty()) c.t_f = f.t_f;
  if (!f.t_f_range.empty() || f.per_decade || f.points) {
    LogGrid grid;
    if (!f.t_f_range.empty()) {
      grid.lo = f.t_f_range[0];
      grid.hi = f.t_f_range[1];
    } else {
      grid.lo = c.t_f.front();
      grid.hi = c.t_f.back();
    }
    if (f.per_decade) grid.per_decade = *f.per_decade;
    if (f.points) grid.total_points = *f.points;
    c.t_f = grid.values();
  }
  if (!f.beta.empty()) {
    c.beta.clear();
    for (const auto& b : f.beta) c.beta.push_back(parse_extended_double(b));
  }
  if (!f.eta_g2.empty()) c.eta_g2 = f.eta_g2;
  if (f.omega_c) c.omega_c = *f.omega_c;
  if (f.nu) c.nu = *f.nu;
  if (f.lamb_shift) c.lamb_shift = parse_on_off(*f.lamb_shift);
  if (f.t0) c.t0_temperature = *f.t0;
  if (f.tf) c.tf_temperature = *f.tf;
  if (f.dt) c.dt = *f.dt;
  if (f.bin_tol) c.bin_tol = *f.bin_tol;
  if (f.samples) c.samples = *f.samples;
  if (f.out) c.csv_path = *f.out;
  if (f.trajectories) c.trajectory_dir = *f.trajectories;
  if (f.workers) c.workers = *f.workers;
  if (f.seed) c.seed = *f.seed;
  c.validate();
  return c;
}

int command_run(const RunFlags& flags) {
  const ExperimentConfig config = build_config(flags);
  std::ofstream file;
  std::ostream* csv = &std::cout;
  if (!config.csv_path.empty()) {
    file.open(config.csv_path);
    if (!file) throw std::runtime_error("cannot write '" + config.csv_path + "'");
    csv = &file;
  }
  ProgressFn progress;
  if (!flags.quiet) {
    progress = [](const AnnealResult& row, std::size_t done, std::size_t total) {
      std::cerr << '[' << done << '/' << total << "] " << row.engine << " t_f=" << row.t_f
                << " eps=" << row.residual_energy << ' ' << row.status << '\n';
    };
  }
  const auto rows = run_sweep(config, csv, progress);

  std::string meta_path = flags.meta;
  if (meta_path.empty() && !config.csv_path.empty()) meta_path = config.csv_path + ".meta.json";
  if (!meta_path.empty()) {
    std::ofstream meta(meta_path);
    if (!meta) throw std::runtime_error("cannot write '" + meta_path + "'");
    meta << sweep_metadata(config, rows).dump(2) << '\n';
  }
  std::size_t failed = 0;
  for (const auto& r : rows) failed += r.ok() ? 0 : 1;
  if (failed) std::cerr << failed << " of " << rows.size() << " runs failed\n";
  return failed ? 1 : 0;
}

int command_compare(const std::vector<std::string>& inputs, const std::string& out_path) {
  std::vector<std::vector<AnnealResult>> tables;
  bool all_ok = true;
  for (const auto& path : inputs) {
    tables.push_back(read_csv_file(path));
    for (const auto& r : tables.back()) all_ok = all_ok && r.ok();
  }
  const CrossoverReport report = compare_report(tables);
  for (const auto& note : report.notes) std::cerr << "note: " << note << '\n';
  if (out_path.empty()) {
    print_report(std::cout, report);
  } else {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write '" + out_path + "'");
    print_report(out, report);
  }
  return all_ok ? 0 : 1;
}

int command_gap(const std::vector<int>& sizes, int p, double gamma, int grid_points, bool refine,
                const std::string& out_path) {
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw std::runtime_error("cannot write '" + out_path + "'");
    out = &file;
  }
  const ModelParams params{p, gamma};
  const auto grid = uniform_grid(grid_points);
  *out << "n_spins,p,s_star,gap\n";
  for (int n : sizes) {
    const GapResult g = minimum_gap(SpinSector(n), params, grid, refine);
    *out << n << ',' << p << ',' << format_double(g.s_star) << ',' << format_double(g.gap) << '\n';
  }
  return 0;
}

struct StationaryFlags {
  std::string engine = "lindblad";
  int n_spins = 4;
  int p = 5;
  double gamma = 1.0;
  double s = 0.5;
  std::string beta = "2";
  double eta_g2 = 1e-2;
  double omega_c = 10.0;
  std::string lamb_shift = "on";
  double temperature = 0.5;
  double duration = 200.0;
  double dt = 0.0;
};

int command_stationary(const StationaryFlags& f) {
  std::cout << std::setprecision(6);
  if (f.engine == "sa") {
    const GlauberCheck c = glauber_fixed_point(f.n_spins, f.p, f.temperature, f.duration, f.dt);
    std::cout << "engine=sa n_spins=" << f.n_spins << " p=" << f.p << " T=" << f.temperature << '\n'
              << "tv_distance=" << c.tv_distance << '\n'
              << "detailed_balance_error=" << c.detailed_balance_error << '\n'
              << "stationary_residual=" << c.stationary_residual << '\n';
    return 0;
  }
  if (f.engine != "lindblad") throw std::invalid_argument("--engine must be lindblad or sa");
  const BathSpec bath{f.eta_g2, 1.0, parse_extended_double(f.beta), f.omega_c, 1.0, parse_on_off(f.lamb_shift)};
  EvolveOptions options;
  options.dt = f.dt;
  const GibbsCheck c = davies_fixed_point(f.n_spins, {f.p, f.gamma}, f.s, bath, f.duration, options);
  std::cout << "engine=lindblad n_spins=" << f.n_spins << " p=" << f.p << " s=" << f.s << " beta=" << f.beta
            << " eta_g2=" << f.eta_g2 << '\n'
            << "rhs_norm_at_gibbs=" << c.rhs_norm << '\n'
            << "tv_distance=" << c.tv_distance << '\n'
            << "relative_entropy_initial=" << c.initial_relative_entropy << '\n'
            << "relative_entropy_final=" << c.final_relative_entropy << '\n'
            << "max_relative_entropy_increase=" << c.max_entropy_increase << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"p-spin quantum and simulated annealing simulator"};
  app.require_subcommand(1);

  RunFlags run;
  auto* run_cmd = app.add_subcommand("run", "Run a t_f sweep and write the result CSV");
  run_cmd->add_option("-c,--config", run.config, "JSON experiment config")->check(CLI::ExistingFile);
  run_cmd->add_option("--engine", run.engine, "closed, lindblad or sa");
  run_cmd->add_option("-n,--n-spins", run.n_spins);
  run_cmd->add_option("-p,--p", run.p);
  run_cmd->add_option("--gamma", run.gamma);
  run_cmd->add_option("--t-f", run.t_f, "explicit t_f list");
  run_cmd->add_option("--t-f-range", run.t_f_range, "log grid bounds LO HI")->expected(2);
  run_cmd->add_option("--per-decade", run.per_decade);
  run_cmd->add_option("--points", run.points, "total points of the log grid");
  run_cmd->add_option("--beta", run.beta, "inverse temperatures (accepts inf)");
  run_cmd->add_option("--eta-g2", run.eta_g2, "coupling strengths eta g^2");
  run_cmd->add_option("--omega-c", run.omega_c);
  run_cmd->add_option("--nu", run.nu);
  run_cmd->add_option("--lamb-shift", run.lamb_shift, "on|off");
  run_cmd->add_option("--T0", run.t0);
  run_cmd->add_option("--Tf", run.tf);
  run_cmd->add_option("--dt", run.dt, "0 selects the default rule");
  run_cmd->add_option("--bin-tol", run.bin_tol);
  run_cmd->add_option("--samples", run.samples);
  run_cmd->add_option("-o,--out", run.out, "result CSV (default stdout)");
  run_cmd->add_option("--trajectories", run.trajectories, "directory for per-run trajectory CSVs");
  run_cmd->add_option("--meta", run.meta, "metadata JSON (default <out>.meta.json)");
  run_cmd->add_option("-j,--workers", run.workers);
  run_cmd->add_option("--seed", run.seed);
  run_cmd->add_flag("-q,--quiet", run.quiet);

  std::vector<std::string> compare_inputs;
  std::string compare_out;
  auto* compare_cmd = app.add_subcommand("compare", "SA vs QA crossover report from result CSVs");
  compare_cmd->add_option("tables", compare_inputs)->required()->check(CLI::ExistingFile);
  compare_cmd->add_option("-o,--out", compare_out);

  std::vector<int> gap_sizes;
  int gap_p = 5;
  double gap_gamma = 1.0;
  int gap_points = 2001;
  bool gap_no_refine = false;
  std::string gap_out;
  auto* gap_cmd = app.add_subcommand("gap", "Minimum gap scan");
  gap_cmd->add_option("-n,--n-spins", gap_sizes)->required();
  gap_cmd->add_option("-p,--p", gap_p);
  gap_cmd->add_option("--gamma", gap_gamma);
  gap_cmd->add_option("--grid-points", gap_points)->check(CLI::Range(3, 1000000));
  gap_cmd->add_flag("--no-refine", gap_no_refine);
  gap_cmd->add_option("-o,--out", gap_out);

  StationaryFlags st;
  auto* st_cmd = app.add_subcommand("stationary", "Fixed-point diagnostics at frozen H or fixed T");
  st_cmd->add_option("--engine", st.engine, "lindblad or sa")->capture_default_str();
  st_cmd->add_option("-n,--n-spins", st.n_spins)->capture_default_str();
  st_cmd->add_option("-p,--p", st.p)->capture_default_str();
  st_cmd->add_option("--gamma", st.gamma)->capture_default_str();
  st_cmd->add_option("--s", st.s)->capture_default_str();
  st_cmd->add_option("--beta", st.beta)->capture_default_str();
  st_cmd->add_option("--eta-g2", st.eta_g2)->capture_default_str();
  st_cmd->add_option("--omega-c", st.omega_c)->capture_default_str();
  st_cmd->add_option("--lamb-shift", st.lamb_shift)->capture_default_str();
  st_cmd->add_option("--temperature", st.temperature, "SA temperature")->capture_default_str();
  st_cmd->add_option("--duration", st.duration)->capture_default_str();
  st_cmd->add_option("--dt", st.dt)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  try {
    if (*run_cmd) return command_run(run);
    if (*compare_cmd) return command_compare(compare_inputs, compare_out);
    if (*gap_cmd) return command_gap(gap_sizes, gap_p, gap_gamma, gap_points, !gap_no_refine, gap_out);
    if (*st_cmd) return command_stationary(st);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
