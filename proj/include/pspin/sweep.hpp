#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "pspin/observables.hpp"

namespace pspin {

enum class Engine { closed, lindblad, sa };

std::string engine_name(Engine engine);
Engine parse_engine(const std::string& name);

/// Log-spaced t_f grid. With `total_points` > 0 that count is used,
/// otherwise `per_decade` points per decade (rounded up, endpoints kept).
struct LogGrid {
  double lo = 1.0;
  double hi = 1000.0;
  int per_decade = 24;
  int total_points = 0;

  std::vector<double> values() const;
};

struct ExperimentConfig {
  Engine engine = Engine::closed;
  int n_spins = 8;
  int p = 5;
  double gamma = 1.0;

  std::vector<double> t_f = LogGrid{}.values();

  std::vector<double> beta{std::numeric_limits<double>::infinity()};
  std::vector<double> eta_g2{1e-4};
  double omega_c = 10.0;
  double nu = 1.0;
  bool lamb_shift = true;

  double t0_temperature = 2.0;
  double tf_temperature = 0.1;

  /// 0 selects the engine's default step rule.
  double dt = 0.0;
  double bin_tol = 1e-9;
  int samples = 200;

  /// Empty csv means standard output. Empty trajectory dir disables
  /// per-run trajectory files.
  std::string csv_path;
  std::string trajectory_dir;
  /// 0 means one worker per hardware thread.
  int workers = 0;
  /// Reserved; every engine is deterministic.
  std::uint64_t seed = 0;

  void validate() const;
};

/// Overlay the groups present in `doc` onto `config`. Unknown keys throw.
void apply_json(ExperimentConfig& config, const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& config);

/// Parses a temperature-like value: a number or "inf".
double parse_extended_double(const std::string& text);

/// One point of the sweep.
struct RunSpec {
  std::size_t index = 0;
  double t_f = 0.0;
  double beta = 0.0;
  double eta_g2 = 0.0;
};

/// Runs in output order: outer loops over beta and eta_g2 (Lindblad only),
/// innermost over t_f.
std::vector<RunSpec> expand_runs(const ExperimentConfig& config);

struct RunOutput {
  AnnealResult row;
  std::vector<double> times;
  std::vector<double> energy;
  std::vector<double> fidelity;
};

/// Executes one run; failures are returned as rows with status
/// "failed:<diagnostic>" instead of throwing.
RunOutput execute_run(const ExperimentConfig& config, const RunSpec& spec);

using ProgressFn = std::function<void(const AnnealResult&, std::size_t done, std::size_t total)>;

/// Runs every point on a worker pool. Rows reach `csv` (header first) in
/// sweep order as soon as all earlier rows are done.
std::vector<AnnealResult> run_sweep(const ExperimentConfig& config, std::ostream* csv,
                                    const ProgressFn& progress = {});

/// Sidecar metadata: timestamp, echoed config, row counts, validity flags.
nlohmann::json sweep_metadata(const ExperimentConfig& config, const std::vector<AnnealResult>& rows);

const std::string& csv_header();
std::string format_row(const AnnealResult& row);
std::string format_double(double value);
void write_csv(std::ostream& out, const std::vector<AnnealResult>& rows);
/// Parses a table written by write_csv; the header must match exactly.
std::vector<AnnealResult> read_csv(std::istream& in);
std::vector<AnnealResult> read_csv_file(const std::string& path);

struct Curve {
  std::string label;
  std::vector<LogLogPoint> points;  ///< sorted by t_f, failed rows dropped
};

struct CrossoverResult {
  std::optional<double> t_star;
  /// QA and SA were sampled on different t_f grids; SA was interpolated.
  bool interpolated = false;
};

/// Smallest QA grid t_f at which SA's residual energy is strictly lower.
/// When SA lacks that exact t_f it is interpolated log-linearly in
/// (log t_f, log eps); points outside SA's range are skipped.
CrossoverResult crossover(const Curve& qa, const Curve& sa);

/// Pointwise minimum over the t_f values shared by all curves.
Curve lower_envelope(const std::vector<Curve>& curves, const std::string& label);

/// Log-log slope over the last decade of the curve, if it has 3+ points there.
std::optional<double> asymptotic_slope(const Curve& curve);

struct CrossoverEntry {
  std::string qa_label;
  std::string sa_label;
  int n_spins = 0;
  int p = 0;
  CrossoverResult result;
  std::optional<double> qa_slope;
  std::optional<double> sa_slope;
};

struct CrossoverReport {
  std::vector<CrossoverEntry> entries;
  std::vector<std::string> notes;
};

/// Groups rows into curves by parameter tuple and pairs every QA curve with
/// every SA curve of the same (N, p, gamma). For each Lindblad temperature
/// with more than one coupling the best-coupling envelope is added as an
/// extra QA curve.
CrossoverReport compare_report(const std::vector<std::vector<AnnealResult>>& tables);

void print_report(std::ostream& out, const CrossoverReport& report);

}  // namespace pspin
