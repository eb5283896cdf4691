#include "pspin/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "pspin/evolver.hpp"
#include "pspin/glauber.hpp"

namespace pspin {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string short_number(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::ostringstream out;
  out << std::setprecision(6) << value;
  return out.str();
}

double json_number(const json& value, const std::string& key) {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) return parse_extended_double(value.get<std::string>());
  throw std::invalid_argument("config: '" + key + "' must be a number");
}

std::vector<double> json_numbers(const json& value, const std::string& key) {
  std::vector<double> out;
  if (value.is_array()) {
    for (const auto& item : value) out.push_back(json_number(item, key));
  } else {
    out.push_back(json_number(value, key));
  }
  return out;
}

json extended_number(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return value;
}

void check_keys(const json& group, const std::string& name, std::initializer_list<const char*> allowed) {
  if (!group.is_object()) throw std::invalid_argument("config: '" + name + "' must be an object");
  for (const auto& [key, _] : group.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      throw std::invalid_argument("config: unknown key '" + name + "." + key + "'");
  }
}

std::string sanitize(std::string text) {
  for (char& c : text)
    if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ';';
  return text;
}

double max_step(const ExperimentConfig& config, double t_f) {
  switch (config.engine) {
    case Engine::closed: return t_f / 100.0;
    case Engine::lindblad: return default_time_step(t_f);
    case Engine::sa: return default_sa_time_step(t_f, config.n_spins);
  }
  return 0.0;
}

}  // namespace

std::string engine_name(Engine engine) {
  switch (engine) {
    case Engine::closed: return "closed";
    case Engine::lindblad: return "lindblad";
    case Engine::sa: return "sa";
  }
  return "?";
}

Engine parse_engine(const std::string& name) {
  if (name == "closed") return Engine::closed;
  if (name == "lindblad") return Engine::lindblad;
  if (name == "sa") return Engine::sa;
  throw std::invalid_argument("unknown engine '" + name + "' (closed, lindblad, sa)");
}

double parse_extended_double(const std::string& text) {
  if (text == "inf" || text == "+inf" || text == "infinity") return kInf;
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("not a number: '" + text + "'");
  }
  if (used != text.size()) throw std::invalid_argument("not a number: '" + text + "'");
  return value;
}

std::vector<double> LogGrid::values() const {
  if (!(lo > 0.0) || !(hi >= lo)) throw std::invalid_argument("t_f grid: need 0 < lo <= hi");
  int n = total_points;
  if (n <= 0) {
    if (per_decade < 1) throw std::invalid_argument("t_f grid: points per decade must be >= 1");
    n = static_cast<int>(std::ceil(per_decade * std::log10(hi / lo) - 1e-9)) + 1;
  }
  if (lo == hi || n == 1) return {lo};
  std::vector<double> out(static_cast<std::size_t>(n));
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (int i = 0; i < n; ++i) out[i] = std::pow(10.0, a + (b - a) * i / (n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

void ExperimentConfig::validate() const {
  if (n_spins < 1) throw std::invalid_argument("config: n_spins must be >= 1");
  ModelParams{p, gamma}.validate();
  if (t_f.empty()) throw std::invalid_argument("config: t_f list is empty");
  for (std::size_t i = 0; i < t_f.size(); ++i) {
    if (!(t_f[i] > 0.0) || !std::isfinite(t_f[i]))
      throw std::invalid_argument("config: t_f values must be positive and finite");
    if (i > 0 && !(t_f[i] > t_f[i - 1])) throw std::invalid_argument("config: t_f list must be sorted ascending");
  }
  if (!(dt >= 0.0)) throw std::invalid_argument("config: dt must be >= 0");
  if (!(bin_tol > 0.0)) throw std::invalid_argument("config: bin_tol must be > 0");
  if (samples < 1) throw std::invalid_argument("config: samples must be >= 1");
  if (workers < 0) throw std::invalid_argument("config: workers must be >= 0");

  if (engine == Engine::lindblad) {
    if (beta.empty() || eta_g2.empty()) throw std::invalid_argument("config: bath beta and eta_g2 lists must be nonempty");
    for (double b : beta)
      for (double e : eta_g2) BathSpec{e, 1.0, b, omega_c, nu, lamb_shift}.validate();
  }
  if (engine == Engine::sa) SaSchedule{t0_temperature, tf_temperature, 1.0}.validate();

  if (dt > 0.0) {
    const double limit = max_step(*this, t_f.front());
    if (dt > limit * (1.0 + 1e-12)) {
      std::ostringstream msg;
      msg << "config: dt = " << dt << " exceeds the " << engine_name(engine) << " step limit " << limit
          << " at t_f = " << t_f.front();
      throw std::invalid_argument(msg.str());
    }
  }
}

void apply_json(ExperimentConfig& config, const json& doc) {
  check_keys(doc, "config", {"engine", "model", "schedule", "bath", "sa", "numerics", "output", "run"});
  if (doc.contains("engine")) config.engine = parse_engine(doc.at("engine").get<std::string>());
  if (doc.contains("model")) {
    const auto& g = doc.at("model");
    check_keys(g, "model", {"n_spins", "p", "gamma"});
    if (g.contains("n_spins")) config.n_spins = g.at("n_spins").get<int>();
    if (g.contains("p")) config.p = g.at("p").get<int>();
    if (g.contains("gamma")) config.gamma = json_number(g.at("gamma"), "gamma");
  }
  if (doc.contains("schedule")) {
    const auto& g = doc.at("schedule");
    check_keys(g, "schedule", {"t_f", "t_f_range"});
    if (g.contains("t_f") && g.contains("t_f_range"))
      throw std::invalid_argument("config: give either schedule.t_f or schedule.t_f_range");
    if (g.contains("t_f")) config.t_f = json_numbers(g.at("t_f"), "t_f");
    if (g.contains("t_f_range")) {
      const auto& r = g.at("t_f_range");
      check_keys(r, "schedule.t_f_range", {"lo", "hi", "per_decade", "points"});
      LogGrid grid;
      if (r.contains("lo")) grid.lo = json_number(r.at("lo"), "lo");
      if (r.contains("hi")) grid.hi = json_number(r.at("hi"), "hi");
      if (r.contains("per_decade")) grid.per_decade = r.at("per_decade").get<int>();
      if (r.contains("points")) grid.total_points = r.at("points").get<int>();
      config.t_f = grid.values();
    }
  }
  if (doc.contains("bath")) {
    const auto& g = doc.at("bath");
    check_keys(g, "bath", {"beta", "eta_g2", "omega_c", "nu", "lamb_shift"});
    if (g.contains("beta")) config.beta = json_numbers(g.at("beta"), "beta");
    if (g.contains("eta_g2")) config.eta_g2 = json_numbers(g.at("eta_g2"), "eta_g2");
    if (g.contains("omega_c")) config.omega_c = json_number(g.at("omega_c"), "omega_c");
    if (g.contains("nu")) config.nu = json_number(g.at("nu"), "nu");
    if (g.contains("lamb_shift")) config.lamb_shift = g.at("lamb_shift").get<bool>();
  }
  if (doc.contains("sa")) {
    const auto& g = doc.at("sa");
    check_keys(g, "sa", {"T0", "Tf"});
    if (g.contains("T0")) config.t0_temperature = json_number(g.at("T0"), "T0");
    if (g.contains("Tf")) config.tf_temperature = json_number(g.at("Tf"), "Tf");
  }
  if (doc.contains("numerics")) {
    const auto& g = doc.at("numerics");
    check_keys(g, "numerics", {"dt", "bin_tol", "samples"});
    if (g.contains("dt")) config.dt = json_number(g.at("dt"), "dt");
    if (g.contains("bin_tol")) config.bin_tol = json_number(g.at("bin_tol"), "bin_tol");
    if (g.contains("samples")) config.samples = g.at("samples").get<int>();
  }
  if (doc.contains("output")) {
    const auto& g = doc.at("output");
    check_keys(g, "output", {"csv", "trajectories"});
    if (g.contains("csv")) config.csv_path = g.at("csv").get<std::string>();
    if (g.contains("trajectories")) config.trajectory_dir = g.at("trajectories").get<std::string>();
  }
  if (doc.contains("run")) {
    const auto& g = doc.at("run");
    check_keys(g, "run", {"workers", "seed"});
    if (g.contains("workers")) config.workers = g.at("workers").get<int>();
    if (g.contains("seed")) config.seed = g.at("seed").get<std::uint64_t>();
  }
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  json doc;
  try {
    doc = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("config '" + path + "': " + e.what());
  }
  ExperimentConfig config;
  apply_json(config, doc);
  return config;
}

json to_json(const ExperimentConfig& config) {
  json beta = json::array();
  for (double b : config.beta) beta.push_back(extended_number(b));
  return {
      {"engine", engine_name(config.engine)},
      {"model", {{"n_spins", config.n_spins}, {"p", config.p}, {"gamma", config.gamma}}},
      {"schedule", {{"t_f", config.t_f}}},
      {"bath",
       {{"beta", beta},
        {"eta_g2", config.eta_g2},
        {"omega_c", config.omega_c},
        {"nu", config.nu},
        {"lamb_shift", config.lamb_shift}}},
      {"sa", {{"T0", config.t0_temperature}, {"Tf", config.tf_temperature}}},
      {"numerics", {{"dt", config.dt}, {"bin_tol", config.bin_tol}, {"samples", config.samples}}},
      {"output", {{"csv", config.csv_path}, {"trajectories", config.trajectory_dir}}},
      {"run", {{"workers", config.workers}, {"seed", config.seed}}},
  };
}

std::vector<RunSpec> expand_runs(const ExperimentConfig& config) {
  std::vector<RunSpec> runs;
  auto push = [&](double beta, double eta) {
    for (double t_f : config.t_f) runs.push_back({runs.size(), t_f, beta, eta});
  };
  switch (config.engine) {
    case Engine::closed: push(kNaN, 0.0); break;
    case Engine::sa: {
      const double tf = config.tf_temperature;
      push(tf == 0.0 ? kInf : 1.0 / tf, 0.0);
      break;
    }
    case Engine::lindblad:
      for (double beta : config.beta)
        for (double eta : config.eta_g2) push(beta, eta);
      break;
  }
  return runs;
}

RunOutput execute_run(const ExperimentConfig& config, const RunSpec& spec) {
  RunOutput out;
  AnnealResult& row = out.row;
  row.engine = engine_name(config.engine);
  row.n_spins = config.n_spins;
  row.p = config.p;
  row.gamma = config.gamma;
  row.t_f = spec.t_f;
  row.beta = spec.beta;
  row.eta_g2 = spec.eta_g2;
  row.bin_tol = config.bin_tol;
  row.dt = config.dt;
  row.omega_c = config.engine == Engine::lindblad ? config.omega_c : kNaN;
  row.lamb_shift = config.engine == Engine::lindblad && config.lamb_shift;
  row.t0_temperature = config.engine == Engine::sa ? config.t0_temperature : kNaN;
  row.tf_temperature = config.engine == Engine::sa ? config.tf_temperature : kNaN;
  row.residual_energy = kNaN;
  row.fidelity = kNaN;

  try {
    const ModelParams params{config.p, config.gamma};
    if (config.engine == Engine::sa) {
      const SaSchedule schedule{config.t0_temperature, config.tf_temperature, spec.t_f};
      const SaResult sa = evolve_sa(schedule, config.n_spins, config.p, config.dt, config.samples);
      row.dt = sa.dt;
      row.residual_energy = sa.residual_energy;
      const auto& probs = sa.final_distribution.probs;
      row.fidelity = probs(config.n_spins) + (config.p % 2 == 0 ? probs(0) : 0.0);
      out.times = sa.times;
      out.energy = sa.residual_samples;
    } else {
      const SpinSector sector(config.n_spins);
      const AnnealSchedule schedule{spec.t_f};
      EvolveOptions options;
      options.dt = config.dt;
      options.samples = config.samples;
      options.bin_tol = config.bin_tol;
      Trajectory traj;
      if (config.engine == Engine::closed) {
        traj = evolve_closed(sector, params, schedule, options);
        row.residual_energy = residual_energy(traj.final_psi, sector, params);
      } else {
        const BathSpec bath{spec.eta_g2, 1.0, spec.beta, config.omega_c, config.nu, config.lamb_shift};
        traj = evolve_lindblad(sector, params, schedule, bath, options);
        row.residual_energy = residual_energy(traj.final_rho, sector, params);
      }
      row.dt = traj.dt;
      row.fidelity = pspin_fidelity(traj.final_rho, sector, params);
      out.times = traj.times;
      for (const auto& sample : traj.samples) {
        out.energy.push_back(sample.energy);
        out.fidelity.push_back(sample.fidelity);
      }
    }
    row.status = "ok";
  } catch (const std::exception& e) {
    row.status = "failed:" + sanitize(e.what());
    row.residual_energy = kNaN;
    row.fidelity = kNaN;
  }
  return out;
}

namespace {

void write_trajectory(const std::string& dir, const RunSpec& spec, const RunOutput& run) {
  std::filesystem::create_directories(dir);
  std::ostringstream name;
  name << run.row.engine << '_' << std::setw(5) << std::setfill('0') << spec.index << ".csv";
  std::ofstream out(std::filesystem::path(dir) / name.str());
  if (!out) throw std::runtime_error("cannot write trajectory file in '" + dir + "'");
  out << (run.row.engine == "sa" ? "t,residual_energy\n" : "t,energy,ground_population\n");
  for (std::size_t i = 0; i < run.times.size(); ++i) {
    out << format_double(run.times[i]) << ',' << format_double(run.energy[i]);
    if (i < run.fidelity.size()) out << ',' << format_double(run.fidelity[i]);
    out << '\n';
  }
}

}  // namespace

std::vector<AnnealResult> run_sweep(const ExperimentConfig& config, std::ostream* csv, const ProgressFn& progress) {
  config.validate();
  const std::vector<RunSpec> runs = expand_runs(config);
  std::vector<std::optional<AnnealResult>> done(runs.size());
  std::vector<AnnealResult> rows;
  rows.reserve(runs.size());

  std::mutex mutex;
  std::size_t flushed = 0;
  std::size_t finished = 0;
  std::atomic<std::size_t> next{0};

  if (csv) *csv << csv_header() << '\n' << std::flush;

  auto worker = [&] {
    for (std::size_t i = next++; i < runs.size(); i = next++) {
      RunOutput result = execute_run(config, runs[i]);
      if (!config.trajectory_dir.empty() && result.row.ok()) {
        try {
          write_trajectory(config.trajectory_dir, runs[i], result);
        } catch (const std::exception& e) {
          result.row.status = "failed:" + sanitize(e.what());
        }
      }
      std::lock_guard lock(mutex);
      done[i] = std::move(result.row);
      ++finished;
      if (progress) progress(*done[i], finished, runs.size());
      while (flushed < runs.size() && done[flushed]) {
        if (csv) *csv << format_row(*done[flushed]) << '\n' << std::flush;
        rows.push_back(*done[flushed]);
        ++flushed;
      }
    }
  };

  unsigned count = config.workers > 0 ? static_cast<unsigned>(config.workers) : std::thread::hardware_concurrency();
  count = std::clamp<unsigned>(count, 1u, static_cast<unsigned>(std::max<std::size_t>(1, runs.size())));
  if (count == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < count; ++w) pool.emplace_back(worker);
  }
  return rows;
}

json sweep_metadata(const ExperimentConfig& config, const std::vector<AnnealResult>& rows) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm utc{};
  gmtime_r(&now, &utc);
  std::ostringstream stamp;
  stamp << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ");

  const auto failed = std::count_if(rows.begin(), rows.end(), [](const AnnealResult& r) { return !r.ok(); });
  const bool strong = config.engine == Engine::lindblad &&
                      std::any_of(config.eta_g2.begin(), config.eta_g2.end(), [](double e) { return e >= 0.1; });
  json meta{{"created_utc", stamp.str()},
            {"csv_header", csv_header()},
            {"rows", rows.size()},
            {"failed_rows", failed},
            {"strong_coupling", strong},
            {"config", to_json(config)}};
  if (strong)
    meta["notes"] = json::array({"eta_g2 >= 0.1 is at the edge of the weak-coupling master equation; "
                                 "these rows use the same machinery without extra regularization"});
  return meta;
}

const std::string& csv_header() {
  static const std::string header =
      "engine,n_spins,p,gamma,t_f,beta,eta_g2,omega_c,lamb_shift,T0,Tf,dt,bin_tol,residual_energy,fidelity,status";
  return header;
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

std::string format_row(const AnnealResult& r) {
  std::ostringstream out;
  out << r.engine << ',' << r.n_spins << ',' << r.p << ',' << format_double(r.gamma) << ','
      << format_double(r.t_f) << ',' << format_double(r.beta) << ',' << format_double(r.eta_g2) << ','
      << format_double(r.omega_c) << ',' << (r.lamb_shift ? "on" : "off") << ','
      << format_double(r.t0_temperature) << ',' << format_double(r.tf_temperature) << ','
      << format_double(r.dt) << ',' << format_double(r.bin_tol) << ',' << format_double(r.residual_energy)
      << ',' << format_double(r.fidelity) << ',' << r.status;
  return out.str();
}

void write_csv(std::ostream& out, const std::vector<AnnealResult>& rows) {
  out << csv_header() << '\n';
  for (const auto& row : rows) out << format_row(row) << '\n';
}

std::vector<AnnealResult> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != csv_header()) throw std::runtime_error("csv: header does not match the result schema");

  std::vector<AnnealResult> rows;
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream fields(line);
    for (std::string item; std::getline(fields, item, ',');) f.push_back(item);
    if (f.size() != 16) throw std::runtime_error("csv: line " + std::to_string(number) + " has " +
                                                 std::to_string(f.size()) + " fields, expected 16");
    try {
      AnnealResult r;
      r.engine = f[0];
      r.n_spins = std::stoi(f[1]);
      r.p = std::stoi(f[2]);
      r.gamma = std::stod(f[3]);
      r.t_f = std::stod(f[4]);
      r.beta = std::stod(f[5]);
      r.eta_g2 = std::stod(f[6]);
      r.omega_c = std::stod(f[7]);
      if (f[8] != "on" && f[8] != "off") throw std::invalid_argument("lamb_shift must be on or off");
      r.lamb_shift = f[8] == "on";
      r.t0_temperature = std::stod(f[9]);
      r.tf_temperature = std::stod(f[10]);
      r.dt = std::stod(f[11]);
      r.bin_tol = std::stod(f[12]);
      r.residual_energy = std::stod(f[13]);
      r.fidelity = std::stod(f[14]);
      r.status = f[15];
      rows.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw std::runtime_error("csv: line " + std::to_string(number) + ": " + e.what());
    }
  }
  return rows;
}

std::vector<AnnealResult> read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_csv(in);
}

CrossoverResult crossover(const Curve& qa, const Curve& sa) {
  CrossoverResult result;
  if (qa.points.empty() || sa.points.size() < 1) return result;
  auto sa_at = [&](double t) -> std::optional<double> {
    const auto& pts = sa.points;
    auto it = std::lower_bound(pts.begin(), pts.end(), t, [](const LogLogPoint& a, double v) { return a.t_f < v; });
    if (it != pts.end() && it->t_f == t) return it->value;
    if (it == pts.begin() || it == pts.end()) return std::nullopt;
    result.interpolated = true;
    const auto& a = *(it - 1);
    const auto& b = *it;
    const double x = (std::log(t) - std::log(a.t_f)) / (std::log(b.t_f) - std::log(a.t_f));
    return std::exp(std::log(a.value) + x * (std::log(b.value) - std::log(a.value)));
  };
  for (const auto& point : qa.points) {
    const auto value = sa_at(point.t_f);
    if (value && *value < point.value) {
      result.t_star = point.t_f;
      break;
    }
  }
  return result;
}

Curve lower_envelope(const std::vector<Curve>& curves, const std::string& label) {
  Curve out{label, {}};
  if (curves.empty()) return out;
  for (const auto& point : curves.front().points) {
    double best = point.value;
    bool shared = true;
    for (std::size_t c = 1; c < curves.size() && shared; ++c) {
      const auto& pts = curves[c].points;
      auto it = std::find_if(pts.begin(), pts.end(), [&](const LogLogPoint& q) { return q.t_f == point.t_f; });
      if (it == pts.end()) shared = false;
      else best = std::min(best, it->value);
    }
    if (shared) out.points.push_back({point.t_f, best});
  }
  return out;
}

std::optional<double> asymptotic_slope(const Curve& curve) {
  if (curve.points.empty()) return std::nullopt;
  const double hi = curve.points.back().t_f;
  try {
    return fit_loglog_slope(curve.points, hi / 10.0 * (1.0 - 1e-12), hi).slope;
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

CrossoverReport compare_report(const std::vector<std::vector<AnnealResult>>& tables) {
  struct Group {
    Curve curve;
    const AnnealResult* sample = nullptr;
  };
  std::map<std::string, Group> groups;
  CrossoverReport report;
  std::size_t failed = 0;
  for (const auto& table : tables) {
    for (const auto& row : table) {
      if (!row.ok() || !std::isfinite(row.residual_energy)) {
        ++failed;
        continue;
      }
      std::ostringstream key;
      key << row.engine << " N=" << row.n_spins << " p=" << row.p << " gamma=" << short_number(row.gamma);
      if (row.engine == "lindblad")
        key << " beta=" << short_number(row.beta) << " eta_g2=" << short_number(row.eta_g2)
            << " omega_c=" << short_number(row.omega_c) << " lamb=" << (row.lamb_shift ? "on" : "off");
      if (row.engine == "sa")
        key << " T0=" << short_number(row.t0_temperature) << " Tf=" << short_number(row.tf_temperature);
      auto& group = groups[key.str()];
      group.curve.label = key.str();
      group.sample = &row;
      group.curve.points.push_back({row.t_f, floored_residual(row.residual_energy).first});
    }
  }
  if (failed) report.notes.push_back(std::to_string(failed) + " failed rows were skipped");
  for (auto& [_, group] : groups) {
    auto& pts = group.curve.points;
    std::sort(pts.begin(), pts.end(), [](const LogLogPoint& a, const LogLogPoint& b) { return a.t_f < b.t_f; });
    auto dup = std::adjacent_find(pts.begin(), pts.end(),
                                  [](const LogLogPoint& a, const LogLogPoint& b) { return a.t_f == b.t_f; });
    if (dup != pts.end())
      report.notes.push_back("duplicate t_f = " + short_number(dup->t_f) + " in '" + group.curve.label + "'");
  }

  std::vector<const Group*> qa, sa;
  std::map<std::string, std::vector<const Group*>> open_by_temperature;
  for (const auto& [key, group] : groups) {
    if (group.sample->engine == "sa") {
      sa.push_back(&group);
    } else {
      qa.push_back(&group);
      if (group.sample->engine == "lindblad") {
        const auto* r = group.sample;
        std::ostringstream k;
        k << "lindblad-best N=" << r->n_spins << " p=" << r->p << " gamma=" << short_number(r->gamma)
          << " beta=" << short_number(r->beta) << " omega_c=" << short_number(r->omega_c)
          << " lamb=" << (r->lamb_shift ? "on" : "off");
        open_by_temperature[k.str()].push_back(&group);
      }
    }
  }
  std::vector<Group> envelopes;
  envelopes.reserve(open_by_temperature.size());
  for (const auto& [label, members] : open_by_temperature) {
    if (members.size() < 2) continue;
    std::vector<Curve> curves;
    for (const auto* m : members) curves.push_back(m->curve);
    envelopes.push_back({lower_envelope(curves, label), members.front()->sample});
  }
  for (const auto& e : envelopes) qa.push_back(&e);

  for (const auto* q : qa) {
    for (const auto* s : sa) {
      const auto* a = q->sample;
      const auto* b = s->sample;
      if (a->n_spins != b->n_spins || a->p != b->p || a->gamma != b->gamma) continue;
      CrossoverEntry entry;
      entry.qa_label = q->curve.label;
      entry.sa_label = s->curve.label;
      entry.n_spins = a->n_spins;
      entry.p = a->p;
      entry.result = crossover(q->curve, s->curve);
      entry.qa_slope = asymptotic_slope(q->curve);
      entry.sa_slope = asymptotic_slope(s->curve);
      if (entry.result.interpolated)
        report.notes.push_back("t_f grids differ between '" + entry.qa_label + "' and '" + entry.sa_label +
                               "'; SA was interpolated log-linearly");
      report.entries.push_back(std::move(entry));
    }
  }
  if (report.entries.empty()) report.notes.push_back("no (QA, SA) pair with matching N, p and gamma");
  return report;
}

void print_report(std::ostream& out, const CrossoverReport& report) {
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("nan"); };
  out << "qa,sa,n_spins,p,t_star,interpolated,qa_slope,sa_slope\n";
  for (const auto& e : report.entries) {
    out << e.qa_label << ',' << e.sa_label << ',' << e.n_spins << ',' << e.p << ','
        << (e.result.t_star ? format_double(*e.result.t_star) : std::string("none in range")) << ','
        << (e.result.interpolated ? "yes" : "no") << ',' << opt(e.qa_slope) << ',' << opt(e.sa_slope) << '\n';
  }
}

}  // namespace pspin
