#include "pspin/evolver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <sstream>

namespace pspin {

namespace {

using Complex = std::complex<double>;
constexpr Complex kI{0.0, 1.0};

// L^dag L of one bin accumulated into `target` with weight `weight`.
void accumulate_square(const FrequencyBin& bin, double weight, Eigen::MatrixXd& target) {
  if (weight == 0.0) return;
  for (const auto& x : bin.transitions)
    for (const auto& y : bin.transitions)
      if (x.lower == y.lower) target(x.upper, y.upper) += weight * x.amplitude * y.amplitude;
}

}  // namespace

Eigen::MatrixXd LindbladDecomposition::op(std::size_t index) const {
  const auto n = basis.values.size();
  Eigen::MatrixXd energy_basis = Eigen::MatrixXd::Zero(n, n);
  for (const auto& tr : bins.at(index).transitions) energy_basis(tr.lower, tr.upper) += tr.amplitude;
  return basis.vectors * energy_basis * basis.vectors.transpose();
}

std::size_t LindbladDecomposition::find_bin(double omega, double tolerance) const {
  for (std::size_t i = 0; i < bins.size(); ++i)
    if (std::abs(bins[i].omega - omega) <= tolerance) return i;
  return bins.size();
}

LindbladDecomposition build_decomposition(const SymmetricEigen& h_eig, const SpinSector& sector,
                                          const BathSpec& bath, double bin_tol, LambSource lamb) {
  const Eigen::Index n = h_eig.values.size();
  if (n != sector.dim()) throw std::invalid_argument("build_decomposition: dimension mismatch");

  LindbladDecomposition out;
  out.basis = h_eig;
  const Eigen::MatrixXd& v = h_eig.vectors;
  const Eigen::MatrixXd coupling =
      v.transpose() * sector.coupling_operator().diagonal().asDiagonal() * v;

  struct Pair {
    double omega;
    Transition transition;
  };
  std::vector<Pair> pairs;
  pairs.reserve(static_cast<std::size_t>(n * n));
  for (int lower = 0; lower < n; ++lower)
    for (int upper = 0; upper < n; ++upper)
      pairs.push_back({h_eig.values(upper) - h_eig.values(lower),
                       {lower, upper, coupling(lower, upper)}});
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const Pair& a, const Pair& b) { return a.omega < b.omega; });

  double sum = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (i == 0 || pairs[i].omega - pairs[i - 1].omega > bin_tol) {
      if (!out.bins.empty()) out.bins.back().omega = sum / out.bins.back().transitions.size();
      out.bins.emplace_back();
      sum = 0.0;
    }
    out.bins.back().transitions.push_back(pairs[i].transition);
    sum += pairs[i].omega;
  }
  out.bins.back().omega = sum / out.bins.back().transitions.size();

  const bool with_lamb = bath.lamb_shift_enabled && bath.eta_g2() != 0.0;
  out.decay = Eigen::MatrixXd::Zero(n, n);
  out.lamb_energy_basis = Eigen::MatrixXd::Zero(n, n);
  for (auto& bin : out.bins) {
    bin.rate = gamma_of_omega(bin.omega, bath);
    if (with_lamb) bin.lamb = lamb != nullptr ? (*lamb)(bin.omega) : lamb_kernel(bin.omega, bath);
    accumulate_square(bin, bin.rate, out.decay);
    accumulate_square(bin, bin.lamb, out.lamb_energy_basis);
  }
  return out;
}

namespace {

// Jump part sum_w gamma L rho L^dag in the energy basis.
void add_jumps(const LindbladDecomposition& decomp, const Eigen::MatrixXcd& rho_e,
               Eigen::MatrixXcd& out) {
  for (const auto& bin : decomp.bins) {
    if (bin.rate == 0.0) continue;
    for (const auto& x : bin.transitions) {
      const double wx = bin.rate * x.amplitude;
      if (wx == 0.0) continue;
      for (const auto& y : bin.transitions)
        out(x.lower, y.lower) += wx * y.amplitude * rho_e(x.upper, y.upper);
    }
  }
}

// Dense complex copy of the eigenvectors and the non-Hermitian generator
// G = -i (H + H_LS) - decay / 2, all in the energy basis.
struct StageOperators {
  Eigen::MatrixXcd vectors;
  Eigen::MatrixXcd generator;
};

StageOperators stage_operators(const LindbladDecomposition& decomp, bool with_hamiltonian) {
  const auto n = decomp.basis.values.size();
  StageOperators ops;
  ops.vectors = decomp.basis.vectors.cast<Complex>();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  if (with_hamiltonian) {
    h = decomp.lamb_energy_basis;
    h.diagonal() += decomp.basis.values;
  }
  ops.generator = -kI * h.cast<Complex>() - 0.5 * decomp.decay.cast<Complex>();
  return ops;
}

Eigen::MatrixXcd apply_stage(const LindbladDecomposition& decomp, const StageOperators& ops,
                             const Eigen::MatrixXcd& rho) {
  const Eigen::MatrixXcd rho_e = ops.vectors.transpose() * rho * ops.vectors;
  Eigen::MatrixXcd out_e = ops.generator * rho_e + rho_e * ops.generator.adjoint();
  add_jumps(decomp, rho_e, out_e);
  return ops.vectors * out_e * ops.vectors.transpose();
}

}  // namespace

Eigen::MatrixXcd dissipator_apply(const LindbladDecomposition& decomp, const Eigen::MatrixXcd& rho) {
  return apply_stage(decomp, stage_operators(decomp, false), rho);
}

Eigen::MatrixXd lamb_shift_h(const LindbladDecomposition& decomp) {
  const Eigen::MatrixXd& v = decomp.basis.vectors;
  return v * decomp.lamb_energy_basis * v.transpose();
}

Eigen::MatrixXcd lindblad_rhs(const LindbladDecomposition& decomp, const Eigen::MatrixXcd& rho) {
  return apply_stage(decomp, stage_operators(decomp, true), rho);
}

Eigen::VectorXcd initial_state(const SpinSector& sector) {
  const int n = sector.n_spins();
  Eigen::VectorXcd psi(sector.dim());
  for (int k = 0; k <= n; ++k) {
    const double log_binom = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
    psi(k) = std::exp(0.5 * log_binom - 0.5 * n * std::log(2.0));
  }
  return psi;
}

double default_time_step(double duration) { return std::min(duration / 2000.0, 0.01); }

DensityCheck check_density(const Eigen::MatrixXcd& rho) {
  DensityCheck c;
  c.trace_error = std::abs(rho.trace() - Complex(1.0, 0.0));
  c.hermiticity_error = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  const Eigen::MatrixXcd herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
  c.min_eigenvalue = solver.eigenvalues()(0);
  return c;
}

namespace {

using HamiltonianAt = std::function<Eigen::MatrixXd(double)>;

struct Plan {
  double dt;
  long steps;
  std::vector<long> sample_steps;
};

Plan make_plan(double duration, double requested_dt, double max_dt, int samples) {
  if (!(duration > 0.0)) throw std::invalid_argument("evolve: duration must be > 0");
  if (samples < 1) throw std::invalid_argument("evolve: need at least one sample");
  double dt = requested_dt > 0.0 ? requested_dt : default_time_step(duration);
  if (dt > max_dt * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "evolve: dt = " << dt << " exceeds the allowed step " << max_dt;
    throw std::invalid_argument(msg.str());
  }
  Plan plan;
  plan.steps = std::max<long>(1, static_cast<long>(std::ceil(duration / dt - 1e-9)));
  plan.dt = duration / plan.steps;
  for (int k = 0; k <= samples; ++k) {
    const long step = static_cast<long>((static_cast<long double>(k) * plan.steps) / samples);
    if (plan.sample_steps.empty() || plan.sample_steps.back() != step) plan.sample_steps.push_back(step);
  }
  return plan;
}

// Ground-level population of `rho` in the eigenbasis of `h`.
double ground_population(const SymmetricEigen& eig, const Eigen::MatrixXcd& rho, double tolerance) {
  double pop = 0.0;
  for (Eigen::Index j = 0; j < eig.values.size(); ++j) {
    if (eig.values(j) - eig.values(0) > tolerance) break;
    const Eigen::VectorXd v = eig.vectors.col(j);
    pop += std::real(v.cast<Complex>().dot(rho * v.cast<Complex>()));
  }
  return pop;
}

void record_sample(Trajectory& traj, double t, const Eigen::MatrixXd& h,
                   const Eigen::MatrixXcd& rho, const EvolveOptions& options) {
  const DensityCheck check = check_density(rho);
  const SymmetricEigen eig = eig_sorted(h);
  TrajectorySample s;
  s.t = t;
  s.energy = std::real((rho * h.cast<Complex>()).trace());
  s.fidelity = ground_population(eig, rho, options.bin_tol);
  s.trace = std::real(rho.trace());
  s.min_eigenvalue = check.min_eigenvalue;
  s.hermiticity_error = check.hermiticity_error;
  traj.times.push_back(t);
  traj.samples.push_back(s);
  if (options.keep_states) traj.states.push_back(rho);
  traj.max_trace_error = std::max(traj.max_trace_error, check.trace_error);
  traj.max_hermiticity_error = std::max(traj.max_hermiticity_error, check.hermiticity_error);
  traj.min_eigenvalue = traj.samples.size() == 1 ? check.min_eigenvalue
                                                 : std::min(traj.min_eigenvalue, check.min_eigenvalue);
}

Trajectory run_closed(const SpinSector& sector, const HamiltonianAt& hamiltonian,
                      Eigen::VectorXcd psi, double duration, double max_dt,
                      const EvolveOptions& options) {
  const Plan plan = make_plan(duration, options.dt, max_dt, options.samples);
  Trajectory traj;
  traj.dt = plan.dt;
  traj.steps = plan.steps;
  const double dt = plan.dt;
  const Eigen::Index n = sector.dim();
  if (psi.size() != n) throw std::invalid_argument("evolve_closed: state dimension mismatch");

  std::size_t next_sample = 0;
  auto maybe_sample = [&](long step) {
    if (next_sample < plan.sample_steps.size() && plan.sample_steps[next_sample] == step) {
      const double t = step * dt;
      record_sample(traj, t, hamiltonian(t), psi * psi.adjoint(), options);
      ++next_sample;
    }
  };
  maybe_sample(0);

  for (long step = 0; step < plan.steps; ++step) {
    const double t0 = step * dt;
    const double tm = (step + 0.5) * dt;
    const double t1 = (step + 1) * dt;
    const Eigen::MatrixXcd h0 = hamiltonian(t0).cast<Complex>();
    const Eigen::MatrixXcd hm = hamiltonian(tm).cast<Complex>();
    const Eigen::MatrixXcd h1 = hamiltonian(t1).cast<Complex>();
    // A constant energy shift within the step only changes the global phase
    // and keeps the RK4 amplification factor close to 1.
    const Complex shift = psi.dot(h0 * psi);
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
    const Eigen::MatrixXcd a0 = -kI * (h0 - shift * id);
    const Eigen::MatrixXcd am = -kI * (hm - shift * id);
    const Eigen::MatrixXcd a1 = -kI * (h1 - shift * id);

    const Eigen::VectorXcd k1 = a0 * psi;
    const Eigen::VectorXcd k2 = am * (psi + 0.5 * dt * k1);
    const Eigen::VectorXcd k3 = am * (psi + 0.5 * dt * k2);
    const Eigen::VectorXcd k4 = a1 * (psi + dt * k3);
    psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    const double norm = psi.norm();
    traj.norm_drift += std::abs(norm - 1.0);
    if (traj.norm_drift > 1e-6) {
      std::ostringstream msg;
      msg << "evolve_closed: accumulated norm drift " << traj.norm_drift << " at t = " << t1
          << " with dt = " << dt << "; reduce the time step";
      throw IntegrationError(msg.str());
    }
    psi /= norm;
    maybe_sample(step + 1);
  }
  traj.final_psi = psi;
  traj.final_rho = psi * psi.adjoint();
  return traj;
}

class StageCache {
 public:
  StageCache(const SpinSector& sector, const BathSpec& bath, const HamiltonianAt& hamiltonian,
             double bin_tol, LambSource lamb, bool time_independent)
      : sector_(sector), bath_(bath), hamiltonian_(hamiltonian), bin_tol_(bin_tol), lamb_(lamb),
        time_independent_(time_independent) {}

  struct Entry {
    double t;
    LindbladDecomposition decomp;
    StageOperators ops;
  };

  const Entry& at(double t) {
    if (time_independent_ && !entries_.empty()) return entries_.front();
    for (const auto& e : entries_)
      if (e.t == t) return e;
    LindbladDecomposition d =
        build_decomposition(eig_sorted(hamiltonian_(t)), sector_, bath_, bin_tol_, lamb_);
    StageOperators ops = stage_operators(d, true);
    if (entries_.size() == 2) entries_.erase(entries_.begin());
    entries_.push_back({t, std::move(d), std::move(ops)});
    return entries_.back();
  }

  Eigen::MatrixXcd rhs(double t, const Eigen::MatrixXcd& rho) {
    const Entry& e = at(t);
    return apply_stage(e.decomp, e.ops, rho);
  }

 private:
  const SpinSector& sector_;
  const BathSpec& bath_;
  const HamiltonianAt& hamiltonian_;
  double bin_tol_;
  LambSource lamb_;
  bool time_independent_;
  std::vector<Entry> entries_;
};

Trajectory run_lindblad(const SpinSector& sector, const HamiltonianAt& hamiltonian,
                        const BathSpec& bath, Eigen::MatrixXcd rho, double duration,
                        double max_dt, double spectral_bound, bool time_independent,
                        const EvolveOptions& options) {
  bath.validate();
  const Plan plan = make_plan(duration, options.dt, max_dt, options.samples);
  if (rho.rows() != sector.dim() || rho.cols() != sector.dim())
    throw std::invalid_argument("evolve_lindblad: state dimension mismatch");

  std::shared_ptr<const LambShiftTable> table;
  if (bath.lamb_shift_enabled && bath.eta_g2() != 0.0)
    table = LambShiftTable::shared(bath, 1.05 * spectral_bound + 1.0, options.lamb_table_points);
  StageCache cache(sector, bath, hamiltonian, options.bin_tol, table.get(), time_independent);

  Trajectory traj;
  traj.dt = plan.dt;
  traj.steps = plan.steps;
  const double dt = plan.dt;

  auto abort = [&](const std::string& what, double t) {
    std::ostringstream msg;
    msg << "evolve_lindblad: " << what << " at t = " << t << " with dt = " << dt
        << " and bin_tol = " << options.bin_tol << "; reduce the time step";
    throw IntegrationError(msg.str());
  };

  std::size_t next_sample = 0;
  auto maybe_sample = [&](long step) {
    if (next_sample < plan.sample_steps.size() && plan.sample_steps[next_sample] == step) {
      const double t = step * dt;
      record_sample(traj, t, hamiltonian(t), rho, options);
      if (traj.samples.back().min_eigenvalue < -1e-6)
        abort("positivity violation (min eigenvalue " +
                  std::to_string(traj.samples.back().min_eigenvalue) + ")",
              t);
      ++next_sample;
    }
  };
  maybe_sample(0);

  for (long step = 0; step < plan.steps; ++step) {
    const double t0 = step * dt;
    const double tm = (step + 0.5) * dt;
    const double t1 = (step + 1) * dt;
    const Eigen::MatrixXcd k1 = cache.rhs(t0, rho);
    const Eigen::MatrixXcd k2 = cache.rhs(tm, rho + 0.5 * dt * k1);
    const Eigen::MatrixXcd k3 = cache.rhs(tm, rho + 0.5 * dt * k2);
    const Eigen::MatrixXcd k4 = cache.rhs(t1, rho + dt * k3);
    rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    const double trace_error = std::abs(rho.trace() - Complex(1.0, 0.0));
    if (trace_error > 1e-6) abort("trace drift " + std::to_string(trace_error), t1);
    maybe_sample(step + 1);
  }
  traj.final_rho = rho;
  return traj;
}

double spectral_width(const Eigen::MatrixXd& h) {
  const SymmetricEigen eig = eig_sorted(h);
  return eig.values(eig.values.size() - 1) - eig.values(0);
}

}  // namespace

Trajectory evolve_closed(const SpinSector& sector, const ModelParams& params,
                         const AnnealSchedule& schedule, const EvolveOptions& options) {
  params.validate();
  schedule.validate();
  const HamiltonianAt h = [&](double t) { return h_total(sector, params, schedule.s(t)); };
  return run_closed(sector, h, initial_state(sector), schedule.t_f, schedule.t_f / 100.0, options);
}

Trajectory evolve_closed_frozen(const SpinSector& sector, const Eigen::MatrixXd& h,
                                const Eigen::VectorXcd& psi0, double duration,
                                const EvolveOptions& options) {
  const HamiltonianAt frozen = [&](double) { return h; };
  return run_closed(sector, frozen, psi0, duration, duration / 100.0, options);
}

Trajectory evolve_lindblad(const SpinSector& sector, const ModelParams& params,
                           const AnnealSchedule& schedule, const BathSpec& bath,
                           const EvolveOptions& options) {
  params.validate();
  schedule.validate();
  const HamiltonianAt h = [&](double t) { return h_total(sector, params, schedule.s(t)); };
  const Eigen::VectorXcd psi0 = initial_state(sector);
  // Every H(s) has its spectrum inside [-N max(1, Gamma), N max(1, Gamma)].
  const double bound = 2.0 * sector.n_spins() * std::max(1.0, params.gamma);
  return run_lindblad(sector, h, bath, psi0 * psi0.adjoint(), schedule.t_f,
                      default_time_step(schedule.t_f), bound, false, options);
}

Trajectory evolve_lindblad_frozen(const SpinSector& sector, const Eigen::MatrixXd& h,
                                  const BathSpec& bath, const Eigen::MatrixXcd& rho0,
                                  double duration, const EvolveOptions& options) {
  const HamiltonianAt frozen = [&](double) { return h; };
  return run_lindblad(sector, frozen, bath, rho0, duration, default_time_step(duration),
                      spectral_width(h), true, options);
}

}  // namespace pspin
