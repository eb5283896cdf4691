#include "pspin/glauber.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "pspin/evolver.hpp"

namespace pspin {

namespace {

double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double inverse_temperature(double temperature) {
  if (temperature < 0.0) throw std::invalid_argument("temperature must be >= 0");
  return temperature == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / temperature;
}

}  // namespace

void SaSchedule::validate() const {
  if (!(t_f > 0.0)) throw std::invalid_argument("SaSchedule: t_f must be > 0");
  if (kind == Kind::constant) {
    if (!(t0_temperature >= 0.0)) throw std::invalid_argument("SaSchedule: temperature must be >= 0");
    return;
  }
  if (!(tf_temperature >= 0.0)) throw std::invalid_argument("SaSchedule: Tf must be >= 0");
  if (!(t0_temperature > tf_temperature)) throw std::invalid_argument("SaSchedule: need T0 > Tf");
}

double SaSchedule::temperature(double t) const {
  if (kind == Kind::constant) return t0_temperature;
  const double x = std::clamp(t / t_f, 0.0, 1.0);
  return t0_temperature * (1.0 - x) + tf_temperature;
}

double classical_energy(double m, int n_spins, int p) {
  if (std::abs(m) > 1.0 + 1e-12) throw std::invalid_argument("classical_energy: |m| > 1");
  return -n_spins * std::pow(m, p);
}

double heat_bath_rate(double delta_e, double beta) {
  if (std::isinf(beta)) return delta_e < 0.0 ? 1.0 : (delta_e == 0.0 ? 0.5 : 0.0);
  const double x = beta * delta_e;
  if (x > 0.0) {
    const double e = std::exp(-x);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(x));
}

Eigen::MatrixXd glauber_rate_matrix(int n_spins, int p, double temperature) {
  if (n_spins < 1) throw std::invalid_argument("glauber_rate_matrix: n_spins must be >= 1");
  const double beta = inverse_temperature(temperature);
  const int d = n_spins + 1;
  auto energy = [&](int j) { return classical_energy(-1.0 + 2.0 * j / n_spins, n_spins, p); };
  Eigen::MatrixXd rates = Eigen::MatrixXd::Zero(d, d);
  for (int j = 0; j < d; ++j) {
    // Flip one of the N - j down spins up, or one of the j up spins down.
    if (j < n_spins) {
      const double r = (n_spins - j) * heat_bath_rate(energy(j + 1) - energy(j), beta);
      rates(j + 1, j) += r;
      rates(j, j) -= r;
    }
    if (j > 0) {
      const double r = j * heat_bath_rate(energy(j - 1) - energy(j), beta);
      rates(j - 1, j) += r;
      rates(j, j) -= r;
    }
  }
  return rates;
}

Eigen::VectorXd glauber_rhs(const MagnetizationDistribution& dist, double temperature, int p) {
  return glauber_rate_matrix(dist.n_spins(), p, temperature) * dist.probs;
}

MagnetizationDistribution equilibrium_distribution(int n_spins, int p, double temperature) {
  if (n_spins < 1) throw std::invalid_argument("equilibrium_distribution: n_spins must be >= 1");
  const int d = n_spins + 1;
  Eigen::VectorXd log_w(d);
  for (int j = 0; j < d; ++j) {
    const double e = classical_energy(-1.0 + 2.0 * j / n_spins, n_spins, p);
    log_w(j) = temperature == 0.0 ? -e : log_binomial(n_spins, j) - e / temperature;
  }
  Eigen::VectorXd w(d);
  if (temperature == 0.0) {
    const double top = log_w.maxCoeff();
    for (int j = 0; j < d; ++j) w(j) = log_w(j) >= top - 1e-12 ? 1.0 : 0.0;
  } else {
    w = (log_w.array() - log_w.maxCoeff()).exp();
  }
  return {w / w.sum()};
}

double sa_residual_energy(const MagnetizationDistribution& dist, int p) {
  const int n = dist.n_spins();
  double energy = 0.0;
  for (int j = 0; j <= n; ++j) energy += classical_energy(dist.m(j), n, p) * dist.probs(j);
  return (energy + n) / n;
}

double free_energy(const MagnetizationDistribution& dist, int p, double temperature) {
  const int n = dist.n_spins();
  double f = 0.0;
  for (int j = 0; j <= n; ++j) {
    const double pj = dist.probs(j);
    f += pj * classical_energy(dist.m(j), n, p);
    if (pj > 0.0) f += temperature * pj * (std::log(pj) - log_binomial(n, j));
  }
  return f;
}

double default_sa_time_step(double t_f, int n_spins) { return std::min(t_f / 2000.0, 0.1 / n_spins); }

namespace {

SaResult integrate(MagnetizationDistribution dist, int p, double duration, double dt,
                   double max_dt, int samples, const std::function<double(double)>& temperature) {
  if (!(duration > 0.0)) throw std::invalid_argument("evolve_sa: duration must be > 0");
  if (samples < 1) throw std::invalid_argument("evolve_sa: need at least one sample");
  if (dt <= 0.0) dt = max_dt;
  if (dt > max_dt * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "evolve_sa: dt = " << dt << " exceeds the allowed step " << max_dt;
    throw std::invalid_argument(msg.str());
  }
  const int n = dist.n_spins();
  SaResult out;
  out.steps = std::max<long>(1, static_cast<long>(std::ceil(duration / dt - 1e-9)));
  out.dt = duration / out.steps;
  const double h = out.dt;

  // Rate matrices at the three RK4 stage times of a step; the end-of-step
  // matrix is reused as the next start.
  Eigen::MatrixXd r0 = glauber_rate_matrix(n, p, temperature(0.0));
  std::vector<long> sample_steps;
  for (int k = 0; k <= samples; ++k) {
    const long step = static_cast<long>((static_cast<long double>(k) * out.steps) / samples);
    if (sample_steps.empty() || sample_steps.back() != step) sample_steps.push_back(step);
  }
  std::size_t next_sample = 0;
  auto sample = [&](long step) {
    if (next_sample >= sample_steps.size() || sample_steps[next_sample] != step) return;
    out.times.push_back(step * h);
    out.residual_samples.push_back(sa_residual_energy(dist, p));
    out.max_normalization_error = std::max(out.max_normalization_error, std::abs(dist.probs.sum() - 1.0));
    ++next_sample;
  };
  sample(0);

  Eigen::VectorXd& prob = dist.probs;
  for (long step = 0; step < out.steps; ++step) {
    const Eigen::MatrixXd rm = glauber_rate_matrix(n, p, temperature((step + 0.5) * h));
    const Eigen::MatrixXd r1 = glauber_rate_matrix(n, p, temperature((step + 1) * h));
    const Eigen::VectorXd k1 = r0 * prob;
    const Eigen::VectorXd k2 = rm * (prob + 0.5 * h * k1);
    const Eigen::VectorXd k3 = rm * (prob + 0.5 * h * k2);
    const Eigen::VectorXd k4 = r1 * (prob + h * k3);
    prob += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    for (Eigen::Index j = 0; j < prob.size(); ++j) {
      if (prob(j) < -1e-9) {
        std::ostringstream msg;
        msg << "evolve_sa: negative probability " << prob(j) << " at t = " << (step + 1) * h
            << " with dt = " << h << "; reduce the time step";
        throw IntegrationError(msg.str());
      }
      if (prob(j) < 0.0 && prob(j) >= -1e-12) prob(j) = 0.0;
    }
    r0 = r1;
    sample(step + 1);
  }
  out.residual_energy = sa_residual_energy(dist, p);
  out.final_distribution = std::move(dist);
  return out;
}

}  // namespace

SaResult evolve_sa(const SaSchedule& schedule, int n_spins, int p, double dt, int samples) {
  schedule.validate();
  if (n_spins < 1) throw std::invalid_argument("evolve_sa: n_spins must be >= 1");
  const auto start = equilibrium_distribution(n_spins, p, schedule.t0_temperature);
  return integrate(start, p, schedule.t_f, dt, default_sa_time_step(schedule.t_f, n_spins), samples,
                   [&](double t) { return schedule.temperature(t); });
}

SaResult evolve_glauber(const MagnetizationDistribution& start, int p, double temperature,
                        double duration, double dt, int samples) {
  return integrate(start, p, duration, dt, default_sa_time_step(duration, start.n_spins()), samples,
                   [temperature](double) { return temperature; });
}

}  // namespace pspin
