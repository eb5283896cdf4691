#pragma once

#include <vector>

#include <Eigen/Dense>

namespace pspin {

/// Probability of each total magnetization. Index j counts up spins, so
/// entry j belongs to m_j = -1 + 2j/N (ascending in m).
struct MagnetizationDistribution {
  Eigen::VectorXd probs;

  int n_spins() const { return static_cast<int>(probs.size()) - 1; }
  double m(int j) const { return -1.0 + 2.0 * j / n_spins(); }
};

/// Temperature protocol. `linear` is T(t) = T0 (1 - t/t_f) + Tf; `constant`
/// holds T0 for the whole run and is used for relaxation checks.
struct SaSchedule {
  enum class Kind { linear, constant };

  double t0_temperature = 2.0;
  double tf_temperature = 0.1;
  double t_f = 1.0;
  Kind kind = Kind::linear;

  void validate() const;
  double temperature(double t) const;
};

/// H_c(m) = -N m^p.
double classical_energy(double m, int n_spins, int p);

/// Heat-bath acceptance 1 / (1 + exp(beta dE)), dE = destination - origin.
double heat_bath_rate(double delta_e, double beta);

/// Generator R of dP/dt = R P at fixed temperature; R(dest, origin) is the
/// total rate of single spin flips between the two magnetization sectors.
/// Columns sum to zero.
Eigen::MatrixXd glauber_rate_matrix(int n_spins, int p, double temperature);

Eigen::VectorXd glauber_rhs(const MagnetizationDistribution& dist, double temperature, int p);

/// binom(N, j) exp(-H_c(m_j) / T) / Z; T = 0 concentrates on the minimum.
MagnetizationDistribution equilibrium_distribution(int n_spins, int p, double temperature);

double sa_residual_energy(const MagnetizationDistribution& dist, int p);

/// sum_m P (H_c + T log(P / binom)), nonincreasing under fixed-T flow.
double free_energy(const MagnetizationDistribution& dist, int p, double temperature);

double default_sa_time_step(double t_f, int n_spins);

struct SaResult {
  MagnetizationDistribution final_distribution;
  double residual_energy = 0.0;
  double dt = 0.0;
  long steps = 0;
  std::vector<double> times;
  std::vector<double> residual_samples;
  /// Largest |sum P - 1| seen at the samples.
  double max_normalization_error = 0.0;
};

/// Glauber annealing from the T0 equilibrium state with fixed-step RK4.
/// dt = 0 selects min(t_f / 2000, 0.1 / N).
SaResult evolve_sa(const SaSchedule& schedule, int n_spins, int p, double dt = 0.0, int samples = 200);

/// Fixed-temperature flow from an arbitrary starting distribution.
SaResult evolve_glauber(const MagnetizationDistribution& start, int p, double temperature,
                        double duration, double dt = 0.0, int samples = 200);

}  // namespace pspin
