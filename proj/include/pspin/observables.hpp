#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pspin/spin_sector.hpp"

namespace pspin {

/// Excess energy per spin over E_GS = -N, from a state vector.
double residual_energy(const Eigen::VectorXcd& psi, const SpinSector& sector, const ModelParams& params);
/// Excess energy per spin over E_GS = -N, from a density matrix.
double residual_energy(const Eigen::MatrixXcd& rho, const SpinSector& sector, const ModelParams& params);

/// Population of the ground manifold of h_pspin (m = 1, plus m = -1 for even p).
double pspin_fidelity(const Eigen::MatrixXcd& rho, const SpinSector& sector, const ModelParams& params);

/// Boltzmann weights exp(-beta E_i) / Z. beta = +inf puts equal weight on
/// the lowest level and anything degenerate with it (within 1e-12).
Eigen::VectorXd gibbs_populations(const Eigen::VectorXd& spectrum, double beta);

struct LogLogPoint {
  double t_f = 0.0;
  double value = 0.0;
};

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  int points = 0;
};

/// Least-squares slope of log(value) against log(t_f) for points with
/// t_f in [window_lo, window_hi].
SlopeFit fit_loglog_slope(std::span<const LogLogPoint> points, double window_lo, double window_hi);

/// Ordinary least squares y = a + b x with the Pearson correlation.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  double correlation = 0.0;
};
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

/// Floor used when residual energies go on a log axis.
inline constexpr double kResidualFloor = 1e-14;

/// Value clamped to kResidualFloor, plus whether the floor was applied.
std::pair<double, bool> floored_residual(double value);

struct AnnealResult {
  std::string engine;
  int n_spins = 0;
  int p = 0;
  double gamma = 1.0;
  double t_f = 0.0;
  double beta = 0.0;
  double eta_g2 = 0.0;
  double omega_c = 0.0;
  bool lamb_shift = false;
  double t0_temperature = 0.0;
  double tf_temperature = 0.0;
  double dt = 0.0;
  double bin_tol = 0.0;
  double residual_energy = 0.0;
  double fidelity = 0.0;
  std::string status = "ok";

  bool ok() const { return status == "ok"; }
};

}  // namespace pspin
