#pragma once

#include <Eigen/Dense>

#include "pspin/bath.hpp"
#include "pspin/evolver.hpp"
#include "pspin/glauber.hpp"
#include "pspin/spin_sector.hpp"

namespace pspin {

/// Quantum relative entropy tr rho (log rho - log sigma) for Hermitian,
/// positive semidefinite arguments; sigma must be full rank.
double relative_entropy(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma);

/// exp(-beta H) / Z in the Dicke basis.
Eigen::MatrixXcd gibbs_state(const Eigen::MatrixXd& h, double beta);

struct GibbsCheck {
  /// Frobenius norm of the master-equation RHS evaluated at the Gibbs state.
  double rhs_norm = 0.0;
  /// Total-variation distance of the final energy populations from Gibbs.
  double tv_distance = 0.0;
  double initial_relative_entropy = 0.0;
  double final_relative_entropy = 0.0;
  /// Largest increase of S(rho(t) || Gibbs) between consecutive samples.
  double max_entropy_increase = 0.0;
  Eigen::VectorXd populations;
  Eigen::VectorXd gibbs;
  Trajectory trajectory;
};

/// Relaxation under H(s) held fixed, starting from the annealing initial state.
GibbsCheck davies_fixed_point(int n_spins, const ModelParams& params, double s, const BathSpec& bath,
                              double duration, const EvolveOptions& options = {});

/// Normalized null vector of the Glauber generator at temperature T.
Eigen::VectorXd rate_matrix_null_vector(int n_spins, int p, double temperature);

struct GlauberCheck {
  double tv_distance = 0.0;
  /// max |P_j R(j -> j') - P_j' R(j' -> j)| over neighbouring sectors, with the
  /// Boltzmann-with-degeneracy P.
  double detailed_balance_error = 0.0;
  /// |R P| for the Boltzmann P.
  double stationary_residual = 0.0;
  Eigen::VectorXd stationary;
  MagnetizationDistribution final_distribution;
};

/// Fixed-T Glauber flow from the all-down state compared with the null
/// vector of the rate matrix.
GlauberCheck glauber_fixed_point(int n_spins, int p, double temperature, double duration, double dt = 0.0);

double total_variation(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

}  // namespace pspin
