#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "pspin/bath.hpp"
#include "pspin/spin_sector.hpp"
#include "pspin/symmetric_eigen.hpp"

namespace pspin {

/// Aborted integration (norm/trace drift, positivity loss). The message
/// carries the step-size diagnostic.
class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One term |lower><lower| A |upper><upper| of a Lindblad operator, i.e. a
/// jump from energy level `upper` to level `lower` (indices into the
/// instantaneous eigenbasis).
struct Transition {
  int lower = 0;
  int upper = 0;
  double amplitude = 0.0;
};

/// All transitions sharing one Bohr frequency. `omega` is the energy
/// released by the jump, eps_upper - eps_lower, so omega > 0 bins are
/// de-excitations and are paired with the emission branch of gamma.
struct FrequencyBin {
  double omega = 0.0;
  double rate = 0.0;
  double lamb = 0.0;
  std::vector<Transition> transitions;
};

/// Lindblad operators of the collective coupling A = 2 S^z in the
/// instantaneous eigenbasis of a frozen Hamiltonian.
struct LindbladDecomposition {
  SymmetricEigen basis;
  std::vector<FrequencyBin> bins;
  /// sum_w gamma(w) L_w^dag L_w in the energy basis.
  Eigen::MatrixXd decay;
  /// sum_w S(w) L_w^dag L_w in the energy basis.
  Eigen::MatrixXd lamb_energy_basis;

  /// Dense L_w of bin `index` in the Dicke basis.
  Eigen::MatrixXd op(std::size_t index) const;
  std::size_t find_bin(double omega, double tolerance) const;
};

/// Source of S(omega) while building decompositions. Null means the kernel
/// is evaluated directly by quadrature.
using LambSource = const LambShiftTable*;

LindbladDecomposition build_decomposition(const SymmetricEigen& h_eig, const SpinSector& sector,
                                          const BathSpec& bath, double bin_tol,
                                          LambSource lamb = nullptr);

/// sum_w gamma(w) [L rho L^dag - 1/2 {L^dag L, rho}] in the Dicke basis.
Eigen::MatrixXcd dissipator_apply(const LindbladDecomposition& decomp, const Eigen::MatrixXcd& rho);

/// H_LS = sum_w S(w) L_w^dag L_w in the Dicke basis.
Eigen::MatrixXd lamb_shift_h(const LindbladDecomposition& decomp);

/// Full right-hand side -i[H + H_LS, rho] + D[rho] for the Hamiltonian the
/// decomposition was built from.
Eigen::MatrixXcd lindblad_rhs(const LindbladDecomposition& decomp, const Eigen::MatrixXcd& rho);

/// Uniform superposition of all spins along +x, expressed in the Dicke basis.
Eigen::VectorXcd initial_state(const SpinSector& sector);

struct EvolveOptions {
  /// Requested step; 0 selects min(t_f / 2000, 0.01).
  double dt = 0.0;
  int samples = 200;
  double bin_tol = 1e-9;
  bool keep_states = false;
  int lamb_table_points = 4001;
};

double default_time_step(double duration);

struct TrajectorySample {
  double t = 0.0;
  double energy = 0.0;
  /// Population of the instantaneous ground level (degenerate levels within
  /// bin_tol are summed).
  double fidelity = 0.0;
  double trace = 1.0;
  double min_eigenvalue = 0.0;
  double hermiticity_error = 0.0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<TrajectorySample> samples;
  /// Density matrices at the sample times when keep_states is set.
  std::vector<Eigen::MatrixXcd> states;
  Eigen::MatrixXcd final_rho;
  /// Closed runs only.
  Eigen::VectorXcd final_psi;
  double dt = 0.0;
  long steps = 0;
  /// Closed runs: accumulated |norm - 1| removed by renormalization.
  double norm_drift = 0.0;
  double max_trace_error = 0.0;
  double min_eigenvalue = 0.0;
  double max_hermiticity_error = 0.0;
};

/// Unitary annealing with fixed-step RK4 on the state vector.
Trajectory evolve_closed(const SpinSector& sector, const ModelParams& params,
                         const AnnealSchedule& schedule, const EvolveOptions& options = {});

/// Unitary evolution under a time-independent Hamiltonian.
Trajectory evolve_closed_frozen(const SpinSector& sector, const Eigen::MatrixXd& h,
                                const Eigen::VectorXcd& psi0, double duration,
                                const EvolveOptions& options = {});

/// Adiabatic-master-equation annealing with fixed-step RK4 on rho; the
/// eigenbasis and Lindblad operators are rebuilt at every stage time.
Trajectory evolve_lindblad(const SpinSector& sector, const ModelParams& params,
                           const AnnealSchedule& schedule, const BathSpec& bath,
                           const EvolveOptions& options = {});

/// Master-equation relaxation under a time-independent Hamiltonian.
Trajectory evolve_lindblad_frozen(const SpinSector& sector, const Eigen::MatrixXd& h,
                                  const BathSpec& bath, const Eigen::MatrixXcd& rho0,
                                  double duration, const EvolveOptions& options = {});

struct DensityCheck {
  double trace_error = 0.0;
  double hermiticity_error = 0.0;
  double min_eigenvalue = 0.0;
};

DensityCheck check_density(const Eigen::MatrixXcd& rho);

}  // namespace pspin
