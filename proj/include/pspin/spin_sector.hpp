#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace pspin {

/// Interaction exponent and transverse-field strength of the p-spin model.
struct ModelParams {
  int p = 5;
  double gamma = 1.0;

  void validate() const;
};

/// Linear annealing schedule s(t) = t / t_f.
struct AnnealSchedule {
  double t_f = 1.0;

  void validate() const;
  double s(double t) const;
};

/// Maximum-spin (S = N/2) Dicke sector of N spins-1/2.
///
/// Basis order is descending magnetization: index k carries
/// m_k = (N - 2k) / N, so k = 0 is the all-up state.
class SpinSector {
 public:
  explicit SpinSector(int n_spins);

  int n_spins() const { return n_spins_; }
  int dim() const { return n_spins_ + 1; }

  /// Normalized magnetizations m_k in [-1, 1].
  const Eigen::VectorXd& m_values() const { return m_values_; }
  const Eigen::MatrixXd& s_x() const { return s_x_; }
  const Eigen::MatrixXd& s_z() const { return s_z_; }

  /// S^y = (S^+ - S^-) / 2i, built from the same ladder elements as s_x.
  Eigen::MatrixXcd s_y() const;

  /// Collective bath coupling A = sum_i sigma^z_i = 2 S^z.
  Eigen::MatrixXd coupling_operator() const { return 2.0 * s_z_; }

 private:
  int n_spins_;
  Eigen::VectorXd m_values_;
  Eigen::MatrixXd s_x_;
  Eigen::MatrixXd s_z_;
};

SpinSector build_sector(int n_spins);

/// Diagonal p-spin Hamiltonian, entries -N m_k^p.
Eigen::MatrixXd h_pspin(const SpinSector& sector, const ModelParams& params);

/// Transverse-field Hamiltonian -Gamma sum_i sigma^x_i = -2 Gamma S^x.
Eigen::MatrixXd h_transverse(const SpinSector& sector, const ModelParams& params);

/// (1 - s) h_transverse + s h_pspin, s in [0, 1].
Eigen::MatrixXd h_total(const SpinSector& sector, const ModelParams& params, double s);

/// Ground-state energy of h_pspin: -N for every p.
double pspin_ground_energy(const SpinSector& sector);

struct GapResult {
  double gap = 0.0;
  double s_star = 0.0;
};

/// Minimum of E_1(s) - E_0(s) over `grid`.
///
/// For even p the Hamiltonian commutes with the global spin flip and the
/// ground state lives in the flip-even block; the odd partner becomes
/// degenerate with it as s -> 1 and is never reached by the dynamics, so the
/// gap is measured inside the even block. For odd p the full sector is used.
/// With `refine` the grid minimum is polished by a bracketed 1-D minimization
/// between its neighbours.
GapResult minimum_gap(const SpinSector& sector, const ModelParams& params,
                      std::span<const double> grid, bool refine = true);

/// Gap E_1 - E_0 at a single s, same sector convention as minimum_gap.
double spectral_gap(const SpinSector& sector, const ModelParams& params, double s);

/// Uniform grid of `points` values on [0, 1].
std::vector<double> uniform_grid(int points);

/// Interpolated Hamiltonian on the full 2^N Hilbert space built from explicit
/// single-spin operators. Validation only; refuses N > 12.
Eigen::MatrixXd full_space_oracle(int n_spins, const ModelParams& params, double s);

}  // namespace pspin
