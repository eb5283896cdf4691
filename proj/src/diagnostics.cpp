#include "pspin/diagnostics.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/SVD>

#include "pspin/observables.hpp"

namespace pspin {

namespace {

using Complex = std::complex<double>;

// Matrix logarithm of a Hermitian matrix. With allow_zero, null eigenvalues
// contribute nothing.
Eigen::MatrixXcd hermitian_log(const Eigen::MatrixXcd& a, bool allow_zero) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(0.5 * (a + a.adjoint()));
  Eigen::VectorXd f(solver.eigenvalues().size());
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const double lambda = solver.eigenvalues()(i);
    if (lambda <= 1e-300) {
      if (!allow_zero) throw std::invalid_argument("relative_entropy: sigma is not full rank");
      f(i) = 0.0;
    } else {
      f(i) = std::log(lambda);
    }
  }
  return solver.eigenvectors() * f.cast<Complex>().asDiagonal() * solver.eigenvectors().adjoint();
}

}  // namespace

double total_variation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) throw std::invalid_argument("total_variation: size mismatch");
  return 0.5 * (a - b).cwiseAbs().sum();
}

double relative_entropy(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma) {
  if (rho.rows() != rho.cols() || sigma.rows() != sigma.cols() || rho.rows() != sigma.rows())
    throw std::invalid_argument("relative_entropy: shape mismatch");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(0.5 * (rho + rho.adjoint()));
  Eigen::VectorXd xlogx(solver.eigenvalues().size());
  for (Eigen::Index i = 0; i < xlogx.size(); ++i) {
    const double lambda = solver.eigenvalues()(i);
    xlogx(i) = lambda > 0.0 ? lambda * std::log(lambda) : 0.0;
  }
  const double cross = std::real((rho * hermitian_log(sigma, false)).trace());
  return xlogx.sum() - cross;
}

Eigen::MatrixXcd gibbs_state(const Eigen::MatrixXd& h, double beta) {
  const SymmetricEigen eig = eig_sorted(h);
  const Eigen::VectorXd w = gibbs_populations(eig.values, beta);
  return (eig.vectors * w.asDiagonal() * eig.vectors.transpose()).cast<Complex>();
}

GibbsCheck davies_fixed_point(int n_spins, const ModelParams& params, double s, const BathSpec& bath,
                              double duration, const EvolveOptions& options) {
  params.validate();
  bath.validate();
  if (bath.zero_temperature()) throw std::invalid_argument("davies_fixed_point: needs finite beta");
  const SpinSector sector(n_spins);
  const Eigen::MatrixXd h = h_total(sector, params, s);
  const SymmetricEigen eig = eig_sorted(h);

  GibbsCheck out;
  out.gibbs = gibbs_populations(eig.values, bath.beta);
  const Eigen::MatrixXcd sigma = gibbs_state(h, bath.beta);
  const LindbladDecomposition decomp = build_decomposition(eig, sector, bath, options.bin_tol);
  out.rhs_norm = lindblad_rhs(decomp, sigma).norm();

  EvolveOptions opts = options;
  opts.keep_states = true;
  const Eigen::VectorXcd psi0 = initial_state(sector);
  out.trajectory = evolve_lindblad_frozen(sector, h, bath, psi0 * psi0.adjoint(), duration, opts);

  const Eigen::MatrixXcd v = eig.vectors.cast<Complex>();
  out.populations = (v.adjoint() * out.trajectory.final_rho * v).diagonal().real();
  out.tv_distance = total_variation(out.populations, out.gibbs);

  double previous = 0.0;
  for (std::size_t i = 0; i < out.trajectory.states.size(); ++i) {
    const double d = relative_entropy(out.trajectory.states[i], sigma);
    if (i == 0) out.initial_relative_entropy = d;
    else out.max_entropy_increase = std::max(out.max_entropy_increase, d - previous);
    previous = d;
  }
  out.final_relative_entropy = previous;
  out.trajectory.states.clear();
  return out;
}

Eigen::VectorXd rate_matrix_null_vector(int n_spins, int p, double temperature) {
  const Eigen::MatrixXd r = glauber_rate_matrix(n_spins, p, temperature);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(r, Eigen::ComputeFullV);
  Eigen::VectorXd v = svd.matrixV().col(r.cols() - 1);
  v /= v.sum();
  return v;
}

GlauberCheck glauber_fixed_point(int n_spins, int p, double temperature, double duration, double dt) {
  GlauberCheck out;
  out.stationary = rate_matrix_null_vector(n_spins, p, temperature);

  const Eigen::MatrixXd r = glauber_rate_matrix(n_spins, p, temperature);
  const Eigen::VectorXd boltzmann = equilibrium_distribution(n_spins, p, temperature).probs;
  out.stationary_residual = (r * boltzmann).norm();
  for (int j = 0; j < n_spins; ++j) {
    const double forward = boltzmann(j) * r(j + 1, j);
    const double backward = boltzmann(j + 1) * r(j, j + 1);
    out.detailed_balance_error = std::max(out.detailed_balance_error, std::abs(forward - backward));
  }

  MagnetizationDistribution start{Eigen::VectorXd::Zero(n_spins + 1)};
  start.probs(0) = 1.0;
  const SaResult run = evolve_glauber(start, p, temperature, duration, dt);
  out.final_distribution = run.final_distribution;
  out.tv_distance = total_variation(run.final_distribution.probs, out.stationary);
  return out;
}

}  // namespace pspin
