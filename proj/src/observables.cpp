#include "pspin/observables.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace pspin {

double residual_energy(const Eigen::VectorXcd& psi, const SpinSector& sector, const ModelParams& params) {
  if (psi.size() != sector.dim()) throw std::invalid_argument("residual_energy: dimension mismatch");
  const Eigen::VectorXd diag = h_pspin(sector, params).diagonal();
  const double energy = (psi.cwiseAbs2().array() * diag.array()).sum() / psi.squaredNorm();
  return (energy - pspin_ground_energy(sector)) / sector.n_spins();
}

double residual_energy(const Eigen::MatrixXcd& rho, const SpinSector& sector, const ModelParams& params) {
  if (rho.rows() != sector.dim() || rho.cols() != sector.dim())
    throw std::invalid_argument("residual_energy: dimension mismatch");
  const Eigen::VectorXd diag = h_pspin(sector, params).diagonal();
  const double energy = (rho.diagonal().real().array() * diag.array()).sum();
  return (energy - pspin_ground_energy(sector)) / sector.n_spins();
}

double pspin_fidelity(const Eigen::MatrixXcd& rho, const SpinSector& sector, const ModelParams& params) {
  if (rho.rows() != sector.dim()) throw std::invalid_argument("pspin_fidelity: dimension mismatch");
  const Eigen::VectorXd diag = h_pspin(sector, params).diagonal();
  const double ground = pspin_ground_energy(sector);
  double pop = 0.0;
  for (Eigen::Index k = 0; k < diag.size(); ++k)
    if (std::abs(diag(k) - ground) < 1e-12) pop += rho(k, k).real();
  return pop;
}

Eigen::VectorXd gibbs_populations(const Eigen::VectorXd& spectrum, double beta) {
  if (spectrum.size() == 0) throw std::invalid_argument("gibbs_populations: empty spectrum");
  if (!(beta >= 0.0)) throw std::invalid_argument("gibbs_populations: beta must be >= 0");
  const double lowest = spectrum.minCoeff();
  Eigen::VectorXd w(spectrum.size());
  if (std::isinf(beta)) {
    for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = spectrum(i) - lowest <= 1e-12 ? 1.0 : 0.0;
  } else {
    for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = std::exp(-beta * (spectrum(i) - lowest));
  }
  return w / w.sum();
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_line: size mismatch");
  const auto n = static_cast<double>(x.size());
  if (x.size() < 3) throw std::invalid_argument("fit_line: need at least 3 points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    rss += r * r;
  }
  fit.stderr_slope = std::sqrt(rss / (n - 2.0) / sxx);
  fit.correlation = syy == 0.0 ? 1.0 : sxy / std::sqrt(sxx * syy);
  return fit;
}

SlopeFit fit_loglog_slope(std::span<const LogLogPoint> points, double window_lo, double window_hi) {
  std::vector<double> x, y;
  for (const auto& pt : points) {
    if (pt.t_f < window_lo || pt.t_f > window_hi) continue;
    if (!(pt.value > 0.0) || !(pt.t_f > 0.0))
      throw std::invalid_argument("fit_loglog_slope: nonpositive value in window");
    x.push_back(std::log(pt.t_f));
    y.push_back(std::log(pt.value));
  }
  if (x.size() < 3) throw std::invalid_argument("fit_loglog_slope: fewer than 3 points in window");
  const LinearFit line = fit_line(x, y);
  return {line.slope, line.intercept, line.stderr_slope, static_cast<int>(x.size())};
}

std::pair<double, bool> floored_residual(double value) {
  if (value < kResidualFloor) return {kResidualFloor, true};
  return {value, false};
}

}  // namespace pspin
