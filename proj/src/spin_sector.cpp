#include "pspin/spin_sector.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <utility>

#include <boost/math/tools/minima.hpp>

#include "pspin/symmetric_eigen.hpp"

namespace pspin {

void ModelParams::validate() const {
  if (p < 1) throw std::invalid_argument("ModelParams: p must be >= 1");
  if (!(gamma > 0.0)) throw std::invalid_argument("ModelParams: gamma must be > 0");
}

void AnnealSchedule::validate() const {
  if (!(t_f > 0.0) || !std::isfinite(t_f))
    throw std::invalid_argument("AnnealSchedule: t_f must be positive and finite");
}

double AnnealSchedule::s(double t) const { return std::clamp(t / t_f, 0.0, 1.0); }

SpinSector::SpinSector(int n_spins) : n_spins_(n_spins) {
  if (n_spins < 1) throw std::invalid_argument("SpinSector: n_spins must be >= 1");
  const int d = dim();
  const double total = 0.5 * n_spins;  // S = N/2
  m_values_.resize(d);
  s_z_ = Eigen::MatrixXd::Zero(d, d);
  s_x_ = Eigen::MatrixXd::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    m_values_(k) = static_cast<double>(n_spins - 2 * k) / n_spins;
    s_z_(k, k) = total - k;
  }
  for (int k = 0; k + 1 < d; ++k) {
    // <mz+1| S^+ |mz> with mz the S^z eigenvalue of basis state k+1.
    const double mz = total - (k + 1);
    const double ladder = std::sqrt(total * (total + 1.0) - mz * (mz + 1.0));
    s_x_(k, k + 1) = s_x_(k + 1, k) = 0.5 * ladder;
  }
}

Eigen::MatrixXcd SpinSector::s_y() const {
  const int d = dim();
  Eigen::MatrixXcd sy = Eigen::MatrixXcd::Zero(d, d);
  for (int k = 0; k + 1 < d; ++k) {
    const double ladder = 2.0 * s_x_(k, k + 1);
    sy(k, k + 1) = std::complex<double>(0.0, -0.5 * ladder);
    sy(k + 1, k) = std::complex<double>(0.0, 0.5 * ladder);
  }
  return sy;
}

SpinSector build_sector(int n_spins) { return SpinSector(n_spins); }

Eigen::MatrixXd h_pspin(const SpinSector& sector, const ModelParams& params) {
  params.validate();
  const int n = sector.n_spins();
  Eigen::VectorXd diag(sector.dim());
  for (int k = 0; k < sector.dim(); ++k)
    diag(k) = -n * std::pow(sector.m_values()(k), params.p);
  return diag.asDiagonal();
}

Eigen::MatrixXd h_transverse(const SpinSector& sector, const ModelParams& params) {
  params.validate();
  return -2.0 * params.gamma * sector.s_x();
}

Eigen::MatrixXd h_total(const SpinSector& sector, const ModelParams& params, double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("h_total: s must lie in [0, 1]");
  return (1.0 - s) * h_transverse(sector, params) + s * h_pspin(sector, params);
}

double pspin_ground_energy(const SpinSector& sector) { return -static_cast<double>(sector.n_spins()); }

namespace {

struct Tridiagonal {
  Eigen::VectorXd diag;
  Eigen::VectorXd sub;
};

Tridiagonal total_bands(const SpinSector& sector, const ModelParams& params, double s) {
  const int d = sector.dim();
  const int n = sector.n_spins();
  Tridiagonal t{Eigen::VectorXd(d), Eigen::VectorXd(d - 1)};
  for (int k = 0; k < d; ++k) t.diag(k) = -s * n * std::pow(sector.m_values()(k), params.p);
  for (int k = 0; k + 1 < d; ++k) t.sub(k) = -(1.0 - s) * 2.0 * params.gamma * sector.s_x()(k, k + 1);
  return t;
}

// Restriction of a flip-symmetric tridiagonal matrix to the span of
// (|k> + |N-k>)/sqrt(2) (and |N/2> for even N). The block stays tridiagonal.
Tridiagonal even_block(const Tridiagonal& full) {
  const int n = static_cast<int>(full.diag.size()) - 1;
  const int size = n / 2 + 1;
  using Support = std::vector<std::pair<int, double>>;
  std::vector<Support> basis(static_cast<std::size_t>(size));
  for (int k = 0; k < size; ++k) {
    if (k == n - k)
      basis[k] = {{k, 1.0}};
    else
      basis[k] = {{k, M_SQRT1_2}, {n - k, M_SQRT1_2}};
  }
  auto element = [&](int i, int j) {
    if (i == j) return full.diag(i);
    if (std::abs(i - j) == 1) return full.sub(std::min(i, j));
    return 0.0;
  };
  auto project = [&](int a, int b) {
    double v = 0.0;
    for (auto [i, ci] : basis[a])
      for (auto [j, cj] : basis[b]) v += ci * cj * element(i, j);
    return v;
  };
  Tridiagonal out{Eigen::VectorXd(size), Eigen::VectorXd(size - 1)};
  for (int a = 0; a < size; ++a) out.diag(a) = project(a, a);
  for (int a = 0; a + 1 < size; ++a) out.sub(a) = project(a, a + 1);
  return out;
}

}  // namespace

double spectral_gap(const SpinSector& sector, const ModelParams& params, double s) {
  params.validate();
  if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("spectral_gap: s must lie in [0, 1]");
  Tridiagonal bands = total_bands(sector, params, s);
  if (params.p % 2 == 0 && sector.n_spins() >= 2) bands = even_block(bands);
  if (bands.diag.size() < 2) throw std::invalid_argument("spectral_gap: sector has a single level");
  const Eigen::Vector2d low = lowest_two_tridiagonal(bands.diag, bands.sub);
  return low(1) - low(0);
}

GapResult minimum_gap(const SpinSector& sector, const ModelParams& params,
                      std::span<const double> grid, bool refine) {
  if (grid.empty()) throw std::invalid_argument("minimum_gap: empty grid");
  GapResult best{std::numeric_limits<double>::infinity(), 0.0};
  std::size_t best_index = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double g = spectral_gap(sector, params, grid[i]);
    if (g < best.gap) {
      best = {g, grid[i]};
      best_index = i;
    }
  }
  if (refine && grid.size() >= 3) {
    const double lo = grid[best_index == 0 ? 0 : best_index - 1];
    const double hi = grid[std::min(best_index + 1, grid.size() - 1)];
    if (hi > lo) {
      auto [s_min, g_min] = boost::math::tools::brent_find_minima(
          [&](double s) { return spectral_gap(sector, params, s); }, lo, hi,
          std::numeric_limits<double>::digits / 2);
      if (g_min < best.gap) best = {g_min, s_min};
    }
  }
  return best;
}

std::vector<double> uniform_grid(int points) {
  if (points < 2) throw std::invalid_argument("uniform_grid: need at least 2 points");
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) grid[i] = static_cast<double>(i) / (points - 1);
  return grid;
}

Eigen::MatrixXd full_space_oracle(int n_spins, const ModelParams& params, double s) {
  if (n_spins < 1) throw std::invalid_argument("full_space_oracle: n_spins must be >= 1");
  if (n_spins > 12) throw std::invalid_argument("full_space_oracle: n_spins > 12 refused");
  if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("full_space_oracle: s must lie in [0, 1]");
  params.validate();
  const unsigned dim = 1u << n_spins;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  // Bit i set means spin i points down (sigma^z_i = -1).
  for (unsigned state = 0; state < dim; ++state) {
    const int total_z = n_spins - 2 * std::popcount(state);
    const double m = static_cast<double>(total_z) / n_spins;
    h(state, state) += s * (-n_spins * std::pow(m, params.p));
    for (int i = 0; i < n_spins; ++i) h(state ^ (1u << i), state) += (1.0 - s) * (-params.gamma);
  }
  return h;
}

}  // namespace pspin
