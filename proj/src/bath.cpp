#include "pspin/bath.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace pspin {

void BathSpec::validate() const {
  if (!(eta >= 0.0)) throw std::invalid_argument("BathSpec: eta must be >= 0");
  if (!(g >= 0.0)) throw std::invalid_argument("BathSpec: g must be >= 0");
  if (!(beta > 0.0)) throw std::invalid_argument("BathSpec: beta must be > 0 or inf");
  if (!(omega_c > 0.0) || !std::isfinite(omega_c))
    throw std::invalid_argument("BathSpec: omega_c must be positive");
  if (!(nu >= 1.0)) throw std::invalid_argument("BathSpec: nu must be >= 1");
}

double ohmic_j(double omega, const BathSpec& spec) {
  if (omega < 0.0) throw std::invalid_argument("ohmic_j: omega must be >= 0");
  if (omega == 0.0) return 0.0;
  return spec.eta * std::pow(omega, spec.nu) / std::pow(spec.omega_c, spec.nu - 1.0) *
         std::exp(-omega / spec.omega_c);
}

double gamma_of_omega(double omega, const BathSpec& spec) {
  const double two_pi_g2 = 2.0 * std::numbers::pi * spec.g * spec.g;
  if (spec.zero_temperature()) return omega > 0.0 ? two_pi_g2 * ohmic_j(omega, spec) : 0.0;

  const double w = std::abs(omega);
  if (w == 0.0) {
    // lim J(w) / (1 - exp(-beta w)) = eta / beta for nu = 1, zero above.
    return spec.nu == 1.0 ? two_pi_g2 * spec.eta / spec.beta : 0.0;
  }
  const double x = spec.beta * w;
  const double j = ohmic_j(w, spec);
  // 1/(1 - e^-x) for emission, e^-x/(1 - e^-x) = 1/(e^x - 1) for absorption.
  return omega > 0.0 ? two_pi_g2 * j / -std::expm1(-x) : two_pi_g2 * j / std::expm1(x);
}

double lamb_window(double omega, const BathSpec& spec) {
  double scale = std::max(spec.omega_c, std::abs(omega));
  if (!spec.zero_temperature()) scale = std::max(scale, 1.0 / spec.beta);
  return 20.0 * scale;
}

double lamb_kernel(double omega, const BathSpec& spec) {
  if (spec.eta == 0.0 || spec.g == 0.0) return 0.0;
  const double window = lamb_window(omega, spec);
  const double at_pole = gamma_of_omega(omega, spec);
  auto regular = [&](double w) { return (gamma_of_omega(w, spec) - at_pole) / (omega - w); };

  std::vector<double> breaks{-window, 0.0, omega, window};
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  double integral = 0.0;
  double error = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    double piece_error = 0.0;
    integral += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        regular, breaks[i], breaks[i + 1], 10, 1e-10, &piece_error);
    error += piece_error;
  }
  // PV int_{-W}^{W} dw / (omega - w) = log((W + omega) / (W - omega)).
  integral += at_pole * std::log((window + omega) / (window - omega));

  const double value = integral / (2.0 * std::numbers::pi);
  const double value_error = error / (2.0 * std::numbers::pi);
  if (!(value_error <= 1e-6 * std::max(1.0, std::abs(value))))
    throw QuadratureError("lamb_kernel: principal-value quadrature did not converge at omega = " +
                          std::to_string(omega));
  return value;
}

namespace {

std::vector<double> tabulate(const BathSpec& spec, double omega_max, int points) {
  if (points < 5) throw std::invalid_argument("LambShiftTable: need at least 5 points");
  if (!(omega_max > 0.0)) throw std::invalid_argument("LambShiftTable: omega_max must be > 0");
  std::vector<double> samples(static_cast<std::size_t>(points));
  const double step = 2.0 * omega_max / (points - 1);
  for (int i = 0; i < points; ++i) samples[i] = lamb_kernel(-omega_max + i * step, spec);
  return samples;
}

}  // namespace

LambShiftTable::LambShiftTable(const BathSpec& spec, double omega_max, int points)
    : spec_(spec), omega_max_(omega_max), spline_([&] {
        const auto samples = tabulate(spec, omega_max, points);
        return boost::math::interpolators::cardinal_cubic_b_spline<double>(
            samples.begin(), samples.end(), -omega_max, 2.0 * omega_max / (points - 1));
      }()) {}

double LambShiftTable::operator()(double omega) const {
  if (std::abs(omega) > omega_max_) return lamb_kernel(omega, spec_);
  return spline_(omega);
}

std::shared_ptr<const LambShiftTable> LambShiftTable::shared(const BathSpec& spec, double omega_max,
                                                            int points) {
  using Key = std::tuple<double, double, double, double, double, double, int>;
  static std::mutex mutex;
  static std::map<Key, std::shared_ptr<const LambShiftTable>> cache;
  const Key key{spec.eta, spec.g, spec.beta, spec.omega_c, spec.nu, omega_max, points};
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto table = std::make_shared<const LambShiftTable>(spec, omega_max, points);
  std::lock_guard lock(mutex);
  return cache.emplace(key, std::move(table)).first->second;
}

}  // namespace pspin
