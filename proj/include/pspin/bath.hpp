#pragma once

#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

namespace pspin {

/// Ohmic phonon environment coupled to sum_i sigma^z_i. Energies in units
/// of the transverse field, beta may be +infinity.
struct BathSpec {
  double eta = 0.0;
  double g = 1.0;
  double beta = std::numeric_limits<double>::infinity();
  double omega_c = 10.0;
  double nu = 1.0;
  bool lamb_shift_enabled = true;

  double eta_g2() const { return eta * g * g; }
  bool zero_temperature() const { return beta == std::numeric_limits<double>::infinity(); }
  void validate() const;
};

/// Spectral density J(omega) = eta omega^nu / omega_c^(nu-1) exp(-omega/omega_c).
double ohmic_j(double omega, const BathSpec& spec);

/// Rate spectrum gamma(omega): emission for omega > 0, absorption for
/// omega < 0, with gamma(-w) = exp(-beta w) gamma(w).
double gamma_of_omega(double omega, const BathSpec& spec);

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Lamb-shift kernel S(omega) = (1/2pi) PV int gamma(w') / (omega - w') dw'.
///
/// The pole is removed by subtracting gamma(omega) from the integrand and
/// adding back the analytic principal value of 1/(omega - w') on the
/// truncated window. Throws QuadratureError when the estimated error
/// exceeds 1e-6 max(1, |S|).
double lamb_kernel(double omega, const BathSpec& spec);

/// Window half-width used by lamb_kernel.
double lamb_window(double omega, const BathSpec& spec);

/// S(omega) tabulated on a uniform grid over [-omega_max, omega_max] and
/// interpolated with a cubic B-spline. Frequencies outside the table are
/// evaluated directly.
class LambShiftTable {
 public:
  LambShiftTable(const BathSpec& spec, double omega_max, int points = 4001);

  double operator()(double omega) const;
  double omega_max() const { return omega_max_; }

  /// Process-wide memoized table; identical (spec, range, points) requests
  /// share one instance. Thread-safe.
  static std::shared_ptr<const LambShiftTable> shared(const BathSpec& spec, double omega_max,
                                                      int points = 4001);

 private:
  BathSpec spec_;
  double omega_max_;
  boost::math::interpolators::cardinal_cubic_b_spline<double> spline_;
};

}  // namespace pspin
