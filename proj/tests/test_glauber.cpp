#include "doctest.h"

#include <cmath>
#include <limits>

#include <Eigen/SVD>

#include "pspin/evolver.hpp"
#include "pspin/glauber.hpp"

using namespace pspin;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Stationary magnetization distribution built from the 2^N microstates: the
// single-spin-flip chain with heat-bath acceptance, lumped by up-count.
Eigen::VectorXd microstate_stationary(int n, int p, double temperature) {
  const int states = 1 << n;
  auto energy = [&](int bits) { return classical_energy((2.0 * __builtin_popcount(bits) - n) / n, n, p); };
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(states, states);
  for (int a = 0; a < states; ++a)
    for (int i = 0; i < n; ++i) {
      const int b = a ^ (1 << i);
      const double r = heat_bath_rate(energy(b) - energy(a), 1.0 / temperature);
      q(b, a) += r;
      q(a, a) -= r;
    }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(q, Eigen::ComputeFullV);
  Eigen::VectorXd v = svd.matrixV().col(states - 1);
  v /= v.sum();
  Eigen::VectorXd lumped = Eigen::VectorXd::Zero(n + 1);
  for (int a = 0; a < states; ++a) lumped(__builtin_popcount(a)) += v(a);
  return lumped;
}

}  // namespace

TEST_CASE("classical energy") {
  CHECK(classical_energy(1.0, 8, 5) == -8.0);
  CHECK(classical_energy(0.0, 8, 5) == 0.0);
  CHECK(classical_energy(0.5, 8, 5) == doctest::Approx(-0.25));
  CHECK(classical_energy(-1.0, 8, 5) == 8.0);
  CHECK_THROWS_AS(classical_energy(1.01, 8, 5), std::invalid_argument);
}

TEST_CASE("heat-bath acceptance") {
  for (double beta : {0.0, 0.3, 5.0, kInf}) CHECK(heat_bath_rate(0.0, beta) == 0.5);
  CHECK(heat_bath_rate(1e3, 10.0) == doctest::Approx(0.0));
  CHECK(heat_bath_rate(-1e3, 10.0) == doctest::Approx(1.0));
  CHECK(heat_bath_rate(-1.0, kInf) == 1.0);
  CHECK(heat_bath_rate(1.0, kInf) == 0.0);
  for (double beta : {0.2, 1.0, 7.0})
    for (double de : {-3.0, -0.1, 0.4, 2.0}) {
      CHECK(heat_bath_rate(de, beta) / heat_bath_rate(-de, beta) == doctest::Approx(std::exp(-beta * de)).epsilon(1e-12));
      CHECK(heat_bath_rate(de, beta) + heat_bath_rate(-de, beta) == doctest::Approx(1.0));
    }
  CHECK(std::isfinite(heat_bath_rate(1e6, 1e3)));
}

TEST_CASE("rate matrix structure") {
  for (double t : {0.0, 0.3, 2.0}) {
    const Eigen::MatrixXd r = glauber_rate_matrix(7, 5, t);
    CHECK(r.colwise().sum().cwiseAbs().maxCoeff() < 1e-12);
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) {
        if (i != j) CHECK(r(i, j) >= 0.0);
        if (std::abs(i - j) > 1) CHECK(r(i, j) == 0.0);
      }
  }
  CHECK_THROWS_AS(glauber_rate_matrix(0, 5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(glauber_rate_matrix(4, 5, -1.0), std::invalid_argument);

  // Boundary sectors only leak inward.
  const Eigen::MatrixXd r = glauber_rate_matrix(4, 3, 1.0);
  CHECK(r(1, 0) == doctest::Approx(-r(0, 0)));
  CHECK(r(3, 4) == doctest::Approx(-r(4, 4)));
}

TEST_CASE("stationarity and detailed balance") {
  for (int n : {2, 5, 8})
    for (int p : {2, 3, 5})
      for (double t : {0.3, 1.0, 4.0}) {
        const auto eq = equilibrium_distribution(n, p, t);
        CHECK(eq.probs.sum() == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(glauber_rhs(eq, t, p).norm() < 1e-10);
        const Eigen::MatrixXd r = glauber_rate_matrix(n, p, t);
        for (int j = 0; j < n; ++j)
          CHECK(std::abs(eq.probs(j) * r(j + 1, j) - eq.probs(j + 1) * r(j, j + 1)) < 1e-10);
      }
}

TEST_CASE("microstate oracle") {
  for (int n : {3, 6, 8})
    for (double t : {0.5, 1.5}) {
      const Eigen::VectorXd oracle = microstate_stationary(n, 5, t);
      const Eigen::VectorXd eq = equilibrium_distribution(n, 5, t).probs;
      CHECK((oracle - eq).cwiseAbs().sum() < 1e-10);
    }
}

TEST_CASE("infinite temperature is binomial") {
  const auto eq = equilibrium_distribution(8, 5, 1e12);
  for (int j = 0; j <= 8; ++j) {
    const double binom = std::tgamma(9.0) / (std::tgamma(j + 1.0) * std::tgamma(9.0 - j));
    CHECK(eq.probs(j) == doctest::Approx(binom / 256.0).epsilon(1e-9));
  }
}

TEST_CASE("zero temperature equilibrium") {
  const auto odd = equilibrium_distribution(6, 5, 0.0);
  CHECK(odd.probs(6) == 1.0);
  const auto even = equilibrium_distribution(6, 2, 0.0);
  CHECK(even.probs(0) == 0.5);
  CHECK(even.probs(6) == 0.5);
}

TEST_CASE("ground state is nearly absorbing at low temperature") {
  MagnetizationDistribution d{Eigen::VectorXd::Zero(9)};
  d.probs(8) = 1.0;
  CHECK(glauber_rhs(d, 0.05, 5).norm() < 1e-50);
  CHECK(sa_residual_energy(d, 5) == 0.0);
  CHECK(d.m(8) == 1.0);
  CHECK(d.m(0) == -1.0);
}

TEST_CASE("schedule") {
  const SaSchedule s{2.0, 0.1, 100.0};
  CHECK(s.temperature(0.0) == doctest::Approx(2.1));
  CHECK(s.temperature(100.0) == doctest::Approx(0.1));
  CHECK(s.temperature(50.0) == doctest::Approx(1.1));
  CHECK_NOTHROW(s.validate());
  CHECK_THROWS_AS((SaSchedule{0.1, 0.1, 1.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((SaSchedule{2.0, -0.1, 1.0}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((SaSchedule{2.0, 0.1, 0.0}.validate()), std::invalid_argument);
  const SaSchedule fixed{0.5, 0.0, 10.0, SaSchedule::Kind::constant};
  CHECK(fixed.temperature(7.0) == 0.5);
  CHECK_NOTHROW(fixed.validate());
}

TEST_CASE("annealing runs") {
  // Sudden limit: the T0 equilibrium survives unchanged.
  const SaSchedule quick{2.0, 0.1, 1e-4};
  const SaResult q = evolve_sa(quick, 8, 5);
  const MagnetizationDistribution start = equilibrium_distribution(8, 5, 2.0);
  CHECK(q.residual_energy == doctest::Approx(sa_residual_energy(start, 5)).epsilon(1e-4));

  double previous = 2.0;
  for (double t_f : {1.0, 10.0, 100.0}) {
    const SaResult r = evolve_sa({2.0, 0.1, t_f}, 8, 5);
    CHECK(r.residual_energy < previous);
    CHECK(r.residual_energy >= -1e-12);
    CHECK(r.max_normalization_error < 1e-10);
    CHECK(r.final_distribution.probs.minCoeff() >= 0.0);
    CHECK(r.dt <= std::min(t_f / 2000, 0.1 / 8) * (1 + 1e-12));
    CHECK(r.times.size() == 201);
    previous = r.residual_energy;
  }

  const SaResult zero = evolve_sa({2.0, 0.0, 5.0}, 6, 3);
  CHECK(std::isfinite(zero.residual_energy));

  CHECK_THROWS_AS(evolve_sa({2.0, 0.1, 10.0}, 8, 5, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(evolve_sa({2.0, 0.1, 10.0}, 0, 5), std::invalid_argument);
  CHECK_THROWS_AS(evolve_sa({2.0, 0.1, 10.0}, 8, 5, 0.0, 0), std::invalid_argument);
}

TEST_CASE("fixed temperature relaxation lowers the free energy") {
  MagnetizationDistribution d{Eigen::VectorXd::Zero(9)};
  d.probs(0) = 1.0;
  const double t = 0.7;
  double previous = free_energy(d, 5, t);
  for (int k = 0; k < 20; ++k) {
    d = evolve_glauber(d, 5, t, 10.0).final_distribution;
    const double f = free_energy(d, 5, t);
    CHECK(f <= previous + 1e-12);
    previous = f;
  }
  CHECK(previous == doctest::Approx(free_energy(equilibrium_distribution(8, 5, t), 5, t)).epsilon(1e-6));
}
