#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>

#include "pspin/evolver.hpp"
#include "pspin/observables.hpp"

using namespace pspin;
using Complex = std::complex<double>;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::MatrixXcd random_density(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXcd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = Complex(normal(rng), normal(rng));
  Eigen::MatrixXcd rho = a * a.adjoint();
  return rho / rho.trace();
}

LindbladDecomposition decompose(int n, int p, double s, const BathSpec& bath) {
  const SpinSector sector(n);
  return build_decomposition(eig_sorted(h_total(sector, {p, 1.0}, s)), sector, bath, 1e-9);
}

}  // namespace

TEST_CASE("initial state") {
  const auto psi1 = initial_state(SpinSector(1));
  CHECK(psi1(0).real() == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(psi1(1).real() == doctest::Approx(1 / std::sqrt(2.0)));
  const auto psi2 = initial_state(SpinSector(2));
  CHECK(psi2(0).real() == doctest::Approx(0.5));
  CHECK(psi2(1).real() == doctest::Approx(std::sqrt(2.0) / 2));
  CHECK(psi2(2).real() == doctest::Approx(0.5));

  for (int n : {1, 4, 8, 30}) {
    const SpinSector sector(n);
    const Eigen::VectorXcd psi = initial_state(sector);
    CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-13));
    const auto e = eig_sorted(h_transverse(sector, {3, 1.0}));
    CHECK(e.values(0) == doctest::Approx(-n));
    const double overlap = std::norm(e.vectors.col(0).cast<Complex>().dot(psi));
    CHECK(overlap > 1 - 1e-12);
  }
}

TEST_CASE("Bohr frequencies of the transverse field") {
  const auto d = decompose(2, 3, 0.0, BathSpec{});
  REQUIRE(d.bins.size() == 5);
  const double expected[] = {-4, -2, 0, 2, 4};
  for (int i = 0; i < 5; ++i) CHECK(d.bins[i].omega == doctest::Approx(expected[i]).epsilon(1e-12));
}

TEST_CASE("decomposition completeness and conjugation") {
  const BathSpec bath{1e-2, 1.0, 3.0, 10.0, 1.0, false};
  for (int p : {2, 3, 5})
    for (double s : {0.0, 0.3, 0.62, 1.0}) {
      const int n = 5;
      const auto d = decompose(n, p, s, bath);
      const SpinSector sector(n);
      Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n + 1, n + 1);
      for (std::size_t i = 0; i < d.bins.size(); ++i) sum += d.op(i);
      CHECK((sum - sector.coupling_operator()).cwiseAbs().maxCoeff() < 1e-10);

      for (std::size_t i = 0; i < d.bins.size(); ++i) {
        const std::size_t j = d.find_bin(-d.bins[i].omega, 1e-9);
        REQUIRE(j < d.bins.size());
        CHECK((d.op(j) - d.op(i).transpose()).cwiseAbs().maxCoeff() < 1e-10);
        if (i > 0) CHECK(d.bins[i].omega - d.bins[i - 1].omega > 1e-9);
      }
    }
}

TEST_CASE("degenerate endpoint for even p") {
  const SpinSector sector(6);
  const auto d = decompose(6, 2, 1.0, BathSpec{});
  const std::size_t zero = d.find_bin(0.0, 1e-9);
  REQUIRE(zero < d.bins.size());
  // A is diagonal in the degenerate Dicke basis, so all its weight is at w = 0.
  CHECK((d.op(zero) - sector.coupling_operator()).cwiseAbs().maxCoeff() < 1e-12);
  bool pair_present = false;
  for (const auto& t : d.bins[zero].transitions)
    if (t.lower != t.upper) pair_present = true;
  CHECK(pair_present);
}

TEST_CASE("dissipator structure") {
  std::mt19937_64 rng(11);
  const BathSpec bath{1e-2, 1.0, 2.0, 10.0, 1.0, true};
  for (double s : {0.1, 0.5, 0.9}) {
    const auto d = decompose(4, 5, s, bath);
    for (int trial = 0; trial < 3; ++trial) {
      const Eigen::MatrixXcd rho = random_density(5, rng);
      const Eigen::MatrixXcd out = dissipator_apply(d, rho);
      CHECK(std::abs(out.trace()) < 1e-12);
      CHECK((out - out.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
      const Eigen::MatrixXcd full = lindblad_rhs(d, rho);
      CHECK(std::abs(full.trace()) < 1e-12);
      CHECK((full - full.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    }
  }

  const auto free = decompose(4, 5, 0.5, BathSpec{0.0, 1.0, 2.0, 10.0, 1.0, true});
  const Eigen::MatrixXcd rho = random_density(5, rng);
  CHECK(dissipator_apply(free, rho).cwiseAbs().maxCoeff() == 0.0);
  CHECK(lamb_shift_h(free).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Gibbs state is stationary") {
  for (double beta : {0.5, 2.0, 10.0})
    for (double s : {0.2, 0.5, 0.8}) {
      const SpinSector sector(4);
      const auto eig = eig_sorted(h_total(sector, {5, 1.0}, s));
      const BathSpec bath{1e-2, 1.0, beta, 10.0, 1.0, true};
      const auto d = build_decomposition(eig, sector, bath, 1e-9);
      const Eigen::VectorXd w = gibbs_populations(eig.values, beta);
      const Eigen::MatrixXcd gibbs = (eig.vectors * w.asDiagonal() * eig.vectors.transpose()).cast<Complex>();
      CHECK(lindblad_rhs(d, gibbs).norm() < 1e-8);
    }
}

TEST_CASE("zero temperature fixed point is the ground projector") {
  const SpinSector sector(6);
  const auto eig = eig_sorted(h_total(sector, {5, 1.0}, 0.7));
  const auto d = build_decomposition(eig, sector, BathSpec{1e-2, 1.0, kInf, 10.0, 1.0, true}, 1e-9);
  const Eigen::VectorXcd g = eig.vectors.col(0).cast<Complex>();
  CHECK(lindblad_rhs(d, g * g.adjoint()).norm() < 1e-10);
}

TEST_CASE("Lamb-shift Hamiltonian") {
  const SpinSector sector(2);
  const auto eig = eig_sorted(h_total(sector, {3, 1.0}, 0.4));
  const BathSpec on{1e-2, 1.0, 2.0, 10.0, 1.0, true};
  const auto d = build_decomposition(eig, sector, on, 1e-9);
  const Eigen::MatrixXd hls = lamb_shift_h(d);
  CHECK((hls - hls.transpose()).cwiseAbs().maxCoeff() < 1e-14);
  const Eigen::MatrixXd in_energy = eig.vectors.transpose() * hls * eig.vectors;
  CHECK((in_energy - Eigen::MatrixXd(in_energy.diagonal().asDiagonal())).cwiseAbs().maxCoeff() < 1e-8);
  const Eigen::MatrixXd h = h_total(sector, {3, 1.0}, 0.4);
  CHECK((h * hls - hls * h).norm() < 1e-8);
  CHECK(hls.cwiseAbs().maxCoeff() > 0.0);

  BathSpec off = on;
  off.lamb_shift_enabled = false;
  CHECK(lamb_shift_h(build_decomposition(eig, sector, off, 1e-9)).cwiseAbs().maxCoeff() == 0.0);

  // Table-backed decomposition agrees with direct quadrature.
  const LambShiftTable table(on, 10.0, 2001);
  const auto dt = build_decomposition(eig, sector, on, 1e-9, &table);
  CHECK((lamb_shift_h(dt) - hls).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("closed evolution: sudden limit and sampling") {
  const SpinSector sector(8);
  const ModelParams params{5, 1.0};
  const Trajectory t = evolve_closed(sector, params, {1e-3});
  CHECK(residual_energy(t.final_psi, sector, params) == doctest::Approx(1.0).epsilon(1e-5));
  REQUIRE(t.times.size() == 201);
  CHECK(t.times.front() == 0.0);
  CHECK(t.times.back() == doctest::Approx(1e-3).epsilon(1e-12));
  for (std::size_t i = 1; i < t.times.size(); ++i) CHECK(t.times[i] > t.times[i - 1]);
  CHECK(residual_energy(initial_state(sector), sector, params) == doctest::Approx(1.0).epsilon(1e-14));

  const Trajectory slow = evolve_closed(sector, params, {30.0});
  CHECK(slow.final_psi.norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(slow.norm_drift < 1e-8);
  CHECK(slow.dt <= 0.01);
}

TEST_CASE("closed evolution rejects coarse steps") {
  const SpinSector sector(4);
  EvolveOptions o;
  o.dt = 0.2;
  CHECK_THROWS_AS(evolve_closed(sector, {3, 1.0}, {10.0}, o), std::invalid_argument);
  o.dt = 0.0;
  o.samples = 0;
  CHECK_THROWS_AS(evolve_closed(sector, {3, 1.0}, {10.0}, o), std::invalid_argument);
}

TEST_CASE("frozen Hamiltonian keeps eigenstate moduli") {
  const SpinSector sector(6);
  const Eigen::MatrixXd h = h_total(sector, {3, 1.0}, 0.4);
  const auto e = eig_sorted(h);
  const Eigen::VectorXcd psi0 = e.vectors.col(2).cast<Complex>();
  const Trajectory t = evolve_closed_frozen(sector, h, psi0, 5.0);
  CHECK((t.final_psi.cwiseAbs() - psi0.cwiseAbs()).cwiseAbs().maxCoeff() < 1e-9);
  // The integrator drops the global phase, so the overlap is real.
  const Complex overlap = psi0.dot(t.final_psi);
  CHECK(std::abs(overlap) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("uncoupled master equation reproduces unitary evolution") {
  const SpinSector sector(8);
  const ModelParams params{5, 1.0};
  const AnnealSchedule schedule{10.0};
  const Trajectory closed = evolve_closed(sector, params, schedule);
  const Trajectory open = evolve_lindblad(sector, params, schedule, BathSpec{0.0, 1.0, 10.0, 10.0, 1.0, true});
  CHECK(std::abs(residual_energy(closed.final_psi, sector, params) -
                 residual_energy(open.final_rho, sector, params)) < 1e-6);
  const Eigen::MatrixXcd diff = closed.final_rho - open.final_rho;
  CHECK(diff.jacobiSvd().singularValues()(0) < 1e-6);
}

TEST_CASE("open evolution invariants and sudden limit") {
  const SpinSector sector(6);
  const ModelParams params{5, 1.0};
  const BathSpec bath{1e-2, 1.0, 10.0, 10.0, 1.0, true};
  const Trajectory t = evolve_lindblad(sector, params, {15.0}, bath);
  CHECK(t.max_trace_error < 1e-8);
  CHECK(t.max_hermiticity_error < 1e-10);
  CHECK(t.min_eigenvalue > -1e-7);
  REQUIRE(t.samples.size() == 201);
  for (const auto& s : t.samples) {
    CHECK(s.fidelity >= -1e-9);
    CHECK(s.fidelity <= 1 + 1e-9);
  }

  const Trajectory sudden = evolve_lindblad(sector, params, {1e-3}, bath);
  CHECK(residual_energy(sudden.final_rho, sector, params) == doctest::Approx(1.0).epsilon(1e-4));

  EvolveOptions coarse;
  coarse.dt = 0.02;
  CHECK_THROWS_AS(evolve_lindblad(sector, params, {15.0}, bath, coarse), std::invalid_argument);
}

TEST_CASE("density checks") {
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(2, 2);
  rho(0, 0) = 1.1;
  rho(1, 1) = -0.1;
  rho(0, 1) = Complex(0, 1e-3);
  const DensityCheck c = check_density(rho);
  CHECK(c.trace_error == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(c.hermiticity_error == doctest::Approx(1e-3));
  CHECK(c.min_eigenvalue == doctest::Approx(-0.1));
  CHECK(default_time_step(10.0) == doctest::Approx(0.005));
  CHECK(default_time_step(1000.0) == 0.01);
}
