#include "doctest.h"

#include <random>

#include <Eigen/Eigenvalues>

#include "pspin/spin_sector.hpp"
#include "pspin/symmetric_eigen.hpp"

using namespace pspin;

namespace {

Eigen::MatrixXd random_symmetric(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = normal(rng);
  return a;
}

void check_decomposition(const Eigen::MatrixXd& h, const SymmetricEigen& e) {
  const auto n = h.rows();
  const Eigen::MatrixXd rebuilt = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
  CHECK((rebuilt - h).norm() < 1e-10 * std::max(1.0, h.norm()));
  CHECK((e.vectors.transpose() * e.vectors - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
  for (Eigen::Index i = 1; i < n; ++i) CHECK(e.values(i) >= e.values(i - 1));
}

}  // namespace

TEST_CASE("diagonal input is a permutation") {
  Eigen::MatrixXd h = Eigen::Vector3d(3, 1, 2).asDiagonal();
  const auto e = eig_sorted(h);
  CHECK(e.values == Eigen::Vector3d(1, 2, 3));
  CHECK(e.vectors.col(0) == Eigen::Vector3d(0, 1, 0));
  CHECK(e.vectors.col(1) == Eigen::Vector3d(0, 0, 1));
  CHECK(e.vectors.col(2) == Eigen::Vector3d(1, 0, 0));
}

TEST_CASE("p-spin endpoint spectrum is the sorted diagonal") {
  const SpinSector s(7);
  const Eigen::MatrixXd h = h_total(s, {5, 1.0}, 1.0);
  Eigen::VectorXd diag = h.diagonal();
  std::sort(diag.data(), diag.data() + diag.size());
  CHECK((eig_sorted(h).values - diag).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("rejects malformed input") {
  CHECK_THROWS_AS(eig_sorted(Eigen::MatrixXd::Zero(2, 3)), std::invalid_argument);
  Eigen::Matrix2d a;
  a << 1, 2, 3, 4;
  CHECK_THROWS_AS(eig_sorted(a), std::invalid_argument);
  CHECK_THROWS_AS(lowest_two_tridiagonal(Eigen::VectorXd::Ones(1), Eigen::VectorXd()), std::invalid_argument);
  CHECK_THROWS_AS(lowest_two_tridiagonal(Eigen::VectorXd::Ones(3), Eigen::VectorXd::Ones(3)), std::invalid_argument);
}

TEST_CASE("gauge: largest component positive, ties to the lowest index") {
  Eigen::Matrix2d h;
  h << 0, 1, 1, 0;
  const auto e = eig_sorted(h);
  // (1, -1)/sqrt2 for -1 and (1, 1)/sqrt2 for +1: the tie resolves to index 0.
  CHECK(e.vectors(0, 0) > 0.0);
  CHECK(e.vectors(1, 0) < 0.0);
  CHECK(e.vectors(0, 1) > 0.0);
  CHECK(e.vectors(1, 1) > 0.0);

  std::mt19937_64 rng(7);
  const auto r = eig_sorted(random_symmetric(6, rng));
  for (int j = 0; j < 6; ++j) {
    Eigen::Index arg = 0;
    r.vectors.col(j).cwiseAbs().maxCoeff(&arg);
    CHECK(r.vectors(arg, j) > 0.0);
  }
}

TEST_CASE("random symmetric matrices reconstruct and match a reference solver") {
  std::mt19937_64 rng(12345);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + trial % 12;
    const Eigen::MatrixXd h = random_symmetric(n, rng) * (trial % 3 == 0 ? 1e3 : 1.0);
    const auto e = eig_sorted(h);
    check_decomposition(h, e);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(h, Eigen::EigenvaluesOnly);
    CHECK((e.values - ref.eigenvalues()).cwiseAbs().maxCoeff() < 1e-10 * std::max(1.0, h.norm()));
  }
}

TEST_CASE("degenerate spectrum") {
  const Eigen::MatrixXd h = h_total(SpinSector(6), {2, 1.0}, 1.0);
  const auto e = eig_sorted(h);
  check_decomposition(h, e);
  CHECK(e.values(0) == -6.0);
  CHECK(e.values(1) == -6.0);
}

TEST_CASE("annealing Hamiltonians reconstruct along the schedule") {
  for (int n : {2, 8, 20})
    for (double x : {0.0, 0.25, 0.45, 0.8, 1.0}) check_decomposition(h_total(SpinSector(n), {5, 1.0}, x), eig_sorted(h_total(SpinSector(n), {5, 1.0}, x)));
}

TEST_CASE("tridiagonal lowest pair") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  for (int n : {2, 5, 30}) {
    Eigen::VectorXd d(n), sub(n - 1);
    for (int i = 0; i < n; ++i) d(i) = normal(rng);
    for (int i = 0; i + 1 < n; ++i) sub(i) = normal(rng);
    Eigen::MatrixXd full = d.asDiagonal();
    for (int i = 0; i + 1 < n; ++i) full(i, i + 1) = full(i + 1, i) = sub(i);
    const auto e = eig_sorted(full);
    const Eigen::Vector2d low = lowest_two_tridiagonal(d, sub);
    CHECK(low(0) == doctest::Approx(e.values(0)).epsilon(1e-12));
    CHECK(low(1) == doctest::Approx(e.values(1)).epsilon(1e-12));
  }
}
