#include "pspin/symmetric_eigen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace pspin {

namespace {

constexpr double kOffDiagonalTolerance = 1e-13;
constexpr int kMaxSweeps = 100;

double off_diagonal_norm(const Eigen::MatrixXd& a) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (i != j) sum += a(i, j) * a(i, j);
  return std::sqrt(sum);
}

void fix_gauge(Eigen::Ref<Eigen::VectorXd> v) {
  const double largest = v.cwiseAbs().maxCoeff();
  const double tie = 1e-10 * largest;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) >= largest - tie) {
      if (v(i) < 0.0) v = -v;
      return;
    }
  }
}

}  // namespace

SymmetricEigen eig_sorted(const Eigen::MatrixXd& h) {
  if (h.rows() != h.cols()) throw std::invalid_argument("eig_sorted: matrix is not square");
  const Eigen::Index n = h.rows();
  const double scale = std::max(1.0, h.norm());
  if ((h - h.transpose()).norm() > 1e-12 * scale)
    throw std::invalid_argument("eig_sorted: matrix is not symmetric");

  Eigen::MatrixXd a = 0.5 * (h + h.transpose());
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);

  const double tol = kOffDiagonalTolerance * scale;
  int sweep = 0;
  for (; sweep < kMaxSweeps; ++sweep) {
    if (off_diagonal_norm(a) <= tol) break;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = a(q, p) = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = a(p, k) = c * akp - s * akq;
          a(k, q) = a(q, k) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (sweep == kMaxSweeps && off_diagonal_norm(a) > tol)
    throw std::runtime_error("eig_sorted: Jacobi sweeps did not converge");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return a(x, x) < a(y, y); });

  SymmetricEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto src = order[static_cast<std::size_t>(j)];
    out.values(j) = a(src, src);
    out.vectors.col(j) = v.col(src);
    fix_gauge(out.vectors.col(j));
  }
  return out;
}

Eigen::Vector2d lowest_two_tridiagonal(const Eigen::VectorXd& diag,
                                       const Eigen::VectorXd& sub) {
  if (diag.size() < 2 || sub.size() != diag.size() - 1)
    throw std::invalid_argument("lowest_two_tridiagonal: bad band sizes");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("lowest_two_tridiagonal: QL iteration failed");
  return {solver.eigenvalues()(0), solver.eigenvalues()(1)};
}

}  // namespace pspin
