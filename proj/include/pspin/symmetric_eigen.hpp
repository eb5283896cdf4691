#pragma once

#include <Eigen/Dense>

namespace pspin {

/// Eigendecomposition of a real symmetric matrix.
///
/// Eigenvalues ascending. Column j of `vectors` is the eigenvector of
/// `values(j)`, gauge-fixed so that its largest-magnitude component is
/// positive (ties go to the lowest index).
struct SymmetricEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

/// Cyclic Jacobi diagonalization. Throws std::invalid_argument on a
/// non-square or non-symmetric input and std::runtime_error if the sweep
/// limit is reached.
SymmetricEigen eig_sorted(const Eigen::MatrixXd& h);

/// Lowest two eigenvalues of a symmetric tridiagonal matrix given by its
/// diagonal and sub-diagonal.
Eigen::Vector2d lowest_two_tridiagonal(const Eigen::VectorXd& diag,
                                       const Eigen::VectorXd& sub);

}  // namespace pspin
