#pragma once

#include <Eigen/Core>

namespace lowrank {

/// Orthogonal projection onto the subspace of square Hankel matrices:
/// every anti-diagonal is replaced by its mean. Idempotent, self-adjoint,
/// nonexpansive.
Eigen::MatrixXd hankel_project(const Eigen::MatrixXd& A);

/// ||A - hankel_project(A)||_F.
double hankel_distance(const Eigen::MatrixXd& A);

/// Square Hankel matrix H(i,j) = h(i+j) from a generator of odd length 2n-1.
Eigen::MatrixXd hankel_from_generator(const Eigen::VectorXd& h);

/// n x n Hankel with generator (1,...,1,0,...,0) (n ones, n-1 zeros): ones on
/// and above the main anti-diagonal, zeros below.
Eigen::MatrixXd build_triangle_hankel(Eigen::Index n);

}  // namespace lowrank
