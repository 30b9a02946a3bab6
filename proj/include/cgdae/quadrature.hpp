#pragma once

#include <Eigen/Dense>

namespace cgdae {

/// Quadrature rule on the reference interval [0, 1].
struct QuadratureRule {
  Eigen::VectorXd points;
  Eigen::VectorXd weights;
};

/// Gauss-Legendre rule with n points, exact for polynomials up to degree 2n - 1.
QuadratureRule gauss_legendre(int n);

}  // namespace cgdae
