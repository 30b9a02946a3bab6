#include "cgdae/benchmarks.hpp"

#include <cmath>

namespace cgdae {

namespace {

// Coefficients of the particular solution q2_p = a cos(100 t) + b sin(100 t)
// of q2' = -q2/2 + 50 cos(100 t), from matching the cos and sin terms.
struct CircuitCoefficients {
  double a, b;
};

CircuitCoefficients circuit_coefficients() {
  Eigen::Matrix2d system;
  system << 0.5, 100.0,  //
      -100.0, 0.5;
  const Eigen::Vector2d rhs(50.0, 0.0);
  const Eigen::Vector2d solution = system.fullPivLu().solve(rhs);
  return {solution[0], solution[1]};
}

// u^c for the heat nonlinearity. Integer exponents are evaluated exactly
// (sign-preserving); fractional exponents reject negative bases instead of
// silently returning NaN.
double heat_power(double u, double c) {
  if (c == std::floor(c)) {
    double result = 1.0;
    for (int k = 0; k < static_cast<int>(c); ++k) result *= u;
    return result;
  }
  if (u < 0.0) throw EvaluationError("heat: negative state with fractional exponent");
  return std::pow(u, c);
}

Eigen::VectorXd elementwise_power(const Eigen::VectorXd& u, double c) {
  Eigen::VectorXd out(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) out[i] = heat_power(u[i], c);
  return out;
}

// Stiffness matrix with natural boundary conditions: corners 1, interior
// diagonal 2, off-diagonals -1, all scaled by 1/h^2.
Eigen::MatrixXd neumann_stiffness(int points, double h) {
  Eigen::MatrixXd stiffness = Eigen::MatrixXd::Zero(points, points);
  for (int i = 0; i < points; ++i) {
    stiffness(i, i) = (i == 0 || i == points - 1) ? 1.0 : 2.0;
    if (i > 0) stiffness(i, i - 1) = -1.0;
    if (i + 1 < points) stiffness(i, i + 1) = -1.0;
  }
  return stiffness / (h * h);
}

}  // namespace

Eigen::Vector3d circuit_exact(double t) {
  static const CircuitCoefficients coeff = circuit_coefficients();
  const double decay = std::exp(-0.5 * t);
  const double q2 = coeff.a * (std::cos(100.0 * t) - decay) + coeff.b * std::sin(100.0 * t);
  const double q2_dot =
      coeff.a * (-100.0 * std::sin(100.0 * t) + 0.5 * decay) + 100.0 * coeff.b * std::cos(100.0 * t);
  const double q1 = std::sin(100.0 * t) - q2;
  const double i_v = -q2_dot - q2 - std::sin(100.0 * t);
  return {q1, q2, i_v};
}

SemiExplicitDae make_circuit() {
  SemiExplicitDae dae;
  dae.name = "circuit";
  dae.n = 2;
  dae.m = 1;
  dae.t_end = 1.0;
  dae.x0 = Eigen::Vector2d::Zero();
  dae.f_linear = true;
  dae.g_linear = true;

  dae.f = [](const Eigen::VectorXd& x, double t) {
    Eigen::VectorXd out(2);
    out << -std::sin(100.0 * t), -x[1] - std::sin(100.0 * t);
    return out;
  };
  dae.f_x = [](const Eigen::VectorXd&, double) {
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(2, 2);
    jac(1, 1) = -1.0;
    return jac;
  };
  dae.g = [](const Eigen::VectorXd& x, double t) {
    Eigen::VectorXd out(1);
    out << x[0] + x[1] - std::sin(100.0 * t);
    return out;
  };
  dae.g_x = [](const Eigen::VectorXd&, double) {
    Eigen::MatrixXd jac(1, 2);
    jac << 1.0, 1.0;
    return jac;
  };
  dae.x_ref = [](double t) { return Eigen::VectorXd(circuit_exact(t).head(2)); };
  dae.lambda_ref = [](double t) { return Eigen::VectorXd(circuit_exact(t).tail(1)); };
  return dae;
}

SemiExplicitDae make_heat(const HeatConfig& config) {
  const double inv_h = 1.0 / config.h;
  const int cells = static_cast<int>(std::llround(inv_h));
  if (std::abs(inv_h - cells) > 1e-9 || cells < 2)
    throw std::invalid_argument("make_heat: 1/h must be an integer");
  if (config.c1 < 1.0 || config.c2 < 1.0)
    throw std::invalid_argument("make_heat: exponents must be at least 1");

  const int points = cells + 1;  // nodes per subdomain
  const int n = 2 * points;
  const double h = config.h;
  const double alpha = config.alpha;
  const double c1 = config.c1;
  const double c2 = config.c2;
  const Eigen::MatrixXd stiffness = neumann_stiffness(points, h);

  SemiExplicitDae dae;
  dae.name = "heat";
  dae.n = n;
  dae.m = 3;
  dae.t_end = 0.5;
  dae.f_linear = c1 == 1.0 && c2 == 1.0;
  dae.g_linear = dae.f_linear;

  dae.x0 = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < points; ++i) dae.x0[i] = std::max(0.0, 1.0 - 4.0 * (i * h));

  dae.f = [stiffness, points, c1, c2](const Eigen::VectorXd& x, double) {
    Eigen::VectorXd out(x.size());
    out.head(points) = -stiffness * elementwise_power(x.head(points), c1);
    out.tail(points) = -stiffness * elementwise_power(x.tail(points), c2);
    return out;
  };
  dae.f_x = [stiffness, points, c1, c2](const Eigen::VectorXd& x, double) {
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(x.size(), x.size());
    jac.topLeftCorner(points, points) =
        -stiffness * (c1 * elementwise_power(x.head(points), c1 - 1.0)).asDiagonal();
    jac.bottomRightCorner(points, points) =
        -stiffness * (c2 * elementwise_power(x.tail(points), c2 - 1.0)).asDiagonal();
    return jac;
  };

  // Index of the interface node on either side of z = 1.
  const int left_end = points - 1;
  const int right_begin = points;
  dae.g = [left_end, right_begin, h, alpha, c1, c2](const Eigen::VectorXd& x, double) {
    Eigen::VectorXd out(3);
    out[0] = x[0] - 1.0;
    out[1] = (heat_power(x[left_end], c1) - heat_power(x[left_end - 1], c1)) / h +
             alpha * (x[left_end] - x[right_begin]);
    out[2] = (heat_power(x[right_begin], c2) - heat_power(x[right_begin + 1], c2)) / h +
             alpha * (x[right_begin] - x[left_end]);
    return out;
  };
  dae.g_x = [left_end, right_begin, h, alpha, c1, c2](const Eigen::VectorXd& x, double) {
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(3, x.size());
    jac(0, 0) = 1.0;
    jac(1, left_end) = c1 * heat_power(x[left_end], c1 - 1.0) / h + alpha;
    jac(1, left_end - 1) = -c1 * heat_power(x[left_end - 1], c1 - 1.0) / h;
    jac(1, right_begin) = -alpha;
    jac(2, right_begin) = c2 * heat_power(x[right_begin], c2 - 1.0) / h + alpha;
    jac(2, right_begin + 1) = -c2 * heat_power(x[right_begin + 1], c2 - 1.0) / h;
    jac(2, left_end) = -alpha;
    return jac;
  };
  return dae;
}

SemiExplicitDae make_pendulum(const PendulumConfig& config) {
  const double ell = config.ell;
  const double gamma = config.gamma;
  const Eigen::Vector4d& init = config.x_init;
  if (std::abs(init[0] * init[0] + init[1] * init[1] - ell * ell) > 1e-12)
    throw std::invalid_argument("make_pendulum: initial position violates the length constraint");
  if (std::abs(init[0] * init[2] + init[1] * init[3]) > 1e-12)
    throw std::invalid_argument("make_pendulum: initial velocity violates the hidden constraint");

  SemiExplicitDae dae;
  dae.name = "pendulum";
  dae.n = 4;
  dae.m = 1;
  dae.t_end = config.t_end;
  dae.x0 = init;
  dae.f_linear = true;  // f = -grad E is affine in x
  dae.g_linear = false;

  dae.J = Eigen::MatrixXd::Zero(4, 4);
  dae.J(0, 2) = dae.J(1, 3) = 1.0;
  dae.J(2, 0) = dae.J(3, 1) = -1.0;

  dae.f = [gamma](const Eigen::VectorXd& x, double) {
    Eigen::VectorXd out(4);
    out << 0.0, -gamma, -x[2], -x[3];
    return out;
  };
  dae.f_x = [](const Eigen::VectorXd&, double) {
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(4, 4);
    jac(2, 2) = jac(3, 3) = -1.0;
    return jac;
  };
  dae.g = [ell](const Eigen::VectorXd& x, double) {
    Eigen::VectorXd out(1);
    out << x[0] * x[0] + x[1] * x[1] - ell * ell;
    return out;
  };
  dae.g_x = [](const Eigen::VectorXd& x, double) {
    Eigen::MatrixXd jac(1, 4);
    jac << 2.0 * x[0], 2.0 * x[1], 0.0, 0.0;
    return jac;
  };
  return dae;
}

double pendulum_energy(const Eigen::Vector4d& x, const PendulumConfig& config) {
  return 0.5 * x[2] * x[2] + 0.5 * x[3] * x[3] + config.gamma * x[1];
}

}  // namespace cgdae
