#pragma once

#include "cgdae/dae_model.hpp"

namespace cgdae {

/// Linear RLC network reduced to charges (q1, q2) with voltage source
/// current i_V as the multiplier; n = 2, m = 1, horizon [0, 1]. The exact
/// solution is attached as reference.
SemiExplicitDae make_circuit();

/// Closed-form solution (q1, q2, i_V) of the circuit problem.
Eigen::Vector3d circuit_exact(double t);

/// Two quasilinear 1-d heat equations on [0,1] and [1,2], coupled through a
/// thermal-resistance condition at z = 1 and a Dirichlet condition at z = 0.
struct HeatConfig {
  double c1 = 1.0;         // nonlinearity exponent, left subdomain
  double c2 = 1.0;         // nonlinearity exponent, right subdomain
  double h = 1.0 / 40.0;   // spatial grid size, 1/h must be an integer
  double alpha = 10.0;     // heat-transfer coefficient at the interface
};

/// Finite-difference semidiscretization of the coupled heat problem;
/// n = 2 * (1/h + 1) states (82 at defaults), m = 3, horizon [0, 0.5].
/// State layout: first half is the left subdomain z = 0..1, second half the
/// right subdomain z = 1..2.
SemiExplicitDae make_heat(const HeatConfig& config = {});

/// Planar pendulum in first-order form x = (x1, x2, y1, y2) with
/// skew-symmetric mass matrix; the length constraint makes it index 3.
struct PendulumConfig {
  double ell = 1.0;    // pendulum length
  double gamma = 1.0;  // gravitational constant
  Eigen::Vector4d x_init{1.0, 0.0, 0.0, 0.0};
  double t_end = 3.0;
};

SemiExplicitDae make_pendulum(const PendulumConfig& config = {});

/// E(x) = y1^2/2 + y2^2/2 + gamma * x2; conserved along exact solutions.
double pendulum_energy(const Eigen::Vector4d& x, const PendulumConfig& config = {});

}  // namespace cgdae
