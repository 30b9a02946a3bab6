#pragma once

#include "cgdae/cg_stepper.hpp"
#include "cgdae/dae_model.hpp"

namespace cgdae {

/// Stiffly accurate Runge-Kutta tableau: b equals the last row of A and
/// c_s = 1, so each step ends on the last stage.
struct ButcherTableau {
  int s = 0;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
};

/// Radau IIa collocation tableau with 2 or 3 stages (orders 3 and 5).
ButcherTableau radau_tableau(int stages);

struct RadauStepResult {
  Eigen::VectorXd x_end;
  Eigen::MatrixXd stage_states;       // n x s
  Eigen::MatrixXd stage_multipliers;  // m x s
  NewtonReport newton;
};

/// One implicit step applied directly to the index-2 system: stage states
/// satisfy the constraint at every abscissa and carry stage multipliers;
/// x_end is the last stage. Requires an identity mass matrix.
RadauStepResult radau_step(const SemiExplicitDae& dae, const ButcherTableau& tableau,
                           double t_start, double dt, const Eigen::VectorXd& x_start,
                           const NewtonSettings& settings = {});

struct RadauRun {
  Eigen::VectorXd x_final;
  double newton_iters_mean = 0;
  int newton_iters_max = 0;
  double constraint_max = 0;  // max |g| over all stages of all steps
};

/// Step over [0, t_end] with uniform dt; same step-count contract as
/// integrate().
RadauRun radau_integrate(const SemiExplicitDae& dae, int stages, double dt,
                         const NewtonSettings& settings = {});

}  // namespace cgdae
