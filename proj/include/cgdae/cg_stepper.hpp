#pragma once

#include "cgdae/dae_model.hpp"
#include "cgdae/polybasis.hpp"

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace cgdae {

enum class Predictor { Constant, Extrapolate };

struct NewtonSettings {
  double tol_residual = 1e-12;  // max-norm of the raw residual
  int max_iter = 25;
  Predictor predictor = Predictor::Extrapolate;
};

struct NewtonReport {
  int iterations = 0;
  double final_residual_norm = std::numeric_limits<double>::quiet_NaN();
  double first_correction_residual = std::numeric_limits<double>::quiet_NaN();
  bool converged = false;
};

/// A pivot of the factorized Newton matrix fell below 1e-14 times the matrix
/// scale. Typical causes: rank-deficient g_x along the iterates or a step
/// size outside the solvable regime.
struct SingularNewtonMatrix : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NoConvergence : std::runtime_error {
  NewtonReport report;
  NoConvergence(const std::string& msg, NewtonReport rep)
      : std::runtime_error(msg), report(rep) {}
};

/// Solution on one interval [t_start, t_start + dt]: state coefficients
/// x_0..x_r as columns of coeffs (x_j is the state at node t_start +
/// dt * tau_j) and multiplier coefficients lambda_1..lambda_r as columns of
/// multipliers. The multiplier exists only as the functional
/// sum_k lambda_k * delta(t - t_k); it is exposed through dual pairings, not
/// pointwise.
struct IntervalSolution {
  double t_start = 0;
  double dt = 0;
  Eigen::MatrixXd coeffs;
  Eigen::MatrixXd multipliers;
  NewtonReport newton;
};

struct Trajectory {
  CgTableau tableau;
  std::vector<IntervalSolution> intervals;

  int degree() const { return tableau.degree(); }
  double t_end() const {
    return intervals.empty() ? 0.0 : intervals.back().t_start + intervals.back().dt;
  }
};

/// Integration failure; carries the index of the failing interval and the
/// trajectory accumulated so far.
struct IntegrationError : std::runtime_error {
  std::size_t interval_index;
  Trajectory partial;
  IntegrationError(const std::string& msg, std::size_t index, Trajectory traj)
      : std::runtime_error(msg), interval_index(index), partial(std::move(traj)) {}
};

/// Residual of the per-interval nonlinear system. The first r*n entries are
///
///   sum_j J x_j D_ij - dt * sum_j f(x_j, t_j) Mhat_ij + g_x(x_i, t_i)^T lambda_i
///
/// for i = 1..r, the last r*m entries are g(x_k, t_k) for k = 1..r, with
/// node times t_j = t_start + dt * tau_j. state_coeffs stacks x_1..x_r,
/// multipliers stacks lambda_1..lambda_r.
Eigen::VectorXd assemble_residual(const SemiExplicitDae& dae, const CgTableau& tableau,
                                  double t_start, double dt, const Eigen::VectorXd& x_start,
                                  const Eigen::VectorXd& state_coeffs,
                                  const Eigen::VectorXd& multipliers);

/// Newton matrix of the per-interval system,
///
///   [ Dbar (x) J - dt * (Mbarhat (x) I) blkdiag(f_x)   blkdiag(g_x)^T ]
///   [ blkdiag(g_x)                                     0              ]
///
/// with (x) the Kronecker product and blocks evaluated at the iterate.
Eigen::MatrixXd assemble_newton_matrix(const SemiExplicitDae& dae, const CgTableau& tableau,
                                       double t_start, double dt,
                                       const Eigen::VectorXd& state_coeffs);

struct NewtonResult {
  Eigen::VectorXd state_coeffs;
  Eigen::VectorXd multipliers;
  NewtonReport report;
};

/// Solve one interval by Newton's method with dense row-pivoted LU. The
/// predictor evaluates the previous interval's polynomial at the new nodes
/// (first interval: x_j = x_start) and reuses its multipliers (first
/// interval: zero).
NewtonResult newton_solve(const SemiExplicitDae& dae, const CgTableau& tableau, double t_start,
                          double dt, const Eigen::VectorXd& x_start,
                          const NewtonSettings& settings = {},
                          const IntervalSolution* previous = nullptr);

/// Step the DAE over [0, t_end] with uniform step dt (t_end / dt must be an
/// integer up to rounding). Inconsistent initial data only produces a
/// warning. Any interval failure aborts with IntegrationError carrying the
/// partial trajectory.
Trajectory integrate(const SemiExplicitDae& dae, PointFamily family, int r, double dt,
                     const NewtonSettings& settings = {});

/// Evaluate the continuous state approximation at t in [0, t_end]; interval
/// boundaries belong to the left interval, whose last coefficient is shared
/// with the next interval.
Eigen::VectorXd eval_state(const Trajectory& trajectory, double t);

/// Dual pairing of the interval's multiplier with a scalar test function:
/// sum_k lambda_k * v(t_k), componentwise.
Eigen::VectorXd multiplier_action(const Trajectory& trajectory, std::size_t interval_index,
                                  const std::function<double(double)>& v);

/// | integral of lambda_ref over the interval - sum_k lambda_k |_2, the
/// pairing error against the indicator test function; the integral uses
/// 20-point Gauss-Legendre quadrature.
double multiplier_dual_error(const Trajectory& trajectory, std::size_t interval_index,
                             const std::function<Eigen::VectorXd(double)>& lambda_ref);

}  // namespace cgdae
