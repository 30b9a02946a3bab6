#include "cgdae/cg_stepper.hpp"

#include "cgdae/quadrature.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace cgdae {

namespace {

constexpr double kPivotTol = 1e-14;

double node_time(const CgTableau& tableau, double t_start, double dt, int j) {
  return t_start + dt * tableau.grid.nodes[j];
}

// Gather x_0..x_r as columns; column 0 is the fixed interval start value.
Eigen::MatrixXd gather_coefficients(int n, int r, const Eigen::VectorXd& x_start,
                                    const Eigen::VectorXd& state_coeffs) {
  Eigen::MatrixXd coeffs(n, r + 1);
  coeffs.col(0) = x_start;
  for (int j = 1; j <= r; ++j) coeffs.col(j) = state_coeffs.segment((j - 1) * n, n);
  return coeffs;
}

}  // namespace

Eigen::VectorXd assemble_residual(const SemiExplicitDae& dae, const CgTableau& tableau,
                                  double t_start, double dt, const Eigen::VectorXd& x_start,
                                  const Eigen::VectorXd& state_coeffs,
                                  const Eigen::VectorXd& multipliers) {
  const int r = tableau.degree();
  const int n = dae.n;
  const int m = dae.m;
  if (x_start.size() != n || state_coeffs.size() != r * n || multipliers.size() != r * m)
    throw std::invalid_argument("assemble_residual: dimension mismatch");

  const Eigen::MatrixXd coeffs = gather_coefficients(n, r, x_start, state_coeffs);
  const bool has_mass = dae.J.size() != 0;

  Eigen::MatrixXd f_vals(n, r + 1);
  Eigen::MatrixXd mass_coeffs(n, r + 1);
  for (int j = 0; j <= r; ++j) {
    const double tj = node_time(tableau, t_start, dt, j);
    f_vals.col(j) = dae.f(coeffs.col(j), tj);
    if (!f_vals.col(j).allFinite())
      throw EvaluationError("assemble_residual: f returned a non-finite value");
    mass_coeffs.col(j) = has_mass ? Eigen::VectorXd(dae.J * coeffs.col(j)) : coeffs.col(j);
  }

  Eigen::VectorXd residual(r * (n + m));
  for (int i = 1; i <= r; ++i) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(n);
    for (int j = 0; j <= r; ++j)
      row += tableau.D(i - 1, j) * mass_coeffs.col(j) - dt * tableau.Mhat(i - 1, j) * f_vals.col(j);
    if (m > 0) {
      const double ti = node_time(tableau, t_start, dt, i);
      row.noalias() += dae.g_x(coeffs.col(i), ti).transpose() * multipliers.segment((i - 1) * m, m);
    }
    residual.segment((i - 1) * n, n) = row;
  }
  for (int k = 1; k <= r; ++k) {
    const double tk = node_time(tableau, t_start, dt, k);
    const Eigen::VectorXd gk = m > 0 ? dae.g(coeffs.col(k), tk) : Eigen::VectorXd();
    if (m > 0 && !gk.allFinite())
      throw EvaluationError("assemble_residual: g returned a non-finite value");
    residual.segment(r * n + (k - 1) * m, m) = gk;
  }
  return residual;
}

Eigen::MatrixXd assemble_newton_matrix(const SemiExplicitDae& dae, const CgTableau& tableau,
                                       double t_start, double dt,
                                       const Eigen::VectorXd& state_coeffs) {
  const int r = tableau.degree();
  const int n = dae.n;
  const int m = dae.m;
  if (state_coeffs.size() != r * n)
    throw std::invalid_argument("assemble_newton_matrix: dimension mismatch");

  const bool has_mass = dae.J.size() != 0;
  const int dim = r * (n + m);
  Eigen::MatrixXd newton = Eigen::MatrixXd::Zero(dim, dim);

  for (int j = 1; j <= r; ++j) {
    const double tj = node_time(tableau, t_start, dt, j);
    const Eigen::VectorXd xj = state_coeffs.segment((j - 1) * n, n);
    const Eigen::MatrixXd fx = jacobian_f(dae, xj, tj);
    if (!fx.allFinite())
      throw EvaluationError("assemble_newton_matrix: f_x returned a non-finite value");
    for (int i = 1; i <= r; ++i) {
      auto block = newton.block((i - 1) * n, (j - 1) * n, n, n);
      block = -dt * tableau.Mbarhat(i - 1, j - 1) * fx;
      if (has_mass)
        block += tableau.Dbar(i - 1, j - 1) * dae.J;
      else
        block.diagonal().array() += tableau.Dbar(i - 1, j - 1);
    }
    if (m > 0) {
      const Eigen::MatrixXd gx = dae.g_x(xj, tj);
      newton.block((j - 1) * n, r * n + (j - 1) * m, n, m) = gx.transpose();
      newton.block(r * n + (j - 1) * m, (j - 1) * n, m, n) = gx;
    }
  }
  return newton;
}

NewtonResult newton_solve(const SemiExplicitDae& dae, const CgTableau& tableau, double t_start,
                          double dt, const Eigen::VectorXd& x_start, const NewtonSettings& settings,
                          const IntervalSolution* previous) {
  const int r = tableau.degree();
  const int n = dae.n;
  const int m = dae.m;
  if (!(dt > 0)) throw std::invalid_argument("newton_solve: step size must be positive");
  if (!x_start.allFinite()) throw std::invalid_argument("newton_solve: non-finite start value");
  if (settings.max_iter < 1 || !(settings.tol_residual > 0))
    throw std::invalid_argument("newton_solve: invalid settings");

  NewtonResult result;
  result.state_coeffs.resize(r * n);
  result.multipliers = Eigen::VectorXd::Zero(r * m);
  if (previous != nullptr && settings.predictor == Predictor::Extrapolate) {
    for (int j = 1; j <= r; ++j) {
      const double tj = node_time(tableau, t_start, dt, j);
      const double tau_prev = (tj - previous->t_start) / previous->dt;
      result.state_coeffs.segment((j - 1) * n, n) =
          previous->coeffs * state_basis_values(tableau.grid, tau_prev);
    }
    for (int k = 1; k <= r; ++k)
      result.multipliers.segment((k - 1) * m, m) = previous->multipliers.col(k - 1);
  } else {
    for (int j = 1; j <= r; ++j) result.state_coeffs.segment((j - 1) * n, n) = x_start;
  }

  Eigen::VectorXd residual =
      assemble_residual(dae, tableau, t_start, dt, x_start, result.state_coeffs, result.multipliers);
  NewtonReport& report = result.report;
  while (true) {
    const double norm = residual.lpNorm<Eigen::Infinity>();
    report.final_residual_norm = norm;
    if (std::isfinite(norm) && norm <= settings.tol_residual) {
      report.converged = true;
      return result;
    }
    if (!std::isfinite(norm))
      throw NoConvergence("newton_solve: residual became non-finite", report);
    if (report.iterations >= settings.max_iter)
      throw NoConvergence("newton_solve: no convergence within max_iter", report);

    const Eigen::MatrixXd newton =
        assemble_newton_matrix(dae, tableau, t_start, dt, result.state_coeffs);
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(newton);
    const double min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (min_pivot < kPivotTol * newton.cwiseAbs().maxCoeff())
      throw SingularNewtonMatrix(
          "newton_solve: near-singular Newton matrix (rank-deficient g_x or dt too large?)");

    const Eigen::VectorXd step = lu.solve(-residual);
    result.state_coeffs += step.head(r * n);
    result.multipliers += step.tail(r * m);
    ++report.iterations;
    residual = assemble_residual(dae, tableau, t_start, dt, x_start, result.state_coeffs,
                                 result.multipliers);
    if (report.iterations == 1)
      report.first_correction_residual = residual.lpNorm<Eigen::Infinity>();
  }
}

Trajectory integrate(const SemiExplicitDae& dae, PointFamily family, int r, double dt,
                     const NewtonSettings& settings) {
  validate(dae);
  if (!(dt > 0)) throw std::invalid_argument("integrate: step size must be positive");

  const double step_count = dae.t_end / dt;
  const auto num_intervals = static_cast<long long>(std::llround(step_count));
  if (num_intervals < 1 ||
      std::abs(step_count - static_cast<double>(num_intervals)) > 4.0 * 1e-16 * step_count)
    throw std::invalid_argument("integrate: t_end must be an integer multiple of dt");

  const ConsistencyReport consistency = check_consistency(dae);
  if (!consistency.consistent)
    std::fprintf(stderr, "cgdae: warning: inconsistent initial data, |g(x0,0)| = %.3e\n",
                 consistency.residual_norm);

  Trajectory trajectory;
  trajectory.tableau = assemble_tableau(make_grid(family, r));
  trajectory.intervals.reserve(static_cast<std::size_t>(num_intervals));

  Eigen::VectorXd x_prev = dae.x0;
  for (long long interval = 0; interval < num_intervals; ++interval) {
    // Interval starts by multiplication, not accumulation, so node times
    // stay accurate over long runs.
    const double t_start = static_cast<double>(interval) * dt;
    const IntervalSolution* previous =
        trajectory.intervals.empty() ? nullptr : &trajectory.intervals.back();
    NewtonResult solved;
    try {
      solved = newton_solve(dae, trajectory.tableau, t_start, dt, x_prev, settings, previous);
    } catch (const std::exception& err) {
      throw IntegrationError("integrate: interval " + std::to_string(interval) +
                                 " failed: " + err.what(),
                             static_cast<std::size_t>(interval), std::move(trajectory));
    }

    IntervalSolution interval_solution;
    interval_solution.t_start = t_start;
    interval_solution.dt = dt;
    interval_solution.coeffs = gather_coefficients(dae.n, r, x_prev, solved.state_coeffs);
    interval_solution.multipliers.resize(dae.m, r);
    for (int k = 1; k <= r; ++k)
      interval_solution.multipliers.col(k - 1) = solved.multipliers.segment((k - 1) * dae.m, dae.m);
    interval_solution.newton = solved.report;

    x_prev = interval_solution.coeffs.col(r);
    trajectory.intervals.push_back(std::move(interval_solution));
  }
  return trajectory;
}

namespace {

std::size_t locate_interval(const Trajectory& trajectory, double t) {
  const double t_end = trajectory.t_end();
  const double slack = 4.0 * 1e-16 * std::max(1.0, std::abs(t_end));
  if (trajectory.intervals.empty() || t < -slack || t > t_end + slack)
    throw std::invalid_argument("eval_state: time outside the computed trajectory");

  const double dt = trajectory.intervals.front().dt;
  double position = std::floor(t / dt);
  // Right-closed intervals: boundaries (including t = t_start + dt up to
  // roundoff) belong to the interval on the left; t = 0 maps to the first.
  if (position > 0 && t - position * dt <= slack) position -= 1.0;
  auto index = static_cast<std::size_t>(std::max(0.0, position));
  if (index >= trajectory.intervals.size()) index = trajectory.intervals.size() - 1;
  return index;
}

}  // namespace

Eigen::VectorXd eval_state(const Trajectory& trajectory, double t) {
  const IntervalSolution& interval = trajectory.intervals[locate_interval(trajectory, t)];
  const double tau = (t - interval.t_start) / interval.dt;
  return interval.coeffs * state_basis_values(trajectory.tableau.grid, tau);
}

Eigen::VectorXd multiplier_action(const Trajectory& trajectory, std::size_t interval_index,
                                  const std::function<double(double)>& v) {
  const IntervalSolution& interval = trajectory.intervals.at(interval_index);
  const int r = trajectory.degree();
  Eigen::VectorXd test_values(r);
  for (int k = 1; k <= r; ++k)
    test_values[k - 1] = v(interval.t_start + interval.dt * trajectory.tableau.grid.nodes[k]);
  return interval.multipliers * test_values;
}

double multiplier_dual_error(const Trajectory& trajectory, std::size_t interval_index,
                             const std::function<Eigen::VectorXd(double)>& lambda_ref) {
  const IntervalSolution& interval = trajectory.intervals.at(interval_index);
  static const QuadratureRule quad = gauss_legendre(20);

  Eigen::VectorXd integral = Eigen::VectorXd::Zero(interval.multipliers.rows());
  for (Eigen::Index q = 0; q < quad.points.size(); ++q)
    integral += interval.dt * quad.weights[q] *
                lambda_ref(interval.t_start + interval.dt * quad.points[q]);
  return (integral - interval.multipliers.rowwise().sum()).norm();
}

}  // namespace cgdae
