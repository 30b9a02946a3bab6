#include "cgdae/radau.hpp"

#include <cmath>
#include <string>

namespace cgdae {

ButcherTableau radau_tableau(int stages) {
  ButcherTableau tableau;
  tableau.s = stages;
  if (stages == 2) {
    tableau.A.resize(2, 2);
    tableau.A << 5.0 / 12.0, -1.0 / 12.0,  //
        3.0 / 4.0, 1.0 / 4.0;
    tableau.c.resize(2);
    tableau.c << 1.0 / 3.0, 1.0;
  } else if (stages == 3) {
    const double sqrt6 = std::sqrt(6.0);
    tableau.A.resize(3, 3);
    tableau.A << (88.0 - 7.0 * sqrt6) / 360.0, (296.0 - 169.0 * sqrt6) / 1800.0,
        (-2.0 + 3.0 * sqrt6) / 225.0,  //
        (296.0 + 169.0 * sqrt6) / 1800.0, (88.0 + 7.0 * sqrt6) / 360.0,
        (-2.0 - 3.0 * sqrt6) / 225.0,  //
        (16.0 - sqrt6) / 36.0, (16.0 + sqrt6) / 36.0, 1.0 / 9.0;
    tableau.c.resize(3);
    tableau.c << (4.0 - sqrt6) / 10.0, (4.0 + sqrt6) / 10.0, 1.0;
  } else {
    throw std::invalid_argument("radau_tableau: only 2 or 3 stages are supported");
  }
  tableau.b = tableau.A.row(stages - 1);
  return tableau;
}

RadauStepResult radau_step(const SemiExplicitDae& dae, const ButcherTableau& tableau,
                           double t_start, double dt, const Eigen::VectorXd& x_start,
                           const NewtonSettings& settings) {
  if (dae.J.size() != 0 && !dae.J.isIdentity(0.0))
    throw std::invalid_argument("radau_step: only identity mass matrices are supported");
  if (!(dt > 0)) throw std::invalid_argument("radau_step: step size must be positive");

  const int s = tableau.s;
  const int n = dae.n;
  const int m = dae.m;
  const int dim = s * (n + m);

  // Unknowns: stage states X_1..X_s, then stage multipliers L_1..L_s.
  Eigen::VectorXd unknowns = Eigen::VectorXd::Zero(dim);
  for (int i = 0; i < s; ++i) unknowns.segment(i * n, n) = x_start;

  auto stage_time = [&](int i) { return t_start + dt * tableau.c[i]; };

  auto residual_of = [&](const Eigen::VectorXd& u) {
    Eigen::MatrixXd rhs(n, s);  // f - g_x^T L per stage
    for (int j = 0; j < s; ++j) {
      const Eigen::VectorXd xj = u.segment(j * n, n);
      rhs.col(j) = dae.f(xj, stage_time(j));
      if (m > 0)
        rhs.col(j) -= dae.g_x(xj, stage_time(j)).transpose() * u.segment(s * n + j * m, m);
      if (!rhs.col(j).allFinite())
        throw EvaluationError("radau_step: non-finite stage right-hand side");
    }
    Eigen::VectorXd res(dim);
    for (int i = 0; i < s; ++i) {
      Eigen::VectorXd row = u.segment(i * n, n) - x_start;
      for (int j = 0; j < s; ++j) row -= dt * tableau.A(i, j) * rhs.col(j);
      res.segment(i * n, n) = row;
      if (m > 0)
        res.segment(s * n + i * m, m) = dae.g(u.segment(i * n, n), stage_time(i));
    }
    return res;
  };

  auto matrix_of = [&](const Eigen::VectorXd& u) {
    Eigen::MatrixXd newton = Eigen::MatrixXd::Zero(dim, dim);
    for (int j = 0; j < s; ++j) {
      const Eigen::VectorXd xj = u.segment(j * n, n);
      const Eigen::MatrixXd fx = jacobian_f(dae, xj, stage_time(j));
      const Eigen::MatrixXd gx = m > 0 ? dae.g_x(xj, stage_time(j)) : Eigen::MatrixXd();
      for (int i = 0; i < s; ++i) {
        auto block = newton.block(i * n, j * n, n, n);
        block = -dt * tableau.A(i, j) * fx;
        if (i == j) block.diagonal().array() += 1.0;
        if (m > 0) newton.block(i * n, s * n + j * m, n, m) = dt * tableau.A(i, j) * gx.transpose();
      }
      if (m > 0) newton.block(s * n + j * m, j * n, m, n) = gx;
    }
    return newton;
  };

  RadauStepResult result;
  Eigen::VectorXd residual = residual_of(unknowns);
  NewtonReport& report = result.newton;
  while (true) {
    const double norm = residual.lpNorm<Eigen::Infinity>();
    report.final_residual_norm = norm;
    if (std::isfinite(norm) && norm <= settings.tol_residual) {
      report.converged = true;
      break;
    }
    if (!std::isfinite(norm)) throw NoConvergence("radau_step: residual became non-finite", report);
    if (report.iterations >= settings.max_iter)
      throw NoConvergence("radau_step: no convergence within max_iter", report);

    const Eigen::MatrixXd newton = matrix_of(unknowns);
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(newton);
    const double min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (min_pivot < 1e-14 * newton.cwiseAbs().maxCoeff())
      throw SingularNewtonMatrix("radau_step: near-singular stage matrix");
    unknowns += lu.solve(-residual);
    ++report.iterations;
    residual = residual_of(unknowns);
    if (report.iterations == 1)
      report.first_correction_residual = residual.lpNorm<Eigen::Infinity>();
  }

  result.stage_states.resize(n, s);
  result.stage_multipliers.resize(m, s);
  for (int i = 0; i < s; ++i) {
    result.stage_states.col(i) = unknowns.segment(i * n, n);
    if (m > 0) result.stage_multipliers.col(i) = unknowns.segment(s * n + i * m, m);
  }
  result.x_end = result.stage_states.col(s - 1);
  return result;
}

RadauRun radau_integrate(const SemiExplicitDae& dae, int stages, double dt,
                         const NewtonSettings& settings) {
  validate(dae);
  const ButcherTableau tableau = radau_tableau(stages);

  const double step_count = dae.t_end / dt;
  const auto num_steps = static_cast<long long>(std::llround(step_count));
  if (num_steps < 1 ||
      std::abs(step_count - static_cast<double>(num_steps)) > 4.0 * 1e-16 * step_count)
    throw std::invalid_argument("radau_integrate: t_end must be an integer multiple of dt");

  RadauRun run;
  run.x_final = dae.x0;
  long long total_iters = 0;
  for (long long step = 0; step < num_steps; ++step) {
    const double t_start = static_cast<double>(step) * dt;
    RadauStepResult res;
    try {
      res = radau_step(dae, tableau, t_start, dt, run.x_final, settings);
    } catch (const std::exception& err) {
      throw std::runtime_error("radau_integrate: step " + std::to_string(step) +
                               " failed: " + err.what());
    }
    run.x_final = res.x_end;
    total_iters += res.newton.iterations;
    run.newton_iters_max = std::max(run.newton_iters_max, res.newton.iterations);
    if (dae.m > 0)
      for (int i = 0; i < stages; ++i) {
        const double violation =
            dae.g(res.stage_states.col(i), t_start + dt * tableau.c[i]).cwiseAbs().maxCoeff();
        run.constraint_max = std::max(run.constraint_max, violation);
      }
  }
  run.newton_iters_mean = static_cast<double>(total_iters) / static_cast<double>(num_steps);
  return run;
}

}  // namespace cgdae
