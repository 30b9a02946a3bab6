#include "cgdae/cg_stepper.hpp"

#include "cgdae/benchmarks.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace cgdae;

namespace {

SemiExplicitDae make_ode(int n, std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)> f,
                         Eigen::VectorXd x0, double t_end = 1.0) {
  SemiExplicitDae dae;
  dae.n = n;
  dae.m = 0;
  dae.f = std::move(f);
  dae.x0 = std::move(x0);
  dae.t_end = t_end;
  return dae;
}

Eigen::VectorXd random_vector(std::mt19937& rng, int size, double scale = 1.0) {
  std::uniform_real_distribution<double> pick(-scale, scale);
  Eigen::VectorXd v(size);
  for (int i = 0; i < size; ++i) v[i] = pick(rng);
  return v;
}

// Central differences of the interval residual with respect to the stacked
// unknowns (x_1..x_r, lambda_1..lambda_r).
Eigen::MatrixXd fd_newton_matrix(const SemiExplicitDae& dae, const CgTableau& tableau,
                                 double t_start, double dt, const Eigen::VectorXd& x_start,
                                 const Eigen::VectorXd& coeffs, const Eigen::VectorXd& mults) {
  const int rn = static_cast<int>(coeffs.size());
  const int rm = static_cast<int>(mults.size());
  Eigen::MatrixXd jac(rn + rm, rn + rm);
  const double step = 1e-7;
  for (int col = 0; col < rn + rm; ++col) {
    Eigen::VectorXd cp = coeffs, cm = coeffs, lp = mults, lm = mults;
    if (col < rn) {
      cp[col] += step;
      cm[col] -= step;
    } else {
      lp[col - rn] += step;
      lm[col - rn] -= step;
    }
    jac.col(col) = (assemble_residual(dae, tableau, t_start, dt, x_start, cp, lp) -
                    assemble_residual(dae, tableau, t_start, dt, x_start, cm, lm)) /
                   (2.0 * step);
  }
  return jac;
}

}  // namespace

TEST_CASE("residual of trivial problems") {
  const CgTableau tableau = assemble_tableau(make_grid(PointFamily::Equispaced, 1));

  // x' = 0: constant coefficients solve the interval system exactly.
  const SemiExplicitDae frozen =
      make_ode(2, [](const Eigen::VectorXd&, double) { return Eigen::VectorXd::Zero(2); },
               Eigen::Vector2d(1.0, -2.0));
  const Eigen::VectorXd residual = assemble_residual(
      frozen, tableau, 0.0, 0.25, frozen.x0, frozen.x0, Eigen::VectorXd::Zero(0));
  CHECK(residual.cwiseAbs().maxCoeff() < 1e-15);

  // x' = 1: residual reduces to x_1 - x_0 - dt.
  const SemiExplicitDae drift =
      make_ode(1, [](const Eigen::VectorXd&, double) { return Eigen::VectorXd::Ones(1); },
               Eigen::VectorXd::Zero(1));
  for (double x1 : {0.0, 0.3, 1.7}) {
    const Eigen::VectorXd res = assemble_residual(
        drift, tableau, 0.0, 0.125, drift.x0, Eigen::VectorXd::Constant(1, x1),
        Eigen::VectorXd::Zero(0));
    CHECK(res[0] == doctest::Approx(x1 - 0.125).epsilon(1e-15));
  }
}

TEST_CASE("r = 1 residual matches the trapezoidal form with point force") {
  const SemiExplicitDae circuit = make_circuit();
  const CgTableau tableau = assemble_tableau(make_grid(PointFamily::Equispaced, 1));
  std::mt19937 rng(3);

  const double t_start = 0.17, dt = 0.03;
  const Eigen::VectorXd x0 = random_vector(rng, 2);
  const Eigen::VectorXd x1 = random_vector(rng, 2);
  const Eigen::VectorXd lambda = random_vector(rng, 1);

  const Eigen::VectorXd residual =
      assemble_residual(circuit, tableau, t_start, dt, x0, x1, lambda);

  const double t1 = t_start + dt;
  const Eigen::VectorXd by_hand = x1 - x0 -
                                  0.5 * dt * (circuit.f(x0, t_start) + circuit.f(x1, t1)) +
                                  circuit.g_x(x1, t1).transpose() * lambda;
  CHECK((residual.head(2) - by_hand).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(residual[2] == doctest::Approx(circuit.g(x1, t1)[0]).epsilon(1e-15));
}

TEST_CASE("r = 1 Newton matrix closed form") {
  const SemiExplicitDae circuit = make_circuit();
  const CgTableau tableau = assemble_tableau(make_grid(PointFamily::Equispaced, 1));
  std::mt19937 rng(5);

  const double t_start = 0.4, dt = 0.05, t1 = t_start + dt;
  const Eigen::VectorXd x1 = random_vector(rng, 2);
  const Eigen::MatrixXd newton = assemble_newton_matrix(circuit, tableau, t_start, dt, x1);

  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(3, 3);
  expected.topLeftCorner(2, 2) =
      Eigen::MatrixXd::Identity(2, 2) - 0.5 * dt * circuit.f_x(x1, t1);
  expected.topRightCorner(2, 1) = circuit.g_x(x1, t1).transpose();
  expected.bottomLeftCorner(1, 2) = circuit.g_x(x1, t1);
  CHECK((newton - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("pure transport Newton matrix is Dbar kron identity") {
  const SemiExplicitDae frozen =
      make_ode(3, [](const Eigen::VectorXd&, double) { return Eigen::VectorXd::Zero(3); },
               Eigen::Vector3d::Zero());
  const CgTableau tableau = assemble_tableau(make_grid(PointFamily::Equispaced, 3));
  const Eigen::MatrixXd newton =
      assemble_newton_matrix(frozen, tableau, 0.0, 0.1, Eigen::VectorXd::Zero(9));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK((newton.block(3 * i, 3 * j, 3, 3) -
             tableau.Dbar(i, j) * Eigen::MatrixXd::Identity(3, 3))
                .cwiseAbs()
                .maxCoeff() < 1e-15);
  CHECK(std::abs(Eigen::PartialPivLU<Eigen::MatrixXd>(newton).determinant()) > 1e-12);
}

TEST_CASE("Newton matrix matches finite differences of the residual") {
  std::mt19937 rng(11);

  auto check_problem = [&](const SemiExplicitDae& dae, int r, bool random_multiplier,
                           double scale) {
    const CgTableau tableau = assemble_tableau(make_grid(PointFamily::Equispaced, r));
    const double t_start = 0.11, dt = 0.02;
    Eigen::VectorXd x_start = dae.x0 + random_vector(rng, dae.n, 0.05 * scale);
    Eigen::VectorXd coeffs(r * dae.n);
    for (int j = 0; j < r; ++j)
      coeffs.segment(j * dae.n, dae.n) = dae.x0 + random_vector(rng, dae.n, 0.05 * scale);
    // The multiplier enters the residual linearly through g_x^T, which the
    // Newton matrix treats as frozen; curvature of g is exercised only for
    // linear constraints where it vanishes.
    const Eigen::VectorXd mults = random_multiplier ? random_vector(rng, r * dae.m, scale)
                                                    : Eigen::VectorXd::Zero(r * dae.m);

    const Eigen::MatrixXd analytic = assemble_newton_matrix(dae, tableau, t_start, dt, coeffs);
    const Eigen::MatrixXd numeric =
        fd_newton_matrix(dae, tableau, t_start, dt, x_start, coeffs, mults);
    const double denom = analytic.cwiseAbs().maxCoeff();
    CHECK((analytic - numeric).cwiseAbs().maxCoeff() / denom < 1e-5);
  };

  check_problem(make_circuit(), 1, true, 1.0);
  check_problem(make_circuit(), 3, true, 1.0);
  check_problem(make_heat(), 2, true, 1.0);
  check_problem(make_pendulum(), 2, false, 1.0);
}

TEST_CASE("newton_solve iteration counts") {
  const NewtonSettings settings;

  const SemiExplicitDae circuit = make_circuit();
  const CgTableau linear_tableau = assemble_tableau(make_grid(PointFamily::Equispaced, 1));
  const NewtonResult circuit_result =
      newton_solve(circuit, linear_tableau, 0.0, 0.05, circuit.x0, settings);
  CHECK(circuit_result.report.converged);
  CHECK(circuit_result.report.iterations <= 2);
  CHECK(circuit_result.report.first_correction_residual <= 10.0 * settings.tol_residual);

  const SemiExplicitDae heat = make_heat();
  const CgTableau heat_tableau = assemble_tableau(make_grid(PointFamily::Equispaced, 2));
  const NewtonResult heat_result =
      newton_solve(heat, heat_tableau, 0.0, 0.0125, heat.x0, settings);
  CHECK(heat_result.report.converged);
  CHECK(heat_result.report.iterations <= 2);

  const SemiExplicitDae pendulum = make_pendulum();
  const NewtonResult pendulum_result =
      newton_solve(pendulum, linear_tableau, 0.0, 3.0 / 32.0, pendulum.x0, settings);
  CHECK(pendulum_result.report.converged);
  CHECK(pendulum_result.report.iterations <= 10);
}

TEST_CASE("integrate reproduces the circuit reference errors") {
  const SemiExplicitDae circuit = make_circuit();

  const Trajectory coarse = integrate(circuit, PointFamily::Equispaced, 1, 0.05);
  const double coarse_error =
      (eval_state(coarse, 1.0) - circuit.x_ref(1.0)).norm();
  CHECK(coarse_error == doctest::Approx(7.46764e-3).epsilon(0.01));

  const Trajectory quadratic = integrate(circuit, PointFamily::Equispaced, 2, 0.0125);
  const double quadratic_error =
      (eval_state(quadratic, 1.0) - circuit.x_ref(1.0)).norm();
  CHECK(quadratic_error == doctest::Approx(1.51686e-6).epsilon(0.05));
}

TEST_CASE("integrate keeps constants constant") {
  for (int r : {1, 3}) {
    const SemiExplicitDae frozen =
        make_ode(2, [](const Eigen::VectorXd&, double) { return Eigen::VectorXd::Zero(2); },
                 Eigen::Vector2d(0.7, -0.2));
    const Trajectory trajectory = integrate(frozen, PointFamily::Equispaced, r, 0.125);
    // Constant up to the solver tolerance: the residual test accepts any
    // iterate with residual below 1e-12, so coefficients may sit a small
    // multiple of that away from x0.
    for (double t : {0.0, 0.3, 0.99, 1.0})
      CHECK((eval_state(trajectory, t) - frozen.x0).cwiseAbs().maxCoeff() < 1e-11);
  }
}

TEST_CASE("integrate rejects non-integer step counts") {
  const SemiExplicitDae circuit = make_circuit();
  CHECK_THROWS_AS(integrate(circuit, PointFamily::Equispaced, 1, 0.3), std::invalid_argument);
}

TEST_CASE("eval_state boundary semantics") {
  const SemiExplicitDae circuit = make_circuit();
  const Trajectory trajectory = integrate(circuit, PointFamily::Equispaced, 2, 0.05);

  CHECK((eval_state(trajectory, 0.0) - circuit.x0).cwiseAbs().maxCoeff() == 0.0);
  // Boundaries return the shared coefficient bitwise.
  for (std::size_t interval : {std::size_t{0}, std::size_t{7}, std::size_t{19}}) {
    const IntervalSolution& sol = trajectory.intervals[interval];
    CHECK((eval_state(trajectory, sol.t_start + sol.dt) - sol.coeffs.col(2)).cwiseAbs().maxCoeff() ==
          0.0);
    CHECK((eval_state(trajectory, sol.t_start + 0.5 * sol.dt) - sol.coeffs.col(1))
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }
  CHECK_THROWS_AS(eval_state(trajectory, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(eval_state(trajectory, 1.1), std::invalid_argument);
}

TEST_CASE("continuity at interval boundaries") {
  const SemiExplicitDae pendulum = make_pendulum();
  const Trajectory trajectory = integrate(pendulum, PointFamily::Equispaced, 2, 3.0 / 32.0);
  for (std::size_t i = 0; i + 1 < trajectory.intervals.size(); ++i)
    CHECK((trajectory.intervals[i].coeffs.col(2) - trajectory.intervals[i + 1].coeffs.col(0))
              .cwiseAbs()
              .maxCoeff() == 0.0);
}

TEST_CASE("multiplier_action pairings") {
  const SemiExplicitDae circuit = make_circuit();
  const Trajectory trajectory = integrate(circuit, PointFamily::Equispaced, 2, 0.05);
  const IntervalSolution& last = trajectory.intervals.back();

  const Eigen::VectorXd sum = multiplier_action(trajectory, trajectory.intervals.size() - 1,
                                                [](double) { return 1.0; });
  CHECK(sum[0] == doctest::Approx(last.multipliers.sum()).epsilon(1e-15));

  const Eigen::VectorXd zero = multiplier_action(trajectory, 0, [](double) { return 0.0; });
  CHECK(zero[0] == 0.0);

  const Trajectory linear = integrate(circuit, PointFamily::Equispaced, 1, 0.05);
  const Eigen::VectorXd single =
      multiplier_action(linear, 3, [](double t) { return t * t; });
  const double t1 = linear.intervals[3].t_start + linear.intervals[3].dt;
  CHECK(single[0] == doctest::Approx(linear.intervals[3].multipliers(0, 0) * t1 * t1));
}

TEST_CASE("multiplier_dual_error") {
  // A hand-built interval whose multiplier reproduces a constant reference
  // exactly: sum_k lambda_k = c * dt.
  Trajectory toy;
  toy.tableau = assemble_tableau(make_grid(PointFamily::Equispaced, 1));
  IntervalSolution interval;
  interval.t_start = 0.0;
  interval.dt = 0.25;
  interval.coeffs = Eigen::MatrixXd::Zero(1, 2);
  interval.multipliers = Eigen::MatrixXd::Constant(1, 1, 3.0 * 0.25);
  toy.intervals.push_back(interval);
  CHECK(multiplier_dual_error(toy, 0, [](double) {
          return Eigen::VectorXd::Constant(1, 3.0);
        }) < 1e-15);

  // Reference values for the circuit problem on the final subinterval.
  const SemiExplicitDae circuit = make_circuit();
  const Trajectory fine = integrate(circuit, PointFamily::Equispaced, 1, 0.00078125);
  CHECK(multiplier_dual_error(fine, fine.intervals.size() - 1, circuit.lambda_ref) ==
        doctest::Approx(4.45119e-7).epsilon(0.10));

  const Trajectory quadratic = integrate(circuit, PointFamily::Equispaced, 2, 0.0015625);
  CHECK(multiplier_dual_error(quadratic, quadratic.intervals.size() - 1, circuit.lambda_ref) ==
        doctest::Approx(3.53994e-10).epsilon(0.10));
}

TEST_CASE("constraint is enforced at the nodes along trajectories") {
  const SemiExplicitDae circuit = make_circuit();
  const NewtonSettings settings;
  const Trajectory trajectory = integrate(circuit, PointFamily::Equispaced, 3, 0.025, settings);
  double worst = 0.0;
  for (const IntervalSolution& interval : trajectory.intervals)
    for (int k = 1; k <= 3; ++k) {
      const double tk = interval.t_start + interval.dt * trajectory.tableau.grid.nodes[k];
      worst = std::max(worst, circuit.g(interval.coeffs.col(k), tk).cwiseAbs().maxCoeff());
    }
  CHECK(worst <= 10.0 * settings.tol_residual);
}

TEST_CASE("one cG step of degree 1 is the trapezoidal rule for ODEs") {
  // x' = -x: the trapezoidal update has the closed form
  // x1 = x0 (1 - dt/2) / (1 + dt/2).
  const double dt = 0.125;
  const SemiExplicitDae decay =
      make_ode(1, [](const Eigen::VectorXd& x, double) { return Eigen::VectorXd(-x); },
               Eigen::VectorXd::Ones(1), dt);
  const Trajectory step = integrate(decay, PointFamily::Equispaced, 1, dt);
  const double expected = (1.0 - 0.5 * dt) / (1.0 + 0.5 * dt);
  CHECK(eval_state(step, dt)[0] == doctest::Approx(expected).epsilon(1e-13));

  // Nonlinear right-hand side: compare against an independent scalar Newton
  // solve of the trapezoidal equation x1 = x0 + dt/2 (f(x0) + f(x1)).
  auto f = [](double x) { return std::sin(x) - 0.5 * x * x; };
  auto df = [](double x) { return std::cos(x) - x; };
  const double x0 = 0.8;
  double trapezoid = x0;
  for (int it = 0; it < 50; ++it) {
    const double residual = trapezoid - x0 - 0.5 * dt * (f(x0) + f(trapezoid));
    trapezoid -= residual / (1.0 - 0.5 * dt * df(trapezoid));
  }
  const SemiExplicitDae nonlinear = make_ode(
      1,
      [&](const Eigen::VectorXd& x, double) { return Eigen::VectorXd::Constant(1, f(x[0])); },
      Eigen::VectorXd::Constant(1, x0), dt);
  const Trajectory nonlinear_step = integrate(nonlinear, PointFamily::Equispaced, 1, dt);
  CHECK(eval_state(nonlinear_step, dt)[0] == doctest::Approx(trapezoid).epsilon(1e-12));
}

TEST_CASE("linear problems converge after one correction") {
  for (const SemiExplicitDae& dae : {make_circuit(), make_heat()}) {
    REQUIRE(dae.f_linear);
    REQUIRE(dae.g_linear);
    const Trajectory trajectory = integrate(dae, PointFamily::Equispaced, 1, dae.t_end / 20.0);
    for (const IntervalSolution& interval : trajectory.intervals)
      CHECK(interval.newton.iterations <= 1);
  }
}

TEST_CASE("mass-matrix blocks scale correctly with dt") {
  const SemiExplicitDae pendulum = make_pendulum();
  const CgTableau tableau = assemble_tableau(make_grid(PointFamily::Equispaced, 2));
  std::mt19937 rng(17);
  Eigen::VectorXd coeffs(2 * 4);
  coeffs << random_vector(rng, 4, 0.3) + pendulum.x0, random_vector(rng, 4, 0.3) + pendulum.x0;

  const double dt = 0.0625;
  const Eigen::MatrixXd at_dt = assemble_newton_matrix(pendulum, tableau, 0.0, dt, coeffs);
  const Eigen::MatrixXd at_2dt = assemble_newton_matrix(pendulum, tableau, 0.0, 2.0 * dt, coeffs);

  // Assemble the dt-independent part Dbar kron J directly.
  Eigen::MatrixXd d_part = Eigen::MatrixXd::Zero(at_dt.rows(), at_dt.cols());
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      d_part.block(4 * i, 4 * j, 4, 4) = tableau.Dbar(i, j) * pendulum.J;

  const Eigen::MatrixXd mass_dt = at_dt - d_part;
  const Eigen::MatrixXd mass_2dt = at_2dt - d_part;
  const int rn = 8;
  CHECK((mass_2dt.topLeftCorner(rn, rn) - 2.0 * mass_dt.topLeftCorner(rn, rn))
            .cwiseAbs()
            .maxCoeff() < 1e-14);
}

TEST_CASE("integration failure carries the partial trajectory") {
  // g = x1^2 - t forces the iterate away from x1 = 0, but g_x vanishes at
  // the constant predictor, so the first Newton matrix is singular.
  SemiExplicitDae degenerate;
  degenerate.n = 2;
  degenerate.m = 1;
  degenerate.x0 = Eigen::Vector2d(0.0, 0.0);
  degenerate.t_end = 1.0;
  degenerate.f = [](const Eigen::VectorXd&, double) { return Eigen::VectorXd::Zero(2); };
  degenerate.g = [](const Eigen::VectorXd& x, double t) {
    return Eigen::VectorXd::Constant(1, x[0] * x[0] - t);
  };
  degenerate.g_x = [](const Eigen::VectorXd& x, double) {
    Eigen::MatrixXd jac(1, 2);
    jac << 2.0 * x[0], 0.0;
    return jac;
  };
  try {
    integrate(degenerate, PointFamily::Equispaced, 1, 0.5);
    FAIL("expected an integration error");
  } catch (const IntegrationError& error) {
    CHECK(error.interval_index == 0);
    CHECK(error.partial.intervals.empty());
  }
}
