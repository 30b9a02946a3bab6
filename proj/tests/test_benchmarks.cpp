#include "cgdae/benchmarks.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace cgdae;

TEST_CASE("circuit problem structure") {
  const SemiExplicitDae circuit = make_circuit();
  CHECK(circuit.n == 2);
  CHECK(circuit.m == 1);
  CHECK(circuit.f_linear);
  CHECK(circuit.g_linear);
  CHECK(circuit.g(circuit.x0, 0.0).norm() == 0.0);
  CHECK(circuit.lambda_ref(0.0)[0] == doctest::Approx(-50.0).epsilon(1e-12));
  CHECK(circuit_exact(0.0)[2] == doctest::Approx(-50.0).epsilon(1e-12));

  // g_x = [1, 1] everywhere, trivially of full row rank.
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> pick(-2.0, 2.0);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Vector2d x(pick(rng), pick(rng));
    const Eigen::MatrixXd gx = circuit.g_x(x, pick(rng));
    CHECK(gx(0, 0) == 1.0);
    CHECK(gx(0, 1) == 1.0);
  }

  // q1 + q2 = sin(100 t) holds identically for the reference solution.
  std::uniform_real_distribution<double> pick_t(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double t = pick_t(rng);
    const Eigen::Vector3d exact = circuit_exact(t);
    CHECK(exact[0] + exact[1] == doctest::Approx(std::sin(100.0 * t)).epsilon(1e-12));
  }
}

TEST_CASE("heat problem structure") {
  const SemiExplicitDae heat = make_heat();
  CHECK(heat.n == 82);
  CHECK(heat.m == 3);
  CHECK(heat.f_linear);
  CHECK(heat.g_linear);
  CHECK(heat.x0[0] == 1.0);
  CHECK(heat.g(heat.x0, 0.0).cwiseAbs().maxCoeff() < 1e-14);
  CHECK_NOTHROW(validate(heat));

  HeatConfig nonlinear;
  nonlinear.c1 = 3.0;
  const SemiExplicitDae cubic = make_heat(nonlinear);
  CHECK_FALSE(cubic.f_linear);
  CHECK(cubic.g(cubic.x0, 0.0).cwiseAbs().maxCoeff() < 1e-14);

  HeatConfig bad;
  bad.h = 0.13;
  CHECK_THROWS_AS(make_heat(bad), std::invalid_argument);
}

TEST_CASE("heat jacobians match finite differences at positive states") {
  HeatConfig config;
  config.c1 = 3.0;
  const SemiExplicitDae heat = make_heat(config);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> positive(0.05, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd state(heat.n);
    for (int i = 0; i < heat.n; ++i) state[i] = positive(rng);

    const Eigen::MatrixXd fx = heat.f_x(state, 0.0);
    const Eigen::MatrixXd fx_fd =
        fd_jacobian([&](const Eigen::VectorXd& y) { return heat.f(y, 0.0); }, state);
    CHECK((fx - fx_fd).cwiseAbs().maxCoeff() <= 1e-6 * fx.cwiseAbs().maxCoeff());

    const Eigen::MatrixXd gx = heat.g_x(state, 0.0);
    const Eigen::MatrixXd gx_fd =
        fd_jacobian([&](const Eigen::VectorXd& y) { return heat.g(y, 0.0); }, state);
    CHECK((gx - gx_fd).cwiseAbs().maxCoeff() <= 1e-6 * gx.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("heat guards fractional powers of negative states") {
  HeatConfig config;
  config.c1 = 1.5;
  const SemiExplicitDae heat = make_heat(config);
  Eigen::VectorXd state = heat.x0;
  state[3] = -0.2;
  CHECK_THROWS_AS(heat.f(state, 0.0), EvaluationError);

  // Integer exponents stay sign-preserving and finite.
  HeatConfig cubic;
  cubic.c1 = 3.0;
  const SemiExplicitDae safe = make_heat(cubic);
  CHECK(safe.f(state, 0.0).allFinite());
}

TEST_CASE("pendulum problem structure") {
  const PendulumConfig config;
  const SemiExplicitDae pendulum = make_pendulum(config);
  CHECK(pendulum.n == 4);
  CHECK(pendulum.m == 1);
  CHECK(pendulum.g(pendulum.x0, 0.0).cwiseAbs().maxCoeff() == 0.0);

  const Eigen::MatrixXd gx = pendulum.g_x(pendulum.x0, 0.0);
  CHECK(gx(0, 0) == 2.0 * config.ell);
  CHECK(gx(0, 1) == 0.0);

  CHECK((pendulum.J + pendulum.J.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK_NOTHROW(validate(pendulum));

  PendulumConfig off_constraint;
  off_constraint.x_init = Eigen::Vector4d(1.1, 0.0, 0.0, 0.0);
  CHECK_THROWS_AS(make_pendulum(off_constraint), std::invalid_argument);

  PendulumConfig off_velocity;
  off_velocity.x_init = Eigen::Vector4d(1.0, 0.0, 0.5, 0.0);
  CHECK_THROWS_AS(make_pendulum(off_velocity), std::invalid_argument);
}

TEST_CASE("pendulum energy") {
  PendulumConfig config;
  CHECK(pendulum_energy(Eigen::Vector4d(0.0, 0.0, 1.0, 0.0), config) == 0.5);
  CHECK(pendulum_energy(Eigen::Vector4d(0.0, 1.0, 0.0, 0.0), config) == 1.0);
  CHECK(pendulum_energy(config.x_init, config) == 0.0);
}
