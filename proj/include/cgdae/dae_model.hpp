#pragma once

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

namespace cgdae {

/// Thrown when a model callback produces non-finite values or is evaluated
/// outside its admissible domain.
struct EvaluationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Semi-explicit DAE with constant mass matrix,
///
///   J x' = f(x, t) - g_x(x, t)^T lambda,
///      0 = g(x, t),
///
/// posed on [0, t_end] with initial state x0. An empty J means identity;
/// a non-identity J must be skew-symmetric. m = 0 gives a plain ODE and g,
/// g_x may be left empty. Callbacks must be pure; problem definitions are
/// shared read-only between concurrent solver runs.
struct SemiExplicitDae {
  int n = 0;
  int m = 0;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)> f;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&, double)> f_x;  // optional
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)> g;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&, double)> g_x;
  Eigen::MatrixXd J;
  Eigen::VectorXd x0;
  double t_end = 1.0;
  std::function<Eigen::VectorXd(double)> x_ref;       // optional exact state
  std::function<Eigen::VectorXd(double)> lambda_ref;  // optional exact multiplier
  bool f_linear = false;
  bool g_linear = false;
  std::string name;
};

/// Check structural invariants (dimensions, m < n, skew J). Throws
/// std::invalid_argument on violation.
void validate(const SemiExplicitDae& dae);

struct ConsistencyReport {
  double residual_norm = 0;
  bool consistent = true;
  bool rank_ok = true;
};

/// Report |g(x0, 0)| and the numerical row rank of g_x(x0, 0); reporting
/// only, callers decide whether to proceed.
ConsistencyReport check_consistency(const SemiExplicitDae& dae);

/// Central-difference Jacobian of h at x with per-column step
/// sqrt(eps) * (1 + |x_i|).
Eigen::MatrixXd fd_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& h,
                            const Eigen::VectorXd& x);

/// Analytic f_x when provided, finite-difference fallback otherwise.
Eigen::MatrixXd jacobian_f(const SemiExplicitDae& dae, const Eigen::VectorXd& x, double t);

/// Residual pair (J x' - f(x, t) + g_x(x, t)^T lambda, g(x, t)); both parts
/// vanish along an exact solution.
std::pair<Eigen::VectorXd, Eigen::VectorXd> continuous_residual(const SemiExplicitDae& dae,
                                                                const Eigen::VectorXd& x,
                                                                const Eigen::VectorXd& xdot,
                                                                const Eigen::VectorXd& lambda,
                                                                double t);

}  // namespace cgdae
