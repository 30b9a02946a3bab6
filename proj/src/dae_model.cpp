#include "cgdae/dae_model.hpp"

#include <cmath>
#include <limits>

namespace cgdae {

namespace {

constexpr double kConsistencyTol = 1e-10;
constexpr double kRankTol = 1e-10;

void require_finite(const Eigen::VectorXd& v, const char* what) {
  if (!v.allFinite()) throw EvaluationError(std::string(what) + ": non-finite value");
}

}  // namespace

void validate(const SemiExplicitDae& dae) {
  if (dae.n < 1) throw std::invalid_argument("dae: state dimension must be positive");
  if (dae.m < 0 || dae.m >= dae.n)
    throw std::invalid_argument("dae: constraint dimension must satisfy 0 <= m < n");
  if (dae.x0.size() != dae.n) throw std::invalid_argument("dae: initial state has wrong size");
  if (!dae.f) throw std::invalid_argument("dae: missing right-hand side f");
  if (dae.m > 0 && (!dae.g || !dae.g_x))
    throw std::invalid_argument("dae: constrained problems need g and g_x");
  if (dae.J.size() != 0) {
    if (dae.J.rows() != dae.n || dae.J.cols() != dae.n)
      throw std::invalid_argument("dae: mass matrix has wrong size");
    const bool identity = dae.J.isIdentity(0.0);
    const bool skew = (dae.J + dae.J.transpose()).cwiseAbs().maxCoeff() < 1e-12;
    if (!identity && !skew)
      throw std::invalid_argument("dae: non-identity mass matrix must be skew-symmetric");
  }
}

ConsistencyReport check_consistency(const SemiExplicitDae& dae) {
  ConsistencyReport report;
  if (dae.m == 0) return report;

  const Eigen::VectorXd g0 = dae.g(dae.x0, 0.0);
  report.residual_norm = g0.norm();
  report.consistent = report.residual_norm <= kConsistencyTol;

  const Eigen::MatrixXd G = dae.g_x(dae.x0, 0.0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(G);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > kRankTol * sv[0]) ++rank;
  report.rank_ok = rank == dae.m;
  return report;
}

Eigen::MatrixXd fd_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& h,
                            const Eigen::VectorXd& x) {
  const double root_eps = std::sqrt(std::numeric_limits<double>::epsilon());
  const Eigen::Index cols = x.size();
  Eigen::VectorXd probe = x;

  Eigen::MatrixXd jac;
  for (Eigen::Index i = 0; i < cols; ++i) {
    const double step = root_eps * (1.0 + std::abs(x[i]));
    probe[i] = x[i] + step;
    const Eigen::VectorXd plus = h(probe);
    probe[i] = x[i] - step;
    const Eigen::VectorXd minus = h(probe);
    probe[i] = x[i];
    require_finite(plus, "fd_jacobian");
    require_finite(minus, "fd_jacobian");
    if (jac.size() == 0) jac.resize(plus.size(), cols);
    jac.col(i) = (plus - minus) / (2.0 * step);
  }
  return jac;
}

Eigen::MatrixXd jacobian_f(const SemiExplicitDae& dae, const Eigen::VectorXd& x, double t) {
  if (dae.f_x) return dae.f_x(x, t);
  return fd_jacobian([&](const Eigen::VectorXd& y) { return dae.f(y, t); }, x);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> continuous_residual(const SemiExplicitDae& dae,
                                                                const Eigen::VectorXd& x,
                                                                const Eigen::VectorXd& xdot,
                                                                const Eigen::VectorXd& lambda,
                                                                double t) {
  if (x.size() != dae.n || xdot.size() != dae.n || lambda.size() != dae.m)
    throw std::invalid_argument("continuous_residual: dimension mismatch");

  Eigen::VectorXd differential = dae.J.size() != 0 ? Eigen::VectorXd(dae.J * xdot) : xdot;
  differential -= dae.f(x, t);
  Eigen::VectorXd algebraic = Eigen::VectorXd::Zero(0);
  if (dae.m > 0) {
    differential += dae.g_x(x, t).transpose() * lambda;
    algebraic = dae.g(x, t);
  }
  return {std::move(differential), std::move(algebraic)};
}

}  // namespace cgdae
