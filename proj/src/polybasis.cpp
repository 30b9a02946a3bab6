#include "cgdae/polybasis.hpp"

#include "cgdae/quadrature.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cgdae {

namespace {

constexpr int kMaxDegree = 8;
constexpr double kNodeSnapTol = 1e-12;

// Legendre P_r, P_r' and P_r'' on [-1, 1]; the interior Gauss-Lobatto
// points are the roots of P_r'.
void legendre_all(int r, double x, double& p, double& dp, double& ddp) {
  double prev = 1.0, cur = x;
  if (r == 0) {
    p = 1.0;
    dp = ddp = 0.0;
    return;
  }
  for (int k = 2; k <= r; ++k) {
    const double next = ((2 * k - 1) * x * cur - (k - 1) * prev) / k;
    prev = cur;
    cur = next;
  }
  p = cur;
  dp = r * (prev - x * cur) / (1.0 - x * x);
  ddp = (2.0 * x * dp - r * (r + 1) * p) / (1.0 - x * x);
}

Eigen::VectorXd gauss_lobatto_nodes(int r) {
  Eigen::VectorXd nodes(r + 1);
  nodes[0] = 0.0;
  nodes[r] = 1.0;
  for (int i = 1; i < r; ++i) {
    // Newton on P_r' from a Chebyshev-extrema initial guess.
    double x = std::cos(M_PI * (r - i) / r);
    for (int it = 0; it < 100; ++it) {
      double p, dp, ddp;
      legendre_all(r, x, p, dp, ddp);
      const double dx = dp / ddp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = 0.5 * (1.0 + x);
  }
  return nodes;
}

Eigen::VectorXd barycentric_weights(const Eigen::VectorXd& nodes) {
  const Eigen::Index n = nodes.size();
  Eigen::VectorXd w = Eigen::VectorXd::Ones(n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < n; ++k)
      if (k != i) w[i] /= nodes[i] - nodes[k];
  return w;
}

int snapped_node(const Eigen::VectorXd& nodes, double tau) {
  for (Eigen::Index i = 0; i < nodes.size(); ++i)
    if (std::abs(tau - nodes[i]) < kNodeSnapTol) return static_cast<int>(i);
  return -1;
}

Eigen::VectorXd cardinal_values(const Eigen::VectorXd& nodes, const Eigen::VectorXd& weights,
                                double tau) {
  const Eigen::Index n = nodes.size();
  const int hit = snapped_node(nodes, tau);
  if (hit >= 0) {
    Eigen::VectorXd vals = Eigen::VectorXd::Zero(n);
    vals[hit] = 1.0;
    return vals;
  }
  const Eigen::VectorXd d = weights.array() / (tau - nodes.array());
  return d / d.sum();
}

// Derivatives of all cardinal polynomials at tau. Off the nodes this is the
// Schneider-Werner formula; at a node it is the row of the differentiation
// matrix.
Eigen::VectorXd cardinal_derivatives(const Eigen::VectorXd& nodes, const Eigen::VectorXd& weights,
                                     double tau) {
  const Eigen::Index n = nodes.size();
  Eigen::VectorXd deriv(n);
  const int hit = snapped_node(nodes, tau);
  if (hit >= 0) {
    double diag = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == hit) continue;
      deriv[j] = (weights[j] / weights[hit]) / (nodes[hit] - nodes[j]);
      diag -= deriv[j];
    }
    deriv[hit] = diag;
    return deriv;
  }
  const Eigen::ArrayXd d = weights.array() / (tau - nodes.array());
  const Eigen::ArrayXd e = d / (tau - nodes.array());
  const double s = d.sum();
  const double es = e.sum();
  const Eigen::ArrayXd vals = d / s;
  deriv = (vals * es - e) / s;
  return deriv;
}

LagrangeGrid finish_grid(int r, PointFamily family, Eigen::VectorXd nodes) {
  LagrangeGrid grid;
  grid.r = r;
  grid.family = family;
  grid.nodes = std::move(nodes);
  grid.state_weights = barycentric_weights(grid.nodes);
  grid.test_weights = barycentric_weights(grid.nodes.tail(r));
  return grid;
}

}  // namespace

const char* to_string(PointFamily family) {
  switch (family) {
    case PointFamily::Equispaced: return "equispaced";
    case PointFamily::GaussLobatto: return "gauss-lobatto";
    case PointFamily::ChebyshevLobatto: return "chebyshev-lobatto";
    case PointFamily::Custom: return "custom";
  }
  return "unknown";
}

PointFamily parse_point_family(std::string_view name) {
  if (name == "equispaced") return PointFamily::Equispaced;
  if (name == "gauss-lobatto") return PointFamily::GaussLobatto;
  if (name == "chebyshev-lobatto") return PointFamily::ChebyshevLobatto;
  throw std::invalid_argument("unknown point family: " + std::string(name));
}

LagrangeGrid make_grid(PointFamily family, int r) {
  if (r < 1) throw std::invalid_argument("make_grid: degree must be at least 1");
  if (r > kMaxDegree) throw std::invalid_argument("make_grid: degrees above 8 are not supported");

  Eigen::VectorXd nodes(r + 1);
  switch (family) {
    case PointFamily::Equispaced:
      for (int j = 0; j <= r; ++j) nodes[j] = static_cast<double>(j) / r;
      break;
    case PointFamily::GaussLobatto:
      nodes = gauss_lobatto_nodes(r);
      break;
    case PointFamily::ChebyshevLobatto:
      // Chebyshev extrema mapped to [0, 1], ascending, endpoints included.
      for (int j = 0; j <= r; ++j) nodes[j] = 0.5 * (1.0 - std::cos(M_PI * j / r));
      break;
    case PointFamily::Custom:
      throw std::invalid_argument("make_grid: custom family requires explicit nodes");
  }
  nodes[0] = 0.0;
  nodes[r] = 1.0;
  return finish_grid(r, family, std::move(nodes));
}

LagrangeGrid make_grid(Eigen::VectorXd nodes) {
  const int r = static_cast<int>(nodes.size()) - 1;
  if (r < 1) throw std::invalid_argument("make_grid: need at least two nodes");
  if (r > kMaxDegree) throw std::invalid_argument("make_grid: degrees above 8 are not supported");
  if (nodes[0] != 0.0) throw std::invalid_argument("make_grid: first node must be 0");
  for (int j = 0; j < r; ++j)
    if (!(nodes[j] < nodes[j + 1]))
      throw std::invalid_argument("make_grid: nodes must be strictly increasing");
  if (nodes[r] > 1.0) throw std::invalid_argument("make_grid: nodes must lie in [0, 1]");
  return finish_grid(r, PointFamily::Custom, std::move(nodes));
}

BasisValue eval_state_basis(const LagrangeGrid& grid, int j, double tau) {
  if (j < 0 || j > grid.r) throw std::invalid_argument("eval_state_basis: index out of range");
  return {state_basis_values(grid, tau)[j], state_basis_derivatives(grid, tau)[j]};
}

double eval_test_basis(const LagrangeGrid& grid, int i, double tau) {
  if (i < 1 || i > grid.r) throw std::invalid_argument("eval_test_basis: index out of range");
  return test_basis_values(grid, tau)[i - 1];
}

Eigen::VectorXd state_basis_values(const LagrangeGrid& grid, double tau) {
  return cardinal_values(grid.nodes, grid.state_weights, tau);
}

Eigen::VectorXd state_basis_derivatives(const LagrangeGrid& grid, double tau) {
  return cardinal_derivatives(grid.nodes, grid.state_weights, tau);
}

Eigen::VectorXd test_basis_values(const LagrangeGrid& grid, double tau) {
  return cardinal_values(grid.nodes.tail(grid.r), grid.test_weights, tau);
}

CgTableau assemble_tableau(const LagrangeGrid& grid) {
  const int r = grid.r;
  CgTableau tab;
  tab.grid = grid;
  tab.D = Eigen::MatrixXd::Zero(r, r + 1);
  tab.Mhat = Eigen::MatrixXd::Zero(r, r + 1);

  const QuadratureRule quad = gauss_legendre(r + 1);
  for (Eigen::Index q = 0; q < quad.points.size(); ++q) {
    const double tau = quad.points[q];
    const double w = quad.weights[q];
    const Eigen::VectorXd phi = state_basis_values(grid, tau);
    const Eigen::VectorXd dphi = state_basis_derivatives(grid, tau);
    const Eigen::VectorXd psi = test_basis_values(grid, tau);
    tab.D.noalias() += w * psi * dphi.transpose();
    tab.Mhat.noalias() += w * psi * phi.transpose();
  }

  tab.D1 = tab.D.col(0);
  tab.Dbar = tab.D.rightCols(r);
  tab.M1hat = tab.Mhat.col(0);
  tab.Mbarhat = tab.Mhat.rightCols(r);
  std::tie(tab.lebesgue_phi, tab.lebesgue_psi) = lebesgue_constants(grid);
  return tab;
}

std::pair<double, double> lebesgue_constants(const LagrangeGrid& grid) {
  constexpr int kSamples = 2001;
  double max_phi = 0.0, max_psi = 0.0;
  auto visit = [&](double tau) {
    max_phi = std::max(max_phi, state_basis_values(grid, tau).cwiseAbs().sum());
    max_psi = std::max(max_psi, test_basis_values(grid, tau).cwiseAbs().sum());
  };
  for (int s = 0; s < kSamples; ++s) visit(static_cast<double>(s) / (kSamples - 1));
  for (Eigen::Index j = 0; j < grid.nodes.size(); ++j) visit(grid.nodes[j]);
  return {max_phi, max_psi};
}

Inertia dbar_inertia(const CgTableau& tableau) {
  constexpr double kZeroTol = 1e-10;
  const Eigen::MatrixXd sym = 0.5 * (tableau.Dbar + tableau.Dbar.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  Inertia inertia;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const double ev = solver.eigenvalues()[i];
    if (ev > kZeroTol)
      ++inertia.n_plus;
    else if (ev < -kZeroTol)
      ++inertia.n_minus;
    else
      ++inertia.n_zero;
  }
  return inertia;
}

}  // namespace cgdae
