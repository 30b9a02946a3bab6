#pragma once

#include <Eigen/Dense>

#include <string_view>
#include <utility>

namespace cgdae {

/// Supported interpolation point families on the reference interval [0, 1].
enum class PointFamily { Equispaced, GaussLobatto, ChebyshevLobatto, Custom };

const char* to_string(PointFamily family);
PointFamily parse_point_family(std::string_view name);

/// Interpolation nodes 0 = tau_0 < ... < tau_r on [0, 1] of a single time
/// interval, together with precomputed barycentric weights for the state
/// basis (all r+1 nodes) and the test basis (nodes tau_1..tau_r).
///
/// The named families always include both endpoints, so tau_r = 1. Grids
/// built from raw nodes (family Custom) may end before 1; they exist for
/// node-placement experiments, not for time stepping.
struct LagrangeGrid {
  int r = 0;
  PointFamily family = PointFamily::Equispaced;
  Eigen::VectorXd nodes;
  Eigen::VectorXd state_weights;
  Eigen::VectorXd test_weights;
};

/// Build the grid of a named family. Degrees 1..8 are supported; equispaced
/// nodes beyond that are numerically useless and rejected.
LagrangeGrid make_grid(PointFamily family, int r);

/// Build a grid from caller-supplied nodes. Requires nodes strictly
/// increasing with nodes[0] == 0 and nodes inside [0, 1].
LagrangeGrid make_grid(Eigen::VectorXd nodes);

struct BasisValue {
  double value = 0;
  double derivative = 0;
};

/// Value and derivative of the degree-r cardinal polynomial phi_j, which
/// satisfies phi_j(tau_k) = delta_jk. Evaluation uses the barycentric form;
/// tau may lie outside [0, 1] (the time stepper extrapolates predictors).
BasisValue eval_state_basis(const LagrangeGrid& grid, int j, double tau);

/// Degree-(r-1) cardinal polynomial psi_i on the nodes tau_1..tau_r,
/// psi_i(tau_k) = delta_ik for i, k = 1..r.
double eval_test_basis(const LagrangeGrid& grid, int i, double tau);

/// All phi_j(tau), j = 0..r, as one vector (and analogously below).
Eigen::VectorXd state_basis_values(const LagrangeGrid& grid, double tau);
Eigen::VectorXd state_basis_derivatives(const LagrangeGrid& grid, double tau);
Eigen::VectorXd test_basis_values(const LagrangeGrid& grid, double tau);

/// Coupling matrices of one interval on the reference scale,
///
///   D_ij    = integral of phi_j' * psi_i,   i = 1..r, j = 0..r,
///   Mhat_ij = integral of phi_j  * psi_i,
///
/// so that the physical mass matrix of an interval of length dt is
/// dt * Mhat while D does not depend on dt. D1/Dbar (and M1hat/Mbarhat)
/// split off the column belonging to the known coefficient x_0; Dbar is
/// the square block acting on the unknowns and is always invertible.
struct CgTableau {
  LagrangeGrid grid;
  Eigen::MatrixXd D;
  Eigen::MatrixXd Mhat;
  Eigen::VectorXd D1;
  Eigen::MatrixXd Dbar;
  Eigen::VectorXd M1hat;
  Eigen::MatrixXd Mbarhat;
  double lebesgue_phi = 0;
  double lebesgue_psi = 0;

  int degree() const { return grid.r; }
};

/// Assemble D and Mhat by Gauss-Legendre quadrature with r + 1 points,
/// which integrates the degree <= 2r - 1 integrands exactly.
CgTableau assemble_tableau(const LagrangeGrid& grid);

/// Max over [0, 1] of sum_j |phi_j| and sum_i |psi_i|, by dense sampling
/// (2001 points plus the nodes). Affine invariance makes the reference
/// value equal the physical-interval value.
std::pair<double, double> lebesgue_constants(const LagrangeGrid& grid);

/// Eigenvalue sign counts of the symmetric part (Dbar + Dbar^T)/2, with
/// magnitudes below 1e-10 counted as zero.
struct Inertia {
  int n_plus = 0;
  int n_minus = 0;
  int n_zero = 0;
};

Inertia dbar_inertia(const CgTableau& tableau);

}  // namespace cgdae
