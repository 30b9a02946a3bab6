#pragma once

#include "cgdae/cg_stepper.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cgdae {

/// Convergence-study configuration: one problem, a set of polynomial
/// degrees, and a ladder of step sizes dt0 * 2^-k, k = 0..levels-1.
struct StudyConfig {
  std::string problem = "circuit";  // circuit | heat | pendulum
  std::vector<int> degrees = {1, 2, 3};
  double dt0 = 0.05;
  int levels = 7;
  PointFamily family = PointFamily::Equispaced;
  double heat_c1 = 1.0;
  double heat_c2 = 1.0;
  std::vector<std::string> baselines;  // subset of {radau2, radau3}
  std::string out_path;
  NewtonSettings newton{};
};

/// One study run. err_state is |x_ref(T) - X(T)|_2, err_mult the
/// indicator-pairing error on the final subinterval (only where a reference
/// multiplier exists), err_energy the pendulum energy drift at T. Orders are
/// log2 ratios against the previous row of the same method. Rows whose
/// Newton iteration failed are kept and marked.
struct ConvergenceRow {
  std::string problem;
  int r = 0;
  std::string family;
  double dt = 0;
  std::optional<double> err_state;
  std::optional<double> err_mult;
  std::optional<double> err_energy;
  std::optional<double> newton_iters_mean;
  std::optional<double> order_state;
  std::optional<double> order_mult;
  bool failed = false;

  // Diagnostics kept out of the CSV.
  int newton_iters_max = 0;
  double constraint_max = 0;
};

struct MethodTails {
  std::optional<double> state;
  std::optional<double> mult;
  std::optional<double> energy;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  // Least-squares tail orders keyed by "cg-<r>" or the baseline name.
  std::map<std::string, MethodTails> tails;
};

/// Step orders of an error ladder plus a least-squares tail slope over the
/// last (up to) three defined entries. Zero, non-finite, or missing errors
/// yield blank orders.
struct OrderEstimate {
  std::vector<std::optional<double>> step_orders;
  std::optional<double> tail;
};

OrderEstimate estimate_orders(const std::vector<std::optional<double>>& errors,
                              const std::vector<double>& dts);

/// Run the full (degree x step-size) grid, plus requested baselines; rows
/// come out ordered by (method, r, dt descending) independent of execution
/// order. References: the circuit uses its exact solution, heat and
/// pendulum self-converge against a fine solution at dt = t_end / 2560 of
/// the same method, degree, and family.
ConvergenceTable run_study(const StudyConfig& config);

/// CSV with the fixed header
///   problem,r,family,dt,err_state,err_mult,err_energy,newton_iters_mean,order_state,order_mult
/// in 6-significant-digit scientific notation, LF line endings, blank fields
/// for undefined values, FAILED in err_state for non-converged rows.
void write_csv(const ConvergenceTable& table, const std::string& path);

/// Default Newton settings with CGDAE_NEWTON_TOL applied when set.
NewtonSettings newton_settings_from_env();

}  // namespace cgdae
