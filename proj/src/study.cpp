#include "cgdae/study.hpp"

#include "cgdae/benchmarks.hpp"
#include "cgdae/radau.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace cgdae {

namespace {

constexpr long long kReferenceSteps = 2560;

SemiExplicitDae build_problem(const StudyConfig& config) {
  if (config.problem == "circuit") return make_circuit();
  if (config.problem == "heat") {
    HeatConfig heat;
    heat.c1 = config.heat_c1;
    heat.c2 = config.heat_c2;
    return make_heat(heat);
  }
  if (config.problem == "pendulum") return make_pendulum();
  throw std::invalid_argument("run_study: unknown problem '" + config.problem + "'");
}

double max_constraint_violation(const SemiExplicitDae& dae, const Trajectory& trajectory) {
  if (dae.m == 0) return 0.0;
  double worst = 0.0;
  const auto& nodes = trajectory.tableau.grid.nodes;
  for (const IntervalSolution& interval : trajectory.intervals)
    for (int k = 1; k <= trajectory.degree(); ++k) {
      const double tk = interval.t_start + interval.dt * nodes[k];
      worst = std::max(worst, dae.g(interval.coeffs.col(k), tk).cwiseAbs().maxCoeff());
    }
  return worst;
}

std::optional<double> step_order(const std::optional<double>& coarse,
                                 const std::optional<double>& fine, double dt_coarse,
                                 double dt_fine) {
  if (!coarse || !fine) return std::nullopt;
  if (!(*coarse > 0) || !(*fine > 0) || !std::isfinite(*coarse) || !std::isfinite(*fine))
    return std::nullopt;
  return std::log2(*coarse / *fine) / std::log2(dt_coarse / dt_fine);
}

void format_field(std::string& line, const std::optional<double>& value) {
  line.push_back(',');
  if (!value) return;
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.5e", *value);
  line += buffer;
}

}  // namespace

OrderEstimate estimate_orders(const std::vector<std::optional<double>>& errors,
                              const std::vector<double>& dts) {
  if (errors.size() != dts.size())
    throw std::invalid_argument("estimate_orders: mismatched input lengths");

  OrderEstimate estimate;
  estimate.step_orders.assign(errors.size(), std::nullopt);
  for (std::size_t k = 1; k < errors.size(); ++k)
    estimate.step_orders[k] = step_order(errors[k - 1], errors[k], dts[k - 1], dts[k]);

  std::vector<std::pair<double, double>> points;  // (log2 dt, log2 err)
  for (std::size_t k = 0; k < errors.size(); ++k)
    if (errors[k] && *errors[k] > 0 && std::isfinite(*errors[k]))
      points.emplace_back(std::log2(dts[k]), std::log2(*errors[k]));
  if (points.size() < 2) return estimate;
  if (points.size() > 3) points.erase(points.begin(), points.end() - 3);

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : points) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double count = static_cast<double>(points.size());
  estimate.tail = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  return estimate;
}

ConvergenceTable run_study(const StudyConfig& config) {
  if (!(config.dt0 > 0)) throw std::invalid_argument("run_study: dt0 must be positive");
  if (config.levels < 1) throw std::invalid_argument("run_study: need at least one level");

  const SemiExplicitDae dae = build_problem(config);
  const bool has_exact = static_cast<bool>(dae.x_ref);
  const bool is_pendulum = config.problem == "pendulum";
  const double t_final = dae.t_end;
  const double reference_dt = t_final / static_cast<double>(kReferenceSteps);

  std::vector<double> dts(config.levels);
  for (int k = 0; k < config.levels; ++k) dts[k] = config.dt0 * std::pow(2.0, -k);

  ConvergenceTable table;

  for (int degree : config.degrees) {
    Eigen::VectorXd reference_state;
    bool reference_ok = true;
    if (has_exact) {
      reference_state = dae.x_ref(t_final);
    } else {
      try {
        const Trajectory fine = integrate(dae, config.family, degree, reference_dt, config.newton);
        reference_state = fine.intervals.back().coeffs.col(degree);
      } catch (const IntegrationError&) {
        reference_ok = false;
      }
    }

    std::vector<std::optional<double>> state_errors, mult_errors, energy_errors;
    for (double dt : dts) {
      ConvergenceRow row;
      row.problem = config.problem;
      row.r = degree;
      row.family = to_string(config.family);
      row.dt = dt;
      try {
        if (!reference_ok) throw IntegrationError("reference run failed", 0, Trajectory{});
        const Trajectory trajectory = integrate(dae, config.family, degree, dt, config.newton);
        const Eigen::VectorXd final_state = trajectory.intervals.back().coeffs.col(degree);
        row.err_state = (final_state - reference_state).norm();
        if (dae.lambda_ref)
          row.err_mult =
              multiplier_dual_error(trajectory, trajectory.intervals.size() - 1, dae.lambda_ref);
        if (is_pendulum)
          row.err_energy =
              std::abs(pendulum_energy(final_state) - pendulum_energy(dae.x0));
        double iter_sum = 0;
        for (const IntervalSolution& interval : trajectory.intervals) {
          iter_sum += interval.newton.iterations;
          row.newton_iters_max = std::max(row.newton_iters_max, interval.newton.iterations);
        }
        row.newton_iters_mean = iter_sum / static_cast<double>(trajectory.intervals.size());
        row.constraint_max = max_constraint_violation(dae, trajectory);
      } catch (const IntegrationError&) {
        row.failed = true;
      }
      state_errors.push_back(row.err_state);
      mult_errors.push_back(row.err_mult);
      energy_errors.push_back(row.err_energy);
      table.rows.push_back(std::move(row));
    }

    const std::size_t first_row = table.rows.size() - dts.size();
    const OrderEstimate state_orders = estimate_orders(state_errors, dts);
    const OrderEstimate mult_orders = estimate_orders(mult_errors, dts);
    const OrderEstimate energy_orders = estimate_orders(energy_errors, dts);
    for (std::size_t k = 0; k < dts.size(); ++k) {
      table.rows[first_row + k].order_state = state_orders.step_orders[k];
      table.rows[first_row + k].order_mult = mult_orders.step_orders[k];
    }
    MethodTails tails;
    tails.state = state_orders.tail;
    tails.mult = mult_orders.tail;
    tails.energy = energy_orders.tail;
    table.tails["cg-" + std::to_string(degree)] = tails;
  }

  for (const std::string& baseline : config.baselines) {
    int stages = 0;
    if (baseline == "radau2")
      stages = 2;
    else if (baseline == "radau3")
      stages = 3;
    else
      throw std::invalid_argument("run_study: unknown baseline '" + baseline + "'");

    Eigen::VectorXd reference_state;
    bool reference_ok = true;
    if (has_exact) {
      reference_state = dae.x_ref(t_final);
    } else {
      try {
        reference_state = radau_integrate(dae, stages, reference_dt, config.newton).x_final;
      } catch (const std::exception&) {
        reference_ok = false;
      }
    }

    std::vector<std::optional<double>> state_errors;
    for (double dt : dts) {
      ConvergenceRow row;
      row.problem = config.problem;
      row.r = stages;
      row.family = baseline;
      row.dt = dt;
      if (reference_ok) {
        try {
          const RadauRun run = radau_integrate(dae, stages, dt, config.newton);
          row.err_state = (run.x_final - reference_state).norm();
          row.newton_iters_mean = run.newton_iters_mean;
          row.newton_iters_max = run.newton_iters_max;
          row.constraint_max = run.constraint_max;
        } catch (const std::exception&) {
          row.failed = true;
        }
      } else {
        row.failed = true;
      }
      state_errors.push_back(row.err_state);
      table.rows.push_back(std::move(row));
    }

    const std::size_t first_row = table.rows.size() - dts.size();
    const OrderEstimate state_orders = estimate_orders(state_errors, dts);
    for (std::size_t k = 0; k < dts.size(); ++k)
      table.rows[first_row + k].order_state = state_orders.step_orders[k];
    MethodTails tails;
    tails.state = state_orders.tail;
    table.tails[baseline] = tails;
  }

  return table;
}

void write_csv(const ConvergenceTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_csv: cannot open '" + path + "' for writing");

  out << "problem,r,family,dt,err_state,err_mult,err_energy,newton_iters_mean,order_state,"
         "order_mult\n";
  for (const ConvergenceRow& row : table.rows) {
    std::string line = row.problem;
    line += ',';
    line += std::to_string(row.r);
    line += ',';
    line += row.family;
    format_field(line, row.dt);
    if (row.failed) {
      line += ",FAILED,,,,,";
    } else {
      format_field(line, row.err_state);
      format_field(line, row.err_mult);
      format_field(line, row.err_energy);
      format_field(line, row.newton_iters_mean);
      format_field(line, row.order_state);
      format_field(line, row.order_mult);
    }
    out << line << '\n';
  }
  if (!out) throw std::runtime_error("write_csv: failed writing '" + path + "'");
}

NewtonSettings newton_settings_from_env() {
  NewtonSettings settings;
  if (const char* tol = std::getenv("CGDAE_NEWTON_TOL")) {
    char* end = nullptr;
    const double value = std::strtod(tol, &end);
    if (end == tol || !(value > 0))
      throw std::invalid_argument("CGDAE_NEWTON_TOL must be a positive number");
    settings.tol_residual = value;
  }
  return settings;
}

}  // namespace cgdae
