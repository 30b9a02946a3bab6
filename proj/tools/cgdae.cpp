#include "cgdae/study.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

int main(int argc, char** argv) {
  CLI::App app{"Continuous-Galerkin time integrators for semi-explicit DAEs"};
  app.require_subcommand(1);

  cgdae::StudyConfig config;
  std::string problem = "circuit";
  std::string family = "equispaced";

  CLI::App* study = app.add_subcommand("study", "Run a convergence study and write a CSV table");
  study->add_option("--problem", problem, "Benchmark problem")
      ->check(CLI::IsMember({"circuit", "heat", "pendulum"}))
      ->required();
  study->add_option("--degrees", config.degrees, "Polynomial degrees, e.g. 1,2,3")
      ->delimiter(',')
      ->capture_default_str();
  study->add_option("--dt0", config.dt0, "Coarsest step size")->capture_default_str();
  study->add_option("--levels", config.levels, "Number of step-size halvings")
      ->capture_default_str();
  study->add_option("--family", family, "Interpolation point family")
      ->check(CLI::IsMember({"equispaced", "gauss-lobatto", "chebyshev-lobatto"}))
      ->capture_default_str();
  study->add_option("--c1", config.heat_c1, "Heat exponent, left subdomain")
      ->capture_default_str();
  study->add_option("--c2", config.heat_c2, "Heat exponent, right subdomain")
      ->capture_default_str();
  study->add_option("--baseline", config.baselines, "Baseline methods: radau2,radau3")
      ->delimiter(',');
  study->add_option("--out", config.out_path, "Output CSV path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    config.problem = problem;
    config.family = cgdae::parse_point_family(family);
    config.newton = cgdae::newton_settings_from_env();

    const cgdae::ConvergenceTable table = cgdae::run_study(config);
    cgdae::write_csv(table, config.out_path);

    int failures = 0;
    for (const auto& row : table.rows) failures += row.failed ? 1 : 0;
    std::printf("wrote %zu rows to %s (%d failed)\n", table.rows.size(), config.out_path.c_str(),
                failures);
    return failures == 0 ? 0 : 2;
  } catch (const std::exception& err) {
    std::fprintf(stderr, "cgdae: %s\n", err.what());
    return 1;
  }
}
