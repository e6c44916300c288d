#pragma once

#include "capflow/flow.hpp"
#include "capflow/inequalities.hpp"
#include "capflow/io.hpp"
#include "capflow/scenarios.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace capflow {

enum ExitCode : int {
  exit_success = 0,
  exit_violation = 1, // an audited inequality or identity failed
  exit_config = 2,
  exit_monitor = 3,
  exit_hypothesis = 4,
};

enum class ScenarioKind { cap, perturbed_cap };

struct RunConfig {
  ScenarioKind scenario = ScenarioKind::perturbed_cap;
  CapSpec cap;
  PerturbationSpec perturbation;
  int n_beta = 64;
  int n_xi = 128;
  FlowConfig flow;
  std::string out_dir = "capflow_out";
  std::uint64_t seed = 1;
  std::uint64_t hash = 0; // of the canonical config text after overrides

  [[nodiscard]] HalfSphereGrid grid() const { return {n_beta, n_xi}; }
  [[nodiscard]] RadialField initial_state() const;
};

/// Command-line values that take precedence over the config file.
struct Overrides {
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> l;
  bool experimental_theta = false;
};

/// Throws ParseError with the offending line, or std::invalid_argument for values
/// that parse but are out of range.
[[nodiscard]] RunConfig parse_run_config(const std::string& text, const std::string& origin,
                                         const Overrides& overrides = {});

struct SweepConfig {
  RunConfig base;
  std::vector<double> thetas; // radians
  std::vector<double> amplitudes;
  std::vector<int> resolutions; // n_beta per cell
  int xi_per_beta = 2;          // n_xi = xi_per_beta * n_beta, 0 for axisymmetric cells
};

[[nodiscard]] SweepConfig parse_sweep_config(const std::string& text, const std::string& origin,
                                             const Overrides& overrides = {});

/// Outcome of one flow run, as written to summary.txt.
struct RunSummary {
  int exit_code = exit_success;
  std::string failure; // empty on success
  FlowTrajectory trajectory;
  std::optional<InequalityReport> initial_report, final_report;
  double volume_drift = 0; // relative drift of the conserved V_l
};

/// Run one configured flow and write trajectory.csv, snapshots/, report.txt and
/// summary.txt into `out_dir`.
[[nodiscard]] RunSummary execute_run(const RunConfig& config, const std::string& out_dir,
                                     std::ostream& log);

[[nodiscard]] int cmd_run(const std::string& config_path, const Overrides& overrides,
                          std::ostream& out, std::ostream& err);
[[nodiscard]] int cmd_check(const std::string& state_path, std::optional<double> theta,
                            std::ostream& out, std::ostream& err);
[[nodiscard]] int cmd_sweep(const std::string& config_path, const Overrides& overrides,
                            std::ostream& out, std::ostream& err);
/// Table of cap constants for each theta (radians).
[[nodiscard]] int cmd_caps(const std::vector<double>& thetas, std::ostream& out);

/// Column names of sweep_summary.csv.
[[nodiscard]] std::vector<std::string> sweep_columns();

} // namespace capflow
