#pragma once

#include "capflow/quermass.hpp"
#include "capflow/surface.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace capflow {

/// Empirical budgets for the a priori estimates watched during a run.
struct MonitorBudget {
  double convexity_margin = 0.0;     // kappa_min must stay above this
  double volume_drift = 1e-3;        // relative drift of the conserved V_l
  double monotonicity_slack = 1e-6;  // relative, per sample
  double F_margin = 1e-3;            // absolute, around the initial [min F, max F]
  double support_fraction = 0.5;     // support_min >= fraction * initial
  double barrier_cells = 1.0;        // allowed escape from the initial cap sandwich, in cells
  double H_factor = 1.1;             // H_max <= factor * max(H_max(0), H of the limit cap)
  double bc_residual = 1e-10;
};

struct FlowConfig {
  double theta = M_PI / 3;
  int l = GeometricState::n;
  double dt_safety = 0.2;
  double t_max = 20.0;
  double stop_speed = 1e-4;
  double sample_interval = 0.02;
  int snapshot_every = 0; // samples between stored snapshots, 0 keeps only the ends
  bool experimental_theta = false;
  bool experimental_l = false;
  MonitorBudget budget;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct Monitors {
  double F_min = 0, F_max = 0;
  double kappa_min = 0, kappa_max = 0;
  double H_max = 0;
  double support_min = 0;
  double r_in = 0, r_out = 0; // extreme fitted cap radii over the nodes
  double max_speed = 0;       // max |d phi / dt|
  double bc_residual = 0;
};

struct Sample {
  double t = 0;
  double dt = 0;
  QuermassVector quermass;
  Monitors monitors;
  std::vector<double> minkowski;     // k = 1..n
  std::vector<double> speed_moments; // int f H_k dA, k = 0..n+1
};

enum class Termination { converged, time_limit, aborted };

struct MonitorDiagnostic {
  std::string estimate; // short name of the violated estimate
  std::string detail;
  double t = 0;
};

struct FlowTrajectory {
  FlowConfig config;
  std::vector<Sample> samples;
  std::vector<std::pair<double, RadialField>> snapshots;
  Termination termination = Termination::time_limit;
  std::optional<MonitorDiagnostic> diagnostic; // why an aborted run stopped
  std::vector<MonitorDiagnostic> warnings;     // empirical budgets exceeded, first time each
  std::optional<RadialField> final_state;
  std::int64_t steps = 0;
  double fitted_radius = 0; // limit cap radius from the conserved quantity
  double radius_spread = 0; // (max - min) / mean of the final fitted radius field
  double cap_drift = 0;     // max |d phi / dt| of a cap on the same latitude rows

  [[nodiscard]] std::vector<double> times() const;
};

/// Newton statistics per boundary enforcement.
struct BoundaryStats {
  int max_iterations = 0;
  double max_residual = 0;
};

/// Set the ghost row so that the centred normal derivative at the equator satisfies
/// d_beta phi = cos(theta) sqrt(1 + |grad phi|^2), node by node.
[[nodiscard]] RadialField enforce_boundary(const RadialField& state, BoundaryStats* stats = nullptr);

/// Geometry, speed and stability data of one state.
struct Evaluation {
  GeometricState geometry;
  ScalarField F;
  ScalarField speed; // normal speed f
  ScalarField rate;  // d phi / dt = (v / e^phi) f
  double lambda = 0; // largest eigenvalue of the effective diffusion
};

/// Throws DomainError when the curvature leaves Gamma_+^l.
[[nodiscard]] Evaluation evaluate(const RadialField& state, int l);

[[nodiscard]] Monitors compute_monitors(const RadialField& state, const Evaluation& eval);

/// Stable explicit step size dt_safety * h_min^2 / lambda.
[[nodiscard]] double stable_dt(const Evaluation& eval, const FlowConfig& config);

struct StepResult {
  RadialField state;
  Evaluation eval;
  double dt;
  Monitors monitors;
  int rejections;
};

/// One explicit Euler step of at most `dt_limit`; the increment is polar-filtered
/// and the boundary re-enforced. Rejected steps halve dt up to 10 times.
[[nodiscard]] StepResult step(const RadialField& state, const Evaluation& current,
                              const FlowConfig& config,
                              double dt_limit = std::numeric_limits<double>::infinity());
[[nodiscard]] StepResult step(const RadialField& state, const FlowConfig& config);

/// Rate d phi / dt per latitude row that a cap settles to under the discrete flow.
/// Caps form a stationary family in the continuum; on the grid they dilate
/// uniformly at O(h^2). Computed on the axisymmetric grid with `n_beta` rows.
[[nodiscard]] Eigen::ArrayXd cap_drift(int n_beta, const FlowConfig& config);

/// Step until max |d phi / dt - cap_drift| < stop_speed or t_max. Loss of convexity, escape from
/// the cap barriers, drift of the conserved quantity or a broken boundary condition
/// end the run with termination == aborted and a diagnostic; the partial trajectory
/// is kept.
[[nodiscard]] FlowTrajectory run(const RadialField& initial, const FlowConfig& config);

/// |dV_k/dt - ((n+1-k)/(n+1)) int f H_k dA| at interior samples, by central
/// differences in time, divided by max |rhs| over the run (by |V_k| per unit
/// time when the right side vanishes identically).
[[nodiscard]] std::vector<double> variational_check(const FlowTrajectory& trajectory, int k);

/// Fitted cap radius at every node.
[[nodiscard]] ScalarField fitted_radius_field(const RadialField& state);

} // namespace capflow
