#pragma once

#include "capflow/quermass.hpp"
#include "capflow/surface.hpp"

#include <string>
#include <vector>

namespace capflow {

enum class Verdict { holds, equality_within_tol, violated, hypothesis_unmet };

[[nodiscard]] const char* to_string(Verdict v);

/// One audited inequality lhs >= rhs, or one identity lhs == rhs.
struct InequalityEntry {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double gap = 0.0; // (lhs - rhs) / |rhs|
  Verdict verdict = Verdict::hypothesis_unmet;
  double tolerance = 0.0;
  std::string reference; // which statement is audited
  bool identity = false; // two-sided: only equality counts as a pass
  bool conjectural = false;
};

struct InequalityReport {
  double theta = 0.0;
  int n_beta = 0, n_xi = 0;
  bool convex = false;
  double bc_residual = 0.0;
  bool hypothesis_met = false;
  double equality_tol = 0.0;
  std::vector<InequalityEntry> entries;

  [[nodiscard]] const InequalityEntry& at(const std::string& name) const;
  /// Plain text followed by a flat `key = value` section.
  [[nodiscard]] std::string serialize() const;
};

/// Verdict for an inequality with normalized gap `gap`.
[[nodiscard]] Verdict classify(double gap, double tol);

/// V_n / b >= (V_k / b)^{1/(n+1-k)}, 0 <= k < n.
[[nodiscard]] InequalityEntry check_af(const QuermassVector& qv, const CapConstants& cc, int k,
                                       double tol);

/// int H dA >= 2 sqrt(omega_theta) (|Sigma| - cos(theta) |wetted|)^{1/2}
///             + sin(theta) cos(theta) |d Sigma|, with H = kappa_1 + kappa_2.
[[nodiscard]] InequalityEntry check_minkowski_2d(const QuermassVector& qv, const CapConstants& cc,
                                                 double tol);

/// int H^2 dA >= 4 |S^2_theta|.
[[nodiscard]] InequalityEntry check_willmore_2d(const GeometricState& state,
                                                const CapConstants& cc, double tol);

/// Residual of the unit cap at the same grid and angle: the larger of max |capillary
/// speed| and the largest |gap| of the audited quantities, all of which vanish on caps.
[[nodiscard]] double static_discretization_error(const HalfSphereGrid& grid, double theta);

struct ReportOptions {
  double equality_tol = 0.0; // 0 selects max(1e-3, 10 * static discretization error)
  double bc_tol = 0.0;       // 0 uses the equality tolerance
};

/// All inequalities, the Gauss-Bonnet identity and the Minkowski formulas on one state.
/// States that are not strictly convex or violate the boundary condition get no verdicts.
[[nodiscard]] InequalityReport full_report(const RadialField& state,
                                           const ReportOptions& options = {});

} // namespace capflow
