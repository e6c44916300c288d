#include "capflow/inequalities.hpp"
#include "capflow/scenarios.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace capflow {

const char* to_string(Verdict v)
{
  switch (v) {
  case Verdict::holds: return "holds";
  case Verdict::equality_within_tol: return "equality-within-tol";
  case Verdict::violated: return "violated";
  case Verdict::hypothesis_unmet: return "hypothesis-unmet";
  }
  return "?";
}

Verdict classify(double gap, double tol)
{
  if (!std::isfinite(gap)) return Verdict::violated;
  if (gap < -tol) return Verdict::violated;
  if (gap <= tol) return Verdict::equality_within_tol;
  return Verdict::holds;
}

namespace {

InequalityEntry make_entry(std::string name, double lhs, double rhs, double tol, std::string ref)
{
  InequalityEntry e;
  e.name = std::move(name);
  e.lhs = lhs;
  e.rhs = rhs;
  e.gap = (lhs - rhs) / std::abs(rhs);
  e.tolerance = tol;
  e.verdict = classify(e.gap, tol);
  e.reference = std::move(ref);
  return e;
}

InequalityEntry make_identity(std::string name, double lhs, double rhs, double tol, std::string ref)
{
  InequalityEntry e = make_entry(std::move(name), lhs, rhs, tol, std::move(ref));
  e.identity = true;
  e.verdict = std::abs(e.gap) <= tol ? Verdict::equality_within_tol : Verdict::violated;
  return e;
}

std::string num(double x)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

} // namespace

InequalityEntry check_af(const QuermassVector& qv, const CapConstants& cc, int k, double tol)
{
  const int n = qv.n;
  if (k < 0 || k >= n) throw std::out_of_range("check_af: k must lie in 0.." + std::to_string(n - 1));
  const double lhs = qv.V[n] / cc.b_theta;
  const double rhs = std::pow(qv.V[k] / cc.b_theta, 1.0 / (n + 1 - k));
  return make_entry("af_k" + std::to_string(k), lhs, rhs, tol,
                    "Alexandrov-Fenchel, V_" + std::to_string(n) + " against V_" +
                        std::to_string(k));
}

InequalityEntry check_minkowski_2d(const QuermassVector& qv, const CapConstants& cc, double tol)
{
  if (qv.n != 2) throw std::invalid_argument("check_minkowski_2d: needs n = 2");
  const double c = std::cos(qv.theta), s = std::sin(qv.theta);
  const double omega = 3 * cc.b_theta;
  const double lhs = 2 * qv.raw.int_H[1]; // H = 2 H_1
  const double rhs = 2 * std::sqrt(omega) * std::sqrt(qv.raw.area - c * qv.raw.wetted_area) +
                     s * c * qv.raw.boundary_length;
  return make_entry("minkowski_2d", lhs, rhs, tol, "Minkowski inequality for capillary surfaces");
}

InequalityEntry check_willmore_2d(const GeometricState& state, const CapConstants& cc, double tol)
{
  if (cc.n != 2) throw std::invalid_argument("check_willmore_2d: needs n = 2");
  const ScalarField H = state.kappa[0] + state.kappa[1];
  const double lhs = (H.square() * state.area_weight).sum();
  const double rhs = 4 * cc.cap_area;
  return make_entry("willmore_2d", lhs, rhs, tol, "Willmore inequality for capillary surfaces");
}

namespace {

std::vector<InequalityEntry> audit_entries(const GeometricState& geo, const QuermassVector& qv,
                                           const CapConstants& cc, double tol)
{
  constexpr int n = GeometricState::n;
  std::vector<InequalityEntry> entries;
  for (int k = 0; k < n; ++k) entries.push_back(check_af(qv, cc, k, tol));
  // The chain V_l against V_k for l < n.
  for (int l = 1; l < n; ++l)
    for (int k = 0; k < l; ++k) {
      const double lhs = std::pow(qv.V[l] / cc.b_theta, 1.0 / (n + 1 - l));
      const double rhs = std::pow(qv.V[k] / cc.b_theta, 1.0 / (n + 1 - k));
      InequalityEntry e = make_entry("af_chain_l" + std::to_string(l) + "_k" + std::to_string(k),
                                     lhs, rhs, tol, "Alexandrov-Fenchel chain below V_n");
      e.conjectural = true;
      entries.push_back(std::move(e));
    }
  entries.push_back(check_minkowski_2d(qv, cc, tol));
  entries.push_back(check_willmore_2d(geo, cc, tol));
  entries.push_back(make_identity("gauss_bonnet", qv.raw.int_H[n], cc.cap_area, tol,
                                  "int H_n dA equals the unit cap area"));
  const ScalarField obl = 1.0 - std::cos(geo.theta) * geo.nu_vert;
  for (int k = 1; k <= n; ++k) {
    const double lhs = (geo.H(k - 1) * obl * geo.area_weight).sum();
    const double rhs = (geo.H(k) * geo.support * geo.area_weight).sum();
    entries.push_back(make_identity("minkowski_formula_k" + std::to_string(k), lhs, rhs, tol,
                                    "Minkowski formula for capillary hypersurfaces"));
  }
  return entries;
}

} // namespace

double static_discretization_error(const HalfSphereGrid& grid, double theta)
{
  const GeometricState cap = geometry_from_phi(cap_phi({1.0, theta}, grid));
  double err = capillary_speed(cap).abs().maxCoeff();
  for (const InequalityEntry& e :
       audit_entries(cap, quermass_all(cap), cap_constants(theta, GeometricState::n), 0.0))
    err = std::max(err, std::abs(e.gap));
  return err;
}

const InequalityEntry& InequalityReport::at(const std::string& name) const
{
  for (const InequalityEntry& e : entries)
    if (e.name == name) return e;
  throw std::out_of_range("InequalityReport: no entry named " + name);
}

InequalityReport full_report(const RadialField& state, const ReportOptions& options)
{
  constexpr int n = GeometricState::n;
  const GeometricState geo = geometry_from_phi(state);
  const CapConstants cc = cap_constants(state.theta, n);
  const QuermassVector qv = quermass_all(geo);

  InequalityReport rep;
  rep.theta = state.theta;
  rep.n_beta = state.grid.n_beta();
  rep.n_xi = state.grid.n_xi();
  rep.convex = geo.is_convex();
  rep.bc_residual = boundary_condition_residual(state).abs().maxCoeff();
  rep.equality_tol = options.equality_tol > 0
                         ? options.equality_tol
                         : std::max(1e-3, 10 * static_discretization_error(state.grid, state.theta));
  const double tol = rep.equality_tol;
  rep.hypothesis_met =
      rep.convex && rep.bc_residual <= (options.bc_tol > 0 ? options.bc_tol : tol);

  rep.entries = audit_entries(geo, qv, cc, tol);

  if (!rep.hypothesis_met)
    for (InequalityEntry& e : rep.entries) e.verdict = Verdict::hypothesis_unmet;
  return rep;
}

std::string InequalityReport::serialize() const
{
  std::ostringstream os;
  os << "capflow inequality report\n";
  os << "theta: " << num(theta) << "\n";
  os << "grid: " << n_beta << " x " << n_xi << "\n";
  os << "convex: " << (convex ? "yes" : "no") << "\n";
  os << "boundary condition residual: " << num(bc_residual) << "\n";
  os << "hypothesis: " << (hypothesis_met ? "met" : "unmet") << "\n";
  os << "equality tolerance: " << num(equality_tol) << "\n\n";
  for (const InequalityEntry& e : entries) {
    char line[160];
    std::snprintf(line, sizeof line, "%-24s %-20s gap %+.6e  (%s%s)\n", e.name.c_str(),
                  to_string(e.verdict), e.gap, e.reference.c_str(),
                  e.conjectural ? ", conjectural" : "");
    os << line;
  }
  os << "\n[values]\n";
  os << "theta = " << num(theta) << "\n";
  os << "n_beta = " << n_beta << "\n";
  os << "n_xi = " << n_xi << "\n";
  os << "convex = " << (convex ? 1 : 0) << "\n";
  os << "bc_residual = " << num(bc_residual) << "\n";
  os << "hypothesis_met = " << (hypothesis_met ? 1 : 0) << "\n";
  os << "equality_tol = " << num(equality_tol) << "\n";
  for (const InequalityEntry& e : entries) {
    os << e.name << ".lhs = " << num(e.lhs) << "\n";
    os << e.name << ".rhs = " << num(e.rhs) << "\n";
    os << e.name << ".gap = " << num(e.gap) << "\n";
    os << e.name << ".tolerance = " << num(e.tolerance) << "\n";
    os << e.name << ".verdict = " << to_string(e.verdict) << "\n";
  }
  return os.str();
}

} // namespace capflow
