#include "capflow/flow.hpp"
#include "capflow/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace capflow {

namespace {

constexpr int n = GeometricState::n;
constexpr int max_rejections = 10;
constexpr int max_newton = 50;
constexpr double newton_tol = 1e-12;

std::string fmt(double x)
{
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

// Largest eigenvalue of a symmetric 2x2 matrix.
double max_eig(double a, double b, double c)
{
  const double h = 0.5 * (a - c);
  return 0.5 * (a + c) + std::sqrt(h * h + b * b);
}

} // namespace

void FlowConfig::validate() const
{
  if (!(theta > 0.0 && theta < M_PI))
    throw std::invalid_argument("flow config: theta must lie in (0, pi)");
  if (theta > M_PI / 2 + 1e-15 && !experimental_theta)
    throw std::invalid_argument("flow config: theta = " + fmt(theta) +
                                " exceeds pi/2; convergence is only established for "
                                "theta in (0, pi/2], pass the experimental theta flag to run it");
  if (l < 1 || l > n)
    throw std::invalid_argument("flow config: l must lie in 1.." + std::to_string(n));
  if (l < n && !experimental_l)
    throw std::invalid_argument("flow config: l < n is experimental and needs the experimental flag");
  if (!(dt_safety > 0.0 && dt_safety < 1.0))
    throw std::invalid_argument("flow config: dt_safety must lie in (0, 1)");
  if (!(stop_speed > 0.0)) throw std::invalid_argument("flow config: stop_speed must be positive");
  if (!(t_max > 0.0)) throw std::invalid_argument("flow config: t_max must be positive");
  if (!(sample_interval > 0.0))
    throw std::invalid_argument("flow config: sample_interval must be positive");
  if (snapshot_every < 0)
    throw std::invalid_argument("flow config: snapshot_every must be >= 0");
  const MonitorBudget& b = budget;
  if (!(b.convexity_margin >= 0.0 && b.volume_drift > 0.0 && b.monotonicity_slack > 0.0 &&
        b.F_margin > 0.0 && b.support_fraction > 0.0 && b.support_fraction < 1.0 &&
        b.barrier_cells > 0.0 && b.H_factor >= 1.0 && b.bc_residual > 0.0))
    throw std::invalid_argument("flow config: monitor budgets must be positive");
}

std::vector<double> FlowTrajectory::times() const
{
  std::vector<double> t;
  t.reserve(samples.size());
  for (const Sample& s : samples) t.push_back(s.t);
  return t;
}

RadialField enforce_boundary(const RadialField& state, BoundaryStats* stats)
{
  const HalfSphereGrid& grid = state.grid;
  const int jb = grid.boundary_row();
  const int nx = grid.n_xi();
  const double h = grid.d_beta();
  const double c = std::cos(state.theta);
  RadialField out = state;
  BoundaryStats local;
  for (int i = 0; i < nx; ++i) {
    double q = 0.0;
    if (nx > 1)
      q = (state.phi(jb, (i + 1) % nx) - state.phi(jb, (i + nx - 1) % nx)) / (2 * grid.d_xi());
    const double inner = state.phi(jb - 1, i);
    double g = state.ghost(i);
    double res = 0.0;
    int it = 0;
    for (;; ++it) {
      const double d = (g - inner) / (2 * h);
      const double root = std::sqrt(1.0 + d * d + q * q);
      res = d - c * root;
      if (std::abs(res) <= newton_tol) break;
      if (it == max_newton)
        throw std::runtime_error("enforce_boundary: Newton did not converge at longitude " +
                                 std::to_string(i) + ", residual " + fmt(res));
      const double slope = (1.0 - c * d / root) / (2 * h);
      g -= res / slope;
    }
    out.ghost(i) = g;
    local.max_iterations = std::max(local.max_iterations, it);
    local.max_residual = std::max(local.max_residual, std::abs(res));
  }
  if (stats) *stats = local;
  return out;
}

Evaluation evaluate(const RadialField& state, int l)
{
  if (l < 1 || l > n) throw std::out_of_range("evaluate: l outside 1.." + std::to_string(n));
  Evaluation ev{geometry_from_phi(state)};
  const GeometricState& g = ev.geometry;
  const int nb = g.grid.n_beta();
  const int nx = g.grid.n_xi();
  const double c = std::cos(g.theta);
  ev.F.resize(nb, nx);
  ev.speed.resize(nb, nx);
  ev.rate.resize(nb, nx);
  ev.lambda = 0.0;
  const ScalarField r = g.phi.exp();

  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < nb; ++j) {
      const double k1 = g.kappa[0](j, i), k2 = g.kappa[1](j, i);
      // Gamma_+^2 is the positive quadrant, Gamma_+^1 the half-plane k1 + k2 > 0.
      if (!(l == 2 ? (k1 > 0 && k2 > 0) : k1 + k2 > 0)) {
        std::ostringstream os;
        os << "curvature (" << k1 << ", " << k2 << ") left Gamma_+^" << l << " at node (" << j
           << ", " << i << ")";
        throw DomainError(os.str());
      }
      // Closed forms of F = H_l / H_{l-1} and dF/dkappa for n = 2.
      double F, g1, g2;
      if (l == 2) {
        const double s = k1 + k2;
        F = 2 * k1 * k2 / s;
        g1 = 2 * k2 * k2 / (s * s);
        g2 = 2 * k1 * k1 / (s * s);
      } else {
        F = 0.5 * (k1 + k2);
        g1 = g2 = 0.5;
      }
      const double obl = 1.0 - c * g.nu_vert(j, i);
      const double f = obl / F - g.support(j, i);
      ev.F(j, i) = F;
      ev.speed(j, i) = f;
      ev.rate(j, i) = g.v(j, i) / r(j, i) * f;

      // dF/dS = g1 I + (g2 - g1) P, P the projector onto the kappa_2 eigenvector.
      const double a = g.shape[0](j, i), b = g.shape[1](j, i), d = g.shape[2](j, i);
      Eigen::Matrix2d M = g1 * Eigen::Matrix2d::Identity();
      if (k2 - k1 > 1e-12 * (std::abs(k1) + std::abs(k2))) {
        Eigen::Matrix2d P;
        P << a - k1, b, b, d - k1;
        M += (g2 - g1) / (k2 - k1) * P;
      }
      const Eigen::Vector2d p(g.grad1(j, i), g.grad2(j, i));
      const double vv = g.v(j, i);
      const Eigen::Matrix2d R = Eigen::Matrix2d::Identity() - p * p.transpose() / (vv * (vv + 1));
      const Eigen::Matrix2d D = obl / (F * F * r(j, i) * r(j, i)) * (R * M * R);
      ev.lambda = std::max(ev.lambda, max_eig(D(0, 0), 0.5 * (D(0, 1) + D(1, 0)), D(1, 1)));
    }
  }
  return ev;
}

ScalarField fitted_radius_field(const RadialField& state)
{
  const HalfSphereGrid& grid = state.grid;
  const ScalarField r = state.phi.exp();
  ScalarField rho(grid.n_beta(), grid.n_xi());
  for (int i = 0; i < grid.n_xi(); ++i)
    for (int j = 0; j < grid.n_beta(); ++j)
      rho(j, i) = fitted_cap_radius(state.theta, r(j, i), r(j, i) * grid.cos_beta()(j));
  return rho;
}

Monitors compute_monitors(const RadialField& state, const Evaluation& eval)
{
  const GeometricState& g = eval.geometry;
  Monitors m;
  m.F_min = eval.F.minCoeff();
  m.F_max = eval.F.maxCoeff();
  m.kappa_min = g.kappa[0].minCoeff();
  m.kappa_max = g.kappa[1].maxCoeff();
  m.H_max = (g.kappa[0] + g.kappa[1]).maxCoeff();
  m.support_min = g.support.minCoeff();
  const ScalarField rho = fitted_radius_field(state);
  m.r_in = rho.minCoeff();
  m.r_out = rho.maxCoeff();
  m.max_speed = eval.rate.abs().maxCoeff();
  m.bc_residual = boundary_condition_residual(state).abs().maxCoeff();
  return m;
}

double stable_dt(const Evaluation& eval, const FlowConfig& config)
{
  const PolarFilter filter(eval.geometry.grid);
  const double h = filter.min_spacing();
  return config.dt_safety * h * h / eval.lambda;
}

namespace {

StepResult step_impl(const RadialField& state, const Evaluation& current, const FlowConfig& config,
                     double dt_limit, const PolarFilter& filter)
{
  ScalarField rate = current.rate;
  filter.apply(rate);
  const double h = filter.min_spacing();
  double dt = std::min(config.dt_safety * h * h / current.lambda, dt_limit);
  for (int rejections = 0;; ++rejections) {
    ScalarField phi = state.phi + dt * rate;
    filter.regularize(phi);
    RadialField next(state.grid, std::move(phi), state.ghost, state.theta);
    next = enforce_boundary(next);
    try {
      Evaluation ev = evaluate(next, config.l);
      Monitors m = compute_monitors(next, ev);
      return {std::move(next), std::move(ev), dt, m, rejections};
    } catch (const DomainError& e) {
      if (rejections == max_rejections)
        throw DomainError(std::string(e.what()) + " after " + std::to_string(max_rejections) +
                          " step halvings");
      dt *= 0.5;
    }
  }
}

} // namespace

StepResult step(const RadialField& state, const Evaluation& current, const FlowConfig& config,
                double dt_limit)
{
  return step_impl(state, current, config, dt_limit, PolarFilter(state.grid));
}

StepResult step(const RadialField& state, const FlowConfig& config)
{
  config.validate();
  return step(state, evaluate(state, config.l), config);
}

namespace {

Sample make_sample(double t, double dt, const RadialField& state, const Evaluation& eval)
{
  Sample s;
  s.t = t;
  s.dt = dt;
  s.quermass = quermass_all(eval.geometry);
  s.monitors = compute_monitors(state, eval);
  for (int k = 1; k <= n; ++k) s.minkowski.push_back(minkowski_residual(eval.geometry, k));
  const ScalarField fw = eval.speed * eval.geometry.area_weight;
  for (int k = 0; k <= n; ++k) s.speed_moments.push_back((eval.geometry.H(k) * fw).sum());
  s.speed_moments.push_back(0.0); // H_{n+1} vanishes identically
  return s;
}

// Watches the a priori estimates against the initial state. Conservation,
// convexity, the cap barriers and the boundary condition are fatal; the other
// budgets are empirical and only recorded, once per estimate.
class Auditor {
public:
  Auditor(const FlowConfig& config, const Sample& first, double d_beta, double limit_H,
          std::vector<MonitorDiagnostic>& warnings)
      : cfg_(config), b_(config.budget), m0_(first.monitors), V0_(first.quermass.V),
        prev_V_(first.quermass.V), d_beta_(d_beta), H_cap_(std::max(m0_.H_max, limit_H)),
        warnings_(warnings)
  {
  }

  std::optional<MonitorDiagnostic> per_step(double t, const Monitors& m)
  {
    if (!(m.kappa_min > b_.convexity_margin))
      return MonitorDiagnostic{"convexity", "kappa_min = " + fmt(m.kappa_min), t};
    const double cell = b_.barrier_cells * d_beta_;
    if (m.r_out > m0_.r_out * (1 + cell) || m.r_in < m0_.r_in * (1 - cell))
      return MonitorDiagnostic{"cap barriers (avoidance principle)",
                               "fitted radii [" + fmt(m.r_in) + ", " + fmt(m.r_out) +
                                   "], initial sandwich [" + fmt(m0_.r_in) + ", " +
                                   fmt(m0_.r_out) + "]",
                               t};
    if (!(m.bc_residual <= b_.bc_residual))
      return MonitorDiagnostic{"capillary boundary condition", "residual " + fmt(m.bc_residual), t};

    if (m.F_max > m0_.F_max + b_.F_margin || m.F_min < m0_.F_min - b_.F_margin)
      warn(t, "F bounds (maximum principle for F)",
           "F in [" + fmt(m.F_min) + ", " + fmt(m.F_max) + "], initial [" + fmt(m0_.F_min) +
               ", " + fmt(m0_.F_max) + "]");
    if (m.support_min < b_.support_fraction * m0_.support_min)
      warn(t, "star-shapedness (support lower bound)",
           "support_min = " + fmt(m.support_min) + ", initial " + fmt(m0_.support_min));
    if (m.H_max > b_.H_factor * H_cap_)
      warn(t, "mean curvature upper bound",
           "H_max = " + fmt(m.H_max) + ", budget " + fmt(b_.H_factor * H_cap_));
    return std::nullopt;
  }

  std::optional<MonitorDiagnostic> per_sample(const Sample& s)
  {
    const std::vector<double>& V = s.quermass.V;
    const int l = cfg_.l;
    const double drift = std::abs(V[l] - V0_[l]) / std::abs(V0_[l]);
    if (drift > b_.volume_drift)
      return MonitorDiagnostic{"conservation of V_" + std::to_string(l),
                               "relative drift " + fmt(drift), s.t};
    for (int k = 0; k < l; ++k) {
      if (V[k] < prev_V_[k] - b_.monotonicity_slack * std::abs(prev_V_[k]))
        warn(s.t, "monotonicity of V_" + std::to_string(k),
             "decrease from " + fmt(prev_V_[k]) + " to " + fmt(V[k]));
    }
    prev_V_ = V;
    return std::nullopt;
  }

private:
  void warn(double t, const std::string& estimate, std::string detail)
  {
    for (const MonitorDiagnostic& w : warnings_)
      if (w.estimate == estimate) return;
    warnings_.push_back({estimate, std::move(detail), t});
  }

  const FlowConfig& cfg_;
  const MonitorBudget& b_;
  Monitors m0_;
  std::vector<double> V0_, prev_V_;
  double d_beta_;
  double H_cap_;
  std::vector<MonitorDiagnostic>& warnings_;
};

double limit_radius(const QuermassVector& q, int l)
{
  const CapConstants cc = cap_constants(q.theta, q.n);
  return std::pow(q.V[l] / cc.b_theta, 1.0 / (q.n + 1 - l));
}

} // namespace

Eigen::ArrayXd cap_drift(int n_beta, const FlowConfig& config)
{
  const HalfSphereGrid g = HalfSphereGrid::axisymmetric(n_beta);
  const PolarFilter filter(g);
  RadialField state = enforce_boundary(cap_phi({1.0, config.theta}, g));
  Evaluation eval = evaluate(state, config.l);
  // the profile relaxes within t ~ 1; compare it over windows of 0.05
  constexpr double window = 0.05, t_end = 5.0;
  Eigen::ArrayXd last = eval.rate.col(0);
  for (double t = 0.0, next = window; t < t_end;) {
    StepResult res = step_impl(state, eval, config, next - t, filter);
    t += res.dt;
    state = std::move(res.state);
    eval = std::move(res.eval);
    if (t < next * (1 - 1e-12)) continue;
    next += window;
    const double change = (eval.rate.col(0) - last).abs().maxCoeff();
    last = eval.rate.col(0);
    if (change <= 1e-3 * last.abs().maxCoeff() + 1e-15) break;
  }
  return last;
}

FlowTrajectory run(const RadialField& initial, const FlowConfig& config)
{
  config.validate();
  if (std::abs(initial.theta - config.theta) > 1e-14)
    throw std::invalid_argument("run: state contact angle differs from the config");

  FlowTrajectory traj;
  traj.config = config;
  const PolarFilter filter(initial.grid);

  ScalarField phi0 = initial.phi;
  filter.regularize(phi0);
  RadialField state = enforce_boundary({initial.grid, std::move(phi0), initial.ghost, initial.theta});
  Evaluation eval = evaluate(state, config.l);
  if (!eval.geometry.is_convex())
    throw DomainError("run: initial state is not strictly convex");

  const Eigen::ArrayXd drift = cap_drift(initial.grid.n_beta(), config);
  traj.cap_drift = drift.abs().maxCoeff();

  double t = 0.0;
  traj.samples.push_back(make_sample(t, 0.0, state, eval));
  traj.snapshots.emplace_back(t, state);
  const double r_limit = limit_radius(traj.samples.front().quermass, config.l);
  Auditor audit(config, traj.samples.front(), initial.grid.d_beta(), 2.0 / r_limit,
                traj.warnings);

  double next_sample = config.sample_interval;
  double last_dt = 0.0;
  std::int64_t sample_count = 1;
  auto finish_abort = [&](MonitorDiagnostic d) {
    traj.termination = Termination::aborted;
    traj.diagnostic = std::move(d);
  };

  if (auto d = audit.per_step(t, traj.samples.front().monitors)) finish_abort(*d);

  while (traj.termination != Termination::aborted) {
    if ((eval.rate.colwise() - drift).abs().maxCoeff() < config.stop_speed) {
      traj.termination = Termination::converged;
      break;
    }
    if (t >= config.t_max * (1 - 1e-14)) {
      traj.termination = Termination::time_limit;
      break;
    }
    const double limit = std::min(next_sample, config.t_max) - t;
    StepResult res = [&]() -> StepResult {
      try {
        return step_impl(state, eval, config, limit, filter);
      } catch (const DomainError& e) {
        finish_abort({"convexity", e.what(), t});
        return {state, eval, 0.0, {}, 0};
      }
    }();
    if (traj.termination == Termination::aborted) break;

    t += res.dt;
    last_dt = res.dt;
    ++traj.steps;
    state = std::move(res.state);
    eval = std::move(res.eval);
    if (auto d = audit.per_step(t, res.monitors)) {
      finish_abort(*d);
      break;
    }
    if (t >= next_sample * (1 - 1e-12)) {
      traj.samples.push_back(make_sample(t, last_dt, state, eval));
      ++sample_count;
      next_sample = config.sample_interval * static_cast<double>(sample_count);
      if (config.snapshot_every > 0 && (sample_count - 1) % config.snapshot_every == 0)
        traj.snapshots.emplace_back(t, state);
      if (auto d = audit.per_sample(traj.samples.back())) {
        finish_abort(*d);
        break;
      }
    }
  }

  if (traj.samples.back().t < t) {
    traj.samples.push_back(make_sample(t, last_dt, state, eval));
    if (traj.termination != Termination::aborted)
      if (auto d = audit.per_sample(traj.samples.back())) finish_abort(*d);
  }
  if (traj.snapshots.back().first < t) traj.snapshots.emplace_back(t, state);

  traj.fitted_radius = limit_radius(traj.samples.back().quermass, config.l);
  const ScalarField rho = fitted_radius_field(state);
  traj.radius_spread = (rho.maxCoeff() - rho.minCoeff()) / rho.mean();
  traj.final_state = std::move(state);
  return traj;
}

std::vector<double> variational_check(const FlowTrajectory& trajectory, int k)
{
  const std::vector<Sample>& s = trajectory.samples;
  if (s.size() < 3) throw std::invalid_argument("variational_check: need at least 3 samples");
  if (k < 0 || k > n + 1)
    throw std::out_of_range("variational_check: k outside 0.." + std::to_string(n + 1));
  const double coef = static_cast<double>(n + 1 - k) / (n + 1);
  std::vector<double> lhs, rhs;
  double scale = 0.0;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    lhs.push_back((s[i + 1].quermass.V[k] - s[i - 1].quermass.V[k]) / (s[i + 1].t - s[i - 1].t));
    rhs.push_back(coef * s[i].speed_moments[k]);
    scale = std::max(scale, std::abs(rhs.back()));
  }
  if (scale == 0.0) scale = std::abs(s.front().quermass.V[k]);
  if (scale == 0.0) scale = 1.0;
  std::vector<double> out;
  out.reserve(lhs.size());
  for (std::size_t i = 0; i < lhs.size(); ++i) out.push_back(std::abs(lhs[i] - rhs[i]) / scale);
  return out;
}

} // namespace capflow
