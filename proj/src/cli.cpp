#include "capflow/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <ostream>
#include <stdexcept>

namespace capflow {

namespace fs = std::filesystem;

namespace {

const std::vector<std::string> run_keys{
    "seed",
    "scenario.kind",
    "scenario.radius",
    "scenario.amplitude",
    "scenario.xi_mode",
    "scenario.beta_profile",
    "scenario.mixture_modes",
    "grid.n_beta",
    "grid.n_xi",
    "flow.theta",
    "flow.theta_deg",
    "flow.l",
    "flow.dt_safety",
    "flow.t_max",
    "flow.stop_speed",
    "flow.sample_interval",
    "flow.experimental_theta",
    "flow.experimental_l",
    "monitors.convexity_margin",
    "monitors.volume_drift",
    "monitors.monotonicity_slack",
    "monitors.F_margin",
    "monitors.support_fraction",
    "monitors.barrier_cells",
    "monitors.H_factor",
    "monitors.bc_residual",
    "output.dir",
    "output.snapshot_every",
};

const std::vector<std::string> sweep_keys{"sweep.theta", "sweep.theta_deg", "sweep.amplitudes",
                                          "sweep.resolutions", "sweep.xi_per_beta"};

KeyValueDocument apply_overrides(KeyValueDocument doc, const Overrides& o)
{
  if (o.out_dir) doc.set("output.dir", *o.out_dir);
  if (o.seed) doc.set("seed", std::to_string(*o.seed));
  if (o.l) {
    doc.set("flow.l", std::to_string(*o.l));
    if (*o.l < GeometricState::n) doc.set("flow.experimental_l", "true");
  }
  if (o.experimental_theta) doc.set("flow.experimental_theta", "true");
  return doc;
}

// The output directory does not enter the hash, so the same run written to two
// places produces identical files.
std::uint64_t config_hash(KeyValueDocument doc)
{
  doc.set("output.dir", "");
  return fnv1a(doc.canonical());
}

double theta_from(const KeyValueDocument& doc, const std::string& rad, const std::string& deg,
                  double fallback)
{
  if (doc.has(rad) && doc.has(deg))
    throw std::invalid_argument("config: set only one of " + rad + " and " + deg);
  if (doc.has(deg)) return doc.get_double(deg, 0.0) * M_PI / 180.0;
  return doc.get_double(rad, fallback);
}

RunConfig build_run_config(const KeyValueDocument& doc)
{
  RunConfig c;
  const std::string kind = doc.get_string("scenario.kind", "perturbed_cap");
  if (kind == "cap")
    c.scenario = ScenarioKind::cap;
  else if (kind == "perturbed_cap")
    c.scenario = ScenarioKind::perturbed_cap;
  else
    throw std::invalid_argument("config: scenario.kind must be cap or perturbed_cap, got '" + kind +
                                "'");
  c.seed = static_cast<std::uint64_t>(doc.get_int("seed", 1));
  c.cap.r = doc.get_double("scenario.radius", 1.0);
  PerturbationSpec& p = c.perturbation;
  p.amplitude = doc.get_double("scenario.amplitude", p.amplitude);
  p.xi_mode = static_cast<int>(doc.get_int("scenario.xi_mode", p.xi_mode));
  p.beta_profile = static_cast<int>(doc.get_int("scenario.beta_profile", p.beta_profile));
  p.mixture_modes = static_cast<int>(doc.get_int("scenario.mixture_modes", p.mixture_modes));
  p.seed = c.seed;

  c.n_beta = static_cast<int>(doc.get_int("grid.n_beta", c.n_beta));
  c.n_xi = static_cast<int>(doc.get_int("grid.n_xi", c.n_xi));

  FlowConfig& f = c.flow;
  f.theta = theta_from(doc, "flow.theta", "flow.theta_deg", f.theta);
  f.l = static_cast<int>(doc.get_int("flow.l", f.l));
  f.dt_safety = doc.get_double("flow.dt_safety", f.dt_safety);
  f.t_max = doc.get_double("flow.t_max", f.t_max);
  f.stop_speed = doc.get_double("flow.stop_speed", f.stop_speed);
  f.sample_interval = doc.get_double("flow.sample_interval", f.sample_interval);
  f.experimental_theta = doc.get_bool("flow.experimental_theta", false);
  f.experimental_l = doc.get_bool("flow.experimental_l", false);
  MonitorBudget& b = f.budget;
  b.convexity_margin = doc.get_double("monitors.convexity_margin", b.convexity_margin);
  b.volume_drift = doc.get_double("monitors.volume_drift", b.volume_drift);
  b.monotonicity_slack = doc.get_double("monitors.monotonicity_slack", b.monotonicity_slack);
  b.F_margin = doc.get_double("monitors.F_margin", b.F_margin);
  b.support_fraction = doc.get_double("monitors.support_fraction", b.support_fraction);
  b.barrier_cells = doc.get_double("monitors.barrier_cells", b.barrier_cells);
  b.H_factor = doc.get_double("monitors.H_factor", b.H_factor);
  b.bc_residual = doc.get_double("monitors.bc_residual", b.bc_residual);
  c.out_dir = doc.get_string("output.dir", c.out_dir);
  f.snapshot_every = static_cast<int>(doc.get_int("output.snapshot_every", 0));
  c.cap.theta = f.theta;

  f.validate();
  (void)HalfSphereGrid(c.n_beta, c.n_xi);
  if (!(c.cap.r > 0)) throw std::invalid_argument("config: scenario.radius must be positive");
  if (c.out_dir.empty()) throw std::invalid_argument("config: output.dir is empty");
  c.hash = config_hash(doc);
  return c;
}

std::string termination_name(Termination t)
{
  switch (t) {
  case Termination::converged: return "converged";
  case Termination::time_limit: return "time_limit";
  case Termination::aborted: return "aborted";
  }
  return "?";
}

bool any_violation(const InequalityReport& r)
{
  for (const InequalityEntry& e : r.entries)
    if (!e.conjectural && e.verdict == Verdict::violated) return true;
  return false;
}

} // namespace

RadialField RunConfig::initial_state() const
{
  const HalfSphereGrid g = grid();
  if (scenario == ScenarioKind::cap) return cap_phi(cap, g);
  return perturbed_cap(cap, perturbation, g);
}

RunConfig parse_run_config(const std::string& text, const std::string& origin,
                           const Overrides& overrides)
{
  const KeyValueDocument doc = apply_overrides(KeyValueDocument::parse(text, origin), overrides);
  doc.reject_unknown(run_keys);
  return build_run_config(doc);
}

SweepConfig parse_sweep_config(const std::string& text, const std::string& origin,
                               const Overrides& overrides)
{
  const KeyValueDocument doc = apply_overrides(KeyValueDocument::parse(text, origin), overrides);
  std::vector<std::string> known = run_keys;
  known.insert(known.end(), sweep_keys.begin(), sweep_keys.end());
  doc.reject_unknown(known);

  SweepConfig s;
  s.base = build_run_config(doc);
  if (doc.has("sweep.theta") && doc.has("sweep.theta_deg"))
    throw std::invalid_argument("config: set only one of sweep.theta and sweep.theta_deg");
  for (double x : doc.get_list("sweep.theta_deg")) s.thetas.push_back(x * M_PI / 180.0);
  for (double x : doc.get_list("sweep.theta")) s.thetas.push_back(x);
  s.amplitudes = doc.get_list("sweep.amplitudes");
  for (double x : doc.get_list("sweep.resolutions")) {
    if (x != std::floor(x)) throw std::invalid_argument("config: sweep.resolutions must be integers");
    s.resolutions.push_back(static_cast<int>(x));
  }
  s.xi_per_beta = static_cast<int>(doc.get_int("sweep.xi_per_beta", s.xi_per_beta));
  if (s.xi_per_beta < 0) throw std::invalid_argument("config: sweep.xi_per_beta must be >= 0");
  return s;
}

RunSummary execute_run(const RunConfig& config, const std::string& out_dir, std::ostream& log)
{
  fs::create_directories(fs::path(out_dir) / "snapshots");
  RunSummary sum;
  const RadialField initial = config.initial_state();
  sum.initial_report = full_report(initial);
  sum.trajectory = run(initial, config.flow);
  const FlowTrajectory& tr = sum.trajectory;

  write_file((fs::path(out_dir) / "trajectory.csv").string(), trajectory_csv(tr, config.hash));
  for (std::size_t i = 0; i < tr.snapshots.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "snapshot_%04zu.txt", i);
    write_file((fs::path(out_dir) / "snapshots" / name).string(),
               serialize_state(tr.snapshots[i].second, tr.snapshots[i].first, config.hash));
  }

  const int l = config.flow.l;
  const double V0 = tr.samples.front().quermass.V[l];
  sum.volume_drift = std::abs(tr.samples.back().quermass.V[l] - V0) / std::abs(V0);

  if (tr.final_state) {
    sum.final_report = full_report(*tr.final_state);
    write_file((fs::path(out_dir) / "report.txt").string(), sum.final_report->serialize());
  }

  if (tr.termination == Termination::aborted) {
    sum.exit_code = exit_monitor;
    sum.failure = "monitor abort: " + tr.diagnostic->estimate + ": " + tr.diagnostic->detail +
                  " at t = " + format_double(tr.diagnostic->t);
  } else if (tr.termination == Termination::time_limit) {
    sum.exit_code = exit_monitor;
    sum.failure = "not converged: max speed " +
                  format_double(tr.samples.back().monitors.max_speed) + " at t_max";
  } else if (!tr.warnings.empty()) {
    sum.exit_code = exit_monitor;
    sum.failure = "budget exceeded: " + tr.warnings.front().estimate + ": " +
                  tr.warnings.front().detail;
  } else if (sum.final_report && !sum.final_report->hypothesis_met) {
    sum.exit_code = exit_hypothesis;
    sum.failure = "final state fails the convexity or boundary hypothesis";
  } else if (sum.final_report && any_violation(*sum.final_report)) {
    sum.exit_code = exit_violation;
    sum.failure = "an audited inequality is violated on the final state";
  }

  std::string s;
  s += std::string("# ") + version_string + " summary\n";
  s += "# config_hash " + hex64(config.hash) + "\n";
  s += "exit_code = " + std::to_string(sum.exit_code) + "\n";
  s += "failure = " + sum.failure + "\n";
  s += "termination = " + termination_name(tr.termination) + "\n";
  s += "steps = " + std::to_string(tr.steps) + "\n";
  s += "samples = " + std::to_string(tr.samples.size()) + "\n";
  s += "t_final = " + format_double(tr.samples.back().t) + "\n";
  s += "volume_drift = " + format_double(sum.volume_drift) + "\n";
  s += "fitted_radius = " + format_double(tr.fitted_radius) + "\n";
  s += "radius_spread = " + format_double(tr.radius_spread) + "\n";
  s += "cap_drift = " + format_double(tr.cap_drift) + "\n";
  for (std::size_t i = 0; i < tr.warnings.size(); ++i)
    s += "warning_" + std::to_string(i) + " = " + tr.warnings[i].estimate + ": " +
         tr.warnings[i].detail + " at t = " + format_double(tr.warnings[i].t) + "\n";
  if (sum.final_report)
    for (const InequalityEntry& e : sum.final_report->entries)
      s += "final." + e.name + ".gap = " + format_double(e.gap) + "\n";
  write_file((fs::path(out_dir) / "summary.txt").string(), s);

  log << "run: " << termination_name(tr.termination) << " after " << tr.steps << " steps, t = "
      << format_double(tr.samples.back().t) << ", radius spread "
      << format_double(tr.radius_spread) << "\n";
  if (!sum.failure.empty()) log << "run: " << sum.failure << "\n";
  return sum;
}

int cmd_run(const std::string& config_path, const Overrides& overrides, std::ostream& out,
            std::ostream& err)
{
  RunConfig cfg;
  try {
    cfg = parse_run_config(read_file(config_path), config_path, overrides);
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << "\n";
    return exit_config;
  }
  try {
    return execute_run(cfg, cfg.out_dir, out).exit_code;
  } catch (const DomainError& e) {
    err << "initial state: " << e.what() << "\n";
    return exit_hypothesis;
  } catch (const std::exception& e) {
    err << "run failed: " << e.what() << "\n";
    return exit_monitor;
  }
}

int cmd_check(const std::string& state_path, std::optional<double> theta, std::ostream& out,
              std::ostream& err)
{
  std::optional<StateFile> file;
  try {
    file.emplace(parse_state(read_file(state_path), state_path));
  } catch (const std::exception& e) {
    err << "state error: " << e.what() << "\n";
    return exit_config;
  }
  RadialField state = file->state;
  if (theta) state.theta = *theta;
  InequalityReport rep;
  try {
    rep = full_report(state);
  } catch (const std::exception& e) {
    err << "check failed: " << e.what() << "\n";
    return exit_hypothesis;
  }
  out << rep.serialize();
  if (!rep.hypothesis_met) return exit_hypothesis;
  return any_violation(rep) ? exit_violation : exit_success;
}

std::vector<std::string> sweep_columns()
{
  return {"cell",          "theta",        "amplitude",     "amplitude_used", "n_beta",
          "n_xi",          "exit_code",    "termination",   "t_final",        "steps",
          "volume_drift",  "initial_af_k0", "initial_af_k1", "initial_minkowski_2d",
          "initial_willmore_2d", "final_af_k0", "final_af_k1", "radius_spread", "fitted_radius"};
}

int cmd_sweep(const std::string& config_path, const Overrides& overrides, std::ostream& out,
              std::ostream& err)
{
  SweepConfig sw;
  try {
    sw = parse_sweep_config(read_file(config_path), config_path, overrides);
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << "\n";
    return exit_config;
  }
  const fs::path root(sw.base.out_dir);
  fs::create_directories(root);

  const std::vector<std::string> cols = sweep_columns();
  std::string schema;
  for (std::size_t i = 0; i < cols.size(); ++i) schema += (i ? "," : "") + cols[i];
  std::string csv = std::string("# ") + version_string + " sweep\n# config_hash " +
                    hex64(sw.base.hash) + "\n# schema " + schema + "\n" + schema + "\n";

  int worst = exit_success;
  int cell = 0;
  for (double theta : sw.thetas)
    for (double amp : sw.amplitudes)
      for (int res : sw.resolutions) {
        RunConfig c = sw.base;
        c.flow.theta = c.cap.theta = theta;
        c.perturbation.amplitude = amp;
        c.n_beta = res;
        c.n_xi = sw.xi_per_beta == 0 ? 1 : sw.xi_per_beta * res;
        if (c.n_xi == 1) c.perturbation.xi_mode = 0;
        char name[96];
        std::snprintf(name, sizeof name, "cell_%03d", cell);
        const std::string dir = (root / name).string();
        std::vector<std::string> row{std::to_string(cell), format_double(theta), format_double(amp)};
        int code = exit_success;
        try {
          c.flow.validate();
          double used = 0.0;
          if (c.scenario == ScenarioKind::perturbed_cap)
            (void)perturbed_cap(c.cap, c.perturbation, c.grid(), &used);
          out << name << ": theta " << format_double(theta) << ", amplitude " << format_double(amp)
              << ", n_beta " << res << "\n";
          const RunSummary s = execute_run(c, dir, out);
          code = s.exit_code;
          const FlowTrajectory& tr = s.trajectory;
          auto gap = [](const std::optional<InequalityReport>& r, const char* key) {
            return r ? format_double(r->at(key).gap) : std::string("nan");
          };
          row.insert(row.end(),
                     {format_double(used), std::to_string(c.n_beta), std::to_string(c.n_xi),
                      std::to_string(code), termination_name(tr.termination),
                      format_double(tr.samples.back().t), std::to_string(tr.steps),
                      format_double(s.volume_drift), gap(s.initial_report, "af_k0"),
                      gap(s.initial_report, "af_k1"), gap(s.initial_report, "minkowski_2d"),
                      gap(s.initial_report, "willmore_2d"), gap(s.final_report, "af_k0"),
                      gap(s.final_report, "af_k1"), format_double(tr.radius_spread),
                      format_double(tr.fitted_radius)});
        } catch (const std::exception& e) {
          err << name << ": " << e.what() << "\n";
          code = dynamic_cast<const std::invalid_argument*>(&e) ? exit_config : exit_monitor;
          row.insert(row.end(), {"nan", std::to_string(c.n_beta), std::to_string(c.n_xi),
                                 std::to_string(code), "error"});
          while (row.size() < cols.size()) row.emplace_back("nan");
        }
        worst = std::max(worst, code);
        for (std::size_t i = 0; i < row.size(); ++i) csv += (i ? "," : "") + row[i];
        csv += "\n";
        ++cell;
      }
  write_file((root / "sweep_summary.csv").string(), csv);
  out << "sweep: " << cell << " cells, worst exit code " << worst << "\n";
  return worst;
}

int cmd_caps(const std::vector<double>& thetas, std::ostream& out)
{
  out << "theta              theta_deg  b_theta              omega_theta          cap_area\n";
  for (double theta : thetas) {
    if (!(theta > 0 && theta < M_PI)) {
      out << "theta " << theta << " outside (0, pi)\n";
      return exit_config;
    }
    const CapConstants cc = cap_constants(theta, 2);
    char line[160];
    std::snprintf(line, sizeof line, "%-18.15f %-10.4f %-20.15f %-20.15f %-20.15f\n", theta,
                  theta * 180 / M_PI, cc.b_theta, cc.omega_theta, cc.cap_area);
    out << line;
  }
  return exit_success;
}

} // namespace capflow
