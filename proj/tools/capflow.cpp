#include "capflow/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <iostream>

using namespace capflow;

int main(int argc, char** argv)
{
  CLI::App app{"Capillary curvature flow of convex caps in the half-space"};
  app.require_subcommand(1);

  std::string config, out_dir, state_path;
  std::uint64_t seed = 0;
  int l = 0;
  bool experimental_theta = false;
  double theta = 0.0;
  std::vector<double> caps_deg{30, 45, 60, 90};

  auto add_run_flags = [&](CLI::App* sub) {
    sub->add_option("--config", config, "config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (overrides output.dir)");
    sub->add_option("--seed", seed, "RNG seed (overrides seed)");
    sub->add_option("--l", l, "curvature index l of the flow");
    sub->add_flag("--experimental-theta", experimental_theta, "allow theta in (pi/2, pi)");
  };
  CLI::App* run = app.add_subcommand("run", "flow one configured scenario");
  add_run_flags(run);
  CLI::App* sweep = app.add_subcommand("sweep", "flow a theta x amplitude x resolution matrix");
  add_run_flags(sweep);
  CLI::App* check = app.add_subcommand("check", "audit the inequalities on a state file");
  check->add_option("state", state_path, "state file")->required();
  CLI::Option* theta_opt = check->add_option("--theta", theta, "contact angle in radians");
  CLI::App* caps = app.add_subcommand("caps", "print cap constants");
  caps->add_option("--theta-deg", caps_deg, "contact angles in degrees")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_success : exit_config;
  }

  Overrides o;
  if (!out_dir.empty()) o.out_dir = out_dir;
  if (run->count("--seed") || sweep->count("--seed")) o.seed = seed;
  if (run->count("--l") || sweep->count("--l")) o.l = l;
  o.experimental_theta = experimental_theta;

  if (*run) return cmd_run(config, o, std::cout, std::cerr);
  if (*sweep) return cmd_sweep(config, o, std::cout, std::cerr);
  if (*check)
    return cmd_check(state_path, *theta_opt ? std::optional<double>(theta) : std::nullopt,
                     std::cout, std::cerr);
  std::vector<double> rad;
  for (double d : caps_deg) rad.push_back(d * M_PI / 180.0);
  return cmd_caps(rad, std::cout);
}
