#include "capflow/cli.hpp"

#include <doctest.h>

#include <filesystem>
#include <sstream>
#include <sys/wait.h>

using namespace capflow;
namespace fs = std::filesystem;

namespace {

const std::string small_run = R"(seed = 3
[scenario]
kind = perturbed_cap
amplitude = 0.05
[grid]
n_beta = 32
n_xi = 64
[flow]
theta_deg = 60
)";

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name)
  {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  [[nodiscard]] std::string file(const std::string& name, const std::string& text) const
  {
    const std::string p = (path / name).string();
    write_file(p, text);
    return p;
  }
  [[nodiscard]] std::string str() const { return path.string(); }
};

int shell(const std::string& command)
{
  const int status = std::system((command + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string drop_header(const std::string& csv)
{
  std::size_t p = 0;
  for (int i = 0; i < 3; ++i) p = csv.find('\n', p) + 1;
  return csv.substr(p);
}

} // namespace

TEST_SUITE("cli")
{
  TEST_CASE("run config parsing")
  {
    const RunConfig c = parse_run_config(small_run, "small.cfg");
    CHECK(c.scenario == ScenarioKind::perturbed_cap);
    CHECK(c.n_beta == 32);
    CHECK(c.n_xi == 64);
    CHECK(c.seed == 3);
    CHECK(c.perturbation.seed == 3);
    CHECK(c.flow.theta == doctest::Approx(M_PI / 3).epsilon(1e-15));
    CHECK(c.cap.theta == c.flow.theta);
    CHECK(c.out_dir == "capflow_out");

    Overrides o;
    o.out_dir = "elsewhere";
    o.seed = 9;
    const RunConfig d = parse_run_config(small_run, "small.cfg", o);
    CHECK(d.out_dir == "elsewhere");
    CHECK(d.seed == 9);
    CHECK(d.hash != c.hash);
    Overrides only_dir;
    only_dir.out_dir = "x";
    CHECK(parse_run_config(small_run, "small.cfg", only_dir).hash == c.hash);
    CHECK(parse_run_config("# comment\n" + small_run, "small.cfg").hash == c.hash);
  }

  TEST_CASE("config errors")
  {
    CHECK_THROWS_WITH_AS((void)parse_run_config("[flow]\ntheta_deg = 120\n", "c"),
                         doctest::Contains("experimental"), std::invalid_argument);
    Overrides o;
    o.experimental_theta = true;
    CHECK(parse_run_config("[flow]\ntheta_deg = 120\n", "c", o).flow.experimental_theta);
    CHECK_THROWS_AS((void)parse_run_config("[flow]\nstop_speed = 0\n", "c"), std::invalid_argument);
    CHECK_THROWS_AS((void)parse_run_config("[flow]\ntheta = 1\ntheta_deg = 60\n", "c"),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)parse_run_config("[grid]\nn_beta = 8\n", "c"), std::invalid_argument);
    CHECK_THROWS_AS((void)parse_run_config("[scenario]\nkind = torus\n", "c"), std::invalid_argument);
    try {
      (void)parse_run_config("seed = 1\n[flow]\ntheta_deg = 60\nthetta = 1\n", "typo.cfg");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 4);
      CHECK(std::string(e.what()).find("flow.thetta") != std::string::npos);
    }
    Overrides l1;
    l1.l = 1;
    const RunConfig c = parse_run_config(small_run, "c", l1);
    CHECK(c.flow.l == 1);
    CHECK(c.flow.experimental_l);
  }

  TEST_CASE("cmd_run reports config errors with exit code 2")
  {
    TempDir dir("capflow_cli_bad");
    std::ostringstream out, err;
    const std::string path = dir.file("bad.cfg", "[flow]\ntheta_deg = 120\n");
    CHECK(cmd_run(path, {}, out, err) == exit_config);
    CHECK(err.str().find("pi/2") != std::string::npos);
    std::ostringstream err2;
    CHECK(cmd_run((dir.path / "missing.cfg").string(), {}, out, err2) == exit_config);
    CHECK(err2.str().find("cannot open") != std::string::npos);
  }

  TEST_CASE("a converged run writes every output and checks clean")
  {
    TempDir dir("capflow_cli_run");
    Overrides o;
    o.out_dir = (dir.path / "out").string();
    std::ostringstream out, err;
    const std::string cfg = dir.file("run.cfg", small_run + "[output]\nsnapshot_every = 30\n");
    REQUIRE(cmd_run(cfg, o, out, err) == exit_success);
    CHECK(err.str().empty());
    CHECK(out.str().find("run: converged") != std::string::npos);

    const fs::path od = *o.out_dir;
    const TrajectoryTable t = parse_trajectory_csv(read_file((od / "trajectory.csv").string()), "t");
    CHECK(t.rows.size() > 10);
    const std::string summary = read_file((od / "summary.txt").string());
    CHECK(summary.find("exit_code = 0\n") != std::string::npos);
    CHECK(summary.find("termination = converged\n") != std::string::npos);
    CHECK(summary.find("final.af_k0.gap = ") != std::string::npos);
    CHECK(read_file((od / "report.txt").string()).find("hypothesis: met") != std::string::npos);

    std::vector<fs::path> snaps;
    for (const auto& e : fs::directory_iterator(od / "snapshots")) snaps.push_back(e.path());
    std::sort(snaps.begin(), snaps.end());
    REQUIRE(snaps.size() >= 3);
    CHECK(snaps.front().filename() == "snapshot_0000.txt");

    std::ostringstream rep, rerr;
    CHECK(cmd_check(snaps.front().string(), std::nullopt, rep, rerr) == exit_success);
    CHECK(rep.str().find("af_k0") != std::string::npos);
    std::ostringstream rep2;
    CHECK(cmd_check(snaps.back().string(), std::nullopt, rep2, rerr) == exit_success);
    CHECK(rep2.str().find("af_k0                    equality-within-tol") != std::string::npos);

    // the same run in a second directory gives identical bytes
    Overrides o2;
    o2.out_dir = (dir.path / "again").string();
    std::ostringstream out2;
    REQUIRE(cmd_run(cfg, o2, out2, err) == exit_success);
    CHECK(read_file((od / "trajectory.csv").string()) ==
          read_file((fs::path(*o2.out_dir) / "trajectory.csv").string()));
    CHECK(read_file((od / "summary.txt").string()) ==
          read_file((fs::path(*o2.out_dir) / "summary.txt").string()));

    const std::string snap = read_file(snaps.back().string());
    const std::string cut = dir.file("cut.txt", snap.substr(0, snap.size() / 2));
    std::ostringstream cerr_;
    CHECK(cmd_check(cut, std::nullopt, rep, cerr_) == exit_config);
    CHECK(cerr_.str().find("truncated") != std::string::npos);
  }

  TEST_CASE("unfinished runs exit with code 3")
  {
    TempDir dir("capflow_cli_tmax");
    Overrides o;
    o.out_dir = dir.str();
    std::ostringstream out, err;
    const std::string cfg = dir.file("short.cfg", small_run + "t_max = 0.05\n");
    CHECK(cmd_run(cfg, o, out, err) == exit_monitor);
    CHECK(read_file((dir.path / "summary.txt").string()).find("not converged") != std::string::npos);

    const std::string drift = dir.file("drift.cfg", small_run + "[monitors]\nvolume_drift = 1e-15\n");
    CHECK(cmd_run(drift, o, out, err) == exit_monitor);
    CHECK(read_file((dir.path / "summary.txt").string()).find("monitor abort: conservation") !=
          std::string::npos);
  }

  TEST_CASE("check on a non-convex state exits with code 4")
  {
    TempDir dir("capflow_cli_check");
    const HalfSphereGrid g(24, 8);
    ScalarField phi = g.zeros();
    phi.row(10) += 0.3;
    const std::string p =
        dir.file("s.txt", serialize_state({g, phi, Eigen::ArrayXd::Zero(8), M_PI / 2}, 0, 0));
    std::ostringstream out, err;
    CHECK(cmd_check(p, std::nullopt, out, err) == exit_hypothesis);
    CHECK(out.str().find("hypothesis: unmet") != std::string::npos);
    const std::string cap = dir.file("cap.txt", serialize_state(cap_phi({1.0, M_PI / 3}, HalfSphereGrid(32, 64)), 0, 0));
    std::ostringstream o2;
    CHECK(cmd_check(cap, M_PI / 3, o2, err) == exit_success);
  }

  TEST_CASE("cap table")
  {
    std::ostringstream out;
    CHECK(cmd_caps({M_PI / 3, M_PI / 2}, out) == exit_success);
    CHECK(out.str().find("0.65449846949787") != std::string::npos); // 5 pi / 24
    CHECK(out.str().find("2.0943951023931") != std::string::npos);  // 2 pi / 3
    std::ostringstream bad;
    CHECK(cmd_caps({4.0}, bad) == exit_config);
  }

  TEST_CASE("empty sweep writes only the header")
  {
    TempDir dir("capflow_cli_empty");
    Overrides o;
    o.out_dir = dir.str();
    std::ostringstream out, err;
    CHECK(cmd_sweep(dir.file("s.cfg", small_run), o, out, err) == exit_success);
    const std::string csv = read_file((dir.path / "sweep_summary.csv").string());
    std::string schema;
    for (const std::string& c : sweep_columns()) schema += (schema.empty() ? "" : ",") + c;
    CHECK(drop_header(csv) == schema + "\n");
  }

  TEST_CASE("a one-cell sweep reproduces the run")
  {
    TempDir dir("capflow_cli_sweep");
    Overrides o;
    o.out_dir = (dir.path / "sweep").string();
    std::ostringstream out, err;
    const std::string sweep =
        small_run + "[sweep]\ntheta_deg = 60\namplitudes = 0.05\nresolutions = 32\n";
    REQUIRE(cmd_sweep(dir.file("s.cfg", sweep), o, out, err) == exit_success);
    Overrides r;
    r.out_dir = (dir.path / "run").string();
    REQUIRE(cmd_run(dir.file("r.cfg", small_run), r, out, err) == exit_success);
    CHECK(drop_header(read_file((dir.path / "sweep" / "cell_000" / "trajectory.csv").string())) ==
          drop_header(read_file((dir.path / "run" / "trajectory.csv").string())));

    const std::string csv = read_file((dir.path / "sweep" / "sweep_summary.csv").string());
    std::istringstream is(drop_header(csv));
    std::string header, row;
    std::getline(is, header);
    std::getline(is, row);
    CHECK(row.rfind("0,", 0) == 0);
    CHECK(row.find(",converged,") != std::string::npos);
    std::string extra;
    CHECK_FALSE(std::getline(is, extra));
  }

  TEST_CASE("invalid sweep cells are recorded and set the exit code")
  {
    TempDir dir("capflow_cli_badcell");
    Overrides o;
    o.out_dir = dir.str();
    std::ostringstream out, err;
    const std::string sweep = small_run + "[sweep]\ntheta_deg = 120\namplitudes = 0.05\nresolutions = 32\n";
    CHECK(cmd_sweep(dir.file("s.cfg", sweep), o, out, err) == exit_config);
    CHECK(read_file((dir.path / "sweep_summary.csv").string()).find(",error,") != std::string::npos);
  }

  TEST_CASE("command line binary")
  {
    const std::string cli = CAPFLOW_CLI;
    CHECK(shell(cli + " caps") == 0);
    CHECK(shell(cli + " caps --theta-deg 30,45") == 0);
    CHECK(shell(cli) == exit_config);
    CHECK(shell(cli + " run") == exit_config);
    CHECK(shell(cli + " run --config /nonexistent.cfg") == exit_config);
    CHECK(shell(cli + " check /nonexistent.txt") == exit_config);
    CHECK(shell(cli + " --help") == 0);

    TempDir dir("capflow_cli_binary");
    const std::string bad = dir.file("bad.cfg", "[flow]\ntheta_deg = 120\nt_max = 0.01\n[grid]\nn_beta = 16\nn_xi = 32\n");
    CHECK(shell(cli + " run --config " + bad + " --out " + dir.str()) == exit_config);
    CHECK(shell(cli + " run --config " + bad + " --experimental-theta --out " + dir.str()) == exit_monitor);
    CHECK(fs::exists(dir.path / "trajectory.csv"));
  }

  TEST_CASE("bundled config parses")
  {
    const std::string path = std::string(CAPFLOW_CONFIG_DIR) + "/perturbed_cap_theta60.cfg";
    const RunConfig c = parse_run_config(read_file(path), path);
    CHECK(c.n_beta == 64);
    CHECK(c.n_xi == 128);
    CHECK(c.flow.theta == doctest::Approx(M_PI / 3));
    CHECK(c.perturbation.amplitude == 0.05);
    CHECK(c.flow.snapshot_every == 25);
  }
}
