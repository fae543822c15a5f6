#include "doctest.h"

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "wettix/config.hpp"
#include "wettix/errors.hpp"
#include "wettix/harness.hpp"

using namespace wettix;
namespace fs = std::filesystem;

namespace {

const char* kSmall = R"(
[grid]
n = 48
[time]
T = 0.004
dt = 0.001
[tensions]
sigma_VL = sqrt_sin2(a=1, phase=pi/3)
sigma_LS = 1
sigma_VS = 1.2
[kernel]
mode = single
R = 0.5
q = 48
[shapes]
droplet = disc(center=(0.5, 0.4), r=0.2)
substrate = flat(h=0.4)
[output]
fields = true
)";

ExperimentConfig small(const std::vector<std::string>& sets = {}) {
  Config c = Config::parse(kSmall);
  for (const auto& s : sets) c.set_override(s);
  ExperimentConfig e = load_experiment(c);
  e.source = c;
  return e;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("wettix_test_" + name);
  fs::remove_all(p);
  return p;
}

int cli(const std::string& args) {
  const std::string cmd = std::string(WETTIX_CLI) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("runs are deterministic and write the run directory") {
  const fs::path root = scratch("det");
  const ExperimentConfig e = small();
  run(e, (root / "a").string());
  run(e, (root / "b").string());
  for (const char* f : {"steps.csv", "energy.csv", "components.csv", "contour_T0.004.xy",
                        "phiL_T0.004.fld", "config.snapshot"}) {
    INFO(f);
    REQUIRE(fs::exists(root / "a" / f));
    CHECK(slurp(root / "a" / f) == slurp(root / "b" / f));
  }
  fs::remove_all(root);
}

TEST_CASE("every logged step meets the area tolerance") {
  const fs::path root = scratch("audit");
  const RunResult r = run(small({"solver.mu_tol=1e-5"}), root.string());
  CHECK(r.mu_tol == 1e-5);
  std::ifstream is(root / "steps.csv");
  std::string line;
  std::getline(is, line);
  CHECK(line == "step,mu,area,target,mu_tol,bisect_iters,max_dphi");
  int rows = 0;
  while (std::getline(is, line)) {
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> f;
    while (std::getline(ss, cell, ',')) f.push_back(std::stod(cell));
    REQUIRE(f.size() == 7);
    CHECK(std::abs(f[2] - f[3]) <= f[4]);
    CHECK(f[4] == 1e-5);
    ++rows;
  }
  CHECK(rows == 4);
  fs::remove_all(root);
}

TEST_CASE("snapshots and component counts") {
  const fs::path root = scratch("snap");
  ExperimentConfig e = small({"time.snapshots=[0, 0.002]"});
  const RunResult r = run(e, root.string());
  CHECK(fs::exists(root / "contour_T0.xy"));
  CHECK(fs::exists(root / "contour_T0.002.xy"));
  CHECK(r.components.size() == 5);
  for (int c : r.components) CHECK(c == 1);
  e = small({"time.snapshots=[0.0015]"});
  CHECK_THROWS_AS(run(e, ""), ConfigError);
  fs::remove_all(root);
}

TEST_CASE("an equilibrium start barely moves") {
  // Isotropic tensions with equal substrate tensions: the semicircle is stationary.
  ExperimentConfig e = small({"tensions.sigma_VL=1", "tensions.sigma_VS=1", "grid.n=64"});
  const LevelSetState start = make_droplet_state(e.droplet, e.substrate, Grid2D(e.n), e.area);
  const RunResult r = run(e, "");
  const double dx = 1.0 / e.n;
  CHECK(symmetric_difference_area(start.phi_L, r.state.phi_L) <= 2 * dx * dx);
}

TEST_CASE("converge checks its inputs") {
  ExperimentConfig e = small({"solver.reference=finest-self"});
  e.levels = {{2, 24}};
  CHECK_THROWS_AS(converge(e, ""), ConfigError);
  e.levels = {{2, 24}, {4, 48}, {8, 100}};
  CHECK_THROWS_AS(converge(e, ""), ConfigError);
  e.levels = {{2, 24}, {4, 48}, {8, 96}};
  e.reference = Reference::None;
  CHECK_THROWS_AS(converge(e, ""), ConfigError);
  // Front tracking needs a flat substrate.
  ExperimentConfig c = small({"solver.reference=fronttrack", "shapes.substrate=sinusoid(a=0.02, k=2, h=0.4)"});
  c.levels = {{2, 24}, {4, 48}, {8, 96}};
  CHECK_THROWS_AS(converge(c, ""), ConfigError);
}

TEST_CASE("finest-self ladder and identical mobility pair") {
  const fs::path root = scratch("pair");
  Config c = Config::parse(kSmall);
  c.set("kernel", "mode", "two");
  c.set("kernel", "R1", "2");
  c.set("kernel", "R2", "1/6");
  c.set("tensions", "sigma_VS", "sqrt_sin2(a=0.2, phase=0)");
  c.set("mobilities", "m_VS", "sqrt_cos2(a=0.5, phase=0)");
  c.set("mobilities", "m_VS_alt", "sqrt_cos2(a=0.5, phase=0)");
  c.set("solver", "reference", "finest-self");
  c.set("time", "levels", "[(1, 24), (2, 48), (4, 96)]");
  ExperimentConfig e = load_experiment(c);
  e.source = c;
  const MobilityStudy s = mobility_insensitivity_study(e, root.string());
  REQUIRE(s.first.rows.size() == 2);
  for (double d : s.rel_diff) CHECK(d == 0.0);
  CHECK(s.first.rows[0].l1 == s.second.rows[0].l1);
  CHECK(fs::exists(root / "mobility_diff.csv"));
  CHECK(fs::exists(root / "m_VS" / "errors.csv"));
  // The stored orders are recomputable from the l1 column.
  const auto rows = read_error_table((root / "m_VS" / "errors.csv").string());
  CHECK(*rows[1].order == doctest::Approx(std::log2(rows[0].l1 / rows[1].l1)).epsilon(1e-12));
  fs::remove_all(root);
}

TEST_CASE("command line exit codes") {
  const fs::path root = scratch("cli");
  const std::string cfg = (root / "ok.cfg").string();
  fs::create_directories(root);
  std::ofstream(cfg) << kSmall;
  const std::string out = " --out " + (root / "out").string();
  CHECK(cli("run " + cfg + out) == 0);
  CHECK(fs::exists(root / "out" / "run" / "steps.csv"));
  CHECK(cli("run " + cfg + out + " --set output.name=renamed --set grid.n=32") == 0);
  const std::string snap = slurp(root / "out" / "renamed" / "config.snapshot");
  CHECK(snap.find("# override grid.n=32") != std::string::npos);
  // Negative tension somewhere.
  CHECK(cli("run " + cfg + out + " --set 'tensions.sigma_VL=trig_power(c=1, b=1.5, k=2)'") == 2);
  CHECK(cli("run " + cfg + out + " --set grid.bogus=1") == 2);
  CHECK(cli("converge " + cfg + out + " --set 'time.levels=[(4, 48)]' --set solver.reference=finest-self") == 2);
  CHECK(cli("run " + std::string(WETTIX_CONFIGS) + "/infeasible.cfg" + out) == 3);
  CHECK(cli("kernel " + cfg + out) == 0);
  CHECK(fs::exists(root / "out" / "run" / "kernel_VL.csv"));
  CHECK(cli("contour " + (root / "out" / "run" / "phiL_T0.004.fld").string() + " 0") == 0);
  CHECK(cli("run no/such/file.cfg") == 2);
  CHECK(cli("--help") == 0);
  fs::remove_all(root);
}
