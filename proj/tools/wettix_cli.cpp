// Command-line front end: wettix run|converge|kernel|equilibrium|contour.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wettix/config.hpp"
#include "wettix/errors.hpp"
#include "wettix/fields.hpp"
#include "wettix/harness.hpp"
#include "wettix/io.hpp"

namespace {

const char* kFooter = R"(Config keys (override any with --set section.key=value):
  [grid]       n
  [time]       dt T levels snapshots
  [tensions]   sigma_VL sigma_LS sigma_VS
  [mobilities] m_VL m_LS m_VS m_VS_alt
  [kernel]     mode R R1 R2 q time_scale
  [shapes]     droplet substrate area
  [solver]     comparison selection band mu_tol mu_lo mu_hi reference ft_M ft_eta
               ft_dt n_cmp redistance redistance_every threads seed
  [output]     dir name fields contours energy

Output files:
  steps.csv        step,mu,area,target,mu_tol,bisect_iters,max_dphi  (one row per step)
  energy.csv       step,mu,energy  (threshold-dynamics energy of the liquid partition)
  components.csv   step,components  (4-connected liquid components)
  errors.csv       steps,inv_dx,l1,linf,order  then '# slope=<value>'
  mobility_diff.csv steps,inv_dx,l1_m_VS,l1_m_VS_alt,rel_diff
  equilibrium.csv  l1,linf,lambda
  kernel_XX.csv    theta,omega_1[,omega_2]  (XX = VL, LS, VS); kernel_radii.csv circle,R
  contour_T*.xy    x y per line, blank line between polylines
  phiL_T*.fld      'wettix-fld n dx name' header, then n*n little-endian float64

Environment: WETTIX_OUT sets the default output root (output.dir overrides it,
--out overrides both).
Exit codes: 0 success, 2 configuration error, 3 solver error.)";

struct Common {
  std::string config;
  std::vector<std::string> sets;
  std::string out;
  int jobs = 1;
  int threads = -1;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("config", c.config, "Config file")->required()->check(CLI::ExistingFile);
  sub->add_option("--set", c.sets, "Override a config key: section.key=value (repeatable)");
  sub->add_option("--out", c.out, "Output root directory");
  sub->add_option("--threads", c.threads, "OpenMP threads per run (0: default team)");
}

wettix::ExperimentConfig load(const Common& c) {
  wettix::Config cfg = wettix::Config::load(c.config);
  for (const auto& s : c.sets) cfg.set_override(s);
  if (c.threads >= 0) cfg.set_override("solver.threads=" + std::to_string(c.threads));
  wettix::ExperimentConfig e = wettix::load_experiment(cfg);
  if (!c.out.empty()) e.out_dir = c.out;
  return e;
}

std::string run_dir(const wettix::ExperimentConfig& e) { return wettix::join_path(e.out_dir, e.name); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anisotropic wetting and dewetting by vectorial median filters"};
  app.footer(kFooter);
  app.require_subcommand(1);

  Common run_opts, conv_opts, kern_opts, eq_opts;
  bool mobility_pair = false;
  std::string fld_path, contour_out;
  double level = 0.0;

  auto* run = app.add_subcommand("run", "Run one simulation; prints the run directory");
  add_common(run, run_opts);
  auto* conv = app.add_subcommand("converge", "Run the refinement ladder and write errors.csv");
  add_common(conv, conv_opts);
  conv->add_option("--jobs", conv_opts.jobs, "Ladder levels run concurrently")->check(CLI::PositiveNumber);
  conv->add_flag("--mobility-pair", mobility_pair,
                 "Run the ladder with m_VS and with m_VS_alt and compare");
  auto* kern = app.add_subcommand("kernel", "Write kernel weights per circle as CSV");
  add_common(kern, kern_opts);
  auto* eq = app.add_subcommand("equilibrium", "Run to T and compare with the Winterbottom shape");
  add_common(eq, eq_opts);
  auto* cont = app.add_subcommand("contour", "Extract a level curve from a .fld file");
  cont->add_option("fld", fld_path, "Field file")->required()->check(CLI::ExistingFile);
  cont->add_option("level", level, "Level value")->required();
  cont->add_option("--out", contour_out, "Write .xy here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      const auto e = load(run_opts);
      const std::string dir = run_dir(e);
      wettix::run(e, dir);
      std::cout << dir << '\n';
    } else if (*conv) {
      const auto e = load(conv_opts);
      const std::string dir = run_dir(e);
      if (mobility_pair) {
        const auto s = wettix::mobility_insensitivity_study(e, dir, conv_opts.jobs);
        std::cout << wettix::error_table_csv(s.first.rows) << wettix::error_table_csv(s.second.rows);
      } else {
        const auto r = wettix::converge(e, dir, conv_opts.jobs);
        std::cout << wettix::error_table_csv(r.rows);
      }
      std::cout << dir << '\n';
    } else if (*kern) {
      const auto e = load(kern_opts);
      const std::string dir = run_dir(e);
      wettix::dump_kernels(e, dir);
      std::cout << dir << '\n';
    } else if (*eq) {
      const auto e = load(eq_opts);
      const std::string dir = run_dir(e);
      const auto r = wettix::equilibrium(e, dir);
      std::cout << "l1 " << wettix::fmt(r.l1) << "\nlinf " << wettix::fmt(r.linf) << '\n' << dir << '\n';
    } else if (*cont) {
      const auto lines = wettix::extract_contour(wettix::read_fld(fld_path), level);
      if (!contour_out.empty()) {
        wettix::write_xy(contour_out, lines);
      } else {
        for (const auto& pl : lines) {
          for (const auto& p : pl.pts) std::cout << wettix::fmt(p.x) << ' ' << wettix::fmt(p.y) << '\n';
          if (pl.closed && !pl.pts.empty())
            std::cout << wettix::fmt(pl.pts[0].x) << ' ' << wettix::fmt(pl.pts[0].y) << '\n';
          std::cout << '\n';
        }
      }
    }
  } catch (const wettix::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const wettix::SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
