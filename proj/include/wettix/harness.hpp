#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wettix/angular.hpp"
#include "wettix/config.hpp"
#include "wettix/fields.hpp"
#include "wettix/kernels.hpp"
#include "wettix/metrics.hpp"
#include "wettix/shapes.hpp"
#include "wettix/vls_stepper.hpp"

namespace wettix {

enum class KernelMode { Single, Two };
enum class Reference { None, Winterbottom, FrontTrack, FinestSelf };

struct Level {
  long steps = 0;
  int n = 0;
};

struct ExperimentConfig {
  Config source;

  int n = 200;
  double dt = 0.0, T = 0.0;
  std::vector<Level> levels;
  std::vector<double> snapshots;

  // In single-circle mode the mobilities are the ones the kernels induce.
  SurfaceTensionTriple tensions;
  std::optional<MobilityFn> m_VS_alt;

  KernelMode mode = KernelMode::Single;
  double R = 0.5, R1 = 1.0 / 3.0, R2 = 2.0;
  int q = 100;
  double time_scale = 8.0;

  ShapeSpec droplet, substrate;
  double area = -1.0;  // <= 0: initial liquid area

  Comparison comparison = Comparison::NonStrict;
  Selection selection = Selection::Interpolated;
  double band = 0.0;  // NaN off, 0 default width
  double mu_tol = NAN;
  double mu_lo = NAN, mu_hi = NAN;

  Reference reference = Reference::None;
  int ft_M = 2048;
  double ft_eta = 0.0;
  double ft_dt = 0.0;  // <= 0: stability bound only
  int n_cmp = 1600;
  double redistance_band = 0.0;  // 0: off
  int redistance_every = 0;

  int threads = 0;
  uint64_t seed = 1;
  std::string out_dir = "out", name = "run";
  bool write_fields = true, write_contours = true, write_energy = true;
};

ExperimentConfig load_experiment(const Config& c);

struct KernelTriple {
  CircleKernel VL, LS, VS;
};

KernelTriple build_kernels(const ExperimentConfig& cfg);

// Validated copy of cfg.tensions with mobilities set from the kernels.
SurfaceTensionTriple effective_tensions(const ExperimentConfig& cfg, const KernelTriple& k);

StepParams make_step_params(const ExperimentConfig& cfg, const KernelTriple& k);

struct RunResult {
  std::string dir;
  LevelSetState state;
  std::vector<StepReport> reports;
  std::vector<int> components;  // liquid components after every step, index 0 initial
  double mu_tol = 0.0;
  long steps = 0;
};

/// Runs cfg.T / cfg.dt steps. Outputs go to dir unless it is empty.
RunResult run(const ExperimentConfig& cfg, const std::string& dir);

struct ConvergeResult {
  std::vector<ErrorRow> rows;
  double slope = 0.0;
  std::vector<RunResult> runs;
};

/// Runs every level in cfg.levels (jobs at a time) and compares each with
/// cfg.reference. errors.csv goes to dir unless it is empty.
ConvergeResult converge(const ExperimentConfig& cfg, const std::string& dir, int jobs = 1);

struct MobilityStudy {
  ConvergeResult first, second;
  std::vector<double> rel_diff;  // |l1_1 - l1_2| / max(l1_1, l1_2) per row
};

/// converge() with m_VS and then with m_VS_alt; both tables plus
/// mobility_diff.csv go to dir.
MobilityStudy mobility_insensitivity_study(const ExperimentConfig& cfg, const std::string& dir,
                                           int jobs = 1);

struct EquilibriumResult {
  RunResult run;
  WinterbottomShape reference;
  double l1 = 0.0, linf = 0.0;
};

/// Runs to T and compares with the Winterbottom shape of the same area.
EquilibriumResult equilibrium(const ExperimentConfig& cfg, const std::string& dir);

/// kernel_VL.csv, kernel_LS.csv, kernel_VS.csv with columns theta,omega_1[,omega_2].
void dump_kernels(const ExperimentConfig& cfg, const std::string& dir);

// Reference polygon for a flat-substrate front-tracking run.
Polyline fronttrack_reference(const ExperimentConfig& cfg, const KernelTriple& k, double area);

// Area-weighted centroid of {phi >= 0}.
Vec2 region_centroid(const ScalarField& f);

}  // namespace wettix
