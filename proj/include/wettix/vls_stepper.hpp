#pragma once

#include <cstdint>
#include <optional>

#include "wettix/fields.hpp"
#include "wettix/kernels.hpp"
#include "wettix/median.hpp"

namespace wettix {

struct StepParams {
  double dt = 0.0;
  // Stencils are discretized at kernel time time_scale * dt.
  double time_scale = 8.0;
  StencilSet stencils;
  // Initial bracket; NaN selects +-2 |K^VL|.
  double mu_lo = NAN, mu_hi = NAN;
  // Area tolerance; NaN selects dx^2 / 10.
  double mu_tol = NAN;
  Comparison comparison = Comparison::NonStrict;
  Selection selection = Selection::Interpolated;
  // Narrow band half-width; NaN disables banding, 0 selects the default
  // 1.5 * max stencil radius + 3 dx.
  double band = NAN;
  int max_bisect = 64;
  int max_doublings = 40;
  // 0: OpenMP default team, 1: serial.
  int threads = 0;
};

struct StepReport {
  double mu = 0.0;
  double area = 0.0;
  int bisection_iterations = 0;
  double max_dphi = 0.0;
  bool tolerance_met = false;
  size_t active_nodes = 0;
  size_t stored_nodes = 0;
};

// Fills defaults that depend on the grid and stencils; validates the rest.
StepParams resolve_params(const StepParams& p, const Grid2D& grid);

// Kernel-time stencils for one physical step.
StencilSet make_step_stencils(const CircleKernel& vl, const CircleKernel& ls,
                              const CircleKernel& vs, double dt, double time_scale);

/// One median-filter step with the area constraint, clamped by -phi_S.
StepReport step(LevelSetState& state, const StepParams& params);

/// Straightforward serial version: every mu trial recomputes every active
/// node and the full subgrid area. Used to test step().
StepReport step_reference(LevelSetState& state, const StepParams& params);

struct ConsistencyReport {
  long disagreements = 0;
  long compared = 0;
  long excluded = 0;  // decision boundary inside the exit gap, or |psi_0| tiny
};

/// Compares the sign of the median update at sampled non-solid nodes with the
/// threshold decision at level 0 using the same sample classification.
/// td_mu_sign = -1 deliberately feeds the threshold side the wrong sign.
ConsistencyReport td_consistency_check(const LevelSetState& state, const StepParams& params,
                                       double mu, int trials, uint64_t seed,
                                       double td_mu_sign = 1.0);

}  // namespace wettix
