#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "wettix/fields.hpp"
#include "wettix/kernels.hpp"
#include "wettix/median.hpp"

namespace wettix {

/// Liquid and solid node masks; vapor is the rest.
struct BinaryPartition {
  Grid2D grid;
  std::vector<uint8_t> L, S;

  double liquid_area() const;
};

BinaryPartition partition_from_state(const LevelSetState& st);

/// Off-grid samples are assigned the phase of the nearest node.
class NearestPlan {
 public:
  NearestPlan(const StencilSet& st, Grid2D grid);
  size_t size() const { return di_.size(); }
  size_t node(int i, int j, size_t k) const { return grid_.index(i + di_[k], j + dj_[k]); }
  const std::vector<double>& w_VL() const { return wvl_; }
  const std::vector<double>& w_LS() const { return wls_; }
  const std::vector<double>& w_VS() const { return wvs_; }
  double mass_VL() const { return mass_; }

 private:
  Grid2D grid_;
  std::vector<int> di_, dj_;
  std::vector<double> wvl_, wls_, wvs_;
  double mass_ = 0.0;
};

struct TdDecision {
  bool liquid;
  double psi;  // sum_V w^VL - sum_L w^VL + sum_S (w^LS - w^VS) - mu
};

// Throws ConfigError when (i,j) is solid.
TdDecision decide(const NearestPlan& plan, const BinaryPartition& part, int i, int j, double mu);

// Same decision with samples classified by bilinear phi_L, phi_V, phi_S, the
// routine the median filter uses. Node must not be solid.
TdDecision decide_shared(const GatherPlan& plan, const PackedNode* f, int i, int j, double mu);

struct TdStepResult {
  BinaryPartition part;
  double mu = 0.0;
  double area = 0.0;
  int iterations = 0;
};

// Bisection on mu for a node-counted area within mu_tol of A (best effort:
// counted areas are multiples of dx^2). fixed_mu skips the constraint.
TdStepResult td_step(const BinaryPartition& part, const StencilSet& st, double A, double mu_tol,
                     std::optional<double> fixed_mu = std::nullopt, int threads = 0);

// Stencil quadrature of the threshold-dynamics energy with prefactor
// 1/sqrt(kernel_dt); kernel_dt <= 0 uses the stencils' own time.
double nonlocal_energy(const BinaryPartition& part, const StencilSet& st, double kernel_dt = 0.0);

}  // namespace wettix
