#pragma once

#include <vector>

#include "wettix/fields.hpp"
#include "wettix/kernels.hpp"

namespace wettix {

enum class Comparison { NonStrict, Strict };
// Midpoint: value halfway across the exit gap, as in the sorting loop.
// Interpolated: piecewise-linear in mu between consecutive midpoint values.
enum class Selection { Midpoint, Interpolated };
enum class Viewpoint { L, V };

/// Node values of phi_L, phi_V, phi_S packed together for locality.
struct PackedNode {
  double L, V, S;
};
std::vector<PackedNode> pack_state(const LevelSetState& st);

/**
 * Precomputed stencil taps: every offset lands at the same fractional
 * position inside a cell for every node, so the integer shift and the
 * bilinear weights are shared.
 */
class GatherPlan {
 public:
  GatherPlan(const StencilSet& st, Grid2D grid);

  size_t size() const { return taps_.size(); }
  const Grid2D& grid() const { return grid_; }
  double mass_VL() const { return mass_vl_; }
  const std::vector<double>& w_VL() const { return wvl_; }
  const std::vector<double>& w_LS() const { return wls_; }
  const std::vector<double>& w_VS() const { return wvs_; }

  // Samples all taps of node (i,j); out arrays have size() entries.
  void gather(const PackedNode* f, int i, int j, double* L, double* V, double* S) const;
  // Min and max of phi_L over the taps of (i,j).
  void range_L(const PackedNode* f, int i, int j, double& lo, double& hi) const;

 private:
  struct Tap {
    int di, dj;
    double w00, w10, w01, w11;
  };
  int wx(int i) const { return wrap_[i + pad_]; }

  Grid2D grid_;
  std::vector<Tap> taps_;
  std::vector<double> wvl_, wls_, wvs_;
  double mass_vl_ = 0.0;
  int pad_ = 0;
  std::vector<int> wrap_;
};

/// Sorted neighbour values and the running maximum of the selection sum.
struct SortedNode {
  std::vector<double> v;   // m ascending values
  std::vector<double> pm;  // m+1 prefix maxima of D
  std::vector<int> order;  // scratch
  std::vector<double> L, V, S;  // scratch samples
};

// Sorts the viewpoint's samples and accumulates
// D[0] = -|K^VL|, D[k] = D[k-1] + increment of the k-th smallest sample.
void prepare_node(const GatherPlan& plan, const PackedNode* f, int i, int j, Viewpoint vp,
                  SortedNode& out);
// Same from explicit samples (primary = own phase, other = opposite phase).
void prepare_samples(const GatherPlan& plan, const double* primary, const double* other,
                     const double* solid, Viewpoint vp, SortedNode& out);

struct SelectInfo {
  int exit = 0;  // 1-based loop exit index
  double span_lo = 0.0, span_hi = 0.0;  // interval the returned value can move in
  bool saturated = false;  // exit at 1 or m+1
};

double select_value(const double* v, const double* pm, int m, double mu, Comparison cmp,
                    Selection sel, double dx, SelectInfo* info = nullptr);

// Unclamped updated value at one node.
double median_update_point(const GatherPlan& plan, const PackedNode* f, int i, int j, double mu,
                           Viewpoint vp, Comparison cmp, Selection sel,
                           SelectInfo* info = nullptr);

/// Brute-force decision whether node (i,j) belongs to the updated level-lambda
/// set: psi = sum_V w^VL - sum_L w^VL + sum_S (w^LS - w^VS) - mu, in iff psi <= 0
/// (LS and VS swap roles for the V viewpoint).
struct OracleDecision {
  bool in;
  double psi;
};
OracleDecision level_decision_oracle(const GatherPlan& plan, const PackedNode* f, int i, int j,
                                     double mu, double lambda, Viewpoint vp);
OracleDecision level_decision_samples(const GatherPlan& plan, const double* primary,
                                      const double* other, const double* solid, double mu,
                                      double lambda, Viewpoint vp);

// Value implied by the oracle: exit at the first gap (in sorted order) whose
// midpoint is decided out, then the same midpoint/boundary conventions.
// Strict comparison decides in only when psi < 0.
double oracle_sup_value(const GatherPlan& plan, const double* primary, const double* other,
                        const double* solid, double mu, Viewpoint vp, Comparison cmp, double dx,
                        int* exit = nullptr);

}  // namespace wettix
