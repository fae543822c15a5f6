#include "wettix/threshold.hpp"

#include <algorithm>
#include <cmath>

#include "wettix/errors.hpp"
#include "wettix/parallel.hpp"

namespace wettix {

double BinaryPartition::liquid_area() const {
  size_t c = 0;
  for (uint8_t x : L) c += x;
  return double(c) * grid.dx * grid.dx;
}

BinaryPartition partition_from_state(const LevelSetState& st) {
  BinaryPartition p;
  p.grid = st.phi_L.grid;
  p.L.resize(p.grid.size());
  p.S.resize(p.grid.size());
  for (size_t k = 0; k < p.grid.size(); ++k) {
    p.S[k] = st.phi_S.v[k] >= 0;
    p.L[k] = !p.S[k] && st.phi_L.v[k] >= 0;
  }
  return p;
}

NearestPlan::NearestPlan(const StencilSet& st, Grid2D grid) : grid_(grid) {
  for (size_t k = 0; k < st.size(); ++k) {
    const Vec2 o = st.VL.entries[k].offset;
    di_.push_back(int(std::lround(o.x * grid.n)));
    dj_.push_back(int(std::lround(o.y * grid.n)));
    wvl_.push_back(st.VL.entries[k].weight);
    wls_.push_back(st.LS.entries[k].weight);
    wvs_.push_back(st.VS.entries[k].weight);
    mass_ += st.VL.entries[k].weight;
  }
}

namespace {

double psi0(const NearestPlan& plan, const BinaryPartition& part, int i, int j) {
  double psi = 0.0;
  for (size_t k = 0; k < plan.size(); ++k) {
    const size_t q = plan.node(i, j, k);
    if (part.L[q])
      psi -= plan.w_VL()[k];
    else if (part.S[q])
      psi += plan.w_LS()[k] - plan.w_VS()[k];
    else
      psi += plan.w_VL()[k];
  }
  return psi;
}

}  // namespace

TdDecision decide(const NearestPlan& plan, const BinaryPartition& part, int i, int j, double mu) {
  if (part.S[part.grid.index(i, j)]) throw ConfigError("decide: node lies in the solid");
  const double psi = psi0(plan, part, i, j) - mu;
  return {psi <= 0.0, psi};
}

TdDecision decide_shared(const GatherPlan& plan, const PackedNode* f, int i, int j, double mu) {
  if (f[plan.grid().index(i, j)].S >= 0) throw ConfigError("decide: node lies in the solid");
  const OracleDecision d = level_decision_oracle(plan, f, i, j, mu, 0.0, Viewpoint::L);
  return {d.in, d.psi};
}

TdStepResult td_step(const BinaryPartition& part, const StencilSet& st, double A, double mu_tol,
                     std::optional<double> fixed_mu, int threads) {
  const Grid2D g = part.grid;
  const NearestPlan plan(st, g);
  const int n = g.n;
  std::vector<double> psi(g.size(), INFINITY);
  size_t free_nodes = 0;
  for (uint8_t s : part.S) free_nodes += !s;
  if (!fixed_mu && A > double(free_nodes) * g.dx * g.dx)
    throw MultiplierNotBracketed("td_step: target area exceeds the non-solid area");
#pragma omp parallel for schedule(static) num_threads(team_size(threads))
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const size_t q = size_t(j) * n + i;
      if (!part.S[q]) psi[q] = psi0(plan, part, i, j);
    }
  auto apply = [&](double mu, TdStepResult& r) {
    r.part = part;
    size_t c = 0;
    for (size_t q = 0; q < g.size(); ++q) {
      r.part.L[q] = !part.S[q] && psi[q] <= mu;
      c += r.part.L[q];
    }
    r.mu = mu;
    r.area = double(c) * g.dx * g.dx;
  };
  auto area_at = [&](double mu) {
    size_t c = 0;
    for (size_t q = 0; q < g.size(); ++q) c += psi[q] <= mu;
    return double(c) * g.dx * g.dx;
  };
  TdStepResult r;
  if (fixed_mu) {
    apply(*fixed_mu, r);
    return r;
  }
  double lo = -2 * plan.mass_VL(), hi = 2 * plan.mass_VL();
  for (int d = 0; area_at(lo) > A; ++d) {
    if (d == 40) throw MultiplierNotBracketed("td_step: cannot bracket mu from below");
    lo -= hi - lo;
  }
  for (int d = 0; area_at(hi) < A; ++d) {
    if (d == 40) throw MultiplierNotBracketed("td_step: cannot bracket mu from above");
    hi += hi - lo;
  }
  double best = lo, best_err = std::abs(area_at(lo) - A);
  int it = 0;
  for (; it < 64 && best_err > mu_tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double a = area_at(mid);
    if (std::abs(a - A) < best_err) best = mid, best_err = std::abs(a - A);
    if (a < A)
      lo = mid;
    else
      hi = mid;
  }
  apply(best, r);
  r.iterations = it;
  return r;
}

double nonlocal_energy(const BinaryPartition& part, const StencilSet& st, double kernel_dt) {
  const Grid2D g = part.grid;
  const NearestPlan plan(st, g);
  if (kernel_dt <= 0.0) kernel_dt = st.VL.dt;
  double total = 0.0;
  for (int j = 0; j < g.n; ++j) {
    double row = 0.0;
    for (int i = 0; i < g.n; ++i) {
      if (!part.L[size_t(j) * g.n + i]) continue;
      for (size_t k = 0; k < plan.size(); ++k) {
        const size_t q = plan.node(i, j, k);
        if (part.S[q])
          row += plan.w_LS()[k] - plan.w_VS()[k] - plan.w_VL()[k];
        else if (part.L[q])
          row -= plan.w_VL()[k];
      }
    }
    total += row;
  }
  return total * g.dx * g.dx / std::sqrt(kernel_dt);
}

}  // namespace wettix
