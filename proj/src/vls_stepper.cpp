#include "wettix/vls_stepper.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "wettix/errors.hpp"
#include "wettix/parallel.hpp"
#include "wettix/threshold.hpp"

namespace wettix {

StepParams resolve_params(const StepParams& in, const Grid2D& grid) {
  StepParams p = in;
  if (!(p.dt > 0.0)) throw ConfigError("step: dt must be positive");
  if (!(p.time_scale > 0.0)) throw ConfigError("step: time_scale must be positive");
  if (p.stencils.size() == 0) throw ConfigError("step: empty stencil");
  const double tau = p.time_scale * p.dt;
  for (const Stencil* s : {&p.stencils.VL, &p.stencils.LS, &p.stencils.VS})
    if (std::abs(s->dt - tau) > 1e-12 * tau)
      throw ConfigError("step: stencils were not discretized at time_scale * dt");
  const double mass = p.stencils.VL.mass;
  if (std::isnan(p.mu_lo)) p.mu_lo = -2 * mass;
  if (std::isnan(p.mu_hi)) p.mu_hi = 2 * mass;
  if (!(p.mu_hi > p.mu_lo)) throw ConfigError("step: mu bracket must satisfy lo < hi");
  if (std::isnan(p.mu_tol)) p.mu_tol = grid.dx * grid.dx / 10;
  if (!(p.mu_tol > 0.0)) throw ConfigError("step: mu_tol must be positive");
  if (p.band == 0.0) p.band = 1.5 * p.stencils.max_radius() + 3 * grid.dx;
  if (!std::isnan(p.band) && !(p.band > 0.0)) throw ConfigError("step: band must be positive");
  return p;
}

StencilSet make_step_stencils(const CircleKernel& vl, const CircleKernel& ls,
                              const CircleKernel& vs, double dt, double time_scale) {
  const double tau = time_scale * dt;
  return make_stencil_set(discretize(vl, tau, Interface::VL), discretize(ls, tau, Interface::LS),
                          discretize(vs, tau, Interface::VS));
}

namespace {

struct MuSolution {
  double mu;
  double area;
  int iterations;
  bool met;
};

// Bracket expansion by doubling, then bisection on the monotone a(mu).
MuSolution solve_mu(const std::function<double(double)>& area, double A, const StepParams& p) {
  double lo = p.mu_lo, hi = p.mu_hi;
  double alo = area(lo), ahi = area(hi);
  for (int d = 0; alo > A + p.mu_tol; ++d) {
    if (d == p.max_doublings)
      throw MultiplierNotBracketed("mu bracket cannot reach area " + std::to_string(A) +
                                   " from below");
    const double w = hi - lo;
    hi = lo, ahi = alo;
    lo -= 2 * w;
    alo = area(lo);
  }
  for (int d = 0; ahi < A - p.mu_tol; ++d) {
    if (d == p.max_doublings)
      throw MultiplierNotBracketed("mu bracket cannot reach area " + std::to_string(A) +
                                   " (target exceeds the attainable liquid area)");
    const double w = hi - lo;
    lo = hi, alo = ahi;
    hi += 2 * w;
    ahi = area(hi);
  }
  MuSolution best{lo, alo, 0, false};
  if (std::abs(ahi - A) < std::abs(alo - A)) best = {hi, ahi, 0, false};
  if (std::abs(best.area - A) <= p.mu_tol) {
    best.met = true;
    return best;
  }
  int it = 0;
  while (it < p.max_bisect) {
    ++it;
    const double mid = 0.5 * (lo + hi);
    const double a = area(mid);
    if (std::abs(a - A) < std::abs(best.area - A)) best = {mid, a, 0, false};
    if (std::abs(a - A) <= p.mu_tol) break;
    if (a < A)
      lo = mid;
    else
      hi = mid;
  }
  best.iterations = it;
  best.met = std::abs(best.area - A) <= p.mu_tol;
  return best;
}

std::vector<uint8_t> active_mask(const LevelSetState& st, const StepParams& p) {
  std::vector<uint8_t> a(st.phi_L.v.size(), 1);
  if (std::isnan(p.band)) return a;
  const Grid2D& g = st.phi_L.grid;
  const int n = g.n;
  // The median update does not keep phi a distance function, so a node next
  // to a sign change can carry |phi| > band. Nodes within the stencil reach
  // of a sign change of either field are active as well; farther out every
  // sample has one sign, so no node there can change sign in this step.
  std::vector<uint8_t> seed(a.size(), 0);
  for (const ScalarField* f : {&st.phi_L, &st.phi_V})
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const bool s = f->at(i, j) >= 0;
        if (s != (f->at(i + 1, j) >= 0) || s != (f->at(i, j + 1) >= 0)) {
          seed[g.index(i, j)] = 1;
          seed[g.index(i + 1, j)] = 1;
          seed[g.index(i, j + 1)] = 1;
        }
      }
  const int r = std::min(n / 2, int(std::ceil(p.stencils.max_radius() / g.dx)) + 2);
  // Square dilation by r cells, one periodic pass per axis.
  auto dilate = [&](bool along_x) {
    std::vector<uint8_t> out(a.size(), 0);
    for (int line = 0; line < n; ++line) {
      auto at = [&](int t) -> uint8_t& {
        return along_x ? seed[g.index(t, line)] : seed[g.index(line, t)];
      };
      int count = 0;
      for (int t = -r; t <= r; ++t) count += at(t);
      for (int t = 0; t < n; ++t) {
        (along_x ? out[g.index(t, line)] : out[g.index(line, t)]) = count > 0;
        count += at(t + r + 1) - at(t - r);
      }
    }
    seed.swap(out);
  };
  dilate(true);
  dilate(false);
  for (size_t k = 0; k < a.size(); ++k)
    a[k] = seed[k] || std::abs(st.phi_L.v[k]) <= p.band || std::abs(st.phi_V.v[k]) <= p.band;
  return a;
}

constexpr size_t kBlock = 2048;

enum : int8_t { kKnownPos, kKnownNeg, kFixedPos, kFixedNeg, kCritical };

}  // namespace

StepReport step(LevelSetState& st, const StepParams& params) {
  const Grid2D g = st.phi_L.grid;
  const StepParams p = resolve_params(params, g);
  const int n = g.n;
  const size_t N = g.size();
  const int nt = team_size(p.threads);
  const GatherPlan plan(p.stencils, g);
  const int m = int(plan.size());
  const std::vector<PackedNode> packed = pack_state(st);
  const PackedNode* f = packed.data();
  const std::vector<uint8_t> active = active_mask(st, p);
  const double dx = g.dx;

  // Pass A: bound every active node's new phi_L from its sample range.
  std::vector<int8_t> cls(N);
#pragma omp parallel for schedule(dynamic, 4) num_threads(nt)
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const size_t q = size_t(j) * n + i;
      if (!active[q]) {
        cls[q] = f[q].L >= 0 ? kKnownPos : kKnownNeg;
        continue;
      }
      double lo, hi;
      plan.range_L(f, i, j, lo, hi);
      lo = std::min(lo - dx, -f[q].S);
      hi = std::min(hi + dx, -f[q].S);
      cls[q] = lo >= 0 ? kFixedPos : hi < 0 ? kFixedNeg : kCritical;
    }

  // Cells whose area can change with mu.
  auto positive = [&](size_t q) { return cls[q] == kKnownPos || cls[q] == kFixedPos; };
  std::vector<std::vector<uint32_t>> row_cells(n);
  std::vector<long> row_full(n, 0);
#pragma omp parallel for schedule(static) num_threads(nt)
  for (int j = 0; j < n; ++j) {
    const int j1 = j + 1 == n ? 0 : j + 1;
    for (int i = 0; i < n; ++i) {
      const int i1 = i + 1 == n ? 0 : i + 1;
      const size_t c[4] = {size_t(j) * n + i, size_t(j) * n + i1, size_t(j1) * n + i1,
                           size_t(j1) * n + i};
      bool crit = false;
      int npos = 0;
      for (size_t q : c) {
        crit = crit || cls[q] == kCritical;
        npos += positive(q);
      }
      if (!crit && npos == 4)
        ++row_full[j];
      else if (crit || npos != 0)
        row_cells[j].push_back(uint32_t(i));
    }
  }
  long full_cells = 0;
  std::vector<uint32_t> cells;  // linear index of lower-left corner
  for (int j = 0; j < n; ++j) {
    full_cells += row_full[j];
    for (uint32_t i : row_cells[j]) cells.push_back(uint32_t(j) * n + i);
  }

  std::vector<int32_t> slot(N, -1);
  std::vector<uint32_t> stored;
  for (uint32_t c : cells) {
    const int i = int(c % n), j = int(c / n);
    const size_t cs[4] = {g.index(i, j), g.index(i + 1, j), g.index(i + 1, j + 1),
                          g.index(i, j + 1)};
    for (size_t q : cs)
      if (active[q] && slot[q] < 0) {
        slot[q] = 0;
        stored.push_back(uint32_t(q));
      }
  }
  std::sort(stored.begin(), stored.end());
  for (size_t s = 0; s < stored.size(); ++s) slot[stored[s]] = int32_t(s);

  // Pass B: sorted samples and prefix maxima for stored nodes.
  const size_t stride = size_t(2 * m + 1);
  std::vector<double> arena(stored.size() * stride);
#pragma omp parallel num_threads(nt)
  {
    SortedNode node;
#pragma omp for schedule(dynamic, 64)
    for (long s = 0; s < long(stored.size()); ++s) {
      const int i = int(stored[s] % n), j = int(stored[s] / n);
      prepare_node(plan, f, i, j, Viewpoint::L, node);
      double* dst = arena.data() + size_t(s) * stride;
      std::copy(node.v.begin(), node.v.end(), dst);
      std::copy(node.pm.begin(), node.pm.end(), dst + m);
    }
  }

  std::vector<double> vals(stored.size());
  auto stored_value = [&](size_t s, double mu) {
    const double* a = arena.data() + s * stride;
    return std::min(select_value(a, a + m, m, mu, p.comparison, p.selection, dx),
                    -f[stored[s]].S);
  };
  const size_t nblocks = (cells.size() + kBlock - 1) / kBlock;
  std::vector<double> block_sum(nblocks);
  auto area = [&](double mu) {
#pragma omp parallel for schedule(static) num_threads(nt)
    for (long s = 0; s < long(stored.size()); ++s) vals[s] = stored_value(size_t(s), mu);
    auto value = [&](size_t q) { return slot[q] >= 0 ? vals[size_t(slot[q])] : f[q].L; };
#pragma omp parallel for schedule(static) num_threads(nt)
    for (long b = 0; b < long(nblocks); ++b) {
      double sum = 0.0;
      const size_t end = std::min(cells.size(), size_t(b + 1) * kBlock);
      for (size_t c = size_t(b) * kBlock; c < end; ++c) {
        const int i = int(cells[c] % n), j = int(cells[c] / n);
        sum += cell_area_fraction(value(g.index(i, j)), value(g.index(i + 1, j)),
                                  value(g.index(i + 1, j + 1)), value(g.index(i, j + 1)));
      }
      block_sum[b] = sum;
    }
    double total = double(full_cells);
    for (double s : block_sum) total += s;
    return total * dx * dx;
  };

  const MuSolution sol = solve_mu(area, st.target_area, p);
  const double mu = sol.mu;

  // Pass C: final values for both phases at the solved multiplier.
  std::vector<double> newL(st.phi_L.v), newV(st.phi_V.v);
  double max_d = 0.0;
#pragma omp parallel num_threads(nt) reduction(max : max_d)
  {
    SortedNode node;
#pragma omp for schedule(dynamic, 4)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const size_t q = size_t(j) * n + i;
        if (!active[q]) continue;
        double l;
        if (slot[q] >= 0) {
          l = stored_value(size_t(slot[q]), mu);
        } else {
          prepare_node(plan, f, i, j, Viewpoint::L, node);
          l = std::min(select_value(node.v.data(), node.pm.data(), m, mu, p.comparison,
                                    p.selection, dx),
                       -f[q].S);
        }
        prepare_node(plan, f, i, j, Viewpoint::V, node);
        const double v = std::min(select_value(node.v.data(), node.pm.data(), m, -mu,
                                               p.comparison, p.selection, dx),
                                  -f[q].S);
        max_d = std::max({max_d, std::abs(l - f[q].L), std::abs(v - f[q].V)});
        newL[q] = l;
        newV[q] = v;
      }
  }
  st.phi_L.v.swap(newL);
  st.phi_V.v.swap(newV);
  ++st.step_index;

  StepReport r;
  r.mu = mu;
  r.area = area_nonneg(st.phi_L);
  r.bisection_iterations = sol.iterations;
  r.max_dphi = max_d;
  r.tolerance_met = std::abs(r.area - st.target_area) <= p.mu_tol;
  r.active_nodes = size_t(std::count(active.begin(), active.end(), 1));
  r.stored_nodes = stored.size();
  return r;
}

StepReport step_reference(LevelSetState& st, const StepParams& params) {
  const Grid2D g = st.phi_L.grid;
  const StepParams p = resolve_params(params, g);
  const GatherPlan plan(p.stencils, g);
  const std::vector<PackedNode> packed = pack_state(st);
  const PackedNode* f = packed.data();
  const std::vector<uint8_t> active = active_mask(st, p);
  const int n = g.n;

  ScalarField trial = st.phi_L;
  auto fill = [&](double mu) {
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const size_t q = size_t(j) * n + i;
        if (!active[q]) continue;
        trial.v[q] = std::min(median_update_point(plan, f, i, j, mu, Viewpoint::L, p.comparison,
                                                  p.selection),
                              -f[q].S);
      }
  };
  auto area = [&](double mu) {
    fill(mu);
    return area_nonneg(trial);
  };
  const MuSolution sol = solve_mu(area, st.target_area, p);
  fill(sol.mu);
  ScalarField newV = st.phi_V;
  double max_d = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const size_t q = size_t(j) * n + i;
      if (!active[q]) continue;
      newV.v[q] = std::min(median_update_point(plan, f, i, j, -sol.mu, Viewpoint::V,
                                               p.comparison, p.selection),
                           -f[q].S);
      max_d = std::max({max_d, std::abs(trial.v[q] - f[q].L), std::abs(newV.v[q] - f[q].V)});
    }
  st.phi_L = std::move(trial);
  st.phi_V = std::move(newV);
  ++st.step_index;
  StepReport r;
  r.mu = sol.mu;
  r.area = area_nonneg(st.phi_L);
  r.bisection_iterations = sol.iterations;
  r.max_dphi = max_d;
  r.tolerance_met = std::abs(r.area - st.target_area) <= p.mu_tol;
  r.active_nodes = size_t(std::count(active.begin(), active.end(), 1));
  return r;
}

ConsistencyReport td_consistency_check(const LevelSetState& state, const StepParams& params,
                                       double mu, int trials, uint64_t seed, double td_mu_sign) {
  const Grid2D g = state.phi_L.grid;
  const StepParams p = resolve_params(params, g);
  const GatherPlan plan(p.stencils, g);
  const std::vector<PackedNode> packed = pack_state(state);
  const PackedNode* f = packed.data();
  std::vector<size_t> nodes;
  for (size_t q = 0; q < g.size(); ++q)
    if (f[q].S < 0) nodes.push_back(q);
  if (trials > 0) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<size_t> pick(0, nodes.size() - 1);
    std::vector<size_t> chosen(static_cast<size_t>(trials));
    for (size_t& c : chosen) c = nodes[pick(rng)];
    nodes.swap(chosen);
  }
  ConsistencyReport r;
  for (size_t q : nodes) {
    const int i = int(q % g.n), j = int(q / g.n);
    SelectInfo info;
    const double v =
        median_update_point(plan, f, i, j, mu, Viewpoint::L, p.comparison, p.selection, &info);
    const TdDecision d = decide_shared(plan, f, i, j, td_mu_sign * mu);
    const bool td_in = p.comparison == Comparison::NonStrict ? d.psi <= 0.0 : d.psi < 0.0;
    if (std::abs(d.psi) <= 1e-12 || (info.span_lo < 0.0 && 0.0 < info.span_hi)) {
      ++r.excluded;
      continue;
    }
    ++r.compared;
    if ((v >= 0.0) != td_in) ++r.disagreements;
  }
  return r;
}

}  // namespace wettix
