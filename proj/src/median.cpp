#include "wettix/median.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wettix/errors.hpp"

namespace wettix {

std::vector<PackedNode> pack_state(const LevelSetState& st) {
  std::vector<PackedNode> p(st.phi_L.v.size());
  for (size_t k = 0; k < p.size(); ++k) p[k] = {st.phi_L.v[k], st.phi_V.v[k], st.phi_S.v[k]};
  return p;
}

GatherPlan::GatherPlan(const StencilSet& st, Grid2D grid) : grid_(grid) {
  if (st.size() == 0) throw ConfigError("empty stencil");
  const double n = grid.n;
  int reach = 0;
  for (size_t k = 0; k < st.size(); ++k) {
    const Vec2 o = st.VL.entries[k].offset;
    const double ux = o.x * n, uy = o.y * n;
    const double fx = std::floor(ux), fy = std::floor(uy);
    const double tx = ux - fx, ty = uy - fy;
    Tap t{int(fx), int(fy), (1 - tx) * (1 - ty), tx * (1 - ty), (1 - tx) * ty, tx * ty};
    taps_.push_back(t);
    reach = std::max({reach, std::abs(t.di) + 1, std::abs(t.dj) + 1});
    wvl_.push_back(st.VL.entries[k].weight);
    wls_.push_back(st.LS.entries[k].weight);
    wvs_.push_back(st.VS.entries[k].weight);
    mass_vl_ += st.VL.entries[k].weight;
  }
  pad_ = reach + 1;
  wrap_.resize(size_t(grid.n + 2 * pad_ + 2));
  for (int i = -pad_; i < grid.n + pad_ + 2; ++i) wrap_[size_t(i + pad_)] = grid.wrap(i);
}

void GatherPlan::gather(const PackedNode* f, int i, int j, double* L, double* V,
                        double* S) const {
  const int n = grid_.n;
  for (size_t k = 0; k < taps_.size(); ++k) {
    const Tap& t = taps_[k];
    const int i0 = wx(i + t.di), i1 = wx(i + t.di + 1);
    const size_t r0 = size_t(wx(j + t.dj)) * n, r1 = size_t(wx(j + t.dj + 1)) * n;
    const PackedNode& a = f[r0 + i0];
    const PackedNode& b = f[r0 + i1];
    const PackedNode& c = f[r1 + i0];
    const PackedNode& d = f[r1 + i1];
    L[k] = t.w00 * a.L + t.w10 * b.L + t.w01 * c.L + t.w11 * d.L;
    V[k] = t.w00 * a.V + t.w10 * b.V + t.w01 * c.V + t.w11 * d.V;
    S[k] = t.w00 * a.S + t.w10 * b.S + t.w01 * c.S + t.w11 * d.S;
  }
}

void GatherPlan::range_L(const PackedNode* f, int i, int j, double& lo, double& hi) const {
  const int n = grid_.n;
  lo = INFINITY;
  hi = -INFINITY;
  for (const Tap& t : taps_) {
    const int i0 = wx(i + t.di), i1 = wx(i + t.di + 1);
    const size_t r0 = size_t(wx(j + t.dj)) * n, r1 = size_t(wx(j + t.dj + 1)) * n;
    const double v = t.w00 * f[r0 + i0].L + t.w10 * f[r0 + i1].L + t.w01 * f[r1 + i0].L +
                     t.w11 * f[r1 + i1].L;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
}

namespace {

// Increment of the selection sum when sample k leaves the phase.
inline double increment(const GatherPlan& p, size_t k, double other, double solid,
                        Viewpoint vp) {
  const double wvl = p.w_VL()[k];
  if (other >= solid) return 2 * wvl;
  return vp == Viewpoint::L ? p.w_LS()[k] + wvl - p.w_VS()[k] : p.w_VS()[k] + wvl - p.w_LS()[k];
}

}  // namespace

void prepare_samples(const GatherPlan& plan, const double* primary, const double* other,
                     const double* solid, Viewpoint vp, SortedNode& out) {
  const size_t m = plan.size();
  out.order.resize(m);
  std::iota(out.order.begin(), out.order.end(), 0);
  std::sort(out.order.begin(), out.order.end(), [&](int a, int b) {
    return primary[a] < primary[b] || (primary[a] == primary[b] && a < b);
  });
  out.v.resize(m);
  out.pm.resize(m + 1);
  for (size_t k = 0; k < m; ++k) out.v[k] = primary[out.order[k]];
  double d = -plan.mass_VL();
  double pm = d;
  out.pm[0] = pm;
  // Equal samples enter together: partial sums inside a tie depend on the
  // tie order, and the level-set decision only sees gaps between distinct values.
  for (size_t k = 0; k < m; ++k) {
    const int s = out.order[k];
    d += increment(plan, size_t(s), other[s], solid[s], vp);
    if (k + 1 == m || out.v[k + 1] != out.v[k]) pm = std::max(pm, d);
    out.pm[k + 1] = pm;
  }
}

void prepare_node(const GatherPlan& plan, const PackedNode* f, int i, int j, Viewpoint vp,
                  SortedNode& out) {
  const size_t m = plan.size();
  out.L.resize(m);
  out.V.resize(m);
  out.S.resize(m);
  plan.gather(f, i, j, out.L.data(), out.V.data(), out.S.data());
  if (vp == Viewpoint::L)
    prepare_samples(plan, out.L.data(), out.V.data(), out.S.data(), vp, out);
  else
    prepare_samples(plan, out.V.data(), out.L.data(), out.S.data(), vp, out);
}

double select_value(const double* v, const double* pm, int m, double mu, Comparison cmp,
                    Selection sel, double dx, SelectInfo* info) {
  // Exit index l: first l with D[l-1] > mu (>= mu when strict) among the m
  // comparisons; l = m+1 when every sample is consumed.
  const double* end = pm + m;
  const double* it = cmp == Comparison::NonStrict ? std::upper_bound(pm, end, mu)
                                                  : std::lower_bound(pm, end, mu);
  const int l = int(it - pm) + 1;
  auto mid = [&](int e) {
    if (e <= 1) return v[0] - dx;
    if (e >= m + 1) return v[m - 1] + dx;
    return 0.5 * (v[e - 2] + v[e - 1]);
  };
  double value, lo, hi;
  if (sel == Selection::Midpoint || l == 1) {
    value = mid(l);
    lo = l == 1 ? -INFINITY : v[l - 2];
    hi = l == m + 1 ? INFINITY : v[l - 1];
    if (sel == Selection::Interpolated) lo = -INFINITY, hi = mid(1);
  } else {
    const double k0 = pm[l - 2];
    const double k1 = l == m + 1 ? pm[m] : pm[l - 1];
    const double a = mid(l - 1), b = mid(l);
    if (k1 > k0 && mu < k1) {
      const double t = (mu - k0) / (k1 - k0);
      value = a + t * (b - a);
    } else {
      value = b;
    }
    lo = a;
    hi = b;
    if (l == m + 1 && !(mu < k1)) lo = b, hi = INFINITY;
  }
  if (info) {
    info->exit = l;
    info->span_lo = lo;
    info->span_hi = hi;
    info->saturated = l == 1 || l == m + 1;
  }
  return value;
}

double median_update_point(const GatherPlan& plan, const PackedNode* f, int i, int j, double mu,
                           Viewpoint vp, Comparison cmp, Selection sel, SelectInfo* info) {
  thread_local SortedNode node;
  prepare_node(plan, f, i, j, vp, node);
  return select_value(node.v.data(), node.pm.data(), int(plan.size()), mu, cmp, sel,
                      plan.grid().dx, info);
}

OracleDecision level_decision_samples(const GatherPlan& plan, const double* primary,
                                      const double* other, const double* solid, double mu,
                                      double lambda, Viewpoint vp) {
  const auto& wvl = plan.w_VL();
  const auto& wown = vp == Viewpoint::L ? plan.w_LS() : plan.w_VS();
  const auto& wopp = vp == Viewpoint::L ? plan.w_VS() : plan.w_LS();
  double psi = -mu;
  for (size_t k = 0; k < plan.size(); ++k) {
    if (primary[k] >= lambda)
      psi -= wvl[k];
    else if (other[k] >= solid[k])
      psi += wvl[k];
    else
      psi += wown[k] - wopp[k];
  }
  return {psi <= 0.0, psi};
}

OracleDecision level_decision_oracle(const GatherPlan& plan, const PackedNode* f, int i, int j,
                                     double mu, double lambda, Viewpoint vp) {
  const size_t m = plan.size();
  std::vector<double> L(m), V(m), S(m);
  plan.gather(f, i, j, L.data(), V.data(), S.data());
  return vp == Viewpoint::L ? level_decision_samples(plan, L.data(), V.data(), S.data(), mu, lambda, vp)
                            : level_decision_samples(plan, V.data(), L.data(), S.data(), mu, lambda, vp);
}

double oracle_sup_value(const GatherPlan& plan, const double* primary, const double* other,
                        const double* solid, double mu, Viewpoint vp, Comparison cmp, double dx,
                        int* exit) {
  const int m = int(plan.size());
  std::vector<double> v(primary, primary + m);
  std::sort(v.begin(), v.end());
  auto decided_in = [&](double lambda) {
    OracleDecision d = level_decision_samples(plan, primary, other, solid, mu, lambda, vp);
    return cmp == Comparison::NonStrict ? d.psi <= 0.0 : d.psi < 0.0;
  };
  // Gap k holds lambda with exactly k samples below it.
  int l = m + 1;
  for (int k = 0; k < m; ++k) {
    double lambda = k == 0 ? v[0] - 1.0 : 0.5 * (v[k - 1] + v[k]);
    // Adjacent doubles: the midpoint rounds onto v[k-1].
    if (k > 0 && lambda <= v[k - 1]) lambda = v[k];
    if (!decided_in(lambda)) {
      l = k + 1;
      break;
    }
  }
  if (exit) *exit = l;
  if (l == 1) return v[0] - dx;
  if (l == m + 1) return v[m - 1] + dx;
  return 0.5 * (v[l - 2] + v[l - 1]);
}

}  // namespace wettix
