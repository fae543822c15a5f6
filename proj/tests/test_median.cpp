#include "doctest.h"

#include <algorithm>
#include <random>

#include "support.hpp"
#include "wettix/errors.hpp"
#include "wettix/median.hpp"

using namespace wettix;
using namespace wettix::testing;

namespace {

// Four samples with unit VL weights; LS and VS weights given.
StencilSet unit_four(double wls = 1.0, double wvs = 1.0) {
  Stencil vl, ls, vs;
  const Vec2 offs[4] = {{0.01, 0}, {-0.01, 0}, {0, 0.01}, {0, -0.01}};
  for (const Vec2& o : offs) {
    vl.entries.push_back({o, 1.0});
    ls.entries.push_back({o, wls});
    vs.entries.push_back({o, wvs});
  }
  vl.mass = 4, ls.mass = 4 * wls, vs.mass = 4 * wvs;
  ls.label = Interface::LS, vs.label = Interface::VS;
  return make_stencil_set(vl, ls, vs);
}

double run_select(const GatherPlan& plan, const double* p, const double* o, const double* s,
                  double mu, Comparison cmp, Selection sel, Viewpoint vp = Viewpoint::L,
                  SelectInfo* info = nullptr) {
  SortedNode node;
  prepare_samples(plan, p, o, s, vp, node);
  return select_value(node.v.data(), node.pm.data(), int(plan.size()), mu, cmp, sel,
                      plan.grid().dx, info);
}

}  // namespace

TEST_CASE("hand trace of the sorting loop") {
  const GatherPlan plan(unit_four(), Grid2D(100));
  const double L[4] = {3, 1, 4, 2}, V[4] = {0, 0, 0, 0}, S[4] = {-1, -1, -1, -1};
  CHECK(run_select(plan, L, V, S, 0.0, Comparison::NonStrict, Selection::Midpoint) == 3.5);
  CHECK(run_select(plan, L, V, S, 0.0, Comparison::Strict, Selection::Midpoint) == 2.5);
  // D = (-4, -2, 0, 2, 4). The interpolated rule rises from mid(l-1) to mid(l)
  // while mu crosses [D[l-2], D[l-1]).
  CHECK(run_select(plan, L, V, S, 0.0, Comparison::NonStrict, Selection::Interpolated) == 2.5);
  CHECK(run_select(plan, L, V, S, 1.0, Comparison::NonStrict, Selection::Interpolated) == 3.0);
  CHECK(run_select(plan, L, V, S, 2.0 - 1e-12, Comparison::NonStrict, Selection::Interpolated) ==
        doctest::Approx(3.5));
}

TEST_CASE("oracle examples") {
  const GatherPlan plan(unit_four(), Grid2D(100));
  const double L[4] = {3, 1, 4, 2}, V[4] = {0, 0, 0, 0}, S[4] = {-1, -1, -1, -1};
  auto below = level_decision_samples(plan, L, V, S, 0.0, 0.0, Viewpoint::L);
  CHECK(below.in);
  CHECK(below.psi == -4.0);
  auto above = level_decision_samples(plan, L, V, S, 0.0, 10.0, Viewpoint::L);
  CHECK_FALSE(above.in);
  CHECK(above.psi == 4.0);
  auto tie = level_decision_samples(plan, L, V, S, 0.0, 2.5, Viewpoint::L);
  CHECK(tie.psi == 0.0);
  CHECK(tie.in);
  // The sup value of the oracle reproduces the hand trace.
  CHECK(oracle_sup_value(plan, L, V, S, 0.0, Viewpoint::L, Comparison::NonStrict, 0.01) == 3.5);
  CHECK(oracle_sup_value(plan, L, V, S, 0.0, Viewpoint::L, Comparison::Strict, 0.01) == 2.5);
}

TEST_CASE("equal samples return their common value") {
  const GatherPlan plan(unit_four(), Grid2D(100));
  const double L[4] = {0.7, 0.7, 0.7, 0.7}, V[4] = {0, 0, 0, 0}, S[4] = {-1, -1, -1, -1};
  // All four samples share one value, so any internal exit lands on it.
  SelectInfo info;
  const double v = run_select(plan, L, V, S, 0.5, Comparison::NonStrict, Selection::Midpoint,
                              Viewpoint::L, &info);
  if (!info.saturated) CHECK(v == 0.7);
}

TEST_CASE("saturated exits step one dx past the extreme sample") {
  const GatherPlan plan(unit_four(), Grid2D(100));
  const double L[4] = {3, 1, 4, 2}, V[4] = {0, 0, 0, 0}, S[4] = {-1, -1, -1, -1};
  SelectInfo info;
  CHECK(run_select(plan, L, V, S, -5.0, Comparison::NonStrict, Selection::Midpoint, Viewpoint::L, &info) ==
        doctest::Approx(1 - 0.01));
  CHECK(info.exit == 1);
  CHECK(info.saturated);
  CHECK(run_select(plan, L, V, S, 5.0, Comparison::NonStrict, Selection::Midpoint, Viewpoint::L, &info) ==
        doctest::Approx(4 + 0.01));
  CHECK(info.exit == 5);
}

TEST_CASE("solid samples use the LS and VS weights") {
  // LS heavier than VS: a solid sample below lambda pushes psi up for L and
  // down for V.
  const GatherPlan plan(unit_four(2.0, 0.5), Grid2D(100));
  const double L[4] = {-1, 1, 1, 1}, V[4] = {-2, -1, -1, -1}, S[4] = {0.5, -1, -1, -1};
  const auto dl = level_decision_samples(plan, L, V, S, 0.0, 0.0, Viewpoint::L);
  CHECK(dl.psi == doctest::Approx(-3 + 1.5));
  const auto dv = level_decision_samples(plan, V, L, S, 0.0, -1.5, Viewpoint::V);
  CHECK(dv.psi == doctest::Approx(-3 - 1.5));
}

TEST_CASE("empty stencil is a configuration error") {
  StencilSet empty;
  CHECK_THROWS_AS(GatherPlan(empty, Grid2D(16)), ConfigError);
}

TEST_CASE("median update equals the oracle sup value on random states") {
  std::mt19937_64 rng(21);
  const KernelSet ks[2] = {mixed_kernels(), nesting_kernels()};
  long mismatches = 0, checked = 0;
  for (int s = 0; s < 8; ++s) {
    const Grid2D g(48);
    const LevelSetState st = random_state(g, rng);
    const StepParams p = params_for(ks[s % 2], 2e-4);
    const GatherPlan plan(p.stencils, g);
    const auto packed = pack_state(st);
    std::uniform_int_distribution<int> node(0, g.n - 1);
    std::uniform_real_distribution<double> mu(-0.5 * plan.mass_VL(), 0.5 * plan.mass_VL());
    std::vector<double> L(plan.size()), V(plan.size()), S(plan.size());
    for (int t = 0; t < 150; ++t) {
      const int i = node(rng), j = node(rng);
      const double m = mu(rng);
      const Viewpoint vp = t % 2 ? Viewpoint::L : Viewpoint::V;
      const Comparison cmp = t % 3 ? Comparison::NonStrict : Comparison::Strict;
      plan.gather(packed.data(), i, j, L.data(), V.data(), S.data());
      const double* prim = vp == Viewpoint::L ? L.data() : V.data();
      const double* oth = vp == Viewpoint::L ? V.data() : L.data();
      int exit = 0;
      const double want = oracle_sup_value(plan, prim, oth, S.data(), m, vp, cmp, g.dx, &exit);
      SelectInfo info;
      const double got = median_update_point(plan, packed.data(), i, j, m, vp, cmp, Selection::Midpoint, &info);
      ++checked;
      if (got != want || info.exit != exit) ++mismatches;
      // The interpolated value lies between the previous and current midpoints.
      SelectInfo ii;
      const double interp = median_update_point(plan, packed.data(), i, j, m, vp, cmp, Selection::Interpolated, &ii);
      CHECK(ii.exit == exit);
      if (!ii.saturated) {
        CHECK(interp >= ii.span_lo);
        CHECK(interp <= want);
      }
    }
  }
  CHECK(checked == 1200);
  CHECK(mismatches == 0);
}

TEST_CASE("update is non-decreasing in mu") {
  std::mt19937_64 rng(4);
  const Grid2D g(40);
  const LevelSetState st = random_state(g, rng);
  const StepParams p = params_for(mixed_kernels(), 2e-4);
  const GatherPlan plan(p.stencils, g);
  const auto packed = pack_state(st);
  for (Selection sel : {Selection::Midpoint, Selection::Interpolated})
    for (int t = 0; t < 100; ++t) {
      const int i = t % g.n, j = (7 * t) % g.n;
      double prev = -INFINITY;
      for (int k = -40; k <= 40; ++k) {
        const double mu = k * plan.mass_VL() / 20;
        const double v = median_update_point(plan, packed.data(), i, j, mu, Viewpoint::L,
                                             Comparison::NonStrict, sel);
        CHECK(v >= prev);
        prev = v;
      }
    }
}

TEST_CASE("decided sets nest in lambda for kernels satisfying the nesting conditions") {
  std::mt19937_64 rng(8);
  const KernelSet k = nesting_kernels();
  const StepParams p = params_for(k, 2e-4);
  CHECK(triangle_check(p.stencils.VL, p.stencils.LS, p.stencils.VS).nesting_conditions);
  const Grid2D g(48);
  const GatherPlan plan(p.stencils, g);
  long violations = 0;
  for (int s = 0; s < 5; ++s) {
    const LevelSetState st = random_state(g, rng);
    const auto packed = pack_state(st);
    std::uniform_int_distribution<int> node(0, g.n - 1);
    std::uniform_real_distribution<double> lam(-0.4, 0.4), mu(-0.3, 0.3);
    for (int t = 0; t < 100; ++t) {
      const int i = node(rng), j = node(rng);
      double l1 = lam(rng), l2 = lam(rng);
      if (l1 < l2) std::swap(l1, l2);
      const double m = mu(rng) * plan.mass_VL();
      const Viewpoint vp = t % 2 ? Viewpoint::L : Viewpoint::V;
      const bool in1 = level_decision_oracle(plan, packed.data(), i, j, m, l1, vp).in;
      const bool in2 = level_decision_oracle(plan, packed.data(), i, j, m, l2, vp).in;
      if (in1 && !in2) ++violations;
    }
  }
  CHECK(violations == 0);
}
