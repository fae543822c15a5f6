#include "doctest.h"

#include <cmath>
#include <map>
#include <random>

#include "support.hpp"
#include "wettix/errors.hpp"
#include "wettix/threshold.hpp"

using namespace wettix;
using namespace wettix::testing;

namespace {

BinaryPartition empty_partition(int n) {
  BinaryPartition p;
  p.grid = Grid2D(n);
  p.L.assign(p.grid.size(), 0);
  p.S.assign(p.grid.size(), 0);
  return p;
}

BinaryPartition disc_partition(int n, Vec2 c, double r) {
  BinaryPartition p = empty_partition(n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const Vec2 x = p.grid.node(i, j);
      p.L[p.grid.index(i, j)] = std::hypot(x.x - c.x, x.y - c.y) <= r;
    }
  return p;
}

// Stencil with unit weights on four axis offsets of one cell.
StencilSet cross_stencil(int n) {
  Stencil vl, ls, vs;
  const double h = 1.0 / n;
  for (Vec2 o : {Vec2{h, 0}, Vec2{-h, 0}, Vec2{0, h}, Vec2{0, -h}}) {
    vl.entries.push_back({o, 1.0});
    ls.entries.push_back({o, 1.0});
    vs.entries.push_back({o, 1.0});
  }
  vl.mass = ls.mass = vs.mass = 4;
  return make_stencil_set(vl, ls, vs);
}

// Direct double loop over node pairs: weights gathered per integer
// displacement, then every (x in L, y) pair visited.
double energy_oracle(const BinaryPartition& p, const StencilSet& st) {
  const int n = p.grid.n;
  std::map<std::pair<int, int>, std::array<double, 3>> w;
  for (size_t k = 0; k < st.size(); ++k) {
    const Vec2 o = st.VL.entries[k].offset;
    auto& e = w[{int(std::lround(o.x * n)), int(std::lround(o.y * n))}];
    e[0] += st.VL.entries[k].weight;
    e[1] += st.LS.entries[k].weight;
    e[2] += st.VS.entries[k].weight;
  }
  double total = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      if (!p.L[p.grid.index(i, j)]) continue;
      for (int b = 0; b < n; ++b)
        for (int a = 0; a < n; ++a) {
          int di = a - i, dj = b - j;
          // Smallest periodic representative.
          if (di > n / 2) di -= n;
          if (di < -n / 2) di += n;
          if (dj > n / 2) dj -= n;
          if (dj < -n / 2) dj += n;
          auto it = w.find({di, dj});
          if (it == w.end()) continue;
          const size_t q = p.grid.index(a, b);
          if (p.S[q]) total += it->second[1] - it->second[2] - it->second[0];
          else if (p.L[q]) total -= it->second[0];
        }
    }
  return total * p.grid.dx * p.grid.dx / std::sqrt(st.VL.dt);
}

}  // namespace

TEST_CASE("decide examples") {
  const StencilSet st = cross_stencil(16);
  const NearestPlan plan(st, Grid2D(16));
  BinaryPartition p = empty_partition(16);
  for (auto& x : p.L) x = 1;
  CHECK(decide(plan, p, 5, 5, 0.0).liquid);
  CHECK(decide(plan, p, 5, 5, 0.0).psi == -4.0);
  for (auto& x : p.L) x = 0;
  CHECK_FALSE(decide(plan, p, 5, 5, 0.0).liquid);
  CHECK(decide(plan, p, 5, 5, 0.0).psi == 4.0);
  // Left and right neighbours liquid, up and down vapor.
  p.L[p.grid.index(4, 5)] = p.L[p.grid.index(6, 5)] = 1;
  CHECK(decide(plan, p, 5, 5, 0.0).psi == 0.0);
  CHECK(decide(plan, p, 5, 5, 0.0).liquid);
  // Larger mu grows the liquid.
  CHECK(decide(plan, p, 5, 5, 0.5).psi == -0.5);
  p.S[p.grid.index(5, 5)] = 1;
  CHECK_THROWS_AS(decide(plan, p, 5, 5, 0.0), ConfigError);
}

TEST_CASE("constrained step keeps the solid and a stationary stripe") {
  const int n = 64;
  BinaryPartition p = empty_partition(n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      p.S[p.grid.index(i, j)] = j < 8;
      p.L[p.grid.index(i, j)] = j >= 24 && j < 40;
    }
  const StencilSet st = stencils_for(isotropic_kernels(), 1e-4);
  const TdStepResult r = td_step(p, st, p.liquid_area(), 0.5 * p.grid.dx * p.grid.dx);
  CHECK(r.part.S == p.S);
  size_t changed = 0;
  for (size_t q = 0; q < p.L.size(); ++q) {
    CHECK_FALSE((r.part.L[q] && r.part.S[q]));
    changed += r.part.L[q] != p.L[q];
  }
  CHECK(changed == 0);
  CHECK(r.area == doctest::Approx(p.liquid_area()));
  CHECK_THROWS_AS(td_step(p, st, 0.9, 1e-4), MultiplierNotBracketed);
}

TEST_CASE("unconstrained disc shrinks at the isotropic rate") {
  // At n = 400 one step moves the front 0.16 dx and node counting roughly
  // doubles the rate; at n = 800 the lattice effect is within tolerance.
  const int n = 800;
  const double dt = 1e-4;
  BinaryPartition p = disc_partition(n, {0.5, 0.5}, 0.25);
  const StencilSet st = stencils_for(isotropic_kernels(), dt);
  const double a0 = p.liquid_area();
  const int steps = 10;
  for (int s = 0; s < steps; ++s) p = td_step(p, st, 0.0, 0.0, 0.0).part;
  const double rate = (a0 - p.liquid_area()) / (steps * dt);
  CHECK(rate == doctest::Approx(2 * kPi).epsilon(0.2));
}

TEST_CASE("small stencils pin the interface") {
  const int n = 100;
  const double dt = 1e-7;
  const StencilSet st = stencils_for(isotropic_kernels(), dt);
  CHECK(st.max_radius() < 0.5 / n);
  BinaryPartition p = disc_partition(n, {0.5, 0.5}, 3.0 / n);
  const auto start = p.L;
  for (int s = 0; s < 10; ++s) p = td_step(p, st, p.liquid_area(), 0.0).part;
  CHECK(p.L == start);
}

TEST_CASE("unconstrained step is monotone for positive kernels") {
  std::mt19937_64 rng(13);
  std::bernoulli_distribution coin(0.5), keep(0.8);
  const StencilSet st = stencils_for(isotropic_kernels(), 4e-4);
  for (int t = 0; t < 20; ++t) {
    BinaryPartition small = empty_partition(32), big = empty_partition(32);
    for (size_t q = 0; q < small.L.size(); ++q) {
      big.L[q] = coin(rng);
      small.L[q] = big.L[q] && keep(rng);
    }
    const auto a = td_step(small, st, 0, 0, 0.0).part;
    const auto b = td_step(big, st, 0, 0, 0.0).part;
    for (size_t q = 0; q < a.L.size(); ++q) CHECK((!a.L[q] || b.L[q]));
  }
}

TEST_CASE("energy examples") {
  const StencilSet st = stencils_for(mixed_kernels(), 4e-4);
  BinaryPartition p = empty_partition(32);
  for (int j = 0; j < 32; ++j)
    for (int i = 0; i < 32; ++i) p.S[p.grid.index(i, j)] = j < 10;
  CHECK(nonlocal_energy(p, st) == 0.0);
  // Liquid fills everything outside the solid.
  for (size_t q = 0; q < p.L.size(); ++q) p.L[q] = !p.S[q];
  CHECK(nonlocal_energy(p, st) == doctest::Approx(energy_oracle(p, st)).epsilon(1e-12));
  // A random droplet.
  std::mt19937_64 rng(2);
  std::bernoulli_distribution coin(0.4);
  for (size_t q = 0; q < p.L.size(); ++q) p.L[q] = !p.S[q] && coin(rng);
  CHECK(nonlocal_energy(p, st) == doctest::Approx(energy_oracle(p, st)).epsilon(1e-12));
}

TEST_CASE("interface part of the energy orders nested discs by perimeter") {
  const int n = 64;
  const StencilSet st = stencils_for(isotropic_kernels(), 2e-4);
  const double mass = st.VL.mass;
  auto interface_energy = [&](const BinaryPartition& p) {
    // Remove the bulk term -mass |L| / sqrt(dt).
    return nonlocal_energy(p, st) + mass * p.liquid_area() / std::sqrt(st.VL.dt);
  };
  const BinaryPartition a = disc_partition(n, {0.5, 0.5}, 0.12);
  const BinaryPartition b = disc_partition(n, {0.5, 0.5}, 0.2);
  CHECK(interface_energy(a) == doctest::Approx(energy_oracle(a, st) + mass * a.liquid_area() / std::sqrt(st.VL.dt)));
  CHECK(interface_energy(b) > interface_energy(a));
  // Roughly proportional to the perimeter.
  CHECK(interface_energy(b) / interface_energy(a) == doctest::Approx(0.2 / 0.12).epsilon(0.15));
}
