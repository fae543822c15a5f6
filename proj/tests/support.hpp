#pragma once

// Fixtures shared by the unit tests and the acceptance binary.

#include <algorithm>
#include <cmath>
#include <random>

#include "wettix/angular.hpp"
#include "wettix/fields.hpp"
#include "wettix/kernels.hpp"
#include "wettix/median.hpp"
#include "wettix/shapes.hpp"
#include "wettix/vls_stepper.hpp"

namespace wettix::testing {

constexpr double kPi = 3.14159265358979323846;

// Sum of a few random low Fourier modes plus an offset.
inline ScalarField random_smooth(Grid2D g, std::mt19937_64& rng, double amp = 0.2,
                                 double offset = 0.0) {
  std::uniform_real_distribution<double> u(-1, 1);
  struct Mode {
    int kx, ky;
    double a, ph;
  };
  std::vector<Mode> modes;
  for (int k = 0; k < 6; ++k)
    modes.push_back({int(std::floor(3 * u(rng))) , int(std::floor(3 * u(rng))), amp * u(rng) / (1 + k),
                     kPi * u(rng)});
  ScalarField f(g);
  for (int j = 0; j < g.n; ++j)
    for (int i = 0; i < g.n; ++i) {
      const Vec2 p = g.node(i, j);
      double v = offset;
      for (const Mode& m : modes) v += m.a * std::cos(2 * kPi * (m.kx * p.x + m.ky * p.y) + m.ph);
      f.at(i, j) = v;
    }
  return f;
}

// Random liquid and vapor fields over a flat or wavy solid, clamped by -phi_S.
inline LevelSetState random_state(Grid2D g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0, 1);
  SubstrateProfile prof;
  if (u(rng) < 0.5) {
    prof.kind = SubstrateProfile::Kind::Sinusoid;
    prof.a = 0.05 * u(rng);
    prof.k = 1 + int(3 * u(rng));
  }
  prof.h = 0.2 + 0.2 * u(rng);
  LevelSetState st;
  st.phi_S = signed_distance_init(ShapeSpec::substrate(prof), g);
  st.phi_L = random_smooth(g, rng, 0.3);
  st.phi_V = st.phi_L;
  ScalarField noise = random_smooth(g, rng, 0.05);
  for (size_t k = 0; k < g.size(); ++k) {
    st.phi_V.v[k] = -st.phi_L.v[k] + noise.v[k];
    st.phi_L.v[k] = std::min(st.phi_L.v[k], -st.phi_S.v[k]);
    st.phi_V.v[k] = std::min(st.phi_V.v[k], -st.phi_S.v[k]);
  }
  st.target_area = area_nonneg(st.phi_L);
  return st;
}

struct KernelSet {
  CircleKernel VL, LS, VS;
};

// Anisotropic VL with LS = VS: the nesting conditions hold.
inline KernelSet nesting_kernels(double phase = 0.3) {
  KernelSet k;
  k.VL = build_two_circle_kernel(AngularFn::sqrt_sin2(0.5, phase), AngularFn::constant(1), 1.0, 0.15);
  k.LS = build_two_circle_kernel(AngularFn::constant(1.2), AngularFn::constant(1), 1.0, 0.15);
  k.VS = k.LS;
  return k;
}

// Three different anisotropic interfaces.
inline KernelSet mixed_kernels() {
  KernelSet k;
  k.VL = build_two_circle_kernel(AngularFn::sqrt_sin2(1, -kPi / 4), AngularFn::sqrt_cos2(1, 0), 2.0, 1.0 / 6);
  k.LS = build_two_circle_kernel(AngularFn::sqrt_sin2(1, -kPi / 3), AngularFn::constant(1), 2.0, 1.0 / 6);
  k.VS = build_two_circle_kernel(AngularFn::sqrt_sin2(1, -kPi / 8), AngularFn::sqrt_cos2(1, -kPi / 8), 2.0, 1.0 / 6);
  return k;
}

inline KernelSet isotropic_kernels() {
  KernelSet k;
  k.VL = build_single_circle_kernel(AngularFn::constant(1), 0.5, 64).kernel;
  k.LS = k.VL;
  k.VS = k.VL;
  return k;
}

inline StencilSet stencils_for(const KernelSet& k, double dt, double time_scale = 8.0) {
  return make_step_stencils(k.VL, k.LS, k.VS, dt, time_scale);
}

inline StepParams params_for(const KernelSet& k, double dt, double time_scale = 8.0) {
  StepParams p;
  p.dt = dt;
  p.time_scale = time_scale;
  p.stencils = stencils_for(k, dt, time_scale);
  return p;
}

}  // namespace wettix::testing
