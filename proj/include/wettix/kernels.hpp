#pragma once

#include <string>
#include <vector>

#include "wettix/angular.hpp"
#include "wettix/geometry.hpp"

namespace wettix {

struct Circle {
  double R = 0.0;
  std::vector<double> omega;  // at theta_j = 2 pi j / q
};

/**
 * Kernel concentrated on concentric circles. sigma and m are the pair the
 * weights were built from (m is the induced mobility for one circle).
 */
struct CircleKernel {
  std::vector<Circle> circles;
  int q = 0;
  AnisotropyFn sigma;
  MobilityFn m;
  bool positive = true;
};

CircleKernel build_two_circle_kernel(const AnisotropyFn& sigma, const MobilityFn& m, double R1,
                                     double R2, int q = 100);

struct SingleCircleKernel {
  CircleKernel kernel;
  MobilityFn induced_mobility;
};

SingleCircleKernel build_single_circle_kernel(const AnisotropyFn& sigma, double R, int q = 100);

struct MomentDeviation {
  double sigma_dev = 0.0;         // max |sum R_i^2 w_i - (sigma+sigma'')/4|
  double inv_mobility_dev = 0.0;  // max |sum w_i - 1/m|
};

MomentDeviation check_moments(const CircleKernel& k);

enum class Interface { VL, LS, VS };
const char* interface_name(Interface i);

struct StencilEntry {
  Vec2 offset;
  double weight;
};

struct Stencil {
  std::vector<StencilEntry> entries;
  double mass = 0.0;
  double dt = 0.0;
  Interface label = Interface::VL;
};

Stencil discretize(const CircleKernel& k, double dt, Interface label = Interface::VL);

struct TriangleReport {
  // K^LS + K^VL - K^VS >= 0 and K^VS + K^VL - K^LS >= 0 at every entry.
  bool nesting_conditions = false;
  // The above plus K^LS + K^VS - K^VL >= 0.
  bool all_permutations = false;
  bool holds() const { return all_permutations; }
};

TriangleReport triangle_check(const Stencil& vl, const Stencil& ls, const Stencil& vs);

/// Three stencils sampling identical offsets; the stepper's view of the kernels.
struct StencilSet {
  Stencil VL, LS, VS;
  size_t size() const { return VL.entries.size(); }
  double max_radius() const;
};

// Throws ConfigError if the offsets differ.
StencilSet make_stencil_set(Stencil vl, Stencil ls, Stencil vs);

}  // namespace wettix
