#pragma once

#include <string>
#include <vector>

#include "wettix/fields.hpp"
#include "wettix/geometry.hpp"

namespace wettix {

/// y = f(x) for a substrate; the solid lies below the graph.
struct SubstrateProfile {
  enum class Kind { Flat, Parabola, Sinusoid };
  Kind kind = Kind::Flat;
  double h = 0.5;    // offset
  double a = 0.0;    // parabola curvature or sinusoid amplitude
  double x0 = 0.5;   // parabola vertex / sinusoid phase origin
  int k = 1;         // sinusoid periods per unit length

  double operator()(double x) const;
  bool is_flat() const { return kind == Kind::Flat; }
};

struct ShapeSpec {
  enum class Kind { Disc, Polygon, Substrate, Union, Intersection, Difference };
  Kind kind = Kind::Disc;
  Vec2 center;
  double radius = 0.0;
  std::vector<Vec2> vertices;
  SubstrateProfile profile;
  std::vector<ShapeSpec> children;

  static ShapeSpec disc(Vec2 c, double r);
  static ShapeSpec polygon(std::vector<Vec2> v);
  static ShapeSpec rect(Vec2 lo, Vec2 hi);
  static ShapeSpec substrate(SubstrateProfile p);
  static ShapeSpec set_union(std::vector<ShapeSpec> c);
  static ShapeSpec set_intersection(std::vector<ShapeSpec> c);
  static ShapeSpec set_difference(ShapeSpec a, ShapeSpec b);
  std::string describe() const;
};

// Positive inside, distance-like near the boundary; periodic in both directions.
double signed_distance(const ShapeSpec& s, Vec2 p);
ScalarField signed_distance_init(const ShapeSpec& s, Grid2D grid);

// phi_L = min(phi_drop, -phi_S), phi_V = min(-phi_drop, -phi_S); target area
// defaults to the initial liquid area when area <= 0.
LevelSetState make_droplet_state(const ShapeSpec& droplet, const ShapeSpec& substrate,
                                 Grid2D grid, double area = -1.0);

}  // namespace wettix
