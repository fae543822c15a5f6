#include "wettix/shapes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "wettix/errors.hpp"

namespace wettix {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap01(double x) { return x - std::floor(x); }

double polygon_sd(const std::vector<Vec2>& v, Vec2 p) {
  double d = INFINITY;
  for (size_t k = 0; k < v.size(); ++k)
    d = std::min(d, point_segment_distance(p, v[k], v[(k + 1) % v.size()]));
  return point_in_polygon(p, v) ? d : -d;
}

double graph_sd(const SubstrateProfile& f, Vec2 p) {
  const double v = f(wrap01(p.x)) - p.y;
  if (v == 0.0) return 0.0;
  if (f.is_flat()) return v;
  const double w = std::min(std::abs(v), 0.5);
  auto dist2 = [&](double xs) {
    const double dy = f(wrap01(xs)) - p.y;
    return (xs - p.x) * (xs - p.x) + dy * dy;
  };
  const int ns = std::max(16, int(std::ceil(2 * w / 0.002)));
  const double hstep = 2 * w / ns;
  double best = INFINITY, bx = p.x;
  for (int s = 0; s <= ns; ++s) {
    const double xs = p.x - w + s * hstep;
    const double d = dist2(xs);
    if (d < best) best = d, bx = xs;
  }
  // Golden-section refinement around the best sample.
  double lo = bx - hstep, hi = bx + hstep;
  const double gr = 0.5 * (std::sqrt(5.0) - 1);
  double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
  double fc = dist2(c), fd = dist2(d);
  for (int it = 0; it < 60; ++it) {
    if (fc < fd) {
      hi = d, d = c, fd = fc;
      c = hi - gr * (hi - lo), fc = dist2(c);
    } else {
      lo = c, c = d, fc = fd;
      d = lo + gr * (hi - lo), fd = dist2(d);
    }
  }
  best = std::min({best, fc, fd});
  return std::copysign(std::sqrt(best), v);
}

template <class F>
double max_over_images(Vec2 p, F&& fn) {
  double best = -INFINITY;
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b) best = std::max(best, fn(Vec2{p.x + a, p.y + b}));
  return best;
}

}  // namespace

double SubstrateProfile::operator()(double x) const {
  switch (kind) {
    case Kind::Flat: return h;
    case Kind::Parabola: return a * (x - x0) * (x - x0) + h;
    case Kind::Sinusoid: return a * std::sin(2 * kPi * k * (x - x0)) + h;
  }
  return h;
}

ShapeSpec ShapeSpec::disc(Vec2 c, double r) {
  if (!(r > 0.0)) throw ConfigError("disc radius must be positive");
  ShapeSpec s;
  s.kind = Kind::Disc;
  s.center = c;
  s.radius = r;
  return s;
}

ShapeSpec ShapeSpec::polygon(std::vector<Vec2> v) {
  if (v.size() < 3) throw ConfigError("polygon needs at least 3 vertices");
  if (std::abs(signed_area(v)) == 0.0) throw ConfigError("polygon is degenerate");
  ShapeSpec s;
  s.kind = Kind::Polygon;
  s.vertices = std::move(v);
  return s;
}

ShapeSpec ShapeSpec::rect(Vec2 lo, Vec2 hi) {
  if (!(hi.x > lo.x && hi.y > lo.y)) throw ConfigError("rect needs x0 < x1 and y0 < y1");
  return polygon({lo, {hi.x, lo.y}, hi, {lo.x, hi.y}});
}

ShapeSpec ShapeSpec::substrate(SubstrateProfile p) {
  ShapeSpec s;
  s.kind = Kind::Substrate;
  s.profile = p;
  return s;
}

ShapeSpec ShapeSpec::set_union(std::vector<ShapeSpec> c) {
  if (c.empty()) throw ConfigError("union needs at least one shape");
  ShapeSpec s;
  s.kind = Kind::Union;
  s.children = std::move(c);
  return s;
}

ShapeSpec ShapeSpec::set_intersection(std::vector<ShapeSpec> c) {
  if (c.empty()) throw ConfigError("intersection needs at least one shape");
  ShapeSpec s;
  s.kind = Kind::Intersection;
  s.children = std::move(c);
  return s;
}

ShapeSpec ShapeSpec::set_difference(ShapeSpec a, ShapeSpec b) {
  ShapeSpec s;
  s.kind = Kind::Difference;
  s.children = {std::move(a), std::move(b)};
  return s;
}

std::string ShapeSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case Kind::Disc:
      os << "disc(cx=" << center.x << ", cy=" << center.y << ", r=" << radius << ")";
      break;
    case Kind::Polygon:
      os << "polygon(pts=[";
      for (size_t k = 0; k < vertices.size(); ++k)
        os << (k ? ", " : "") << "(" << vertices[k].x << ", " << vertices[k].y << ")";
      os << "])";
      break;
    case Kind::Substrate:
      switch (profile.kind) {
        case SubstrateProfile::Kind::Flat: os << "flat(h=" << profile.h << ")"; break;
        case SubstrateProfile::Kind::Parabola:
          os << "parabola(a=" << profile.a << ", x0=" << profile.x0 << ", h=" << profile.h << ")";
          break;
        case SubstrateProfile::Kind::Sinusoid:
          os << "sinusoid(amp=" << profile.a << ", k=" << profile.k << ", x0=" << profile.x0
             << ", h=" << profile.h << ")";
          break;
      }
      break;
    case Kind::Union:
    case Kind::Intersection:
    case Kind::Difference:
      os << (kind == Kind::Union ? "union(" : kind == Kind::Intersection ? "intersection(" : "difference(");
      for (size_t k = 0; k < children.size(); ++k) os << (k ? ", " : "") << children[k].describe();
      os << ")";
      break;
  }
  return os.str();
}

double signed_distance(const ShapeSpec& s, Vec2 p) {
  switch (s.kind) {
    case ShapeSpec::Kind::Disc:
      return max_over_images(p, [&](Vec2 q) { return s.radius - norm(q - s.center); });
    case ShapeSpec::Kind::Polygon:
      return max_over_images(p, [&](Vec2 q) { return polygon_sd(s.vertices, q); });
    case ShapeSpec::Kind::Substrate:
      return graph_sd(s.profile, p);
    case ShapeSpec::Kind::Union: {
      double d = -INFINITY;
      for (const auto& c : s.children) d = std::max(d, signed_distance(c, p));
      return d;
    }
    case ShapeSpec::Kind::Intersection: {
      double d = INFINITY;
      for (const auto& c : s.children) d = std::min(d, signed_distance(c, p));
      return d;
    }
    case ShapeSpec::Kind::Difference:
      return std::min(signed_distance(s.children[0], p), -signed_distance(s.children[1], p));
  }
  return 0.0;
}

ScalarField signed_distance_init(const ShapeSpec& s, Grid2D grid) {
  ScalarField f(grid);
  bool any_in = false, any_out = false;
  for (int j = 0; j < grid.n; ++j)
    for (int i = 0; i < grid.n; ++i) {
      const double v = signed_distance(s, grid.node(i, j));
      f.at(i, j) = v;
      (v >= 0 ? any_in : any_out) = true;
    }
  if (!any_in) throw ConfigError("shape " + s.describe() + " is empty on the grid");
  if (!any_out) throw ConfigError("shape " + s.describe() + " fills the whole domain");
  return f;
}

LevelSetState make_droplet_state(const ShapeSpec& droplet, const ShapeSpec& substrate,
                                 Grid2D grid, double area) {
  LevelSetState st;
  const ScalarField drop = signed_distance_init(droplet, grid);
  st.phi_S = signed_distance_init(substrate, grid);
  st.phi_L = ScalarField(grid);
  st.phi_V = ScalarField(grid);
  for (size_t k = 0; k < grid.size(); ++k) {
    st.phi_L.v[k] = std::min(drop.v[k], -st.phi_S.v[k]);
    st.phi_V.v[k] = std::min(-drop.v[k], -st.phi_S.v[k]);
  }
  const double a0 = area_nonneg(st.phi_L);
  if (!(a0 > 0.0)) throw ConfigError("initial droplet lies entirely inside the substrate");
  st.target_area = area > 0.0 ? area : a0;
  st.step_index = 0;
  return st;
}

}  // namespace wettix
