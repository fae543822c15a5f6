#include "wettix/geometry.hpp"

#include <algorithm>

namespace wettix {

double signed_area(const std::vector<Vec2>& poly) {
  double s = 0.0;
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) s += cross(poly[i], poly[(i + 1) % n]);
  return 0.5 * s;
}

Vec2 centroid(const std::vector<Vec2>& poly) {
  double a = 0.0, cx = 0.0, cy = 0.0;
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    Vec2 p = poly[i], q = poly[(i + 1) % n];
    double c = cross(p, q);
    a += c;
    cx += (p.x + q.x) * c;
    cy += (p.y + q.y) * c;
  }
  if (a == 0.0) return {};
  return {cx / (3.0 * a), cy / (3.0 * a)};
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  Vec2 ab = b - a;
  double l2 = dot(ab, ab);
  double t = l2 > 0.0 ? std::clamp(dot(p - a, ab) / l2, 0.0, 1.0) : 0.0;
  return norm(p - (a + t * ab));
}

static int orient(Vec2 a, Vec2 b, Vec2 c) {
  double v = cross(b - a, c - a);
  return (v > 0) - (v < 0);
}

bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  int o1 = orient(a, b, c), o2 = orient(a, b, d);
  int o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0) return true;
  return false;
}

bool point_in_polygon(Vec2 p, const std::vector<Vec2>& poly) {
  int wn = 0;
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    Vec2 a = poly[i], b = poly[(i + 1) % n];
    if (a.y <= p.y) {
      if (b.y > p.y && cross(b - a, p - a) > 0) ++wn;
    } else if (b.y <= p.y && cross(b - a, p - a) < 0) {
      --wn;
    }
  }
  return wn != 0;
}

std::vector<Vec2> clip_above(const std::vector<Vec2>& poly, double h) {
  std::vector<Vec2> out;
  const size_t n = poly.size();
  for (size_t i = 0; i < n; ++i) {
    Vec2 a = poly[i], b = poly[(i + 1) % n];
    bool ia = a.y >= h, ib = b.y >= h;
    if (ia) out.push_back(a);
    if (ia != ib) {
      double t = (h - a.y) / (b.y - a.y);
      out.push_back({a.x + t * (b.x - a.x), h});
    }
  }
  return out;
}

void dedupe(Polyline& pl, double eps) {
  std::vector<Vec2> out;
  out.reserve(pl.pts.size());
  for (const Vec2& p : pl.pts)
    if (out.empty() || norm(p - out.back()) > eps) out.push_back(p);
  if (pl.closed && out.size() > 1 && norm(out.front() - out.back()) <= eps) out.pop_back();
  pl.pts = std::move(out);
}

}  // namespace wettix
