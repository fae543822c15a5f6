#pragma once

#include <cmath>
#include <vector>

namespace wettix {

struct Vec2 {
  double x = 0.0, y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

struct Polyline {
  std::vector<Vec2> pts;
  bool closed = false;
};

// Signed shoelace area; positive for counter-clockwise loops.
double signed_area(const std::vector<Vec2>& poly);
Vec2 centroid(const std::vector<Vec2>& poly);
double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);
bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d);
// Nonzero winding number test.
bool point_in_polygon(Vec2 p, const std::vector<Vec2>& poly);
// Keeps the part of a closed polygon with y >= h (Sutherland-Hodgman).
std::vector<Vec2> clip_above(const std::vector<Vec2>& poly, double h);
// Drops consecutive duplicates (and the closing duplicate for loops).
void dedupe(Polyline& pl, double eps = 0.0);

}  // namespace wettix
