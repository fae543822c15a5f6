#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "support.hpp"
#include "wettix/errors.hpp"
#include "wettix/fronttrack.hpp"
#include "wettix/metrics.hpp"

using namespace wettix;
using namespace wettix::testing;

namespace {

// Circular arc of radius r centred at (cx, c + h) cut by y = c, with M segments.
MarkerCurve arc(double cx, double c, double r, double h, int M) {
  MarkerCurve m;
  m.c = c;
  const double a0 = std::asin(std::clamp(-h / r, -1.0, 1.0));
  const double a1 = kPi - a0;
  for (int i = 0; i <= M; ++i) {
    const double a = a0 + (a1 - a0) * i / M;
    m.nodes.push_back({cx + r * std::cos(a), c + h + r * std::sin(a)});
  }
  m.nodes.front().y = c;
  m.nodes.back().y = c;
  return m;
}

FrontTrackParams isotropic(double sls, double svs) {
  FrontTrackParams p;
  p.sigma_VL = AngularFn::constant(1);
  p.m_VL = AngularFn::constant(1);
  p.sigma_LS = sls;
  p.sigma_VS = svs;
  return p;
}

Polyline open_line(const MarkerCurve& c) {
  Polyline pl;
  pl.pts = c.nodes;
  return pl;
}

// Contact angle measured inside the liquid, from the right contact.
double contact_angle(const MarkerCurve& c) { return kPi / 2 - contact_normal_angle(c, true); }

}  // namespace

TEST_CASE("curve area examples") {
  const double r = 0.25;
  for (int M : {16, 64, 512}) {
    const MarkerCurve s = arc(0.5, 0.1, r, 0.0, M);
    CHECK(std::abs(curve_area(s) - kPi * r * r / 2) <= std::pow(kPi / M, 2) * kPi * r * r);
  }
  MarkerCurve flat;
  flat.c = 0.2;
  flat.nodes = {{0.7, 0.2}, {0.3, 0.2}};
  CHECK(curve_area(flat) == 0.0);
  MarkerCurve tri;
  tri.c = 0.0;
  tri.nodes = {{1.0, 0.0}, {0.5, 0.75}, {0.0, 0.0}};
  CHECK(curve_area(tri) == doctest::Approx(0.375).epsilon(1e-15));
}

TEST_CASE("contact force vanishes at the Young angle") {
  // Isotropic: cos(theta*) = sigma_VS - sigma_LS.
  const AnisotropyFn one = AngularFn::constant(1);
  CHECK(std::abs(contact_force(one, kPi / 2 - kPi / 3, 1.0, 1.5)) < 1e-15);
  CHECK(contact_force(one, 0.0, 1.0, 1.0) == doctest::Approx(0.0));
  // A right contact steeper than Young has negative force and spreads.
  CHECK(contact_force(one, 0.0, 1.0, 1.5) < 0);
  // Normal angles of an arc are recovered exactly.
  const MarkerCurve s = arc(0.5, 0.1, 0.3, -0.15, 64);
  CHECK(contact_angle(s) == doctest::Approx(kPi / 3).epsilon(1e-12));
  CHECK(contact_normal_angle(s, false) == doctest::Approx(kPi / 2 + kPi / 3).epsilon(1e-12));
}

TEST_CASE("semicircle is stationary for equal substrate tensions") {
  const double r = 0.25;
  const MarkerCurve s = arc(0.5, 0.1, r, 0.0, 512);
  const FrontTrackParams p = isotropic(1.0, 1.0);
  const double dt = ft_stable_dt(s, p);
  const MarkerCurve t = ft_step(s, p, dt);
  double worst = 0.0;
  for (int i = 0; i <= 512; ++i) worst = std::max(worst, norm(t.nodes[i] - s.nodes[i]));
  // Normal speeds on the circle are of size 1/r.
  CHECK(worst <= 1e-3 * dt / r);
}

TEST_CASE("step keeps the area and the structural invariants") {
  MarkerCurve c = arc(0.5, 0.2, 0.3, 0.05, 128);
  // Squash vertically so the curve is not an equilibrium.
  for (auto& q : c.nodes) q.y = 0.2 + 0.6 * (q.y - 0.2);
  FrontTrackParams p = isotropic(1.0, 1.5);
  const double A = curve_area(c);
  p.area = A;
  for (int s = 0; s < 200; ++s) {
    c = ft_step(c, p, ft_stable_dt(c, p));
    CHECK(std::abs(curve_area(c) - A) <= 1e-12 * A);
    CHECK(c.nodes.front().y == 0.2);
    CHECK(c.nodes.back().y == 0.2);
  }
  double lo = INFINITY, hi = 0.0;
  for (int i = 0; i < c.M(); ++i) {
    const double d = norm(c.nodes[i + 1] - c.nodes[i]);
    lo = std::min(lo, d), hi = std::max(hi, d);
    if (i > 0) CHECK(c.nodes[i].y > 0.2);
  }
  CHECK(hi <= 2 * lo);
}

TEST_CASE("relaxed contact reaches the Young angle") {
  // sigma_VS - sigma_LS = 0.5 gives theta* = pi/3; start from a semicircle.
  MarkerCurve c = arc(0.5, 0.1, 0.3, 0.0, 512);
  const FrontTrackParams p = isotropic(1.0, 1.5);
  c = ft_run(c, p, 0.5);
  CHECK(std::abs(contact_angle(c) - kPi / 3) <= 0.01);
  CHECK(std::abs(contact_normal_angle(c, false) - 5 * kPi / 6) <= 0.01);
}

TEST_CASE("held contact reaches the Young angle") {
  MarkerCurve c = arc(0.5, 0.1, 0.3, 0.0, 128);
  FrontTrackParams p = isotropic(1.0, 1.5);
  p.eta = INFINITY;
  c = ft_run(c, p, 0.1);
  CHECK(std::abs(contact_angle(c) - kPi / 3) <= 0.01);
}

TEST_CASE("convex curve relaxes to a semicircle") {
  const int M = 128;
  const std::vector<Vec2> tri = {{0.2, 0.1}, {0.8, 0.1}, {0.5, 0.5}};
  MarkerCurve c = curve_from_polygon(tri, 0.1, M);
  CHECK(curve_area(c) == doctest::Approx(0.12).epsilon(1e-12));
  c = ft_run(c, isotropic(1.0, 1.0), 0.3);
  const double r = std::sqrt(2 * curve_area(c) / kPi);
  const double cx = 0.5 * (c.nodes.front().x + c.nodes.back().x);
  double worst = 0.0;
  for (const Vec2& q : c.nodes) worst = std::max(worst, std::abs(std::hypot(q.x - cx, q.y - 0.1) - r));
  CHECK(worst <= 2.0 / M);
}

TEST_CASE("mesh refinement converges at first order or better") {
  auto run = [](int M) {
    MarkerCurve c = arc(0.5, 0.2, 0.3, 0.05, M);
    for (auto& q : c.nodes) q.y = 0.2 + 0.6 * (q.y - 0.2);
    return open_line(ft_run(c, isotropic(1.0, 1.5), 0.005));
  };
  const Polyline a = run(32), b = run(64), d = run(128);
  const double e1 = linf_error(a, b), e2 = linf_error(b, d);
  MESSAGE("hausdorff ", e1, " ", e2, " rate ", std::log2(e1 / e2));
  CHECK(std::log2(e1 / e2) >= 1.0);
}

TEST_CASE("front tracking errors") {
  MarkerCurve small = arc(0.5, 0.1, 0.2, 0.0, 7);
  CHECK_THROWS_AS(ft_step(small, isotropic(1, 1), 1e-6), OracleBreakdown);
  MarkerCurve bow;
  bow.c = 0.0;
  // Two edges cross between nodes 1-2 and 3-4.
  bow.nodes = {{1, 0}, {1, 1}, {0, 0.5}, {0.5, 0.2}, {0.5, 1.2}, {0, 0}};
  CHECK_THROWS_AS(check_self_intersection(bow), OracleBreakdown);
  CHECK_NOTHROW(check_self_intersection(arc(0.5, 0.1, 0.2, 0.0, 64)));
  CHECK_THROWS_AS(curve_from_polygon({{0.2, 0.5}, {0.4, 0.5}, {0.3, 0.7}}, 0.1, 32), ConfigError);
}
