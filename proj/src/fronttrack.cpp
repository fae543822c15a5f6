#include "wettix/fronttrack.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wettix/errors.hpp"

namespace wettix {

namespace {

constexpr double kPi = std::numbers::pi;

// Curvature of the circle through a, b, c (positive for left turns).
double circ_curvature(Vec2 a, Vec2 b, Vec2 c) {
  const double la = norm(b - a), lb = norm(c - b), lc = norm(c - a);
  return 2.0 * cross(b - a, c - b) / (la * lb * lc);
}

double max_mobility(const MobilityFn& m) {
  double mx = 0.0;
  for (int k = 0; k < 720; ++k) mx = std::max(mx, m(kPi * k / 720));
  return mx;
}

double max_speed_factor(const FrontTrackParams& p) {
  double mx = 0.0;
  for (int k = 0; k < 720; ++k) {
    const double th = kPi * k / 720;
    mx = std::max(mx, p.m_VL(th) * p.sigma_VL.stiffness(th));
  }
  return mx;
}

}  // namespace

// Contact abscissa at which the discrete contact force vanishes, holding the
// other nodes fixed: the limit of the relaxed law as eta grows without bound.
static double contact_root(MarkerCurve c, const FrontTrackParams& p, bool right) {
  const int M = c.M();
  Vec2& end = right ? c.nodes[0] : c.nodes[M];
  const Vec2 nb = right ? c.nodes[1] : c.nodes[M - 1];
  // The relaxed law moves the contact by -F (right) or +F (left), so F
  // increases with x on the right and decreases on the left.
  const double sgn = right ? 1.0 : -1.0;
  auto g = [&](double xc) {
    end.x = xc;
    return sgn * contact_force(p.sigma_VL, contact_normal_angle(c, right), p.sigma_LS, p.sigma_VS);
  };
  const double x0 = end.x;
  double h = 0.25 * norm(nb - end);
  double lo = x0 - h, hi = x0 + h;
  double glo = g(lo), ghi = g(hi);
  for (int k = 0; k < 40 && !(glo <= 0 && ghi >= 0); ++k) {
    h *= 2;
    if (glo > 0) lo = x0 - h, glo = g(lo);
    if (ghi < 0) hi = x0 + h, ghi = g(hi);
  }
  if (!(glo <= 0 && ghi >= 0)) throw OracleBreakdown("contact condition has no root near the contact");
  for (int it = 0; it < 80 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double curve_area(const MarkerCurve& c) {
  if (c.nodes.size() < 3) return 0.0;
  return signed_area(c.nodes);
}

double contact_force(const AnisotropyFn& sigma, double theta_n, double sigma_LS,
                     double sigma_VS) {
  AngularFn::Jet j{};
  sigma.jet(theta_n, 1, j);
  return j[0] * std::sin(theta_n) + j[1] * std::cos(theta_n) + sigma_LS - sigma_VS;
}

double contact_normal_angle(const MarkerCurve& c, bool right) {
  const int M = c.M();
  // Tangent at the end node from the circle through the three end nodes.
  Vec2 p0, p1, p2;
  if (right)
    p0 = c.nodes[0], p1 = c.nodes[1], p2 = c.nodes[2];
  else
    p0 = c.nodes[M], p1 = c.nodes[M - 1], p2 = c.nodes[M - 2];
  const Vec2 a = p1 - p0, b = p2 - p0;
  const double d = 2.0 * cross(a, b);
  Vec2 t;
  if (std::abs(d) < 1e-14 * dot(a, a) * norm(b)) {
    t = (1.0 / norm(a)) * a;
  } else {
    // Center relative to p0, then the tangent pointing toward p1.
    const double aa = dot(a, a), bb = dot(b, b);
    const Vec2 ctr{(b.y * aa - a.y * bb) / d, (a.x * bb - b.x * aa) / d};
    t = {-ctr.y, ctr.x};
    if (dot(t, a) < 0) t = -1.0 * t;
    t = (1.0 / norm(t)) * t;
  }
  // Traversal runs right to left, so at the left end the tangent is reversed.
  if (!right) t = -1.0 * t;
  return std::atan2(-t.x, t.y);
}

double ft_stable_dt(const MarkerCurve& c, const FrontTrackParams& p) {
  double ds = INFINITY;
  for (size_t k = 0; k + 1 < c.nodes.size(); ++k) ds = std::min(ds, norm(c.nodes[k + 1] - c.nodes[k]));
  const double eta = p.eta > 0 ? p.eta : 100 * max_mobility(p.m_VL);
  double smax = 0.0;
  for (int k = 0; k < 720; ++k) smax = std::max(smax, p.sigma_VL.stiffness(kPi * k / 720));
  const double parabolic = 0.4 * ds * ds / max_speed_factor(p);
  if (std::isinf(eta)) return parabolic;
  const double contact = 0.25 * ds / (eta * smax);
  return std::min(parabolic, contact);
}

MarkerCurve ft_step(const MarkerCurve& c, const FrontTrackParams& p, double dt) {
  const int M = c.M();
  if (M < 8) throw OracleBreakdown("front tracking needs at least 8 segments");
  const std::vector<Vec2>& x = c.nodes;
  const double eta = p.eta > 0 ? p.eta : 100 * max_mobility(p.m_VL);

  std::vector<double> kap(M + 1, 0.0), ds(M + 1, 0.0), mob(M + 1, 0.0), stiff(M + 1, 0.0);
  std::vector<Vec2> nrm(M + 1);
  double num = 0.0, den = 0.0;
  for (int i = 1; i < M; ++i) {
    const Vec2 chord = x[i + 1] - x[i - 1];
    const double cl = norm(chord);
    nrm[i] = {chord.y / cl, -chord.x / cl};
    const double th = std::atan2(nrm[i].y, nrm[i].x);
    kap[i] = circ_curvature(x[i - 1], x[i], x[i + 1]);
    ds[i] = 0.5 * (norm(x[i] - x[i - 1]) + norm(x[i + 1] - x[i]));
    mob[i] = p.m_VL(th);
    stiff[i] = p.sigma_VL.stiffness(th);
    num += mob[i] * kap[i] * stiff[i] * ds[i];
    den += mob[i] * ds[i];
  }
  const double mu = num / den;

  MarkerCurve out = c;
  for (int i = 1; i < M; ++i) {
    const double v = mob[i] * (-kap[i] * stiff[i] + mu);
    out.nodes[i] = x[i] + (v * dt) * nrm[i];
  }
  if (std::isinf(eta)) {
    out.nodes[0] = {contact_root(out, p, true), c.c};
    out.nodes[M] = {contact_root(out, p, false), c.c};
  } else {
    const double fr = contact_force(p.sigma_VL, contact_normal_angle(c, true), p.sigma_LS, p.sigma_VS);
    const double fl = contact_force(p.sigma_VL, contact_normal_angle(c, false), p.sigma_LS, p.sigma_VS);
    out.nodes[0] = {x[0].x - eta * fr * dt, c.c};
    out.nodes[M] = {x[M].x + eta * fl * dt, c.c};
  }
  if (!(out.nodes[0].x > out.nodes[M].x))
    throw OracleBreakdown("contact points crossed");

  out = redistribute(out, M);

  // Restore the area by a uniform normal shift of the interior nodes.
  const double A = p.area > 0 ? p.area : curve_area(c);
  for (int it = 0; it < 30; ++it) {
    const double a = curve_area(out);
    if (std::abs(a - A) <= 1e-13 * A) break;
    double len = 0.0;
    for (int i = 1; i < M; ++i)
      len += 0.5 * (norm(out.nodes[i] - out.nodes[i - 1]) + norm(out.nodes[i + 1] - out.nodes[i]));
    const double delta = (A - a) / len;
    std::vector<Vec2> shifted = out.nodes;
    for (int i = 1; i < M; ++i) {
      const Vec2 chord = out.nodes[i + 1] - out.nodes[i - 1];
      const double cl = norm(chord);
      shifted[i] = out.nodes[i] + delta * Vec2{chord.y / cl, -chord.x / cl};
    }
    out.nodes.swap(shifted);
  }
  for (int i = 1; i < M; ++i)
    if (!(out.nodes[i].y > c.c)) throw OracleBreakdown("marker dropped below the substrate");
  return out;
}

MarkerCurve redistribute(const MarkerCurve& c, int M) {
  const std::vector<Vec2>& x = c.nodes;
  const int K = int(x.size()) - 1;
  std::vector<double> s(K + 1, 0.0);
  for (int k = 1; k <= K; ++k) s[k] = s[k - 1] + norm(x[k] - x[k - 1]);
  // Hermite tangents from nonuniform central differences.
  std::vector<Vec2> d(K + 1);
  for (int k = 1; k < K; ++k) {
    const double h0 = s[k] - s[k - 1], h1 = s[k + 1] - s[k];
    d[k] = (h1 / (h0 * (h0 + h1))) * (x[k] - x[k - 1]) + (h0 / (h1 * (h0 + h1))) * (x[k + 1] - x[k]);
  }
  d[0] = (1.0 / (s[1] - s[0])) * (x[1] - x[0]);
  d[0] = 2.0 * d[0] - d[1];
  d[K] = (1.0 / (s[K] - s[K - 1])) * (x[K] - x[K - 1]);
  d[K] = 2.0 * d[K] - d[K - 1];

  MarkerCurve out;
  out.c = c.c;
  out.nodes.resize(M + 1);
  out.nodes[0] = x[0];
  out.nodes[M] = x[K];
  const double L = s[K];
  int seg = 0;
  for (int i = 1; i < M; ++i) {
    const double target = L * i / M;
    while (seg < K - 1 && s[seg + 1] < target) ++seg;
    const double h = s[seg + 1] - s[seg];
    const double t = (target - s[seg]) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    out.nodes[i] = h00 * x[seg] + (h10 * h) * d[seg] + h01 * x[seg + 1] + (h11 * h) * d[seg + 1];
  }
  out.nodes[0].y = c.c;
  out.nodes[M].y = c.c;
  return out;
}

MarkerCurve ft_run(MarkerCurve c, const FrontTrackParams& p_in, double T, double dt_max,
                   long* steps_taken) {
  FrontTrackParams p = p_in;
  if (p.area <= 0) p.area = curve_area(c);
  double t = 0.0;
  long k = 0;
  while (t < T * (1 - 1e-14)) {
    double dt = std::min({dt_max, ft_stable_dt(c, p), T - t});
    c = ft_step(c, p, dt);
    t += dt;
    if (++k % 20000 == 0) check_self_intersection(c);
  }
  check_self_intersection(c);
  if (steps_taken) *steps_taken = k;
  return c;
}

MarkerCurve curve_from_polygon(const std::vector<Vec2>& poly_in, double c, int M) {
  std::vector<Vec2> poly = poly_in;
  if (signed_area(poly) < 0) std::reverse(poly.begin(), poly.end());
  std::vector<Vec2> up = clip_above(poly, c);
  if (up.size() < 3) throw ConfigError("droplet polygon does not rise above the substrate");
  // Locate the wetted face: the edge lying on y = c traversed right to left
  // would close the curve, so start right after it.
  const size_t n = up.size();
  size_t start = n;
  for (size_t k = 0; k < n; ++k) {
    const Vec2 a = up[k], b = up[(k + 1) % n];
    if (a.y == c && b.y == c && a.x < b.x) start = (k + 1) % n;
  }
  if (start == n) throw ConfigError("droplet polygon does not touch the substrate line");
  MarkerCurve raw;
  raw.c = c;
  for (size_t k = 0; k < n; ++k) raw.nodes.push_back(up[(start + k) % n]);
  // Linear resampling of the polygon; corners are kept as they are.
  std::vector<double> s(raw.nodes.size(), 0.0);
  for (size_t k = 1; k < s.size(); ++k) s[k] = s[k - 1] + norm(raw.nodes[k] - raw.nodes[k - 1]);
  MarkerCurve out;
  out.c = c;
  size_t seg = 0;
  for (int i = 0; i <= M; ++i) {
    const double target = s.back() * i / M;
    while (seg + 2 < s.size() && s[seg + 1] < target) ++seg;
    const double t = (target - s[seg]) / (s[seg + 1] - s[seg]);
    out.nodes.push_back(raw.nodes[seg] + t * (raw.nodes[seg + 1] - raw.nodes[seg]));
  }
  out.nodes.front().y = c;
  out.nodes.back().y = c;
  return out;
}

Polyline curve_polygon(const MarkerCurve& c) {
  Polyline pl;
  pl.closed = true;
  pl.pts = c.nodes;
  return pl;
}

void check_self_intersection(const MarkerCurve& c) {
  const auto& x = c.nodes;
  const size_t n = x.size();
  for (size_t a = 0; a + 1 < n; ++a)
    for (size_t b = a + 2; b + 1 < n; ++b)
      if (segments_intersect(x[a], x[a + 1], x[b], x[b + 1]))
        throw OracleBreakdown("marker curve self-intersects");
}

}  // namespace wettix
