#include "wettix/angular.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "wettix/errors.hpp"
#include "wettix/io.hpp"

namespace wettix {

namespace {

constexpr double kPi = std::numbers::pi;

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Taylor coefficients of amp*cos(k*(theta + t - phase)) in t.
void cos_jet(double amp, int k, double phase, double theta, int order, AngularFn::Jet& out) {
  const double alpha = k * (theta - phase);
  double kp = 1.0;
  for (int j = 0; j <= order; ++j) {
    out[j] += amp * kp * std::cos(alpha + j * kPi / 2) / factorial(j);
    kp *= k;
  }
}

// h = g^p via h_k = 1/(k g0) sum_{j=1..k} (p j - (k - j)) g_j h_{k-j}.
void pow_jet(const AngularFn::Jet& g, double p, int order, AngularFn::Jet& h) {
  h.fill(0.0);
  h[0] = std::pow(g[0], p);
  for (int k = 1; k <= order; ++k) {
    double s = 0.0;
    for (int j = 1; j <= k; ++j) s += (p * j - (k - j)) * g[j] * h[k - j];
    h[k] = s / (k * g[0]);
  }
}

}  // namespace

AngularFn AngularFn::constant(double c) {
  if (!std::isfinite(c)) throw ConfigError("constant anisotropy value is not finite");
  AngularFn f;
  f.kind_ = Kind::Constant;
  f.c_ = c;
  f.terms_.clear();
  f.base_.reset();
  return f;
}

AngularFn AngularFn::sqrt_sin2(double a, double phase) {
  // 1 + a sin^2 u = (1 + a/2) - (a/2) cos 2u
  return trig_power(1.0 + a / 2, -a / 2, 2, phase, 0.5);
}

AngularFn AngularFn::sqrt_cos2(double a, double phase) {
  return trig_power(1.0 + a / 2, a / 2, 2, phase, 0.5);
}

AngularFn AngularFn::harmonics(double c0, std::vector<Term> terms) {
  for (const Term& t : terms) {
    if (t.k < 0 || t.k % 2 != 0)
      throw ConfigError("harmonics: wave number " + std::to_string(t.k) +
                        " is not a non-negative even integer (central symmetry)");
    if (!std::isfinite(t.amp) || !std::isfinite(t.phase))
      throw ConfigError("harmonics: non-finite term");
  }
  if (!std::isfinite(c0)) throw ConfigError("harmonics: non-finite c0");
  AngularFn f;
  f.kind_ = Kind::Harmonics;
  f.c_ = c0;
  f.terms_ = std::move(terms);
  return f;
}

AngularFn AngularFn::trig_power(double c, double b, int k, double phase, double p,
                                double scale) {
  if (k <= 0 || k % 2 != 0)
    throw ConfigError("trig_power: k must be a positive even integer (central symmetry)");
  if (!(c - std::abs(b) > 0.0))
    throw ConfigError("trig_power: base c + b cos(...) must stay positive (need c > |b|)");
  if (!std::isfinite(p) || !std::isfinite(scale) || !std::isfinite(phase))
    throw ConfigError("trig_power: non-finite parameter");
  AngularFn f;
  f.kind_ = Kind::TrigPower;
  f.c_ = c;
  f.b_ = b;
  f.k_ = k;
  f.phase_ = phase;
  f.p_ = p;
  f.scale_ = scale;
  return f;
}

AngularFn AngularFn::inverse_stiffness(const AngularFn& sigma, double scale) {
  if (sigma.depth() + 1 > 2)
    throw ConfigError("inverse_stiffness nested too deeply for exact second derivatives");
  AngularFn f;
  f.kind_ = Kind::InverseStiffness;
  f.scale_ = scale;
  f.base_ = std::make_shared<const AngularFn>(sigma);
  return f;
}

int AngularFn::depth() const {
  return kind_ == Kind::InverseStiffness ? base_->depth() + 1 : 0;
}

void AngularFn::jet(double theta, int order, Jet& out) const {
  out.fill(0.0);
  switch (kind_) {
    case Kind::Constant:
      out[0] = c_;
      return;
    case Kind::Harmonics:
      out[0] = c_;
      for (const Term& t : terms_) cos_jet(t.amp, t.k, t.phase, theta, order, out);
      return;
    case Kind::TrigPower: {
      Jet g{};
      g[0] = c_;
      cos_jet(b_, k_, phase_, theta, order, g);
      pow_jet(g, p_, order, out);
      for (int j = 0; j <= order; ++j) out[j] *= scale_;
      return;
    }
    case Kind::InverseStiffness: {
      Jet s{};
      base_->jet(theta, order + 2, s);
      Jet st{};
      for (int j = 0; j <= order; ++j) st[j] = s[j] + (j + 1) * (j + 2) * s[j + 2];
      pow_jet(st, -1.0, order, out);
      for (int j = 0; j <= order; ++j) out[j] *= scale_;
      return;
    }
  }
  throw ConfigError("unknown anisotropy kind");
}

double AngularFn::eval(double theta, int order) const {
  if (order < 0 || order > 2) throw ConfigError("derivative order must be 0, 1 or 2");
  Jet j{};
  jet(theta, order, j);
  return j[order] * factorial(order);
}

double AngularFn::stiffness(double theta) const {
  Jet j{};
  jet(theta, 2, j);
  return j[0] + 2.0 * j[2];
}

std::string AngularFn::describe() const {
  switch (kind_) {
    case Kind::Constant:
      return "constant(c=" + fmt(c_) + ")";
    case Kind::Harmonics: {
      std::string s = "harmonics(c0=" + fmt(c_) + ", terms=[";
      for (size_t i = 0; i < terms_.size(); ++i) {
        if (i) s += ", ";
        s += "(" + fmt(terms_[i].amp) + ", " + std::to_string(terms_[i].k) + ", " +
             fmt(terms_[i].phase) + ")";
      }
      return s + "])";
    }
    case Kind::TrigPower:
      return "trig_power(c=" + fmt(c_) + ", b=" + fmt(b_) + ", k=" + std::to_string(k_) +
             ", phase=" + fmt(phase_) + ", p=" + fmt(p_) + ", scale=" + fmt(scale_) + ")";
    case Kind::InverseStiffness:
      return "inverse_stiffness(sigma=" + base_->describe() + ", scale=" + fmt(scale_) + ")";
  }
  return "?";
}

void validate_positive(const AngularFn& f, const std::string& name, int samples) {
  for (int i = 0; i < samples; ++i) {
    double th = 2 * kPi * i / samples;
    double v = f(th);
    if (!(v > 0.0) || !std::isfinite(v))
      throw ConfigError(name + " must be positive: value " + fmt(v) + " at theta=" + fmt(th));
  }
}

void validate_convex(const AngularFn& f, const std::string& name, int samples) {
  double m = convexity_margin(f, samples);
  if (!(m > 0.0))
    throw ConfigError(name + " violates convexity sigma + sigma'' > 0 (min " + fmt(m) + ")");
}

double convexity_margin(const AnisotropyFn& f, int samples) {
  if (samples < 360) throw ConfigError("convexity_margin needs at least 360 samples");
  double m = INFINITY;
  for (int i = 0; i < samples; ++i) m = std::min(m, f.stiffness(2 * kPi * i / samples));
  return m;
}

void SurfaceTensionTriple::validate(int samples) {
  validate_positive(sigma_VL, "sigma_VL", samples);
  validate_positive(sigma_LS, "sigma_LS", samples);
  validate_positive(sigma_VS, "sigma_VS", samples);
  validate_positive(m_VL, "m_VL", samples);
  validate_positive(m_LS, "m_LS", samples);
  validate_positive(m_VS, "m_VS", samples);
  validate_convex(sigma_VL, "sigma_VL", samples);
  validate_convex(sigma_LS, "sigma_LS", samples);
  validate_convex(sigma_VS, "sigma_VS", samples);
  strong_triangle = true;
  for (int i = 0; i < samples; ++i) {
    double th = 2 * kPi * i / samples;
    double a = sigma_VL(th), b = sigma_LS(th), c = sigma_VS(th);
    const double tol = 1e-14 * (a + b + c);
    if (a + b < c - tol || a + c < b - tol || b + c < a - tol)
      throw ConfigError("surface tensions violate the triangle inequality at theta=" + fmt(th));
    double sa = sigma_VL.stiffness(th), sb = sigma_LS.stiffness(th), sc = sigma_VS.stiffness(th);
    if (sa + sb < sc || sa + sc < sb || sb + sc < sa) strong_triangle = false;
  }
}

Polyline wulff_boundary(const AnisotropyFn& sigma, int n) {
  if (n < 3) throw ConfigError("wulff_boundary needs n >= 3");
  validate_convex(sigma, "sigma");
  Polyline pl;
  pl.closed = true;
  pl.pts.reserve(n);
  for (int i = 0; i < n; ++i) {
    double th = 2 * kPi * i / n;
    AngularFn::Jet j{};
    sigma.jet(th - kPi / 2, 1, j);
    double s = j[0], ds = j[1];
    double sn = std::sin(th), cs = std::cos(th);
    pl.pts.push_back({-s * sn - ds * cs, s * cs - ds * sn});
  }
  return pl;
}

WinterbottomShape winterbottom_shape(const AnisotropyFn& sigma_VL, double sigma_LS,
                                     double sigma_VS, double area, double substrate_height,
                                     int n) {
  if (!(area > 0.0)) throw ConfigError("winterbottom_shape: area must be positive");
  Polyline w = wulff_boundary(sigma_VL, n);
  const double h = sigma_VS - sigma_LS;
  double ymin = INFINITY, ymax = -INFINITY;
  for (const Vec2& p : w.pts) {
    ymin = std::min(ymin, p.y);
    ymax = std::max(ymax, p.y);
  }
  if (!(h > ymin && h < ymax))
    throw SolverError("winterbottom_shape: truncation line y=" + fmt(h) +
                      " misses the Wulff shape; no equilibrium droplet (complete " +
                      (h <= ymin ? "dewetting)" : "wetting)"));
  std::vector<Vec2> clipped = clip_above(w.pts, h);
  const double a1 = signed_area(clipped);
  // Area scales with lambda^2, so lambda follows in closed form.
  const double lambda = std::sqrt(area / a1);
  Vec2 c = centroid(clipped);
  WinterbottomShape out;
  out.lambda = lambda;
  out.boundary.closed = true;
  out.boundary.pts.reserve(clipped.size());
  for (const Vec2& p : clipped)
    out.boundary.pts.push_back({lambda * (p.x - c.x), lambda * (p.y - h) + substrate_height});
  dedupe(out.boundary);
  return out;
}

double contact_condition_residual(const AnisotropyFn& sigma_VL, double theta, double sigma_LS,
                                  double sigma_VS) {
  AngularFn::Jet j{};
  sigma_VL.jet(theta, 1, j);
  return j[0] * std::cos(theta) - j[1] * std::sin(theta) + sigma_LS - sigma_VS;
}

}  // namespace wettix
