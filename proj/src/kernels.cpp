#include "wettix/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wettix/errors.hpp"

namespace wettix {

namespace {
constexpr double kPi = std::numbers::pi;
}

CircleKernel build_two_circle_kernel(const AnisotropyFn& sigma, const MobilityFn& m, double R1,
                                     double R2, int q) {
  if (!(R1 > 0.0) || !(R2 > 0.0)) throw ConfigError("kernel radii must be positive");
  if (R1 == R2) throw ConfigError("two-circle kernel needs R1 != R2 (singular moment system)");
  if (q < 4 || q % 2 != 0) throw ConfigError("q must be an even count >= 4");
  validate_convex(sigma, "sigma");
  validate_positive(m, "mobility");

  CircleKernel k;
  k.q = q;
  k.sigma = sigma;
  k.m = m;
  k.circles = {{R1, std::vector<double>(q)}, {R2, std::vector<double>(q)}};
  const double det = R1 * R1 - R2 * R2;
  double worst = INFINITY, worst_angle = 0.0;
  for (int j = 0; j < q; ++j) {
    const double th = 2 * kPi * j / q;
    const double g = 0.25 * sigma.stiffness(th - kPi / 2);
    const double h = 1.0 / m(th - kPi / 2);
    const double w1 = (g - R2 * R2 * h) / det;
    const double w2 = (-g + R1 * R1 * h) / det;
    k.circles[0].omega[j] = w1;
    k.circles[1].omega[j] = w2;
    if (std::min(w1, w2) < worst) {
      worst = std::min(w1, w2);
      worst_angle = th;
    }
  }
  if (worst < 0.0) {
    double lo = INFINITY, hi = 0.0;
    for (int j = 0; j < 4096; ++j) {
      const double th = 2 * kPi * j / 4096;
      const double v = 0.25 * m(th) * sigma.stiffness(th);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    throw PositivityViolation("two-circle kernel weight negative at theta=" +
                                  std::to_string(worst_angle) +
                                  "; need max(R1,R2) > " + std::to_string(std::sqrt(hi)) +
                                  " and min(R1,R2) < " + std::to_string(std::sqrt(lo)),
                              worst_angle, std::sqrt(hi), std::sqrt(lo));
  }
  return k;
}

SingleCircleKernel build_single_circle_kernel(const AnisotropyFn& sigma, double R, int q) {
  if (!(R > 0.0)) throw ConfigError("kernel radius must be positive");
  if (q < 4 || q % 2 != 0) throw ConfigError("q must be an even count >= 4");
  validate_convex(sigma, "sigma");
  SingleCircleKernel out;
  out.induced_mobility = AngularFn::inverse_stiffness(sigma, 4 * R * R);
  CircleKernel& k = out.kernel;
  k.q = q;
  k.sigma = sigma;
  k.m = out.induced_mobility;
  k.circles = {{R, std::vector<double>(q)}};
  for (int j = 0; j < q; ++j)
    k.circles[0].omega[j] = sigma.stiffness(2 * kPi * j / q - kPi / 2) / (4 * R * R);
  return out;
}

MomentDeviation check_moments(const CircleKernel& k) {
  MomentDeviation d;
  for (int j = 0; j < k.q; ++j) {
    const double th = 2 * kPi * j / k.q;
    double s2 = 0.0, s0 = 0.0;
    for (const Circle& c : k.circles) {
      s2 += c.R * c.R * c.omega[j];
      s0 += c.omega[j];
    }
    d.sigma_dev = std::max(d.sigma_dev, std::abs(s2 - 0.25 * k.sigma.stiffness(th - kPi / 2)));
    d.inv_mobility_dev = std::max(d.inv_mobility_dev, std::abs(s0 - 1.0 / k.m(th - kPi / 2)));
  }
  return d;
}

const char* interface_name(Interface i) {
  switch (i) {
    case Interface::VL: return "VL";
    case Interface::LS: return "LS";
    case Interface::VS: return "VS";
  }
  return "?";
}

Stencil discretize(const CircleKernel& k, double dt, Interface label) {
  if (!(dt > 0.0)) throw ConfigError("discretize: dt must be positive");
  Stencil s;
  s.dt = dt;
  s.label = label;
  const double sq = std::sqrt(dt);
  const double dth = 2 * kPi / k.q;
  for (const Circle& c : k.circles) {
    for (int j = 0; j < k.q; ++j) {
      const double th = j * dth;
      const double w = c.R * c.omega[j] * dth;
      s.entries.push_back({{c.R * sq * std::cos(th), c.R * sq * std::sin(th)}, w});
      s.mass += w;
    }
  }
  return s;
}

static void check_aligned(const Stencil& a, const Stencil& b) {
  if (a.entries.size() != b.entries.size())
    throw ConfigError("stencils have different sizes; kernels must share radii and q");
  for (size_t i = 0; i < a.entries.size(); ++i) {
    Vec2 d = a.entries[i].offset - b.entries[i].offset;
    if (std::abs(d.x) > 1e-14 || std::abs(d.y) > 1e-14)
      throw ConfigError("stencil offsets differ; kernels must share radii and q");
  }
}

TriangleReport triangle_check(const Stencil& vl, const Stencil& ls, const Stencil& vs) {
  check_aligned(vl, ls);
  check_aligned(vl, vs);
  TriangleReport r{true, true};
  const double tol = -1e-14;
  for (size_t i = 0; i < vl.entries.size(); ++i) {
    const double a = vl.entries[i].weight, b = ls.entries[i].weight, c = vs.entries[i].weight;
    if (b + a - c < tol || c + a - b < tol) r.nesting_conditions = false;
  }
  r.all_permutations = r.nesting_conditions;
  for (size_t i = 0; i < vl.entries.size(); ++i) {
    const double a = vl.entries[i].weight, b = ls.entries[i].weight, c = vs.entries[i].weight;
    if (b + c - a < tol) r.all_permutations = false;
  }
  return r;
}

double StencilSet::max_radius() const {
  double r = 0.0;
  for (const auto& e : VL.entries) r = std::max(r, norm(e.offset));
  return r;
}

StencilSet make_stencil_set(Stencil vl, Stencil ls, Stencil vs) {
  check_aligned(vl, ls);
  check_aligned(vl, vs);
  if (vl.entries.empty()) throw ConfigError("empty stencil");
  return {std::move(vl), std::move(ls), std::move(vs)};
}

}  // namespace wettix
