#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "wettix/geometry.hpp"

namespace wettix {

/**
 * A smooth, pi-periodic, positive function of interface inclination.
 * Used for both surface tensions and mobilities. Derivatives are exact:
 * each kind is expanded as a truncated Taylor series about the evaluation
 * angle.
 */
class AngularFn {
 public:
  enum class Kind { Constant, Harmonics, TrigPower, InverseStiffness };
  struct Term {
    double amp;
    int k;  // even
    double phase;
  };

  AngularFn() = default;  // constant 1

  static AngularFn constant(double c);
  /// sqrt(1 + a sin^2(theta - phase))
  static AngularFn sqrt_sin2(double a, double phase);
  /// sqrt(1 + a cos^2(theta - phase))
  static AngularFn sqrt_cos2(double a, double phase);
  /// c0 + sum amp cos(k (theta - phase))
  static AngularFn harmonics(double c0, std::vector<Term> terms);
  /// scale * (c + b cos(k (theta - phase)))^p
  static AngularFn trig_power(double c, double b, int k, double phase, double p,
                              double scale = 1.0);
  /// scale / (sigma + sigma''), the mobility a single-circle kernel induces.
  static AngularFn inverse_stiffness(const AngularFn& sigma, double scale = 1.0);

  double operator()(double theta) const { return eval(theta, 0); }
  /// order 0, 1 or 2.
  double eval(double theta, int order) const;
  /// sigma + sigma''
  double stiffness(double theta) const;
  Kind kind() const { return kind_; }
  bool is_constant() const { return kind_ == Kind::Constant; }
  std::string describe() const;

  static constexpr int kMaxOrder = 6;
  using Jet = std::array<double, kMaxOrder + 1>;
  // Taylor coefficients f^(j)(theta)/j! for j <= order.
  void jet(double theta, int order, Jet& out) const;

 private:
  int depth() const;

  Kind kind_ = Kind::Constant;
  double c_ = 1.0, b_ = 0.0, phase_ = 0.0, p_ = 1.0, scale_ = 1.0;
  int k_ = 2;
  std::vector<Term> terms_;
  std::shared_ptr<const AngularFn> base_;
};

using AnisotropyFn = AngularFn;
using MobilityFn = AngularFn;

/// Throws ConfigError naming the failing invariant.
void validate_positive(const AngularFn& f, const std::string& name, int samples = 4096);
void validate_convex(const AngularFn& f, const std::string& name, int samples = 4096);

double convexity_margin(const AnisotropyFn& f, int samples);

struct SurfaceTensionTriple {
  AnisotropyFn sigma_VL, sigma_LS, sigma_VS;
  MobilityFn m_VL, m_LS, m_VS;
  bool strong_triangle = false;

  // Checks positivity, convexity and the pointwise triangle inequality;
  // records strong_triangle.
  void validate(int samples = 4096);
};

Polyline wulff_boundary(const AnisotropyFn& sigma, int n);

struct WinterbottomShape {
  Polyline boundary;  // closed, counter-clockwise, flat face on the substrate
  double lambda = 0.0;
};

// Truncated Wulff shape of area A resting on y = substrate_height, centred so
// its centroid has x = 0.
WinterbottomShape winterbottom_shape(const AnisotropyFn& sigma_VL, double sigma_LS,
                                     double sigma_VS, double area, double substrate_height,
                                     int n = 8192);

double contact_condition_residual(const AnisotropyFn& sigma_VL, double theta, double sigma_LS,
                                  double sigma_VS);

}  // namespace wettix
