#pragma once

#include <vector>

#include "wettix/angular.hpp"
#include "wettix/geometry.hpp"

namespace wettix {

/**
 * Marker discretization of a droplet surface on the line y = c. Node 0 is the
 * right contact point; nodes run counter-clockwise over the top to the left
 * contact point at node M.
 */
struct MarkerCurve {
  std::vector<Vec2> nodes;
  double c = 0.0;
  int M() const { return int(nodes.size()) - 1; }
};

struct FrontTrackParams {
  AnisotropyFn sigma_VL;
  MobilityFn m_VL;
  double sigma_LS = 1.0, sigma_VS = 1.0;
  // Contact relaxation rate; <= 0 selects 100 * max m, infinity holds the
  // contact force at zero every step.
  double eta = 0.0;
  // Area the correction restores; <= 0 uses the area of the input curve.
  double area = 0.0;
};

double curve_area(const MarkerCurve& c);

// Force driving the contact point along the substrate for outward normal angle
// theta_n of the vapor-liquid curve there; zero at the anisotropic Young angle.
double contact_force(const AnisotropyFn& sigma, double theta_n, double sigma_LS,
                     double sigma_VS);

// Largest stable forward-Euler step for the current curve.
double ft_stable_dt(const MarkerCurve& c, const FrontTrackParams& p);

MarkerCurve ft_step(const MarkerCurve& c, const FrontTrackParams& p, double dt);

// Advances to time T with steps no larger than dt_max or the stability bound.
MarkerCurve ft_run(MarkerCurve c, const FrontTrackParams& p, double T, double dt_max = 1.0,
                   long* steps_taken = nullptr);

// Uniform-arclength resampling to M segments through a cubic Hermite fit.
MarkerCurve redistribute(const MarkerCurve& c, int M);

// Part of a closed polygon above y = c, as a marker curve with M segments.
MarkerCurve curve_from_polygon(const std::vector<Vec2>& poly, double c, int M);

// Outward-normal angles at the right and left contact points.
double contact_normal_angle(const MarkerCurve& c, bool right);

// Closed polygon: the curve plus the wetted substrate segment.
Polyline curve_polygon(const MarkerCurve& c);

void check_self_intersection(const MarkerCurve& c);

}  // namespace wettix
