#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wettix/fields.hpp"
#include "wettix/geometry.hpp"

namespace wettix {

struct ErrorRow {
  long steps = 0;
  long inv_dx = 0;
  double l1 = 0.0;
  std::optional<double> linf;
  std::optional<double> order;
};

// Signed distance to a closed polygon (positive inside) sampled on a grid;
// exact within `band` of the boundary, clamped beyond.
ScalarField rasterize_polygon(const std::vector<Vec2>& poly, Grid2D grid, double band = 0.0);

// Both fields on the same grid.
double l1_error(const ScalarField& a, const ScalarField& b);
// Field against a closed reference polygon, compared on a grid of at least n_cmp nodes.
double l1_error(const ScalarField& a, const std::vector<Vec2>& reference, int n_cmp = 1600);
double l1_error(const ScalarField& a, const ScalarField& b, int n_cmp);

// Symmetric Hausdorff distance between polyline sets.
double linf_error(const std::vector<Polyline>& a, const std::vector<Polyline>& b);
double linf_error(const Polyline& a, const Polyline& b);

// Fills order = log2(l1_prev / l1) from the second row on.
std::vector<ErrorRow> convergence_table(std::vector<ErrorRow> rows);
// Least-squares slope of log(l1) against log(dt) with dt proportional to 1/steps.
double loglog_slope(const std::vector<ErrorRow>& rows);

std::string error_table_csv(const std::vector<ErrorRow>& rows);
void write_error_table(const std::string& path, const std::vector<ErrorRow>& rows);
std::vector<ErrorRow> read_error_table(const std::string& path);

}  // namespace wettix
