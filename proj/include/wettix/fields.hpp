#pragma once

#include <string>
#include <vector>

#include "wettix/geometry.hpp"

namespace wettix {

/// Periodic grid on [0,1)^2; node (i,j) sits at (i dx, j dx).
struct Grid2D {
  int n = 0;
  double dx = 0.0;

  Grid2D() = default;
  explicit Grid2D(int n_);
  size_t size() const { return size_t(n) * n; }
  size_t index(int i, int j) const { return size_t(wrap(j)) * n + wrap(i); }
  int wrap(int i) const {
    int r = i % n;
    return r < 0 ? r + n : r;
  }
  Vec2 node(int i, int j) const { return {i * dx, j * dx}; }
};

struct ScalarField {
  Grid2D grid;
  std::vector<double> v;

  ScalarField() = default;
  explicit ScalarField(Grid2D g, double fill = 0.0) : grid(g), v(g.size(), fill) {}
  double& at(int i, int j) { return v[grid.index(i, j)]; }
  double at(int i, int j) const { return v[grid.index(i, j)]; }
};

struct LevelSetState {
  ScalarField phi_L, phi_V, phi_S;
  double target_area = 0.0;
  long step_index = 0;
};

// Periodic bilinear interpolation.
double sample(const ScalarField& f, Vec2 p);

// Area of {phi >= 0} inside one cell of unit area, corners counter-clockwise
// from (i,j). The cell is split into four triangles about the corner mean and
// the field is taken linear on each.
double cell_area_fraction(double v00, double v10, double v11, double v01);
double area_nonneg(const ScalarField& f);
// |{a >= 0} symmetric-difference {b >= 0}| with the same per-cell model.
double symmetric_difference_area(const ScalarField& a, const ScalarField& b);

// Zero-set polylines of f - level, oriented with {f >= level} on the left.
// Coordinates are unwrapped; loops that wrap the torus are returned open.
std::vector<Polyline> extract_contour(const ScalarField& f, double level);

ScalarField redistance(const ScalarField& f, double band);

// 4-connected components of {f >= 0} on the periodic node lattice.
int count_components(const ScalarField& f);

// Bilinear resampling onto another grid.
ScalarField resample(const ScalarField& f, Grid2D target);

void write_fld(const std::string& path, const ScalarField& f, const std::string& name);
ScalarField read_fld(const std::string& path, std::string* name = nullptr);
void write_xy(const std::string& path, const std::vector<Polyline>& lines);
std::vector<Polyline> read_xy(const std::string& path);

}  // namespace wettix
