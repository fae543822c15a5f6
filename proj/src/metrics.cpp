#include "wettix/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "wettix/errors.hpp"
#include "wettix/io.hpp"

namespace wettix {

ScalarField rasterize_polygon(const std::vector<Vec2>& poly, Grid2D g, double band) {
  if (poly.size() < 3) throw ConfigError("reference polygon needs at least 3 vertices");
  if (band <= 0) band = 3 * g.dx;
  const int n = g.n;
  // Inside test by scanline crossings, nodes are assumed in [0,1)^2.
  std::vector<uint8_t> inside(g.size(), 0);
  std::vector<double> xs;
  for (int j = 0; j < n; ++j) {
    const double y = j * g.dx;
    xs.clear();
    for (size_t k = 0; k < poly.size(); ++k) {
      const Vec2 a = poly[k], b = poly[(k + 1) % poly.size()];
      if ((a.y <= y) != (b.y <= y)) xs.push_back(a.x + (y - a.y) / (b.y - a.y) * (b.x - a.x));
    }
    std::sort(xs.begin(), xs.end());
    for (size_t k = 0; k + 1 < xs.size(); k += 2) {
      const int i0 = std::max(0, int(std::ceil(xs[k] / g.dx)));
      const int i1 = std::min(n - 1, int(std::floor(xs[k + 1] / g.dx)));
      for (int i = i0; i <= i1; ++i)
        if (i * g.dx >= xs[k] && i * g.dx < xs[k + 1]) inside[size_t(j) * n + i] = 1;
    }
  }
  std::vector<double> d(g.size(), band);
  const int reach = int(std::ceil(band / g.dx)) + 1;
  for (size_t k = 0; k < poly.size(); ++k) {
    const Vec2 a = poly[k], b = poly[(k + 1) % poly.size()];
    const int i0 = std::max(0, int(std::floor(std::min(a.x, b.x) / g.dx)) - reach);
    const int i1 = std::min(n - 1, int(std::ceil(std::max(a.x, b.x) / g.dx)) + reach);
    const int j0 = std::max(0, int(std::floor(std::min(a.y, b.y) / g.dx)) - reach);
    const int j1 = std::min(n - 1, int(std::ceil(std::max(a.y, b.y) / g.dx)) + reach);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) {
        const double dist = point_segment_distance(g.node(i, j), a, b);
        double& slot = d[size_t(j) * n + i];
        if (dist < slot) slot = dist;
      }
  }
  ScalarField f(g);
  for (size_t q = 0; q < g.size(); ++q) f.v[q] = inside[q] ? d[q] : -std::max(d[q], 1e-300);
  return f;
}

double l1_error(const ScalarField& a, const ScalarField& b) {
  return symmetric_difference_area(a, b);
}

double l1_error(const ScalarField& a, const ScalarField& b, int n_cmp) {
  const int n = std::max({n_cmp, a.grid.n, b.grid.n});
  const Grid2D g(n);
  const ScalarField ra = a.grid.n == n ? a : resample(a, g);
  const ScalarField rb = b.grid.n == n ? b : resample(b, g);
  return symmetric_difference_area(ra, rb);
}

double l1_error(const ScalarField& a, const std::vector<Vec2>& reference, int n_cmp) {
  const int n = std::max(n_cmp, a.grid.n);
  const Grid2D g(n);
  const ScalarField ref = rasterize_polygon(reference, g);
  const ScalarField ra = a.grid.n == n ? a : resample(a, g);
  return symmetric_difference_area(ra, ref);
}

namespace {

struct SegIndex {
  std::vector<std::pair<Vec2, Vec2>> segs;
  double h = 0.0;
  std::unordered_map<long long, std::vector<int>> buckets;

  long long key(long long bx, long long by) const { return (bx << 32) ^ (by & 0xffffffffLL); }

  explicit SegIndex(const std::vector<Polyline>& lines) {
    double total = 0.0;
    for (const Polyline& pl : lines) {
      const size_t n = pl.pts.size();
      if (n == 1) segs.push_back({pl.pts[0], pl.pts[0]});
      const size_t ns = pl.closed ? n : n - 1;
      for (size_t k = 0; k < ns && n > 1; ++k) {
        segs.push_back({pl.pts[k], pl.pts[(k + 1) % n]});
        total += norm(segs.back().second - segs.back().first);
      }
    }
    h = std::max(1e-6, 4 * total / std::max<size_t>(1, segs.size()));
    for (int s = 0; s < int(segs.size()); ++s) {
      const auto [a, b] = segs[size_t(s)];
      const long long x0 = (long long)std::floor(std::min(a.x, b.x) / h);
      const long long x1 = (long long)std::floor(std::max(a.x, b.x) / h);
      const long long y0 = (long long)std::floor(std::min(a.y, b.y) / h);
      const long long y1 = (long long)std::floor(std::max(a.y, b.y) / h);
      for (long long by = y0; by <= y1; ++by)
        for (long long bx = x0; bx <= x1; ++bx) buckets[key(bx, by)].push_back(s);
    }
  }

  double distance(Vec2 p) const {
    const long long bx = (long long)std::floor(p.x / h), by = (long long)std::floor(p.y / h);
    double best = INFINITY;
    for (long long r = 0;; ++r) {
      // Ring r of buckets; anything beyond ring r is at least r*h away.
      for (long long y = by - r; y <= by + r; ++y)
        for (long long x = bx - r; x <= bx + r; ++x) {
          if (std::max(std::llabs(x - bx), std::llabs(y - by)) != r) continue;
          auto it = buckets.find(key(x, y));
          if (it == buckets.end()) continue;
          for (int s : it->second)
            best = std::min(best, point_segment_distance(p, segs[size_t(s)].first, segs[size_t(s)].second));
        }
      if (best <= r * h) return best;
      if (r > 1000000) return best;
    }
  }
};

// Segments of b that can hold the nearest point for any point within r of p.
void candidates(const SegIndex& b, Vec2 p, double r, std::vector<int>& out, std::vector<int>& stamp,
                int tag) {
  out.clear();
  const long long x0 = (long long)std::floor((p.x - r) / b.h), x1 = (long long)std::floor((p.x + r) / b.h);
  const long long y0 = (long long)std::floor((p.y - r) / b.h), y1 = (long long)std::floor((p.y + r) / b.h);
  if ((x1 - x0 + 1) * (y1 - y0 + 1) > (long long)b.buckets.size()) {
    for (const auto& [k, v] : b.buckets)
      for (int s : v)
        if (stamp[size_t(s)] != tag) stamp[size_t(s)] = tag, out.push_back(s);
    return;
  }
  for (long long y = y0; y <= y1; ++y)
    for (long long x = x0; x <= x1; ++x) {
      auto it = b.buckets.find(b.key(x, y));
      if (it == b.buckets.end()) continue;
      for (int s : it->second)
        if (stamp[size_t(s)] != tag) stamp[size_t(s)] = tag, out.push_back(s);
    }
}

// Directed Hausdorff distance by branch and bound over sub-segments of a.
// The distance to one segment is convex along a line, so on [p, q]
// min_k max(d_k(p), d_k(q)) bounds the distance to b from above.
double directed(const std::vector<Polyline>& a, const SegIndex& b) {
  double worst = 0.0;
  std::vector<int> cand, stamp(b.segs.size(), -1);
  int tag = 0;
  struct Piece {
    Vec2 p, q;
  };
  std::vector<Piece> work;
  for (const Polyline& pl : a) {
    const size_t n = pl.pts.size();
    if (n == 1) worst = std::max(worst, b.distance(pl.pts[0]));
    const size_t ns = pl.closed ? n : (n ? n - 1 : 0);
    for (size_t k = 0; k < ns && n > 1; ++k) work.push_back({pl.pts[k], pl.pts[(k + 1) % n]});
  }
  for (const Piece& w : work) worst = std::max({worst, b.distance(w.p), b.distance(w.q)});
  while (!work.empty()) {
    const Piece w = work.back();
    work.pop_back();
    const double len = norm(w.q - w.p);
    const double dp = b.distance(w.p);
    candidates(b, w.p, dp + len, cand, stamp, tag++);
    double upper = INFINITY, dq = INFINITY;
    for (int s : cand) {
      const auto& [u, v] = b.segs[size_t(s)];
      const double a0 = point_segment_distance(w.p, u, v), a1 = point_segment_distance(w.q, u, v);
      upper = std::min(upper, std::max(a0, a1));
      dq = std::min(dq, a1);
    }
    worst = std::max({worst, dp, dq});
    if (upper <= worst + 1e-15 || len <= 1e-15) continue;
    const Vec2 mid = 0.5 * (w.p + w.q);
    work.push_back({w.p, mid});
    work.push_back({mid, w.q});
  }
  return worst;
}

}  // namespace

double linf_error(const std::vector<Polyline>& a, const std::vector<Polyline>& b) {
  auto empty = [](const std::vector<Polyline>& v) {
    for (const Polyline& p : v)
      if (!p.pts.empty()) return false;
    return true;
  };
  if (empty(a) || empty(b)) throw ConfigError("linf_error: empty polyline");
  const SegIndex ia(a), ib(b);
  return std::max(directed(a, ib), directed(b, ia));
}

double linf_error(const Polyline& a, const Polyline& b) {
  return linf_error(std::vector<Polyline>{a}, std::vector<Polyline>{b});
}

std::vector<ErrorRow> convergence_table(std::vector<ErrorRow> rows) {
  for (size_t k = 0; k < rows.size(); ++k)
    rows[k].order = k == 0 ? std::nullopt : std::optional<double>(std::log2(rows[k - 1].l1 / rows[k].l1));
  return rows;
}

double loglog_slope(const std::vector<ErrorRow>& rows) {
  if (rows.size() < 2) return NAN;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = double(rows.size());
  for (const ErrorRow& r : rows) {
    const double x = std::log(1.0 / double(r.steps)), y = std::log(r.l1);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::string error_table_csv(const std::vector<ErrorRow>& rows) {
  std::ostringstream os;
  os << "steps,inv_dx,l1,linf,order\n";
  for (const ErrorRow& r : rows) {
    os << r.steps << ',' << r.inv_dx << ',';
    os << fmt(r.l1) << ',';
    if (r.linf) os << fmt(*r.linf);
    os << ',';
    if (r.order) os << fmt(*r.order);
    os << '\n';
  }
  os << "# slope=" << fmt(loglog_slope(rows)) << '\n';
  return os.str();
}

void write_error_table(const std::string& path, const std::vector<ErrorRow>& rows) {
  std::ofstream os(path);
  if (!os) throw SolverError("cannot write " + path);
  os << error_table_csv(rows);
}

std::vector<ErrorRow> read_error_table(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read " + path);
  std::string line;
  std::getline(is, line);
  std::vector<ErrorRow> rows;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    while (f.size() < 5) f.emplace_back();
    ErrorRow r;
    r.steps = std::stol(f[0]);
    r.inv_dx = std::stol(f[1]);
    r.l1 = std::stod(f[2]);
    if (!f[3].empty()) r.linf = std::stod(f[3]);
    if (!f[4].empty()) r.order = std::stod(f[4]);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace wettix
