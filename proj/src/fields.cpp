#include "wettix/fields.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "wettix/errors.hpp"

namespace wettix {

Grid2D::Grid2D(int n_) : n(n_), dx(1.0 / n_) {
  if (n_ < 8) throw ConfigError("grid needs n >= 8");
}

double sample(const ScalarField& f, Vec2 p) {
  const Grid2D& g = f.grid;
  const double x = p.x * g.n, y = p.y * g.n;
  const double fx = std::floor(x), fy = std::floor(y);
  const double tx = x - fx, ty = y - fy;
  const int i = g.wrap(int(fx)), j = g.wrap(int(fy));
  const int i1 = i + 1 == g.n ? 0 : i + 1, j1 = j + 1 == g.n ? 0 : j + 1;
  const double* v = f.v.data();
  const double a = v[size_t(j) * g.n + i], b = v[size_t(j) * g.n + i1];
  const double c = v[size_t(j1) * g.n + i], d = v[size_t(j1) * g.n + i1];
  return (1 - ty) * ((1 - tx) * a + tx * b) + ty * ((1 - tx) * c + tx * d);
}

namespace {

// Fraction of a triangle where a linear function with vertex values a,b,c is >= 0.
inline double tri_fraction(double a, double b, double c) {
  const bool pa = a >= 0, pb = b >= 0, pc = c >= 0;
  const int np = pa + pb + pc;
  if (np == 3) return 1.0;
  if (np == 0) return 0.0;
  if (np == 1) {
    double p, n1, n2;
    if (pa) p = a, n1 = b, n2 = c;
    else if (pb) p = b, n1 = a, n2 = c;
    else p = c, n1 = a, n2 = b;
    return p * p / ((p - n1) * (p - n2));
  }
  double n, p1, p2;
  if (!pa) n = a, p1 = b, p2 = c;
  else if (!pb) n = b, p1 = a, p2 = c;
  else n = c, p1 = a, p2 = b;
  return 1.0 - n * n / ((n - p1) * (n - p2));
}

struct CP {
  double x, y, f, g;
};

// Keeps the part of a convex polygon where the selected linear value is >= 0
// (or <= 0 when flip is set).
void clip(std::vector<CP>& poly, bool use_g, bool flip, std::vector<CP>& out) {
  out.clear();
  const size_t n = poly.size();
  auto val = [&](const CP& p) {
    double v = use_g ? p.g : p.f;
    return flip ? -v : v;
  };
  for (size_t i = 0; i < n; ++i) {
    const CP& a = poly[i];
    const CP& b = poly[(i + 1) % n];
    const double va = val(a), vb = val(b);
    if (va >= 0) out.push_back(a);
    if ((va >= 0) != (vb >= 0)) {
      const double t = va / (va - vb);
      out.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y), a.f + t * (b.f - a.f),
                     a.g + t * (b.g - a.g)});
    }
  }
  poly.swap(out);
}

double poly_area(const std::vector<CP>& p) {
  double s = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    const CP& a = p[i];
    const CP& b = p[(i + 1) % p.size()];
    s += a.x * b.y - a.y * b.x;
  }
  return 0.5 * std::abs(s);
}

double tri_symdiff(const CP& a, const CP& b, const CP& c) {
  std::vector<CP> poly, tmp;
  double s = 0.0;
  for (int pass = 0; pass < 2; ++pass) {
    poly = {a, b, c};
    clip(poly, pass == 1, false, tmp);
    if (poly.size() >= 3) clip(poly, pass == 0, true, tmp);
    if (poly.size() >= 3) s += poly_area(poly);
  }
  return s;
}

}  // namespace

double cell_area_fraction(double v00, double v10, double v11, double v01) {
  const double c = 0.25 * (v00 + v10 + v11 + v01);
  return 0.25 * (tri_fraction(c, v00, v10) + tri_fraction(c, v10, v11) +
                 tri_fraction(c, v11, v01) + tri_fraction(c, v01, v00));
}

double area_nonneg(const ScalarField& f) {
  const Grid2D& g = f.grid;
  const int n = g.n;
  double total = 0.0;
  for (int j = 0; j < n; ++j) {
    const int j1 = j + 1 == n ? 0 : j + 1;
    double row = 0.0;
    for (int i = 0; i < n; ++i) {
      const int i1 = i + 1 == n ? 0 : i + 1;
      row += cell_area_fraction(f.v[size_t(j) * n + i], f.v[size_t(j) * n + i1],
                                f.v[size_t(j1) * n + i1], f.v[size_t(j1) * n + i]);
    }
    total += row;
  }
  return total * g.dx * g.dx;
}

double symmetric_difference_area(const ScalarField& a, const ScalarField& b) {
  if (a.grid.n != b.grid.n) throw ConfigError("symmetric difference needs equal grids");
  const int n = a.grid.n;
  double total = 0.0;
  for (int j = 0; j < n; ++j) {
    const int j1 = j + 1 == n ? 0 : j + 1;
    double row = 0.0;
    for (int i = 0; i < n; ++i) {
      const int i1 = i + 1 == n ? 0 : i + 1;
      const size_t id[4] = {size_t(j) * n + i, size_t(j) * n + i1, size_t(j1) * n + i1,
                            size_t(j1) * n + i};
      bool same = true;
      for (size_t k : id) same = same && a.v[k] == b.v[k];
      if (same) continue;
      CP c[4] = {{0, 0, a.v[id[0]], b.v[id[0]]},
                 {1, 0, a.v[id[1]], b.v[id[1]]},
                 {1, 1, a.v[id[2]], b.v[id[2]]},
                 {0, 1, a.v[id[3]], b.v[id[3]]}};
      CP m{0.5, 0.5, 0.25 * (c[0].f + c[1].f + c[2].f + c[3].f),
           0.25 * (c[0].g + c[1].g + c[2].g + c[3].g)};
      for (int k = 0; k < 4; ++k) row += tri_symdiff(m, c[k], c[(k + 1) % 4]);
    }
    total += row;
  }
  return total * a.grid.dx * a.grid.dx;
}

std::vector<Polyline> extract_contour(const ScalarField& f, double level) {
  const Grid2D& g = f.grid;
  const int n = g.n;
  struct Seg {
    size_t e0, e1;
    Vec2 p0;
  };
  std::vector<Seg> segs;
  std::vector<long> by_start(2 * g.size(), -1);
  auto val = [&](int i, int j) { return f.v[g.index(i, j)]; };

  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int ci[4] = {i, i + 1, i + 1, i};
      const int cj[4] = {j, j, j + 1, j + 1};
      double cv[4];
      bool in[4];
      int nin = 0;
      for (int k = 0; k < 4; ++k) {
        cv[k] = val(ci[k], cj[k]);
        in[k] = cv[k] >= level;
        nin += in[k];
      }
      if (nin == 0 || nin == 4) continue;
      struct X {
        size_t edge;
        Vec2 p;
        bool in_out;
      } xs[4];
      int nx = 0;
      for (int k = 0; k < 4; ++k) {
        const int k1 = (k + 1) % 4;
        if (in[k] == in[k1]) continue;
        // Parameterize along the global edge direction so both cells agree.
        int ai = ci[k], aj = cj[k], bi = ci[k1], bj = cj[k1];
        double va = cv[k], vb = cv[k1];
        if (ai > bi || aj > bj) {
          std::swap(ai, bi);
          std::swap(aj, bj);
          std::swap(va, vb);
        }
        const double t = (level - va) / (vb - va);
        const size_t edge = 2 * g.index(ai, aj) + (aj != bj ? 1 : 0);
        const Vec2 p{(ai + t * (bi - ai)) * g.dx, (aj + t * (bj - aj)) * g.dx};
        xs[nx++] = {edge, p, in[k]};
      }
      if (nx == 2) {
        const X& a = xs[0].in_out ? xs[0] : xs[1];
        const X& b = xs[0].in_out ? xs[1] : xs[0];
        by_start[a.edge] = long(segs.size());
        segs.push_back({a.edge, b.edge, a.p});
      } else {
        const bool center_in = 0.25 * (cv[0] + cv[1] + cv[2] + cv[3]) >= level;
        for (int k = 0; k < 4; ++k) {
          if (!xs[k].in_out) continue;
          const X& b = center_in ? xs[(k + 1) % 4] : xs[(k + 3) % 4];
          by_start[xs[k].edge] = long(segs.size());
          segs.push_back({xs[k].edge, b.edge, xs[k].p});
        }
      }
    }
  }

  std::vector<char> used(segs.size(), 0);
  std::vector<Polyline> out;
  auto unwrap = [](Vec2 p, Vec2 ref) {
    p.x -= std::round(p.x - ref.x);
    p.y -= std::round(p.y - ref.y);
    return p;
  };
  for (size_t s0 = 0; s0 < segs.size(); ++s0) {
    if (used[s0]) continue;
    Polyline pl;
    size_t s = s0;
    Vec2 prev = segs[s0].p0;
    while (!used[s]) {
      used[s] = 1;
      const Vec2 p = pl.pts.empty() ? segs[s].p0 : unwrap(segs[s].p0, prev);
      pl.pts.push_back(p);
      prev = p;
      const long nx = by_start[segs[s].e1];
      if (nx < 0) break;
      s = size_t(nx);
    }
    const Vec2 first = unwrap(pl.pts.front(), prev);
    if (norm(first - pl.pts.front()) > 0.5) {
      pl.closed = false;
      pl.pts.push_back(first);
    } else {
      pl.closed = true;
    }
    dedupe(pl);
    if (pl.closed && pl.pts.size() < 3) continue;
    if (!pl.closed && pl.pts.size() < 2) continue;
    out.push_back(std::move(pl));
  }
  return out;
}

ScalarField redistance(const ScalarField& f, double band) {
  if (!(band > 0.0)) throw ConfigError("redistance band must be positive");
  const std::vector<Polyline> lines = extract_contour(f, 0.0);
  if (lines.empty()) throw NoInterface("redistance: field has no zero contour");
  const Grid2D& g = f.grid;
  std::vector<double> d(g.size(), band);
  const int reach = int(std::ceil(band / g.dx)) + 1;
  for (const Polyline& pl : lines) {
    const size_t ns = pl.closed ? pl.pts.size() : pl.pts.size() - 1;
    for (size_t k = 0; k < ns; ++k) {
      const Vec2 a = pl.pts[k], b = pl.pts[(k + 1) % pl.pts.size()];
      const int i0 = int(std::floor(std::min(a.x, b.x) / g.dx)) - reach;
      const int i1 = int(std::ceil(std::max(a.x, b.x) / g.dx)) + reach;
      const int j0 = int(std::floor(std::min(a.y, b.y) / g.dx)) - reach;
      const int j1 = int(std::ceil(std::max(a.y, b.y) / g.dx)) + reach;
      for (int j = j0; j <= j1; ++j)
        for (int i = i0; i <= i1; ++i) {
          const double dist = point_segment_distance(g.node(i, j), a, b);
          double& slot = d[g.index(i, j)];
          if (dist < slot) slot = dist;
        }
    }
  }
  ScalarField out(g);
  for (size_t k = 0; k < g.size(); ++k)
    out.v[k] = f.v[k] >= 0 ? d[k] : -std::max(d[k], 1e-300);
  return out;
}

int count_components(const ScalarField& f) {
  const Grid2D& g = f.grid;
  std::vector<int> label(g.size(), -1);
  std::vector<size_t> stack;
  int count = 0;
  for (size_t s = 0; s < g.size(); ++s) {
    if (f.v[s] < 0 || label[s] >= 0) continue;
    label[s] = count;
    stack.push_back(s);
    while (!stack.empty()) {
      const size_t k = stack.back();
      stack.pop_back();
      const int i = int(k % g.n), j = int(k / g.n);
      const size_t nb[4] = {g.index(i + 1, j), g.index(i - 1, j), g.index(i, j + 1),
                            g.index(i, j - 1)};
      for (size_t q : nb)
        if (f.v[q] >= 0 && label[q] < 0) {
          label[q] = count;
          stack.push_back(q);
        }
    }
    ++count;
  }
  return count;
}

ScalarField resample(const ScalarField& f, Grid2D target) {
  ScalarField out(target);
  for (int j = 0; j < target.n; ++j)
    for (int i = 0; i < target.n; ++i) out.v[size_t(j) * target.n + i] = sample(f, target.node(i, j));
  return out;
}

void write_fld(const std::string& path, const ScalarField& f, const std::string& name) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw SolverError("cannot write " + path);
  std::ostringstream hdr;
  hdr.precision(17);
  hdr << "wettix-fld " << f.grid.n << ' ' << f.grid.dx << ' ' << (name.empty() ? "phi" : name)
      << '\n';
  os << hdr.str();
  for (double x : f.v) {
    uint64_t u;
    std::memcpy(&u, &x, 8);
    if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap64(u);
    os.write(reinterpret_cast<const char*>(&u), 8);
  }
}

ScalarField read_fld(const std::string& path, std::string* name) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot read " + path);
  std::string line;
  std::getline(is, line);
  std::istringstream hs(line);
  std::string magic, nm;
  int n = 0;
  double dx = 0;
  hs >> magic >> n >> dx >> nm;
  if (magic != "wettix-fld" || n < 8) throw ConfigError(path + ": not a field file");
  if (name) *name = nm;
  ScalarField f{Grid2D(n)};
  for (double& x : f.v) {
    uint64_t u;
    if (!is.read(reinterpret_cast<char*>(&u), 8)) throw ConfigError(path + ": truncated");
    if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap64(u);
    std::memcpy(&x, &u, 8);
  }
  return f;
}

void write_xy(const std::string& path, const std::vector<Polyline>& lines) {
  std::ofstream os(path);
  if (!os) throw SolverError("cannot write " + path);
  os.precision(17);
  for (size_t k = 0; k < lines.size(); ++k) {
    if (k) os << '\n';
    for (const Vec2& p : lines[k].pts) os << p.x << ' ' << p.y << '\n';
    if (lines[k].closed && !lines[k].pts.empty())
      os << lines[k].pts.front().x << ' ' << lines[k].pts.front().y << '\n';
  }
}

std::vector<Polyline> read_xy(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read " + path);
  std::vector<Polyline> out;
  Polyline cur;
  std::string line;
  auto flush = [&] {
    if (cur.pts.empty()) return;
    if (cur.pts.size() > 2 && norm(cur.pts.front() - cur.pts.back()) == 0.0) {
      cur.pts.pop_back();
      cur.closed = true;
    }
    out.push_back(cur);
    cur = Polyline{};
  };
  while (std::getline(is, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      flush();
      continue;
    }
    std::istringstream ls(line);
    Vec2 p;
    ls >> p.x >> p.y;
    cur.pts.push_back(p);
  }
  flush();
  return out;
}

}  // namespace wettix
