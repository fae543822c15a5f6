#include "wettix/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "wettix/errors.hpp"
#include "wettix/fronttrack.hpp"
#include "wettix/io.hpp"
#include "wettix/threshold.hpp"

namespace wettix {

namespace {

constexpr double kPi = 3.14159265358979323846;

AngularFn parse_angular(const Value& v, const std::string& ctx) {
  if (v.is_number()) return AngularFn::constant(v.as_number(ctx));
  if (v.kind != Value::Kind::Call) throw ConfigError(ctx + ": expected a number or a function form");
  const std::string& f = v.name;
  if (f == "constant") {
    v.check_args({"c"}, ctx);
    return AngularFn::constant(v.num_arg("c", 0, ctx));
  }
  if (f == "sqrt_sin2" || f == "sqrt_cos2") {
    v.check_args({"a", "phase"}, ctx);
    const double a = v.num_arg("a", 0, ctx);
    const Value* ph = v.arg("phase", 1);
    const double phase = ph ? ph->as_number(ctx) : 0.0;
    return f == "sqrt_sin2" ? AngularFn::sqrt_sin2(a, phase) : AngularFn::sqrt_cos2(a, phase);
  }
  if (f == "harmonics") {
    v.check_args({"c0", "terms"}, ctx);
    const double c0 = v.num_arg("c0", 0, ctx);
    std::vector<AngularFn::Term> terms;
    if (const Value* t = v.arg("terms", 1)) {
      if (t->kind != Value::Kind::List) throw ConfigError(ctx + ": terms must be a list");
      for (const Value& e : t->items) {
        if (e.kind != Value::Kind::Tuple || e.items.size() < 2 || e.items.size() > 3)
          throw ConfigError(ctx + ": each term is (amplitude, k[, phase])");
        terms.push_back({e.items[0].as_number(ctx), int(e.items[1].as_integer(ctx)),
                         e.items.size() == 3 ? e.items[2].as_number(ctx) : 0.0});
      }
    }
    return AngularFn::harmonics(c0, std::move(terms));
  }
  if (f == "trig_power") {
    v.check_args({"c", "b", "k", "phase", "p", "scale"}, ctx);
    const Value* k = v.arg("k", 2);
    const Value* ph = v.arg("phase", 3);
    const Value* p = v.arg("p", 4);
    const Value* s = v.arg("scale", 5);
    return AngularFn::trig_power(v.num_arg("c", 0, ctx), v.num_arg("b", 1, ctx),
                                 k ? int(k->as_integer(ctx)) : 2, ph ? ph->as_number(ctx) : 0.0,
                                 p ? p->as_number(ctx) : 1.0, s ? s->as_number(ctx) : 1.0);
  }
  if (f == "inverse_stiffness") {
    v.check_args({"sigma", "scale"}, ctx);
    const Value* base = v.arg("sigma", 0);
    if (!base) throw ConfigError(ctx + ": inverse_stiffness needs sigma");
    const Value* s = v.arg("scale", 1);
    return AngularFn::inverse_stiffness(parse_angular(*base, ctx), s ? s->as_number(ctx) : 1.0);
  }
  throw ConfigError(ctx + ": unknown function form '" + f + "'");
}

Vec2 parse_point(const Value& v, const std::string& ctx) {
  if (v.kind != Value::Kind::Tuple || v.items.size() != 2)
    throw ConfigError(ctx + ": expected a point (x, y)");
  return {v.items[0].as_number(ctx), v.items[1].as_number(ctx)};
}

SubstrateProfile parse_profile(const Value& v, const std::string& ctx) {
  SubstrateProfile p;
  if (v.kind != Value::Kind::Call) throw ConfigError(ctx + ": expected flat(), parabola() or sinusoid()");
  if (v.name == "flat") {
    v.check_args({"h"}, ctx);
    p.kind = SubstrateProfile::Kind::Flat;
    p.h = v.arg("h", 0) ? v.num_arg("h", 0, ctx) : 0.5;
  } else if (v.name == "parabola") {
    v.check_args({"a", "x0", "h"}, ctx);
    p.kind = SubstrateProfile::Kind::Parabola;
    p.a = v.num_arg("a", 0, ctx);
    p.x0 = v.arg("x0", 1) ? v.num_arg("x0", 1, ctx) : 0.5;
    p.h = v.arg("h", 2) ? v.num_arg("h", 2, ctx) : 0.5;
  } else if (v.name == "sinusoid") {
    v.check_args({"a", "k", "x0", "h"}, ctx);
    p.kind = SubstrateProfile::Kind::Sinusoid;
    p.a = v.num_arg("a", 0, ctx);
    const Value* k = v.arg("k", 1);
    p.k = k ? int(k->as_integer(ctx)) : 1;
    p.x0 = v.arg("x0", 2) ? v.num_arg("x0", 2, ctx) : 0.5;
    p.h = v.arg("h", 3) ? v.num_arg("h", 3, ctx) : 0.5;
  } else {
    throw ConfigError(ctx + ": unknown substrate '" + v.name + "'");
  }
  return p;
}

ShapeSpec parse_shape(const Value& v, const std::string& ctx) {
  if (v.kind == Value::Kind::List) {
    std::vector<ShapeSpec> parts;
    for (const Value& e : v.items) parts.push_back(parse_shape(e, ctx));
    if (parts.empty()) throw ConfigError(ctx + ": empty shape list");
    return parts.size() == 1 ? parts[0] : ShapeSpec::set_union(std::move(parts));
  }
  if (v.kind != Value::Kind::Call) throw ConfigError(ctx + ": expected a shape");
  const std::string& f = v.name;
  if (f == "disc") {
    v.check_args({"x", "y", "r", "center"}, ctx);
    if (const Value* c = v.arg("center"))
      return ShapeSpec::disc(parse_point(*c, ctx), v.num_arg("r", 1, ctx));
    return ShapeSpec::disc({v.num_arg("x", 0, ctx), v.num_arg("y", 1, ctx)}, v.num_arg("r", 2, ctx));
  }
  if (f == "polygon") {
    v.check_args({"points"}, ctx);
    std::vector<Vec2> pts;
    const Value* list = v.arg("points");
    if (!list && v.items.size() == 1 && v.items[0].kind == Value::Kind::List) list = &v.items[0];
    for (const Value& e : list ? list->items : v.items) pts.push_back(parse_point(e, ctx));
    if (pts.size() < 3) throw ConfigError(ctx + ": polygon needs at least 3 points");
    return ShapeSpec::polygon(std::move(pts));
  }
  if (f == "rect") {
    v.check_args({"x0", "y0", "x1", "y1"}, ctx);
    return ShapeSpec::rect({v.num_arg("x0", 0, ctx), v.num_arg("y0", 1, ctx)},
                           {v.num_arg("x1", 2, ctx), v.num_arg("y1", 3, ctx)});
  }
  if (f == "union" || f == "intersection") {
    v.check_args({}, ctx);
    std::vector<ShapeSpec> parts;
    for (const Value& e : v.items) parts.push_back(parse_shape(e, ctx));
    if (parts.size() < 2) throw ConfigError(ctx + ": " + f + " needs two or more shapes");
    return f == "union" ? ShapeSpec::set_union(std::move(parts))
                        : ShapeSpec::set_intersection(std::move(parts));
  }
  if (f == "difference") {
    v.check_args({}, ctx);
    if (v.items.size() != 2) throw ConfigError(ctx + ": difference takes two shapes");
    return ShapeSpec::set_difference(parse_shape(v.items[0], ctx), parse_shape(v.items[1], ctx));
  }
  if (f == "flat" || f == "parabola" || f == "sinusoid")
    return ShapeSpec::substrate(parse_profile(v, ctx));
  throw ConfigError(ctx + ": unknown shape '" + f + "'");
}

bool parse_bool(const Value& v, const std::string& ctx) {
  if (v.is_ident("true") || v.is_ident("on") || v.is_ident("yes")) return true;
  if (v.is_ident("false") || v.is_ident("off") || v.is_ident("no")) return false;
  if (v.is_number()) return v.number != 0.0;
  throw ConfigError(ctx + ": expected true or false");
}

long step_count(double T, double dt) {
  if (!(dt > 0.0) || !(T > 0.0)) throw ConfigError("time.T and time.dt must be positive");
  const double r = T / dt;
  const long s = std::lround(r);
  if (s < 1 || std::abs(r - double(s)) > 1e-9 * std::max(1.0, r))
    throw ConfigError("T / dt = " + fmt(r) + " is not an integer");
  return s;
}

bool flat_substrate(const ExperimentConfig& cfg) {
  return cfg.substrate.kind == ShapeSpec::Kind::Substrate && cfg.substrate.profile.is_flat();
}

void require_flat_constant(const ExperimentConfig& cfg, const std::string& what) {
  if (!flat_substrate(cfg))
    throw ConfigError(what + " needs a flat substrate (shapes.substrate = flat(h))");
  if (!cfg.tensions.sigma_LS.is_constant() || !cfg.tensions.sigma_VS.is_constant())
    throw ConfigError(what + " needs constant sigma_LS and sigma_VS");
}

Polyline droplet_outline(const ShapeSpec& s) {
  Polyline pl;
  pl.closed = true;
  if (s.kind == ShapeSpec::Kind::Polygon) {
    pl.pts = s.vertices;
    if (signed_area(pl.pts) < 0) std::reverse(pl.pts.begin(), pl.pts.end());
  } else if (s.kind == ShapeSpec::Kind::Disc) {
    const int n = 4096;
    for (int i = 0; i < n; ++i) {
      const double t = 2 * kPi * i / n;
      pl.pts.push_back(s.center + Vec2{s.radius * std::cos(t), s.radius * std::sin(t)});
    }
  } else {
    throw ConfigError("front-tracking reference needs a disc or polygon droplet");
  }
  return pl;
}

Polyline shifted(Polyline p, Vec2 d) {
  for (Vec2& q : p.pts) q = q + d;
  return p;
}

// Runs fn(i) for i in [0, count) with at most jobs workers; rethrows the first error.
template <class F>
void parallel_for(size_t count, int jobs, F fn) {
  jobs = std::max(1, std::min<int>(jobs, int(count)));
  if (jobs == 1) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::mutex mu;
  size_t next = 0;
  std::exception_ptr err;
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t)
    pool.emplace_back([&] {
      for (;;) {
        size_t i;
        {
          std::lock_guard<std::mutex> lk(mu);
          if (next >= count || err) return;
          i = next++;
        }
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lk(mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace

ExperimentConfig load_experiment(const Config& c) {
  c.validate_keys();
  ExperimentConfig e;
  e.source = c;
  auto num = [&](const char* s, const char* k) { return c.get(s, k).as_number(std::string(s) + "." + k); };
  auto integer = [&](const char* s, const char* k) {
    return c.get(s, k).as_integer(std::string(s) + "." + k);
  };

  if (c.has("grid", "n")) e.n = int(integer("grid", "n"));
  if (e.n < 8) throw ConfigError("grid.n must be at least 8");
  if (!c.has("time", "T")) throw ConfigError("missing config key time.T");
  e.T = num("time", "T");
  if (c.has("time", "levels")) {
    const Value v = c.get("time", "levels");
    if (v.kind != Value::Kind::List) throw ConfigError("time.levels must be a list of (steps, n)");
    for (const Value& l : v.items) {
      if (l.kind != Value::Kind::Tuple || l.items.size() != 2)
        throw ConfigError("time.levels entries are (steps, n)");
      e.levels.push_back({l.items[0].as_integer("time.levels"), int(l.items[1].as_integer("time.levels"))});
      if (e.levels.back().steps < 1 || e.levels.back().n < 8)
        throw ConfigError("time.levels entries need steps >= 1 and n >= 8");
    }
  }
  if (c.has("time", "dt")) {
    e.dt = num("time", "dt");
  } else if (!e.levels.empty()) {
    e.dt = e.T / double(e.levels.back().steps);
    e.n = e.levels.back().n;
  } else {
    throw ConfigError("missing config key time.dt");
  }
  step_count(e.T, e.dt);
  if (c.has("time", "snapshots")) {
    const Value v = c.get("time", "snapshots");
    if (v.kind != Value::Kind::List) throw ConfigError("time.snapshots must be a list of times");
    for (const Value& t : v.items) e.snapshots.push_back(t.as_number("time.snapshots"));
  }

  const char* sig[3] = {"sigma_VL", "sigma_LS", "sigma_VS"};
  AnisotropyFn* sdst[3] = {&e.tensions.sigma_VL, &e.tensions.sigma_LS, &e.tensions.sigma_VS};
  for (int i = 0; i < 3; ++i) {
    if (!c.has("tensions", sig[i])) throw ConfigError(std::string("missing config key tensions.") + sig[i]);
    *sdst[i] = parse_angular(c.get("tensions", sig[i]), std::string("tensions.") + sig[i]);
  }

  if (c.has("kernel", "mode")) {
    const Value v = c.get("kernel", "mode");
    if (v.is_ident("single")) e.mode = KernelMode::Single;
    else if (v.is_ident("two")) e.mode = KernelMode::Two;
    else throw ConfigError("kernel.mode must be single or two");
  }
  if (c.has("kernel", "R")) e.R = num("kernel", "R");
  if (c.has("kernel", "R1")) e.R1 = num("kernel", "R1");
  if (c.has("kernel", "R2")) e.R2 = num("kernel", "R2");
  if (c.has("kernel", "q")) e.q = int(integer("kernel", "q"));
  if (c.has("kernel", "time_scale")) e.time_scale = num("kernel", "time_scale");
  if (!(e.time_scale > 0)) throw ConfigError("kernel.time_scale must be positive");

  const char* mob[3] = {"m_VL", "m_LS", "m_VS"};
  MobilityFn* mdst[3] = {&e.tensions.m_VL, &e.tensions.m_LS, &e.tensions.m_VS};
  for (int i = 0; i < 3; ++i) {
    if (!c.has("mobilities", mob[i])) continue;
    const Value v = c.get("mobilities", mob[i]);
    if (v.is_ident("induced")) {
      if (e.mode != KernelMode::Single)
        throw ConfigError(std::string("mobilities.") + mob[i] + " = induced needs kernel.mode = single");
      continue;
    }
    if (e.mode == KernelMode::Single)
      throw ConfigError(std::string("mobilities.") + mob[i] +
                        ": single-circle kernels fix the mobility; use kernel.mode = two");
    *mdst[i] = parse_angular(v, std::string("mobilities.") + mob[i]);
  }
  if (c.has("mobilities", "m_VS_alt")) {
    if (e.mode == KernelMode::Single)
      throw ConfigError("mobilities.m_VS_alt needs kernel.mode = two");
    e.m_VS_alt = parse_angular(c.get("mobilities", "m_VS_alt"), "mobilities.m_VS_alt");
  }

  if (!c.has("shapes", "droplet")) throw ConfigError("missing config key shapes.droplet");
  e.droplet = parse_shape(c.get("shapes", "droplet"), "shapes.droplet");
  if (c.has("shapes", "substrate")) {
    e.substrate = parse_shape(c.get("shapes", "substrate"), "shapes.substrate");
  } else {
    e.substrate = ShapeSpec::substrate(SubstrateProfile{});
  }
  if (c.has("shapes", "area")) {
    const Value v = c.get("shapes", "area");
    e.area = v.is_ident("auto") ? -1.0 : v.as_number("shapes.area");
    if (!v.is_ident("auto") && !(e.area > 0)) throw ConfigError("shapes.area must be positive or auto");
  }

  if (c.has("solver", "comparison")) {
    const Value v = c.get("solver", "comparison");
    if (v.is_ident("nonstrict")) e.comparison = Comparison::NonStrict;
    else if (v.is_ident("strict")) e.comparison = Comparison::Strict;
    else throw ConfigError("solver.comparison must be nonstrict or strict");
  }
  if (c.has("solver", "selection")) {
    const Value v = c.get("solver", "selection");
    if (v.is_ident("interpolated")) e.selection = Selection::Interpolated;
    else if (v.is_ident("midpoint")) e.selection = Selection::Midpoint;
    else throw ConfigError("solver.selection must be interpolated or midpoint");
  }
  if (c.has("solver", "band")) {
    const Value v = c.get("solver", "band");
    if (v.is_ident("off")) e.band = NAN;
    else if (v.is_ident("auto")) e.band = 0.0;
    else {
      e.band = v.as_number("solver.band");
      if (!(e.band > 0)) throw ConfigError("solver.band must be off, auto or a positive width");
    }
  }
  if (c.has("solver", "mu_tol")) {
    const Value v = c.get("solver", "mu_tol");
    e.mu_tol = v.is_ident("auto") ? NAN : v.as_number("solver.mu_tol");
    if (!std::isnan(e.mu_tol) && !(e.mu_tol > 0)) throw ConfigError("solver.mu_tol must be positive");
  }
  if (c.has("solver", "mu_lo")) e.mu_lo = num("solver", "mu_lo");
  if (c.has("solver", "mu_hi")) e.mu_hi = num("solver", "mu_hi");
  if (c.has("solver", "reference")) {
    const Value v = c.get("solver", "reference");
    if (v.is_ident("none")) e.reference = Reference::None;
    else if (v.is_ident("winterbottom")) e.reference = Reference::Winterbottom;
    else if (v.is_ident("fronttrack")) e.reference = Reference::FrontTrack;
    else if (v.is_ident("finest-self")) e.reference = Reference::FinestSelf;
    else throw ConfigError("solver.reference must be none, winterbottom, fronttrack or finest-self");
  } else if (!flat_substrate(e)) {
    e.reference = Reference::FinestSelf;
  }
  if (c.has("solver", "ft_M")) e.ft_M = int(integer("solver", "ft_M"));
  if (e.ft_M < 8) throw ConfigError("solver.ft_M must be at least 8");
  if (c.has("solver", "ft_eta")) {
    const Value& v = c.get("solver", "ft_eta");
    if (v.is_number() && std::isinf(v.number) && v.number > 0)
      e.ft_eta = INFINITY;
    else
      e.ft_eta = num("solver", "ft_eta");
  }
  if (c.has("solver", "ft_dt")) e.ft_dt = num("solver", "ft_dt");
  if (c.has("solver", "n_cmp")) e.n_cmp = int(integer("solver", "n_cmp"));
  if (c.has("solver", "redistance")) {
    const Value v = c.get("solver", "redistance");
    e.redistance_band = v.is_ident("off") ? 0.0 : v.as_number("solver.redistance");
    if (e.redistance_band < 0) throw ConfigError("solver.redistance must be off or a positive width");
  }
  if (c.has("solver", "redistance_every")) e.redistance_every = int(integer("solver", "redistance_every"));
  if (e.redistance_band > 0 && e.redistance_every <= 0) e.redistance_every = 10;
  if (c.has("solver", "threads")) e.threads = int(integer("solver", "threads"));
  if (c.has("solver", "seed")) e.seed = uint64_t(integer("solver", "seed"));

  if (const char* env = std::getenv("WETTIX_OUT"); env && *env) e.out_dir = env;
  if (c.has("output", "dir")) e.out_dir = c.get("output", "dir").as_ident("output.dir");
  if (c.has("output", "name")) e.name = c.get("output", "name").as_ident("output.name");
  if (c.has("output", "fields")) e.write_fields = parse_bool(c.get("output", "fields"), "output.fields");
  if (c.has("output", "contours"))
    e.write_contours = parse_bool(c.get("output", "contours"), "output.contours");
  if (c.has("output", "energy")) e.write_energy = parse_bool(c.get("output", "energy"), "output.energy");
  return e;
}

KernelTriple build_kernels(const ExperimentConfig& cfg) {
  KernelTriple k;
  const SurfaceTensionTriple& t = cfg.tensions;
  if (cfg.mode == KernelMode::Single) {
    k.VL = build_single_circle_kernel(t.sigma_VL, cfg.R, cfg.q).kernel;
    k.LS = build_single_circle_kernel(t.sigma_LS, cfg.R, cfg.q).kernel;
    k.VS = build_single_circle_kernel(t.sigma_VS, cfg.R, cfg.q).kernel;
  } else {
    k.VL = build_two_circle_kernel(t.sigma_VL, t.m_VL, cfg.R1, cfg.R2, cfg.q);
    k.LS = build_two_circle_kernel(t.sigma_LS, t.m_LS, cfg.R1, cfg.R2, cfg.q);
    k.VS = build_two_circle_kernel(t.sigma_VS, t.m_VS, cfg.R1, cfg.R2, cfg.q);
  }
  return k;
}

SurfaceTensionTriple effective_tensions(const ExperimentConfig& cfg, const KernelTriple& k) {
  SurfaceTensionTriple t = cfg.tensions;
  t.m_VL = k.VL.m;
  t.m_LS = k.LS.m;
  t.m_VS = k.VS.m;
  t.validate();
  return t;
}

StepParams make_step_params(const ExperimentConfig& cfg, const KernelTriple& k) {
  StepParams p;
  p.dt = cfg.dt;
  p.time_scale = cfg.time_scale;
  p.stencils = make_step_stencils(k.VL, k.LS, k.VS, cfg.dt, cfg.time_scale);
  p.mu_lo = cfg.mu_lo;
  p.mu_hi = cfg.mu_hi;
  p.mu_tol = cfg.mu_tol;
  p.comparison = cfg.comparison;
  p.selection = cfg.selection;
  p.band = cfg.band;
  p.threads = cfg.threads;
  return p;
}

Vec2 region_centroid(const ScalarField& f) {
  const Grid2D& g = f.grid;
  double a = 0.0, sx = 0.0, sy = 0.0;
  for (int j = 0; j < g.n; ++j)
    for (int i = 0; i < g.n; ++i) {
      const double fr =
          cell_area_fraction(f.at(i, j), f.at(i + 1, j), f.at(i + 1, j + 1), f.at(i, j + 1));
      if (fr <= 0.0) continue;
      a += fr;
      sx += fr * (i + 0.5) * g.dx;
      sy += fr * (j + 0.5) * g.dx;
    }
  if (a <= 0.0) throw NoInterface("region is empty");
  return {sx / a, sy / a};
}

RunResult run(const ExperimentConfig& cfg, const std::string& dir) {
  const KernelTriple k = build_kernels(cfg);
  effective_tensions(cfg, k);
  const Grid2D grid(cfg.n);
  const long steps = step_count(cfg.T, cfg.dt);
  const StepParams params = resolve_params(make_step_params(cfg, k), grid);

  std::vector<long> snap_steps;
  for (double t : cfg.snapshots) {
    const double r = t / cfg.dt;
    const long s = std::lround(r);
    if (s < 0 || s > steps || std::abs(r - double(s)) > 1e-9 * std::max(1.0, r))
      throw ConfigError("snapshot time " + fmt(t) + " is not a step time in [0, T]");
    snap_steps.push_back(s);
  }

  RunResult res;
  res.dir = dir;
  res.steps = steps;
  res.mu_tol = params.mu_tol;
  const bool out = !dir.empty();
  CsvWriter steps_csv, energy_csv, comp_csv;
  if (out) {
    ensure_dir(dir);
    write_text(join_path(dir, "config.snapshot"), cfg.source.snapshot());
    steps_csv = CsvWriter(join_path(dir, "steps.csv"), "step,mu,area,target,mu_tol,bisect_iters,max_dphi");
    if (cfg.write_energy) energy_csv = CsvWriter(join_path(dir, "energy.csv"), "step,mu,energy");
    comp_csv = CsvWriter(join_path(dir, "components.csv"), "step,components");
  }

  LevelSetState& st = res.state;
  auto dump = [&](long s) {
    if (!out) return;
    const std::string tag = "T" + fmt_time(double(s) * cfg.dt);
    if (cfg.write_contours)
      write_xy(join_path(dir, "contour_" + tag + ".xy"), extract_contour(st.phi_L, 0.0));
    if (cfg.write_fields) write_fld(join_path(dir, "phiL_" + tag + ".fld"), st.phi_L, "phi_L");
  };
  auto log_state = [&](long s, double mu) {
    res.components.push_back(count_components(st.phi_L));
    if (!out) return;
    comp_csv.row({std::to_string(s), std::to_string(res.components.back())});
    if (cfg.write_energy)
      energy_csv.row({std::to_string(s), fmt(mu),
                      fmt(nonlocal_energy(partition_from_state(st), params.stencils))});
  };

  try {
    st = make_droplet_state(cfg.droplet, cfg.substrate, grid, cfg.area);
    log_state(0, 0.0);
    if (std::find(snap_steps.begin(), snap_steps.end(), 0L) != snap_steps.end()) dump(0);
    for (long s = 1; s <= steps; ++s) {
      const StepReport rep = step(st, params);
      res.reports.push_back(rep);
      if (cfg.redistance_every > 0 && s % cfg.redistance_every == 0) {
        st.phi_L = redistance(st.phi_L, cfg.redistance_band);
        st.phi_V = redistance(st.phi_V, cfg.redistance_band);
        for (size_t q = 0; q < grid.size(); ++q) {
          st.phi_L.v[q] = std::min(st.phi_L.v[q], -st.phi_S.v[q]);
          st.phi_V.v[q] = std::min(st.phi_V.v[q], -st.phi_S.v[q]);
        }
      }
      if (out)
        steps_csv.row({std::to_string(s), fmt(rep.mu), fmt(rep.area), fmt(st.target_area),
                       fmt(params.mu_tol), std::to_string(rep.bisection_iterations), fmt(rep.max_dphi)});
      log_state(s, rep.mu);
      if (s != steps && std::find(snap_steps.begin(), snap_steps.end(), s) != snap_steps.end())
        dump(s);
    }
    dump(steps);
  } catch (const std::exception& e) {
    if (out)
      write_text(join_path(dir, "run.log"), std::string("aborted after step ") +
                                                std::to_string(res.reports.size()) + ": " +
                                                e.what() + "\n");
    throw;
  }
  if (out)
    write_text(join_path(dir, "run.log"), "completed " + std::to_string(steps) + " steps\n");
  return res;
}

Polyline fronttrack_reference(const ExperimentConfig& cfg, const KernelTriple& k, double area) {
  require_flat_constant(cfg, "front-tracking reference");
  FrontTrackParams p;
  p.sigma_VL = cfg.tensions.sigma_VL;
  p.m_VL = k.VL.m;
  p.sigma_LS = cfg.tensions.sigma_LS(0.0);
  p.sigma_VS = cfg.tensions.sigma_VS(0.0);
  p.eta = cfg.ft_eta;
  p.area = area;
  const Polyline outline = droplet_outline(cfg.droplet);
  MarkerCurve c = curve_from_polygon(outline.pts, cfg.substrate.profile.h, cfg.ft_M);
  c = ft_run(c, p, cfg.T, cfg.ft_dt > 0 ? cfg.ft_dt : 1.0);
  return curve_polygon(c);
}

ConvergeResult converge(const ExperimentConfig& cfg, const std::string& dir, int jobs) {
  const auto& L = cfg.levels;
  if (L.size() < 3) throw ConfigError("converge needs at least 3 refinement levels");
  for (size_t i = 1; i < L.size(); ++i)
    if (L[i].steps != 2 * L[i - 1].steps || L[i].n != 2 * L[i - 1].n)
      throw ConfigError("refinement levels must double both steps and n");
  for (const Level& l : L) step_count(cfg.T, cfg.T / double(l.steps));
  if (cfg.reference == Reference::None) throw ConfigError("converge needs solver.reference");
  if (cfg.reference == Reference::Winterbottom) require_flat_constant(cfg, "Winterbottom reference");
  if (cfg.reference == Reference::FrontTrack) {
    require_flat_constant(cfg, "front-tracking reference");
    droplet_outline(cfg.droplet);
  }
  const KernelTriple k = build_kernels(cfg);
  effective_tensions(cfg, k);
  if (!dir.empty()) {
    ensure_dir(dir);
    write_text(join_path(dir, "config.snapshot"), cfg.source.snapshot());
  }

  ConvergeResult out;
  out.runs.resize(L.size());
  Polyline ft_ref;
  // The front-tracking reference is one more independent job.
  const size_t extra = cfg.reference == Reference::FrontTrack ? 1 : 0;
  parallel_for(L.size() + extra, jobs, [&](size_t i) {
    if (i == L.size()) {
      ft_ref = fronttrack_reference(cfg, k, 0.0);
      return;
    }
    ExperimentConfig lc = cfg;
    lc.n = L[i].n;
    lc.dt = cfg.T / double(L[i].steps);
    lc.snapshots.clear();
    if (jobs > 1) lc.threads = 1;
    const std::string sub = dir.empty() ? std::string()
                                        : join_path(dir, "level_" + std::to_string(L[i].steps) + "_" +
                                                             std::to_string(L[i].n));
    out.runs[i] = run(lc, sub);
  });
  if (!dir.empty() && extra) write_xy(join_path(dir, "reference.xy"), {ft_ref});

  const size_t rows = cfg.reference == Reference::FinestSelf ? L.size() - 1 : L.size();
  for (size_t i = 0; i < rows; ++i) {
    const ScalarField& phi = out.runs[i].state.phi_L;
    const std::vector<Polyline> contour = extract_contour(phi, 0.0);
    ErrorRow r;
    r.steps = L[i].steps;
    r.inv_dx = L[i].n;
    if (cfg.reference == Reference::FinestSelf) {
      const ScalarField& fine = out.runs.back().state.phi_L;
      r.l1 = l1_error(phi, fine, cfg.n_cmp);
      r.linf = linf_error(contour, extract_contour(fine, 0.0));
    } else {
      Polyline ref = ft_ref;
      if (cfg.reference == Reference::Winterbottom) {
        const WinterbottomShape w =
            winterbottom_shape(cfg.tensions.sigma_VL, cfg.tensions.sigma_LS(0.0),
                               cfg.tensions.sigma_VS(0.0), out.runs[i].state.target_area,
                               cfg.substrate.profile.h);
        ref = shifted(w.boundary, {region_centroid(phi).x, 0.0});
      }
      r.l1 = l1_error(phi, ref.pts, cfg.n_cmp);
      r.linf = linf_error(contour, std::vector<Polyline>{ref});
    }
    out.rows.push_back(r);
  }
  out.rows = convergence_table(out.rows);
  out.slope = loglog_slope(out.rows);
  if (!dir.empty()) write_error_table(join_path(dir, "errors.csv"), out.rows);
  return out;
}

MobilityStudy mobility_insensitivity_study(const ExperimentConfig& cfg, const std::string& dir,
                                           int jobs) {
  if (!cfg.m_VS_alt) throw ConfigError("mobility study needs mobilities.m_VS_alt");
  ExperimentConfig alt = cfg;
  alt.tensions.m_VS = *cfg.m_VS_alt;
  MobilityStudy s;
  s.first = converge(cfg, dir.empty() ? dir : join_path(dir, "m_VS"), jobs);
  s.second = converge(alt, dir.empty() ? dir : join_path(dir, "m_VS_alt"), jobs);
  CsvWriter w;
  if (!dir.empty()) w = CsvWriter(join_path(dir, "mobility_diff.csv"), "steps,inv_dx,l1_m_VS,l1_m_VS_alt,rel_diff");
  for (size_t i = 0; i < s.first.rows.size(); ++i) {
    const double a = s.first.rows[i].l1, b = s.second.rows[i].l1;
    const double m = std::max(a, b);
    s.rel_diff.push_back(m > 0 ? std::abs(a - b) / m : 0.0);
    if (w.open())
      w.row({std::to_string(s.first.rows[i].steps), std::to_string(s.first.rows[i].inv_dx), fmt(a),
             fmt(b), fmt(s.rel_diff.back())});
  }
  return s;
}

EquilibriumResult equilibrium(const ExperimentConfig& cfg, const std::string& dir) {
  require_flat_constant(cfg, "equilibrium comparison");
  EquilibriumResult r;
  r.run = run(cfg, dir);
  const ScalarField& phi = r.run.state.phi_L;
  r.reference = winterbottom_shape(cfg.tensions.sigma_VL, cfg.tensions.sigma_LS(0.0),
                                   cfg.tensions.sigma_VS(0.0), r.run.state.target_area,
                                   cfg.substrate.profile.h);
  r.reference.boundary = shifted(r.reference.boundary, {region_centroid(phi).x, 0.0});
  r.l1 = l1_error(phi, r.reference.boundary.pts, cfg.n_cmp);
  r.linf = linf_error(extract_contour(phi, 0.0), std::vector<Polyline>{r.reference.boundary});
  if (!dir.empty()) {
    write_xy(join_path(dir, "reference.xy"), {r.reference.boundary});
    CsvWriter w(join_path(dir, "equilibrium.csv"), "l1,linf,lambda");
    w.row({fmt(r.l1), fmt(r.linf), fmt(r.reference.lambda)});
  }
  return r;
}

void dump_kernels(const ExperimentConfig& cfg, const std::string& dir) {
  const KernelTriple k = build_kernels(cfg);
  ensure_dir(dir);
  const std::pair<const char*, const CircleKernel*> all[3] = {
      {"VL", &k.VL}, {"LS", &k.LS}, {"VS", &k.VS}};
  for (const auto& [name, ker] : all) {
    std::string header = "theta";
    for (size_t c = 0; c < ker->circles.size(); ++c) header += ",omega_" + std::to_string(c + 1);
    CsvWriter w(join_path(dir, std::string("kernel_") + name + ".csv"), header);
    for (int j = 0; j < ker->q; ++j) {
      std::vector<std::string> row{fmt(2 * kPi * j / ker->q)};
      for (const Circle& c : ker->circles) row.push_back(fmt(c.omega[size_t(j)]));
      w.row(row);
    }
  }
  CsvWriter radii(join_path(dir, "kernel_radii.csv"), "circle,R");
  for (size_t c = 0; c < k.VL.circles.size(); ++c)
    radii.row({std::to_string(c + 1), fmt(k.VL.circles[c].R)});
}

}  // namespace wettix
