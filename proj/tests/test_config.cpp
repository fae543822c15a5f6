#include "doctest.h"

#include <cmath>

#include "wettix/config.hpp"
#include "wettix/errors.hpp"
#include "wettix/harness.hpp"

using namespace wettix;

namespace {

const char* kBase = R"(
[grid]
n = 64
[time]
T = 0.002
dt = 0.0005
[tensions]
sigma_VL = 1
sigma_LS = 1
sigma_VS = 1
[kernel]
mode = single
R = 0.5
q = 32
[shapes]
droplet = disc(center=(0.5, 0.3), r=0.15)
substrate = flat(h=0.3)
)";

}  // namespace

TEST_CASE("arithmetic values") {
  CHECK(parse_value("1 + 2*3").number == doctest::Approx(7));
  CHECK(parse_value("-pi/2").number == doctest::Approx(-1.5707963267948966));
  CHECK(parse_value("2^3^2").number == doctest::Approx(512));
  CHECK(parse_value("sqrt(2) * cos(0)").number == doctest::Approx(std::sqrt(2.0)));
  CHECK(parse_value("1e-3").number == doctest::Approx(0.001));
  CHECK(parse_value("(1 + 1) / 4").number == doctest::Approx(0.5));
}

TEST_CASE("structured values") {
  const Value call = parse_value("sqrt_sin2(a=1, phase=-pi/3)");
  CHECK(call.kind == Value::Kind::Call);
  CHECK(call.name == "sqrt_sin2");
  CHECK(call.num_arg("a", 0, "t") == 1.0);
  CHECK(call.num_arg("phase", 1, "t") == doctest::Approx(-1.0471975511965976));
  CHECK(call.num_arg_or("missing", 7.0, "t") == 7.0);
  CHECK_THROWS_AS(call.check_args({"a"}, "t"), ConfigError);
  const Value list = parse_value("[(2, 50), (4, 100)]");
  REQUIRE(list.kind == Value::Kind::List);
  REQUIRE(list.items.size() == 2);
  CHECK(list.items[1].kind == Value::Kind::Tuple);
  CHECK(list.items[1].items[1].as_integer("t") == 100);
  CHECK(parse_value("auto").is_ident("auto"));
  CHECK_THROWS_AS(parse_value("1 +"), ConfigError);
  CHECK_THROWS_AS(parse_value("(1, 2"), ConfigError);
}

TEST_CASE("non-finite and non-integer values are rejected") {
  CHECK_THROWS_AS(parse_value("1/0").as_number("t"), ConfigError);
  CHECK_THROWS_AS(parse_value("sqrt(-1)").as_number("t"), ConfigError);
  CHECK_THROWS_AS(parse_value("2.5").as_integer("t"), ConfigError);
  CHECK_THROWS_AS(parse_value("foo").as_number("t"), ConfigError);
}

TEST_CASE("sections, keys and overrides") {
  Config c = Config::parse(kBase);
  CHECK(c.has("grid", "n"));
  CHECK(c.get("grid", "n").as_integer("n") == 64);
  c.set_override("grid.n=128");
  CHECK(c.get("grid", "n").as_integer("n") == 128);
  const std::string snap = c.snapshot();
  CHECK(snap.find("# override grid.n=128") != std::string::npos);
  CHECK(snap.find("n = 128") != std::string::npos);
  // The snapshot parses back to the same values.
  const Config back = Config::parse(snap);
  CHECK(back.get("grid", "n").as_integer("n") == 128);
  CHECK(back.raw("shapes", "droplet") == c.raw("shapes", "droplet"));

  CHECK_THROWS_AS(c.set_override("grid.m=3"), ConfigError);
  CHECK_THROWS_AS(c.set_override("nosuch.n=3"), ConfigError);
  CHECK_THROWS_AS(c.set_override("grid.n"), ConfigError);
  CHECK_THROWS_AS(Config::parse(std::string(kBase) + "\n[grid]\ncells = 4\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse("[extra]\nx = 1\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse("n = 4\n"), ConfigError);
  CHECK_THROWS_AS(Config::parse("[grid\nn = 4\n"), ConfigError);
  CHECK_THROWS_AS(Config::load("no/such/file.cfg"), ConfigError);
}

TEST_CASE("experiment loading") {
  Config c = Config::parse(kBase);
  const ExperimentConfig e = load_experiment(c);
  CHECK(e.n == 64);
  CHECK(e.dt == 0.0005);
  CHECK(e.mode == KernelMode::Single);
  CHECK(e.reference == Reference::None);
  CHECK(e.selection == Selection::Interpolated);
  CHECK(e.comparison == Comparison::NonStrict);

  Config bad = c;
  bad.set("time", "dt", "0.0003");
  CHECK_THROWS_AS(load_experiment(bad), ConfigError);  // T/dt not integral
  bad = c;
  bad.set("tensions", "sigma_VL", "1/0");
  CHECK_THROWS_AS(load_experiment(bad), ConfigError);
  bad = c;
  bad.set("solver", "reference", "oracle");
  CHECK_THROWS_AS(load_experiment(bad), ConfigError);
  bad = c;
  bad.set("time", "levels", "[(2, 50), (4, 6)]");
  CHECK_THROWS_AS(load_experiment(bad), ConfigError);
  bad = c;
  bad.set("grid", "n", "4");
  CHECK_THROWS_AS(load_experiment(bad), ConfigError);

  Config inf = c;
  inf.set("solver", "ft_eta", "inf");
  CHECK(std::isinf(load_experiment(inf).ft_eta));
  inf.set("solver", "ft_eta", "-inf");
  CHECK_THROWS_AS(load_experiment(inf), ConfigError);
}

TEST_CASE("kernels and tensions from a config") {
  Config c = Config::parse(kBase);
  c.set("tensions", "sigma_VL", "trig_power(c=1, b=0.05, k=4, phase=0, p=1)");
  ExperimentConfig e = load_experiment(c);
  const KernelTriple k = build_kernels(e);
  const SurfaceTensionTriple t = effective_tensions(e, k);
  // A single circle induces m = 1 / (sigma + sigma'').
  for (double th : {0.0, 0.3, 1.1}) CHECK(t.m_VL(th) * t.sigma_VL.stiffness(th) == doctest::Approx(1.0));

  // Negative tension somewhere is a configuration error.
  Config neg = Config::parse(kBase);
  neg.set("tensions", "sigma_VL", "trig_power(c=1, b=1.5, k=2, phase=0, p=1)");
  CHECK_THROWS_AS(build_kernels(load_experiment(neg)), ConfigError);
}
