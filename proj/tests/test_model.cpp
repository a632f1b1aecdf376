#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "visclim/model.hpp"

using namespace visclim;

namespace {

GridSpec test_grid(int cells = 256, Real half_width = 2.0) {
  GridSpec g;
  g.half_width = half_width;
  g.cells_per_axis = cells;
  return g;
}

}  // namespace

TEST_CASE("greenshields passes every hypothesis") {
  const ModelSpec m = builtin_model("greenshields_lwr", {}, test_grid());
  const HypothesisReport rep = validate_hypotheses(m);
  CHECK(rep.all_required_pass());
  CHECK(rep.genuinely_nonlinear());
  for (const auto& r : rep.records) CHECK(r.pass);
}

TEST_CASE("greenshields diffusivity degenerates at vacuum only") {
  const ModelSpec m = builtin_model("greenshields_lwr", {}, test_grid());
  CHECK(m.diffusion.a(0.0) == doctest::Approx(0.0));
  CHECK(m.diffusion.a(1.0) == doctest::Approx(1.0));
}

TEST_CASE("central difference of A recovers a to rounding for quadratic A") {
  const ModelSpec m = builtin_model("greenshields_lwr", {}, test_grid());
  for (Real h : {1e-2, 1e-3, 1e-4}) {
    for (Real u : {0.2, 0.5, 0.8}) {
      const Real fd = (m.diffusion.A(u + h) - m.diffusion.A(u - h)) / (2.0 * h);
      CHECK(std::abs(fd - m.diffusion.a(u)) < 1e-10);
    }
  }
}

TEST_CASE("linear flux fails genuine nonlinearity with the full interval as witness") {
  ModelSpec m = builtin_model("greenshields_lwr", {}, test_grid());
  m.flux = make_flux(1, 1.0, {[](Real u) { return u; }}, {[](Real) { return 1.0; }});
  const HypothesisReport rep = validate_hypotheses(m);
  CHECK(rep.all_required_pass());
  const auto* h5 = rep.find("genuine_nonlinearity");
  REQUIRE(h5 != nullptr);
  CHECK_FALSE(h5->pass);
  CHECK(h5->detail.find("[0, 1]") != std::string::npos);
}

TEST_CASE("flux with f(0) != 0 is rejected at construction") {
  CHECK_THROWS_AS(make_flux(1, 1.0, {[](Real u) { return u + 0.1; }}), InvalidModel);
  CHECK_NOTHROW(make_flux(1, 1.0, {[](Real u) { return u * (1 - u) + 1e-13; }}));
}

TEST_CASE("non-finite callable is reported as an invalid model") {
  ModelSpec m = builtin_model("heat", {}, test_grid());
  m.diffusion.a = [](Real u) { return u < 0.5 ? 1.0 : kInf; };
  CHECK_THROWS_AS(validate_hypotheses(m), InvalidModel);
}

TEST_CASE("parabolic ramp source validates against its declared kappa") {
  // g = chi_[0,1](x) * 4 u(1-u): vanishes at u = 0 and 1, |g_u| <= 4,
  // int|g| <= 1, ramp variation <= 2; kappa = 4 covers all three.
  GridSpec grid = test_grid();
  ModelSpec m = builtin_model("greenshields_lwr", {}, grid);
  SourceSpec s;
  s.structure = SourceStructure::indicator_ramp;
  s.kappa = 4.0;
  RampSource ramp;
  ramp.lo = 0.0;
  ramp.hi = 1.0;
  ramp.h = [](Real, Real u) { return 4.0 * u * (1.0 - u); };
  ramp.sup_h = 1.0;
  s.ramp = ramp;
  s.chi_profile = [](Real x) { return (x >= 0.0 && x <= 1.0) ? 1.0 : 0.0; };
  s.eval = [](Real, const Point& x, Real u) {
    return (x.x() >= 0.0 && x.x() <= 1.0) ? 4.0 * u * (1.0 - u) : 0.0;
  };
  m.source = s;
  const HypothesisReport rep = validate_hypotheses(m);
  const auto* src = rep.find("source_bounds");
  REQUIRE(src != nullptr);
  CHECK(src->pass);
}

TEST_CASE("entry source is positive at vacuum and vanishes at capacity") {
  Params p;
  p["ramp_lo"] = 0.0;
  p["ramp_hi"] = 0.5;
  const ModelSpec m = builtin_model("lwr_entry", p, test_grid());
  const Point inside(0.25, 0.0), outside(1.0, 0.0);
  CHECK(m.source(0.0, inside, 0.0) > 0.0);
  CHECK(m.source(0.0, inside, 1.0) == doctest::Approx(0.0));
  CHECK(m.source(0.0, outside, 0.0) == doctest::Approx(0.0));
  CHECK(m.hypothesis_report.all_required_pass());
}

TEST_CASE("exit source drains and passes the sign conditions") {
  const ModelSpec m = builtin_model("lwr_exit", {}, test_grid());
  const Point inside(0.25, 0.0);
  CHECK(m.source(0.0, inside, 1.0) < 0.0);
  CHECK(m.source(0.0, inside, 0.0) == doctest::Approx(0.0));
  CHECK(m.hypothesis_report.all_required_pass());
}

TEST_CASE("heat scenario is pure diffusion") {
  const ModelSpec m = builtin_model("heat", {}, test_grid());
  CHECK(m.flux.is_zero());
  CHECK(m.diffusion.a(0.3) == doctest::Approx(1.0));
  CHECK(m.source.kappa == 0.0);
  // affine flux direction: the nonlinearity hypothesis must fail
  CHECK_FALSE(m.hypothesis_report.genuinely_nonlinear());
  CHECK(m.hypothesis_report.all_required_pass());
}

TEST_CASE("every builtin scenario matches its documented hypothesis table") {
  struct Row {
    const char* name;
    bool h5;
  };
  const Row rows[] = {{"greenshields_lwr", true}, {"burgers", true},    {"heat", false},
                      {"porous_medium", false},   {"lwr_entry", true},  {"lwr_exit", true},
                      {"custom_table", false}};
  for (const Row& row : rows) {
    CAPTURE(row.name);
    const ModelSpec m = builtin_model(row.name, {}, test_grid());
    CHECK(m.hypothesis_report.all_required_pass());
    CHECK(m.hypothesis_report.genuinely_nonlinear() == row.h5);
  }
}

TEST_CASE("unknown scenario and out-of-range parameters are rejected") {
  CHECK_THROWS_AS(builtin_model("weird", {}, test_grid()), InvalidModel);
  Params bad;
  bad["u0_height"] = 1.5;
  CHECK_THROWS_AS(builtin_model("greenshields_lwr", bad, test_grid()), InvalidModel);
  Params unknown;
  unknown["wheels"] = 4;
  CHECK_THROWS_AS(builtin_model("greenshields_lwr", unknown, test_grid()), InvalidModel);
}

TEST_CASE("tabulated flux interpolates its breakpoints and reports the chord slope") {
  const FluxSpec f = tabulated_flux({0.0, 0.5, 1.0}, {0.0, 0.25, 0.0});
  CHECK(f.eval(0, 0.25) == doctest::Approx(0.125));
  CHECK(f.eval(0, 0.5) == doctest::Approx(0.25));
  CHECK(f.lipschitz == doctest::Approx(0.5));
  CHECK_THROWS_AS(tabulated_flux({0.0, 0.4}, {0.1, 0.0}), InvalidModel);
  CHECK_THROWS_AS(tabulated_flux({0.0, 0.4, 0.3, 1.0}, {0.0, 0.1, 0.1, 0.0}), InvalidModel);
}

TEST_CASE("datum norms are cached consistently with the grid") {
  Params p;
  p["u0_kind"] = 0;  // box
  p["u0_height"] = 0.8;
  p["u0_halfwidth"] = 0.5;
  const ModelSpec m = builtin_model("greenshields_lwr", p, test_grid(512));
  const GridFunction u0 = m.initial.realize(m.initial.norm_grid);
  CHECK(m.initial.l1_norm == doctest::Approx(u0.l1()));
  CHECK(m.initial.l2_norm == doctest::Approx(u0.l2()));
  CHECK(m.initial.tv[0] == doctest::Approx(2.0 * 0.8));  // two jumps of 0.8
  CHECK(m.initial.l1_norm == doctest::Approx(0.8).epsilon(0.02));
}

TEST_CASE("2D builtin uses a scaled second flux component") {
  GridSpec g = test_grid(32);
  g.dimension = 2;
  const ModelSpec m = builtin_model("greenshields_lwr", {}, g);
  CHECK(m.flux.dimension == 2);
  CHECK(m.flux.eval(1, 0.5) == doctest::Approx(0.5 * m.flux.eval(0, 0.5)));
  CHECK(m.hypothesis_report.all_required_pass());
}
