#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pbe/geometry.hpp"

using namespace pbe;

namespace {

bool in_band(const LogBound& b, long lo_milli, long hi_milli) {
  return Rat(lo_milli, 1000) <= b.lo() && b.hi() <= Rat(hi_milli, 1000);
}

const char* kThales = R"(
# Thales
const A = point(-1, 0)
const B = point(1, 0)
const unit = circle(0, 0, 1)
free C : point
require on_circle(C, unit)
goal dot(C - A, C - B) = 0
assume irreducible
assume dim 1
)";

}  // namespace

TEST_CASE("parse_geo: Thales source") {
  GeoProgram p = parse_geo(kThales);
  REQUIRE(p.objects.size() == 4);
  CHECK(p.objects[0].name == "A");
  CHECK(p.objects[0].is_const);
  CHECK(p.objects[0].const_params == std::vector<Rat>{Rat(-1), Rat(0)});
  CHECK(p.objects[2].kind == GeoObject::Kind::CIRCLE);
  CHECK(p.objects[3].name == "C");
  CHECK(!p.objects[3].is_const);
  CHECK(p.requirements == std::vector<std::string>{"on_circle(C, unit)"});
  CHECK(p.goal == "dot(C - A, C - B)");
  CHECK(p.assume_irreducible);
  CHECK(p.assume_dim == 1u);
}

TEST_CASE("parse_geo: trivia and errors") {
  GeoProgram empty = parse_geo("");
  CHECK(empty.objects.empty());
  CHECK(empty.requirements.empty());
  CHECK(empty.goal.empty());
  // duplicate name
  CHECK_THROWS_AS(parse_geo("free P : point\nfree P : line\n"), std::runtime_error);
  // unknown directive / kind / builtin arity / goal without '= 0'
  CHECK_THROWS_AS(parse_geo("wibble x\n"), std::runtime_error);
  CHECK_THROWS_AS(parse_geo("free P : square\n"), std::runtime_error);
  CHECK_THROWS_AS(parse_geo("free l : line\nrequire parallel(l)\n"), std::runtime_error);
  CHECK_THROWS_AS(parse_geo("free P : point\ngoal P.x\n"), std::runtime_error);
  // type errors are caught at parse time
  CHECK_THROWS_AS(parse_geo("free P : point\nrequire on_line(P, P)\n"),
                  std::runtime_error);
  CHECK_THROWS_AS(parse_geo("free P : point\ngoal P.q = 0\n"), std::runtime_error);
  CHECK_THROWS_AS(parse_geo("free l : line\ngoal dot(l, l) = 0\n"), std::runtime_error);
  // error positions are 1-based line numbers
  try {
    parse_geo("free P : point\nfree P : point\n");
    CHECK(false);
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("compile: Thales golden system") {
  CompiledSystem cs = compile(parse_geo(kThales));
  CHECK(cs.n_f == 2);
  CHECK(cs.n_e == 1);
  CHECK(cs.n_i == 0);
  CHECK(cs.system.n() == cs.n_f + cs.n_i);
  CHECK(cs.system.m() == cs.n_e + cs.n_i);
  CHECK(cs.d_guess == 1);
  CHECK(cs.system.dim == 1);
  CHECK(cs.system.irreducible);
  CHECK(cs.coord_names == std::vector<std::string>{"C.x", "C.y"});
  const std::vector<std::string>& vars = cs.system.vars;
  CHECK(cs.system.f[0] == parse_poly("x1^2 + x2^2 - 1", vars));
  CHECK(cs.system.g == parse_poly("x1^2 + x2^2 - 1", vars));  // (x1-1)(x1+1)+x2^2
  // h(f) = 0 exactly; structural goal hint = ln 2 exactly
  CHECK(height_of_polys(cs.system.f).lo() == 0);
  CHECK(height_of_polys(cs.system.f).hi() == 0);
  REQUIRE(cs.system.goal_height_hint.has_value());
  CHECK(in_band(*cs.system.goal_height_hint, 693, 694));
  // triangular recipe: one quadratic step for C.y
  REQUIRE(cs.system.recipe.steps.size() == 1);
  CHECK(cs.system.recipe.steps[0].kind == RecipeStep::Kind::QUADRATIC);
  CHECK(cs.system.recipe.steps[0].targets == std::vector<std::size_t>{1});
  CHECK(cs.system.recipe.steps[0].quad_rhs == parse_poly("1 - x1^2", vars));
}

TEST_CASE("compile determinism and source round trip") {
  GeoProgram p1 = parse_geo(kThales);
  GeoProgram p2 = parse_geo(p1.to_source());
  CHECK(p1 == p2);
  CHECK(compile(p1).system.to_json().dump() == compile(p2).system.to_json().dump());
}

TEST_CASE("forbid: Rabinowitsch dummy variable and counting") {
  GeoProgram p = parse_geo(
      "const Q = point(0, 0)\n"
      "free P : point\n"
      "forbid distinct(P, Q)\n"
      "goal P.x = 0\n");
  CompiledSystem cs = compile(p);
  CHECK(cs.n_f == 2);
  CHECK(cs.n_e == 0);
  CHECK(cs.n_i == 1);
  CHECK(cs.system.n() == 3);  // n = n_f + n_i
  CHECK(cs.system.m() == 1);  // m = n_e + n_i
  CHECK(cs.d_guess == 2);
  // f = 1 + u (P.x^2 + P.y^2)
  CHECK(cs.system.f[0] ==
        parse_poly("1 + x3*(x1^2 + x2^2)", cs.system.vars));
  REQUIRE(cs.system.recipe.steps.size() == 1);
  CHECK(cs.system.recipe.steps[0].kind == RecipeStep::Kind::RABINOWITSCH_INVERSE);
  // recipe correctness at an exact point: u = -1/f(P) zeroes the equation
  Witness w = solve_fiber(cs.system, {Rat(2), Rat(3)}, cs.system.recipe,
                          Place::infinity(), 96);
  CHECK(*w.exact[2] == Rat(-1, 13));
  CHECK(cs.system.f[0].eval_exact({Rat(2), Rat(3), Rat(-1, 13)}) == 0);
  CHECK(w.residuals[0].real().contains(Rat(0)));
  // raw forbid form
  GeoProgram p2 = parse_geo("free P : point\nforbid P.x - P.y = 0\ngoal P.x = 0\n");
  CompiledSystem cs2 = compile(p2);
  CHECK(cs2.system.f[0] == parse_poly("1 + x3*(x1 - x2)", cs2.system.vars));
}

TEST_CASE("builtin constraint encodings") {
  // parallel / perpendicular
  CompiledSystem cs = compile(parse_geo(
      "free l : line\nfree k : line\nrequire parallel(l, k)\ngoal l.b - k.b = 0\n"));
  // latest coord in l.a - k.a is k.a -> solved linearly; frees l.a, l.b, k.b
  CHECK(cs.system.f[0] == parse_poly("x1 - x4", cs.system.vars));
  CHECK(cs.coord_names == std::vector<std::string>{"l.a", "l.b", "k.b", "k.a"});
  CompiledSystem cp = compile(parse_geo(
      "free l : line\nfree k : line\nrequire perpendicular(l, k)\ngoal l.a = 0\n"));
  CHECK(cp.system.f[0] == parse_poly("x1*x4 + 1", cp.system.vars));
  // tangent(l, c): (c.b - l.a c.a - l.b)^2 - c.r^2 (1 + l.a^2)
  CompiledSystem ct = compile(parse_geo(
      "const c = circle(0, 0, 1)\nfree l : line\nrequire tangent(l, c)\n"
      "goal l.a = 0\n"));
  // tangent to the unit circle: b^2 = 1 + a^2, quadratic recipe for l.b
  CHECK(ct.system.f[0] == parse_poly("x2^2 - 1 - x1^2", ct.system.vars));
  REQUIRE(ct.system.recipe.steps.size() == 1);
  CHECK(ct.system.recipe.steps[0].kind == RecipeStep::Kind::QUADRATIC);
  CHECK(ct.system.recipe.steps[0].quad_rhs == parse_poly("1 + x1^2", ct.system.vars));
  // angle_eq: (a2-a1)(1+a3 a4) - (a4-a3)(1+a1 a2), degree 3
  CompiledSystem ca = compile(parse_geo(
      "free l1 : line\nfree l2 : line\nfree l3 : line\nfree l4 : line\n"
      "require angle_eq(l1, l2, l3, l4)\ngoal l1.a = 0\n"));
  CHECK(ca.system.f[0].total_degree() == 3u);
  // with l3 = l1 and l4 = l2 the relation is trivially 0 = 0 (angle equality
  // is reflexive): substitute and check the polynomial identity
  std::vector<std::string> av = {"a1", "a2", "a3", "a4"};
  MPoly rel = parse_poly("(a2-a1)*(1+a3*a4) - (a4-a3)*(1+a1*a2)", av);
  CHECK(rel.eval_exact({Rat(2), Rat(5), Rat(2), Rat(5)}) == 0);
  // on_line / on_conic
  CompiledSystem co = compile(parse_geo(
      "const l = line(2, 3)\nfree P : point\nrequire on_line(P, l)\n"
      "goal P.y - 2*P.x - 3 = 0\n"));
  CHECK(co.system.f[0] == parse_poly("x2 - 2*x1 - 3", co.system.vars));
  CompiledSystem cc = compile(parse_geo(
      "const P = point(2, 3)\nfree C : conic\nrequire on_conic(P, C)\n"
      "goal C.a = 0\n"));
  CHECK(cc.system.f[0] ==
        parse_poly("4*x1 + 6*x2 + 9*x3 + 2*x4 + 3*x5 + 1", cc.system.vars));
  CHECK(cc.coord_names ==
        std::vector<std::string>{"C.a", "C.b", "C.c", "C.d", "C.e"});
}

TEST_CASE("sequential construction: triangular order and fiber solving") {
  // P on a free line: l.b is solved from the incidence, the rest is free
  CompiledSystem cs = compile(parse_geo(
      "free P : point\nfree l : line\nrequire on_line(P, l)\n"
      "goal P.y - l.a*P.x - l.b = 0\n"));
  CHECK(cs.d_guess == 3);
  CHECK(cs.coord_names == std::vector<std::string>{"P.x", "P.y", "l.a", "l.b"});
  REQUIRE(cs.system.recipe.steps.size() == 1);
  CHECK(cs.system.recipe.steps[0].kind == RecipeStep::Kind::LINEAR);
  Witness w = solve_fiber(cs.system, {Rat(2), Rat(7), Rat(3)}, cs.system.recipe,
                          Place::infinity(), 96);
  CHECK(*w.exact[3] == Rat(1));  // b = y - a x = 7 - 6
  CHECK(w.residuals[0].real().contains(Rat(0)));
  CHECK(w.all_exact());
}

TEST_CASE("non-triangular construction compiles without recipe") {
  CompiledSystem cs = compile(parse_geo(
      "free P : point\nrequire P.x^3 + P.y^3 - 1 = 0\ngoal P.x = 0\n"));
  CHECK(cs.system.recipe.empty());
  CHECK(cs.d_guess == 1);
  CHECK(cs.system.n() == 2);
  CHECK(cs.system.m() == 1);
}

TEST_CASE("compiled Thales feeds the witness autopilot (k = 13)") {
  CompiledSystem cs = compile(parse_geo(kThales));
  BoundContext ctx;
  ctx.n = cs.system.n();
  ctx.m = cs.system.m();
  ctx.d = cs.system.dim;
  for (const MPoly& fi : cs.system.f) ctx.deg_f.push_back(*fi.total_degree());
  ctx.deg_g = *cs.system.g.total_degree();
  ctx.logR = ln_enclosure_ui(2, 96);
  WitnessPlan plan = autopilot(cs.system, ctx, FreeStyle::DECIMAL_PATTERN,
                               ChainKind::WEAK, Place::infinity(), 256);
  CHECK(in_band(plan.thresholds[0], 27000, 30000));
  CHECK(plan.witness.free[0].k == 13);
  CHECK(in_band(plan.H_with_g, 30626, 30628));
}
