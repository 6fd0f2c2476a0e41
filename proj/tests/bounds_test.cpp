#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pbe/bounds.hpp"

using namespace pbe;

namespace {

// lo and hi given as decimal bands scaled by 1000 (avoids double rounding)
bool in_band(const LogBound& b, long lo_milli, long hi_milli) {
  return Rat(lo_milli, 1000) <= b.lo() && b.hi() <= Rat(hi_milli, 1000);
}

BoundContext thales_ctx() {
  BoundContext ctx;
  ctx.n = 2;
  ctx.m = 1;
  ctx.d = 1;
  ctx.deg_f = {2};
  ctx.deg_g = 2;
  ctx.logR = ln_enclosure_ui(2, 96);
  return ctx;
}

const LogBound H13 = ln_enclosure_ui(10, 96).scale(Rat(13));  // 13 ln 10

}  // namespace

TEST_CASE("context validation") {
  BoundContext ctx = thales_ctx();
  CHECK_NOTHROW(ctx.validate());
  CHECK(ctx.D_f() == 2);
  CHECK(ctx.D_all() == 2);
  BoundContext bad = ctx;
  bad.d = 3;  // d > n
  CHECK_THROWS(bad.validate());
  bad = ctx;
  bad.deg_f = {2, 2};  // wrong arity
  CHECK_THROWS(bad.validate());
  bad = ctx;
  bad.deg_g = 0;  // constant g must be handled upstream
  CHECK_THROWS(bad.validate());
  bad = ctx;
  bad.logR = LogBound(Rat(-1));  // R < 1
  CHECK_THROWS(bad.validate());
}

TEST_CASE("genericity_threshold_main") {
  BoundContext ctx = thales_ctx();
  // n=2, m=1, D=2, H_prev = ln 2 -> 2*4*(ln 2 + 4 ln 4) ~ 49.907
  LogBound t = genericity_threshold_main(ctx, ln_enclosure_ui(2, 96));
  CHECK(in_band(t, 49900, 49910));
  // H_prev = 0 -> 8 * 4 ln 4 ~ 44.361
  LogBound t0 = genericity_threshold_main(ctx, LogBound(Rat(0)));
  CHECK(in_band(t0, 44358, 44365));
}

TEST_CASE("genericity_threshold_weak: the operative classical check") {
  BoundContext ctx = thales_ctx();
  // (ln 2 + 4 ln 3)*4 + 4*(ln 4 + 1/2) + ln 2 ~ 28.589
  LogBound t = genericity_threshold_weak(ctx, ln_enclosure_ui(2, 96), 1);
  CHECK(in_band(t, 28580, 28600));
  CHECK(in_band(t, 27000, 30000));  // the H in [27, 30] acceptance band
  // ... and at most 13 ln 10 ~ 29.9336
  CHECK(compare_certain(t, H13) == Cmp::LE);
  // weaker than the main-theorem chain
  CHECK(compare_certain(t, genericity_threshold_main(ctx, ln_enclosure_ui(2, 96))) ==
        Cmp::LE);
  // (d-i+1) factor: last coordinate of a d=2 chain equals the d=1, i=1 value
  BoundContext ctx2 = ctx;
  ctx2.d = 2;
  LogBound last = genericity_threshold_weak(ctx2, ln_enclosure_ui(2, 96), 2);
  CHECK(last.lo() == t.lo());
  CHECK(last.hi() == t.hi());
  // i out of range
  CHECK_THROWS(genericity_threshold_weak(ctx, LogBound(Rat(0)), 0));
  CHECK_THROWS(genericity_threshold_weak(ctx, LogBound(Rat(0)), 2));
}

TEST_CASE("epsilon_main: classical tolerance band") {
  BoundContext ctx = thales_ctx();
  LogBound eps = epsilon_main(ctx, H13);
  // -144*(13 ln 10 + 18 ln 3 + (ln 2)/3) ~ -7191.3
  CHECK(in_band(eps, -7192000, -7191000));
  LogBound dec = log10_of(eps);
  CHECK(in_band(dec, -3124000, -3123000));
  CHECK(in_band(dec, -3500000, -1300000));  // acceptance band; stricter than 1e-1300
  // m = 1: ln m vanishes; R = 1 kills the logR term
  BoundContext r1 = ctx;
  r1.logR = LogBound(Rat(0));
  LogBound eps_r1 = epsilon_main(r1, H13);
  // difference is exactly 144 * (ln 2)/3 = 48 ln 2 (negation flips endpoints,
  // so the .lo difference carries the .hi of the ln 2 enclosure)
  Rat diff = eps_r1.lo() - eps.lo();
  Rat expect = Rat(48) * ln_enclosure_ui(2, 96).hi();
  expect.canonicalize();
  diff.canonicalize();
  CHECK(diff == expect);
}

TEST_CASE("epsilon_lojasiewicz_empty") {
  BoundContext ctx;
  ctx.n = 1;
  ctx.m = 1;
  ctx.d = 0;
  ctx.deg_f = {1};
  ctx.deg_g = 1;
  LogBound b = epsilon_lojasiewicz_empty(ctx, LogBound(Rat(0)));
  // -16 * 8 ln 2 = -128 ln 2 exactly (in enclosure endpoints)
  LogBound expect = ln_enclosure_ui(2, 96).scale(Rat(128)).neg();
  CHECK(b.lo() == expect.lo());
  CHECK(b.hi() == expect.hi());
  // augmented Y_d instance: finite negative value
  BoundContext aug = thales_ctx();
  aug.m = 3;
  aug.deg_f = {2, 2, 1};
  aug.d = 0;
  LogBound y = epsilon_lojasiewicz_empty(aug, H13);
  CHECK(sgn(y.hi()) < 0);
}

TEST_CASE("dichotomy_thresholds") {
  BoundContext ctx = thales_ctx();
  ctx.deg_g = 1;  // circle with g = x1
  auto [eps_f, eps_g] = dichotomy_thresholds(ctx, H13);
  // log eps_g = -2*16*1*(13 ln 10 + 4 ln 3) ~ -1098.5
  CHECK(in_band(eps_g, -1099000, -1098000));
  // eps_f: factor 4*9^3*5^6*1 = 45562500, inner ~ 44.01 -> ~ -2.005e9
  CHECK(eps_f.hi() < Rat(-1000000000L));
  CHECK(eps_f.lo() > Rat(-3000000000L));
  // linearity in H up to the additive constants
  auto [f2, g2] = dichotomy_thresholds(ctx, H13.scale(Rat(2)));
  Rat slope = g2.lo() - eps_g.lo();
  Rat expect = Rat(-32) * H13.hi();
  slope.canonicalize();
  expect.canonicalize();
  CHECK(slope == expect);
}

TEST_CASE("dimension_thresholds") {
  BoundContext ctx = thales_ctx();
  auto [eps_fp, eps_det] = dimension_thresholds(ctx, H13);
  // log eps_det = -2*64*(13 ln 10 + 4 ln 3) ~ -4394.0
  CHECK(in_band(eps_det, -4395000, -4393000));
  // eps_f' < eps_f of the dichotomy on identical inputs (exponent n+5 vs n+4)
  ctx.deg_g = 1;
  auto [eps_f, unused] = dichotomy_thresholds(ctx, H13);
  (void)unused;
  CHECK(eps_fp.hi() < eps_f.lo());
  // trivial instance: H=0, n=1, D_f=1 -> eps_det = -(1*1)*(0 + 4 ln 2)
  BoundContext tiny;
  tiny.n = 1;
  tiny.m = 1;
  tiny.deg_f = {1};
  tiny.deg_g = 1;
  auto [fp2, det2] = dimension_thresholds(tiny, LogBound(Rat(0)));
  (void)fp2;
  LogBound expect = ln_enclosure_ui(2, 96).scale(Rat(4)).neg();
  CHECK(det2.lo() == expect.lo());
}

TEST_CASE("epsilon_reducible and epsilon_pq") {
  BoundContext ctx = thales_ctx();
  // worst = -inf dominates
  CHECK(epsilon_reducible(ctx, H13, LogBound::neg_infinity()).is_neg_inf());
  LogBound r = epsilon_reducible(ctx, H13, LogBound(Rat(0)));
  CHECK(sgn(r.lo()) > 0);  // additive block is positive
  // R = 1 kills the 2 logR term exactly
  BoundContext r1 = ctx;
  r1.logR = LogBound(Rat(0));
  LogBound rr = epsilon_reducible(r1, H13, LogBound(Rat(0)));
  CHECK(r.lo() - rr.lo() == Rat(2) * ln_enclosure_ui(2, 96).lo());
  // eps_PQ: finite, monotone in H
  LogBound pq1 = epsilon_pq(ctx, H13, LogBound(Rat(-1000)));
  LogBound pq2 = epsilon_pq(ctx, H13.scale(Rat(2)), LogBound(Rat(-1000)));
  CHECK(pq1.lo() < pq2.lo());  // bound grows with H
  CHECK(!pq1.is_neg_inf());
}

TEST_CASE("lojasiewicz_nonempty_bound") {
  BoundContext ctx = thales_ctx();
  ctx.logR = LogBound(Rat(0));
  // worst = 0 -> pure additive block 405*(ln 32 + 13 ln 10 + 21)
  LogBound b = lojasiewicz_nonempty_bound(ctx, H13, LogBound(Rat(0)));
  LogBound expect = H13.add(ln_enclosure(Rat(32), 96)).add(LogBound(Rat(21))).scale(Rat(405));
  CHECK(b.lo() == expect.lo());
  CHECK(b.hi() == expect.hi());
  // the general-bound denominator is smaller, so a negative worst_eval pulls
  // the general branch further down
  LogBound w(Rat(-100000));
  LogBound restricted = lojasiewicz_nonempty_bound(ctx, H13, w, true);
  LogBound general = lojasiewicz_nonempty_bound(ctx, H13, w, false);
  CHECK(general.hi() < restricted.lo());
}

TEST_CASE("lojasiewicz_zerodim_bound: exact factorial blocks") {
  BoundContext a;
  a.n = 1;
  a.m = 1;
  a.deg_f = {1};
  a.deg_g = 1;
  // max(1,0)*1*(1+3)^3*(1+2)! = 64*6 = 384, everything else zero
  LogBound b = lojasiewicz_zerodim_bound(a, LogBound(Rat(0)), LogBound(Rat(0)), Int(1));
  CHECK(b.lo() == 384);
  CHECK(b.hi() == 384);
  BoundContext c = thales_ctx();
  c.logR = LogBound(Rat(0));
  // (2+3)^3 * (4+2)! = 125*720 = 90000
  LogBound b2 = lojasiewicz_zerodim_bound(c, LogBound(Rat(0)), LogBound(Rat(0)), Int(2));
  CHECK(b2.lo() == 90000);
  // worst_eval spread over N*degX: N = 4*3*8 = 96, degX=2 -> -192 denominator
  LogBound b3 = lojasiewicz_zerodim_bound(c, LogBound(Rat(0)), LogBound(Rat(-192)), Int(2));
  CHECK(b3.lo() == 90000 - 1);
  CHECK_THROWS(lojasiewicz_zerodim_bound(c, LogBound(Rat(0)), LogBound(Rat(0)), Int(0)));
}

TEST_CASE("nullstellensatz_size_bounds") {
  BoundContext a;
  a.n = 1;
  a.m = 1;
  a.deg_f = {1};
  a.deg_g = 1;
  NssSizeBounds bez = nullstellensatz_size_bounds(a, LogBound(Rat(0)), NssVariant::BEZOUT);
  CHECK(bez.deg_lambda_max == 4);  // 4*1*1^1
  BoundContext t = thales_ctx();
  NssSizeBounds gen = nullstellensatz_size_bounds(t, H13, NssVariant::GENERAL);
  CHECK(gen.N == 324);  // 4*3*3^3 with D = max(2+1, 2) = 3
  CHECK(gen.deg_lambda_max == 324 * 3);
  // h bound scales linearly in H
  NssSizeBounds g0 = nullstellensatz_size_bounds(t, LogBound(Rat(0)), NssVariant::GENERAL);
  NssSizeBounds g1 = nullstellensatz_size_bounds(t, LogBound(Rat(5)), NssVariant::GENERAL);
  NssSizeBounds g2 = nullstellensatz_size_bounds(t, LogBound(Rat(10)), NssVariant::GENERAL);
  CHECK(g2.h_lambda_max.lo() - g1.h_lambda_max.lo() ==
        g1.h_lambda_max.lo() - g0.h_lambda_max.lo());
}

TEST_CASE("bezout degree and variety height") {
  CHECK(bezout_degree_bound(thales_ctx()) == 2);  // circle
  BoundContext q;
  q.n = 3;
  q.m = 2;
  q.deg_f = {2, 2};
  q.deg_g = 1;
  CHECK(bezout_degree_bound(q) == 4);  // two quadrics in A^3
  // circle at H = 0: (0 + (2+1) ln 3) * 2 = 6 ln 3 ~ 6.5917
  LogBound vh = variety_height_bound(thales_ctx(), LogBound(Rat(0)));
  CHECK(in_band(vh, 6591, 6593));
}

TEST_CASE("generic_point_requirements") {
  BoundContext t = thales_ctx();
  auto [H0, D0] = generic_point_requirements(t, LogBound(Rat(0)));
  CHECK(D0 == 4);  // 1 * 2^2
  // H0 = 2*4*3 ln 4 = 24 ln 4 ~ 33.27
  CHECK(in_band(H0, 33270, 33272));
  // H0 below the main-theorem chain value at the same inputs
  LogBound chain = genericity_threshold_main(t, LogBound(Rat(0)));
  CHECK(H0.hi() < chain.lo());
}

TEST_CASE("cauchy_threshold") {
  MPoly g = parse_poly("14*x^2 + 4*x + 4", {"x"});
  CHECK(cauchy_threshold(g) == 16);
  CHECK(Rat(100) > cauchy_threshold(g));  // the evaluation point 100 qualifies
  CHECK(cauchy_threshold(parse_poly("x^2 - x + 1", {"x"})) == 3);
  CHECK(cauchy_threshold(MPoly::zero({"x"})) == 3);
}

TEST_CASE("monotonicity sweeps: magnitudes never decrease in H, n, D, logR") {
  std::vector<Rat> Hs{Rat(0), Rat(1), Rat(5), Rat(20)};
  for (unsigned n = 1; n <= 3; ++n) {
    for (unsigned D = 1; D <= 3; ++D) {
      LogBound prev_eps = LogBound(Rat(0));
      bool first = true;
      for (const Rat& h : Hs) {
        BoundContext ctx;
        ctx.n = n;
        ctx.m = 1;
        ctx.d = n >= 1 ? 1 : 0;
        ctx.deg_f = {D};
        ctx.deg_g = D;
        LogBound eps = epsilon_main(ctx, LogBound(h));
        if (!first) CHECK(eps.hi() <= prev_eps.lo());  // more negative as H grows
        prev_eps = eps;
        first = false;
        // larger n and D at the same H also push eps down
        BoundContext up_n = ctx;
        up_n.n = n + 1;
        CHECK(epsilon_main(up_n, LogBound(h)).hi() <= eps.lo());
        BoundContext up_d = ctx;
        up_d.deg_f = {D + 1};
        up_d.deg_g = D + 1;
        CHECK(epsilon_main(up_d, LogBound(h)).hi() <= eps.lo());
        BoundContext up_r = ctx;
        up_r.logR = LogBound(Rat(3));
        CHECK(epsilon_main(up_r, LogBound(h)).hi() <= eps.lo());
        // same directions for the weak chain (thresholds grow)
        LogBound w = genericity_threshold_weak(ctx, LogBound(h), 1);
        CHECK(genericity_threshold_weak(up_d, LogBound(h), 1).lo() + Rat(1, 1000) >=
              w.hi() - Rat(1, 1000));
        // dichotomy tolerances fall with H
        auto [ef, eg] = dichotomy_thresholds(ctx, LogBound(h));
        auto [ef2, eg2] = dichotomy_thresholds(ctx, LogBound(h + 1));
        CHECK(ef2.hi() <= ef.lo());
        CHECK(eg2.hi() <= eg.lo());
      }
    }
  }
}

TEST_CASE("conservativity: doubled enclosure precision nests inside") {
  BoundContext c96 = thales_ctx();
  BoundContext c192 = c96;
  c192.bits = 192;
  auto nested = [](const LogBound& fine, const LogBound& coarse) {
    CHECK(fine.lo() >= coarse.lo());
    CHECK(fine.hi() <= coarse.hi());
  };
  nested(epsilon_main(c192, LogBound(Rat(30))), epsilon_main(c96, LogBound(Rat(30))));
  nested(genericity_threshold_weak(c192, LogBound(Rat(1)), 1),
         genericity_threshold_weak(c96, LogBound(Rat(1)), 1));
  nested(dichotomy_thresholds(c192, LogBound(Rat(30))).first,
         dichotomy_thresholds(c96, LogBound(Rat(30))).first);
  nested(variety_height_bound(c192, LogBound(Rat(2))),
         variety_height_bound(c96, LogBound(Rat(2))));
}

TEST_CASE("cross-check: main tolerance vs empty-variety bound on Y_d") {
  // augmented system Y_d = V(f, g, x1 - p1): n=2, m=3, D=2
  BoundContext aug = thales_ctx();
  aug.m = 3;
  aug.deg_f = {2, 2, 1};
  aug.d = 0;
  LogBound H_no_g = LogBound(Rat(29));
  LogBound H_full = LogBound(Rat(30));  // pooling g only adds height
  LogBound main = epsilon_main(aug, H_full);
  LogBound empty = epsilon_lojasiewicz_empty(aug, H_no_g);
  CHECK(compare_certain(main, empty) == Cmp::LE);
}

TEST_CASE("report serialization: deterministic and round-trippable") {
  BoundContext ctx = thales_ctx();
  ThresholdReport rep;
  rep.chain.push_back(genericity_threshold_weak(ctx, ln_enclosure_ui(2, 96), 1));
  rep.log_eps = epsilon_main(ctx, H13);
  rep.aux.emplace_back("H_full", H13);
  rep.aux.emplace_back("bezout_deg", LogBound(Rat(bezout_degree_bound(ctx))));
  std::string s1 = rep.to_json().dump();
  std::string s2 = rep.to_json().dump();
  CHECK(s1 == s2);
  // key order is stable and as inserted
  CHECK(s1.find("\"chain\"") < s1.find("\"log_eps\""));
  CHECK(s1.find("\"log_eps\"") < s1.find("\"log10_eps\""));
  CHECK(s1.find("\"H_full\"") < s1.find("\"bezout_deg\""));
  // logbound json round trip
  LogBound b = rep.log_eps;
  LogBound back = logbound_from_json(nlohmann::json::parse(logbound_to_json(b).dump()));
  CHECK(back.lo() == b.lo());
  CHECK(back.hi() == b.hi());
  LogBound ni = logbound_from_json(
      nlohmann::json::parse(logbound_to_json(LogBound::neg_infinity()).dump()));
  CHECK(ni.is_neg_inf());
}
