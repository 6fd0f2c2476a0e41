#include "pbe/bounds.hpp"

#include <algorithm>

namespace pbe {

namespace {

Int ipow(unsigned long base, unsigned long e) {
  Int r;
  mpz_ui_pow_ui(r.get_mpz_t(), base, e);
  return r;
}

LogBound ln_ui(const BoundContext& ctx, unsigned long k) {
  return ln_enclosure_ui(k, ctx.bits);
}

LogBound ln_int(const BoundContext& ctx, const Int& k) {
  return ln_enclosure(Rat(k), ctx.bits);
}

}  // namespace

// ---------------------------------------------------------------------------
// BoundContext
// ---------------------------------------------------------------------------

void BoundContext::validate() const {
  if (n < 1) throw std::invalid_argument("BoundContext: n >= 1 required");
  if (m < 1) throw std::invalid_argument("BoundContext: m >= 1 required");
  if (d > n) throw std::invalid_argument("BoundContext: 0 <= d <= n required");
  if (deg_f.size() != m) throw std::invalid_argument("BoundContext: need m degrees");
  for (unsigned di : deg_f)
    if (di < 1) throw std::invalid_argument("BoundContext: deg f_i >= 1 required");
  if (deg_g < 1)
    throw std::invalid_argument("BoundContext: deg g >= 1 required (constant g handled upstream)");
  if (!(K_degree >= 1) || !(Nv >= 1))
    throw std::invalid_argument("BoundContext: [K:Q] >= 1 and N_v >= 1 required");
  if (logR.is_neg_inf() || sgn(logR.lo()) < 0)
    throw std::invalid_argument("BoundContext: R >= 1 required");
}

unsigned BoundContext::D_f() const {
  return *std::max_element(deg_f.begin(), deg_f.end());
}

unsigned BoundContext::D_all() const { return std::max(D_f(), deg_g); }

// ---------------------------------------------------------------------------
// Genericity chain and main tolerance
// ---------------------------------------------------------------------------

LogBound genericity_threshold_main(const BoundContext& ctx, const LogBound& H_prev) {
  ctx.validate();
  const unsigned D = ctx.D_all();
  Rat factor = Rat(ctx.n) * Rat(ipow(D, ctx.m + 1));
  return H_prev.add(ln_ui(ctx, ctx.n + 2).scale(Rat(4))).scale(factor);
}

LogBound genericity_threshold_weak(const BoundContext& ctx, const LogBound& H_prev,
                                   unsigned i) {
  ctx.validate();
  if (i < 1 || i > ctx.d)
    throw std::invalid_argument("genericity_threshold_weak: i must be in 1..d");
  const unsigned n_i = std::min(ctx.n, ctx.m + i);
  // degree sequence (deg f_1..f_m, deg g, 1, 1, ...), non-increasing
  std::vector<unsigned> seq = ctx.deg_f;
  seq.push_back(ctx.deg_g);
  while (seq.size() < n_i) seq.push_back(1);
  std::sort(seq.begin(), seq.end(), std::greater<unsigned>());
  Rat sum_inv(0);
  Int prod(1);
  for (unsigned j = 0; j < n_i; ++j) {
    sum_inv += Rat(1, seq[j]);
    prod *= seq[j];
  }
  sum_inv.canonicalize();
  LogBound term1 = H_prev.scale(sum_inv)
                       .add(ln_ui(ctx, ctx.n + 1).scale(Rat(ctx.n + n_i)))
                       .scale(Rat(prod));
  Rat half_harmonic(0);
  for (unsigned j = 1; j <= ctx.m; ++j) half_harmonic += Rat(1, 2 * j);
  half_harmonic.canonicalize();
  const unsigned D = ctx.D_all();
  Rat factor2 = Rat(ipow(D, n_i)) * Rat(ctx.d - i + 1);
  LogBound term2 = ln_ui(ctx, ctx.n + 2).add(LogBound(half_harmonic)).scale(factor2);
  return term1.add(term2).add(ln_ui(ctx, 2));
}

namespace {
// shared shape of epsilon_main / epsilon_lojasiewicz_empty
LogBound epsilon_main_shape(const BoundContext& ctx, const LogBound& H) {
  ctx.validate();
  const unsigned D = ctx.D_all();
  LogBound inner = H.scale(ctx.K_degree)
                       .add(ln_ui(ctx, ctx.m))
                       .add(ln_ui(ctx, ctx.n + 1).scale(Rat(ctx.n + 7) * Rat(D)))
                       .add(ctx.logR.scale(Rat(1, ctx.n + 1)));
  Rat factor = Rat(4) * ctx.K_degree / ctx.Nv * Rat(ctx.n + 1) * Rat(ctx.n + 1) *
               Rat(ipow(D, ctx.n));
  factor.canonicalize();
  return inner.scale(factor).neg();
}
}  // namespace

LogBound epsilon_main(const BoundContext& ctx, const LogBound& H_full) {
  return epsilon_main_shape(ctx, H_full);
}

LogBound epsilon_lojasiewicz_empty(const BoundContext& ctx, const LogBound& H) {
  return epsilon_main_shape(ctx, H);
}

// ---------------------------------------------------------------------------
// Dichotomy / dimension thresholds
// ---------------------------------------------------------------------------

namespace {
// H + 2 ln n + ln m + logR + 12
LogBound dichotomy_inner(const BoundContext& ctx, const LogBound& H) {
  return H.add(ln_ui(ctx, ctx.n).scale(Rat(2)))
      .add(ln_ui(ctx, ctx.m))
      .add(ctx.logR)
      .add(LogBound(Rat(12)));
}
}  // namespace

std::pair<LogBound, LogBound> dichotomy_thresholds(const BoundContext& ctx,
                                                   const LogBound& H) {
  ctx.validate();
  const unsigned Df = ctx.D_f();
  const unsigned Dg = ctx.deg_g;
  Int pw;
  Int base = ipow(Df, ctx.n) + 1;
  mpz_pow_ui(pw.get_mpz_t(), base.get_mpz_t(), ctx.n + 4);
  Rat f_factor = Rat(4) * ctx.K_degree * ctx.K_degree / ctx.Nv *
                 Rat(ipow(ctx.n + 7, 3)) * Rat(pw) * Rat(Dg);
  f_factor.canonicalize();
  LogBound eps_f = dichotomy_inner(ctx, H).scale(f_factor).neg();
  Rat g_factor = ctx.K_degree / ctx.Nv * Rat(ctx.n) * Rat(ipow(Df, 2 * ctx.n)) * Rat(Dg);
  g_factor.canonicalize();
  LogBound eps_g = H.add(ln_ui(ctx, ctx.n + 1).scale(Rat(4))).scale(g_factor).neg();
  return {eps_f, eps_g};
}

std::pair<LogBound, LogBound> dimension_thresholds(const BoundContext& ctx,
                                                   const LogBound& H) {
  ctx.validate();
  const unsigned Df = ctx.D_f();
  Int pw;
  Int base = ipow(Df, ctx.n) + 1;
  mpz_pow_ui(pw.get_mpz_t(), base.get_mpz_t(), ctx.n + 5);
  Rat f_factor = Rat(4) * ctx.K_degree * ctx.K_degree / ctx.Nv *
                 Rat(ipow(ctx.n + 7, 3)) * Rat(pw);
  f_factor.canonicalize();
  LogBound eps_f = dichotomy_inner(ctx, H).scale(f_factor).neg();
  Rat det_factor = ctx.K_degree / ctx.Nv * Rat(ctx.n) * Rat(ipow(Df, 3 * ctx.n));
  det_factor.canonicalize();
  LogBound eps_det = H.add(ln_ui(ctx, ctx.n + 1).scale(Rat(4))).scale(det_factor).neg();
  return {eps_f, eps_det};
}

// ---------------------------------------------------------------------------
// Reducible / Lojasiewicz family
// ---------------------------------------------------------------------------

namespace {
// worst/denom + ([K:Q]^2/N_v)(n+7)^2 (D^n+1)(H + ln(count n D^(2n)) + 21) + 2 logR,
// the common display of the non-empty-Lojasiewicz family; count and D vary.
LogBound lojasiewicz_shape(const BoundContext& ctx, const LogBound& H,
                           const LogBound& worst, unsigned D, const Int& count,
                           const Int& denom) {
  LogBound t1 = worst.scale(Rat(Int(1), denom));
  Int arg = count * ipow(D, 2 * ctx.n);
  Rat factor = ctx.K_degree * ctx.K_degree / ctx.Nv * Rat(ipow(ctx.n + 7, 2)) *
               Rat(ipow(D, ctx.n) + 1);
  factor.canonicalize();
  LogBound t2 = H.add(ln_int(ctx, arg)).add(LogBound(Rat(21))).scale(factor);
  return t1.add(t2).add(ctx.logR.scale(Rat(2)));
}

Int restricted_denominator(const BoundContext& ctx, unsigned D) {
  Int base = ipow(D, ctx.n) + 1;
  Int pw;
  mpz_pow_ui(pw.get_mpz_t(), base.get_mpz_t(), ctx.n + 2);
  return Int(4) * Int(ctx.n + 1) * pw;
}
}  // namespace

LogBound epsilon_reducible(const BoundContext& ctx, const LogBound& H_full,
                           const LogBound& worst_eval) {
  ctx.validate();
  const unsigned D = ctx.D_all();
  return lojasiewicz_shape(ctx, H_full, worst_eval, D, Int(ctx.m + 1) * Int(ctx.n),
                           restricted_denominator(ctx, D));
}

LogBound epsilon_pq(const BoundContext& ctx, const LogBound& H,
                    const LogBound& log_eps_f) {
  ctx.validate();
  const unsigned Df = ctx.D_f();
  return lojasiewicz_shape(ctx, H, log_eps_f, Df, Int(ctx.m + ctx.d) * Int(ctx.n),
                           restricted_denominator(ctx, Df));
}

LogBound lojasiewicz_nonempty_bound(const BoundContext& ctx, const LogBound& H,
                                    const LogBound& worst_eval, bool all_leq_one) {
  ctx.validate();
  const unsigned D = ctx.D_all();
  Int denom = all_leq_one ? restricted_denominator(ctx, D)
                          : Int(4) * Int(ctx.n + 1) * ipow(D, ctx.n + 1);
  return lojasiewicz_shape(ctx, H, worst_eval, D, Int(ctx.m) * Int(ctx.n), denom);
}

LogBound lojasiewicz_zerodim_bound(const BoundContext& ctx, const LogBound& H,
                                   const LogBound& worst_eval, const Int& degX) {
  ctx.validate();
  if (degX < 1) throw std::invalid_argument("lojasiewicz_zerodim_bound: degX >= 1");
  const unsigned D = ctx.D_all();
  Int dn = ipow(D, ctx.n) + 2;
  if (dn > 1000000)
    throw std::domain_error("lojasiewicz_zerodim_bound: (D^n+2)! is astronomically large");
  Int fact;
  mpz_fac_ui(fact.get_mpz_t(), dn.get_ui());
  Rat factor = ctx.K_degree * ctx.K_degree * Rat(ipow(ctx.n + 3, 3)) * Rat(fact);
  factor.canonicalize();
  LogBound t1 = LogBound::max(LogBound(Rat(1)), H).scale(factor);
  Int N = Int(4) * Int(ctx.n + 1) * ipow(D, ctx.n + 1);
  LogBound t4 = worst_eval.scale(Rat(Int(1), N * degX));
  return t1.add(ctx.logR.scale(Rat(2))).add(ln_ui(ctx, ctx.m)).add(t4);
}

// ---------------------------------------------------------------------------
// Nullstellensatz / geometry bounds
// ---------------------------------------------------------------------------

NssSizeBounds nullstellensatz_size_bounds(const BoundContext& ctx, const LogBound& H,
                                          NssVariant variant) {
  ctx.validate();
  NssSizeBounds out;
  if (variant == NssVariant::BEZOUT) {
    const unsigned D = ctx.D_f();
    out.N = 0;
    out.deg_lambda_max = Int(4) * Int(ctx.n) * ipow(D, ctx.n);
    Rat factor = Rat(4) * Rat(ctx.n) * Rat(ctx.n + 1) * Rat(ipow(D, ctx.n));
    out.h_lambda_max =
        H.add(ln_ui(ctx, ctx.m))
            .add(ln_ui(ctx, ctx.n + 1).scale(Rat(ctx.n + 7) * Rat(D)))
            .scale(factor);
  } else {
    const unsigned D = std::max(ctx.deg_g + 1, ctx.D_f());
    out.N = Int(4) * Int(ctx.n + 1) * ipow(D, ctx.n + 1);
    out.deg_lambda_max = out.N * Int(ctx.deg_g + 1);
    Rat factor = Rat(out.N) * Rat(ctx.n + 3);
    out.h_lambda_max =
        H.add(ln_ui(ctx, ctx.m + 1))
            .add(ln_ui(ctx, ctx.n + 2).scale(Rat(ctx.n + 8) * Rat(D)))
            .scale(factor);
  }
  return out;
}

Int bezout_degree_bound(const BoundContext& ctx) {
  ctx.validate();
  return ipow(ctx.D_f(), std::min(ctx.n, ctx.m));
}

LogBound variety_height_bound(const BoundContext& ctx, const LogBound& H) {
  ctx.validate();
  const unsigned n0 = std::min(ctx.n, ctx.m);
  std::vector<unsigned> seq = ctx.deg_f;
  std::sort(seq.begin(), seq.end(), std::greater<unsigned>());
  Rat sum_inv(0);
  Int prod(1);
  for (unsigned j = 0; j < n0; ++j) {
    sum_inv += Rat(1, seq[j]);
    prod *= seq[j];
  }
  sum_inv.canonicalize();
  return H.scale(sum_inv)
      .add(ln_ui(ctx, ctx.n + 1).scale(Rat(ctx.n + n0)))
      .scale(Rat(prod));
}

std::pair<LogBound, Int> generic_point_requirements(const BoundContext& ctx,
                                                    const LogBound& H_fg) {
  ctx.validate();
  const unsigned D = ctx.D_all();
  Int D0 = Int(ctx.d) * ipow(D, ctx.m + 1);
  Rat factor = Rat(ctx.n) * Rat(ipow(D, ctx.m + 1));
  LogBound H0 = H_fg.add(ln_ui(ctx, ctx.n + 2).scale(Rat(3))).scale(factor);
  return {H0, D0};
}

Rat cauchy_threshold(const MPoly& g) {
  Rat maxc(0);
  for (const Rat& c : g.coefficients()) {
    Rat a = c;
    if (sgn(a) < 0) a = -a;
    if (a > maxc) maxc = a;
  }
  if (maxc < 1) maxc = 1;  // e^h with h(0) = 0
  // round up to an integer, then the conservative +2
  Int c;
  mpz_cdiv_q(c.get_mpz_t(), maxc.get_num().get_mpz_t(), maxc.get_den().get_mpz_t());
  return Rat(c + 2);
}

// ---------------------------------------------------------------------------
// Reporting
// ---------------------------------------------------------------------------

LogBound log10_of(const LogBound& nats, unsigned bits) {
  return nats.div_by_pos(ln_enclosure_ui(10, bits));
}

nlohmann::ordered_json logbound_to_json(const LogBound& b) {
  nlohmann::ordered_json j;
  if (b.is_neg_inf()) {
    j["neg_inf"] = true;
    return j;
  }
  j["lo"] = rat_to_string(b.lo());
  j["hi"] = rat_to_string(b.hi());
  return j;
}

LogBound logbound_from_json(const nlohmann::json& j) {
  if (j.contains("neg_inf") && j["neg_inf"].get<bool>()) return LogBound::neg_infinity();
  return LogBound(rat_from_string(j.at("lo").get<std::string>()),
                  rat_from_string(j.at("hi").get<std::string>()));
}

nlohmann::ordered_json ThresholdReport::to_json() const {
  nlohmann::ordered_json j;
  j["chain"] = nlohmann::ordered_json::array();
  for (const auto& c : chain) j["chain"].push_back(logbound_to_json(c));
  j["log_eps"] = logbound_to_json(log_eps);
  j["log10_eps"] = logbound_to_json(log10_of(log_eps));
  nlohmann::ordered_json a = nlohmann::ordered_json::object();
  for (const auto& [k, v] : aux) a[k] = logbound_to_json(v);
  j["aux"] = a;
  return j;
}

}  // namespace pbe
