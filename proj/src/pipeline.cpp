#include "pbe/pipeline.hpp"

#include <algorithm>

#include "pbe/geometry.hpp"

namespace pbe {

// ---------------------------------------------------------------------------
// Names
// ---------------------------------------------------------------------------

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::PROVED: return "PROVED";
    case Verdict::COMPONENT_PROVED: return "COMPONENT_PROVED";
    case Verdict::INCONCLUSIVE: return "INCONCLUSIVE";
    case Verdict::CASE1: return "CASE1";
    case Verdict::CASE2: return "CASE2";
    case Verdict::DIM_CONFIRMED: return "DIM_CONFIRMED";
    case Verdict::DISPROVED: return "DISPROVED";
  }
  return "?";
}

Verdict verdict_from_name(const std::string& s) {
  for (Verdict v : {Verdict::PROVED, Verdict::COMPONENT_PROVED, Verdict::INCONCLUSIVE,
                    Verdict::CASE1, Verdict::CASE2, Verdict::DIM_CONFIRMED,
                    Verdict::DISPROVED})
    if (verdict_name(v) == s) return v;
  throw std::invalid_argument("unknown verdict: " + s);
}

namespace {

const char* chain_name(ChainKind c) {
  switch (c) {
    case ChainKind::WEAK: return "weak";
    case ChainKind::MAIN: return "main";
    case ChainKind::NO_G: return "no_g";
  }
  return "?";
}

ChainKind chain_from_name(const std::string& s) {
  if (s == "weak") return ChainKind::WEAK;
  if (s == "main") return ChainKind::MAIN;
  if (s == "no_g") return ChainKind::NO_G;
  throw std::invalid_argument("unknown chain: " + s);
}

const char* style_name(FreeStyle s) {
  switch (s) {
    case FreeStyle::DECIMAL_PATTERN: return "decimal";
    case FreeStyle::PADIC_PATTERN: return "padic";
    case FreeStyle::USER: return "user";
  }
  return "?";
}

FreeStyle style_from_name(const std::string& s) {
  if (s == "decimal") return FreeStyle::DECIMAL_PATTERN;
  if (s == "padic") return FreeStyle::PADIC_PATTERN;
  if (s == "user") return FreeStyle::USER;
  throw std::invalid_argument("unknown style: " + s);
}

const LogBound& LN2() {
  static const LogBound v = ln_enclosure_ui(2, 96);
  return v;
}

// pattern styles must match the place; USER is place-agnostic
FreeStyle effective_style(FreeStyle s, const Place& place) {
  if (s == FreeStyle::USER) return s;
  return place.is_archimedean() ? FreeStyle::DECIMAL_PATTERN
                                : FreeStyle::PADIC_PATTERN;
}

long initial_precision(const Place& place) { return place.is_archimedean() ? 128 : 10; }

long precision_for(const LogBound& eps, const Place& place) {
  return place.is_archimedean() ? real_precision_for(eps)
                                : padic_digits_for(eps, place.p);
}

// ln |q|_v of an exact rational as a refinable enclosure; NEG_INFINITY for
// q = 0.  ln |q|_p = -v_p(q) ln p with the exact valuation.
LogBound exact_log_norm(const Rat& q, const Place& place) {
  if (sgn(q) == 0) return LogBound::neg_infinity();
  if (place.is_archimedean()) return ln_enclosure(Rat(abs(q)), 96);
  Int num(abs(q.get_num())), den(q.get_den()), p(static_cast<long>(place.p));
  long v = 0;
  while (num % p == 0) { num /= p; ++v; }
  while (den % p == 0) { den /= p; --v; }
  LogBound lnp = ln_enclosure_ui(place.p, 96);
  return v >= 0 ? lnp.scale(Rat(v)).neg() : lnp.scale(Rat(-v));
}

// exact coordinate vector when the witness is fully exact
std::optional<std::vector<Rat>> exact_point(const Witness& w) {
  std::vector<Rat> pt;
  for (const auto& e : w.exact) {
    if (!e) return std::nullopt;
    pt.push_back(*e);
  }
  return pt;
}

void fill_report(Certificate& cert, const WitnessPlan& plan) {
  cert.thresholds.chain = plan.thresholds;
  cert.thresholds.aux.emplace_back("H_no_g", plan.H_no_g);
  cert.thresholds.aux.emplace_back("H_with_g", plan.H_with_g);
  for (size_t i = 0; i < plan.heights.size(); ++i)
    cert.thresholds.aux.emplace_back("h_p" + std::to_string(i + 1), plan.heights[i]);
}

std::vector<Rat> free_values_of(const Witness& w) {
  std::vector<Rat> v;
  for (const FreeCoordinate& fc : w.free) v.push_back(fc.value);
  return v;
}

// shared entry: system checks + autopilot with failures mapped to
// INCONCLUSIVE; returns nullopt after filling cert.reason
std::optional<WitnessPlan> run_autopilot(Certificate& cert, const PolySystem& sys,
                                         const BoundContext& ctx,
                                         const PipelineOptions& opt, ChainKind chain) {
  try {
    WitnessPlan plan = autopilot(sys, ctx, effective_style(opt.style, opt.place),
                                 chain, opt.place, initial_precision(opt.place),
                                 opt.user_values);
    fill_report(cert, plan);
    cert.witness = plan.witness;
    return plan;
  } catch (const std::exception& e) {
    cert.verdict = Verdict::INCONCLUSIVE;
    cert.reason = std::string("witness construction failed: ") + e.what();
    return std::nullopt;
  }
}

Certificate base_cert(const std::string& procedure, const PolySystem& sys,
                      const PipelineOptions& opt, ChainKind chain) {
  Certificate cert;
  cert.procedure = procedure;
  cert.system = sys;
  cert.place = opt.place;
  cert.logR = opt.logR;
  cert.chain = chain;
  cert.style = effective_style(opt.style, opt.place);
  cert.escalations = opt.escalations;
  return cert;
}

}  // namespace

BoundContext context_for(const PolySystem& sys, const Place& place,
                         const LogBound& logR) {
  BoundContext ctx;
  ctx.n = sys.n();
  ctx.m = sys.m();
  ctx.d = sys.dim;
  for (const MPoly& fi : sys.f) {
    auto deg = fi.total_degree();
    if (!deg || *deg == 0)
      throw std::invalid_argument("constraint polynomial is constant; degrees must "
                                  "be explicit and positive");
    ctx.deg_f.push_back(*deg);
  }
  auto dg = sys.g.total_degree();
  ctx.deg_g = (dg && *dg > 0) ? *dg : 1;
  ctx.logR = logR;
  ctx.place = place;
  ctx.validate();
  return ctx;
}

// ---------------------------------------------------------------------------
// certify_identity
// ---------------------------------------------------------------------------

Certificate certify_identity(const PolySystem& sys, const PipelineOptions& opt) {
  sys.validate();
  Certificate cert = base_cert("certify_identity", sys, opt, opt.chain);

  if (sys.g.is_zero()) {
    cert.verdict = Verdict::PROVED;
    cert.exact_path = true;
    cert.reason = "g is the zero polynomial";
    return cert;
  }
  if (sys.g.is_constant()) {
    cert.verdict = Verdict::INCONCLUSIVE;
    cert.reason = "g is a nonzero constant; it cannot vanish on X";
    return cert;
  }

  BoundContext ctx = context_for(sys, opt.place, opt.logR);
  auto plan = run_autopilot(cert, sys, ctx, opt, opt.chain);
  if (!plan) return cert;

  LogBound eps = epsilon_main(ctx, plan->H_with_g);
  cert.thresholds.log_eps = eps;

  const Verdict success =
      sys.irreducible ? Verdict::PROVED : Verdict::COMPONENT_PROVED;

  // exact path: a fully exact witness on X with g(P) = 0 needs no epsilon
  if (auto pt = exact_point(plan->witness)) {
    for (size_t i = 0; i < sys.f.size(); ++i)
      if (sys.f[i].eval_exact(*pt) != 0) {
        cert.verdict = Verdict::INCONCLUSIVE;
        cert.reason = "exact witness does not lie on X: f_" + std::to_string(i + 1) +
                      "(P) != 0";
        return cert;
      }
    Rat gv = sys.g.eval_exact(*pt);
    try {
      cert.g_eval = CertifiedValue::from_rational(gv, opt.place, plan->witness.precision);
    } catch (const std::exception&) {
      // p-adic from_rational needs the denominator coprime to p; informational
    }
    if (sgn(gv) != 0) {
      cert.verdict = Verdict::INCONCLUSIVE;
      cert.reason = "g(P) != 0 exactly at the witness";
      return cert;
    }
    cert.exact_path = true;
    cert.verdict = success;
    if (!sys.irreducible) {
      LogBound eps_red = epsilon_reducible(ctx, plan->H_with_g, LogBound::neg_infinity());
      cert.thresholds.aux.emplace_back("epsilon_reducible", eps_red);
      cert.reason = "irreducibility unknown: g vanishes on the component through P";
    }
    return cert;
  }

  // epsilon path with bounded precision escalation
  std::vector<Rat> values = free_values_of(plan->witness);
  long prec = precision_for(eps, opt.place);
  for (unsigned esc = 0; esc <= opt.escalations; ++esc, prec *= 2) {
    Witness w;
    try {
      w = solve_fiber(sys, values, plan->witness.recipe, opt.place, prec);
    } catch (const std::exception& e) {
      cert.verdict = Verdict::INCONCLUSIVE;
      cert.reason = std::string("fiber solving failed: ") + e.what();
      return cert;
    }
    w.free = plan->witness.free;
    CertifiedValue ge = eval_certified(sys.g, w.coords, opt.place, prec);
    YesNoUnknown worst = YesNoUnknown::YES;
    std::string failing;
    for (size_t i = 0; i <= sys.f.size(); ++i) {
      const CertifiedValue& v = i < sys.f.size() ? w.residuals[i] : ge;
      YesNoUnknown r = norm_leq(v, eps);
      if (r == YesNoUnknown::NO) {
        worst = YesNoUnknown::NO;
        failing = i < sys.f.size() ? "|f_" + std::to_string(i + 1) + "(P)|"
                                   : "|g(P)|";
        break;
      }
      if (r == YesNoUnknown::UNKNOWN) worst = YesNoUnknown::UNKNOWN;
    }
    cert.witness = w;
    cert.g_eval = ge;
    if (worst == YesNoUnknown::YES) {
      cert.verdict = success;
      if (!sys.irreducible) {
        LogBound worst_eval = LogBound::neg_infinity();
        for (const CertifiedValue& r : w.residuals)
          worst_eval = LogBound::max(worst_eval, norm_upper_bound(r));
        cert.thresholds.aux.emplace_back(
            "epsilon_reducible", epsilon_reducible(ctx, plan->H_with_g, worst_eval));
        cert.reason = "irreducibility unknown: reducible-corollary conclusion";
      }
      return cert;
    }
    if (worst == YesNoUnknown::NO) {
      cert.verdict = Verdict::INCONCLUSIVE;
      cert.reason = failing + " certifiably exceeds epsilon_main";
      return cert;
    }
  }
  cert.verdict = Verdict::INCONCLUSIVE;
  cert.reason = "enclosures still straddle epsilon_main after precision escalation";
  return cert;
}

// ---------------------------------------------------------------------------
// dichotomy_decide
// ---------------------------------------------------------------------------

namespace {

// |f_i(P)|_v <= eps_f precondition; realistically needs an exact witness
bool precondition_holds(const PolySystem& sys, const Witness& w,
                        const std::optional<std::vector<Rat>>& pt,
                        const LogBound& eps_f, std::string& why) {
  for (size_t i = 0; i < sys.f.size(); ++i) {
    if (pt && sys.f[i].eval_exact(*pt) == 0) continue;
    if (norm_leq(w.residuals[i], eps_f) == YesNoUnknown::YES) continue;
    why = "epsilon_f precondition unprovable for f_" + std::to_string(i + 1) +
          " (need |f_i(P)| <= e^" + eps_f.hi().get_str().substr(0, 24) + "...)";
    return false;
  }
  return true;
}

}  // namespace

Certificate dichotomy_decide(const PolySystem& sys, const PipelineOptions& opt) {
  sys.validate();
  Certificate cert = base_cert("dichotomy", sys, opt, ChainKind::NO_G);

  if (sys.g.is_zero()) {
    cert.verdict = Verdict::CASE1;
    cert.exact_path = true;
    cert.reason = "g is the zero polynomial";
    return cert;
  }

  BoundContext ctx = context_for(sys, opt.place, opt.logR);
  auto plan = run_autopilot(cert, sys, ctx, opt, ChainKind::NO_G);
  if (!plan) return cert;

  auto [eps_f, eps_g] = dichotomy_thresholds(ctx, plan->H_with_g);
  cert.thresholds.log_eps = eps_g;
  cert.thresholds.aux.emplace_back("epsilon_f", eps_f);

  auto pt = exact_point(plan->witness);
  std::string why;
  if (!precondition_holds(sys, plan->witness, pt, eps_f, why)) {
    cert.verdict = Verdict::INCONCLUSIVE;
    cert.reason = why;
    return cert;
  }

  if (pt) {
    Rat gv = sys.g.eval_exact(*pt);
    cert.exact_path = true;
    try {
      cert.g_eval = CertifiedValue::from_rational(gv, opt.place, plan->witness.precision);
    } catch (const std::exception&) {
      // denominator not coprime to p; the exact log-norm below still decides
    }
    LogBound lg = exact_log_norm(gv, opt.place);
    if (lg.is_neg_inf() || compare_certain(lg, eps_g) == Cmp::LE) {
      cert.verdict = Verdict::CASE1;
    } else if (compare_certain(lg, eps_g.add(LN2())) == Cmp::GE) {
      cert.verdict = Verdict::CASE2;
    } else {
      cert.verdict = Verdict::INCONCLUSIVE;
      cert.reason = "|g(P)| falls between epsilon_g and 2 epsilon_g";
    }
    return cert;
  }

  std::vector<Rat> values = free_values_of(plan->witness);
  long prec = precision_for(eps_g, opt.place);
  for (unsigned esc = 0; esc <= opt.escalations; ++esc, prec *= 2) {
    Witness w;
    try {
      w = solve_fiber(sys, values, plan->witness.recipe, opt.place, prec);
    } catch (const std::exception& e) {
      cert.verdict = Verdict::INCONCLUSIVE;
      cert.reason = std::string("fiber solving failed: ") + e.what();
      return cert;
    }
    w.free = plan->witness.free;
    cert.witness = w;
    CertifiedValue ge = eval_certified(sys.g, w.coords, opt.place, prec);
    cert.g_eval = ge;
    if (norm_leq(ge, eps_g) == YesNoUnknown::YES) {
      cert.verdict = Verdict::CASE1;
      return cert;
    }
    if (norm_geq(ge, eps_g.add(LN2())) == YesNoUnknown::YES) {
      cert.verdict = Verdict::CASE2;
      return cert;
    }
  }
  cert.verdict = Verdict::INCONCLUSIVE;
  cert.reason = "enclosure of |g(P)| straddles [epsilon_g, 2 epsilon_g] at the "
                "precision cap";
  return cert;
}

// ---------------------------------------------------------------------------
// dimension_by_example
// ---------------------------------------------------------------------------

namespace {

// det(e_1..e_d, grad f_sel(P)) as a certified value
CertifiedValue dimension_det(const PolySystem& sys,
                             const std::vector<std::size_t>& sel,
                             const std::vector<CertifiedValue>& coords,
                             const Place& place, long prec) {
  const size_t n = sys.n();
  const size_t d = n - sel.size();
  std::vector<std::vector<CertifiedValue>> M;
  for (size_t i = 0; i < d; ++i) {
    std::vector<CertifiedValue> row;
    for (size_t j = 0; j < n; ++j)
      row.push_back(CertifiedValue::from_rational(Rat(i == j ? 1 : 0), place, prec));
    M.push_back(std::move(row));
  }
  for (std::size_t s : sel) {
    std::vector<CertifiedValue> row;
    for (const MPoly& dfj : sys.f.at(s).gradient())
      row.push_back(eval_certified(dfj, coords, place, prec));
    M.push_back(std::move(row));
  }
  return det_certified(M);
}

}  // namespace

Certificate dimension_by_example(const PolySystem& sys, unsigned d,
                                 const PipelineOptions& opt,
                                 const std::vector<std::size_t>& selection,
                                 bool all_permutations) {
  sys.validate();
  if (d > sys.n()) throw std::invalid_argument("dimension_by_example: d > n");
  const size_t codim = sys.n() - d;
  if (!all_permutations && selection.size() != codim)
    throw std::invalid_argument("dimension_by_example: selection size must be n - d");
  for (std::size_t s : selection)
    if (s >= sys.m()) throw std::invalid_argument("selection index out of range");

  Certificate cert = base_cert("dimension", sys, opt, ChainKind::NO_G);
  cert.confirmed_dim = d;
  cert.selection = selection;
  cert.all_permutations = all_permutations;

  if (codim > sys.m()) {
    cert.verdict = Verdict::INCONCLUSIVE;
    cert.reason = "need n - d constraint polynomials, have fewer (m < n - d)";
    return cert;
  }

  BoundContext ctx = context_for(sys, opt.place, opt.logR);
  ctx.d = d;
  auto plan = run_autopilot(cert, sys, ctx, opt, ChainKind::NO_G);
  if (!plan) return cert;

  auto [eps_f, eps_det] = dimension_thresholds(ctx, plan->H_no_g);
  cert.thresholds.log_eps = eps_det;
  cert.thresholds.aux.emplace_back("epsilon_f", eps_f);

  auto pt = exact_point(plan->witness);
  std::string why;
  if (!precondition_holds(sys, plan->witness, pt, eps_f, why)) {
    cert.verdict = Verdict::INCONCLUSIVE;
    cert.reason = why;
    return cert;
  }

  // all selections of n-d distinct indices (converse corollary) or just one
  std::vector<std::vector<std::size_t>> sels;
  if (all_permutations) {
    std::vector<bool> mask(sys.m(), false);
    std::fill(mask.begin(), mask.begin() + static_cast<long>(codim), true);
    do {
      std::vector<std::size_t> s;
      for (size_t i = 0; i < mask.size(); ++i)
        if (mask[i]) s.push_back(i);
      sels.push_back(s);
    } while (std::prev_permutation(mask.begin(), mask.end()));
  } else {
    sels.push_back(selection);
  }

  const LogBound target = eps_det.add(LN2());  // |det| >= 2 eps_det
  std::vector<Rat> values = free_values_of(plan->witness);
  for (const auto& sel : sels) {
    bool confirmed = false;
    long prec = codim == 0 ? initial_precision(opt.place)
                           : precision_for(eps_det, opt.place);
    for (unsigned esc = 0; esc <= opt.escalations && !confirmed; ++esc, prec *= 2) {
      Witness w;
      try {
        w = solve_fiber(sys, values, plan->witness.recipe, opt.place, prec);
      } catch (const std::exception& e) {
        cert.verdict = Verdict::INCONCLUSIVE;
        cert.reason = std::string("fiber solving failed: ") + e.what();
        return cert;
      }
      w.free = plan->witness.free;
      cert.witness = w;
      CertifiedValue det = dimension_det(sys, sel, w.coords, opt.place, prec);
      cert.det_eval = det;
      if (norm_geq(det, target) == YesNoUnknown::YES) confirmed = true;
    }
    if (!confirmed) {
      cert.verdict = Verdict::INCONCLUSIVE;
      std::string s;
      for (std::size_t i : sel) s += (s.empty() ? "" : ",") + std::to_string(i);
      cert.reason = "determinant enclosure for selection (" + s +
                    ") not certifiably above 2 epsilon_det";
      return cert;
    }
  }
  cert.verdict = Verdict::DIM_CONFIRMED;
  return cert;
}

// ---------------------------------------------------------------------------
// prove_zero_ambient
// ---------------------------------------------------------------------------

Certificate prove_zero_ambient(const MPoly& g) {
  Certificate cert;
  cert.procedure = "kronecker";
  cert.system.vars = g.vars();
  cert.system.g = g;
  cert.system.dim = static_cast<unsigned>(g.nvars());
  cert.exact_path = true;

  MPoly kr = kronecker_substitute(g);
  Rat thr = cauchy_threshold(kr);
  Rat p(10);
  while (p < thr) p *= 10;  // least power of ten above the Cauchy threshold
  Rat value = kr.eval_exact({p});
  cert.kron_point = p;
  cert.kron_value = value;
  if (sgn(value) == 0) {
    cert.verdict = Verdict::PROVED;
  } else {
    cert.verdict = Verdict::DISPROVED;
    cert.reason = "g_kr(" + p.get_num().get_str() + ") = " + rat_to_string(value) +
                  " != 0 is an exact counter-witness";
  }
  return cert;
}

// ---------------------------------------------------------------------------
// membership oracle (test-only, exact symbolic)
// ---------------------------------------------------------------------------

Membership membership_oracle(const PolySystem& sys, const MPoly& g) {
  if (!sys.has_parametrization())
    throw std::invalid_argument("membership_oracle needs a parametrization");
  if (g.vars() != sys.vars)
    throw std::invalid_argument("membership_oracle: variable mismatch");
  // clear denominators: multiply each term by prod_i den_i^(D_i - e_i)
  std::vector<unsigned> D(sys.n());
  for (size_t i = 0; i < sys.n(); ++i) D[i] = g.var_degree(i);
  MPoly acc = MPoly::zero(sys.param_vars);
  for (const auto& [e, c] : g.terms()) {
    MPoly prod = MPoly::constant(sys.param_vars, c);
    for (size_t i = 0; i < sys.n(); ++i) {
      const auto& [num, den] = sys.parametrization[i];
      if (e[i] > 0) prod = prod * num.pow(e[i]);
      if (D[i] > e[i]) prod = prod * den.pow(D[i] - e[i]);
    }
    acc = acc + prod;
  }
  return acc.is_zero() ? Membership::MEMBER : Membership::NON_MEMBER;
}

// ---------------------------------------------------------------------------
// Certificate serialization
// ---------------------------------------------------------------------------

nlohmann::ordered_json Certificate::to_json() const {
  nlohmann::ordered_json j;
  j["schema"] = schema;
  j["tool"] = tool;
  j["procedure"] = procedure;
  j["place"] = place.to_string();
  j["logR"] = logbound_to_json(logR);
  j["chain"] = chain_name(chain);
  j["style"] = style_name(style);
  j["escalations"] = escalations;
  j["system"] = system.to_json();
  j["thresholds"] = thresholds.to_json();
  if (witness) j["witness"] = witness->to_json();
  if (g_eval) j["g_eval"] = certified_value_to_json(*g_eval);
  if (procedure == "dimension") {
    j["d"] = confirmed_dim;
    j["selection"] = selection;
    j["all_permutations"] = all_permutations;
    if (det_eval) j["det_eval"] = certified_value_to_json(*det_eval);
  }
  if (kron_point) {
    j["kronecker"] = {{"point", rat_to_string(*kron_point)},
                      {"value", rat_to_string(*kron_value)}};
  }
  j["exact_path"] = exact_path;
  j["verdict"] = verdict_name(verdict);
  j["reason"] = reason;
  return j;
}

Certificate Certificate::from_json(const nlohmann::json& j) {
  Certificate c;
  c.schema = j.at("schema").get<std::string>();
  c.tool = j.at("tool").get<std::string>();
  c.procedure = j.at("procedure").get<std::string>();
  c.place = Place::from_string(j.at("place").get<std::string>());
  c.logR = logbound_from_json(j.at("logR"));
  c.chain = chain_from_name(j.at("chain").get<std::string>());
  c.style = style_from_name(j.at("style").get<std::string>());
  c.escalations = j.at("escalations").get<unsigned>();
  c.system = PolySystem::from_json(j.at("system"));
  if (j.contains("thresholds")) {
    const auto& t = j["thresholds"];
    for (const auto& e : t.at("chain"))
      c.thresholds.chain.push_back(logbound_from_json(e));
    c.thresholds.log_eps = logbound_from_json(t.at("log_eps"));
    // log10_eps is derived on output and not stored back
    for (auto it = t.at("aux").begin(); it != t.at("aux").end(); ++it)
      c.thresholds.aux.emplace_back(it.key(), logbound_from_json(it.value()));
  }
  if (j.contains("witness"))
    c.witness = Witness::from_json(j["witness"], c.system.vars);
  if (j.contains("g_eval"))
    c.g_eval = certified_value_from_json(j["g_eval"], c.place);
  if (j.contains("d")) c.confirmed_dim = j["d"].get<unsigned>();
  if (j.contains("selection"))
    c.selection = j["selection"].get<std::vector<std::size_t>>();
  if (j.contains("all_permutations"))
    c.all_permutations = j["all_permutations"].get<bool>();
  if (j.contains("det_eval"))
    c.det_eval = certified_value_from_json(j["det_eval"], c.place);
  if (j.contains("kronecker")) {
    c.kron_point = rat_from_string(j["kronecker"].at("point").get<std::string>());
    c.kron_value = rat_from_string(j["kronecker"].at("value").get<std::string>());
  }
  c.exact_path = j.at("exact_path").get<bool>();
  c.verdict = verdict_from_name(j.at("verdict").get<std::string>());
  c.reason = j.at("reason").get<std::string>();
  return c;
}

// ---------------------------------------------------------------------------
// verify_certificate: recompute everything from the embedded inputs
// ---------------------------------------------------------------------------

VerifyResult verify_certificate(const nlohmann::json& cert_json) {
  Certificate stored;
  try {
    stored = Certificate::from_json(cert_json);
  } catch (const std::exception& e) {
    return {false, std::string("unparseable certificate: ") + e.what()};
  }
  Certificate redone;
  try {
    if (stored.procedure == "kronecker") {
      redone = prove_zero_ambient(stored.system.g);
    } else {
      PipelineOptions opt;
      opt.place = stored.place;
      opt.logR = stored.logR;
      opt.chain = stored.chain;
      opt.style = stored.style;
      opt.escalations = stored.escalations;
      if (stored.style == FreeStyle::USER) {
        if (!stored.witness) return {false, "USER-style certificate without witness"};
        opt.user_values = free_values_of(*stored.witness);
      }
      if (stored.procedure == "certify_identity") {
        redone = certify_identity(stored.system, opt);
      } else if (stored.procedure == "dichotomy") {
        redone = dichotomy_decide(stored.system, opt);
      } else if (stored.procedure == "dimension") {
        redone = dimension_by_example(stored.system, stored.confirmed_dim, opt,
                                      stored.selection, stored.all_permutations);
      } else {
        return {false, "unknown procedure: " + stored.procedure};
      }
    }
  } catch (const std::exception& e) {
    return {false, std::string("recomputation failed: ") + e.what()};
  }
  nlohmann::json a = redone.to_json();
  nlohmann::json b = cert_json;
  if (a == b) return {true, ""};
  for (auto it = a.begin(); it != a.end(); ++it) {
    if (!b.contains(it.key()))
      return {false, "missing field '" + it.key() + "'"};
    if (b[it.key()] != it.value())
      return {false, "field '" + it.key() + "' does not reproduce"};
  }
  return {false, "certificate contains extraneous fields"};
}

// ---------------------------------------------------------------------------
// geometry's dimension_guess_check (declared in geometry.hpp; lives here to
// delegate to dimension_by_example)
// ---------------------------------------------------------------------------

DimGuessResult dimension_guess_check(const CompiledSystem& cs, const Witness& witness,
                                     const BoundContext& ctx) {
  DimGuessResult res;
  if (cs.d_guess < 0) {
    res.reason = "overdetermined: m > n, the guess d = n - m is meaningless";
    return res;
  }
  const unsigned d = static_cast<unsigned>(cs.d_guess);
  if (cs.system.m() == 0) {
    res.status = DimGuessResult::Status::CONFIRMED;  // X = A^n, no constraints
    res.d = d;
    return res;
  }
  PipelineOptions opt;
  opt.place = witness.place;
  opt.logR = ctx.logR;
  opt.style = FreeStyle::USER;
  for (const FreeCoordinate& fc : witness.free) opt.user_values.push_back(fc.value);
  std::vector<std::size_t> sel;
  for (size_t i = 0; i < cs.system.n() - d; ++i) sel.push_back(i);
  PolySystem sys = cs.system;
  sys.dim = d;
  Certificate cert;
  try {
    cert = dimension_by_example(sys, d, opt, sel);
  } catch (const std::exception& e) {
    res.reason = e.what();
    return res;
  }
  if (cert.verdict == Verdict::DIM_CONFIRMED) {
    res.status = DimGuessResult::Status::CONFIRMED;
    res.d = d;
  } else {
    res.reason = cert.reason;
  }
  return res;
}

}  // namespace pbe
