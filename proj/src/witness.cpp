#include "pbe/witness.hpp"

#include <algorithm>
#include <set>

namespace pbe {

// ---------------------------------------------------------------------------
// PolySystem / SolvingRecipe (declared in system.hpp)
// ---------------------------------------------------------------------------

void PolySystem::validate() const {
  std::set<std::string> names(vars.begin(), vars.end());
  if (names.size() != vars.size() || vars.empty())
    throw std::invalid_argument("PolySystem: variable names must be unique and non-empty");
  for (const MPoly& fi : f)
    if (fi.vars() != vars) throw std::invalid_argument("PolySystem: f_i variable order mismatch");
  if (g.vars() != vars) throw std::invalid_argument("PolySystem: g variable order mismatch");
  if (dim > n()) throw std::invalid_argument("PolySystem: dim > n");
  if (has_parametrization()) {
    if (parametrization.size() != vars.size())
      throw std::invalid_argument("PolySystem: parametrization must cover every coordinate");
    for (const auto& [num, den] : parametrization) {
      if (num.vars() != param_vars || den.vars() != param_vars)
        throw std::invalid_argument("PolySystem: parametrization variable mismatch");
      if (den.is_zero()) throw std::invalid_argument("PolySystem: zero denominator");
    }
  }
}

namespace {

const char* kind_name(RecipeStep::Kind k) {
  switch (k) {
    case RecipeStep::Kind::LINEAR: return "LINEAR";
    case RecipeStep::Kind::QUADRATIC: return "QUADRATIC";
    case RecipeStep::Kind::RABINOWITSCH_INVERSE: return "RABINOWITSCH_INVERSE";
    case RecipeStep::Kind::NEWTON: return "NEWTON";
    case RecipeStep::Kind::GIVEN: return "GIVEN";
  }
  return "?";
}

RecipeStep::Kind kind_from_name(const std::string& s) {
  if (s == "LINEAR") return RecipeStep::Kind::LINEAR;
  if (s == "QUADRATIC") return RecipeStep::Kind::QUADRATIC;
  if (s == "RABINOWITSCH_INVERSE") return RecipeStep::Kind::RABINOWITSCH_INVERSE;
  if (s == "NEWTON") return RecipeStep::Kind::NEWTON;
  if (s == "GIVEN") return RecipeStep::Kind::GIVEN;
  throw std::invalid_argument("unknown recipe step kind: " + s);
}

}  // namespace

nlohmann::ordered_json recipe_to_json(const SolvingRecipe& r) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const RecipeStep& s : r.steps) {
    nlohmann::ordered_json j;
    j["kind"] = kind_name(s.kind);
    j["targets"] = s.targets;
    switch (s.kind) {
      case RecipeStep::Kind::LINEAR:
        j["a"] = s.lin_a.to_string();
        j["b"] = s.lin_b.to_string();
        break;
      case RecipeStep::Kind::QUADRATIC:
        j["rhs"] = s.quad_rhs.to_string();
        j["branch"] = s.branch.get_str();
        break;
      case RecipeStep::Kind::RABINOWITSCH_INVERSE:
        j["denom"] = s.rab_denom.to_string();
        break;
      case RecipeStep::Kind::NEWTON: {
        nlohmann::ordered_json fs = nlohmann::ordered_json::array();
        for (const MPoly& q : s.newton_f) fs.push_back(q.to_string());
        j["F"] = fs;
        nlohmann::ordered_json box = nlohmann::ordered_json::array();
        for (const auto& [lo, hi] : s.newton_box)
          box.push_back({rat_to_string(lo), rat_to_string(hi)});
        j["box"] = box;
        break;
      }
      case RecipeStep::Kind::GIVEN:
        j["value"] = rat_to_string(s.given_value);
        break;
    }
    arr.push_back(j);
  }
  return arr;
}

SolvingRecipe recipe_from_json(const nlohmann::json& j,
                               const std::vector<std::string>& vars) {
  SolvingRecipe r;
  for (const auto& js : j) {
    RecipeStep s;
    s.kind = kind_from_name(js.at("kind").get<std::string>());
    s.targets = js.at("targets").get<std::vector<std::size_t>>();
    switch (s.kind) {
      case RecipeStep::Kind::LINEAR:
        s.lin_a = parse_poly(js.at("a").get<std::string>(), vars);
        s.lin_b = parse_poly(js.at("b").get<std::string>(), vars);
        break;
      case RecipeStep::Kind::QUADRATIC:
        s.quad_rhs = parse_poly(js.at("rhs").get<std::string>(), vars);
        s.branch = Int(js.at("branch").get<std::string>());
        break;
      case RecipeStep::Kind::RABINOWITSCH_INVERSE:
        s.rab_denom = parse_poly(js.at("denom").get<std::string>(), vars);
        break;
      case RecipeStep::Kind::NEWTON:
        for (const auto& q : js.at("F")) s.newton_f.push_back(parse_poly(q.get<std::string>(), vars));
        for (const auto& b : js.at("box"))
          s.newton_box.emplace_back(rat_from_string(b.at(0).get<std::string>()),
                                    rat_from_string(b.at(1).get<std::string>()));
        break;
      case RecipeStep::Kind::GIVEN:
        s.given_value = rat_from_string(js.at("value").get<std::string>());
        break;
    }
    r.steps.push_back(std::move(s));
  }
  return r;
}

nlohmann::ordered_json PolySystem::to_json() const {
  nlohmann::ordered_json j;
  j["vars"] = vars;
  nlohmann::ordered_json fs = nlohmann::ordered_json::array();
  for (const MPoly& fi : f) fs.push_back(fi.to_string());
  j["f"] = fs;
  j["g"] = g.to_string();
  j["dim"] = dim;
  j["irreducible"] = irreducible;
  if (!recipe.empty()) j["recipe"] = recipe_to_json(recipe);
  if (goal_height_hint) j["goal_height_hint"] = logbound_to_json(*goal_height_hint);
  if (has_parametrization()) {
    nlohmann::ordered_json p;
    p["params"] = param_vars;
    nlohmann::ordered_json coords = nlohmann::ordered_json::array();
    for (const auto& [num, den] : parametrization)
      coords.push_back({{"num", num.to_string()}, {"den", den.to_string()}});
    p["coords"] = coords;
    j["parametrization"] = p;
  }
  return j;
}

PolySystem PolySystem::from_json(const nlohmann::json& j) {
  PolySystem s;
  s.vars = j.at("vars").get<std::vector<std::string>>();
  for (const auto& fs : j.at("f")) s.f.push_back(parse_poly(fs.get<std::string>(), s.vars));
  s.g = parse_poly(j.at("g").get<std::string>(), s.vars);
  s.dim = j.at("dim").get<unsigned>();
  s.irreducible = j.at("irreducible").get<bool>();
  if (j.contains("recipe")) s.recipe = recipe_from_json(j["recipe"], s.vars);
  if (j.contains("goal_height_hint"))
    s.goal_height_hint = logbound_from_json(j["goal_height_hint"]);
  if (j.contains("parametrization")) {
    const auto& p = j["parametrization"];
    s.param_vars = p.at("params").get<std::vector<std::string>>();
    for (const auto& c : p.at("coords"))
      s.parametrization.emplace_back(parse_poly(c.at("num").get<std::string>(), s.param_vars),
                                     parse_poly(c.at("den").get<std::string>(), s.param_vars));
  }
  s.validate();
  return s;
}

// ---------------------------------------------------------------------------
// Free coordinate choice
// ---------------------------------------------------------------------------

namespace {

// digits cycle 1,2,...,9,0,1,2,...
int pattern_digit(unsigned j) { return static_cast<int>(j % 10 == 0 ? 0 : j % 10); }

Int pattern_integer(unsigned k) {
  Int v(0);
  for (unsigned j = 1; j <= k; ++j) v = v * 10 + pattern_digit(j);
  return v;
}

bool height_clears(const LogBound& h, const LogBound& threshold) {
  if (threshold.is_neg_inf()) return true;
  return compare_certain(h, threshold) == Cmp::GE;
}

}  // namespace

FreeCoordinate choose_free_coordinate(const LogBound& threshold, const Place& place,
                                      FreeStyle style,
                                      const std::optional<Rat>& user_value) {
  if (style == FreeStyle::USER) {
    if (!user_value) throw std::invalid_argument("choose_free_coordinate: USER needs a value");
    Rat v = *user_value;
    v.canonicalize();
    LogBound h = ln_enclosure(Rat(height_set_integer({v})), 96);
    if (!height_clears(h, threshold))
      throw std::domain_error(
          "genericity rejection: h(" + rat_to_string(v) + ") = [" + h.lo().get_str() +
          ", ...] does not certifiably reach the threshold [" +
          (threshold.is_neg_inf() ? std::string("-inf") : threshold.hi().get_str()) + "]");
    return FreeCoordinate{v, h, 0};
  }
  if (style == FreeStyle::DECIMAL_PATTERN && !place.is_archimedean())
    throw std::invalid_argument("DECIMAL_PATTERN requires the real place");
  if (style == FreeStyle::PADIC_PATTERN && place.is_archimedean())
    throw std::invalid_argument("PADIC_PATTERN requires a finite place");
  // Termination guard only: thresholds compound along the chain, so later
  // coordinates can legitimately need thousands of pattern digits.
  for (unsigned k = 1; k <= 50000; ++k) {
    int last = pattern_digit(k);
    if (style == FreeStyle::DECIMAL_PATTERN) {
      // reduced denominator must be exactly 10^k
      if (last != 1 && last != 3 && last != 7 && last != 9) continue;
      Int den;
      mpz_ui_pow_ui(den.get_mpz_t(), 10, k);
      LogBound h = ln_enclosure(Rat(den), 96);  // h = k ln 10 exactly
      if (!height_clears(h, threshold)) continue;
      Rat v(pattern_integer(k), den);
      v.canonicalize();
      return FreeCoordinate{v, h, k};
    }
    if (last == 0) continue;  // avoid trailing-zero patterns
    Int m = Int(static_cast<long>(place.p)) * pattern_integer(k);
    LogBound h = ln_enclosure(Rat(m), 96);
    if (!height_clears(h, threshold)) continue;
    return FreeCoordinate{Rat(m), h, k};
  }
  throw std::domain_error("choose_free_coordinate: threshold unreachable by pattern");
}

// ---------------------------------------------------------------------------
// exact square root
// ---------------------------------------------------------------------------

std::optional<Rat> exact_sqrt(const Rat& q_in) {
  Rat q = q_in;
  q.canonicalize();
  if (sgn(q) < 0) return std::nullopt;
  if (sgn(q) == 0) return Rat(0);
  if (!mpz_perfect_square_p(q.get_num().get_mpz_t()) ||
      !mpz_perfect_square_p(q.get_den().get_mpz_t()))
    return std::nullopt;
  Int n, d;
  mpz_sqrt(n.get_mpz_t(), q.get_num().get_mpz_t());
  mpz_sqrt(d.get_mpz_t(), q.get_den().get_mpz_t());
  return Rat(n, d);
}

// ---------------------------------------------------------------------------
// Fiber solving
// ---------------------------------------------------------------------------

namespace {

struct Solver {
  const PolySystem& sys;
  Place place;
  long precision;
  std::vector<std::optional<CertifiedValue>> cur;
  std::vector<std::optional<Rat>> exact;

  Solver(const PolySystem& s, Place pl, long prec)
      : sys(s), place(pl), precision(prec), cur(s.n()), exact(s.n()) {}

  // certified + (if all used coordinates exact) exact evaluation
  std::pair<CertifiedValue, std::optional<Rat>> eval(const MPoly& q) const {
    if (q.vars() != sys.vars)
      throw std::invalid_argument("recipe polynomial has wrong variable order");
    bool all_exact = true;
    std::vector<CertifiedValue> pt;
    std::vector<Rat> rats(sys.n(), Rat(0));
    for (std::size_t j = 0; j < sys.n(); ++j) {
      if (q.var_degree(j) > 0 && !cur[j])
        throw std::invalid_argument("recipe step references an unsolved coordinate");
      pt.push_back(cur[j] ? *cur[j]
                          : CertifiedValue::from_rational(Rat(0), place, precision));
      if (q.var_degree(j) > 0) {
        if (exact[j])
          rats[j] = *exact[j];
        else
          all_exact = false;
      }
    }
    CertifiedValue cv = eval_certified(q, pt, place, precision);
    std::optional<Rat> ex;
    if (all_exact) {
      Rat r = q.eval_exact(rats);
      r.canonicalize();
      ex = r;
    }
    return {cv, ex};
  }

  void set(std::size_t t, CertifiedValue v, std::optional<Rat> ex) {
    if (t >= sys.n()) throw std::invalid_argument("recipe target out of range");
    if (cur[t]) throw std::invalid_argument("recipe solves a coordinate twice");
    cur[t] = std::move(v);
    exact[t] = std::move(ex);
  }

  void set_exact(std::size_t t, Rat v) {
    v.canonicalize();
    set(t, CertifiedValue::from_rational(v, place, precision), v);
  }

  void run_step(const RecipeStep& s) {
    switch (s.kind) {
      case RecipeStep::Kind::LINEAR: {
        if (s.targets.size() != 1) throw std::invalid_argument("LINEAR: one target");
        auto [av, ae] = eval(s.lin_a);
        auto [bv, be] = eval(s.lin_b);
        if (ae && be && sgn(*ae) != 0) {
          Rat x = -(*be) / (*ae);
          set_exact(s.targets[0], x);
        } else {
          set(s.targets[0], bv.div(av).neg(), std::nullopt);
        }
        break;
      }
      case RecipeStep::Kind::QUADRATIC: {
        if (s.targets.size() != 1) throw std::invalid_argument("QUADRATIC: one target");
        auto [rv, re] = eval(s.quad_rhs);
        if (re) {
          if (auto root = exact_sqrt(*re)) {
            Rat x = *root;
            if (place.is_archimedean()) {
              if (s.branch < 0) x = -x;
            } else {
              // match the root class mod p
              Int cls = PadicApprox::from_rational(x == 0 ? Rat(0) : x,
                                                   place.p, 1).residue;
              Int want = s.branch % Int(static_cast<long>(place.p));
              if (want < 0) want += static_cast<long>(place.p);
              if (cls != want) x = -x;
            }
            set_exact(s.targets[0], x);
            break;
          }
        }
        set(s.targets[0], sqrt_certified(rv, s.branch), std::nullopt);
        break;
      }
      case RecipeStep::Kind::RABINOWITSCH_INVERSE: {
        if (s.targets.size() != 1)
          throw std::invalid_argument("RABINOWITSCH_INVERSE: one target");
        auto [fv, fe] = eval(s.rab_denom);
        if (fe && sgn(*fe) != 0) {
          set_exact(s.targets[0], Rat(-1) / *fe);
        } else {
          set(s.targets[0],
              CertifiedValue::from_rational(Rat(-1), place, precision).div(fv),
              std::nullopt);
        }
        break;
      }
      case RecipeStep::Kind::NEWTON: {
        if (!place.is_archimedean())
          throw std::invalid_argument("NEWTON steps require the real place");
        if (s.targets.size() != s.newton_f.size() ||
            s.targets.size() != s.newton_box.size())
          throw std::invalid_argument("NEWTON: square system with a box per target");
        // substitute exact prior coordinates, project onto the target vars
        std::vector<std::string> tvars;
        for (std::size_t t : s.targets) tvars.push_back(sys.vars.at(t));
        std::vector<MPoly> F;
        for (const MPoly& q : s.newton_f) {
          MPoly sub(tvars);
          for (const auto& [e, c] : q.terms()) {
            Rat coeff = c;
            std::vector<unsigned> te(tvars.size(), 0);
            for (std::size_t j = 0; j < sys.n(); ++j) {
              if (e[j] == 0) continue;
              auto it = std::find(s.targets.begin(), s.targets.end(), j);
              if (it != s.targets.end()) {
                te[static_cast<std::size_t>(it - s.targets.begin())] = e[j];
              } else {
                if (!exact[j])
                  throw std::invalid_argument(
                      "NEWTON step needs exact values for prior coordinates");
                Rat pw(1);
                for (unsigned r = 0; r < e[j]; ++r) pw *= *exact[j];
                coeff *= pw;
              }
            }
            coeff.canonicalize();
            if (sgn(coeff) != 0) sub.add_term(te, coeff);
          }
          F.push_back(sub);
        }
        std::vector<RealBall> box;
        for (const auto& [lo, hi] : s.newton_box)
          box.emplace_back(RealBall::from_rational(lo, precision).lo,
                           RealBall::from_rational(hi, precision).hi, precision);
        NewtonResult res = interval_newton_refine(F, box, precision);
        if (res.status != NewtonResult::Status::VERIFIED)
          throw std::runtime_error("NEWTON step could not verify a unique zero in the box");
        for (std::size_t t = 0; t < s.targets.size(); ++t)
          set(s.targets[t], CertifiedValue(place, res.box[t]), std::nullopt);
        break;
      }
      case RecipeStep::Kind::GIVEN: {
        if (s.targets.size() != 1) throw std::invalid_argument("GIVEN: one target");
        set_exact(s.targets[0], s.given_value);
        break;
      }
    }
  }
};

}  // namespace

Witness solve_fiber(const PolySystem& sys, const std::vector<Rat>& free_values,
                    const SolvingRecipe& recipe, const Place& place, long precision) {
  sys.validate();
  std::set<std::size_t> covered;
  for (const RecipeStep& s : recipe.steps)
    for (std::size_t t : s.targets)
      if (!covered.insert(t).second)
        throw std::invalid_argument("solve_fiber: recipe solves a coordinate twice");
  const std::size_t d = sys.n() - covered.size();
  if (free_values.size() != d)
    throw std::invalid_argument("solve_fiber: expected " + std::to_string(d) +
                                " free values");
  for (std::size_t i = 0; i < d; ++i)
    if (covered.count(i))
      throw std::invalid_argument("solve_fiber: free coordinates must come first");

  Solver sol(sys, place, precision);
  for (std::size_t i = 0; i < d; ++i) sol.set_exact(i, free_values[i]);
  for (const RecipeStep& s : recipe.steps) sol.run_step(s);
  for (std::size_t j = 0; j < sys.n(); ++j)
    if (!sol.cur[j])
      throw std::invalid_argument("solve_fiber: recipe does not cover coordinate " +
                                  sys.vars[j]);

  Witness w;
  w.place = place;
  w.precision = precision;
  w.recipe = recipe;
  for (std::size_t i = 0; i < d; ++i) {
    Rat v = free_values[i];
    v.canonicalize();
    w.free.push_back(
        FreeCoordinate{v, ln_enclosure(Rat(height_set_integer({v})), 96), 0});
  }
  for (std::size_t j = 0; j < sys.n(); ++j) {
    w.coords.push_back(*sol.cur[j]);
    w.exact.push_back(sol.exact[j]);
  }
  for (const MPoly& fi : sys.f) w.residuals.push_back(sol.eval(fi).first);
  return w;
}

// ---------------------------------------------------------------------------
// Witness serialization
// ---------------------------------------------------------------------------

bool Witness::all_exact() const {
  for (const auto& e : exact)
    if (!e) return false;
  return true;
}

namespace {

nlohmann::ordered_json ball_to_json(const RealBall& b) {
  return {{"lo", b.lo.to_string()}, {"hi", b.hi.to_string()}, {"bits", b.prec}};
}

RealBall ball_from_json(const nlohmann::json& j) {
  return RealBall(Dyadic::from_string(j.at("lo").get<std::string>()),
                  Dyadic::from_string(j.at("hi").get<std::string>()),
                  j.at("bits").get<long>());
}

nlohmann::ordered_json padic_to_json(const PadicApprox& a) {
  return {{"p", a.p}, {"N", a.N}, {"residue", a.residue.get_str()}};
}

PadicApprox padic_from_json(const nlohmann::json& j) {
  return PadicApprox(j.at("p").get<unsigned long>(), j.at("N").get<long>(),
                     Int(j.at("residue").get<std::string>()));
}

}  // namespace

nlohmann::ordered_json certified_value_to_json(const CertifiedValue& v) {
  nlohmann::ordered_json j;
  if (v.is_real())
    j["real"] = ball_to_json(v.real());
  else
    j["padic"] = padic_to_json(v.padic());
  return j;
}

CertifiedValue certified_value_from_json(const nlohmann::json& j, const Place& place) {
  if (j.contains("real")) return CertifiedValue(place, ball_from_json(j["real"]));
  return CertifiedValue(place, padic_from_json(j["padic"]));
}

namespace {
constexpr auto value_to_json = certified_value_to_json;
constexpr auto value_from_json = certified_value_from_json;
}  // namespace

nlohmann::ordered_json Witness::to_json() const {
  nlohmann::ordered_json j;
  j["place"] = place.to_string();
  j["precision"] = precision;
  nlohmann::ordered_json fr = nlohmann::ordered_json::array();
  for (const FreeCoordinate& fc : free) {
    nlohmann::ordered_json e;
    e["value"] = rat_to_string(fc.value);
    e["height"] = logbound_to_json(fc.height);
    e["k"] = fc.k;
    fr.push_back(e);
  }
  j["free"] = fr;
  j["recipe"] = recipe_to_json(recipe);
  nlohmann::ordered_json cs = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < coords.size(); ++i) {
    nlohmann::ordered_json e = value_to_json(coords[i]);
    if (exact[i]) e["exact"] = rat_to_string(*exact[i]);
    cs.push_back(e);
  }
  j["coords"] = cs;
  nlohmann::ordered_json rs = nlohmann::ordered_json::array();
  for (const CertifiedValue& r : residuals) rs.push_back(value_to_json(r));
  j["residuals"] = rs;
  return j;
}

Witness Witness::from_json(const nlohmann::json& j, const std::vector<std::string>& vars) {
  Witness w;
  w.place = Place::from_string(j.at("place").get<std::string>());
  w.precision = j.at("precision").get<long>();
  for (const auto& e : j.at("free")) {
    FreeCoordinate fc;
    fc.value = rat_from_string(e.at("value").get<std::string>());
    fc.height = logbound_from_json(e.at("height"));
    fc.k = e.at("k").get<unsigned>();
    w.free.push_back(fc);
  }
  w.recipe = recipe_from_json(j.at("recipe"), vars);
  for (const auto& e : j.at("coords")) {
    w.coords.push_back(value_from_json(e, w.place));
    if (e.contains("exact"))
      w.exact.push_back(rat_from_string(e["exact"].get<std::string>()));
    else
      w.exact.push_back(std::nullopt);
  }
  for (const auto& e : j.at("residuals")) w.residuals.push_back(value_from_json(e, w.place));
  return w;
}

// ---------------------------------------------------------------------------
// Autopilot
// ---------------------------------------------------------------------------

LogBound genericity_threshold_no_g(const BoundContext& ctx, const LogBound& H_prev) {
  ctx.validate();
  Int pw;
  mpz_ui_pow_ui(pw.get_mpz_t(), ctx.D_f(), ctx.m);
  Rat factor = Rat(ctx.n) * Rat(pw);
  return H_prev.add(ln_enclosure_ui(ctx.n + 2, ctx.bits).scale(Rat(4))).scale(factor);
}

WitnessPlan autopilot(const PolySystem& sys, const BoundContext& ctx, FreeStyle style,
                      ChainKind chain, const Place& place, long precision,
                      const std::vector<Rat>& user_values) {
  sys.validate();
  std::set<std::size_t> covered;
  for (const RecipeStep& s : sys.recipe.steps)
    for (std::size_t t : s.targets) covered.insert(t);
  const std::size_t d = sys.n() - covered.size();
  if (style == FreeStyle::USER && user_values.size() != d)
    throw std::invalid_argument("autopilot: need exactly d user values");

  LogBound hbg = sys.goal_height_hint ? *sys.goal_height_hint
                                      : height_of_polys({sys.g}, ctx.bits);
  std::vector<Rat> pool;
  for (const MPoly& fi : sys.f)
    for (const Rat& c : fi.coefficients()) pool.push_back(c);
  if (pool.empty()) pool.push_back(Rat(0));  // no constraints: h = 0

  BoundContext cctx = ctx;
  cctx.d = static_cast<unsigned>(d);

  WitnessPlan plan;
  std::vector<Rat> values;
  for (std::size_t i = 1; i <= d; ++i) {
    LogBound H_prev = ln_enclosure(Rat(height_set_integer(pool)), ctx.bits);
    if (chain != ChainKind::NO_G) H_prev = H_prev.add(hbg);
    LogBound thr(Rat(0));
    switch (chain) {
      case ChainKind::WEAK:
        thr = genericity_threshold_weak(cctx, H_prev, static_cast<unsigned>(i));
        break;
      case ChainKind::MAIN:
        thr = genericity_threshold_main(cctx, H_prev);
        break;
      case ChainKind::NO_G:
        thr = genericity_threshold_no_g(cctx, H_prev);
        break;
    }
    std::optional<Rat> uv;
    if (style == FreeStyle::USER) uv = user_values[i - 1];
    FreeCoordinate fc;
    try {
      fc = choose_free_coordinate(thr, place, style, uv);
    } catch (const std::domain_error& e) {
      throw std::domain_error("autopilot: free coordinate " + std::to_string(i) + ": " +
                              e.what());
    }
    plan.thresholds.push_back(thr);
    plan.heights.push_back(fc.height);
    values.push_back(fc.value);
    pool.push_back(fc.value);
    plan.witness.free.push_back(fc);
  }
  plan.H_no_g = ln_enclosure(Rat(height_set_integer(pool)), ctx.bits);
  plan.H_with_g = plan.H_no_g.add(hbg);

  if (d < sys.n() && sys.recipe.empty())
    throw std::invalid_argument("autopilot: system has dependent coordinates but no recipe");
  Witness w = solve_fiber(sys, values, sys.recipe, place, precision);
  w.free = plan.witness.free;  // keep the chooser's exact heights / k
  plan.witness = std::move(w);
  return plan;
}

}  // namespace pbe
