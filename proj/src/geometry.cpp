#include "pbe/geometry.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace pbe {

namespace {

// ---------------------------------------------------------------------------
// Object parameter layout
// ---------------------------------------------------------------------------

const char* kind_name(GeoObject::Kind k) {
  switch (k) {
    case GeoObject::Kind::POINT: return "point";
    case GeoObject::Kind::LINE: return "line";
    case GeoObject::Kind::CIRCLE: return "circle";
    case GeoObject::Kind::CONIC: return "conic";
  }
  return "?";
}

std::vector<std::string> param_suffixes(GeoObject::Kind k) {
  switch (k) {
    case GeoObject::Kind::POINT: return {"x", "y"};
    case GeoObject::Kind::LINE: return {"a", "b"};
    case GeoObject::Kind::CIRCLE: return {"a", "b", "r"};
    case GeoObject::Kind::CONIC: return {"a", "b", "c", "d", "e"};
  }
  return {};
}

[[noreturn]] void fail(int line, const std::string& msg) {
  throw std::runtime_error("line " + std::to_string(line) + ": " + msg);
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// ---------------------------------------------------------------------------
// Compilation environment: the full coordinate list (free-object parameters
// in declaration order, then one dummy per forbid) and object lookup.
// ---------------------------------------------------------------------------

struct Env {
  const std::vector<GeoObject>* objects = nullptr;
  std::vector<std::string> coords;           // dotted names + dummy names
  std::map<std::string, size_t> coord_index; // dotted name -> variable index
  size_t n_dummies = 0;

  const GeoObject* find(const std::string& name) const {
    for (const GeoObject& o : *objects)
      if (o.name == name) return &o;
    return nullptr;
  }

  // object parameter j as a polynomial (variable or constant)
  MPoly param(const GeoObject& o, size_t j, int line) const {
    if (o.is_const) return MPoly::constant(coords, o.const_params.at(j));
    std::string dotted = o.name + "." + param_suffixes(o.kind).at(j);
    auto it = coord_index.find(dotted);
    if (it == coord_index.end()) fail(line, "unknown coordinate " + dotted);
    return MPoly::variable(coords, it->second);
  }
};

Env make_env(const GeoProgram& prog) {
  Env env;
  env.objects = &prog.objects;
  for (const GeoObject& o : prog.objects) {
    if (o.is_const) continue;
    for (const std::string& s : param_suffixes(o.kind))
      env.coords.push_back(o.name + "." + s);
  }
  env.n_dummies = prog.forbids.size();
  for (size_t j = 1; j <= env.n_dummies; ++j)
    env.coords.push_back("_u" + std::to_string(j));
  for (size_t i = 0; i < env.coords.size(); ++i) env.coord_index[env.coords[i]] = i;
  return env;
}

// ---------------------------------------------------------------------------
// Expression parser: the polynomial grammar over dotted coordinates, with
// vector sugar (point names are 2-vectors, +/- on vectors, dot(U, V)).
// Every value carries the structural height hint: scalar sums contribute
// hint(l) + hint(r) + ln 2, every other node the exact height of its
// expanded polynomial (so products of small factors stay small, exactly the
// bookkeeping used for goal heights).
// ---------------------------------------------------------------------------

const LogBound& LN2() {
  static const LogBound v = ln_enclosure_ui(2, 96);
  return v;
}

struct Val {
  bool vec = false;
  MPoly x, y;                  // y unused for scalars
  LogBound hx = LogBound(Rat(0)), hy = LogBound(Rat(0));
};

struct ExprParser {
  const std::string& s;
  size_t i = 0;
  const Env& env;
  int line;

  ExprParser(const std::string& text, const Env& e, int ln)
      : s(text), env(e), line(ln) {}

  void skip() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool eat(char c) {
    skip();
    if (i < s.size() && s[i] == c) { ++i; return true; }
    return false;
  }
  void expect(char c) {
    if (!eat(c)) fail(line, std::string("expected '") + c + "' in expression");
  }

  std::string name() {
    skip();
    size_t a = i;
    while (i < s.size() &&
           (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_'))
      ++i;
    if (a == i) fail(line, "expected a name in expression");
    return s.substr(a, i - a);
  }

  Val scalar(MPoly p) const {
    Val v;
    v.x = std::move(p);
    v.hx = height_of_polys({v.x});
    return v;
  }

  Val parse_expr() {
    skip();
    bool neg = eat('-');
    Val acc = parse_term();
    if (neg) { acc.x = -acc.x; if (acc.vec) acc.y = -acc.y; }
    for (;;) {
      skip();
      if (i >= s.size() || (s[i] != '+' && s[i] != '-')) break;
      bool minus = s[i] == '-';
      ++i;
      Val r = parse_term();
      if (acc.vec != r.vec) fail(line, "cannot add a vector and a scalar");
      acc.x = minus ? acc.x - r.x : acc.x + r.x;
      acc.hx = acc.hx.add(r.hx).add(LN2());
      if (acc.vec) {
        acc.y = minus ? acc.y - r.y : acc.y + r.y;
        acc.hy = acc.hy.add(r.hy).add(LN2());
      }
    }
    return acc;
  }

  Val parse_term() {
    Val acc = parse_factor();
    for (;;) {
      skip();
      if (i >= s.size() || s[i] != '*') break;
      ++i;
      Val r = parse_factor();
      if (acc.vec || r.vec) fail(line, "'*' needs scalars (use dot for vectors)");
      acc = scalar(acc.x * r.x);  // exact height of the expanded product
    }
    return acc;
  }

  Val parse_factor() {
    Val base = parse_base();
    skip();
    if (i < s.size() && s[i] == '^') {
      ++i;
      skip();
      size_t a = i;
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      if (a == i) fail(line, "expected an exponent after '^'");
      unsigned e = static_cast<unsigned>(std::stoul(s.substr(a, i - a)));
      if (base.vec) fail(line, "cannot raise a vector to a power");
      base = scalar(base.x.pow(e));
    }
    return base;
  }

  Val parse_base() {
    skip();
    if (i >= s.size()) fail(line, "unexpected end of expression");
    char c = s[i];
    if (c == '(') {
      ++i;
      Val v = parse_expr();
      expect(')');
      if (!v.vec) return scalar(v.x);  // re-anchor the hint? no: keep sum hints
      return v;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t a = i;
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      Int num(s.substr(a, i - a));
      Rat q(num);
      if (i < s.size() && s[i] == '/') {
        size_t save = i++;
        size_t b = i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        if (b == i) { i = save; } else {
          Int den(s.substr(b, i - b));
          if (den == 0) fail(line, "division by zero in rational literal");
          q = Rat(num, den);
          q.canonicalize();
        }
      }
      return scalar(MPoly::constant(env.coords, q));
    }
    std::string id = name();
    if (id == "dot") {
      expect('(');
      Val u = parse_expr();
      expect(',');
      Val v = parse_expr();
      expect(')');
      if (!u.vec || !v.vec) fail(line, "dot() needs two vectors");
      MPoly p1 = u.x * v.x, p2 = u.y * v.y;
      Val r;
      r.x = p1 + p2;
      r.hx = height_of_polys({p1}).add(height_of_polys({p2})).add(LN2());
      return r;
    }
    const GeoObject* o = env.find(id);
    if (!o) fail(line, "unknown object '" + id + "'");
    if (eat('.')) {
      std::string suf = name();
      auto sufs = param_suffixes(o->kind);
      auto it = std::find(sufs.begin(), sufs.end(), suf);
      if (it == sufs.end())
        fail(line, "object '" + id + "' (" + kind_name(o->kind) +
                       ") has no coordinate '." + suf + "'");
      return scalar(env.param(*o, static_cast<size_t>(it - sufs.begin()), line));
    }
    if (o->kind != GeoObject::Kind::POINT)
      fail(line, "'" + id + "' is not a point; use a dotted coordinate");
    Val v;
    v.vec = true;
    v.x = env.param(*o, 0, line);
    v.y = env.param(*o, 1, line);
    v.hx = height_of_polys({v.x});
    v.hy = height_of_polys({v.y});
    return v;
  }
};

// Parse a full polyexpr (must consume everything); returns poly + hint.
std::pair<MPoly, LogBound> parse_polyexpr(const std::string& text, const Env& env,
                                          int line) {
  ExprParser p(text, env, line);
  Val v = p.parse_expr();
  p.skip();
  if (p.i != text.size()) fail(line, "trailing input in expression: '" +
                                         text.substr(p.i) + "'");
  if (v.vec) fail(line, "expression must be a scalar");
  return {v.x, v.hx};
}

// strip a trailing "= 0" (required for raw requirements/forbids/goals)
std::string strip_eq_zero(const std::string& text, int line) {
  size_t eq = text.rfind('=');
  if (eq == std::string::npos || trim(text.substr(eq + 1)) != "0")
    fail(line, "expected '<polyexpr> = 0'");
  return trim(text.substr(0, eq));
}

// ---------------------------------------------------------------------------
// Builtin constraints
// ---------------------------------------------------------------------------

const std::set<std::string> kBuiltins = {
    "on_line", "on_circle", "on_conic",  "parallel",
    "tangent", "angle_eq",  "distinct", "perpendicular"};

// "head(a, b, ...)" -> (head, args); empty head when not of that shape
std::pair<std::string, std::vector<std::string>> split_call(const std::string& text) {
  size_t p = text.find('(');
  if (p == std::string::npos || text.back() != ')') return {"", {}};
  std::string head = trim(text.substr(0, p));
  if (!kBuiltins.count(head)) return {"", {}};
  std::vector<std::string> args;
  int depth = 0;
  std::string cur;
  for (size_t i = p + 1; i + 1 < text.size(); ++i) {
    char c = text[i];
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      args.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  args.push_back(trim(cur));
  return {head, args};
}

const GeoObject& arg_object(const Env& env, const std::string& name,
                            GeoObject::Kind want, int line) {
  const GeoObject* o = env.find(name);
  if (!o) fail(line, "unknown object '" + name + "'");
  if (o->kind != want)
    fail(line, "'" + name + "' must be a " + kind_name(want) + ", got " +
                   kind_name(o->kind));
  return *o;
}

MPoly compile_builtin(const Env& env, const std::string& head,
                      const std::vector<std::string>& args, int line) {
  auto P = [&](size_t i) { return arg_object(env, args.at(i), GeoObject::Kind::POINT, line); };
  auto L = [&](size_t i) { return arg_object(env, args.at(i), GeoObject::Kind::LINE, line); };
  auto need = [&](size_t k) {
    if (args.size() != k)
      fail(line, head + " takes " + std::to_string(k) + " arguments");
  };
  if (head == "on_line") {
    need(2);
    const GeoObject &p = P(0), &l = L(1);
    // y - (a x + b)
    return env.param(p, 1, line) - env.param(l, 0, line) * env.param(p, 0, line) -
           env.param(l, 1, line);
  }
  if (head == "on_circle") {
    need(2);
    const GeoObject& p = P(0);
    const GeoObject& k = arg_object(env, args[1], GeoObject::Kind::CIRCLE, line);
    MPoly dx = env.param(p, 0, line) - env.param(k, 0, line);
    MPoly dy = env.param(p, 1, line) - env.param(k, 1, line);
    MPoly r = env.param(k, 2, line);
    return dx * dx + dy * dy - r * r;
  }
  if (head == "on_conic") {
    need(2);
    const GeoObject& p = P(0);
    const GeoObject& c = arg_object(env, args[1], GeoObject::Kind::CONIC, line);
    MPoly x = env.param(p, 0, line), y = env.param(p, 1, line);
    return env.param(c, 0, line) * x * x + env.param(c, 1, line) * x * y +
           env.param(c, 2, line) * y * y + env.param(c, 3, line) * x +
           env.param(c, 4, line) * y + MPoly::constant(env.coords, Rat(1));
  }
  if (head == "parallel") {
    need(2);
    return env.param(L(0), 0, line) - env.param(L(1), 0, line);
  }
  if (head == "perpendicular") {
    need(2);
    return env.param(L(0), 0, line) * env.param(L(1), 0, line) +
           MPoly::constant(env.coords, Rat(1));
  }
  if (head == "tangent") {
    need(2);
    const GeoObject& l = L(0);
    const GeoObject& k = arg_object(env, args[1], GeoObject::Kind::CIRCLE, line);
    // (k.b - l.a k.a - l.b)^2 = k.r^2 (1 + l.a^2): squared point-line distance
    MPoly a = env.param(l, 0, line), b = env.param(l, 1, line);
    MPoly num = env.param(k, 1, line) - a * env.param(k, 0, line) - b;
    MPoly r = env.param(k, 2, line);
    return num * num - r * r * (MPoly::constant(env.coords, Rat(1)) + a * a);
  }
  if (head == "angle_eq") {
    need(4);
    // (a2-a1)(1+a3 a4) - (a4-a3)(1+a1 a2), slopes a_i
    MPoly a1 = env.param(L(0), 0, line), a2 = env.param(L(1), 0, line);
    MPoly a3 = env.param(L(2), 0, line), a4 = env.param(L(3), 0, line);
    MPoly one = MPoly::constant(env.coords, Rat(1));
    return (a2 - a1) * (one + a3 * a4) - (a4 - a3) * (one + a1 * a2);
  }
  if (head == "distinct") {
    need(2);
    // vanishes (over R) iff the points coincide; used under forbid
    MPoly dx = env.param(P(0), 0, line) - env.param(P(1), 0, line);
    MPoly dy = env.param(P(0), 1, line) - env.param(P(1), 1, line);
    return dx * dx + dy * dy;
  }
  fail(line, "unknown builtin '" + head + "'");
}

MPoly compile_requirement(const Env& env, const std::string& text, int line) {
  auto [head, args] = split_call(text);
  if (!head.empty()) {
    if (head == "distinct") fail(line, "distinct(...) belongs under forbid");
    return compile_builtin(env, head, args, line);
  }
  return parse_polyexpr(strip_eq_zero(text, line), env, line).first;
}

MPoly compile_forbid(const Env& env, const std::string& text, int line) {
  auto [head, args] = split_call(text);
  if (!head.empty()) return compile_builtin(env, head, args, line);
  // raw forbids are stored with the "= 0" already stripped
  return parse_polyexpr(text, env, line).first;
}

// ---------------------------------------------------------------------------
// Triangular recipe detection
// ---------------------------------------------------------------------------

// coefficient polynomials of v^2, v^1, v^0; nullopt if deg_v > 2
std::optional<std::array<MPoly, 3>> coeffs_in(const MPoly& p, size_t v) {
  std::array<MPoly, 3> c = {MPoly(p.vars()), MPoly(p.vars()), MPoly(p.vars())};
  for (const auto& [e, coef] : p.terms()) {
    if (e[v] > 2) return std::nullopt;
    std::vector<unsigned> rest = e;
    rest[v] = 0;
    c[e[v]].add_term(rest, coef);
  }
  return c;
}

struct ProtoStep {
  size_t target;     // coordinate index (source order)
  RecipeStep step;   // polynomials still over the source coordinate order
};

}  // namespace

// ---------------------------------------------------------------------------
// parse_geo
// ---------------------------------------------------------------------------

GeoProgram parse_geo(const std::string& text) {
  GeoProgram prog;
  std::istringstream in(text);
  std::string raw;
  int ln = 0;
  bool saw_goal = false;
  while (std::getline(in, raw)) {
    ++ln;
    std::string stripped = raw.substr(0, raw.find('#'));
    std::string t = trim(stripped);
    if (t.empty()) continue;
    std::istringstream ls(t);
    std::string kw;
    ls >> kw;
    std::string rest = trim(t.substr(kw.size()));
    if (kw == "const" || kw == "free") {
      GeoObject o;
      o.is_const = (kw == "const");
      char sep = o.is_const ? '=' : ':';
      size_t p = rest.find(sep);
      if (p == std::string::npos)
        fail(ln, std::string("expected '") + sep + "' in " + kw + " declaration");
      o.name = trim(rest.substr(0, p));
      if (o.name.empty() ||
          !(std::isalpha(static_cast<unsigned char>(o.name[0])) || o.name[0] == '_'))
        fail(ln, "invalid object name '" + o.name + "'");
      for (char c : o.name)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_')
          fail(ln, "invalid object name '" + o.name + "'");
      for (const GeoObject& prev : prog.objects)
        if (prev.name == o.name) fail(ln, "duplicate name '" + o.name + "'");
      std::string spec = trim(rest.substr(p + 1));
      if (o.is_const) {
        auto [head, args] = std::pair<std::string, std::vector<std::string>>{};
        size_t lp = spec.find('(');
        if (lp == std::string::npos || spec.back() != ')')
          fail(ln, "expected point(..)/line(..)/circle(..)");
        head = trim(spec.substr(0, lp));
        std::string inner = spec.substr(lp + 1, spec.size() - lp - 2);
        std::istringstream as(inner);
        std::string piece;
        while (std::getline(as, piece, ',')) args.push_back(trim(piece));
        size_t want = 0;
        if (head == "point") { o.kind = GeoObject::Kind::POINT; want = 2; }
        else if (head == "line") { o.kind = GeoObject::Kind::LINE; want = 2; }
        else if (head == "circle") { o.kind = GeoObject::Kind::CIRCLE; want = 3; }
        else fail(ln, "const objects must be point/line/circle, got '" + head + "'");
        if (args.size() != want)
          fail(ln, head + " takes " + std::to_string(want) + " parameters");
        for (const std::string& a : args) {
          try {
            o.const_params.push_back(rat_from_string(a));
          } catch (const std::exception&) {
            fail(ln, "invalid rational '" + a + "'");
          }
        }
      } else {
        if (spec == "point") o.kind = GeoObject::Kind::POINT;
        else if (spec == "line") o.kind = GeoObject::Kind::LINE;
        else if (spec == "circle") o.kind = GeoObject::Kind::CIRCLE;
        else if (spec == "conic") o.kind = GeoObject::Kind::CONIC;
        else fail(ln, "unknown free object kind '" + spec + "'");
      }
      prog.objects.push_back(std::move(o));
    } else if (kw == "require") {
      prog.requirements.push_back(rest);
    } else if (kw == "forbid") {
      auto [head, args] = split_call(rest);
      prog.forbids.push_back(head.empty() ? strip_eq_zero(rest, ln) : rest);
    } else if (kw == "goal") {
      if (saw_goal) fail(ln, "duplicate goal");
      saw_goal = true;
      prog.goal = strip_eq_zero(rest, ln);
    } else if (kw == "assume") {
      std::istringstream as(rest);
      std::string what;
      as >> what;
      if (what == "irreducible") {
        prog.assume_irreducible = true;
      } else if (what == "dim") {
        long d = -1;
        as >> d;
        if (d < 0) fail(ln, "expected 'assume dim <d>'");
        prog.assume_dim = static_cast<unsigned>(d);
      } else {
        fail(ln, "unknown assumption '" + what + "'");
      }
    } else {
      fail(ln, "unknown directive '" + kw + "'");
    }
  }
  // semantic validation: every constraint/goal must compile
  Env env = make_env(prog);
  int pseudo = 0;
  for (const std::string& r : prog.requirements) compile_requirement(env, r, ++pseudo);
  for (const std::string& f : prog.forbids) compile_forbid(env, f, ++pseudo);
  if (!prog.goal.empty()) parse_polyexpr(prog.goal, env, ++pseudo);
  return prog;
}

std::string GeoProgram::to_source() const {
  std::ostringstream out;
  auto rat = [](const Rat& q) {
    return q.get_den() == 1 ? q.get_num().get_str() : rat_to_string(q);
  };
  for (const GeoObject& o : objects) {
    if (o.is_const) {
      out << "const " << o.name << " = " << kind_name(o.kind) << "(";
      for (size_t j = 0; j < o.const_params.size(); ++j)
        out << (j ? ", " : "") << rat(o.const_params[j]);
      out << ")\n";
    } else {
      out << "free " << o.name << " : " << kind_name(o.kind) << "\n";
    }
  }
  for (const std::string& r : requirements) out << "require " << r << "\n";
  for (const std::string& f : forbids) {
    out << "forbid " << f;
    if (split_call(f).first.empty()) out << " = 0";
    out << "\n";
  }
  if (!goal.empty()) out << "goal " << goal << " = 0\n";
  if (assume_irreducible) out << "assume irreducible\n";
  if (assume_dim) out << "assume dim " << *assume_dim << "\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// compile
// ---------------------------------------------------------------------------

CompiledSystem compile(const GeoProgram& prog) {
  Env env = make_env(prog);
  const size_t n_free_params = env.coords.size() - env.n_dummies;

  std::vector<MPoly> req_polys, forbid_polys;
  int pseudo = 0;
  for (const std::string& r : prog.requirements)
    req_polys.push_back(compile_requirement(env, r, ++pseudo));
  for (const std::string& f : prog.forbids)
    forbid_polys.push_back(compile_forbid(env, f, ++pseudo));

  MPoly goal = MPoly::zero(env.coords);
  LogBound goal_hint = LogBound(Rat(0));
  if (!prog.goal.empty())
    std::tie(goal, goal_hint) = parse_polyexpr(prog.goal, env, ++pseudo);

  // greedy triangular recipe: each requirement solves its latest-declared
  // unsolved coordinate, linearly or as a pure square
  bool recipe_ok = true;
  std::vector<ProtoStep> steps;
  std::set<size_t> targeted;
  for (const MPoly& p : req_polys) {
    std::vector<size_t> cands;
    for (size_t v = 0; v < n_free_params; ++v)
      if (p.var_degree(v) > 0 && !targeted.count(v)) cands.push_back(v);
    std::sort(cands.rbegin(), cands.rend());  // latest declaration first
    bool solved = false;
    for (size_t v : cands) {
      auto c = coeffs_in(p, v);
      if (!c) continue;
      ProtoStep ps;
      ps.target = v;
      if (!(*c)[2].is_zero()) {
        if (!(*c)[2].is_constant() || !(*c)[1].is_zero()) continue;
        Rat lead = (*c)[2].terms().begin()->second;
        ps.step.kind = RecipeStep::Kind::QUADRATIC;
        ps.step.quad_rhs = (*c)[0].scaled(Rat(-1) / lead);
        ps.step.branch = 1;
      } else if (!(*c)[1].is_zero()) {
        ps.step.kind = RecipeStep::Kind::LINEAR;
        ps.step.lin_a = (*c)[1];
        ps.step.lin_b = (*c)[0];
      } else {
        continue;
      }
      targeted.insert(v);
      steps.push_back(std::move(ps));
      solved = true;
      break;
    }
    if (!solved) {
      recipe_ok = false;
      break;
    }
  }

  // triangularity: every step may only reference free or earlier-solved coords
  if (recipe_ok) {
    std::set<size_t> avail;
    for (size_t v = 0; v < n_free_params; ++v)
      if (!targeted.count(v)) avail.insert(v);
    for (const ProtoStep& ps : steps) {
      for (const MPoly* q :
           {&ps.step.lin_a, &ps.step.lin_b, &ps.step.quad_rhs}) {
        for (size_t v = 0; v < n_free_params; ++v)
          if (q->var_degree(v) > 0 && !avail.count(v) && v != ps.target)
            recipe_ok = false;
      }
      avail.insert(ps.target);
    }
  }

  // final variable order: free parameters, then solved targets in step order,
  // then the Rabinowitsch dummies
  std::vector<size_t> order;  // new position -> old index
  if (recipe_ok) {
    for (size_t v = 0; v < n_free_params; ++v)
      if (!targeted.count(v)) order.push_back(v);
    for (const ProtoStep& ps : steps) order.push_back(ps.target);
  } else {
    for (size_t v = 0; v < n_free_params; ++v) order.push_back(v);
  }
  for (size_t j = 0; j < env.n_dummies; ++j) order.push_back(n_free_params + j);

  std::vector<size_t> newpos(order.size());
  for (size_t i = 0; i < order.size(); ++i) newpos[order[i]] = i;

  CompiledSystem cs;
  cs.n_f = static_cast<unsigned>(n_free_params);
  cs.n_e = static_cast<unsigned>(req_polys.size());
  cs.n_i = static_cast<unsigned>(forbid_polys.size());
  const size_t n = env.coords.size();
  std::vector<std::string> vars;
  for (size_t i = 0; i < n; ++i) vars.push_back("x" + std::to_string(i + 1));
  for (size_t i = 0; i < n; ++i) cs.coord_names.push_back(env.coords[order[i]]);

  auto remap = [&](const MPoly& p) {
    MPoly out(vars);
    for (const auto& [e, c] : p.terms()) {
      std::vector<unsigned> ne(n, 0);
      for (size_t v = 0; v < n; ++v) ne[newpos[v]] = e[v];
      out.add_term(ne, c);
    }
    return out;
  };

  cs.system.vars = vars;
  for (const MPoly& p : req_polys) cs.system.f.push_back(remap(p));
  for (size_t j = 0; j < forbid_polys.size(); ++j) {
    // 1 + u_j * f
    MPoly dummy = MPoly::variable(env.coords, n_free_params + j);
    cs.system.f.push_back(
        remap(MPoly::constant(env.coords, Rat(1)) + dummy * forbid_polys[j]));
  }
  cs.system.g = remap(goal);
  if (!prog.goal.empty()) cs.system.goal_height_hint = goal_hint;
  cs.system.irreducible = prog.assume_irreducible;

  const long m = static_cast<long>(cs.system.f.size());
  cs.d_guess = static_cast<int>(static_cast<long>(n) - m);
  cs.system.dim = prog.assume_dim
                      ? *prog.assume_dim
                      : static_cast<unsigned>(std::max(0, cs.d_guess));

  if (recipe_ok) {
    for (const ProtoStep& ps : steps) {
      RecipeStep s = ps.step;
      s.targets = {newpos[ps.target]};
      if (s.kind == RecipeStep::Kind::LINEAR) {
        s.lin_a = remap(s.lin_a);
        s.lin_b = remap(s.lin_b);
      } else {
        s.quad_rhs = remap(s.quad_rhs);
      }
      cs.system.recipe.steps.push_back(std::move(s));
    }
    for (size_t j = 0; j < forbid_polys.size(); ++j) {
      RecipeStep s;
      s.kind = RecipeStep::Kind::RABINOWITSCH_INVERSE;
      s.targets = {newpos[n_free_params + j]};
      s.rab_denom = remap(forbid_polys[j]);
      cs.system.recipe.steps.push_back(std::move(s));
    }
  }

  cs.system.validate();
  return cs;
}

}  // namespace pbe
