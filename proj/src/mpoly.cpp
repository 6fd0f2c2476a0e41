#include "pbe/mpoly.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <sstream>

namespace pbe {

// ---------------------------------------------------------------------------
// Construction / basics
// ---------------------------------------------------------------------------

MPoly MPoly::constant(std::vector<std::string> vars, const Rat& c) {
  MPoly p(std::move(vars));
  p.add_term(std::vector<unsigned>(p.nvars(), 0), c);
  return p;
}

MPoly MPoly::variable(std::vector<std::string> vars, std::size_t index) {
  MPoly p(std::move(vars));
  if (index >= p.nvars()) throw std::out_of_range("MPoly::variable: index");
  std::vector<unsigned> e(p.nvars(), 0);
  e[index] = 1;
  p.add_term(e, Rat(1));
  return p;
}

void MPoly::add_term(const std::vector<unsigned>& exps, const Rat& coeff) {
  if (exps.size() != nvars()) throw std::invalid_argument("MPoly::add_term: arity");
  if (sgn(coeff) == 0) return;
  auto it = terms_.find(exps);
  if (it == terms_.end()) {
    Rat c = coeff;
    c.canonicalize();
    terms_.emplace(exps, std::move(c));
  } else {
    it->second += coeff;
    it->second.canonicalize();
    if (sgn(it->second) == 0) terms_.erase(it);
  }
}

bool MPoly::is_constant() const {
  if (terms_.empty()) return true;
  if (terms_.size() != 1) return false;
  const auto& e = terms_.begin()->first;
  return std::all_of(e.begin(), e.end(), [](unsigned x) { return x == 0; });
}

std::optional<unsigned> MPoly::total_degree() const {
  if (terms_.empty()) return std::nullopt;
  unsigned best = 0;
  for (const auto& [e, c] : terms_) {
    unsigned s = std::accumulate(e.begin(), e.end(), 0u);
    best = std::max(best, s);
  }
  return best;
}

unsigned MPoly::var_degree(std::size_t i) const {
  unsigned best = 0;
  for (const auto& [e, c] : terms_) best = std::max(best, e[i]);
  return best;
}

// ---------------------------------------------------------------------------
// Arithmetic
// ---------------------------------------------------------------------------

namespace {
void require_same_vars(const MPoly& a, const MPoly& b) {
  if (a.vars() != b.vars())
    throw std::invalid_argument("MPoly: operands over different variable lists");
}
}  // namespace

MPoly MPoly::operator+(const MPoly& o) const {
  require_same_vars(*this, o);
  MPoly r = *this;
  for (const auto& [e, c] : o.terms_) r.add_term(e, c);
  return r;
}

MPoly MPoly::operator-(const MPoly& o) const { return *this + (-o); }

MPoly MPoly::operator-() const {
  MPoly r(vars_);
  for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
  return r;
}

MPoly MPoly::operator*(const MPoly& o) const {
  require_same_vars(*this, o);
  MPoly r(vars_);
  for (const auto& [ea, ca] : terms_) {
    for (const auto& [eb, cb] : o.terms_) {
      std::vector<unsigned> e(nvars());
      for (std::size_t i = 0; i < nvars(); ++i) e[i] = ea[i] + eb[i];
      r.add_term(e, ca * cb);
    }
  }
  return r;
}

MPoly MPoly::scaled(const Rat& c) const {
  MPoly r(vars_);
  if (sgn(c) == 0) return r;
  for (const auto& [e, cc] : terms_) {
    Rat v = cc * c;
    v.canonicalize();
    r.terms_.emplace(e, std::move(v));
  }
  return r;
}

MPoly MPoly::pow(unsigned e) const {
  MPoly r = MPoly::constant(vars_, Rat(1));
  MPoly base = *this;
  while (e > 0) {
    if (e & 1u) r = r * base;
    e >>= 1u;
    if (e > 0) base = base * base;
  }
  return r;
}

MPoly MPoly::partial_derivative(std::size_t var) const {
  if (var >= nvars()) throw std::out_of_range("partial_derivative: variable index");
  MPoly r(vars_);
  for (const auto& [e, c] : terms_) {
    if (e[var] == 0) continue;
    std::vector<unsigned> e2 = e;
    e2[var] -= 1;
    r.add_term(e2, c * Rat(static_cast<long>(e[var])));
  }
  return r;
}

std::vector<MPoly> MPoly::gradient() const {
  std::vector<MPoly> g;
  g.reserve(nvars());
  for (std::size_t i = 0; i < nvars(); ++i) g.push_back(partial_derivative(i));
  return g;
}

Rat MPoly::eval_exact(const std::vector<Rat>& point) const {
  if (point.size() != nvars()) throw std::invalid_argument("eval_exact: arity");
  Rat acc(0);
  for (const auto& [e, c] : terms_) {
    Rat t = c;
    for (std::size_t i = 0; i < nvars(); ++i) {
      if (e[i] == 0) continue;
      Rat p = point[i];
      Rat pw(1);
      unsigned k = e[i];
      while (k > 0) {
        if (k & 1u) pw *= p;
        k >>= 1u;
        if (k > 0) p *= p;
      }
      t *= pw;
    }
    acc += t;
  }
  acc.canonicalize();
  return acc;
}

std::vector<Rat> MPoly::coefficients() const {
  std::vector<Rat> out;
  out.reserve(terms_.size());
  for (const auto& [e, c] : terms_) out.push_back(c);
  return out;
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

std::string MPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    // coefficient (always printed: keeps the printer trivially re-parsable)
    os << c.get_num().get_str();
    if (c.get_den() != 1) os << "/" << c.get_den().get_str();
    for (std::size_t i = 0; i < nvars(); ++i) {
      if (e[i] == 0) continue;
      os << "*" << vars_[i];
      if (e[i] > 1) os << "^" << e[i];
    }
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

struct Parser {
  const std::string& s;
  const std::vector<std::string>& vars;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw std::runtime_error("polynomial parse error at position " +
                             std::to_string(pos) + ": " + what);
  }
  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool peek(char c) {
    skip_ws();
    return pos < s.size() && s[pos] == c;
  }
  bool accept(char c) {
    if (peek(c)) {
      ++pos;
      return true;
    }
    return false;
  }

  std::string read_uint_digits() {
    skip_ws();
    std::size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos == start) fail("expected digits");
    return s.substr(start, pos - start);
  }

  unsigned read_uint() {
    std::string d = read_uint_digits();
    if (d.size() > 9) fail("exponent too large");
    return static_cast<unsigned>(std::stoul(d));
  }

  MPoly parse_expr() {
    skip_ws();
    bool neg = accept('-');
    MPoly acc = parse_term();
    if (neg) acc = -acc;
    for (;;) {
      if (accept('+')) {
        acc = acc + parse_term();
      } else if (accept('-')) {
        acc = acc - parse_term();
      } else {
        break;
      }
    }
    return acc;
  }

  MPoly parse_term() {
    MPoly acc = parse_factor();
    while (accept('*')) acc = acc * parse_factor();
    return acc;
  }

  MPoly parse_factor() {
    MPoly base = parse_base();
    if (accept('^')) return base.pow(read_uint());
    return base;
  }

  MPoly parse_base() {
    skip_ws();
    if (pos >= s.size()) fail("unexpected end of input");
    char c = s[pos];
    if (c == '(') {
      ++pos;
      MPoly e = parse_expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-') {
      bool neg = (c == '-');
      if (neg) ++pos;
      Int num(read_uint_digits());
      Rat q(num);
      if (accept('/')) {
        Int den(read_uint_digits());
        if (den == 0) fail("zero denominator");
        q = Rat(num, den);
        q.canonicalize();
      }
      if (neg) q = -q;
      return MPoly::constant(vars, q);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos;
      while (pos < s.size() &&
             (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_' ||
              s[pos] == '.'))
        ++pos;
      std::string name = s.substr(start, pos - start);
      auto it = std::find(vars.begin(), vars.end(), name);
      if (it == vars.end()) {
        pos = start;
        fail("unknown variable '" + name + "'");
      }
      return MPoly::variable(vars, static_cast<std::size_t>(it - vars.begin()));
    }
    fail(std::string("unexpected character '") + c + "'");
  }
};

}  // namespace

MPoly parse_poly(const std::string& text, const std::vector<std::string>& vars) {
  Parser p{text, vars};
  MPoly r = p.parse_expr();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing input");
  return r;
}

// ---------------------------------------------------------------------------
// Heights
// ---------------------------------------------------------------------------

Int height_set_integer(const std::vector<Rat>& elements) {
  if (elements.empty()) throw std::invalid_argument("height_of_set: empty set");
  Int b(1);
  for (const Rat& a : elements) {
    Rat r = a;
    r.canonicalize();
    mpz_lcm(b.get_mpz_t(), b.get_mpz_t(), r.get_den().get_mpz_t());
  }
  Int M = b;  // |b| itself participates in the max
  for (const Rat& a : elements) {
    Rat r = a;
    r.canonicalize();
    Int v = b / r.get_den() * r.get_num();
    mpz_abs(v.get_mpz_t(), v.get_mpz_t());
    if (v > M) M = v;
  }
  return M;
}

LogBound height_of_set(const std::vector<Rat>& elements, unsigned bits) {
  Int M = height_set_integer(elements);
  if (M == 1) return LogBound(Rat(0));
  return ln_enclosure(Rat(M), bits);
}

LogBound height_of_polys(const std::vector<MPoly>& fs, unsigned bits) {
  if (fs.empty()) throw std::invalid_argument("height_of_polys: no polynomials");
  std::vector<Rat> pool;
  for (const MPoly& f : fs)
    for (const Rat& c : f.coefficients()) pool.push_back(c);
  if (pool.empty()) return LogBound(Rat(0));  // all zero: h(0) := 0 convention
  return height_of_set(pool, bits);
}

// ---------------------------------------------------------------------------
// Kronecker substitution
// ---------------------------------------------------------------------------

MPoly clear_denominators(const MPoly& g) {
  Int b(1);
  for (const auto& [e, c] : g.terms())
    mpz_lcm(b.get_mpz_t(), b.get_mpz_t(), c.get_den().get_mpz_t());
  return g.scaled(Rat(b));
}

MPoly kronecker_substitute(const MPoly& g_in) {
  MPoly g = clear_denominators(g_in);
  std::vector<std::string> zvar{"z"};
  MPoly out(zvar);
  if (g.is_zero()) return out;
  unsigned maxdeg = 0;
  for (std::size_t i = 0; i < g.nvars(); ++i) maxdeg = std::max(maxdeg, g.var_degree(i));
  const Int D(static_cast<long>(maxdeg) + 1);
  for (const auto& [e, c] : g.terms()) {
    Int comb(0), pw(1);
    for (std::size_t i = 0; i < g.nvars(); ++i) {
      comb += Int(static_cast<long>(e[i])) * pw;
      pw *= D;
    }
    if (!comb.fits_ulong_p() || comb.get_ui() > 100000000UL)
      throw std::runtime_error("kronecker_substitute: exponent too large");
    out.add_term({static_cast<unsigned>(comb.get_ui())}, c);
  }
  return out;
}

}  // namespace pbe
