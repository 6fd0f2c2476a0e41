#include "pbe/exactnum.hpp"

#include <map>
#include <mutex>
#include <utility>

namespace pbe {

// ---------------------------------------------------------------------------
// Rational helpers
// ---------------------------------------------------------------------------

std::string rat_to_string(const Rat& q) {
  Rat r = q;
  r.canonicalize();
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

Rat rat_from_string(const std::string& s) {
  auto slash = s.find('/');
  Rat q;
  if (slash == std::string::npos) {
    q = Rat(Int(s));
  } else {
    Int num(s.substr(0, slash));
    Int den(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("rational with zero denominator: " + s);
    q = Rat(num, den);
  }
  q.canonicalize();
  return q;
}

// ---------------------------------------------------------------------------
// Dyadic
// ---------------------------------------------------------------------------

void Dyadic::canonicalize() {
  if (mant == 0) {
    exp = 0;
    return;
  }
  unsigned long tz = mpz_scan1(mant.get_mpz_t(), 0);
  if (tz > 0) {
    mpz_fdiv_q_2exp(mant.get_mpz_t(), mant.get_mpz_t(), tz);
    exp += static_cast<long>(tz);
  }
}

Rat Dyadic::to_rational() const {
  Rat q(mant);
  if (exp >= 0) {
    Int sh;
    mpz_mul_2exp(sh.get_mpz_t(), Int(1).get_mpz_t(), static_cast<unsigned long>(exp));
    q *= Rat(sh);
  } else {
    Int sh;
    mpz_mul_2exp(sh.get_mpz_t(), Int(1).get_mpz_t(), static_cast<unsigned long>(-exp));
    q /= Rat(sh);
  }
  q.canonicalize();
  return q;
}

Dyadic Dyadic::from_rational_exact(const Rat& q) {
  Rat r = q;
  r.canonicalize();
  Int den = r.get_den();
  if (den == 0) throw std::invalid_argument("dyadic: zero denominator");
  // den must be a power of two
  unsigned long tz = (den == 1) ? 0 : mpz_scan1(den.get_mpz_t(), 0);
  Int pow2;
  mpz_mul_2exp(pow2.get_mpz_t(), Int(1).get_mpz_t(), tz);
  if (pow2 != den) throw std::invalid_argument("dyadic: denominator not a power of two");
  return Dyadic(r.get_num(), -static_cast<long>(tz));
}

std::string Dyadic::to_string() const {
  return mant.get_str() + "*2^" + std::to_string(exp);
}

Dyadic Dyadic::from_string(const std::string& s) {
  auto pos = s.find("*2^");
  if (pos == std::string::npos) throw std::invalid_argument("dyadic parse: " + s);
  return Dyadic(Int(s.substr(0, pos)), std::stol(s.substr(pos + 3)));
}

// ---------------------------------------------------------------------------
// LogBound
// ---------------------------------------------------------------------------

LogBound::LogBound(Rat lo, Rat hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  lo_.canonicalize();
  hi_.canonicalize();
  if (lo_ > hi_) throw std::invalid_argument("LogBound: lo > hi");
}

LogBound LogBound::neg_infinity() { return LogBound(); }

const Rat& LogBound::lo() const {
  if (neg_inf_) throw std::domain_error("LogBound: endpoint of NEG_INFINITY");
  return lo_;
}

const Rat& LogBound::hi() const {
  if (neg_inf_) throw std::domain_error("LogBound: endpoint of NEG_INFINITY");
  return hi_;
}

LogBound LogBound::refined(unsigned bits) const {
  if (neg_inf_ || !exact_arg_) return *this;
  LogBound r = ln_enclosure(*exact_arg_, bits);
  // Refinement never widens: intersect with the current enclosure.
  if (r.lo_ < lo_) r.lo_ = lo_;
  if (r.hi_ > hi_) r.hi_ = hi_;
  return r;
}

LogBound LogBound::add(const LogBound& o) const {
  if (neg_inf_ || o.neg_inf_) return neg_infinity();
  return LogBound(lo_ + o.lo_, hi_ + o.hi_);
}

LogBound LogBound::neg() const {
  if (neg_inf_) throw std::domain_error("LogBound: negation of NEG_INFINITY");
  return LogBound(-hi_, -lo_);
}

LogBound LogBound::scale(const Rat& c) const {
  if (sgn(c) < 0) throw std::domain_error("LogBound::scale: negative factor");
  if (sgn(c) == 0) return LogBound(Rat(0));
  if (neg_inf_) return neg_infinity();
  return LogBound(lo_ * c, hi_ * c);
}

LogBound LogBound::max(const LogBound& a, const LogBound& b) {
  if (a.neg_inf_) return b;
  if (b.neg_inf_) return a;
  return LogBound(a.lo_ > b.lo_ ? a.lo_ : b.lo_, a.hi_ > b.hi_ ? a.hi_ : b.hi_);
}

LogBound LogBound::div_by_pos(const LogBound& pos) const {
  if (pos.neg_inf_ || sgn(pos.lo()) <= 0)
    throw std::domain_error("LogBound::div_by_pos: divisor not certainly positive");
  if (neg_inf_) return neg_infinity();
  // x/p with p in [plo, phi], plo > 0: candidates are the four endpoint quotients.
  Rat c1 = lo_ / pos.lo(), c2 = lo_ / pos.hi(), c3 = hi_ / pos.lo(), c4 = hi_ / pos.hi();
  Rat lo = std::min(std::min(c1, c2), std::min(c3, c4));
  Rat hi = std::max(std::max(c1, c2), std::max(c3, c4));
  return LogBound(lo, hi);
}

// ---------------------------------------------------------------------------
// Fixed-point atanh series.
//
// Everything is scaled by 2^W.  For x = num/den in [0, 1/2]:
//   atanh(x) = sum_{k>=0} x^(2k+1)/(2k+1),
//   tail after the term with power P ~ x^(2k+1):  <= P * x^2/(1-x^2) <= P.
// Each directed-rounded step widens the bracket by at most 1 ulp, accounted
// for explicitly below.
// ---------------------------------------------------------------------------

namespace {

struct FixPair {
  Int lo, hi;  // bracket of value * 2^W
};

FixPair atanh_fixed(const Int& num, const Int& den, unsigned W) {
  if (num == 0) return {Int(0), Int(0)};
  if (num * 2 > den) throw std::domain_error("atanh_fixed: x > 1/2");
  Int shifted;
  mpz_mul_2exp(shifted.get_mpz_t(), num.get_mpz_t(), W);
  Int plo, phi;
  mpz_fdiv_q(plo.get_mpz_t(), shifted.get_mpz_t(), den.get_mpz_t());
  phi = plo + 1;  // bracket of x * 2^W
  Int n2 = num * num, d2 = den * den;
  Int slo = 0, shi = 0;
  for (unsigned long k = 0;; ++k) {
    Int tlo, thi;
    Int odd(2 * k + 1);
    mpz_fdiv_q(tlo.get_mpz_t(), plo.get_mpz_t(), odd.get_mpz_t());
    mpz_fdiv_q(thi.get_mpz_t(), phi.get_mpz_t(), odd.get_mpz_t());
    slo += tlo;
    shi += thi + 1;
    // advance the power bracket: p *= x^2
    Int t = plo * n2;
    mpz_fdiv_q(plo.get_mpz_t(), t.get_mpz_t(), d2.get_mpz_t());
    t = phi * n2;
    mpz_fdiv_q(phi.get_mpz_t(), t.get_mpz_t(), d2.get_mpz_t());
    phi += 1;
    if (phi <= 2) {
      // tail <= x^(2k+3)/(1-x^2) <= phi * 4/3 ulp for x <= 1/2
      shi += phi + 1;
      break;
    }
    if (k > 8 * W) throw std::logic_error("atanh_fixed: series failed to terminate");
  }
  return {slo, shi};
}

// Cached enclosure of ln2 * 2^W  (ln 2 = 2 * atanh(1/3)).
FixPair ln2_fixed(unsigned W) {
  static std::mutex mu;
  static std::map<unsigned, FixPair> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(W);
  if (it != cache.end()) return it->second;
  FixPair a = atanh_fixed(Int(1), Int(3), W);
  FixPair r{a.lo * 2, a.hi * 2};
  cache[W] = r;
  return r;
}

Rat fix_to_rat(const Int& v, unsigned W) {
  Int den;
  mpz_mul_2exp(den.get_mpz_t(), Int(1).get_mpz_t(), W);
  Rat q(v, den);
  q.canonicalize();
  return q;
}

}  // namespace

LogBound ln_enclosure(const Rat& q_in, unsigned bits) {
  Rat q = q_in;
  q.canonicalize();
  if (sgn(q) <= 0) throw std::domain_error("ln_enclosure: argument must be positive");
  if (bits < 8) bits = 8;
  const unsigned W = bits + 64;

  const Int& a = q.get_num();
  const Int& b = q.get_den();
  // e with 1 <= q / 2^e < 2
  long e = static_cast<long>(mpz_sizeinbase(a.get_mpz_t(), 2)) -
           static_cast<long>(mpz_sizeinbase(b.get_mpz_t(), 2));
  {
    // adjust so that a >= b*2^e and a < b*2^(e+1)
    auto cmp_shift = [&](long ee) {
      // compare q with 2^ee, i.e. a with b*2^ee
      Int lhs = a, rhs = b;
      if (ee >= 0)
        mpz_mul_2exp(rhs.get_mpz_t(), rhs.get_mpz_t(), static_cast<unsigned long>(ee));
      else
        mpz_mul_2exp(lhs.get_mpz_t(), lhs.get_mpz_t(), static_cast<unsigned long>(-ee));
      return cmp(lhs, rhs);
    };
    while (cmp_shift(e) < 0) --e;
    while (cmp_shift(e + 1) >= 0) ++e;
  }
  // r = q / 2^e in [1,2); x = (r-1)/(r+1) = (a - B)/(a + B) with B = b*2^e
  Int numx = a, denx = a;
  {
    Int B = b;
    Int aa = a;
    if (e >= 0)
      mpz_mul_2exp(B.get_mpz_t(), B.get_mpz_t(), static_cast<unsigned long>(e));
    else
      mpz_mul_2exp(aa.get_mpz_t(), aa.get_mpz_t(), static_cast<unsigned long>(-e));
    // scale numerator the same way when e < 0 so that the ratio is preserved
    if (e >= 0) {
      numx = a - B;
      denx = a + B;
    } else {
      numx = aa - b;
      denx = aa + b;
    }
  }
  FixPair s = atanh_fixed(numx, denx, W);  // bracket of atanh(x)*2^W
  FixPair l2 = ln2_fixed(W);
  Int lo_fix, hi_fix;
  if (e >= 0) {
    lo_fix = Int(e) * l2.lo + 2 * s.lo;
    hi_fix = Int(e) * l2.hi + 2 * s.hi;
  } else {
    lo_fix = Int(e) * l2.hi + 2 * s.lo;
    hi_fix = Int(e) * l2.lo + 2 * s.hi;
  }
  LogBound out(fix_to_rat(lo_fix, W), fix_to_rat(hi_fix, W));
  out.exact_arg_ = std::make_shared<const Rat>(q);
  return out;
}

LogBound ln_enclosure_ui(unsigned long k, unsigned bits) {
  return ln_enclosure(Rat(static_cast<long>(k)), bits);
}

// ---------------------------------------------------------------------------
// compare_certain
// ---------------------------------------------------------------------------

namespace {
unsigned g_cap = 512;
}

unsigned log_precision_cap() { return g_cap; }
void set_log_precision_cap(unsigned bits) { g_cap = bits < 8 ? 8 : bits; }

Cmp compare_certain(const LogBound& a_in, const LogBound& b_in) {
  if (a_in.is_neg_inf() && b_in.is_neg_inf()) return Cmp::LE;  // -inf <= -inf
  if (a_in.is_neg_inf()) return Cmp::LE;
  if (b_in.is_neg_inf()) return Cmp::GE;
  LogBound a = a_in, b = b_in;
  for (unsigned bits = 64;; bits *= 2) {
    if (a.hi() <= b.lo()) return Cmp::LE;
    if (a.lo() >= b.hi()) return Cmp::GE;
    if (bits > log_precision_cap()) return Cmp::UNKNOWN;
    bool refinable = (a.exact_ln_arg() != nullptr) || (b.exact_ln_arg() != nullptr);
    if (!refinable) return Cmp::UNKNOWN;
    a = a.refined(bits);
    b = b.refined(bits);
  }
}

}  // namespace pbe
