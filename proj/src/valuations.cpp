#include "pbe/valuations.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cstdlib>

namespace pbe {

// ---------------------------------------------------------------------------
// Place
// ---------------------------------------------------------------------------

Place Place::prime(unsigned long p) {
  if (p < 3 || p % 2 == 0)
    throw std::invalid_argument("Place: p must be an odd prime >= 3 (p = 2 excluded)");
  Int pz(static_cast<long>(p));
  if (mpz_probab_prime_p(pz.get_mpz_t(), 40) == 0)
    throw std::invalid_argument("Place: p is not prime");
  return Place{Kind::PRIME, p};
}

std::string Place::to_string() const {
  return is_archimedean() ? std::string("inf") : std::to_string(p);
}

Place Place::from_string(const std::string& s) {
  if (s == "inf" || s == "infinity" || s == "oo") return infinity();
  return prime(std::stoul(s));
}

// ---------------------------------------------------------------------------
// MPFR helpers (endpoints are exact dyadics; rounding happens per operation)
// ---------------------------------------------------------------------------

namespace {

struct MpfrVal {
  mpfr_t x;
  explicit MpfrVal(long prec) { mpfr_init2(x, std::max(prec, 4L)); }
  ~MpfrVal() { mpfr_clear(x); }
  MpfrVal(const MpfrVal&) = delete;
  MpfrVal& operator=(const MpfrVal&) = delete;
};

// Exact embedding of a dyadic into an mpfr value.
void set_dyadic(mpfr_t out, const Dyadic& d) {
  mpfr_set_z(out, d.mant.get_mpz_t(), MPFR_RNDN);  // exact: precision suffices
  mpfr_mul_2si(out, out, d.exp, MPFR_RNDN);        // exact
}

long dyadic_bits(const Dyadic& d) {
  if (d.mant == 0) return 4;
  return static_cast<long>(mpz_sizeinbase(d.mant.get_mpz_t(), 2)) + 4;
}

Dyadic get_dyadic(const mpfr_t x) {
  if (mpfr_zero_p(x)) return Dyadic();
  Int m;
  mpfr_exp_t e = mpfr_get_z_2exp(m.get_mpz_t(), x);
  return Dyadic(m, static_cast<long>(e));
}

using Bin = int (*)(mpfr_t, const mpfr_t, const mpfr_t, mpfr_rnd_t);

Dyadic dyadic_bin(const Dyadic& a, const Dyadic& b, long prec, mpfr_rnd_t rnd, Bin op) {
  MpfrVal xa(dyadic_bits(a)), xb(dyadic_bits(b)), r(prec);
  set_dyadic(xa.x, a);
  set_dyadic(xb.x, b);
  op(r.x, xa.x, xb.x, rnd);
  return get_dyadic(r.x);
}

Dyadic dyadic_sqrt(const Dyadic& a, long prec, mpfr_rnd_t rnd) {
  MpfrVal xa(dyadic_bits(a)), r(prec);
  set_dyadic(xa.x, a);
  mpfr_sqrt(r.x, xa.x, rnd);
  return get_dyadic(r.x);
}

int dyadic_cmp(const Dyadic& a, const Dyadic& b) {
  return cmp(a.to_rational(), b.to_rational());
}

Rat ceil_rat_to_int(const Rat& q) {
  Int c;
  mpz_cdiv_q(c.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
  return Rat(c);
}

}  // namespace

// ---------------------------------------------------------------------------
// RealBall
// ---------------------------------------------------------------------------

RealBall::RealBall(Dyadic l, Dyadic h, long precision)
    : lo(std::move(l)), hi(std::move(h)), prec(precision) {
  if (dyadic_cmp(lo, hi) > 0) throw std::invalid_argument("RealBall: lo > hi");
}

RealBall RealBall::from_rational(const Rat& q, long prec) {
  MpfrVal lo(prec), hi(prec);
  mpfr_set_q(lo.x, q.get_mpq_t(), MPFR_RNDD);
  mpfr_set_q(hi.x, q.get_mpq_t(), MPFR_RNDU);
  return RealBall(get_dyadic(lo.x), get_dyadic(hi.x), prec);
}

RealBall RealBall::exact(const Rat& q, long prec) {
  Dyadic d = Dyadic::from_rational_exact(q);
  return RealBall(d, d, prec);
}

bool RealBall::contains_zero() const { return sgn(lo.mant) <= 0 && sgn(hi.mant) >= 0; }

Rat RealBall::max_abs() const {
  Rat a = lo_q(), b = hi_q();
  if (sgn(a) < 0) a = -a;
  if (sgn(b) < 0) b = -b;
  return a > b ? a : b;
}

Rat RealBall::min_abs() const {
  if (contains_zero()) return Rat(0);
  Rat a = lo_q(), b = hi_q();
  if (sgn(a) < 0) a = -a;
  if (sgn(b) < 0) b = -b;
  return a < b ? a : b;
}

RealBall RealBall::add(const RealBall& o) const {
  long p = std::max(prec, o.prec);
  return RealBall(dyadic_bin(lo, o.lo, p, MPFR_RNDD, mpfr_add),
                  dyadic_bin(hi, o.hi, p, MPFR_RNDU, mpfr_add), p);
}

RealBall RealBall::sub(const RealBall& o) const { return add(o.neg()); }

RealBall RealBall::neg() const {
  return RealBall(Dyadic(-hi.mant, hi.exp), Dyadic(-lo.mant, lo.exp), prec);
}

RealBall RealBall::mul(const RealBall& o) const {
  long p = std::max(prec, o.prec);
  const Dyadic* as[2] = {&lo, &hi};
  const Dyadic* bs[2] = {&o.lo, &o.hi};
  Dyadic best_lo, best_hi;
  bool first = true;
  for (auto* a : as)
    for (auto* b : bs) {
      Dyadic d = dyadic_bin(*a, *b, p, MPFR_RNDD, mpfr_mul);
      Dyadic u = dyadic_bin(*a, *b, p, MPFR_RNDU, mpfr_mul);
      if (first || dyadic_cmp(d, best_lo) < 0) best_lo = d;
      if (first || dyadic_cmp(u, best_hi) > 0) best_hi = u;
      first = false;
    }
  return RealBall(best_lo, best_hi, p);
}

RealBall RealBall::sqrt() const {
  if (sgn(lo.mant) < 0)
    throw std::domain_error("RealBall::sqrt: ball extends below zero");
  return RealBall(dyadic_sqrt(lo, prec, MPFR_RNDD), dyadic_sqrt(hi, prec, MPFR_RNDU), prec);
}

RealBall RealBall::div(const RealBall& o) const {
  if (o.contains_zero()) throw std::domain_error("RealBall::div: divisor contains zero");
  long p = std::max(prec, o.prec);
  const Dyadic* as[2] = {&lo, &hi};
  const Dyadic* bs[2] = {&o.lo, &o.hi};
  Dyadic best_lo, best_hi;
  bool first = true;
  for (auto* a : as)
    for (auto* b : bs) {
      Dyadic d = dyadic_bin(*a, *b, p, MPFR_RNDD, mpfr_div);
      Dyadic u = dyadic_bin(*a, *b, p, MPFR_RNDU, mpfr_div);
      if (first || dyadic_cmp(d, best_lo) < 0) best_lo = d;
      if (first || dyadic_cmp(u, best_hi) > 0) best_hi = u;
      first = false;
    }
  return RealBall(best_lo, best_hi, p);
}

RealBall RealBall::intersect(const RealBall& o) const {
  const Dyadic& l = dyadic_cmp(lo, o.lo) >= 0 ? lo : o.lo;
  const Dyadic& h = dyadic_cmp(hi, o.hi) <= 0 ? hi : o.hi;
  if (dyadic_cmp(l, h) > 0) throw std::domain_error("RealBall::intersect: empty");
  return RealBall(l, h, std::max(prec, o.prec));
}

// ---------------------------------------------------------------------------
// PadicApprox
// ---------------------------------------------------------------------------

PadicApprox::PadicApprox(unsigned long p_, long N_, Int r) : p(p_), N(N_), residue(std::move(r)) {
  if (N < 1) throw std::invalid_argument("PadicApprox: N must be >= 1");
  Int m = modulus();
  mpz_mod(residue.get_mpz_t(), residue.get_mpz_t(), m.get_mpz_t());
}

Int PadicApprox::modulus() const {
  Int m;
  mpz_ui_pow_ui(m.get_mpz_t(), p, static_cast<unsigned long>(N));
  return m;
}

std::optional<long> PadicApprox::valuation() const {
  if (residue == 0) return std::nullopt;  // >= N
  Int r = residue;
  long v = 0;
  Int pz(static_cast<long>(p));
  while (mpz_divisible_p(r.get_mpz_t(), pz.get_mpz_t())) {
    r /= pz;
    ++v;
  }
  return v;
}

PadicApprox PadicApprox::from_rational(const Rat& q, unsigned long p, long N) {
  Rat r = q;
  r.canonicalize();
  Int pz(static_cast<long>(p));
  if (mpz_divisible_p(r.get_den().get_mpz_t(), pz.get_mpz_t()))
    throw std::domain_error("PadicApprox: denominator not coprime to p");
  Int m;
  mpz_ui_pow_ui(m.get_mpz_t(), p, static_cast<unsigned long>(N));
  Int dinv;
  if (mpz_invert(dinv.get_mpz_t(), r.get_den().get_mpz_t(), m.get_mpz_t()) == 0)
    throw std::domain_error("PadicApprox: denominator not invertible");
  Int res = r.get_num() * dinv;
  mpz_mod(res.get_mpz_t(), res.get_mpz_t(), m.get_mpz_t());
  return PadicApprox(p, N, res);
}

namespace {
void align(const PadicApprox& a, const PadicApprox& b, long& N, Int& m) {
  if (a.p != b.p) throw std::invalid_argument("PadicApprox: mixed primes");
  N = std::min(a.N, b.N);
  mpz_ui_pow_ui(m.get_mpz_t(), a.p, static_cast<unsigned long>(N));
}
}  // namespace

PadicApprox PadicApprox::add(const PadicApprox& o) const {
  long n;
  Int m;
  align(*this, o, n, m);
  Int r = residue + o.residue;
  mpz_mod(r.get_mpz_t(), r.get_mpz_t(), m.get_mpz_t());
  return PadicApprox(p, n, r);
}

PadicApprox PadicApprox::sub(const PadicApprox& o) const { return add(o.neg()); }

PadicApprox PadicApprox::neg() const {
  Int r = -residue;
  return PadicApprox(p, N, r);
}

PadicApprox PadicApprox::mul(const PadicApprox& o) const {
  long n;
  Int m;
  align(*this, o, n, m);
  Int r = residue * o.residue;
  mpz_mod(r.get_mpz_t(), r.get_mpz_t(), m.get_mpz_t());
  return PadicApprox(p, n, r);
}

PadicApprox PadicApprox::div(const PadicApprox& o) const {
  long n;
  Int m;
  align(*this, o, n, m);
  Int inv;
  if (mpz_invert(inv.get_mpz_t(), o.residue.get_mpz_t(), m.get_mpz_t()) == 0)
    throw std::domain_error("PadicApprox::div: divisor is not a unit");
  Int r = residue * inv;
  mpz_mod(r.get_mpz_t(), r.get_mpz_t(), m.get_mpz_t());
  return PadicApprox(p, n, r);
}

namespace {

// Square root mod an odd prime (Tonelli-Shanks); pre: a is a nonzero QR.
Int sqrt_mod_p(const Int& a_in, const Int& p) {
  Int a = a_in % p;
  if (a == 0) return Int(0);
  if (mpz_tstbit(p.get_mpz_t(), 1)) {  // p = 3 mod 4
    Int e = (p + 1) / 4, r;
    mpz_powm(r.get_mpz_t(), a.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
    return r;
  }
  Int Q = p - 1;
  unsigned long S = mpz_scan1(Q.get_mpz_t(), 0);
  mpz_fdiv_q_2exp(Q.get_mpz_t(), Q.get_mpz_t(), S);
  Int half = (p - 1) / 2;
  Int z(2), t;
  for (;; ++z) {
    mpz_powm(t.get_mpz_t(), z.get_mpz_t(), half.get_mpz_t(), p.get_mpz_t());
    if (t == p - 1) break;
  }
  Int c, R;
  mpz_powm(c.get_mpz_t(), z.get_mpz_t(), Q.get_mpz_t(), p.get_mpz_t());
  mpz_powm(t.get_mpz_t(), a.get_mpz_t(), Q.get_mpz_t(), p.get_mpz_t());
  Int e1 = (Q + 1) / 2;
  mpz_powm(R.get_mpz_t(), a.get_mpz_t(), e1.get_mpz_t(), p.get_mpz_t());
  unsigned long M = S;
  while (t != 1) {
    Int tt = t;
    unsigned long i = 0;
    while (tt != 1) {
      tt = tt * tt % p;
      ++i;
    }
    Int b = c;
    for (unsigned long j = 0; j + i + 1 < M; ++j) b = b * b % p;
    M = i;
    c = b * b % p;
    t = t * c % p;
    R = R * b % p;
  }
  return R;
}

}  // namespace

PadicApprox PadicApprox::sqrt(const Int& branch_mod_p) const {
  Int pz(static_cast<long>(p));
  auto v_opt = valuation();
  if (!v_opt)
    throw std::domain_error("PadicApprox::sqrt: residue 0 mod p^N, root undetermined");
  long v = *v_opt;
  if (v % 2 != 0) throw std::domain_error("PadicApprox::sqrt: odd valuation");
  long M = N - v;  // unit part known mod p^M
  if (M < 1) throw std::domain_error("PadicApprox::sqrt: precision insufficient");
  Int pv;
  mpz_ui_pow_ui(pv.get_mpz_t(), p, static_cast<unsigned long>(v));
  Int u = residue / pv;
  // quadratic-residue test on the unit part (Euler criterion)
  Int half = (pz - 1) / 2, euler;
  mpz_powm(euler.get_mpz_t(), u.get_mpz_t(), half.get_mpz_t(), pz.get_mpz_t());
  if (euler != 1) throw std::domain_error("PadicApprox::sqrt: not a quadratic residue mod p");
  Int y = sqrt_mod_p(u, pz);
  Int want = branch_mod_p % pz;
  if (want < 0) want += pz;
  if (y != want) {
    Int other = pz - y;
    if (other != want)
      throw std::domain_error("PadicApprox::sqrt: branch matches neither root mod p");
    y = other;
  }
  // Hensel/Newton lifting: y <- (y + u/y)/2 mod p^k, doubling k up to M
  long k = 1;
  while (k < M) {
    k = std::min(2 * k, M);
    Int mk;
    mpz_ui_pow_ui(mk.get_mpz_t(), p, static_cast<unsigned long>(k));
    Int yinv;
    if (mpz_invert(yinv.get_mpz_t(), y.get_mpz_t(), mk.get_mpz_t()) == 0)
      throw std::logic_error("PadicApprox::sqrt: lost invertibility during lifting");
    Int two_inv;
    mpz_invert(two_inv.get_mpz_t(), Int(2).get_mpz_t(), mk.get_mpz_t());
    y = (y + u % mk * yinv % mk) % mk * two_inv % mk;
  }
  // result: y * p^(v/2), determined mod p^(N - v/2)
  long half_v = v / 2;
  long Nout = N - half_v;
  Int phv;
  mpz_ui_pow_ui(phv.get_mpz_t(), p, static_cast<unsigned long>(half_v));
  return PadicApprox(p, Nout, y * phv);
}

// ---------------------------------------------------------------------------
// CertifiedValue
// ---------------------------------------------------------------------------

CertifiedValue::CertifiedValue(Place place, RealBall b) : place_(place), v_(std::move(b)) {
  if (!place_.is_archimedean())
    throw std::invalid_argument("CertifiedValue: real payload with finite place");
}

CertifiedValue::CertifiedValue(Place place, PadicApprox a) : place_(place), v_(std::move(a)) {
  if (place_.is_archimedean() || std::get<PadicApprox>(v_).p != place_.p)
    throw std::invalid_argument("CertifiedValue: p-adic payload/place mismatch");
}

CertifiedValue CertifiedValue::from_rational(const Rat& q, const Place& place, long precision) {
  if (place.is_archimedean())
    return CertifiedValue(place, RealBall::from_rational(q, precision));
  return CertifiedValue(place, PadicApprox::from_rational(q, place.p, precision));
}

namespace {
void require_place(const CertifiedValue& a, const CertifiedValue& b) {
  if (!(a.place() == b.place()))
    throw std::invalid_argument("CertifiedValue: place mismatch");
}
}  // namespace

CertifiedValue CertifiedValue::add(const CertifiedValue& o) const {
  require_place(*this, o);
  if (is_real()) return CertifiedValue(place_, real().add(o.real()));
  return CertifiedValue(place_, padic().add(o.padic()));
}

CertifiedValue CertifiedValue::sub(const CertifiedValue& o) const {
  require_place(*this, o);
  if (is_real()) return CertifiedValue(place_, real().sub(o.real()));
  return CertifiedValue(place_, padic().sub(o.padic()));
}

CertifiedValue CertifiedValue::mul(const CertifiedValue& o) const {
  require_place(*this, o);
  if (is_real()) return CertifiedValue(place_, real().mul(o.real()));
  return CertifiedValue(place_, padic().mul(o.padic()));
}

CertifiedValue CertifiedValue::div(const CertifiedValue& o) const {
  require_place(*this, o);
  if (is_real()) return CertifiedValue(place_, real().div(o.real()));
  return CertifiedValue(place_, padic().div(o.padic()));
}

CertifiedValue CertifiedValue::neg() const {
  if (is_real()) return CertifiedValue(place_, real().neg());
  return CertifiedValue(place_, padic().neg());
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace {

using TermMap = std::map<std::vector<unsigned>, Rat>;

CertifiedValue eval_upto(const TermMap& terms, long k, const std::vector<CertifiedValue>& P,
                         const Place& place, long precision) {
  if (terms.empty()) return CertifiedValue::from_rational(Rat(0), place, precision);
  if (k < 0) {
    Rat acc(0);
    for (const auto& [e, c] : terms) acc += c;
    acc.canonicalize();
    return CertifiedValue::from_rational(acc, place, precision);
  }
  // group by the exponent of variable k (Horner along the highest variable)
  std::map<unsigned, TermMap> groups;
  for (const auto& [e, c] : terms) {
    std::vector<unsigned> e2 = e;
    unsigned ek = e2[static_cast<std::size_t>(k)];
    e2[static_cast<std::size_t>(k)] = 0;
    groups[ek].emplace(std::move(e2), c);
  }
  auto it = groups.rbegin();
  CertifiedValue acc = eval_upto(it->second, k - 1, P, place, precision);
  unsigned cur = it->first;
  ++it;
  const CertifiedValue& x = P[static_cast<std::size_t>(k)];
  while (cur > 0) {
    acc = acc.mul(x);
    --cur;
    if (it != groups.rend() && it->first == cur) {
      acc = acc.add(eval_upto(it->second, k - 1, P, place, precision));
      ++it;
    }
  }
  return acc;
}

}  // namespace

CertifiedValue eval_certified(const MPoly& f, const std::vector<CertifiedValue>& P,
                              const Place& place, long precision) {
  if (P.size() != f.nvars()) throw std::invalid_argument("eval_certified: arity");
  for (const auto& cv : P)
    if (!(cv.place() == place)) throw std::invalid_argument("eval_certified: place mismatch");
  return eval_upto(f.terms(), static_cast<long>(f.nvars()) - 1, P, place, precision);
}

CertifiedValue sqrt_certified(const CertifiedValue& x, const Int& branch) {
  if (x.is_real()) {
    RealBall r = x.real().sqrt();
    if (branch < 0) r = r.neg();
    return CertifiedValue(x.place(), r);
  }
  return CertifiedValue(x.place(), x.padic().sqrt(branch));
}

// ---------------------------------------------------------------------------
// Norm bounds
// ---------------------------------------------------------------------------

namespace {
LogBound padic_norm_log(unsigned long p, const Rat& v) {
  // ln(p^-v) enclosure
  LogBound lnp = ln_enclosure(Rat(static_cast<long>(p)), 96);
  return lnp.scale(v).neg();
}
}  // namespace

LogBound norm_upper_bound(const CertifiedValue& x) {
  if (x.is_real()) {
    Rat m = x.real().max_abs();
    if (sgn(m) == 0) return LogBound::neg_infinity();
    return ln_enclosure(m, 96);
  }
  const PadicApprox& a = x.padic();
  auto v = a.valuation();
  long vv = v ? *v : a.N;
  return padic_norm_log(a.p, Rat(vv));
}

LogBound norm_lower_bound(const CertifiedValue& x) {
  if (x.is_real()) {
    Rat m = x.real().min_abs();
    if (sgn(m) == 0) return LogBound::neg_infinity();
    return ln_enclosure(m, 96);
  }
  const PadicApprox& a = x.padic();
  auto v = a.valuation();
  if (!v) return LogBound::neg_infinity();  // class contains 0
  return padic_norm_log(a.p, Rat(*v));
}

YesNoUnknown norm_leq(const CertifiedValue& x, const LogBound& eps_log) {
  // Exact path: p-adic norm is an exact power of p; when eps is exactly ln(q)
  // for a known rational q the comparison is a rational one, immune to the
  // finite width of any log enclosure.
  if (!x.is_real() && !eps_log.is_neg_inf()) {
    if (auto q = eps_log.exact_ln_arg()) {
      const PadicApprox& a = x.padic();
      auto v = a.valuation();
      Rat pw(1);
      {
        Int num(1), den;
        mpz_ui_pow_ui(den.get_mpz_t(), a.p, static_cast<unsigned long>(v ? *v : a.N));
        pw = Rat(num, den);
      }
      if (pw <= *q) return YesNoUnknown::YES;  // |x| <= p^-v <= q
      if (v && pw > *q) return YesNoUnknown::NO;  // exact norm p^-v > q
      return YesNoUnknown::UNKNOWN;
    }
  }
  LogBound ub = norm_upper_bound(x);
  if (compare_certain(ub, eps_log) == Cmp::LE) return YesNoUnknown::YES;
  LogBound lb = norm_lower_bound(x);
  if (!lb.is_neg_inf() && !eps_log.is_neg_inf()) {
    LogBound l = lb.refined(2 * log_precision_cap());
    if (l.lo() > eps_log.hi()) return YesNoUnknown::NO;  // strictly above tolerance
  }
  if (!lb.is_neg_inf() && eps_log.is_neg_inf()) return YesNoUnknown::NO;
  return YesNoUnknown::UNKNOWN;
}

YesNoUnknown norm_geq(const CertifiedValue& x, const LogBound& bound_log) {
  LogBound lb = norm_lower_bound(x);
  if (bound_log.is_neg_inf())
    return lb.is_neg_inf() ? YesNoUnknown::UNKNOWN : YesNoUnknown::YES;
  if (!lb.is_neg_inf()) {
    // direct GE test (compare_certain prefers LE when both sides coincide)
    LogBound l = lb.refined(2 * log_precision_cap());
    LogBound b = bound_log.refined(2 * log_precision_cap());
    if (l.lo() >= b.hi()) return YesNoUnknown::YES;
  }
  LogBound ub = norm_upper_bound(x);
  if (ub.is_neg_inf()) return YesNoUnknown::NO;  // value certainly 0 < e^bound
  LogBound u = ub.refined(2 * log_precision_cap());
  if (u.hi() < bound_log.lo()) return YesNoUnknown::NO;
  return YesNoUnknown::UNKNOWN;
}

// ---------------------------------------------------------------------------
// Determinant
// ---------------------------------------------------------------------------

namespace {

CertifiedValue det_cofactor(const std::vector<std::vector<CertifiedValue>>& M,
                            std::vector<std::size_t> cols, std::size_t row) {
  const std::size_t n = cols.size();
  if (n == 1) return M[row][cols[0]];
  CertifiedValue acc = CertifiedValue::from_rational(Rat(0), M[0][0].place(), 8);
  bool have = false;
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<std::size_t> sub;
    sub.reserve(n - 1);
    for (std::size_t k = 0; k < n; ++k)
      if (k != j) sub.push_back(cols[k]);
    CertifiedValue term = M[row][cols[j]].mul(det_cofactor(M, sub, row + 1));
    if (j % 2 == 1) term = term.neg();
    acc = have ? acc.add(term) : term;
    have = true;
  }
  return acc;
}

// Fraction-free (Bareiss) elimination on real balls; divisions by previous
// pivots are interval divisions, so pivots must not contain zero.
std::optional<CertifiedValue> det_bareiss_real(std::vector<std::vector<CertifiedValue>> M) {
  const std::size_t n = M.size();
  const Place place = M[0][0].place();
  long prec = M[0][0].real().prec;
  RealBall prev = RealBall::exact(Rat(1), prec);
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    // pivot: pick the row below k with the largest mignitude
    std::size_t best = k;
    Rat bestm(-1);
    for (std::size_t i = k; i < n; ++i) {
      Rat m = M[i][k].real().min_abs();
      if (m > bestm) {
        bestm = m;
        best = i;
      }
    }
    if (sgn(bestm) == 0) return std::nullopt;  // zero-containing pivot
    if (best != k) {
      std::swap(M[best], M[k]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        RealBall num = M[i][j].real().mul(M[k][k].real())
                           .sub(M[i][k].real().mul(M[k][j].real()));
        M[i][j] = CertifiedValue(place, num.div(prev));
      }
    }
    prev = M[k][k].real();
  }
  RealBall d = M[n - 1][n - 1].real();
  if (sign < 0) d = d.neg();
  return CertifiedValue(place, d);
}

}  // namespace

CertifiedValue det_certified(const std::vector<std::vector<CertifiedValue>>& M) {
  const std::size_t n = M.size();
  if (n == 0) throw std::invalid_argument("det_certified: empty matrix");
  for (const auto& row : M)
    if (row.size() != n) throw std::invalid_argument("det_certified: not square");
  if (n > 4 && M[0][0].is_real()) {
    if (auto d = det_bareiss_real(M)) return *d;
    // fall through to cofactor when a pivot straddles zero
  }
  std::vector<std::size_t> cols(n);
  for (std::size_t i = 0; i < n; ++i) cols[i] = i;
  return det_cofactor(M, cols, 0);
}

// ---------------------------------------------------------------------------
// Interval Newton
// ---------------------------------------------------------------------------

NewtonResult interval_newton_refine(const std::vector<MPoly>& F,
                                    const std::vector<RealBall>& box_in, long precision) {
  const std::size_t n = box_in.size();
  NewtonResult out;
  out.box = box_in;
  if (F.size() != n) throw std::invalid_argument("interval_newton_refine: not square");
  const Place inf = Place::infinity();

  std::vector<std::vector<MPoly>> J(n);
  for (std::size_t i = 0; i < n; ++i) J[i] = F[i].gradient();

  bool verified = false;
  for (int iter = 0; iter < 20; ++iter) {
    // midpoint (exact dyadic)
    std::vector<CertifiedValue> mid, boxcv;
    std::vector<Rat> midq(n);
    for (std::size_t i = 0; i < n; ++i) {
      midq[i] = (out.box[i].lo_q() + out.box[i].hi_q()) / 2;
      mid.emplace_back(inf, RealBall::exact(midq[i], precision));
      boxcv.emplace_back(inf, out.box[i]);
    }
    // A = J(box), b = -F(mid)
    std::vector<std::vector<RealBall>> A(n);
    std::vector<RealBall> b;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j)
        A[i].push_back(eval_certified(J[i][j], boxcv, inf, precision).real());
      b.push_back(eval_certified(F[i], mid, inf, precision).real().neg());
    }
    // interval Gaussian elimination with mignitude pivoting
    bool singular = false;
    for (std::size_t k = 0; k < n && !singular; ++k) {
      std::size_t best = k;
      Rat bestm(-1);
      for (std::size_t i = k; i < n; ++i)
        if (A[i][k].min_abs() > bestm) {
          bestm = A[i][k].min_abs();
          best = i;
        }
      if (sgn(bestm) == 0) {
        singular = true;
        break;
      }
      std::swap(A[best], A[k]);
      std::swap(b[best], b[k]);
      for (std::size_t i = k + 1; i < n; ++i) {
        RealBall f = A[i][k].div(A[k][k]);
        for (std::size_t j = k; j < n; ++j) A[i][j] = A[i][j].sub(f.mul(A[k][j]));
        b[i] = b[i].sub(f.mul(b[k]));
      }
    }
    if (singular) {
      out.status = verified ? NewtonResult::Status::VERIFIED : NewtonResult::Status::NOT_VERIFIED;
      return out;
    }
    std::vector<RealBall> y(n, RealBall::exact(Rat(0), precision));
    for (std::size_t k = n; k-- > 0;) {
      RealBall acc = b[k];
      for (std::size_t j = k + 1; j < n; ++j) acc = acc.sub(A[k][j].mul(y[j]));
      y[k] = acc.div(A[k][k]);
    }
    // Newton image N = mid + y
    std::vector<RealBall> img;
    bool inside = true, shrank = false;
    for (std::size_t i = 0; i < n; ++i) {
      RealBall m = RealBall::exact(midq[i], precision);
      RealBall Ni = m.add(y[i]);
      img.push_back(Ni);
      if (!(Ni.lo_q() > out.box[i].lo_q() && Ni.hi_q() < out.box[i].hi_q())) inside = false;
    }
    if (inside) verified = true;
    // intersect (sound regardless of verification)
    std::vector<RealBall> next;
    bool disjoint = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (img[i].hi_q() < out.box[i].lo_q() || img[i].lo_q() > out.box[i].hi_q()) {
        disjoint = true;
        break;
      }
      RealBall ni = img[i].intersect(out.box[i]);
      if (ni.width() < out.box[i].width()) shrank = true;
      next.push_back(ni);
    }
    if (disjoint) {
      // no zero in the box at all; report unverified
      out.status = NewtonResult::Status::NOT_VERIFIED;
      return out;
    }
    out.box = next;
    if (verified && !shrank) break;
  }
  out.status = verified ? NewtonResult::Status::VERIFIED : NewtonResult::Status::NOT_VERIFIED;
  return out;
}

// ---------------------------------------------------------------------------
// Precision policies
// ---------------------------------------------------------------------------

long real_precision_for(const LogBound& eps_log) {
  if (eps_log.is_neg_inf())
    throw std::domain_error("real_precision_for: tolerance is zero");
  if (sgn(eps_log.lo()) >= 0) return 64;
  LogBound ln2 = ln_enclosure(Rat(2), 96);
  Rat bits = ceil_rat_to_int(-eps_log.lo() / ln2.lo());
  Rat capped = bits + 32;
  if (capped > Rat(1000000000L)) throw std::domain_error("real_precision_for: absurd precision");
  return static_cast<long>(capped.get_num().get_si());
}

long padic_digits_for(const LogBound& eps_log, unsigned long p) {
  if (eps_log.is_neg_inf())
    throw std::domain_error("padic_digits_for: tolerance is zero");
  if (sgn(eps_log.lo()) >= 0) return 1;
  LogBound lnp = ln_enclosure(Rat(static_cast<long>(p)), 96);
  Rat m = ceil_rat_to_int(-eps_log.lo() / lnp.lo());
  if (m > Rat(1000000000L)) throw std::domain_error("padic_digits_for: absurd precision");
  long out = static_cast<long>(m.get_num().get_si());
  return std::max(out, 1L);
}

}  // namespace pbe
