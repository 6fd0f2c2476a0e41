#pragma once

// Exact arbitrary-precision arithmetic and rigorous logarithm enclosures.
//
// Everything the threshold machinery compares is either an exact rational or
// a two-sided rational enclosure of a natural logarithm (LogBound).  All
// rounding here is outward/directed; an UNKNOWN comparison is surfaced as a
// value and never treated as success downstream.

#include <gmpxx.h>

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

namespace pbe {

using Int = mpz_class;
using Rat = mpq_class;

// ---------------------------------------------------------------------------
// Rational helpers
// ---------------------------------------------------------------------------

// Serialize as "num/den" (always with the denominator, which is > 0).
std::string rat_to_string(const Rat& q);

// Accepts "num/den" or a bare integer "num".
Rat rat_from_string(const std::string& s);

// ---------------------------------------------------------------------------
// Dyadic: mantissa * 2^exponent, canonical (mantissa odd or zero).
// ---------------------------------------------------------------------------

struct Dyadic {
  Int mant;   // arbitrary-precision mantissa
  long exp;   // value = mant * 2^exp

  Dyadic() : mant(0), exp(0) {}
  Dyadic(Int m, long e) : mant(std::move(m)), exp(e) { canonicalize(); }

  void canonicalize();
  Rat to_rational() const;
  // Exact only when the denominator is a power of two.
  static Dyadic from_rational_exact(const Rat& q);

  std::string to_string() const;                 // "mant*2^exp"
  static Dyadic from_string(const std::string&);

  bool operator==(const Dyadic& o) const { return mant == o.mant && exp == o.exp; }
};

// ---------------------------------------------------------------------------
// LogBound: rational enclosure lo <= value <= hi (value typically a log).
// NEG_INFINITY encodes ln 0 (paper convention log 0 := -inf).
// ---------------------------------------------------------------------------

class LogBound {
 public:
  // Degenerate enclosure [q, q] of an exactly known rational quantity.
  explicit LogBound(const Rat& q) : lo_(q), hi_(q) {}
  LogBound(Rat lo, Rat hi);
  static LogBound neg_infinity();

  bool is_neg_inf() const { return neg_inf_; }
  const Rat& lo() const;  // throws on NEG_INFINITY
  const Rat& hi() const;
  Rat width() const { return hi() - lo(); }

  // If this enclosure is exactly ln(q) for a known positive rational q, the
  // argument is kept so the enclosure can be refined to arbitrary precision.
  std::shared_ptr<const Rat> exact_ln_arg() const { return exact_arg_; }
  LogBound refined(unsigned bits) const;  // no-op unless refinable

  // Interval arithmetic with outward rounding (rationals: exact).
  LogBound add(const LogBound& o) const;
  LogBound neg() const;  // error on NEG_INFINITY (would be +inf)
  LogBound sub(const LogBound& o) const { return add(o.neg()); }
  // c >= 0 required; c * NEG_INFINITY = NEG_INFINITY for c > 0, [0,0] for c=0.
  LogBound scale(const Rat& c) const;
  static LogBound max(const LogBound& a, const LogBound& b);
  // Divide by an enclosure of a strictly positive quantity (e.g. ln 10).
  LogBound div_by_pos(const LogBound& pos) const;

 private:
  LogBound() : neg_inf_(true), lo_(0), hi_(0) {}
  bool neg_inf_ = false;
  Rat lo_, hi_;
  std::shared_ptr<const Rat> exact_arg_;

  friend LogBound ln_enclosure(const Rat&, unsigned);
};

// ---------------------------------------------------------------------------
// ln enclosure: q = 2^e * r with r in [1,2); ln r via the atanh series with
// an explicit remainder bound; ln 2 from a cached enclosure of 2*atanh(1/3).
// ---------------------------------------------------------------------------

// pre: q > 0, bits >= 8.
// post: lo <= ln q <= hi with hi - lo <= 2^-bits * (1 + |e|).
LogBound ln_enclosure(const Rat& q, unsigned bits);

// Convenience: ln of a positive integer.
LogBound ln_enclosure_ui(unsigned long k, unsigned bits);

// ---------------------------------------------------------------------------
// Certified three-way comparison.
// ---------------------------------------------------------------------------

enum class Cmp { LE, GE, UNKNOWN };

// Refinement cap (bits) for compare_certain; overridable via the CLI env var.
unsigned log_precision_cap();
void set_log_precision_cap(unsigned bits);

// LE only if a.hi <= b.lo; GE only if a.lo >= b.hi; otherwise both sides are
// refined (where refinable) doubling precision up to the cap, then UNKNOWN.
Cmp compare_certain(const LogBound& a, const LogBound& b);

}  // namespace pbe
