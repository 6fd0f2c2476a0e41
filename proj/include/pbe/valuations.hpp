#pragma once

// Certified evaluation backends for the places of Q: real ball arithmetic
// (v = infinity, dyadic endpoints, outward rounding) and p-adic residue
// arithmetic (v = p, odd prime), with square roots, norm bounds, determinants
// and interval-Newton refinement.

#include <variant>
#include <vector>

#include "pbe/exactnum.hpp"
#include "pbe/mpoly.hpp"

namespace pbe {

// ---------------------------------------------------------------------------
// Place
// ---------------------------------------------------------------------------

struct Place {
  enum class Kind { INF, PRIME };
  Kind kind = Kind::INF;
  unsigned long p = 0;  // only for PRIME

  static Place infinity() { return Place{Kind::INF, 0}; }
  // p must be an odd prime (p = 2 excluded: square-root lifting contract).
  static Place prime(unsigned long p);

  bool is_archimedean() const { return kind == Kind::INF; }
  bool operator==(const Place& o) const { return kind == o.kind && p == o.p; }
  std::string to_string() const;
  static Place from_string(const std::string& s);  // "inf" or a prime number
};

// ---------------------------------------------------------------------------
// RealBall
// ---------------------------------------------------------------------------

struct RealBall {
  Dyadic lo, hi;
  long prec = 64;  // working mantissa bits; all ops round outward at this

  RealBall() = default;
  RealBall(Dyadic l, Dyadic h, long precision);

  static RealBall from_rational(const Rat& q, long prec);
  static RealBall exact(const Rat& dyadic_q, long prec);  // exact dyadic point

  Rat lo_q() const { return lo.to_rational(); }
  Rat hi_q() const { return hi.to_rational(); }
  Rat width() const { return hi_q() - lo_q(); }
  bool contains(const Rat& q) const { return lo_q() <= q && q <= hi_q(); }
  bool contains_zero() const;
  Rat max_abs() const;           // sup |x| over the ball
  Rat min_abs() const;           // inf |x| over the ball (0 if it straddles 0)

  RealBall add(const RealBall& o) const;
  RealBall sub(const RealBall& o) const;
  RealBall mul(const RealBall& o) const;
  RealBall neg() const;
  // pre: lo >= 0
  RealBall sqrt() const;
  // interval division; pre: o does not contain 0
  RealBall div(const RealBall& o) const;
  RealBall intersect(const RealBall& o) const;  // pre: overlap
};

// ---------------------------------------------------------------------------
// PadicApprox: coset residue + p^N Z_p
// ---------------------------------------------------------------------------

struct PadicApprox {
  unsigned long p = 3;
  long N = 1;        // number of p-adic digits carried
  Int residue = 0;   // in [0, p^N)

  PadicApprox() = default;
  PadicApprox(unsigned long p, long N, Int residue);

  Int modulus() const;  // p^N
  // Valuation of the class: exact v_p(residue) if residue != 0; nullopt
  // represents ">= N" (residue 0).
  std::optional<long> valuation() const;

  // pre: denominator of q coprime to p
  static PadicApprox from_rational(const Rat& q, unsigned long p, long N);

  PadicApprox add(const PadicApprox& o) const;
  PadicApprox sub(const PadicApprox& o) const;
  PadicApprox mul(const PadicApprox& o) const;
  PadicApprox neg() const;
  // pre: o is a unit (valuation 0)
  PadicApprox div(const PadicApprox& o) const;
  // Hensel-lifted square root; branch selects the root class mod p.
  // pre: even valuation, unit part a nonzero quadratic residue mod p.
  PadicApprox sqrt(const Int& branch_mod_p) const;
};

// ---------------------------------------------------------------------------
// CertifiedValue
// ---------------------------------------------------------------------------

class CertifiedValue {
 public:
  CertifiedValue(Place place, RealBall b);
  CertifiedValue(Place place, PadicApprox a);

  static CertifiedValue from_rational(const Rat& q, const Place& place, long precision);

  const Place& place() const { return place_; }
  bool is_real() const { return std::holds_alternative<RealBall>(v_); }
  const RealBall& real() const { return std::get<RealBall>(v_); }
  const PadicApprox& padic() const { return std::get<PadicApprox>(v_); }

  CertifiedValue add(const CertifiedValue& o) const;
  CertifiedValue sub(const CertifiedValue& o) const;
  CertifiedValue mul(const CertifiedValue& o) const;
  CertifiedValue neg() const;
  // pre: real — o bounded away from 0; p-adic — o a unit
  CertifiedValue div(const CertifiedValue& o) const;

 private:
  Place place_;
  std::variant<RealBall, PadicApprox> v_;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

// Horner-style evaluation along the last variable (any order is sound; this
// one is chosen for enclosure tightness).
CertifiedValue eval_certified(const MPoly& f, const std::vector<CertifiedValue>& P,
                              const Place& place, long precision);

// branch: real case sign (+1/-1 as Int), p-adic case the root class mod p.
CertifiedValue sqrt_certified(const CertifiedValue& x, const Int& branch);

enum class YesNoUnknown { YES, NO, UNKNOWN };

// Enclosure of ln of a certified upper bound on |x|_v (NEG_INFINITY when the
// value is certainly 0).
LogBound norm_upper_bound(const CertifiedValue& x);
// Enclosure of ln of a certified lower bound on |x|_v (NEG_INFINITY when no
// positive lower bound is certified).
LogBound norm_lower_bound(const CertifiedValue& x);

// YES only when the enclosure guarantees |x|_v <= e^(eps_log.lo);
// NO only when it guarantees |x|_v > e^(eps_log.hi).
YesNoUnknown norm_leq(const CertifiedValue& x, const LogBound& eps_log);
// YES only when the enclosure guarantees |x|_v >= e^(bound_log.hi);
// NO only when it guarantees |x|_v < e^(bound_log.lo).
YesNoUnknown norm_geq(const CertifiedValue& x, const LogBound& bound_log);

CertifiedValue det_certified(const std::vector<std::vector<CertifiedValue>>& M);

struct NewtonResult {
  enum class Status { VERIFIED, NOT_VERIFIED };
  Status status = Status::NOT_VERIFIED;
  std::vector<RealBall> box;
};

// Interval Newton: on VERIFIED the returned box provably contains a unique
// zero of F; NOT_VERIFIED is never a false certificate.
NewtonResult interval_newton_refine(const std::vector<MPoly>& F,
                                    const std::vector<RealBall>& box, long precision);

// Working-precision policies for a target log-tolerance.
long real_precision_for(const LogBound& eps_log);           // ceil(-log2 eps) + 32
long padic_digits_for(const LogBound& eps_log, unsigned long p);  // ceil(-ln eps / ln p)

}  // namespace pbe
