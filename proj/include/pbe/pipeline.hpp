#pragma once

// Certification pipelines: identity certification, the dichotomy decision,
// dimension-by-example, the exact ambient (Kronecker/Cauchy) prover, plus
// machine-verifiable certificates.  Every verdict is one-sided and sound:
// INCONCLUSIVE is the only outcome when a required comparison cannot be
// certified; the ambient prover is the only pipeline that can disprove
// (its evaluation is exact).

#include "pbe/bounds.hpp"
#include "pbe/system.hpp"
#include "pbe/witness.hpp"

namespace pbe {

// ---------------------------------------------------------------------------
// Verdicts
// ---------------------------------------------------------------------------

enum class Verdict {
  PROVED,            // g vanishes on X (irreducibility asserted)
  COMPONENT_PROVED,  // reducible corollary: g vanishes on a d-dim component
  INCONCLUSIVE,
  CASE1,             // dichotomy: g|_X = 0
  CASE2,             // dichotomy: g|_X != 0
  DIM_CONFIRMED,
  DISPROVED,         // ambient prover only: g != 0 with an exact counter-value
};

std::string verdict_name(Verdict v);
Verdict verdict_from_name(const std::string& s);

// ---------------------------------------------------------------------------
// Options
// ---------------------------------------------------------------------------

struct PipelineOptions {
  Place place = Place::infinity();
  LogBound logR = LogBound(Rat(0));  // ln R, R >= 1
  // chain used by certify_identity; dichotomy/dimension always use the NO_G
  // chain of their theorems
  ChainKind chain = ChainKind::WEAK;
  FreeStyle style = FreeStyle::DECIMAL_PATTERN;  // PADIC_PATTERN for primes
  std::vector<Rat> user_values;                  // free values for USER style
  unsigned escalations = 2;  // precision doublings before INCONCLUSIVE
};

// ---------------------------------------------------------------------------
// Certificate
// ---------------------------------------------------------------------------

struct Certificate {
  std::string schema = "pbe.certificate.v1";
  std::string tool = "pbe 0.1.0";
  std::string procedure;  // certify_identity | dichotomy | dimension | kronecker
  Verdict verdict = Verdict::INCONCLUSIVE;
  std::string reason;     // first failing check (INCONCLUSIVE) or notes

  PolySystem system;
  Place place = Place::infinity();
  LogBound logR = LogBound(Rat(0));
  ChainKind chain = ChainKind::WEAK;
  FreeStyle style = FreeStyle::DECIMAL_PATTERN;
  unsigned escalations = 2;

  ThresholdReport thresholds;
  std::optional<Witness> witness;
  std::optional<CertifiedValue> g_eval;
  bool exact_path = false;

  // dimension
  unsigned confirmed_dim = 0;
  std::vector<std::size_t> selection;
  bool all_permutations = false;
  std::optional<CertifiedValue> det_eval;

  // kronecker
  std::optional<Rat> kron_point;
  std::optional<Rat> kron_value;

  nlohmann::ordered_json to_json() const;  // deterministic, stable key order
  static Certificate from_json(const nlohmann::json& j);
};

// ---------------------------------------------------------------------------
// Pipelines
// ---------------------------------------------------------------------------

// PROVED iff the genericity chain holds for i = 1..d and every |f_i(P)|_v
// and |g(P)|_v is certifiably <= epsilon_main; exact witnesses on X with
// g(P) = 0 exactly short-circuit via the exact main theorem (no epsilon).
// When irreducibility is UNKNOWN the strongest verdict is COMPONENT_PROVED
// (reducible corollary, epsilon' from epsilon_reducible in the report).
// Never disproves.
Certificate certify_identity(const PolySystem& sys, const PipelineOptions& opt);

// CASE1 iff |g(P)|_v <= eps_g certified, CASE2 iff |g(P)|_v >= 2 eps_g
// certified, after the |f_i(P)|_v <= eps_f precondition (realistically: an
// exact witness on X) and the no-g genericity chain.
Certificate dichotomy_decide(const PolySystem& sys, const PipelineOptions& opt);

// DIM_CONFIRMED(d) iff |det(e_1..e_d, grad f_sel(P))|_v >= 2 eps_det
// certified for the given ordered selection of n-d polynomial indices
// (all size-(n-d) selections when all_permutations, per the converse).
Certificate dimension_by_example(const PolySystem& sys, unsigned d,
                                 const PipelineOptions& opt,
                                 const std::vector<std::size_t>& selection,
                                 bool all_permutations = false);

// Kronecker substitution + one exact Cauchy-scheme evaluation at the least
// power of ten above the threshold.  PROVED iff g == 0; otherwise DISPROVED
// with the nonzero value as counter-witness.
Certificate prove_zero_ambient(const MPoly& g);

// ---------------------------------------------------------------------------
// Verification / test oracle
// ---------------------------------------------------------------------------

struct VerifyResult {
  bool valid = false;
  std::string reason;  // first mismatch when invalid
};

// Recomputes the whole certificate from its embedded inputs (system, place,
// options, witness free values) and compares; VALID iff everything
// reproduces, including the verdict.  Uses no state beyond the document.
VerifyResult verify_certificate(const nlohmann::json& cert_json);

enum class Membership { MEMBER, NON_MEMBER };

// Exact symbolic oracle for parametrized systems: is g(rho(t)) the zero
// rational function?  (pre: sys.has_parametrization())
Membership membership_oracle(const PolySystem& sys, const MPoly& g);

// BoundContext deduced from a system (degrees flagged, never defaulted).
BoundContext context_for(const PolySystem& sys, const Place& place,
                         const LogBound& logR);

}  // namespace pbe
