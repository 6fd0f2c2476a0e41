#pragma once

// Witness construction: choose free coordinates p_1..p_d whose heights
// certifiably clear the genericity thresholds, then solve the dependent
// coordinates on the fiber with certified enclosures (tracking exactness
// where the recipe admits exact rational solutions).

#include "pbe/bounds.hpp"
#include "pbe/system.hpp"
#include "pbe/valuations.hpp"

namespace pbe {

// ---------------------------------------------------------------------------
// Free coordinates
// ---------------------------------------------------------------------------

enum class FreeStyle { DECIMAL_PATTERN, PADIC_PATTERN, USER };

// Genericity chain flavors: WEAK is the per-coordinate weakened bound (the
// operative default), MAIN the n D^(m+1) chain, NO_G the n D_f^m chain whose
// H-set excludes g (dichotomy/dimension theorems).
enum class ChainKind { WEAK, MAIN, NO_G };

struct FreeCoordinate {
  Rat value;
  LogBound height = LogBound(Rat(0));  // exact ln of the height integer
  unsigned k = 0;                      // pattern length (0 for USER)
};

// DECIMAL_PATTERN: 0.123456789012... truncated to the least admissible k
// digits (last digit in {1,3,7,9} so the reduced denominator is exactly 10^k)
// with h = k ln 10 certifiably >= threshold.  PADIC_PATTERN: p * (k-digit
// pattern integer) with h = ln(p * pattern) >= threshold.  USER: the supplied
// value is verified against the threshold, never trusted.
FreeCoordinate choose_free_coordinate(const LogBound& threshold, const Place& place,
                                      FreeStyle style,
                                      const std::optional<Rat>& user_value = std::nullopt);

// ---------------------------------------------------------------------------
// Witness
// ---------------------------------------------------------------------------

struct Witness {
  Place place = Place::infinity();
  long precision = 64;
  std::vector<FreeCoordinate> free;           // the first d coordinates
  SolvingRecipe recipe;                       // embedded for re-verification
  std::vector<CertifiedValue> coords;         // all n coordinates
  std::vector<std::optional<Rat>> exact;      // exact value when known
  std::vector<CertifiedValue> residuals;      // f_i(P) enclosures

  bool all_exact() const;

  nlohmann::ordered_json to_json() const;
  static Witness from_json(const nlohmann::json& j,
                           const std::vector<std::string>& vars);
};

// CertifiedValue serialization (shared by witnesses and certificates).
nlohmann::ordered_json certified_value_to_json(const CertifiedValue& v);
CertifiedValue certified_value_from_json(const nlohmann::json& j, const Place& place);

// Solve the dependent coordinates from the assigned free values via the
// recipe; returns the full witness including residual enclosures.  NEWTON
// steps must verify (throws std::runtime_error otherwise); quadratic steps
// throw on negative real radicands / p-adic non-residues.
Witness solve_fiber(const PolySystem& sys, const std::vector<Rat>& free_values,
                    const SolvingRecipe& recipe, const Place& place, long precision);

// ---------------------------------------------------------------------------
// Autopilot
// ---------------------------------------------------------------------------

struct WitnessPlan {
  Witness witness;
  std::vector<LogBound> thresholds;  // per-coordinate genericity thresholds
  std::vector<LogBound> heights;     // exact h(p_i)
  LogBound H_no_g = LogBound(Rat(0));    // h(f_1..f_m, p_1..p_d)
  LogBound H_with_g = LogBound(Rat(0));  // ... + height contribution of g
};

// Compose choose_free_coordinate for i = 1..d (updating the chain height
// after each choice) with solve_fiber at the given precision.  USER style
// takes the d values from user_values; failures carry the first
// unsatisfiable step in the exception message.
WitnessPlan autopilot(const PolySystem& sys, const BoundContext& ctx, FreeStyle style,
                      ChainKind chain, const Place& place, long precision,
                      const std::vector<Rat>& user_values = {});

// The NO_G chain threshold n D_f^m (H_prev + 4 ln(n+2)) shared by the
// dichotomy and dimension theorems.
LogBound genericity_threshold_no_g(const BoundContext& ctx, const LogBound& H_prev);

// Exact square root of a rational if it exists (sign of the result is +).
std::optional<Rat> exact_sqrt(const Rat& q);

}  // namespace pbe
