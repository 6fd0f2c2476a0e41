#pragma once

// Explicit constants and threshold formulas: genericity chains, epsilon
// tolerances, dichotomy/dimension thresholds, Lojasiewicz bounds,
// Nullstellensatz size bounds, Bezout bounds.  Everything is computed as a
// LogBound (nats) with conservative rounding; nothing here is asymptotic.

#include <nlohmann/json.hpp>
#include <utility>
#include <vector>

#include "pbe/mpoly.hpp"
#include "pbe/valuations.hpp"

namespace pbe {

// ---------------------------------------------------------------------------
// BoundContext: the symbols (n, m, d, degrees, D, R, [K:Q], N_v, place).
// ---------------------------------------------------------------------------

struct BoundContext {
  unsigned n = 1;                   // ambient dimension
  unsigned m = 1;                   // number of f's
  unsigned d = 0;                   // asserted dim X
  std::vector<unsigned> deg_f;      // deg f_i, each >= 1
  unsigned deg_g = 1;               // deg g
  Rat K_degree = Rat(1);            // [K:Q] (fixed 1, kept symbolic)
  Rat Nv = Rat(1);                  // local degree N_v (fixed 1)
  LogBound logR = LogBound(Rat(0)); // log R with R >= 1
  Place place = Place::infinity();
  unsigned bits = 96;               // ln-enclosure precision for constants

  void validate() const;            // throws std::invalid_argument
  unsigned D_f() const;             // max_i deg f_i
  unsigned D_all() const;           // max(D_f, deg_g)
};

// ---------------------------------------------------------------------------
// Genericity chain and main tolerance
// ---------------------------------------------------------------------------

// n * D^(m+1) * (H_prev + 4 ln(n+2)), H_prev = h(f_1..f_m, g, p_1..p_{i-1}).
LogBound genericity_threshold_main(const BoundContext& ctx, const LogBound& H_prev);

// Weak variant (per-coordinate, i in 1..d): with the degree sequence
// (deg f_1..deg f_m, deg g, 1, 1, ...) sorted non-increasing and
// n_i := min(n, m+i):
//   (H_prev * sum_{j<=n_i} 1/D_j + (n+n_i) ln(n+1)) * prod_{j<=n_i} D_j
//   + D^{n_i} (d-i+1) (ln(n+2) + sum_{j=1..m} 1/(2j)) + ln 2
LogBound genericity_threshold_weak(const BoundContext& ctx, const LogBound& H_prev,
                                   unsigned i);

// log eps = -4 ([K:Q]/N_v) (n+1)^2 D^n ([K:Q] H_full + ln m
//            + (n+7) D ln(n+1) + logR/(n+1)),
// H_full = h(f_1..f_m, g, p_1..p_d).
LogBound epsilon_main(const BoundContext& ctx, const LogBound& H_full);

// Same display with H = h(f_1..f_m) only (no g): a lower bound on
// max_i log|f_i(P)|_v for systems without common zeros.
LogBound epsilon_lojasiewicz_empty(const BoundContext& ctx, const LogBound& H);

// ---------------------------------------------------------------------------
// Dichotomy / dimension thresholds
// ---------------------------------------------------------------------------

// (log eps_f, log eps_g):
//   log eps_f = -4 ([K:Q]^2/N_v) (n+7)^3 (D_f^n+1)^(n+4) D_g
//               (H + 2 ln n + ln m + logR + 12)
//   log eps_g = -([K:Q]/N_v) n D_f^(2n) D_g (H + 4 ln(n+1))
// H >= h(f_1..f_m, p_1..p_d) + h(g).
std::pair<LogBound, LogBound> dichotomy_thresholds(const BoundContext& ctx,
                                                   const LogBound& H);

// (log eps_f', log eps_det):
//   log eps_f' = -4 ([K:Q]^2/N_v) (n+7)^3 (D_f^n+1)^(n+5)
//                (H + 2 ln n + ln m + logR + 12)
//   log eps_det = -([K:Q]/N_v) n D_f^(3n) (H + 4 ln(n+1))
// H = h(f_1..f_m, p_1..p_d).
std::pair<LogBound, LogBound> dimension_thresholds(const BoundContext& ctx,
                                                   const LogBound& H);

// ---------------------------------------------------------------------------
// Reducible / Lojasiewicz family
// ---------------------------------------------------------------------------

// log eps' = worst_eval / (4(n+1)(D^n+1)^(n+2))
//          + ([K:Q]^2/N_v) (n+7)^2 (D^n+1) (H_full + ln((m+1) n D^(2n)) + 21)
//          + 2 logR
LogBound epsilon_reducible(const BoundContext& ctx, const LogBound& H_full,
                           const LogBound& worst_eval);

// log eps_PQ = log_eps_f / (4(n+1)(D_f^n+1)^(n+2))
//            + ([K:Q]^2/N_v) (n+7)^2 (D_f^n+1) (H + ln((m+d) n D_f^(2n)) + 21)
//            + 2 logR
LogBound epsilon_pq(const BoundContext& ctx, const LogBound& H,
                    const LogBound& log_eps_f);

// Upper bound on log dist_v(P, X) for non-empty X:
//   worst_eval / denom + ([K:Q]^2/N_v) (n+7)^2 (D^n+1) (H + ln(m n D^(2n)) + 21)
//   + 2 logR,
// denom = 4(n+1)(D^n+1)^(n+2) when all |f_i(P)|_v <= 1 (all_leq_one), else
// the general-bound denominator 4(n+1) D^(n+1).
LogBound lojasiewicz_nonempty_bound(const BoundContext& ctx, const LogBound& H,
                                    const LogBound& worst_eval, bool all_leq_one = true);

// Zero-dimensional X:
//   max(1,H) [K:Q]^2 (n+3)^3 (D^n+2)! + 2 logR + ln m + worst_eval/(N degX),
// N = 4(n+1) D^(n+1); the factorial is computed exactly.
LogBound lojasiewicz_zerodim_bound(const BoundContext& ctx, const LogBound& H,
                                   const LogBound& worst_eval, const Int& degX);

// ---------------------------------------------------------------------------
// Nullstellensatz / geometry-of-numbers bounds
// ---------------------------------------------------------------------------

enum class NssVariant { BEZOUT, GENERAL };

struct NssSizeBounds {
  Int N;                 // 4(n+1)D^(n+1) (GENERAL; 0 for BEZOUT)
  Int deg_lambda_max;
  LogBound h_lambda_max = LogBound(Rat(0));
};

// BEZOUT: deg <= 4 n D^n, h <= 4 n (n+1) D^n (H + ln m + (n+7) ln(n+1) D),
//         D = max deg f_i.
// GENERAL: D := max(deg g + 1, deg f_i), N = 4(n+1)D^(n+1),
//          deg <= N (deg g + 1), h <= N (n+3)(H + ln(m+1) + (n+8) ln(n+2) D).
NssSizeBounds nullstellensatz_size_bounds(const BoundContext& ctx, const LogBound& H,
                                          NssVariant variant);

// deg X <= D_f^min(n,m), exact integer.
Int bezout_degree_bound(const BoundContext& ctx);

// h(V(f_1..f_m)) <= (H sum 1/D_i + (n+n0) ln(n+1)) prod D_i over the
// n0 = min(n,m) largest deg f_i.
LogBound variety_height_bound(const BoundContext& ctx, const LogBound& H);

// (H0, D0)-genericity requirements: D0 = d D^(m+1),
// H0 = n D^(m+1) (H_fg + 3 ln(n+2)).
std::pair<LogBound, Int> generic_point_requirements(const BoundContext& ctx,
                                                    const LogBound& H_fg);

// Cauchy single-point scheme: an integer evaluation point p with
// |p| >= threshold certifies zeroness of an integer univariate polynomial;
// threshold = max|coeff| + 2 (conservative 1 + e^h(g) + 1).
Rat cauchy_threshold(const MPoly& g);

// ---------------------------------------------------------------------------
// Reporting
// ---------------------------------------------------------------------------

// Enclosure of x/ln(10) (nats -> decimal digits).
LogBound log10_of(const LogBound& nats, unsigned bits = 96);

nlohmann::ordered_json logbound_to_json(const LogBound& b);
LogBound logbound_from_json(const nlohmann::json& j);

struct ThresholdReport {
  std::vector<LogBound> chain;              // genericity threshold per p_i
  LogBound log_eps = LogBound(Rat(0));
  std::vector<std::pair<std::string, LogBound>> aux;  // named constants, ordered

  nlohmann::ordered_json to_json() const;   // deterministic, stable key order
};

}  // namespace pbe
