#pragma once

// Shared problem description: the polynomial system X = V(f_1..f_m) with the
// candidate identity g, plus the triangular solving recipe used to construct
// witness points.  Lives in its own header because witness construction,
// geometry compilation and the certification pipelines all exchange it.

#include <nlohmann/json.hpp>
#include <optional>
#include <utility>
#include <vector>

#include "pbe/mpoly.hpp"

namespace pbe {

// ---------------------------------------------------------------------------
// SolvingRecipe: ordered triangular steps for the dependent coordinates.
// ---------------------------------------------------------------------------

struct RecipeStep {
  enum class Kind { LINEAR, QUADRATIC, RABINOWITSCH_INVERSE, NEWTON, GIVEN };
  Kind kind = Kind::GIVEN;
  // coordinate indices this step solves (exactly 1 except NEWTON)
  std::vector<std::size_t> targets;

  // LINEAR: a(P)*x + b(P) = 0 over previously solved coordinates
  MPoly lin_a, lin_b;
  // QUADRATIC: x^2 = rhs(P); branch = sign (real) or root class mod p
  MPoly quad_rhs;
  Int branch = 1;
  // RABINOWITSCH_INVERSE: x = -1/denom(P)
  MPoly rab_denom;
  // NEWTON: square subsystem over the target coordinates + initial box
  std::vector<MPoly> newton_f;
  std::vector<std::pair<Rat, Rat>> newton_box;  // dyadic endpoints per target
  // GIVEN: exact rational value
  Rat given_value;
};

struct SolvingRecipe {
  std::vector<RecipeStep> steps;
  bool empty() const { return steps.empty(); }
};

nlohmann::ordered_json recipe_to_json(const SolvingRecipe& r);
SolvingRecipe recipe_from_json(const nlohmann::json& j,
                               const std::vector<std::string>& vars);

// ---------------------------------------------------------------------------
// PolySystem
// ---------------------------------------------------------------------------

struct PolySystem {
  std::vector<std::string> vars;
  std::vector<MPoly> f;
  MPoly g;
  unsigned dim = 0;           // asserted d
  bool irreducible = false;   // ASSERTED (true) vs UNKNOWN (false)
  SolvingRecipe recipe;       // may be empty (Newton fallback / user witness)
  // Sound upper bound on the height contribution of g when pooled into the
  // genericity H (attached by the geometry compiler; falls back to h(g)).
  std::optional<LogBound> goal_height_hint;

  // optional parametrization (test oracle only): coordinate i is
  // param_num[i]/param_den[i] in the parameter variables
  std::vector<std::string> param_vars;
  std::vector<std::pair<MPoly, MPoly>> parametrization;

  unsigned n() const { return static_cast<unsigned>(vars.size()); }
  unsigned m() const { return static_cast<unsigned>(f.size()); }
  bool has_parametrization() const { return !parametrization.empty(); }

  void validate() const;  // throws std::invalid_argument

  nlohmann::ordered_json to_json() const;
  static PolySystem from_json(const nlohmann::json& j);
};

}  // namespace pbe
