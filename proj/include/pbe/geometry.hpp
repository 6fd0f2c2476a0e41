#pragma once

// Ruler-and-compass construction DSL: a line-oriented source format for
// free/const objects, polynomial equalities, forbidden loci (compiled to
// Rabinowitsch dummy equations) and a polynomial goal; the compiler emits a
// PolySystem with canonical variables (free parameters first), the parameter
// counts, the dimension guess d = n - m, and a triangular SolvingRecipe when
// the construction is sequential.

#include "pbe/system.hpp"
#include "pbe/witness.hpp"

namespace pbe {

// ---------------------------------------------------------------------------
// GeoProgram (AST)
// ---------------------------------------------------------------------------

struct GeoObject {
  enum class Kind { POINT, LINE, CIRCLE, CONIC };
  Kind kind = Kind::POINT;
  std::string name;
  bool is_const = false;
  std::vector<Rat> const_params;  // point: (x,y); line: (a,b); circle: (a,b,r)

  bool operator==(const GeoObject&) const = default;
};

struct GeoProgram {
  std::vector<GeoObject> objects;         // declaration order
  std::vector<std::string> requirements;  // constraint text, canonical-trimmed
  std::vector<std::string> forbids;       // polyexpr text (constraint f != 0)
  std::string goal;                       // polyexpr text (goal = 0)
  bool assume_irreducible = false;
  std::optional<unsigned> assume_dim;

  bool operator==(const GeoProgram&) const = default;
  std::string to_source() const;  // pretty-print; reparses to an equal AST
};

// Line-oriented grammar ('#' comments, blank lines skipped):
//   const <name> = point(q, q) | line(q, q) | circle(q, q, q)
//   free <name> : point | line | circle | conic
//   require <builtin>(args...)  |  require <polyexpr> = 0
//   forbid <polyexpr> = 0       |  forbid distinct(P, Q)
//   goal <polyexpr> = 0
//   assume irreducible          |  assume dim <d>
// Builtins: on_line(P,l), on_circle(P,k), on_conic(P,C), parallel(l1,l2),
// perpendicular(l1,l2), tangent(l,k), angle_eq(l1,l2,l3,l4).  polyexpr is the
// polynomial grammar over dotted coordinates (A.x, l.a, k.r, ...) with vector
// sugar: point names are 2-vectors, U - V / U + V on vectors, dot(U, V).
// Errors carry 1-based line numbers.
GeoProgram parse_geo(const std::string& text);

// ---------------------------------------------------------------------------
// CompiledSystem
// ---------------------------------------------------------------------------

struct CompiledSystem {
  PolySystem system;                     // vars x1..xn, free parameters first
  std::vector<std::string> coord_names;  // source dotted name per variable
  unsigned n_f = 0;  // parameters of free objects
  unsigned n_e = 0;  // equalities
  unsigned n_i = 0;  // inequalities (forbids)
  int d_guess = 0;   // n - m (may be negative for overdetermined programs)
};

// Each requirement emits one polynomial; each forbid emits one dummy variable
// u_j and the equation 1 + u_j * f = 0.  Counting: n = n_f + n_i, m = n_e +
// n_i.  The goal carries a structural height hint (products/atoms contribute
// their exact heights, each scalar +/- contributes + ln 2) attached to the
// PolySystem.  Non-triangular constructions compile with an empty recipe.
CompiledSystem compile(const GeoProgram& prog);

// ---------------------------------------------------------------------------
// Dimension guess check (delegates to pipeline.dimension_by_example)
// ---------------------------------------------------------------------------

struct DimGuessResult {
  enum class Status { CONFIRMED, INCONCLUSIVE };
  Status status = Status::INCONCLUSIVE;
  unsigned d = 0;          // confirmed dimension when CONFIRMED
  std::string reason;      // for INCONCLUSIVE
};

DimGuessResult dimension_guess_check(const CompiledSystem& cs, const Witness& witness,
                                     const BoundContext& ctx);

}  // namespace pbe
