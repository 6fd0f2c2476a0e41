#pragma once

// Sparse multivariate polynomials over Q: arithmetic, degrees, formal
// derivatives, heights (factorization-free via the lcm trick), Kronecker
// substitution, and the textual expression parser.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pbe/exactnum.hpp"

namespace pbe {

class MPoly {
 public:
  MPoly() = default;
  explicit MPoly(std::vector<std::string> vars) : vars_(std::move(vars)) {}

  static MPoly zero(std::vector<std::string> vars) { return MPoly(std::move(vars)); }
  static MPoly constant(std::vector<std::string> vars, const Rat& c);
  static MPoly variable(std::vector<std::string> vars, std::size_t index);

  const std::vector<std::string>& vars() const { return vars_; }
  std::size_t nvars() const { return vars_.size(); }
  const std::map<std::vector<unsigned>, Rat>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;

  // Total degree; nullopt for the zero polynomial (the "deg 0 flagged" rule:
  // degrees feed exponents in threshold formulas and must never silently
  // default).
  std::optional<unsigned> total_degree() const;
  // Largest exponent of variable i over all terms (0 for the zero polynomial).
  unsigned var_degree(std::size_t i) const;

  MPoly operator+(const MPoly& o) const;
  MPoly operator-(const MPoly& o) const;
  MPoly operator-() const;
  MPoly operator*(const MPoly& o) const;
  MPoly scaled(const Rat& c) const;
  MPoly pow(unsigned e) const;
  bool operator==(const MPoly& o) const { return vars_ == o.vars_ && terms_ == o.terms_; }

  MPoly partial_derivative(std::size_t var) const;
  std::vector<MPoly> gradient() const;

  Rat eval_exact(const std::vector<Rat>& point) const;

  std::vector<Rat> coefficients() const;  // values of all stored terms

  // Canonical printable form; parse(print(f)) == f.
  std::string to_string() const;

  void add_term(const std::vector<unsigned>& exps, const Rat& coeff);

 private:
  std::vector<std::string> vars_;
  std::map<std::vector<unsigned>, Rat> terms_;
};

// Recursive-descent parser over the grammar
//   expr := term (('+'|'-') term)* ; term := factor ('*' factor)* ;
//   factor := base ('^' uint)? ; base := rational | var | '(' expr ')' ;
//   rational := int ('/' uint)?
// Unknown variables and syntax errors raise std::runtime_error with position.
MPoly parse_poly(const std::string& text, const std::vector<std::string>& vars);

// Height of a pooled rational set via the lcm trick:
//   h(A) = ln max(|b|, |b a_1|, ..., |b a_k|), b = lcm of reduced denominators.
// Returned LogBound is exactly ln(M) of an explicit integer (refinable).
LogBound height_of_set(const std::vector<Rat>& elements, unsigned bits = 96);

// The explicit integer M itself (h = ln M); exposed for tests/reports.
Int height_set_integer(const std::vector<Rat>& elements);

// Height of the pooled coefficient set of several polynomials; h(0) := 0.
LogBound height_of_polys(const std::vector<MPoly>& fs, unsigned bits = 96);

// Kronecker substitution z_i -> z^(D^(i-1)) with D = 1 + max per-variable
// degree; denominators are cleared first (preserves zeroness, and then
// h(g_kr) = h(g) since the coefficient multiset is preserved).
MPoly kronecker_substitute(const MPoly& g);

// Clear denominators: multiply by the lcm of all coefficient denominators.
MPoly clear_denominators(const MPoly& g);

}  // namespace pbe
