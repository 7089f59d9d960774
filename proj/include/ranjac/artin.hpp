#ifndef RANJAC_ARTIN_HPP
#define RANJAC_ARTIN_HPP

#include <string>
#include <vector>

#include "ranjac/matrix.hpp"

namespace ranjac {

// Finite-dimensional unital commutative Q-algebra, basis adapted so that
// e_0 = 1 and e_1..e_{d-1} span the maximal ideal. Exponent n means
// m^{n+1} = 0, m^n != 0.
struct ArtinLocalAlgebra {
  std::size_t dim = 1;
  std::vector<std::string> labels; // labels[0] == "1"
  // mult.at(k, i*dim+j) = coefficient of e_k in e_i * e_j
  QMat mult;
  int exponent = 0;

  std::vector<Rat> one() const;
  std::vector<Rat> mul(const std::vector<Rat>& a,
                       const std::vector<Rat>& b) const;
  QMat left_mult(const std::vector<Rat>& a) const;
  bool in_max_ideal(const std::vector<Rat>& a) const;

  // commutativity, associativity, unit, adapted basis, nilpotence of m;
  // recomputes the exponent.
  void validate();
};

ArtinLocalAlgebra artin_from_table(std::vector<std::string> labels, QMat mult);

// Q[x_1..x_g]/m^{n+1}; basis = monomials of degree <= n in graded-lex order.
ArtinLocalAlgebra truncated_polynomial(int vars, int n);

// Q[e]/(e^k), exponent k-1.
ArtinLocalAlgebra dual_numbers(int k);

// Unital algebra morphism search A -> B by matching canonical generators of
// m_A/m_A^2 onto the lead basis of m_B/m_B^2; returns the matrix on basis
// vectors if the extension is bijective and multiplicative.
std::optional<QMat> artin_iso(const ArtinLocalAlgebra& A,
                              const ArtinLocalAlgebra& B);

// Checks a linear map given on basis vectors for being a unital algebra
// morphism.
bool is_algebra_morphism(const ArtinLocalAlgebra& A,
                         const ArtinLocalAlgebra& B, const QMat& f);

} // namespace ranjac

#endif
