#ifndef RANJAC_ALGEBROID_HPP
#define RANJAC_ALGEBROID_HPP

#include "ranjac/chevalley.hpp"
#include "ranjac/de_rham.hpp"
#include "ranjac/dg_lie.hpp"

namespace ranjac {

// Derivations of a finite-dimensional commutative algebra, as endomorphism
// matrices, with the commutator bracket and the O-module structure.
struct Derivations {
  CommAlgebra O;
  std::vector<QMat> basis; // dim x dim endomorphisms
  std::size_t dim() const { return basis.size(); }
  // coordinates of a derivation matrix in the chosen basis
  std::optional<std::vector<Rat>> coords(const QMat& der) const;
};

Derivations derivations(const CommAlgebra& O);

// Lie-Rinehart pair: O-module L with a Q-Lie bracket and an anchor into
// Der(O), subject to [a, f b] = f [a,b] + τ(a)(f) b.
struct LieRinehart {
  CommAlgebra O;
  std::size_t ldim = 0;
  std::vector<std::string> llabels;
  QMat bracket; // (ldim, ldim*ldim)
  QMat oact;    // (ldim, odim*ldim): f e_j
  std::vector<QMat> anchor; // per L-generator, a derivation matrix

  std::vector<Rat> brk(const std::vector<Rat>& a,
                       const std::vector<Rat>& b) const;
  std::vector<Rat> act(const std::vector<Rat>& f,
                       const std::vector<Rat>& a) const;
  QMat anchor_of(const std::vector<Rat>& a) const;
  void validate() const;
};

LieRinehart lie_rinehart(CommAlgebra O, std::vector<std::string> llabels,
                         QMat bracket, QMat oact, std::vector<QMat> anchor);

// Der(O) as a Lie-Rinehart pair with the identity anchor.
LieRinehart tangent_algebroid(const CommAlgebra& O);

// Twisted enveloping algebra up to filtration level n: the quotient of
// O ⊕ U_Q(L)^+ by the two-sided ideal generated by
// a·(f b) − (f a)·b − τ(a)(f) b, with f·a = f a, a·f = f a + τ(a)(f).
struct TwistedEnveloping {
  LieRinehart A;
  int n = 1;
  // basis: O-part (dim odim), then classes of PBW words length 1..n
  std::size_t odim = 0;
  std::size_t dim = 0;
  std::vector<std::string> labels;
  QMat mult;                   // full multiplication table (windowed)
  std::vector<int> filt_level; // per basis vector
  // coalgebra (descends from U_Q(L) when the ideal is a coideal)
  std::vector<std::vector<CoTerm>> coprod;
  bool coalgebra_ok = false;

  std::vector<Rat> mul(const std::vector<Rat>& a,
                       const std::vector<Rat>& b) const;
};

TwistedEnveloping twisted_enveloping(const LieRinehart& A, int n);

struct DiffOperators {
  TwistedEnveloping U;
  // realization inside End(O): images of the basis vectors
  std::vector<QMat> realization;
  std::size_t realized_dim = 0; // rank of the realization, reported
};

DiffOperators diff_operators(const CommAlgebra& O, int n);

} // namespace ranjac

#endif
