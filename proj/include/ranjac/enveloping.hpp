#ifndef RANJAC_ENVELOPING_HPP
#define RANJAC_ENVELOPING_HPP

#include "ranjac/chevalley.hpp"

namespace ranjac {

// Length-truncated universal enveloping algebra of a dg Lie algebra, with
// the shuffle-primitive coalgebra structure. PBW basis: non-decreasing
// words, odd-degree letters strictly increasing.
struct EnvelopingTrunc {
  DgLieAlgebra L;
  int N = 0;
  Complex cx;
  std::vector<Word> words;
  std::map<Word, std::size_t> word_id;
  std::vector<std::vector<CoTerm>> coprod;
  std::size_t unit_id = 0;

  int word_len(std::size_t id) const {
    return static_cast<int>(words[id].size());
  }
  std::pair<int, std::size_t> loc(std::size_t id) const;
  std::size_t id_at(int deg, std::size_t pos) const;
  Coalgebra as_coalgebra() const;
  FilteredComplex filtration() const;
  // product of basis words (normalized concatenation); words beyond the
  // length bound are dropped
  std::vector<std::pair<std::size_t, Rat>> mul(std::size_t a,
                                               std::size_t b) const;
};

EnvelopingTrunc enveloping(const DgLieAlgebra& L, int N);

// The connecting data for a d-stable bracket ideal h ⊂ g.
struct Connecting {
  ConeLie cone;          // h, the cone Lie algebra, inclusion
  EnvelopingTrunc U;     // U(Cone)^{<=N}
  ChainMap c_tilde;      // U -> h[1], satisfies the Maurer-Cartan equation
  ChevalleyComplex Ch;   // C(h)_N
  CoalgebraMorphism c;   // U(Cone) -> C(h)_N
  // quotient Lie algebra g/h and the induced coalgebra morphism
  DgLieAlgebra quotient;
  ChainMap quotient_proj; // g -> g/h
  EnvelopingTrunc Uq;     // U(g/h)^{<=N}
  ChainMap u_proj;        // U(Cone) -> U(g/h), a coalgebra quasi-iso
};

Connecting connecting_morphism(const DgLieAlgebra& g,
                               const std::map<int, QMat>& h_span, int N);

// Independent long-exact-sequence oracle for the pair h ⊂ g, in the
// orientation induced by the cone triangle: a class [z] of H^p(g/h) lifts
// to y in g^p and maps to [-d y] in H^{p+1}(h). Returns the matrices of the
// connecting map per degree in the chosen cohomology bases.
struct SnakeOracle {
  std::map<int, CohomDeg> Hq, Hh; // cohomology of g/h and of h
  std::map<int, QMat> delta;      // H^p(g/h) -> H^{p+1}(h)
};
SnakeOracle snake_oracle(const DgLieAlgebra& g, const DgLieAlgebra& h,
                         const ChainMap& incl, const DgLieAlgebra& quotient,
                         const ChainMap& proj);

// The length-1 part of c transported to cohomology through H(proj)^{-1},
// in the same bases as the oracle.
std::map<int, QMat> connecting_first_order(const Connecting& C);

} // namespace ranjac

#endif
