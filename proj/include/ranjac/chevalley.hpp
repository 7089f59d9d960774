#ifndef RANJAC_CHEVALLEY_HPP
#define RANJAC_CHEVALLEY_HPP

#include <optional>
#include <tuple>
#include <vector>

#include "ranjac/dg_lie.hpp"

namespace ranjac {

// Sparse tensor-square element: (id1, id2, coeff) over a global basis
// enumeration.
using CoTerm = std::tuple<std::size_t, std::size_t, Rat>;

// A complex with a coproduct given sparsely over the global basis order
// (degrees ascending, positions ascending). Unital when `unit` is set.
struct Coalgebra {
  Complex cx;
  std::vector<std::vector<CoTerm>> coprod; // by basis id
  std::vector<Rat> counit;                 // by basis id
  std::optional<std::size_t> unit;

  std::size_t size() const { return coprod.size(); }
  std::pair<int, std::size_t> loc(std::size_t id) const;
  std::size_t id_at(int deg, std::size_t pos) const;
  GradedVec vec(std::size_t id) const;
  // d as sparse columns over ids
  std::vector<std::vector<std::pair<std::size_t, Rat>>> d_sparse() const;

  void validate() const; // coassociativity, Koszul cocommutativity,
                         // coderivation identity, counit laws
};

// Truncated Chevalley complex of a dg Lie algebra in the wedge picture:
// word of length k made of generators of L, sitting in degree
// (sum of generator degrees) - k.
struct ChevalleyComplex {
  DgLieAlgebra L;
  int n = 0;
  bool reduced = false;

  Complex cx;
  ChainMap dprime, dsecond; // d = d' + d''
  std::vector<Word> words;  // by basis id, global basis order
  std::map<Word, std::size_t> word_id;
  std::vector<std::vector<CoTerm>> coprod; // proper splittings only if reduced
  std::size_t unit_id = 0;                 // unreduced only

  int word_len(std::size_t id) const { return static_cast<int>(words[id].size()); }
  std::pair<int, std::size_t> loc(std::size_t id) const;
  std::size_t id_at(int deg, std::size_t pos) const;

  FilteredComplex word_filtration() const;
  Coalgebra as_coalgebra() const;
};

ChevalleyComplex chevalley(const DgLieAlgebra& L, int n);
ChevalleyComplex reduced_chevalley(const DgLieAlgebra& L, int n);

// ker(C -> C^{⊗k} -> (C+)^{⊗k}) for k = 1..n+1, as column spans per degree.
// Matches the word-length filtration step by step.
FilteredComplex coproduct_filtration(const ChevalleyComplex& C);

bool group_like(const ChevalleyComplex& C, const GradedVec& u);
bool is_unit(const ChevalleyComplex& C, const GradedVec& u);

// C(φ)_n for a validated Lie morphism φ: functorial on words.
ChainMap chevalley_functor(const ChainMap& phi, const ChevalleyComplex& src,
                           const ChevalleyComplex& tgt);

// Reduced Chevalley complex with coefficients: Hom(C̄(L)_n, M) with
// ∂g = ∂̄g - (-1)^{|g|} g∘d.
struct ChevalleyCoefficients {
  ChevalleyComplex base; // reduced
  DgLieModule M;
  Complex cx; // basis pairs (word, module generator)
  // id <-> (word id, module gen)
  std::vector<std::pair<std::size_t, Gen>> hom_basis;
};
ChevalleyCoefficients chevalley_with_coefficients(const DgLieAlgebra& L,
                                                  const DgLieModule& M, int n);

// --- Quillen correspondence -------------------------------------------------

struct CoalgebraMorphism {
  ChainMap f; // degree 0
};

// p1 ∘ f : the Λ^1 component, valued in g[1] = shift(g, 1).
ChainMap quillen_forward(const CoalgebraMorphism& f, const Coalgebra& src,
                         const ChevalleyComplex& tgt);

// Maurer-Cartan condition on f1 ∈ Hom(C, g[1]) in the convolution algebra:
// f1∘d_C - d_{g[1]}∘f1 - 1/2 [,]∘(f1⊗f1)∘Δ̄ = 0 and f1(unit) = 0.
bool quillen_mc(const Coalgebra& C, const DgLieAlgebra& g, const ChainMap& f1);

// Unique coalgebra-morphism extension of an MC element f1; validates chain
// and coalgebra morphism properties of the result.
CoalgebraMorphism quillen_inverse(const Coalgebra& C,
                                  const ChevalleyComplex& tgt,
                                  const ChainMap& f1);

void validate_coalgebra_morphism(const ChainMap& f, const Coalgebra& src,
                                 const Coalgebra& tgt);

} // namespace ranjac

#endif
