#ifndef RANJAC_JACOBI_HPP
#define RANJAC_JACOBI_HPP

#include "ranjac/chevalley.hpp"
#include "ranjac/ran.hpp"

namespace ranjac {

// J_n(g) over a finite discrete model: the reduced Chevalley complex of the
// diagonal pushforward. The fiber at x in X^[k] consists of the words whose
// point support equals the value set of x (brackets and differentials act
// within a point, so these fibers are subcomplexes); the global-sections
// model is the reduced Chevalley complex of the direct sum ⊕_x g_x.
struct JacobiComplex {
  FiniteSpace X;
  int n = 1;
  DgLieAlgebra gX;            // direct sum over points, point-prefixed labels
  ChevalleyComplex global;    // reduced Chevalley complex of gX, = Γ model
  RanComplex ran;             // the !-module realization, cutoff n+1
  std::vector<std::vector<int>> word_support; // per word id, sorted points
  // fiber word ids per value set (keyed by the sorted point list)
  std::map<std::vector<int>, std::vector<std::size_t>> fiber_words;
};

JacobiComplex jacobi_complex(const FiniteSpace& X,
                             const std::vector<DgLieAlgebra>& g, int n);

// k ⊕ (H^0 Γ J_n(g))^* with the product dual to the reduced coproduct.
struct UniversalDeformation {
  ArtinLocalAlgebra R;
  QMat h0_reps;    // degree-0 cocycle representatives of the Γ model
  ChevalleyComplex gamma; // the Γ model the dual was computed from
};
UniversalDeformation universal_deformation_algebra(
    const FiniteSpace& X, const std::vector<DgLieAlgebra>& g, int n);
// the same construction from a reduced Chevalley complex directly
UniversalDeformation udr_from_chevalley(const ChevalleyComplex& Cbar);

struct UdrTower {
  std::vector<UniversalDeformation> algebras; // n = 1..n_max
  std::vector<QMat> maps; // R_{n+1} -> R_n on basis vectors
  std::vector<bool> surjective;
};
UdrTower udr_system(const FiniteSpace& X, const std::vector<DgLieAlgebra>& g,
                    int n_max);

// J_n(g,V) as its global-sections complex, with the R^u_n-action on the
// cochain level through the canonical projection onto H^0 classes.
struct ModuliModule {
  ChevalleyCoefficients jc; // the complex J_n(g, V)
  UniversalDeformation R;
  // action matrices of the maximal-ideal generators (one per H^0 class),
  // per degree of jc.cx
  std::vector<ChainMap> action;
};
ModuliModule moduli_module(const FiniteSpace& X,
                           const std::vector<DgLieAlgebra>& g,
                           const std::vector<DgLieModule>& V, int n);

// Direct sum of a pointwise family, with point-prefixed labels.
DgLieAlgebra direct_sum_lie(const FiniteSpace& X,
                            const std::vector<DgLieAlgebra>& g);
DgLieModule direct_sum_module(const FiniteSpace& X, const DgLieAlgebra& gX,
                              const std::vector<DgLieModule>& V);

// Canonical evaluation Γ(J_n) -> C̄(gX)_n used by the comparison tests:
// evaluates a compatible family at one chosen point per value set.
ChainMap gamma_evaluation(const JacobiComplex& J, const GlobalSections& G);

} // namespace ranjac

#endif
