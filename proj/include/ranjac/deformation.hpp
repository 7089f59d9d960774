#ifndef RANJAC_DEFORMATION_HPP
#define RANJAC_DEFORMATION_HPP

#include "ranjac/algebroid.hpp"
#include "ranjac/enveloping.hpp"
#include "ranjac/jacobi.hpp"

namespace ranjac {

// Thom-Sullivan resolution of the derivation family of a cover, on the
// nilpotent de Rham quotient so all algebra identities are exact: the dg
// Lie algebra controlling deformations of the cover datum, together with
// the function module it acts on.
struct DeformationModel {
  CoverDatum cover;
  int D = 2;
  ModuleFamily derfam;
  std::vector<Derivations> ders; // per nerve entry
  ThomSullivan tsO;              // functions
  ThomSullivan tsDer;            // derivations
  DgLieAlgebra g;                // compatible derivation families
  DgLieModule M;                 // functions as a module over g
};

DeformationModel cech_lie(const CoverDatum& cover, int D);

// Per-open trivialization data: s_alpha in Der(O(U_alpha)) ⊗ m given by
// one derivation-coordinate column per maximal-ideal basis vector of R.
struct DeformationDatum {
  ArtinLocalAlgebra R;
  std::vector<QMat> s; // per single-open nerve entry: (der dim) x (R dim)
};

// exp(s_alpha) as automorphism matrices of O(U_alpha) ⊗ R, and the cocycle
// law on overlaps; CocycleFail on violation.
void validate_datum(const DeformationModel& m, const DeformationDatum& datum);

struct FamilyOverBase {
  ArtinLocalAlgebra R;
  GradedVec u; // Maurer-Cartan element of (g ⊗ m)^1, coordinates in g⊗R
};

// u = exp(-s) d exp(s) computed in ⊕_I End(O_I ⊗ R) ⊗ Λ_I; validates that
// the result is derivation-valued, compatible, and Maurer-Cartan.
FamilyOverBase cocycle_to_mc(const DeformationModel& m,
                             const DeformationDatum& datum);

struct DeformationClass {
  Complex CbarR;   // C̄(g)_n ⊗ R
  GradedVec v;     // (u, u²/2!, ..., u^n/n!), a cocycle
  std::vector<Rat> class_coords; // coordinates in H^0-ish basis (degree 1)
};
DeformationClass deformation_class(const DeformationModel& m,
                                   const FamilyOverBase& fam, int n);

struct DeformedAlgebra {
  QMat kernel;      // basis of ker(d_u) inside M^0 ⊗ R, ambient coordinates
  CommAlgebra On;   // multiplication table in the kernel basis
  QMat r_action;    // (dim On) x (rdim * dim On): action of R basis vectors
  bool flat = false;
};
DeformedAlgebra class_to_deformation(const DeformationModel& m,
                                     const FamilyOverBase& fam);

// exp(w)-conjugation of d + u; exact in the nilpotent model.
GradedVec gauge_apply(const DeformationModel& m, const ArtinLocalAlgebra& R,
                      const GradedVec& w, const GradedVec& u);
// order-by-order search for w with gauge_apply(w, u1) = u2
std::optional<GradedVec> gauge_equivalent(const DeformationModel& m,
                                          const ArtinLocalAlgebra& R,
                                          const GradedVec& u1,
                                          const GradedVec& u2);

struct UniversalFamily {
  UniversalDeformation Ru;
  FamilyOverBase fam;
  DeformedAlgebra total;
};
// Requires H^0(g) = 0 (HypothesisFail otherwise); solves the Maurer-Cartan
// equation degree by degree in the maximal ideal starting from the
// tautological first-order element.
UniversalFamily universal_family(const DeformationModel& m, int n);

// Base map R^u -> R with pullback gauge-equivalent to the given family;
// constructed by linear solve on the generators, then verified.
struct UniversalityWitness {
  QMat alpha; // (R.dim) x (Ru.dim)
  GradedVec gauge; // the gauge element matching the pullback
  bool verified = false;
};
UniversalityWitness universality_witness(const DeformationModel& m,
                                         const UniversalFamily& uf,
                                         const FamilyOverBase& given);

// Higher Kodaira-Spencer data over S = Spec R: the connecting morphism of
// the pair (relative tangent resolution) ⊂ (base-preserving fields), the
// classical first-order comparison, and Diff^{<=n}(S) from the algebroid
// machinery.
struct HigherKS {
  DgLieAlgebra hR;     // g ⊗ R twisted by u
  DgLieAlgebra gtilde; // hR ⋊ Der(R) with the defect differential
  Connecting conn;     // connecting morphism for hR ⊂ gtilde, bound n
  SnakeOracle snake;   // independent LES oracle for the same pair
  std::map<int, QMat> c1; // first-order part on cohomology
  DiffOperators diff;  // Diff^{<=n}(R)
  bool first_order_matches = false;
};
HigherKS higher_ks(const DeformationModel& m, const FamilyOverBase& fam,
                   int n);

} // namespace ranjac

#endif
