#ifndef RANJAC_DE_RHAM_HPP
#define RANJAC_DE_RHAM_HPP

#include <map>
#include <optional>
#include <vector>

#include "ranjac/graded.hpp"

namespace ranjac {

// Finite-dimensional commutative unital algebra with basis e_0 = 1.
struct CommAlgebra {
  std::size_t dim = 0;
  std::vector<std::string> labels;
  QMat mult; // mult.at(k, i*dim+j)

  std::vector<Rat> one() const;
  std::vector<Rat> mul(const std::vector<Rat>& a,
                       const std::vector<Rat>& b) const;
  void validate() const;
};

CommAlgebra scalar_algebra(); // Q
CommAlgebra poly_quotient(int k); // Q[x]/(x^k)

// Algebraic de Rham algebra of Q[t_i | i in I]/(Σt_i − 1), truncated at
// polynomial degree D, in the normal form eliminating the largest index.
// Basis elements are pairs (exponent vector over the kept variables,
// subset of kept dt's); form degree = subset size.
struct DeRhamAlgebra {
  std::vector<int> I; // sorted open indices
  int D = 0;
  bool weight_cut = false; // nilpotent quotient: weight <= D
  std::vector<int> vars; // I minus its maximum
  Complex cx;
  std::vector<std::pair<std::vector<int>, std::vector<int>>> basis; // by id
  std::map<std::pair<std::vector<int>, std::vector<int>>, std::size_t> id_of;

  std::pair<int, std::size_t> loc(std::size_t id) const;
  std::size_t id_at(int deg, std::size_t pos) const;
  // product of basis elements, dropping monomials beyond the window
  std::vector<std::pair<std::size_t, Rat>> mul(std::size_t a,
                                               std::size_t b) const;
  std::size_t unit_id() const;
};

DeRhamAlgebra de_rham(std::vector<int> I, int D);

// Nilpotent quotient Ω_I/(monomials of weight > D), weight = polynomial
// degree + form degree. The quotient is an honest finite-dimensional cdga
// (products and Jacobi hold exactly), used by the deformation pipeline.
DeRhamAlgebra de_rham_nilpotent(std::vector<int> I, int D);

// ψ : Ω_I ->> Ω_K for K ⊂ I; a dg-algebra morphism (checked in tests).
ChainMap de_rham_projection(const DeRhamAlgebra& from, const DeRhamAlgebra& to);

// Degree −1 map with dh + hd = id − unit∘augmentation on polynomial degree
// <= D−1 (Euler-contraction integration).
ChainMap poincare_homotopy(const DeRhamAlgebra& om);

// Family of modules over the nerve: dims per nonempty subset (absent = 0)
// and restriction maps K ⊂ I.
struct ModuleFamily {
  std::map<std::vector<int>, std::size_t> dims;
  std::map<std::pair<std::vector<int>, std::vector<int>>, QMat> res;

  std::size_t dim_at(const std::vector<int>& I) const;
  QMat res_at(const std::vector<int>& K, const std::vector<int>& I) const;
  void validate() const; // functoriality over chains K ⊂ J ⊂ I
};

struct CoverDatum {
  std::vector<std::string> opens;
  std::map<std::vector<int>, CommAlgebra> O;
  std::map<std::pair<std::vector<int>, std::vector<int>>, QMat> res;

  std::size_t odim(const std::vector<int>& I) const;
  QMat ores(const std::vector<int>& K, const std::vector<int>& I) const;
  ModuleFamily structure_family() const;
  void validate() const; // restrictions are unital algebra morphisms,
                         // functorial over chains
  std::vector<std::vector<int>> nerve() const; // nonempty I with O_I != 0
};

// Thom-Sullivan complex of a module family: compatible families inside
// ⊕_I M(U_I) ⊗ Ω_I.
struct ThomSullivan {
  CoverDatum cover;
  ModuleFamily family;
  int D = 0;
  std::vector<DeRhamAlgebra> omegas;       // per nerve entry
  std::vector<std::vector<int>> nerve;
  Complex ambient;                         // the direct sum
  std::map<int, QMat> q_basis;             // compatible subspace per degree
  Complex cx;                              // the subcomplex
  // weight window: monomials with polynomial degree + form degree <= D form
  // a d- and ψ-stable subcomplex on which the truncation is exact; H is
  // reported from here
  std::map<int, QMat> w_basis; // in ambient coordinates
  Complex wcx;
  // ambient coordinates: (nerve index, module gen, omega basis id)
  std::map<int, std::vector<std::tuple<std::size_t, std::size_t, std::size_t>>>
      rows;

  // product on Q when the family is the structure family; nullopt when the
  // result leaves the polynomial window
  std::optional<GradedVec> q_mul(const GradedVec& a, const GradedVec& b) const;
  // embedding of a global section (Čech 0-cocycle of the structure family)
  GradedVec embed_global(const std::vector<Rat>& cech0) const;
};

ThomSullivan thom_sullivan(const CoverDatum& cover, const ModuleFamily& fam,
                           int D, bool weight_cut = false);
ThomSullivan thom_sullivan(const CoverDatum& cover, int D,
                           bool weight_cut = false);

// Alternating Čech complex of a module family (comparison oracle).
Complex cech_complex(const CoverDatum& cover, const ModuleFamily& fam);
Complex cech_complex(const CoverDatum& cover);

struct DolbeaultReport {
  bool structure_quasi_iso = false; // H(Q) matches the Čech oracle
  bool flat_on_acyclic = false;     // Q ⊗ cone(id) is acyclic
  std::map<int, std::size_t> h_q, h_cech;
};
DolbeaultReport dolbeault_check(const ThomSullivan& Q);

} // namespace ranjac

#endif
