#ifndef RANJAC_DG_LIE_HPP
#define RANJAC_DG_LIE_HPP

#include <map>
#include <vector>

#include "ranjac/artin.hpp"
#include "ranjac/graded.hpp"

namespace ranjac {

// Sparse bracket entry [a,b] += c * t; only a <= b pairs are accepted, the
// skew rule fills in the rest.
struct BracketTriple {
  Gen a, b, t;
  Rat c;
};

struct DgLieAlgebra {
  Complex cx;
  Tensor2 t2;        // basis of cx ⊗ cx
  Complex tensor_cx; // the tensor-square complex
  ChainMap bracket;  // degree 0 : cx⊗cx -> cx

  GradedVec bracket_of(const GradedVec& x, const GradedVec& y) const;
  // ad_x = [x,-] as a chain map of degree deg(x); x must be homogeneous
  ChainMap ad(const GradedVec& x) const;
  std::size_t dim() const { return cx.space.total_dim(); }
};

// Builds and validates (skew, Jacobi, Leibniz). Failures name the offending
// basis tuple.
DgLieAlgebra make_dg_lie(const Complex& cx,
                         const std::vector<BracketTriple>& triples);
DgLieAlgebra make_dg_lie(const Complex& cx, const ChainMap& bracket);

// Axioms only; used by constructors and by twist.
void validate_dg_lie(const DgLieAlgebra& g);

bool check_mc(const DgLieAlgebra& g, const GradedVec& alpha);

// d_alpha = d + [alpha,-]; requires check_mc, revalidates.
DgLieAlgebra twist(const DgLieAlgebra& g, const GradedVec& alpha);

// Cone of a d-stable bracket ideal given by column spans per degree.
// h = 0 gives back g, h = g gives the contractible algebra.
struct ConeLie {
  DgLieAlgebra cone;
  DgLieAlgebra h;          // the ideal as an algebra of its own
  ChainMap incl;           // h.cx -> g.cx
  ChainMap homotopy;       // degree -1 with ds + sd = id when h == g
  bool contractible = false;
};
ConeLie cone_lie(const DgLieAlgebra& g, const std::map<int, QMat>& h_span);

struct ScalarExtension {
  DgLieAlgebra ext;             // g ⊗ A as a Q-dg Lie algebra
  std::map<int, QMat> ideal;    // span of g ⊗ m
  std::size_t adim = 1;
  // basis vector of g⊗A for (generator of g, A-basis index)
  GradedVec embed(const GradedSpace& gspace, Gen gen, std::size_t ai) const;
};
ScalarExtension extend_scalars(const DgLieAlgebra& g,
                               const ArtinLocalAlgebra& A);

// Validates that f respects d and brackets.
void validate_lie_morphism(const ChainMap& f, const DgLieAlgebra& src,
                           const DgLieAlgebra& tgt);
bool lie_quasi_iso(const ChainMap& f, const DgLieAlgebra& src,
                   const DgLieAlgebra& tgt);

struct DgLieModule {
  DgLieAlgebra g;
  Complex mx;
  Tensor2 gm;       // basis of g ⊗ m
  ChainMap action;  // degree 0 : g⊗m -> m

  GradedVec act(const GradedVec& x, const GradedVec& v) const;
  ChainMap rho(const GradedVec& x) const;
};

DgLieModule make_module(const DgLieAlgebra& g, const Complex& mx,
                        const ChainMap& action);

// The adjoint module of g.
DgLieModule adjoint_module(const DgLieAlgebra& g);

} // namespace ranjac

#endif
