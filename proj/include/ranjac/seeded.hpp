#ifndef RANJAC_SEEDED_HPP
#define RANJAC_SEEDED_HPP

#include <cstdint>

#include "ranjac/dg_lie.hpp"

namespace ranjac {

// Classical fixtures.
DgLieAlgebra sl2();
DgLieAlgebra heisenberg3();
DgLieAlgebra abelian_lie(std::initializer_list<std::pair<int, int>> dims);

// Graded Heisenberg: x in deg a, y in deg b, [x,y] = z in deg a+b, d = 0.
DgLieAlgebra heisenberg_graded(int a, int b);

// sl2 with the wrong scalar in [h,e]; constructing it throws JacobiFail.
void broken_sl2();

// Deterministic construct-correct dg Lie algebras: direct sums of small Lie
// blocks and acyclic two-term complexes, optionally tensored with a 3-dim
// contractible cdga or an Artin algebra, so differentials and brackets
// interact. dim <= 8, degrees within [-2,2].
DgLieAlgebra seeded_dg_lie(std::uint64_t seed);

// Nilpotent variant (no sl2 block) together with a Maurer-Cartan element,
// nonzero when the algebra allows one.
struct SeededNilpotent {
  DgLieAlgebra g;
  GradedVec mc;
};
SeededNilpotent seeded_nilpotent(std::uint64_t seed);

ArtinLocalAlgebra seeded_artin(std::uint64_t seed);

} // namespace ranjac

#endif
