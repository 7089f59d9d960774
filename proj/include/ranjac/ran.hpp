#ifndef RANJAC_RAN_HPP
#define RANJAC_RAN_HPP

#include <string>
#include <vector>

#include "ranjac/graded.hpp"

namespace ranjac {

// Surjection [m] ->> [n], zero-based assignment of length m.
struct FinSurjection {
  int m = 0, n = 0;
  std::vector<int> map;

  bool operator<(const FinSurjection& o) const {
    return std::tie(m, n, map) < std::tie(o.m, o.n, o.map);
  }
};

// Complete duplicate-free enumeration in lexicographic order.
std::vector<FinSurjection> surjections(int m, int n);

FinSurjection compose(const FinSurjection& outer, const FinSurjection& inner);

struct FiniteSpace {
  std::vector<std::string> pts;

  std::size_t size() const { return pts.size(); }
  std::size_t points_at_level(int k) const;
  std::vector<int> tuple_of(std::size_t idx, int k) const;
  std::size_t index_of(const std::vector<int>& tuple) const;
  // value set of a tuple, as a sorted list of point indices
  std::vector<int> value_set(const std::vector<int>& tuple) const;
};

// Δ^{(π)}: X^[n] -> X^[m] for π: [m] ->> [n]; returns the image point index.
std::size_t diagonal_image(const FinSurjection& s, const FiniteSpace& X,
                           std::size_t x_index);

// Semigroup structure on finite subsets (sorted label lists).
std::vector<std::string> union_map(const std::vector<std::string>& S,
                                   const std::vector<std::string>& T);
std::vector<std::string> project_r(const FiniteSpace& X,
                                   const std::vector<int>& tuple);

// Complex-valued !-module on the skeleton up to a cutoff: a fiber complex
// for every point of X^[k], k <= N, and a structure map for every
// surjection, supported on the diagonal image.
struct RanComplex {
  FiniteSpace X;
  int N = 1;
  std::vector<std::vector<Complex>> levels; // levels[k-1][point]
  // theta[(m,n,assignment)][x] : fiber_m(Δ^σ x) -> fiber_n(x)
  std::map<FinSurjection, std::vector<ChainMap>> theta;

  const Complex& fiber(int k, std::size_t x) const;
  ChainMap theta_at(const FinSurjection& s, std::size_t x) const;
  // functoriality over compositions, θ^{id} = id, chain-map property
  void validate() const;
};

// All fibers M_x on the main diagonal, zero elsewhere, identity transitions.
RanComplex delta_pushforward(const FiniteSpace& X,
                             const std::vector<Complex>& M, int N);

// Two-block convolution: (F ⊗* G)_I = ⊕_{π: I ->> {1,2}} F_{π^{-1}(1)} ⊠
// G_{π^{-1}(2)}. Structure maps act on summands whose block partition
// factors through the surjection and vanish elsewhere.
RanComplex convolution(const RanComplex& F, const RanComplex& G);

// Global sections as the compatible-family space of the skeleton diagram
// (see the documentation on the finite-model reading), with the induced
// differential. `upto` restricts the cutoff; 0 means use F.N.
struct GlobalSections {
  Complex cx;
  // embedding of Γ into the direct sum of all fibers, per degree; rows are
  // ordered level-major, then point-major, then fiber basis
  std::map<int, QMat> embed;
  std::map<int, std::vector<std::tuple<int, std::size_t, int, std::size_t>>>
      rows; // (level k, point, fiber degree, fiber pos) per row
  bool stabilized = false; // dims agree with the one-lower cutoff
};
GlobalSections global_sections(const RanComplex& F, int upto = 0);

// Fiberwise: every θ^{(σ)} restricted to the diagonal image is a
// quasi-isomorphism.
bool admissible(const RanComplex& F);

} // namespace ranjac

#endif
