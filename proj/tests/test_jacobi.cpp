#include <doctest.h>

#include "ranjac/error.hpp"
#include "ranjac/jacobi.hpp"
#include "ranjac/seeded.hpp"

using namespace ranjac;

TEST_CASE("jacobi fibers at a point: abelian degree-1 algebra") {
  FiniteSpace X{{"p"}};
  DgLieAlgebra g = abelian_lie({{1, 2}});
  JacobiComplex J = jacobi_complex(X, {g}, 2);
  // words of g[1] sit in degree 0; Sym^1 + Sym^2 = 2 + 3
  CHECK(J.global.cx.space.dim(0) == 5);
  CHECK(J.global.cx.d.is_zero());
  CHECK(admissible(J.ran));
  GlobalSections G = global_sections(J.ran, 2);
  CHECK(G.cx.space.dim(0) == 5);
}

TEST_CASE("Γ(J_n(g)) equals C̄(g)_n as complexes at a point") {
  for (std::uint64_t s = 0; s < 5; ++s) {
    DgLieAlgebra g = seeded_dg_lie(s);
    if (g.dim() > 4) continue;
    FiniteSpace X{{"p"}};
    JacobiComplex J = jacobi_complex(X, {g}, 2);
    GlobalSections G = global_sections(J.ran, 2);
    ChainMap ev = gamma_evaluation(J, G);
    CHECK(is_chain_map(ev, G.cx, J.global.cx));
    for (int p : J.global.cx.space.degrees()) {
      CHECK(G.cx.space.dim(p) == J.global.cx.space.dim(p));
      CHECK(ev.block(p).rank() == G.cx.space.dim(p));
    }
  }
}

TEST_CASE("two-point sl2 fibers: 9 off-diagonal, Λ²-type 3 on the diagonal") {
  FiniteSpace X{{"p", "q"}};
  DgLieAlgebra g = sl2();
  JacobiComplex J = jacobi_complex(X, {g, g}, 2);
  // off-diagonal fiber at (p,q): words x_p ∧ x_q, 3 * 3 = 9
  const Complex& off = J.ran.fiber(2, X.index_of({0, 1}));
  CHECK(off.space.total_dim() == 9);
  // diagonal fiber (p,p): exact-support-{p} words of length <= 2:
  // 3 letters + 3 length-two words (odd shifted parity forbids squares)
  const Complex& diag = J.ran.fiber(2, X.index_of({0, 0}));
  std::size_t len2 = 0;
  for (int p : diag.space.degrees())
    if (p == -2) len2 += diag.space.dim(p);
  CHECK(diag.space.total_dim() == 6);
  CHECK(len2 == 3);
  CHECK(admissible(J.ran));
  // Γ(J_2) over two points equals C̄(g ⊕ g)_2
  GlobalSections G = global_sections(J.ran, 2);
  ChainMap ev = gamma_evaluation(J, G);
  CHECK(is_chain_map(ev, G.cx, J.global.cx));
  for (int p : J.global.cx.space.degrees())
    CHECK(G.cx.space.dim(p) == J.global.cx.space.dim(p));
  // stabilization: the ran model was built one level beyond n
  GlobalSections Gfull = global_sections(J.ran);
  CHECK(Gfull.stabilized);
}

TEST_CASE("universal deformation algebra of Q^2 in degree 1") {
  FiniteSpace X{{"p"}};
  DgLieAlgebra g = abelian_lie({{1, 2}});
  std::vector<std::size_t> want{3, 6, 10};
  for (int n = 1; n <= 3; ++n) {
    UniversalDeformation U = universal_deformation_algebra(X, {g}, n);
    CHECK(U.R.dim == want[n - 1]);
    CHECK(U.R.exponent == n);
    ArtinLocalAlgebra P = truncated_polynomial(2, n);
    auto iso = artin_iso(P, U.R);
    REQUIRE(iso.has_value());
    CHECK(is_algebra_morphism(P, U.R, *iso));
  }
}

TEST_CASE("universal deformation algebra trivial cases") {
  // no degree-0 cohomology in the Γ complex gives R = Q
  FiniteSpace X{{"p"}};
  DgLieAlgebra g = sl2(); // words all in degrees < 0
  UniversalDeformation U = universal_deformation_algebra(X, {g}, 2);
  CHECK(U.R.dim == 1);
}

TEST_CASE("udr tower of truncated polynomial algebras") {
  FiniteSpace X{{"p"}};
  DgLieAlgebra g = abelian_lie({{1, 2}});
  UdrTower T = udr_system(X, {g}, 3);
  REQUIRE(T.algebras.size() == 3);
  REQUIRE(T.maps.size() == 2);
  for (bool s : T.surjective) CHECK(s);
  // seeded tower maps are unital algebra morphisms by construction
  auto sn = seeded_nilpotent(4);
  UdrTower T2 = udr_system(X, {sn.g}, 2);
  CHECK(T2.algebras.size() == 2);
}

TEST_CASE("quasi-isomorphism invariance of the Jacobi cohomology") {
  // g ↪ g ⊕ (acyclic abelian ideal) is a Lie quasi-iso; the induced map of
  // reduced Chevalley complexes is a filtered quasi-iso, so H(Γ J_n) agrees
  DgLieAlgebra g = heisenberg_graded(1, 0);
  GradedSpace s = g.cx.space;
  std::size_t base0 = s.dim(0);
  s.comps[0].push_back("w.a");
  s.comps[1].push_back("w.b");
  ChainMap d = ChainMap::zero(s, s, 1);
  {
    QMat m(s.dim(1), s.dim(0));
    m.at(s.dim(1) - 1, base0) = 1;
    d.set_block(0, m);
  }
  for (const auto& [p, b] : g.cx.d.blocks) {
    QMat m = d.block(p);
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < b.cols(); ++j) m.at(i, j) += b.at(i, j);
    d.blocks[p] = m;
  }
  Complex cx2 = make_complex(s, d);
  // reuse g's bracket entries (the new generators bracket to zero)
  auto tc = tensor(cx2, cx2);
  ChainMap br = ChainMap::zero(tc.cx.space, s, 0);
  for (const auto& [n, terms] : tc.basis.terms) {
    QMat m(s.dim(n), terms.size());
    bool nz = false;
    for (std::size_t col = 0; col < terms.size(); ++col) {
      auto [p, i, q, j] = terms[col];
      if (static_cast<std::size_t>(i) >= g.cx.space.dim(p) ||
          static_cast<std::size_t>(j) >= g.cx.space.dim(q))
        continue;
      std::size_t pos = g.t2.pos(n, p, i, q, j);
      if (pos == static_cast<std::size_t>(-1)) continue;
      QMat gb = g.bracket.block(n);
      for (std::size_t r = 0; r < gb.rows(); ++r)
        if (gb.at(r, pos) != 0) {
          m.at(r, col) = gb.at(r, pos);
          nz = true;
        }
    }
    if (nz) br.blocks[n] = std::move(m);
  }
  DgLieAlgebra g2 = make_dg_lie(cx2, br);
  ChainMap inc = ChainMap::zero(g.cx.space, s, 0);
  for (int p : g.cx.space.degrees()) {
    QMat m(s.dim(p), g.cx.space.dim(p));
    for (std::size_t i = 0; i < g.cx.space.dim(p); ++i) m.at(i, i) = 1;
    inc.set_block(p, m);
  }
  CHECK(lie_quasi_iso(inc, g, g2));
  for (int n = 1; n <= 3; ++n) {
    ChevalleyComplex Ca = reduced_chevalley(g, n);
    ChevalleyComplex Cb = reduced_chevalley(g2, n);
    ChainMap f = chevalley_functor(inc, Ca, Cb);
    CHECK(filtered_quasi_iso(f, Ca.word_filtration(), Cb.word_filtration()));
    CHECK(quasi_iso(f, Ca.cx, Cb.cx));
  }
}

TEST_CASE("moduli module over an abelian algebra") {
  FiniteSpace X{{"p"}};
  DgLieAlgebra g = abelian_lie({{1, 2}});
  GradedSpace t;
  t.comps[0] = {"m"};
  Complex tm = make_complex(t, ChainMap::zero(t, t, 1));
  auto tc = tensor(g.cx, tm);
  DgLieModule triv =
      make_module(g, tm, ChainMap::zero(tc.cx.space, tm.space, 0));
  ModuliModule M = moduli_module(X, {g}, {triv}, 2);
  CHECK(M.R.R.dim == 6);
  REQUIRE(M.action.size() == 5);
  // the trivial coefficient module: R acts through the counit, so the
  // maximal-ideal generators act by operators squaring to zero within the
  // window; associativity was validated in the constructor
  // X = point: the complex matches chevalley_with_coefficients directly
  ChevalleyCoefficients direct = chevalley_with_coefficients(g, triv, 2);
  for (int p : direct.cx.space.degrees())
    CHECK(direct.cx.space.dim(p) == M.jc.cx.space.dim(p));
}

TEST_CASE("moduli module action associativity on seeded abelian data") {
  FiniteSpace X{{"p", "q"}};
  DgLieAlgebra g1 = abelian_lie({{1, 1}});
  DgLieAlgebra g2 = abelian_lie({{1, 2}});
  DgLieModule a1 = adjoint_module(g1);
  DgLieModule a2 = adjoint_module(g2);
  ModuliModule M = moduli_module(X, {g1, g2}, {a1, a2}, 2); // validates
  CHECK(M.R.R.dim >= 1);
}
