#include <doctest.h>

#include <algorithm>

#include "ranjac/chevalley.hpp"
#include "ranjac/error.hpp"
#include "ranjac/seeded.hpp"

using namespace ranjac;

namespace {

// Independent oracle: classical Chevalley-Eilenberg chain complex of an
// ungraded Lie algebra (basis subsets of generators, homological signs).
std::vector<std::size_t> ce_homology_oracle(const DgLieAlgebra& g) {
  std::size_t n = g.cx.space.dim(0);
  std::vector<std::vector<std::vector<int>>> basis(n + 1);
  for (std::size_t mask = 0; mask < (1u << n); ++mask) {
    std::vector<int> s;
    for (std::size_t t = 0; t < n; ++t)
      if (mask & (1u << t)) s.push_back(static_cast<int>(t));
    basis[s.size()].push_back(s);
  }
  auto index_of = [&](std::size_t k, const std::vector<int>& s) {
    for (std::size_t i = 0; i < basis[k].size(); ++i)
      if (basis[k][i] == s) return i;
    return basis[k].size();
  };
  std::vector<QMat> bdry(n + 1);
  for (std::size_t k = 1; k <= n; ++k) {
    QMat m(basis[k - 1].size(), basis[k].size());
    for (std::size_t c = 0; c < basis[k].size(); ++c) {
      const auto& w = basis[k][c];
      for (std::size_t s = 0; s < w.size(); ++s)
        for (std::size_t t = s + 1; t < w.size(); ++t) {
          GradedVec x = GradedVec::basis(g.cx.space, 0, w[s]);
          GradedVec y = GradedVec::basis(g.cx.space, 0, w[t]);
          GradedVec br = g.bracket_of(x, y);
          if (br.is_zero()) continue;
          std::vector<int> rest;
          for (std::size_t u = 0; u < w.size(); ++u)
            if (u != s && u != t) rest.push_back(w[u]);
          int sgn = ((s + 1 + t + 1) % 2 == 0) ? 1 : -1;
          const auto& xs = br.c.at(0);
          for (std::size_t r = 0; r < xs.size(); ++r) {
            if (xs[r] == 0) continue;
            std::vector<int> w2 = rest;
            int ins = 0;
            while (ins < static_cast<int>(w2.size()) &&
                   w2[ins] < static_cast<int>(r))
              ++ins;
            if (ins < static_cast<int>(w2.size()) &&
                w2[ins] == static_cast<int>(r))
              continue;
            w2.insert(w2.begin() + ins, static_cast<int>(r));
            int s2 = (ins % 2 == 0) ? 1 : -1;
            m.at(index_of(k - 1, w2), c) += Rat(sgn * s2) * xs[r];
          }
        }
    }
    bdry[k] = std::move(m);
  }
  std::vector<std::size_t> betti(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    std::size_t dim = basis[k].size();
    std::size_t rk = k >= 1 ? bdry[k].rank() : 0;
    std::size_t rk1 = k + 1 <= n ? bdry[k + 1].rank() : 0;
    betti[k] = dim - rk - rk1;
  }
  return betti;
}

// Independent oracle: classical CE cochain complex with coefficients,
// reduced to degrees k >= 1 like Hom(C̄(L), M).
std::map<int, std::size_t> ce_coeff_oracle(const DgLieAlgebra& g,
                                           const DgLieModule& M) {
  std::size_t n = g.cx.space.dim(0);
  std::size_t md = M.mx.space.dim(0);
  std::vector<std::vector<std::vector<int>>> basis(n + 2);
  for (std::size_t mask = 0; mask < (1u << n); ++mask) {
    std::vector<int> s;
    for (std::size_t t = 0; t < n; ++t)
      if (mask & (1u << t)) s.push_back(static_cast<int>(t));
    basis[s.size()].push_back(s);
  }
  std::vector<QMat> delta(n + 1);
  for (std::size_t k = 1; k <= n; ++k) {
    if (k + 1 > n) {
      delta[k] = QMat(0, basis[k].size() * md);
      continue;
    }
    QMat m(basis[k + 1].size() * md, basis[k].size() * md);
    for (std::size_t c = 0; c < basis[k].size(); ++c)
      for (std::size_t mm = 0; mm < md; ++mm) {
        for (std::size_t e = 0; e < basis[k + 1].size(); ++e) {
          const auto& w = basis[k + 1][e];
          std::vector<Rat> acc(md, Rat(0));
          for (std::size_t i = 0; i < w.size(); ++i) {
            std::vector<int> rest;
            for (std::size_t u = 0; u < w.size(); ++u)
              if (u != i) rest.push_back(w[u]);
            if (rest == basis[k][c]) {
              GradedVec x = GradedVec::basis(g.cx.space, 0, w[i]);
              GradedVec mv = GradedVec::basis(M.mx.space, 0, mm);
              GradedVec r = M.act(x, mv);
              int sgn = (i % 2 == 0) ? 1 : -1;
              if (!r.is_zero())
                for (std::size_t rr = 0; rr < r.c.at(0).size(); ++rr)
                  acc[rr] += Rat(sgn) * r.c.at(0)[rr];
            }
          }
          for (std::size_t i = 0; i < w.size(); ++i)
            for (std::size_t j = i + 1; j < w.size(); ++j) {
              GradedVec x = GradedVec::basis(g.cx.space, 0, w[i]);
              GradedVec y = GradedVec::basis(g.cx.space, 0, w[j]);
              GradedVec br = g.bracket_of(x, y);
              if (br.is_zero()) continue;
              std::vector<int> rest;
              for (std::size_t u = 0; u < w.size(); ++u)
                if (u != i && u != j) rest.push_back(w[u]);
              const auto& xs = br.c.at(0);
              for (std::size_t r = 0; r < xs.size(); ++r) {
                if (xs[r] == 0) continue;
                std::vector<int> w2 = rest;
                int ins = 0;
                while (ins < static_cast<int>(w2.size()) &&
                       w2[ins] < static_cast<int>(r))
                  ++ins;
                if (ins < static_cast<int>(w2.size()) &&
                    w2[ins] == static_cast<int>(r))
                  continue;
                w2.insert(w2.begin() + ins, static_cast<int>(r));
                if (w2 != basis[k][c]) continue;
                int sgn = ((i + 1 + j + 1) % 2 == 0) ? 1 : -1;
                int s2 = (ins % 2 == 0) ? 1 : -1;
                acc[mm] += Rat(sgn * s2) * xs[r];
              }
            }
          for (std::size_t rr = 0; rr < md; ++rr)
            m.at(e * md + rr, c * md + mm) += acc[rr];
        }
      }
    delta[k] = std::move(m);
  }
  std::map<int, std::size_t> H;
  for (std::size_t k = 1; k <= n; ++k) {
    std::size_t dim = basis[k].size() * md;
    std::size_t rk = delta[k].rank();
    std::size_t rkm = k >= 2 ? delta[k - 1].rank() : 0;
    std::size_t h = dim - rk - rkm;
    if (h) H[static_cast<int>(k)] = h;
  }
  return H;
}

} // namespace

TEST_CASE("abelian Chevalley complex is the truncated exterior algebra") {
  DgLieAlgebra L = abelian_lie({{0, 3}});
  ChevalleyComplex C = chevalley(L, 3);
  CHECK(C.cx.d.is_zero());
  CHECK(C.cx.space.dim(0) == 1);
  CHECK(C.cx.space.dim(-1) == 3);
  CHECK(C.cx.space.dim(-2) == 3);
  CHECK(C.cx.space.dim(-3) == 1);
}

TEST_CASE("sl2 Chevalley cohomology is (1,0,0,1) against the rank oracle") {
  DgLieAlgebra g = sl2();
  ChevalleyComplex C = chevalley(g, 3);
  CHECK(C.cx.space.dim(0) == 1);
  CHECK(C.cx.space.dim(-1) == 3);
  CHECK(C.cx.space.dim(-2) == 3);
  CHECK(C.cx.space.dim(-3) == 1);
  auto H = cohomology_dims(C.cx);
  CHECK(H[0] == 1);
  CHECK(H.count(-1) == 0);
  CHECK(H.count(-2) == 0);
  CHECK(H[-3] == 1);
  auto betti = ce_homology_oracle(g);
  CHECK(betti == std::vector<std::size_t>{1, 0, 0, 1});
  for (int k = 0; k <= 3; ++k)
    CHECK((H.count(-k) ? H[-k] : 0) == betti[k]);
}

TEST_CASE("heisenberg Betti numbers are (1,2,2,1)") {
  DgLieAlgebra g = heisenberg3();
  ChevalleyComplex C = chevalley(g, 3);
  auto H = cohomology_dims(C.cx);
  auto betti = ce_homology_oracle(g);
  CHECK(betti == std::vector<std::size_t>{1, 2, 2, 1});
  for (int k = 0; k <= 3; ++k)
    CHECK((H.count(-k) ? H[-k] : 0) == betti[k]);
}

TEST_CASE("seeded Chevalley complexes validate all axioms") {
  for (std::uint64_t s = 0; s < 12; ++s) {
    DgLieAlgebra g = seeded_dg_lie(s);
    if (g.dim() > 6) continue;
    chevalley(g, 2);
    reduced_chevalley(g, 2);
  }
}

TEST_CASE("the d' part is Sym^k(L[1]) and decalage conjugates it to Λ^k(L)[k]") {
  for (std::uint64_t s = 0; s < 6; ++s) {
    DgLieAlgebra g = seeded_dg_lie(s);
    if (g.dim() > 5) continue;
    ChevalleyComplex C = chevalley(g, 3);
    for (int k = 1; k <= 3; ++k) {
      Decalage dd = decalage(g.cx, k);
      // the word-length-k restriction of d' equals the Sym^k(L[1])
      // differential, matched by labels
      for (int p : dd.sym.cx.space.degrees()) {
        const auto& ls = dd.sym.cx.space.comps.at(p);
        const auto tgt_ls = dd.sym.cx.space.comps.count(p + 1)
                                ? dd.sym.cx.space.comps.at(p + 1)
                                : std::vector<std::string>{};
        QMat restr(tgt_ls.size(), ls.size());
        for (std::size_t j = 0; j < ls.size(); ++j) {
          const auto& cls = C.cx.space.comps.at(p);
          std::size_t cj = std::find(cls.begin(), cls.end(), ls[j]) - cls.begin();
          REQUIRE(cj < cls.size());
          QMat dp = C.dprime.block(p);
          for (std::size_t r = 0; r < tgt_ls.size(); ++r) {
            const auto& ctls = C.cx.space.comps.at(p + 1);
            std::size_t cr =
                std::find(ctls.begin(), ctls.end(), tgt_ls[r]) - ctls.begin();
            REQUIRE(cr < ctls.size());
            restr.at(r, j) = dp.at(cr, cj);
          }
        }
        CHECK(restr == dd.sym.cx.d.block(p));
      }
      // and the decalage isomorphism conjugates it to Λ^k(L)[k]
      Complex tgt;
      tgt.space = dd.wedge_shifted.space;
      tgt.d = dd.wedge_shifted.d;
      CHECK(is_chain_map(dd.iso, dd.sym.cx, tgt));
    }
  }
}

TEST_CASE("coproduct filtration equals the word-length filtration") {
  DgLieAlgebra g1 = sl2();
  DgLieAlgebra g2 = heisenberg3();
  for (const DgLieAlgebra* g : {&g1, &g2}) {
    ChevalleyComplex C = chevalley(*g, 2);
    FilteredComplex fw = C.word_filtration();
    FilteredComplex fc = coproduct_filtration(C);
    REQUIRE(fw.steps.size() == fc.steps.size());
    for (std::size_t i = 0; i < fw.steps.size(); ++i)
      for (int p : C.cx.space.degrees()) {
        QMat a = fw.steps[i].count(p) ? fw.steps[i].at(p)
                                      : QMat(C.cx.space.dim(p), 0);
        QMat b = fc.steps[i].count(p) ? fc.steps[i].at(p)
                                      : QMat(C.cx.space.dim(p), 0);
        CHECK(span_equal(a, b));
      }
  }
}

TEST_CASE("group-like and unit detection") {
  DgLieAlgebra g = sl2();
  ChevalleyComplex C = chevalley(g, 2);
  GradedVec one = GradedVec::basis(C.cx.space, 0, C.loc(C.unit_id).second);
  CHECK(group_like(C, one));
  CHECK(is_unit(C, one));
  GradedVec zero;
  CHECK_FALSE(group_like(C, zero));

  DgLieAlgebra ab = abelian_lie({{1, 1}});
  ChevalleyComplex Cab = chevalley(ab, 2);
  GradedVec u = GradedVec::basis(Cab.cx.space, 0, Cab.loc(Cab.unit_id).second);
  for (std::size_t id = 0; id < Cab.words.size(); ++id)
    if (Cab.word_len(id) == 1 && Cab.loc(id).first == 0)
      u = u + GradedVec::basis(Cab.cx.space, 0, Cab.loc(id).second);
  CHECK_FALSE(group_like(Cab, u));
}

TEST_CASE("functoriality sends quasi-isos to filtered quasi-isos") {
  DgLieAlgebra g = sl2();
  ChevalleyComplex C = chevalley(g, 2);
  ChainMap idm = ChainMap::identity(g.cx.space);
  ChainMap Cf = chevalley_functor(idm, C, C);
  CHECK(Cf.equal_blocks(ChainMap::identity(C.cx.space)));
  for (std::uint64_t s = 0; s < 4; ++s) {
    DgLieAlgebra a = seeded_dg_lie(s);
    if (a.dim() > 4) continue;
    ChevalleyComplex Ca = chevalley(a, 2);
    ChevalleyComplex Cra = reduced_chevalley(a, 2);
    ChainMap f = chevalley_functor(ChainMap::identity(a.cx.space), Ca, Ca);
    CHECK(filtered_quasi_iso(f, Ca.word_filtration(), Ca.word_filtration()));
    ChainMap fr = chevalley_functor(ChainMap::identity(a.cx.space), Cra, Cra);
    CHECK(filtered_quasi_iso(fr, Cra.word_filtration(), Cra.word_filtration()));
  }
}

TEST_CASE("coefficients: trivial module over abelian is a dual exterior") {
  DgLieAlgebra L = abelian_lie({{0, 2}});
  GradedSpace t;
  t.comps[0] = {"m"};
  Complex tm = make_complex(t, ChainMap::zero(t, t, 1));
  auto tc = tensor(L.cx, tm);
  DgLieModule triv =
      make_module(L, tm, ChainMap::zero(tc.cx.space, tm.space, 0));
  ChevalleyCoefficients cc = chevalley_with_coefficients(L, triv, 2);
  CHECK(cc.cx.d.is_zero());
  CHECK(cc.cx.space.dim(1) == 2);
  CHECK(cc.cx.space.dim(2) == 1);
}

TEST_CASE("coefficients: sl2 adjoint matches the direct CE oracle") {
  DgLieAlgebra g = sl2();
  DgLieModule ad = adjoint_module(g);
  ChevalleyCoefficients cc = chevalley_with_coefficients(g, ad, 3);
  auto H = cohomology_dims(cc.cx);
  auto O = ce_coeff_oracle(g, ad);
  CHECK(H == O);

  DgLieAlgebra h = heisenberg3();
  DgLieModule adh = adjoint_module(h);
  ChevalleyCoefficients cch = chevalley_with_coefficients(h, adh, 3);
  CHECK(cohomology_dims(cch.cx) == ce_coeff_oracle(h, adh));
}

TEST_CASE("quillen correspondence roundtrips") {
  for (int base : {0, 1}) {
    DgLieAlgebra g = base == 0 ? sl2() : heisenberg3();
    ChevalleyComplex C = chevalley(g, 2);
    CoalgebraMorphism idf{ChainMap::identity(C.cx.space)};
    Coalgebra co = C.as_coalgebra();
    ChainMap f1 = quillen_forward(idf, co, C);
    CHECK(quillen_mc(co, g, f1));
    CoalgebraMorphism back = quillen_inverse(co, C, f1);
    CHECK(back.f.equal_blocks(idf.f));
  }

  DgLieAlgebra g = sl2();
  ChevalleyComplex C = chevalley(g, 2);
  Coalgebra co = C.as_coalgebra();
  ChainMap zero1 = ChainMap::zero(co.cx.space, shift_space(g.cx.space, 1), 0);
  CHECK(quillen_mc(co, g, zero1));
  CoalgebraMorphism triv = quillen_inverse(co, C, zero1);
  for (int p : co.cx.space.degrees()) {
    QMat b = triv.f.block(p);
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < b.cols(); ++j) {
        bool unit_cell =
            C.id_at(p, i) == C.unit_id && C.id_at(p, j) == C.unit_id;
        CHECK(b.at(i, j) == (unit_cell ? Rat(1) : Rat(0)));
      }
  }

  DgLieAlgebra hb = abelian_lie({{1, 1}});
  ChevalleyComplex Ch = chevalley(hb, 2);
  Coalgebra coh = Ch.as_coalgebra();
  DgLieAlgebra tgt = abelian_lie({{1, 2}});
  ChevalleyComplex Ct = chevalley(tgt, 2);
  ChainMap f1 = ChainMap::zero(coh.cx.space, shift_space(tgt.cx.space, 1), 0);
  std::size_t w1 = 0;
  for (std::size_t id = 0; id < Ch.words.size(); ++id)
    if (Ch.word_len(id) == 1) w1 = id;
  auto [wd, wpos] = Ch.loc(w1);
  QMat blk(2, coh.cx.space.dim(wd));
  blk.at(0, wpos) = 3;
  blk.at(1, wpos) = -2;
  f1.set_block(wd, blk);
  CHECK(quillen_mc(coh, tgt, f1));
  CoalgebraMorphism f = quillen_inverse(coh, Ct, f1);
  ChainMap f1b = quillen_forward(f, coh, Ct);
  CHECK(f1b.equal_blocks(f1));

  auto sn = seeded_nilpotent(2);
  ChevalleyComplex Cn = chevalley(sn.g, 2);
  CoalgebraMorphism idn{ChainMap::identity(Cn.cx.space)};
  Coalgebra con = Cn.as_coalgebra();
  ChainMap p1 = quillen_forward(idn, con, Cn);
  CHECK(quillen_mc(con, sn.g, p1));
  CoalgebraMorphism backn = quillen_inverse(con, Cn, p1);
  CHECK(backn.f.equal_blocks(idn.f));
}
