#include "ranjac/jacobi.hpp"

#include <algorithm>
#include <set>

#include "ranjac/config.hpp"
#include "ranjac/error.hpp"

namespace ranjac {

DgLieAlgebra direct_sum_lie(const FiniteSpace& X,
                            const std::vector<DgLieAlgebra>& g) {
  if (g.size() != X.size()) fail(Err::ShapeMismatch, "direct_sum_lie");
  GradedSpace s;
  std::vector<std::map<int, std::size_t>> offs(g.size());
  for (std::size_t b = 0; b < g.size(); ++b)
    for (int p : g[b].cx.space.degrees()) {
      offs[b][p] = s.dim(p);
      for (const auto& l : g[b].cx.space.comps.at(p))
        s.comps[p].push_back(X.pts[b] + ":" + l);
    }
  ChainMap d = ChainMap::zero(s, s, 1);
  for (int p : s.degrees()) {
    QMat m(s.dim(p + 1), s.dim(p));
    bool nz = false;
    for (std::size_t b = 0; b < g.size(); ++b) {
      QMat db = g[b].cx.d.block(p);
      if (db.is_zero()) continue;
      std::size_t ro = offs[b].count(p + 1) ? offs[b][p + 1] : 0;
      std::size_t co = offs[b][p];
      for (std::size_t i = 0; i < db.rows(); ++i)
        for (std::size_t j = 0; j < db.cols(); ++j)
          if (db.at(i, j) != 0) {
            m.at(ro + i, co + j) = db.at(i, j);
            nz = true;
          }
    }
    if (nz) d.blocks[p] = std::move(m);
  }
  Complex cx = make_complex(s, d);
  std::vector<BracketTriple> tr;
  for (std::size_t b = 0; b < g.size(); ++b) {
    // expand each block bracket into global triples (a <= b convention is
    // preserved by the offset shift within a degree)
    const auto& gb = g[b];
    for (const auto& [n, terms] : gb.t2.terms)
      for (std::size_t col = 0; col < terms.size(); ++col) {
        auto [p, i, q, j] = terms[col];
        if (std::make_pair(p, i) > std::make_pair(q, j)) continue;
        QMat m = gb.bracket.block(n);
        for (std::size_t r = 0; r < m.rows(); ++r) {
          if (m.at(r, col) == 0) continue;
          Gen A{p, static_cast<int>(i + offs[b][p])};
          Gen B{q, static_cast<int>(j + offs[b][q])};
          Gen T{n, static_cast<int>(r + offs[b][n])};
          tr.push_back({A, B, T, m.at(r, col)});
        }
      }
  }
  return make_dg_lie(cx, tr);
}

DgLieModule direct_sum_module(const FiniteSpace& X, const DgLieAlgebra& gX,
                              const std::vector<DgLieModule>& V) {
  if (V.size() != X.size()) fail(Err::ShapeMismatch, "direct_sum_module");
  GradedSpace s;
  std::vector<std::map<int, std::size_t>> offs(V.size());
  std::vector<std::map<int, std::size_t>> goffs(V.size());
  {
    // recompute the generator offsets of gX from the per-point algebras
    std::map<int, std::size_t> run;
    for (std::size_t b = 0; b < V.size(); ++b)
      for (int p : V[b].g.cx.space.degrees()) {
        goffs[b][p] = run.count(p) ? run[p] : 0;
        run[p] = goffs[b][p] + V[b].g.cx.space.dim(p);
      }
  }
  for (std::size_t b = 0; b < V.size(); ++b)
    for (int p : V[b].mx.space.degrees()) {
      offs[b][p] = s.dim(p);
      for (const auto& l : V[b].mx.space.comps.at(p))
        s.comps[p].push_back(X.pts[b] + ":" + l);
    }
  ChainMap d = ChainMap::zero(s, s, 1);
  for (int p : s.degrees()) {
    QMat m(s.dim(p + 1), s.dim(p));
    bool nz = false;
    for (std::size_t b = 0; b < V.size(); ++b) {
      QMat db = V[b].mx.d.block(p);
      if (db.is_zero()) continue;
      std::size_t ro = offs[b].count(p + 1) ? offs[b][p + 1] : 0;
      std::size_t co = offs[b][p];
      for (std::size_t i = 0; i < db.rows(); ++i)
        for (std::size_t j = 0; j < db.cols(); ++j)
          if (db.at(i, j) != 0) {
            m.at(ro + i, co + j) = db.at(i, j);
            nz = true;
          }
    }
    if (nz) d.blocks[p] = std::move(m);
  }
  Complex mx = make_complex(s, d);
  auto tc = tensor(gX.cx, mx);
  ChainMap act = ChainMap::zero(tc.cx.space, s, 0);
  std::map<int, QMat> blocks;
  for (const auto& [n, terms] : tc.basis.terms) {
    QMat m(s.dim(n), terms.size());
    bool nz = false;
    for (std::size_t col = 0; col < terms.size(); ++col) {
      auto [p, gi, q, mj] = terms[col];
      // locate the point blocks
      for (std::size_t b = 0; b < V.size(); ++b) {
        std::size_t go = goffs[b].count(p) ? goffs[b][p] : 0;
        std::size_t gn = V[b].g.cx.space.dim(p);
        std::size_t mo = offs[b].count(q) ? offs[b][q] : 0;
        std::size_t mn = V[b].mx.space.dim(q);
        if (static_cast<std::size_t>(gi) < go ||
            static_cast<std::size_t>(gi) >= go + gn)
          continue;
        if (static_cast<std::size_t>(mj) < mo ||
            static_cast<std::size_t>(mj) >= mo + mn)
          continue;
        GradedVec x = GradedVec::basis(V[b].g.cx.space, p, gi - go);
        GradedVec v = GradedVec::basis(V[b].mx.space, q, mj - mo);
        GradedVec r = V[b].act(x, v);
        auto it = r.c.find(n);
        if (it == r.c.end()) continue;
        std::size_t ro = offs[b].count(n) ? offs[b][n] : 0;
        for (std::size_t rr = 0; rr < it->second.size(); ++rr)
          if (it->second[rr] != 0) {
            m.at(ro + rr, col) = it->second[rr];
            nz = true;
          }
      }
    }
    if (nz) blocks[n] = std::move(m);
  }
  for (auto& [n, m] : blocks) act.blocks[n] = std::move(m);
  return make_module(gX, mx, act);
}

JacobiComplex jacobi_complex(const FiniteSpace& X,
                             const std::vector<DgLieAlgebra>& g, int n) {
  if (n < 1) fail(Err::BadInput, "jacobi truncation must be >= 1");
  JacobiComplex J;
  J.X = X;
  J.n = n;
  J.gX = direct_sum_lie(X, g);
  J.global = reduced_chevalley(J.gX, n);
  // support of each word: which point block each letter belongs to
  std::vector<std::pair<int, std::size_t>> gen_point; // per (deg,idx) flat
  std::map<std::pair<int, int>, int> point_of;
  {
    std::map<int, std::size_t> run;
    for (std::size_t b = 0; b < g.size(); ++b)
      for (int p : g[b].cx.space.degrees()) {
        std::size_t off = run.count(p) ? run[p] : 0;
        for (std::size_t i = 0; i < g[b].cx.space.dim(p); ++i)
          point_of[{p, static_cast<int>(off + i)}] = static_cast<int>(b);
        run[p] = off + g[b].cx.space.dim(p);
      }
  }
  J.word_support.resize(J.global.words.size());
  for (std::size_t id = 0; id < J.global.words.size(); ++id) {
    std::set<int> sup;
    for (const auto& gen : J.global.words[id])
      sup.insert(point_of.at({gen.deg, gen.idx}));
    J.word_support[id] = std::vector<int>(sup.begin(), sup.end());
    J.fiber_words[J.word_support[id]].push_back(id);
  }
  // ran model: cutoff n+1 so stabilization can be reported honestly
  int N = n + 1;
  RanComplex R;
  R.X = X;
  R.N = N;
  // one fiber complex per value set, shared across points
  std::map<std::vector<int>, Complex> fiber_cx;
  for (const auto& [sup, ids] : J.fiber_words) {
    GradedSpace s;
    std::map<std::size_t, std::pair<int, std::size_t>> pos;
    for (std::size_t id : ids) {
      auto [deg, gpos] = J.global.loc(id);
      (void)gpos;
      pos[id] = {deg, s.dim(deg)};
      s.comps[deg].push_back(
          J.global.cx.space.comps.at(deg)[J.global.loc(id).second]);
    }
    ChainMap d = ChainMap::zero(s, s, 1);
    std::map<int, QMat> blocks;
    for (std::size_t id : ids) {
      auto [deg, fpos] = pos[id];
      auto [gdeg, gpos] = J.global.loc(id);
      QMat b = J.global.cx.d.block(gdeg);
      for (std::size_t r = 0; r < b.rows(); ++r) {
        if (b.at(r, gpos) == 0) continue;
        std::size_t tid = J.global.id_at(gdeg + 1, r);
        auto it = pos.find(tid);
        if (it == pos.end())
          fail(Err::AxiomFail, "jacobi fiber is not d-stable");
        auto bit = blocks.find(deg);
        if (bit == blocks.end())
          bit = blocks.emplace(deg, QMat(s.dim(deg + 1), s.dim(deg))).first;
        bit->second.at(it->second.second, fpos) = b.at(r, gpos);
      }
    }
    for (auto& [p, m] : blocks)
      if (!m.is_zero()) d.blocks[p] = std::move(m);
    fiber_cx[sup] = make_complex(s, d);
  }
  GradedSpace empty;
  Complex zero_fiber;
  zero_fiber.space = empty;
  zero_fiber.d = ChainMap::zero(empty, empty, 1);
  for (int k = 1; k <= N; ++k) {
    std::vector<Complex> lv;
    for (std::size_t x = 0; x < X.points_at_level(k); ++x) {
      std::vector<int> vs = X.value_set(X.tuple_of(x, k));
      auto it = fiber_cx.find(vs);
      lv.push_back(it == fiber_cx.end() ? zero_fiber : it->second);
    }
    R.levels.push_back(std::move(lv));
  }
  for (int k = 1; k <= N; ++k)
    for (int m = k; m <= N; ++m)
      for (const auto& s : surjections(m, k)) {
        std::vector<ChainMap> maps;
        for (std::size_t x = 0; x < X.points_at_level(k); ++x) {
          // the diagonal image has the same value set: θ is the identity
          const Complex& tgt = R.fiber(k, x);
          maps.push_back(ChainMap::identity(tgt.space));
        }
        R.theta[s] = std::move(maps);
      }
  R.validate();
  if (!admissible(R)) fail(Err::AxiomFail, "jacobi model not admissible");
  J.ran = std::move(R);
  return J;
}

ChainMap gamma_evaluation(const JacobiComplex& J, const GlobalSections& G) {
  // evaluate each global section at the canonical point of each value set
  // (the tuple listing the set in increasing order) and collect the word
  // coordinates into C̄(gX)_n
  ChainMap f = ChainMap::zero(G.cx.space, J.global.cx.space, 0);
  for (int p : G.cx.space.degrees()) {
    QMat m(J.global.cx.space.dim(p), G.cx.space.dim(p));
    QMat K = G.embed.at(p);
    const auto& rows = G.rows.at(p);
    for (std::size_t c = 0; c < K.cols(); ++c)
      for (std::size_t r = 0; r < K.rows(); ++r) {
        if (K.at(r, c) == 0) continue;
        auto [k, x, deg, i] = rows[r];
        std::vector<int> t = J.X.tuple_of(x, k);
        std::vector<int> vs = J.X.value_set(t);
        if (static_cast<int>(vs.size()) != k) continue; // not canonical level
        if (J.X.index_of(vs) != x) continue;            // not the sorted tuple
        // word id at this fiber position
        const auto& ids = J.fiber_words.at(vs);
        // fiber basis is ordered by (degree, insertion): recover the id
        std::size_t count = 0;
        for (std::size_t id : ids) {
          if (J.global.loc(id).first != deg) continue;
          if (count == i) {
            auto [gd, gp] = J.global.loc(id);
            (void)gd;
            m.at(gp, c) += K.at(r, c);
            break;
          }
          ++count;
        }
      }
    if (!m.is_zero()) f.blocks[p] = std::move(m);
  }
  return f;
}

UniversalDeformation udr_from_chevalley(const ChevalleyComplex& Cbar) {
  if (!Cbar.reduced) fail(Err::BadInput, "udr needs the reduced complex");
  UniversalDeformation U;
  U.gamma = Cbar;
  auto H = cohomology(Cbar.cx);
  std::size_t h0 = H.count(0) ? H.at(0).dim : 0;
  U.h0_reps = h0 ? H.at(0).reps : QMat(Cbar.cx.space.dim(0), 0);
  std::size_t dim = 1 + h0;
  QMat mult(dim, dim * dim);
  // unit row/column
  for (std::size_t i = 0; i < dim; ++i) {
    mult.at(i, 0 * dim + i) = 1;
    if (i) mult.at(i, i * dim + 0) = 1;
  }
  mult.at(0, 0) = 1;
  if (h0) {
    // classes of Δ̄(z_i) in the Künneth basis {[z_a ⊗ z_b]} of degree 0
    // representatives per degree
    std::map<int, QMat> reps;
    for (const auto& [p, h] : H) reps[p] = h.reps;
    // target coordinates: flat index over (deg pair block, a, b)
    struct PairBlock {
      int pa, pb;
      std::size_t na, nb;
    };
    std::vector<PairBlock> pblocks;
    for (const auto& [pa, ha] : H)
      for (const auto& [pb, hb] : H)
        if (pa + pb == 0) pblocks.push_back({pa, pb, ha.dim, hb.dim});
    // the ambient degree-0 part of C̄ ⊗ C̄
    auto tc = tensor(Cbar.cx, Cbar.cx);
    std::size_t amb = tc.basis.dim(0);
    // columns: cocycle products z_a ⊗ z_b and the image of d
    std::vector<std::pair<std::size_t, std::size_t>> pair_index;
    QMat cols(amb, 0);
    for (const auto& pb : pblocks) {
      for (std::size_t a = 0; a < pb.na; ++a)
        for (std::size_t b = 0; b < pb.nb; ++b) {
          QMat col(amb, 1);
          const QMat& ra = reps.at(pb.pa);
          const QMat& rb = reps.at(pb.pb);
          for (std::size_t i = 0; i < ra.rows(); ++i) {
            if (ra.at(i, a) == 0) continue;
            for (std::size_t j = 0; j < rb.rows(); ++j) {
              if (rb.at(j, b) == 0) continue;
              std::size_t pos = tc.basis.pos(0, pb.pa, static_cast<int>(i),
                                             pb.pb, static_cast<int>(j));
              col.at(pos, 0) += ra.at(i, a) * rb.at(j, b);
            }
          }
          cols = cols.cols() ? cols.hstack(col) : col;
          pair_index.emplace_back(a + (pb.pa == 0 ? 0 : 0), b);
        }
    }
    // remember which columns are the (0,0)-block pairs
    std::vector<std::pair<std::size_t, std::size_t>> zz_cols;
    {
      std::size_t cidx = 0;
      for (const auto& pb : pblocks) {
        for (std::size_t a = 0; a < pb.na; ++a)
          for (std::size_t b = 0; b < pb.nb; ++b) {
            if (pb.pa == 0 && pb.pb == 0) zz_cols.emplace_back(cidx, a * h0 + b);
            ++cidx;
          }
      }
    }
    QMat img = tc.cx.d.block(-1);
    QMat basis = cols.cols() ? (img.cols() ? cols.hstack(img) : cols) : img;
    for (std::size_t i = 0; i < h0; ++i) {
      // Δ̄(z_i) as a degree-0 vector of C̄ ⊗ C̄; the reduced coproduct of a
      // cocycle column
      QMat v(amb, 1);
      const QMat& z = U.h0_reps;
      for (std::size_t r = 0; r < z.rows(); ++r) {
        if (z.at(r, i) == 0) continue;
        std::size_t id = Cbar.id_at(0, r);
        for (const auto& [a, b, c] : Cbar.coprod[id]) {
          auto [pa, ia] = Cbar.loc(a);
          auto [pb2, ib] = Cbar.loc(b);
          std::size_t pos = tc.basis.pos(0, pa, static_cast<int>(ia), pb2,
                                         static_cast<int>(ib));
          if (pos != static_cast<std::size_t>(-1))
            v.at(pos, 0) += z.at(r, i) * c;
        }
      }
      auto sol = basis.solve(v);
      if (!sol) fail(Err::AxiomFail, "Kunneth expression failed");
      for (const auto& [cidx, ab] : zz_cols) {
        Rat c = sol->at(cidx, 0);
        if (c == 0) continue;
        std::size_t a = ab / h0, b = ab % h0;
        mult.at(1 + i, (1 + a) * dim + (1 + b)) += c;
      }
    }
  }
  U.R = artin_from_table(
      [&] {
        std::vector<std::string> ls{"1"};
        for (std::size_t i = 0; i < h0; ++i)
          ls.push_back("u" + std::to_string(i + 1));
        return ls;
      }(),
      std::move(mult));
  if (U.R.exponent > Cbar.n)
    fail(Err::AxiomFail, "universal deformation algebra exponent too large");
  return U;
}

UniversalDeformation universal_deformation_algebra(
    const FiniteSpace& X, const std::vector<DgLieAlgebra>& g, int n) {
  DgLieAlgebra gX = direct_sum_lie(X, g);
  return udr_from_chevalley(reduced_chevalley(gX, n));
}

UdrTower udr_system(const FiniteSpace& X, const std::vector<DgLieAlgebra>& g,
                    int n_max) {
  if (n_max < 1) fail(Err::BadInput, "udr_system needs n_max >= 1");
  UdrTower T;
  for (int n = 1; n <= n_max; ++n)
    T.algebras.push_back(universal_deformation_algebra(X, g, n));
  for (int n = 1; n < n_max; ++n) {
    const auto& A = T.algebras[n];     // R_{n+1}
    const auto& B = T.algebras[n - 1]; // R_n
    // H0 of the smaller complex includes into the bigger one: express the
    // included representatives in the bigger H0 basis
    const ChevalleyComplex& Cs = B.gamma;
    const ChevalleyComplex& Cb = A.gamma;
    // inclusion on degree-0 word coordinates (words of length <= n)
    QMat inc(Cb.cx.space.dim(0), Cs.cx.space.dim(0));
    for (std::size_t j = 0; j < Cs.cx.space.dim(0); ++j) {
      std::size_t id = Cs.id_at(0, j);
      auto it = Cb.word_id.find(Cs.words[id]);
      if (it == Cb.word_id.end()) fail(Err::AxiomFail, "tower inclusion");
      inc.at(Cb.loc(it->second).second, j) = 1;
    }
    QMat zs = inc * B.h0_reps;
    // coordinates of [zs] in H0(Cb): solve against [img | reps]
    QMat img = Cb.cx.d.block(-1);
    QMat basis = img.cols() ? img.hstack(A.h0_reps) : A.h0_reps;
    auto sol = basis.solve(zs);
    if (!sol) fail(Err::AxiomFail, "tower class expression");
    std::size_t hb = A.h0_reps.cols(), hs = B.h0_reps.cols();
    // dual map R_{n+1} -> R_n : xi_j  ->  sum_i <incl z_i, xi_j> eta_i
    QMat f(1 + hs, 1 + hb);
    f.at(0, 0) = 1;
    for (std::size_t i = 0; i < hs; ++i)
      for (std::size_t j = 0; j < hb; ++j)
        f.at(1 + i, 1 + j) = sol->at(img.cols() + j, i);
    if (!is_algebra_morphism(A.R, B.R, f))
      fail(Err::AxiomFail, "tower map is not an algebra morphism");
    T.maps.push_back(f);
    T.surjective.push_back(f.rank() == B.R.dim);
  }
  return T;
}

ModuliModule moduli_module(const FiniteSpace& X,
                           const std::vector<DgLieAlgebra>& g,
                           const std::vector<DgLieModule>& V, int n) {
  ModuliModule M;
  DgLieAlgebra gX = direct_sum_lie(X, g);
  DgLieModule VX = direct_sum_module(X, gX, V);
  M.jc = chevalley_with_coefficients(gX, VX, n);
  M.R = udr_from_chevalley(M.jc.base);
  const ChevalleyComplex& C = M.jc.base;
  // canonical projection p : C̄^0 -> H^0 along im(d) and a fixed complement
  std::size_t dim0 = C.cx.space.dim(0);
  QMat img = C.cx.d.block(-1);
  QMat base = img.cols() ? img.hstack(M.R.h0_reps) : M.R.h0_reps;
  QMat full = span_extend(base, QMat::identity(dim0));
  std::size_t h0 = M.R.h0_reps.cols();
  // p(e_j): solve full * x = e_j, take the reps block
  QMat proj(h0, dim0);
  if (dim0) {
    auto sol = full.solve(QMat::identity(dim0));
    if (!sol) fail(Err::AxiomFail, "projection solve");
    for (std::size_t i = 0; i < h0; ++i)
      for (std::size_t j = 0; j < dim0; ++j)
        proj.at(i, j) = sol->at(img.cols() + i, j);
  }
  // action of xi_i on Hom(C̄, V): (xi·h)(w) = Σ xi(p(w_(1))) h(w_(2))
  for (std::size_t xi = 0; xi < h0; ++xi) {
    ChainMap act = ChainMap::zero(M.jc.cx.space, M.jc.cx.space, 0);
    std::map<int, QMat> blocks;
    // basis of jc: pairs (word id, module gen); degree = deg m - deg w
    // locate positions
    std::map<std::pair<std::size_t, std::pair<int, int>>,
             std::pair<int, std::size_t>>
        pos_of;
    {
      std::map<int, std::size_t> counter;
      for (const auto& [wid, mgen] : M.jc.hom_basis) {
        int deg = mgen.deg - C.loc(wid).first;
        pos_of[{wid, {mgen.deg, mgen.idx}}] = {deg, counter[deg]++};
      }
    }
    for (const auto& [wid, mgen] : M.jc.hom_basis) {
      int deg = mgen.deg - C.loc(wid).first;
      auto [sdeg, spos] = pos_of.at({wid, {mgen.deg, mgen.idx}});
      (void)sdeg;
      // (xi·E_{w,m}) evaluated: contributions to E_{v,m} whenever
      // Δ̄ v contains (a, w) with a of degree 0
      for (std::size_t vid = 0; vid < C.words.size(); ++vid)
        for (const auto& [a, b, c] : C.coprod[vid]) {
          if (b != wid) continue;
          auto [pa, ia] = C.loc(a);
          if (pa != 0) continue;
          if (proj.cols() == 0) continue;
          Rat coeff = c * proj.at(xi, ia);
          if (coeff == 0) continue;
          auto it = pos_of.find({vid, {mgen.deg, mgen.idx}});
          if (it == pos_of.end()) continue;
          auto [tdeg, tpos] = it->second;
          if (tdeg != deg) continue;
          auto bit = blocks.find(deg);
          if (bit == blocks.end())
            bit = blocks
                      .emplace(deg, QMat(M.jc.cx.space.dim(deg),
                                         M.jc.cx.space.dim(deg)))
                      .first;
          bit->second.at(tpos, spos) += coeff;
        }
    }
    for (auto& [p, m] : blocks)
      if (!m.is_zero()) act.blocks[p] = std::move(m);
    M.action.push_back(std::move(act));
  }
  // module axioms: commutativity/associativity through the multiplication
  // table of R, checked as matrix identities
  for (std::size_t a = 0; a < h0; ++a)
    for (std::size_t b = 0; b < h0; ++b) {
      ChainMap lhs = M.action[a].compose(M.action[b]);
      // (xi_a xi_b) acts via the table
      ChainMap rhs = ChainMap::zero(M.jc.cx.space, M.jc.cx.space, 0);
      std::vector<Rat> ea(M.R.R.dim), eb(M.R.R.dim);
      ea[1 + a] = 1;
      eb[1 + b] = 1;
      auto prod = M.R.R.mul(ea, eb);
      if (prod[0] != 0) fail(Err::NotAModule, "unit component in m*m");
      for (std::size_t k = 0; k < h0; ++k)
        if (prod[1 + k] != 0) rhs = rhs + M.action[k] * prod[1 + k];
      if (!lhs.equal_blocks(rhs))
        fail(Err::NotAModule, "action associativity fails on (" +
                                  std::to_string(a) + "," + std::to_string(b) +
                                  ")");
    }
  return M;
}

} // namespace ranjac
