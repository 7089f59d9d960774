#include "ranjac/dg_lie.hpp"

#include "ranjac/config.hpp"
#include "ranjac/error.hpp"

namespace ranjac {

namespace {

std::string gen_name(const GradedSpace& s, const Gen& g) {
  return s.comps.at(g.deg)[g.idx] + " (deg " + std::to_string(g.deg) + ")";
}

GradedVec col_to_vec(const QMat& m, std::size_t col, int deg) {
  GradedVec v;
  auto& xs = v.c[deg];
  xs.assign(m.rows(), Rat(0));
  for (std::size_t r = 0; r < m.rows(); ++r) xs[r] = m.at(r, col);
  return v;
}

QMat vec_to_col(const GradedVec& v, int deg, std::size_t dim) {
  QMat m(dim, 1);
  auto it = v.c.find(deg);
  if (it != v.c.end())
    for (std::size_t r = 0; r < it->second.size(); ++r) m.at(r, 0) = it->second[r];
  return m;
}

} // namespace

GradedVec DgLieAlgebra::bracket_of(const GradedVec& x,
                                   const GradedVec& y) const {
  GradedVec out;
  for (const auto& [p, xs] : x.c) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (xs[i] == 0) continue;
      for (const auto& [q, ys] : y.c) {
        for (std::size_t j = 0; j < ys.size(); ++j) {
          if (ys[j] == 0) continue;
          std::size_t pos = t2.pos(p + q, p, static_cast<int>(i), q,
                                   static_cast<int>(j));
          if (pos == static_cast<std::size_t>(-1)) continue;
          QMat b = bracket.block(p + q);
          for (std::size_t r = 0; r < b.rows(); ++r) {
            if (b.at(r, pos) == 0) continue;
            auto& dst = out.c[p + q];
            dst.resize(cx.space.dim(p + q));
            dst[r] += xs[i] * ys[j] * b.at(r, pos);
          }
        }
      }
    }
  }
  out.prune();
  return out;
}

ChainMap DgLieAlgebra::ad(const GradedVec& x) const {
  int dx = x.degree();
  ChainMap f = ChainMap::zero(cx.space, cx.space, dx);
  for (int q : cx.space.degrees()) {
    QMat m(cx.space.dim(q + dx), cx.space.dim(q));
    bool nz = false;
    for (std::size_t j = 0; j < cx.space.dim(q); ++j) {
      GradedVec e = GradedVec::basis(cx.space, q, j);
      GradedVec r = bracket_of(x, e);
      auto it = r.c.find(q + dx);
      if (it == r.c.end()) continue;
      for (std::size_t i = 0; i < it->second.size(); ++i) {
        if (it->second[i] != 0) {
          m.at(i, j) = it->second[i];
          nz = true;
        }
      }
    }
    if (nz) f.blocks[q] = std::move(m);
  }
  return f;
}

void validate_dg_lie(const DgLieAlgebra& g) {
  // skew-symmetry: bracket ∘ swap = -bracket
  ChainMap sw = tensor_swap(g.cx, g.cx);
  ChainMap left = g.bracket.compose(sw);
  ChainMap right = g.bracket * Rat(-1);
  if (!left.equal_blocks(right)) {
    for (const auto& [n, terms] : g.t2.terms) {
      QMat a = left.block(n), b = right.block(n);
      if (a != b)
        for (std::size_t col = 0; col < terms.size(); ++col)
          for (std::size_t r = 0; r < a.rows(); ++r)
            if (a.at(r, col) != b.at(r, col)) {
              auto [p, i, q, j] = terms[col];
              fail(Err::SkewFail,
                   "pair (" + gen_name(g.cx.space, {p, i}) + ", " +
                       gen_name(g.cx.space, {q, j}) + ")");
            }
    }
    fail(Err::SkewFail, "bracket");
  }
  // Leibniz: bracket is a chain map from the tensor-square complex
  if (!is_chain_map(g.bracket, g.tensor_cx, g.cx)) {
    for (const auto& [n, terms] : g.t2.terms) {
      QMat lhs = g.bracket.block(n + 1) * g.tensor_cx.d.block(n);
      QMat rhs = g.cx.d.block(n) * g.bracket.block(n);
      if (lhs != rhs)
        for (std::size_t col = 0; col < terms.size(); ++col)
          for (std::size_t r = 0; r < lhs.rows(); ++r)
            if (lhs.at(r, col) != rhs.at(r, col)) {
              auto [p, i, q, j] = terms[col];
              fail(Err::LeibnizFail,
                   "pair (" + gen_name(g.cx.space, {p, i}) + ", " +
                       gen_name(g.cx.space, {q, j}) + ")");
            }
    }
    fail(Err::LeibnizFail, "bracket");
  }
  // graded Jacobi on basis triples
  std::vector<Gen> gens;
  for (int p : g.cx.space.degrees())
    for (int i = 0; i < static_cast<int>(g.cx.space.dim(p)); ++i)
      gens.push_back({p, i});
  for (const Gen& a : gens)
    for (const Gen& b : gens)
      for (const Gen& c : gens) {
        GradedVec x = GradedVec::basis(g.cx.space, a.deg, a.idx);
        GradedVec y = GradedVec::basis(g.cx.space, b.deg, b.idx);
        GradedVec z = GradedVec::basis(g.cx.space, c.deg, c.idx);
        GradedVec t1 = g.bracket_of(x, g.bracket_of(y, z));
        GradedVec t2v = g.bracket_of(y, g.bracket_of(z, x)) *
                        Rat(koszul_sign(a.deg, b.deg + c.deg));
        GradedVec t3 = g.bracket_of(z, g.bracket_of(x, y)) *
                       Rat(koszul_sign(c.deg, a.deg + b.deg));
        GradedVec sum = t1 + t2v + t3;
        if (!sum.is_zero())
          fail(Err::JacobiFail,
               "triple (" + gen_name(g.cx.space, a) + ", " +
                   gen_name(g.cx.space, b) + ", " + gen_name(g.cx.space, c) +
                   ")");
      }
}

DgLieAlgebra make_dg_lie(const Complex& cx, const ChainMap& bracket) {
  DgLieAlgebra g;
  g.cx = cx;
  auto tc = tensor(cx, cx);
  g.t2 = tc.basis;
  g.tensor_cx = tc.cx;
  g.bracket = bracket;
  if (bracket.degree != 0) fail(Err::ShapeMismatch, "bracket degree != 0");
  if (!bracket.src.same_dims(g.tensor_cx.space) ||
      !bracket.tgt.same_dims(cx.space))
    fail(Err::ShapeMismatch, "bracket shape");
  g.bracket.src = g.tensor_cx.space;
  g.bracket.tgt = cx.space;
  g.bracket.validate_shapes();
  validate_dg_lie(g);
  return g;
}

DgLieAlgebra make_dg_lie(const Complex& cx,
                         const std::vector<BracketTriple>& triples) {
  auto tc = tensor(cx, cx);
  std::map<int, QMat> blocks;
  auto add = [&](const Gen& a, const Gen& b, const Gen& t, const Rat& c) {
    int n = a.deg + b.deg;
    if (t.deg != n) fail(Err::ShapeMismatch, "bracket target degree mismatch");
    std::size_t pos = tc.basis.pos(n, a.deg, a.idx, b.deg, b.idx);
    if (pos == static_cast<std::size_t>(-1))
      fail(Err::ShapeMismatch, "bracket entry outside basis");
    auto it = blocks.find(n);
    if (it == blocks.end())
      it = blocks.emplace(n, QMat(cx.space.dim(n), tc.basis.dim(n))).first;
    it->second.at(t.idx, pos) += c;
  };
  for (const auto& tr : triples) {
    if (std::make_pair(tr.a.deg, tr.a.idx) >
        std::make_pair(tr.b.deg, tr.b.idx))
      fail(Err::BadInput, "bracket triples must have a <= b");
    add(tr.a, tr.b, tr.t, tr.c);
    if (tr.a == tr.b) continue;
    add(tr.b, tr.a, tr.t, tr.c * Rat(-koszul_sign(tr.a.deg, tr.b.deg)));
  }
  ChainMap br = ChainMap::zero(tc.cx.space, cx.space, 0);
  for (auto& [n, m] : blocks)
    if (!m.is_zero()) br.blocks[n] = std::move(m);
  return make_dg_lie(cx, br);
}

bool check_mc(const DgLieAlgebra& g, const GradedVec& alpha) {
  if (alpha.is_zero()) return true;
  if (alpha.degree() != 1)
    fail(Err::WrongDegree, "MC element must be degree 1");
  GradedVec lhs = g.cx.d.apply(alpha) + g.bracket_of(alpha, alpha) * rat(1, 2);
  return lhs.is_zero();
}

DgLieAlgebra twist(const DgLieAlgebra& g, const GradedVec& alpha) {
  if (!check_mc(g, alpha)) fail(Err::NotMaurerCartan, "twist");
  if (alpha.is_zero()) return g;
  ChainMap da = g.cx.d + g.ad(alpha);
  Complex cx = make_complex(g.cx.space, da);
  return make_dg_lie(cx, g.bracket);
}

ConeLie cone_lie(const DgLieAlgebra& g, const std::map<int, QMat>& h_span) {
  std::map<int, QMat> H;
  bool is_all = true;
  for (int p : g.cx.space.degrees()) {
    QMat span = h_span.count(p) ? h_span.at(p) : QMat(g.cx.space.dim(p), 0);
    QMat indep = span_extend(QMat(g.cx.space.dim(p), 0), span);
    if (indep.cols() != g.cx.space.dim(p)) is_all = false;
    H[p] = std::move(indep);
  }
  auto h_at = [&](int p) {
    auto it = H.find(p);
    return it == H.end() ? QMat(g.cx.space.dim(p), 0) : it->second;
  };
  // d-stability and the ideal property
  for (int p : g.cx.space.degrees()) {
    QMat dh = g.cx.d.block(p) * h_at(p);
    if (!in_span(h_at(p + 1), dh))
      fail(Err::NotAnIdeal,
           "subspace not d-stable at degree " + std::to_string(p));
  }
  for (int p : g.cx.space.degrees())
    for (std::size_t i = 0; i < g.cx.space.dim(p); ++i) {
      GradedVec x = GradedVec::basis(g.cx.space, p, i);
      for (int q : g.cx.space.degrees()) {
        QMat hq = h_at(q);
        for (std::size_t c = 0; c < hq.cols(); ++c) {
          GradedVec v = col_to_vec(hq, c, q);
          GradedVec b = g.bracket_of(x, v);
          for (auto& [t, xs] : b.c) {
            if (!in_span(h_at(t), vec_to_col(b, t, g.cx.space.dim(t))))
              fail(Err::NotAnIdeal,
                   "[" + gen_name(g.cx.space, {p, static_cast<int>(i)}) +
                       ", h] escapes the subspace");
          }
        }
      }
    }
  // intrinsic complex of the ideal
  GradedSpace hs;
  for (int p : g.cx.space.degrees()) {
    QMat m = h_at(p);
    if (m.cols() == 0) continue;
    std::vector<std::string> ls;
    for (std::size_t i = 0; i < m.cols(); ++i)
      ls.push_back("h" + std::to_string(p) + "_" + std::to_string(i));
    hs.comps[p] = ls;
  }
  ChainMap dh = ChainMap::zero(hs, hs, 1);
  for (int p : hs.degrees()) {
    QMat img = g.cx.d.block(p) * h_at(p);
    QMat tgtH = h_at(p + 1);
    if (tgtH.cols()) {
      auto sol = tgtH.solve(img);
      if (!sol) fail(Err::NotAnIdeal, "d escapes ideal");
      if (!sol->is_zero()) dh.blocks[p] = *sol;
    } else if (!img.is_zero()) {
      fail(Err::NotAnIdeal, "d escapes ideal");
    }
  }
  Complex hcx = make_complex(hs, dh);
  ChainMap incl = ChainMap::zero(hs, g.cx.space, 0);
  for (int p : hs.degrees())
    if (h_at(p).cols()) incl.blocks[p] = h_at(p);

  // bracket restricted to the ideal
  auto htc = tensor(hcx, hcx);
  ChainMap hbr = ChainMap::zero(htc.cx.space, hs, 0);
  for (const auto& [n, terms] : htc.basis.terms) {
    if (terms.empty() || hs.dim(n) == 0) continue;
    QMat m(hs.dim(n), terms.size());
    bool nz = false;
    for (std::size_t col = 0; col < terms.size(); ++col) {
      auto [p, i, q, j] = terms[col];
      GradedVec x = col_to_vec(h_at(p), i, p);
      GradedVec y = col_to_vec(h_at(q), j, q);
      GradedVec b = g.bracket_of(x, y);
      if (b.is_zero()) continue;
      auto sol = h_at(n).solve(vec_to_col(b, n, g.cx.space.dim(n)));
      if (!sol) fail(Err::NotAnIdeal, "bracket escapes ideal");
      for (std::size_t r = 0; r < sol->rows(); ++r)
        if (sol->at(r, 0) != 0) {
          m.at(r, col) = sol->at(r, 0);
          nz = true;
        }
    }
    if (nz) hbr.blocks[n] = std::move(m);
  }
  DgLieAlgebra halg = make_dg_lie(hcx, hbr);

  // cone complex, then the bracket of §3.5
  Complex ccx = cone(incl, hcx, g.cx);
  auto ctc = tensor(ccx, ccx);
  ChainMap cbr = ChainMap::zero(ctc.cx.space, ccx.space, 0);
  for (const auto& [n, terms] : ctc.basis.terms) {
    if (terms.empty() || ccx.space.dim(n) == 0) continue;
    QMat m(ccx.space.dim(n), terms.size());
    bool nz = false;
    auto write_g = [&](const GradedVec& v, std::size_t col, const Rat& sc) {
      auto it = v.c.find(n);
      if (it == v.c.end()) return;
      std::size_t off = hcx.space.dim(n + 1);
      for (std::size_t r = 0; r < it->second.size(); ++r)
        if (it->second[r] != 0) {
          m.at(off + r, col) += sc * it->second[r];
          nz = true;
        }
    };
    auto write_h = [&](const GradedVec& v, std::size_t col, const Rat& sc) {
      // v is a g-vector of degree n+1 lying in the ideal
      if (v.is_zero()) return;
      auto sol = h_at(n + 1).solve(vec_to_col(v, n + 1, g.cx.space.dim(n + 1)));
      if (!sol) fail(Err::NotAnIdeal, "cone bracket escapes ideal");
      for (std::size_t r = 0; r < sol->rows(); ++r)
        if (sol->at(r, 0) != 0) {
          m.at(r, col) += sc * sol->at(r, 0);
          nz = true;
        }
    };
    for (std::size_t col = 0; col < terms.size(); ++col) {
      auto [p, i, q, j] = terms[col];
      std::size_t hp = hcx.space.dim(p + 1), hq = hcx.space.dim(q + 1);
      bool ah = static_cast<std::size_t>(i) < hp;
      bool bh = static_cast<std::size_t>(j) < hq;
      std::size_t ai = ah ? i : i - hp;
      std::size_t bi = bh ? j : j - hq;
      // [(x,y),(x',y')] = ((-1)^p [y,x'] + [x,y'], [y,y']),  y ∈ g^p
      if (!ah && !bh) {
        GradedVec y = GradedVec::basis(g.cx.space, p, ai);
        GradedVec y2 = GradedVec::basis(g.cx.space, q, bi);
        write_g(g.bracket_of(y, y2), col, 1);
      } else if (!ah && bh) {
        GradedVec y = GradedVec::basis(g.cx.space, p, ai);
        GradedVec xh = col_to_vec(h_at(q + 1), bi, q + 1);
        write_h(g.bracket_of(y, xh), col, Rat(shift_sign(p)));
      } else if (ah && !bh) {
        GradedVec xh = col_to_vec(h_at(p + 1), ai, p + 1);
        GradedVec y2 = GradedVec::basis(g.cx.space, q, bi);
        write_h(g.bracket_of(xh, y2), col, 1);
      }
      // (h,h) components vanish in the cone bracket
    }
    if (nz) cbr.blocks[n] = std::move(m);
  }
  ConeLie out;
  out.cone = make_dg_lie(ccx, cbr);
  out.h = std::move(halg);
  out.incl = std::move(incl);
  out.contractible = is_all;
  if (is_all) {
    // s(x,y) = (y, 0), where y is re-expressed in ideal coordinates
    ChainMap s = ChainMap::zero(ccx.space, ccx.space, -1);
    for (int nn : ccx.space.degrees()) {
      std::size_t hn = hcx.space.dim(nn + 1), gn = g.cx.space.dim(nn);
      std::size_t th = hcx.space.dim(nn), tg = g.cx.space.dim(nn - 1);
      if (th + tg == 0 || hn + gn == 0) continue;
      QMat m(th + tg, hn + gn);
      if (gn && th) {
        auto sol = h_at(nn).solve(QMat::identity(gn));
        if (sol)
          for (std::size_t r = 0; r < th; ++r)
            for (std::size_t c = 0; c < gn; ++c) m.at(r, hn + c) = sol->at(r, c);
      }
      if (!m.is_zero()) s.blocks[nn] = std::move(m);
    }
    ChainMap lhs = out.cone.cx.d.compose(s) + s.compose(out.cone.cx.d);
    if (!lhs.equal_blocks(ChainMap::identity(ccx.space)))
      fail(Err::AxiomFail, "contracting homotopy identity");
    out.homotopy = std::move(s);
  }
  return out;
}

ScalarExtension extend_scalars(const DgLieAlgebra& g,
                               const ArtinLocalAlgebra& A) {
  ScalarExtension ex;
  ex.adim = A.dim;
  GradedSpace s;
  for (int p : g.cx.space.degrees()) {
    std::vector<std::string> ls;
    for (const auto& l : g.cx.space.comps.at(p))
      for (std::size_t a = 0; a < A.dim; ++a)
        ls.push_back(l + "*" + A.labels[a]);
    s.comps[p] = ls;
  }
  auto flat = [&](std::size_t i, std::size_t a) { return i * A.dim + a; };
  ChainMap d = ChainMap::zero(s, s, 1);
  for (int p : g.cx.space.degrees()) {
    QMat db = g.cx.d.block(p);
    if (db.is_zero()) continue;
    QMat m(s.dim(p + 1), s.dim(p));
    for (std::size_t i = 0; i < db.cols(); ++i)
      for (std::size_t r = 0; r < db.rows(); ++r) {
        if (db.at(r, i) == 0) continue;
        for (std::size_t a = 0; a < A.dim; ++a)
          m.at(flat(r, a), flat(i, a)) = db.at(r, i);
      }
    d.blocks[p] = std::move(m);
  }
  Complex cx = make_complex(s, d);
  auto tc = tensor(cx, cx);
  ChainMap br = ChainMap::zero(tc.cx.space, s, 0);
  for (const auto& [n, terms] : tc.basis.terms) {
    if (terms.empty() || s.dim(n) == 0) continue;
    QMat m(s.dim(n), terms.size());
    bool nz = false;
    for (std::size_t col = 0; col < terms.size(); ++col) {
      auto [p, pi, q, qj] = terms[col];
      std::size_t gi = static_cast<std::size_t>(pi) / A.dim,
                  ai = static_cast<std::size_t>(pi) % A.dim;
      std::size_t gj = static_cast<std::size_t>(qj) / A.dim,
                  aj = static_cast<std::size_t>(qj) % A.dim;
      std::size_t pos =
          g.t2.pos(n, p, static_cast<int>(gi), q, static_cast<int>(gj));
      if (pos == static_cast<std::size_t>(-1)) continue;
      QMat gb = g.bracket.block(n);
      std::vector<Rat> ea(A.dim), eb(A.dim);
      ea[ai] = 1;
      eb[aj] = 1;
      std::vector<Rat> prod = A.mul(ea, eb);
      for (std::size_t r = 0; r < gb.rows(); ++r) {
        if (gb.at(r, pos) == 0) continue;
        for (std::size_t k = 0; k < A.dim; ++k) {
          if (prod[k] == 0) continue;
          m.at(flat(r, k), col) += gb.at(r, pos) * prod[k];
          nz = true;
        }
      }
    }
    if (nz) br.blocks[n] = std::move(m);
  }
  ex.ext = make_dg_lie(cx, br);
  for (int p : s.degrees()) {
    QMat span(s.dim(p), g.cx.space.dim(p) * (A.dim - 1));
    std::size_t c = 0;
    for (std::size_t i = 0; i < g.cx.space.dim(p); ++i)
      for (std::size_t a = 1; a < A.dim; ++a) span.at(flat(i, a), c++) = 1;
    ex.ideal[p] = std::move(span);
  }
  return ex;
}

GradedVec ScalarExtension::embed(const GradedSpace& gspace, Gen gen,
                                 std::size_t ai) const {
  GradedVec v;
  v.c[gen.deg] = std::vector<Rat>(gspace.dim(gen.deg) * adim);
  v.c[gen.deg][static_cast<std::size_t>(gen.idx) * adim + ai] = 1;
  return v;
}

void validate_lie_morphism(const ChainMap& f, const DgLieAlgebra& src,
                           const DgLieAlgebra& tgt) {
  if (f.degree != 0) fail(Err::NotLieMorphism, "morphism degree != 0");
  if (!is_chain_map(f, src.cx, tgt.cx))
    fail(Err::NotLieMorphism, "does not commute with differentials");
  ChainMap ff = tensor_map(f, f, src.t2, tgt.t2);
  ChainMap lhs = f.compose(src.bracket);
  ChainMap rhs = tgt.bracket.compose(ff);
  if (!lhs.equal_blocks(rhs))
    fail(Err::NotLieMorphism, "does not respect brackets");
}

bool lie_quasi_iso(const ChainMap& f, const DgLieAlgebra& src,
                   const DgLieAlgebra& tgt) {
  validate_lie_morphism(f, src, tgt);
  return quasi_iso(f, src.cx, tgt.cx);
}

GradedVec DgLieModule::act(const GradedVec& x, const GradedVec& v) const {
  GradedVec out;
  for (const auto& [p, xs] : x.c)
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (xs[i] == 0) continue;
      for (const auto& [q, vs] : v.c)
        for (std::size_t j = 0; j < vs.size(); ++j) {
          if (vs[j] == 0) continue;
          std::size_t pos =
              gm.pos(p + q, p, static_cast<int>(i), q, static_cast<int>(j));
          if (pos == static_cast<std::size_t>(-1)) continue;
          QMat b = action.block(p + q);
          for (std::size_t r = 0; r < b.rows(); ++r) {
            if (b.at(r, pos) == 0) continue;
            auto& dst = out.c[p + q];
            dst.resize(mx.space.dim(p + q));
            dst[r] += xs[i] * vs[j] * b.at(r, pos);
          }
        }
    }
  out.prune();
  return out;
}

ChainMap DgLieModule::rho(const GradedVec& x) const {
  int dx = x.degree();
  ChainMap f = ChainMap::zero(mx.space, mx.space, dx);
  for (int q : mx.space.degrees()) {
    QMat m(mx.space.dim(q + dx), mx.space.dim(q));
    bool nz = false;
    for (std::size_t j = 0; j < mx.space.dim(q); ++j) {
      GradedVec e = GradedVec::basis(mx.space, q, j);
      GradedVec r = act(x, e);
      auto it = r.c.find(q + dx);
      if (it == r.c.end()) continue;
      for (std::size_t i = 0; i < it->second.size(); ++i)
        if (it->second[i] != 0) {
          m.at(i, j) = it->second[i];
          nz = true;
        }
    }
    if (nz) f.blocks[q] = std::move(m);
  }
  return f;
}

DgLieModule make_module(const DgLieAlgebra& g, const Complex& mx,
                        const ChainMap& action) {
  DgLieModule M;
  M.g = g;
  M.mx = mx;
  auto tc = tensor(g.cx, mx);
  M.gm = tc.basis;
  M.action = action;
  M.action.src = tc.cx.space;
  M.action.tgt = mx.space;
  M.action.validate_shapes();
  if (!is_chain_map(M.action, tc.cx, mx))
    fail(Err::NotAModule, "action is not a chain map");
  for (int p : g.cx.space.degrees())
    for (std::size_t i = 0; i < g.cx.space.dim(p); ++i)
      for (int q : g.cx.space.degrees())
        for (std::size_t j = 0; j < g.cx.space.dim(q); ++j) {
          GradedVec x = GradedVec::basis(g.cx.space, p, i);
          GradedVec y = GradedVec::basis(g.cx.space, q, j);
          GradedVec br = g.bracket_of(x, y);
          ChainMap lhs = br.is_zero()
                             ? ChainMap::zero(mx.space, mx.space, p + q)
                             : M.rho(br);
          ChainMap rhs = M.rho(x).compose(M.rho(y)) -
                         M.rho(y).compose(M.rho(x)) * Rat(koszul_sign(p, q));
          if (!lhs.equal_blocks(rhs))
            fail(Err::NotAModule,
                 "action fails on pair (" +
                     gen_name(g.cx.space, {p, static_cast<int>(i)}) + ", " +
                     gen_name(g.cx.space, {q, static_cast<int>(j)}) + ")");
        }
  return M;
}

DgLieModule adjoint_module(const DgLieAlgebra& g) {
  return make_module(g, g.cx, g.bracket);
}

} // namespace ranjac
