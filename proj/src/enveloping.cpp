#include "ranjac/enveloping.hpp"

#include <algorithm>

#include "ranjac/config.hpp"
#include "ranjac/error.hpp"

namespace ranjac {

namespace {

int word_degree(const Word& w) {
  int d = 0;
  for (const auto& g : w) d += g.deg;
  return d;
}

std::string word_label(const GradedSpace& base, const Word& w) {
  if (w.empty()) return "1";
  std::string l;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) l += "*";
    l += base.comps.at(w[i].deg)[w[i].idx];
  }
  return l;
}

// Rewrites an arbitrary tensor word into the PBW basis:
//   x y = (-1)^{|x||y|} y x + [x, y]        for x > y
//   x x = 1/2 [x, x]                        for odd x
// Terminates because each step lowers (length, inversion count).
void pbw_normalize(const DgLieAlgebra& L, const Word& w, const Rat& coeff,
                   std::map<Word, Rat>& out, int maxlen) {
  if (static_cast<int>(w.size()) > maxlen) return; // truncation window
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    const Gen &x = w[i], &y = w[i + 1];
    bool bad_repeat = x == y && (x.deg % 2 != 0);
    if (!(y < x) && !bad_repeat) continue;
    GradedVec xv = GradedVec::basis(L.cx.space, x.deg, x.idx);
    GradedVec yv = GradedVec::basis(L.cx.space, y.deg, y.idx);
    GradedVec br = L.bracket_of(xv, yv);
    Word rest_pre(w.begin(), w.begin() + i);
    Word rest_post(w.begin() + i + 2, w.end());
    if (!bad_repeat) {
      Word swapped = rest_pre;
      swapped.push_back(y);
      swapped.push_back(x);
      swapped.insert(swapped.end(), rest_post.begin(), rest_post.end());
      pbw_normalize(L, swapped, coeff * Rat(koszul_sign(x.deg, y.deg)), out,
                    maxlen);
    }
    Rat bc = bad_repeat ? coeff * rat(1, 2) : coeff;
    for (const auto& [bd, xs] : br.c)
      for (std::size_t r = 0; r < xs.size(); ++r) {
        if (xs[r] == 0) continue;
        Word shorter = rest_pre;
        shorter.push_back({bd, static_cast<int>(r)});
        shorter.insert(shorter.end(), rest_post.begin(), rest_post.end());
        pbw_normalize(L, shorter, bc * xs[r], out, maxlen);
      }
    return;
  }
  out[w] += coeff;
}

} // namespace

std::pair<int, std::size_t> EnvelopingTrunc::loc(std::size_t id) const {
  int deg = word_degree(words[id]);
  std::size_t hi = id;
  while (hi > 0 && word_degree(words[hi - 1]) == deg) --hi;
  return {deg, id - hi};
}

std::size_t EnvelopingTrunc::id_at(int deg, std::size_t pos) const {
  for (std::size_t id = 0; id < words.size(); ++id)
    if (word_degree(words[id]) == deg) return id + pos;
  fail(Err::BadInput, "enveloping id_at");
}

Coalgebra EnvelopingTrunc::as_coalgebra() const {
  Coalgebra co;
  co.cx = cx;
  co.coprod = coprod;
  co.counit.assign(words.size(), Rat(0));
  co.unit = unit_id;
  co.counit[unit_id] = 1;
  return co;
}

FilteredComplex EnvelopingTrunc::filtration() const {
  FilteredComplex fc;
  fc.cx = cx;
  fc.n0 = 0;
  for (int k = 0; k <= N; ++k) {
    std::map<int, QMat> step;
    for (int p : cx.space.degrees()) {
      std::vector<std::size_t> cols;
      for (std::size_t pos = 0; pos < cx.space.dim(p); ++pos)
        if (word_len(id_at(p, pos)) <= k) cols.push_back(pos);
      QMat m(cx.space.dim(p), cols.size());
      for (std::size_t c = 0; c < cols.size(); ++c) m.at(cols[c], c) = 1;
      step[p] = std::move(m);
    }
    fc.steps.push_back(std::move(step));
  }
  fc.validate();
  return fc;
}

std::vector<std::pair<std::size_t, Rat>> EnvelopingTrunc::mul(
    std::size_t a, std::size_t b) const {
  Word cat = words[a];
  cat.insert(cat.end(), words[b].begin(), words[b].end());
  std::map<Word, Rat> out;
  pbw_normalize(L, cat, 1, out, N);
  std::vector<std::pair<std::size_t, Rat>> terms;
  for (const auto& [w, c] : out) {
    if (c == 0) continue;
    auto it = word_id.find(w);
    if (it == word_id.end()) fail(Err::AxiomFail, "pbw closure");
    terms.emplace_back(it->second, c);
  }
  return terms;
}

EnvelopingTrunc enveloping(const DgLieAlgebra& L, int N) {
  if (N < 0) fail(Err::BadInput, "enveloping bound must be >= 0");
  EnvelopingTrunc U;
  U.L = L;
  U.N = N;
  std::vector<Gen> gens;
  for (int p : L.cx.space.degrees())
    for (int i = 0; i < static_cast<int>(L.cx.space.dim(p)); ++i)
      gens.push_back({p, i});
  std::sort(gens.begin(), gens.end());
  std::vector<Word> all;
  Word cur;
  auto rec = [&](auto&& self, std::size_t from, int len) -> void {
    if (static_cast<int>(cur.size()) == len) {
      all.push_back(cur);
      return;
    }
    for (std::size_t k = from; k < gens.size(); ++k) {
      if (!cur.empty() && cur.back() == gens[k] && (gens[k].deg % 2 != 0))
        continue; // odd letters never repeat in the PBW basis
      cur.push_back(gens[k]);
      self(self, k, len);
      cur.pop_back();
    }
  };
  for (int len = 0; len <= N; ++len) rec(rec, 0, len);
  std::map<int, std::vector<Word>> by_deg;
  for (const auto& w : all) by_deg[word_degree(w)].push_back(w);
  GradedSpace space;
  for (const auto& [deg, ws] : by_deg) {
    std::vector<std::string> ls;
    for (const auto& w : ws) {
      U.word_id[w] = U.words.size();
      U.words.push_back(w);
      ls.push_back(word_label(L.cx.space, w));
    }
    space.comps[deg] = std::move(ls);
  }
  space.validate();
  U.unit_id = U.word_id.at(Word{});
  // PBW dimension check against the symmetric powers
  for (int k = 1; k <= N; ++k) {
    std::size_t want = sym_power(L.cx, k).cx.space.total_dim();
    std::size_t got = 0;
    for (const auto& w : U.words)
      if (static_cast<int>(w.size()) == k) ++got;
    if (want != got) fail(Err::AxiomFail, "PBW dimension");
  }
  // differential: Leibniz then PBW normalization
  ChainMap d = ChainMap::zero(space, space, 1);
  std::map<int, QMat> blocks;
  auto ensure = [&](int p) -> QMat& {
    auto it = blocks.find(p);
    if (it == blocks.end())
      it = blocks.emplace(p, QMat(space.dim(p + 1), space.dim(p))).first;
    return it->second;
  };
  for (std::size_t id = 0; id < U.words.size(); ++id) {
    const Word& w = U.words[id];
    auto [deg, col] = U.loc(id);
    int prefix = 1;
    for (std::size_t i = 0; i < w.size(); ++i) {
      QMat db = L.cx.d.block(w[i].deg);
      for (std::size_t r = 0; r < db.rows(); ++r) {
        if (db.at(r, w[i].idx) == 0) continue;
        Word w2 = w;
        w2[i] = {w[i].deg + 1, static_cast<int>(r)};
        std::map<Word, Rat> nf;
        pbw_normalize(L, w2, Rat(prefix) * db.at(r, w[i].idx), nf, N);
        for (const auto& [tw, c] : nf) {
          if (c == 0) continue;
          auto it = U.word_id.find(tw);
          if (it == U.word_id.end()) fail(Err::AxiomFail, "pbw d closure");
          ensure(deg).at(U.loc(it->second).second, col) += c;
        }
      }
      if (w[i].deg % 2 != 0) prefix = -prefix;
    }
  }
  for (auto& [p, m] : blocks)
    if (!m.is_zero()) d.blocks[p] = std::move(m);
  U.cx = make_complex(space, d);
  // shuffle-primitive coproduct
  U.coprod.resize(U.words.size());
  for (std::size_t id = 0; id < U.words.size(); ++id) {
    const Word& w = U.words[id];
    std::size_t k = w.size();
    for (std::size_t mask = 0; mask < (1u << k); ++mask) {
      Word wI, wJ;
      int sign = 1;
      for (std::size_t t = 0; t < k; ++t) {
        if (mask & (1u << t)) {
          wI.push_back(w[t]);
          for (std::size_t s = 0; s < t; ++s)
            if (!(mask & (1u << s))) sign *= koszul_sign(w[s].deg, w[t].deg);
        } else {
          wJ.push_back(w[t]);
        }
      }
      auto i1 = U.word_id.find(wI);
      auto i2 = U.word_id.find(wJ);
      if (i1 == U.word_id.end() || i2 == U.word_id.end())
        fail(Err::AxiomFail, "coproduct closure");
      U.coprod[id].emplace_back(i1->second, i2->second, Rat(sign));
    }
  }
  U.as_coalgebra().validate();
  return U;
}

Connecting connecting_morphism(const DgLieAlgebra& g,
                               const std::map<int, QMat>& h_span, int N) {
  Connecting out;
  out.cone = cone_lie(g, h_span);
  const DgLieAlgebra& C = out.cone.cone;
  const DgLieAlgebra& h = out.cone.h;
  out.U = enveloping(C, N);
  // c̃ on tensor words: base cases 0 and ψ, then
  // c̃(x u) = (-1)^{|x|} [π(x), c̃(u)]
  GradedSpace h1 = shift_space(h.cx.space, 1);
  auto psi_of = [&](const Gen& x) {
    // the h[1]-component of a cone generator: cone degree n splits as
    // h^{n+1} ⊕ g^n
    GradedVec v;
    std::size_t hn = h.cx.space.dim(x.deg + 1);
    if (static_cast<std::size_t>(x.idx) < hn) {
      v.c[x.deg].assign(h1.dim(x.deg), Rat(0));
      v.c[x.deg][x.idx] = 1;
    }
    return v;
  };
  auto pi_of = [&](const Gen& x) {
    GradedVec v;
    std::size_t hn = h.cx.space.dim(x.deg + 1);
    if (static_cast<std::size_t>(x.idx) >= hn) {
      v.c[x.deg].assign(g.cx.space.dim(x.deg), Rat(0));
      v.c[x.deg][x.idx - hn] = 1;
    }
    return v;
  };
  // bracket of a g-element with an h[1]-element, valued in h[1]
  auto g_on_h1 = [&](const GradedVec& y, const GradedVec& z) {
    // z in h[1]: unshift, bracket in g through the inclusion, re-express
    GradedVec out_v;
    for (const auto& [pz, zs] : z.c) {
      GradedVec zh;
      zh.c[pz + 1] = zs; // h-coordinates at degree pz + 1
      // include into g
      GradedVec zg;
      {
        QMat inc = out.cone.incl.block(pz + 1);
        auto img = inc.apply(zs);
        zg.c[pz + 1] = img;
      }
      GradedVec b = g.bracket_of(y, zg);
      for (const auto& [pb, bs] : b.c) {
        // write back in h coordinates
        QMat hib = out.cone.incl.block(pb);
        if (hib.cols() == 0) {
          bool nz = false;
          for (const auto& x : bs) nz = nz || x != 0;
          if (nz) fail(Err::NotAnIdeal, "bracket leaves the ideal");
          continue;
        }
        QMat col(bs.size(), 1);
        for (std::size_t r = 0; r < bs.size(); ++r) col.at(r, 0) = bs[r];
        auto sol = hib.solve(col);
        if (!sol) fail(Err::NotAnIdeal, "bracket leaves the ideal");
        auto& dst = out_v.c[pb - 1];
        dst.resize(h1.dim(pb - 1));
        for (std::size_t r = 0; r < sol->rows(); ++r)
          dst[r] += sol->at(r, 0);
      }
    }
    out_v.prune();
    return out_v;
  };
  // evaluate c̃ on an arbitrary tensor word of cone generators
  auto c_tilde_word = [&](auto&& self, const Word& w) -> GradedVec {
    if (w.empty()) return {};
    if (w.size() == 1) return psi_of(w[0]);
    Word rest(w.begin() + 1, w.end());
    GradedVec tail = self(self, rest);
    if (tail.is_zero()) return {};
    GradedVec y = pi_of(w[0]);
    if (y.is_zero()) return {};
    GradedVec b = g_on_h1(y, tail);
    return b * Rat(shift_sign(w[0].deg));
  };
  // factorization check: the recursion must kill the enveloping relations
  std::vector<Gen> cgens;
  for (int p : C.cx.space.degrees())
    for (int i = 0; i < static_cast<int>(C.cx.space.dim(p)); ++i)
      cgens.push_back({p, i});
  for (const Gen& x : cgens)
    for (const Gen& y : cgens)
      for (std::size_t uid = 0; uid < out.U.words.size(); ++uid) {
        if (out.U.word_len(uid) > N - 2) continue;
        Word xy{x, y};
        Word yx{y, x};
        Word base = out.U.words[uid];
        Word wxy = xy, wyx = yx;
        wxy.insert(wxy.end(), base.begin(), base.end());
        wyx.insert(wyx.end(), base.begin(), base.end());
        GradedVec lhs = c_tilde_word(c_tilde_word, wxy) +
                        c_tilde_word(c_tilde_word, wyx) *
                            Rat(-koszul_sign(x.deg, y.deg));
        // [x,y] in the cone expanded over generators
        GradedVec xv = GradedVec::basis(C.cx.space, x.deg, x.idx);
        GradedVec yv = GradedVec::basis(C.cx.space, y.deg, y.idx);
        GradedVec br = C.bracket_of(xv, yv);
        GradedVec rhs;
        for (const auto& [pb, bs] : br.c)
          for (std::size_t r = 0; r < bs.size(); ++r) {
            if (bs[r] == 0) continue;
            Word w{Gen{pb, static_cast<int>(r)}};
            w.insert(w.end(), base.begin(), base.end());
            rhs = rhs + c_tilde_word(c_tilde_word, w) * bs[r];
          }
        GradedVec diff = lhs + rhs * Rat(-1);
        if (!diff.is_zero())
          fail(Err::FactorFail,
               "relation (" + std::to_string(x.deg) + "," +
                   std::to_string(x.idx) + ")(" + std::to_string(y.deg) +
                   "," + std::to_string(y.idx) + ") on word " +
                   std::to_string(uid));
      }
  // c̃ as a chain-map-shaped linear map U -> h[1]
  ChainMap ct = ChainMap::zero(out.U.cx.space, h1, 0);
  {
    std::map<int, QMat> blocks;
    for (std::size_t id = 0; id < out.U.words.size(); ++id) {
      auto [deg, pos] = out.U.loc(id);
      GradedVec v = c_tilde_word(c_tilde_word, out.U.words[id]);
      auto it = v.c.find(deg);
      if (it == v.c.end()) continue;
      auto bit = blocks.find(deg);
      if (bit == blocks.end())
        bit = blocks.emplace(deg, QMat(h1.dim(deg), out.U.cx.space.dim(deg)))
                  .first;
      for (std::size_t r = 0; r < it->second.size(); ++r)
        if (it->second[r] != 0) bit->second.at(r, pos) = it->second[r];
    }
    for (auto& [p, m] : blocks)
      if (!m.is_zero()) ct.blocks[p] = std::move(m);
  }
  out.c_tilde = ct;
  Coalgebra Uco = out.U.as_coalgebra();
  if (!quillen_mc(Uco, h, ct))
    fail(Err::NotMaurerCartan, "c_tilde fails the Maurer-Cartan equation");
  out.Ch = chevalley(h, N);
  out.c = quillen_inverse(Uco, out.Ch, ct);

  // quotient algebra and the induced coalgebra morphism
  // complement basis of h in g, per degree
  std::map<int, QMat> comp;
  GradedSpace qs;
  for (int p : g.cx.space.degrees()) {
    QMat hmat = out.cone.incl.block(p);
    std::vector<std::size_t> chosen;
    span_extend(hmat, QMat::identity(g.cx.space.dim(p)), &chosen);
    QMat cmat(g.cx.space.dim(p), chosen.size());
    for (std::size_t c = 0; c < chosen.size(); ++c)
      cmat.at(chosen[c], c) = 1;
    comp[p] = cmat;
    if (!chosen.empty()) {
      std::vector<std::string> ls;
      for (std::size_t i = 0; i < chosen.size(); ++i)
        ls.push_back("q:" + g.cx.space.comps.at(p)[chosen[i]]);
      qs.comps[p] = ls;
    }
  }
  // projection g -> g/h in the chosen coordinates
  ChainMap proj = ChainMap::zero(g.cx.space, qs, 0);
  for (int p : g.cx.space.degrees()) {
    QMat hmat = out.cone.incl.block(p);
    QMat basis = hmat.cols() ? hmat.hstack(comp[p]) : comp[p];
    if (basis.cols() == 0) continue;
    auto sol = basis.solve(QMat::identity(g.cx.space.dim(p)));
    if (!sol) fail(Err::ShapeMismatch, "quotient projection");
    QMat m(qs.dim(p), g.cx.space.dim(p));
    for (std::size_t i = 0; i < qs.dim(p); ++i)
      for (std::size_t j = 0; j < g.cx.space.dim(p); ++j)
        m.at(i, j) = sol->at(hmat.cols() + i, j);
    if (!m.is_zero()) proj.blocks[p] = std::move(m);
  }
  // induced differential and bracket on the quotient
  ChainMap qd = ChainMap::zero(qs, qs, 1);
  for (int p : qs.degrees()) {
    QMat m = proj.block(p + 1) * (g.cx.d.block(p) * comp[p]);
    if (!m.is_zero()) qd.blocks[p] = std::move(m);
  }
  Complex qcx = make_complex(qs, qd);
  auto qtc = tensor(qcx, qcx);
  ChainMap qbr = ChainMap::zero(qtc.cx.space, qs, 0);
  {
    std::map<int, QMat> blocks;
    for (const auto& [n, terms] : qtc.basis.terms) {
      QMat m(qs.dim(n), terms.size());
      bool nz = false;
      for (std::size_t col = 0; col < terms.size(); ++col) {
        auto [p, i, q, j] = terms[col];
        GradedVec x, y;
        x.c[p] = std::vector<Rat>(g.cx.space.dim(p));
        y.c[q] = std::vector<Rat>(g.cx.space.dim(q));
        for (std::size_t r = 0; r < comp[p].rows(); ++r)
          x.c[p][r] = comp[p].at(r, i);
        for (std::size_t r = 0; r < comp[q].rows(); ++r)
          y.c[q][r] = comp[q].at(r, j);
        GradedVec b = g.bracket_of(x, y);
        GradedVec pb = proj.apply(b);
        auto it = pb.c.find(n);
        if (it == pb.c.end()) continue;
        for (std::size_t r = 0; r < it->second.size(); ++r)
          if (it->second[r] != 0) {
            m.at(r, col) = it->second[r];
            nz = true;
          }
      }
      if (nz) blocks[n] = std::move(m);
    }
    for (auto& [n, m] : blocks) qbr.blocks[n] = std::move(m);
  }
  out.quotient = make_dg_lie(qcx, qbr);
  out.quotient_proj = proj;
  out.Uq = enveloping(out.quotient, N);
  // cone -> g/h : (x, y) -> proj(y); multiplicative extension on words
  ChainMap cproj = ChainMap::zero(C.cx.space, qs, 0);
  for (int p : C.cx.space.degrees()) {
    std::size_t hn = h.cx.space.dim(p + 1);
    QMat pm = proj.block(p);
    QMat m(qs.dim(p), C.cx.space.dim(p));
    bool nz = false;
    for (std::size_t j = hn; j < C.cx.space.dim(p); ++j)
      for (std::size_t r = 0; r < pm.rows(); ++r)
        if (pm.at(r, j - hn) != 0) {
          m.at(r, j) = pm.at(r, j - hn);
          nz = true;
        }
    if (nz) cproj.blocks[p] = std::move(m);
  }
  validate_lie_morphism(cproj, C, out.quotient);
  // U(proj): expand each letter and PBW-normalize in the quotient
  ChainMap up = ChainMap::zero(out.U.cx.space, out.Uq.cx.space, 0);
  {
    std::map<int, QMat> blocks;
    for (std::size_t id = 0; id < out.U.words.size(); ++id) {
      auto [deg, pos] = out.U.loc(id);
      std::map<Word, Rat> terms;
      terms[{}] = 1;
      for (const auto& gen : out.U.words[id]) {
        QMat pb = cproj.block(gen.deg);
        std::map<Word, Rat> nx;
        for (const auto& [pre, pc] : terms)
          for (std::size_t r = 0; r < pb.rows(); ++r) {
            if (pb.at(r, gen.idx) == 0) continue;
            Word p2 = pre;
            p2.push_back({gen.deg, static_cast<int>(r)});
            nx[p2] += pc * pb.at(r, gen.idx);
          }
        terms = std::move(nx);
      }
      auto bit = blocks.find(deg);
      if (bit == blocks.end())
        bit = blocks
                  .emplace(deg, QMat(out.Uq.cx.space.dim(deg),
                                     out.U.cx.space.dim(deg)))
                  .first;
      for (const auto& [w, c] : terms) {
        std::map<Word, Rat> nf;
        pbw_normalize(out.quotient, w, c, nf, N);
        for (const auto& [tw, tc] : nf) {
          if (tc == 0) continue;
          auto it = out.Uq.word_id.find(tw);
          if (it == out.Uq.word_id.end())
            fail(Err::AxiomFail, "quotient pbw closure");
          bit->second.at(out.Uq.loc(it->second).second, pos) += tc;
        }
      }
    }
    for (auto& [p, m] : blocks)
      if (!m.is_zero()) up.blocks[p] = std::move(m);
  }
  validate_coalgebra_morphism(up, Uco, out.Uq.as_coalgebra());
  if (!is_chain_map(up, out.U.cx, out.Uq.cx))
    fail(Err::NotChainMap, "U(proj)");
  out.u_proj = up;
  return out;
}

SnakeOracle snake_oracle(const DgLieAlgebra& g, const DgLieAlgebra& h,
                         const ChainMap& incl, const DgLieAlgebra& quotient,
                         const ChainMap& proj) {
  SnakeOracle S;
  S.Hq = cohomology(quotient.cx);
  S.Hh = cohomology(h.cx);
  for (const auto& [p, Hp] : S.Hq) {
    std::size_t ht = S.Hh.count(p + 1) ? S.Hh.at(p + 1).dim : 0;
    QMat delta(ht, Hp.dim);
    for (std::size_t c = 0; c < Hp.dim; ++c) {
      // lift the representative through proj
      QMat z(quotient.cx.space.dim(p), 1);
      for (std::size_t r = 0; r < z.rows(); ++r) z.at(r, 0) = Hp.reps.at(r, c);
      auto lift = proj.block(p).solve(z);
      if (!lift) fail(Err::ShapeMismatch, "snake lift");
      // x := -d(lift), expressed in h coordinates
      QMat dx = g.cx.d.block(p) * *lift * Rat(-1);
      if (ht == 0) continue;
      auto hx = incl.block(p + 1).solve(dx);
      if (!hx) fail(Err::AxiomFail, "snake image not in the ideal");
      // class of hx in H^{p+1}(h)
      QMat img = h.cx.d.block(p);
      QMat basis = img.cols() ? img.hstack(S.Hh.at(p + 1).reps)
                              : S.Hh.at(p + 1).reps;
      auto sol = basis.solve(*hx);
      if (!sol) fail(Err::AxiomFail, "snake class expression");
      for (std::size_t i = 0; i < ht; ++i)
        delta.at(i, c) = sol->at(img.cols() + i, 0);
    }
    S.delta[p] = std::move(delta);
  }
  return S;
}

std::map<int, QMat> connecting_first_order(const Connecting& C) {
  // c¹ on cohomology, through H(proj)^{-1} : H(g/h) -> H(Cone)
  std::map<int, QMat> out;
  auto Hq = cohomology(C.quotient.cx);
  auto Hh = cohomology(C.cone.h.cx);
  ChainMap f1 = quillen_forward(C.c, C.U.as_coalgebra(), C.Ch);
  // restriction of f1 to the single-letter embedding Cone -> U
  for (const auto& [p, Hp] : Hq) {
    std::size_t ht = Hh.count(p + 1) ? Hh.at(p + 1).dim : 0;
    QMat m(ht, Hp.dim);
    for (std::size_t c = 0; c < Hp.dim; ++c) {
      // find a cone cocycle whose projection class is the representative:
      // solve [d_cone | ker-basis...] — search the cone cocycles
      QMat K = C.cone.cone.cx.d.block(p).kernel();
      // proj of the kernel columns into quotient classes
      // cproj on cohomology: cone -> quotient is induced by (x,y) -> proj y
      // build the cone->quotient map on coordinates
      std::size_t hn = C.cone.h.cx.space.dim(p + 1);
      QMat pm = C.quotient_proj.block(p);
      QMat cp(C.quotient.cx.space.dim(p), C.cone.cone.cx.space.dim(p));
      for (std::size_t j = hn; j < C.cone.cone.cx.space.dim(p); ++j)
        for (std::size_t r = 0; r < pm.rows(); ++r)
          cp.at(r, j) = pm.at(r, j - hn);
      QMat img_q = C.quotient.cx.d.block(p - 1);
      // want v in ker(d_cone) with cp v = rep + d(w): solve
      // [cp*K | img_q] x = rep
      QMat A = (cp * K);
      QMat B = img_q.cols() ? A.hstack(img_q) : A;
      QMat rep(C.quotient.cx.space.dim(p), 1);
      for (std::size_t r = 0; r < rep.rows(); ++r)
        rep.at(r, 0) = Hp.reps.at(r, c);
      auto sol = B.solve(rep);
      if (!sol) fail(Err::AxiomFail, "H(proj) not surjective");
      QMat v(C.cone.cone.cx.space.dim(p), 1);
      for (std::size_t k = 0; k < K.cols(); ++k)
        if (sol->at(k, 0) != 0) {
          for (std::size_t r = 0; r < K.rows(); ++r)
            v.at(r, 0) += K.at(r, k) * sol->at(k, 0);
        }
      // apply f1 to the single-letter word corresponding to v
      // letters of U at degree p are cone generators; assemble the U-vector
      GradedVec uv;
      for (std::size_t r = 0; r < v.rows(); ++r) {
        if (v.at(r, 0) == 0) continue;
        Word w{Gen{p, static_cast<int>(r)}};
        auto it = C.U.word_id.find(w);
        if (it == C.U.word_id.end()) fail(Err::BadInput, "letter word");
        auto [ud, upos] = C.U.loc(it->second);
        auto& dst = uv.c[ud];
        dst.resize(C.U.cx.space.dim(ud));
        dst[upos] += v.at(r, 0);
      }
      GradedVec h1v = f1.apply(uv);
      // class in H^{p+1}(h): h1v lives in h[1] degree p
      QMat col(C.cone.h.cx.space.dim(p + 1), 1);
      auto itv = h1v.c.find(p);
      if (itv != h1v.c.end())
        for (std::size_t r = 0; r < itv->second.size(); ++r)
          col.at(r, 0) = itv->second[r];
      if (ht == 0) continue;
      QMat img = C.cone.h.cx.d.block(p);
      QMat basis =
          img.cols() ? img.hstack(Hh.at(p + 1).reps) : Hh.at(p + 1).reps;
      auto sol2 = basis.solve(col);
      if (!sol2) fail(Err::AxiomFail, "c1 class expression");
      for (std::size_t i = 0; i < ht; ++i)
        m.at(i, c) = sol2->at(img.cols() + i, 0);
    }
    out[p] = std::move(m);
  }
  return out;
}

} // namespace ranjac
