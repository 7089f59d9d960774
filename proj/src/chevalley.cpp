#include "ranjac/chevalley.hpp"

#include <algorithm>
#include <sstream>

#include "ranjac/config.hpp"
#include "ranjac/error.hpp"

namespace ranjac {

namespace {

// Words live in Sym(L[1]); letters keep their L-degrees, but all Koszul
// bookkeeping uses the shifted parity |x|_L + 1.
int sym_swap_sign(const Gen& a, const Gen& b) {
  return koszul_sign(a.deg + 1, b.deg + 1);
}

// Sorts into canonical order with shifted parities; zero when a letter of
// even L-degree (odd shifted parity) repeats.
std::optional<std::pair<int, Word>> normalize_shifted(Word w) {
  int sign = 1;
  for (std::size_t i = 1; i < w.size(); ++i) {
    std::size_t j = i;
    while (j > 0 && w[j] < w[j - 1]) {
      sign *= sym_swap_sign(w[j - 1], w[j]);
      std::swap(w[j], w[j - 1]);
      --j;
    }
  }
  for (std::size_t i = 1; i < w.size(); ++i)
    if (w[i] == w[i - 1] && w[i].deg % 2 == 0) return std::nullopt;
  return std::make_pair(sign, std::move(w));
}

// Sign of the reordering w -> (w_i, w_j, rest-in-order), i < j.
int front_pair_sign(const Word& w, std::size_t i, std::size_t j) {
  int sign = 1;
  Word v = w;
  for (std::size_t t = i; t > 0; --t) {
    sign *= sym_swap_sign(v[t - 1], v[t]);
    std::swap(v[t - 1], v[t]);
  }
  for (std::size_t t = j; t > 1; --t) {
    sign *= sym_swap_sign(v[t - 1], v[t]);
    std::swap(v[t - 1], v[t]);
  }
  return sign;
}

// Sign of the reordering w -> (w_I, w_{Ī}), both in original order.
int split_sign(const Word& w, const std::vector<bool>& in_I) {
  int sign = 1;
  for (std::size_t t = 0; t < w.size(); ++t) {
    if (!in_I[t]) continue;
    for (std::size_t s = 0; s < t; ++s)
      if (!in_I[s]) sign *= sym_swap_sign(w[s], w[t]);
  }
  return sign;
}

std::string word_label(const GradedSpace& base, const Word& w) {
  if (w.empty()) return "1";
  std::string l;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) l += ".";
    l += base.comps.at(w[i].deg)[w[i].idx];
  }
  return l;
}

int cdeg(const Word& w) {
  int d = 0;
  for (const auto& g : w) d += g.deg;
  return d - static_cast<int>(w.size());
}

ChevalleyComplex build_chevalley(const DgLieAlgebra& L, int n, bool reduced) {
  if (n < 0 || (reduced && n < 1))
    fail(Err::BadInput, "chevalley truncation must be >= " +
                            std::string(reduced ? "1" : "0"));
  ChevalleyComplex C;
  C.L = L;
  C.n = n;
  C.reduced = reduced;

  // enumerate words, shortest first, lexicographic within a length
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
      if (!cur.empty() && cur.back() == gens[k] && (gens[k].deg % 2 == 0))
        continue; // odd shifted parity: even L-degree letters never repeat
      cur.push_back(gens[k]);
      self(self, k, len);
      cur.pop_back();
    }
  };
  for (int len = reduced ? 1 : 0; len <= n; ++len) rec(rec, 0, len);

  // group by complex degree
  std::map<int, std::vector<Word>> by_deg;
  for (const auto& w : all) by_deg[cdeg(w)].push_back(w);
  GradedSpace space;
  for (const auto& [deg, ws] : by_deg) {
    std::vector<std::string> ls;
    for (const auto& w : ws) {
      C.word_id[w] = C.words.size();
      C.words.push_back(w);
      ls.push_back(word_label(L.cx.space, w));
    }
    space.comps[deg] = std::move(ls);
  }
  space.validate();
  if (!reduced) C.unit_id = C.word_id.at(Word{});

  auto loc_of = [&](std::size_t id) {
    int deg = cdeg(C.words[id]);
    std::size_t base = C.word_id.at(by_deg.at(deg).front());
    return std::make_pair(deg, id - base);
  };

  // d' : Leibniz from d_L with the shift factor (-1)^k on length-k words
  // d'': bracket contraction with the wedge reordering sign
  std::map<int, QMat> dp_blocks, ds_blocks;
  auto ensure = [&](std::map<int, QMat>& blocks, int p) -> QMat& {
    auto it = blocks.find(p);
    if (it == blocks.end())
      it = blocks.emplace(p, QMat(space.dim(p + 1), space.dim(p))).first;
    return it->second;
  };
  for (std::size_t id = 0; id < C.words.size(); ++id) {
    const Word& w = C.words[id];
    auto [deg, col] = loc_of(id);
    int k = static_cast<int>(w.size());
    // d' : Leibniz for d_{L[1]} = -d_L, prefix signs in shifted parities
    (void)k;
    int prefix = 1;
    for (std::size_t i = 0; i < w.size(); ++i) {
      QMat db = L.cx.d.block(w[i].deg);
      for (std::size_t r = 0; r < db.rows(); ++r) {
        if (db.at(r, w[i].idx) == 0) continue;
        Word w2 = w;
        w2[i] = {w[i].deg + 1, static_cast<int>(r)};
        auto nrm = normalize_shifted(w2);
        if (!nrm) continue;
        auto it = C.word_id.find(nrm->second);
        if (it == C.word_id.end()) continue;
        auto [td, tpos] = loc_of(it->second);
        (void)td;
        ensure(dp_blocks, deg).at(tpos, col) +=
            Rat(-prefix * nrm->first) * db.at(r, w[i].idx);
      }
      if ((w[i].deg + 1) % 2 != 0) prefix = -prefix;
    }
    // d'' : cofree coderivation extension of l2(v_i v_j) = (-1)^{p_i}[x_i,x_j]
    for (std::size_t i = 0; i + 1 < w.size(); ++i)
      for (std::size_t j = i + 1; j < w.size(); ++j) {
        int fs = front_pair_sign(w, i, j) * shift_sign(w[i].deg);
        GradedVec x = GradedVec::basis(L.cx.space, w[i].deg, w[i].idx);
        GradedVec y = GradedVec::basis(L.cx.space, w[j].deg, w[j].idx);
        GradedVec b = L.bracket_of(x, y);
        if (b.is_zero()) continue;
        Word rest;
        for (std::size_t t = 0; t < w.size(); ++t)
          if (t != i && t != j) rest.push_back(w[t]);
        for (const auto& [bd, xs] : b.c)
          for (std::size_t r = 0; r < xs.size(); ++r) {
            if (xs[r] == 0) continue;
            Word w2;
            w2.push_back({bd, static_cast<int>(r)});
            for (const auto& g : rest) w2.push_back(g);
            auto nrm = normalize_shifted(w2);
            if (!nrm) continue;
            auto it = C.word_id.find(nrm->second);
            if (it == C.word_id.end()) continue;
            auto [td, tpos] = loc_of(it->second);
            (void)td;
            ensure(ds_blocks, deg).at(tpos, col) +=
                Rat(fs * nrm->first) * xs[r];
          }
      }
  }
  C.dprime = ChainMap::zero(space, space, 1);
  C.dsecond = ChainMap::zero(space, space, 1);
  for (auto& [p, m] : dp_blocks)
    if (!m.is_zero()) C.dprime.blocks[p] = std::move(m);
  for (auto& [p, m] : ds_blocks)
    if (!m.is_zero()) C.dsecond.blocks[p] = std::move(m);
  C.cx = make_complex(space, C.dprime + C.dsecond); // validates d^2 = 0
  if (!C.dsecond.compose(C.dsecond).is_zero())
    fail(Err::SquareNonzero, "(d'')^2 != 0");
  if (!(C.dprime.compose(C.dsecond) + C.dsecond.compose(C.dprime)).is_zero())
    fail(Err::SquareNonzero, "d'd'' + d''d' != 0");

  // coproduct: subset splittings with shifted-parity Koszul signs. Both
  // halves of a length-<=n word are length-<=n words, so the truncated
  // complex is closed under Δ (and d only lowers or preserves length).
  C.coprod.resize(C.words.size());
  for (std::size_t id = 0; id < C.words.size(); ++id) {
    const Word& w = C.words[id];
    std::size_t k = w.size();
    for (std::size_t mask = 0; mask < (1u << k); ++mask) {
      std::vector<bool> in_I(k, false);
      Word wI, wJ;
      for (std::size_t t = 0; t < k; ++t) {
        if (mask & (1u << t)) {
          in_I[t] = true;
          wI.push_back(w[t]);
        } else {
          wJ.push_back(w[t]);
        }
      }
      if (reduced && (wI.empty() || wJ.empty())) continue;
      auto i1 = C.word_id.find(wI);
      auto i2 = C.word_id.find(wJ);
      if (i1 == C.word_id.end() || i2 == C.word_id.end()) continue;
      C.coprod[id].emplace_back(i1->second, i2->second,
                                Rat(split_sign(w, in_I)));
    }
  }
  C.as_coalgebra().validate();
  return C;
}

} // namespace

std::pair<int, std::size_t> ChevalleyComplex::loc(std::size_t id) const {
  int deg = cdeg(words[id]);
  std::size_t hi = id;
  while (hi > 0 && cdeg(words[hi - 1]) == deg) --hi;
  return {deg, id - hi};
}

std::size_t ChevalleyComplex::id_at(int deg, std::size_t pos) const {
  for (std::size_t id = 0; id < words.size(); ++id)
    if (cdeg(words[id]) == deg) return id + pos;
  fail(Err::BadInput, "id_at: empty degree");
}

FilteredComplex ChevalleyComplex::word_filtration() const {
  FilteredComplex fc;
  fc.cx = cx;
  fc.n0 = 0;
  for (int k = reduced ? 1 : 0; k <= n; ++k) {
    std::map<int, QMat> step;
    for (int p : cx.space.degrees()) {
      std::vector<std::size_t> cols;
      for (std::size_t pos = 0; pos < cx.space.dim(p); ++pos) {
        std::size_t id = id_at(p, pos);
        if (word_len(id) <= k) cols.push_back(pos);
      }
      QMat m(cx.space.dim(p), cols.size());
      for (std::size_t c = 0; c < cols.size(); ++c) m.at(cols[c], c) = 1;
      step[p] = std::move(m);
    }
    fc.steps.push_back(std::move(step));
  }
  fc.validate();
  return fc;
}

Coalgebra ChevalleyComplex::as_coalgebra() const {
  Coalgebra co;
  co.cx = cx;
  co.coprod = coprod;
  co.counit.assign(words.size(), Rat(0));
  if (!reduced) {
    co.unit = unit_id;
    co.counit[unit_id] = 1;
  }
  return co;
}

std::pair<int, std::size_t> Coalgebra::loc(std::size_t id) const {
  std::size_t off = 0;
  for (const auto& [p, ls] : cx.space.comps) {
    if (id < off + ls.size()) return {p, id - off};
    off += ls.size();
  }
  fail(Err::BadInput, "coalgebra id out of range");
}

std::size_t Coalgebra::id_at(int deg, std::size_t pos) const {
  std::size_t off = 0;
  for (const auto& [p, ls] : cx.space.comps) {
    if (p == deg) return off + pos;
    off += ls.size();
  }
  fail(Err::BadInput, "coalgebra degree out of range");
}

GradedVec Coalgebra::vec(std::size_t id) const {
  auto [deg, pos] = loc(id);
  return GradedVec::basis(cx.space, deg, pos);
}

std::vector<std::vector<std::pair<std::size_t, Rat>>> Coalgebra::d_sparse()
    const {
  std::vector<std::vector<std::pair<std::size_t, Rat>>> out(size());
  for (std::size_t id = 0; id < size(); ++id) {
    auto [deg, pos] = loc(id);
    QMat b = cx.d.block(deg);
    for (std::size_t r = 0; r < b.rows(); ++r)
      if (b.at(r, pos) != 0)
        out[id].emplace_back(id_at(deg + 1, r), b.at(r, pos));
  }
  return out;
}

void Coalgebra::validate() const {
  if (coprod.size() != cx.space.total_dim())
    fail(Err::ShapeMismatch, "coproduct size");
  auto deg_of = [&](std::size_t id) { return loc(id).first; };
  auto d = d_sparse();
  for (std::size_t id = 0; id < size(); ++id) {
    std::map<std::pair<std::size_t, std::size_t>, Rat> plain, swapped;
    for (const auto& [a, b, c] : coprod[id]) {
      plain[{a, b}] += c;
      swapped[{b, a}] += c * Rat(koszul_sign(deg_of(a), deg_of(b)));
    }
    for (auto& [k, v] : swapped)
      if (plain[k] != v)
        fail(Err::AxiomFail,
             "coproduct not cocommutative at id " + std::to_string(id));
    for (auto& [k, v] : plain)
      if (swapped[k] != v)
        fail(Err::AxiomFail,
             "coproduct not cocommutative at id " + std::to_string(id));
    std::map<std::tuple<std::size_t, std::size_t, std::size_t>, Rat> l, r;
    for (const auto& [a, b, c] : coprod[id]) {
      for (const auto& [a1, a2, c2] : coprod[a]) l[{a1, a2, b}] += c * c2;
      for (const auto& [b1, b2, c2] : coprod[b]) r[{a, b1, b2}] += c * c2;
    }
    for (auto& [k, v] : l)
      if (r[k] != v)
        fail(Err::AxiomFail,
             "coproduct not coassociative at id " + std::to_string(id));
    for (auto& [k, v] : r)
      if (l[k] != v)
        fail(Err::AxiomFail,
             "coproduct not coassociative at id " + std::to_string(id));
    std::map<std::pair<std::size_t, std::size_t>, Rat> lhs, rhs;
    for (const auto& [t, c] : d[id])
      for (const auto& [a, b, c2] : coprod[t]) lhs[{a, b}] += c * c2;
    for (const auto& [a, b, c] : coprod[id]) {
      for (const auto& [t, c2] : d[a]) rhs[{t, b}] += c * c2;
      for (const auto& [t, c2] : d[b])
        rhs[{a, t}] += c * c2 * Rat(shift_sign(deg_of(a)));
    }
    for (auto& [k, v] : lhs)
      if (rhs[k] != v)
        fail(Err::AxiomFail,
             "d is not a coderivation at id " + std::to_string(id));
    for (auto& [k, v] : rhs)
      if (lhs[k] != v)
        fail(Err::AxiomFail,
             "d is not a coderivation at id " + std::to_string(id));
    if (unit) {
      std::map<std::size_t, Rat> left;
      for (const auto& [a, b, c] : coprod[id])
        if (counit[a] != 0) left[b] += c * counit[a];
      for (auto& [k, v] : left)
        if (v != (k == id ? Rat(1) : Rat(0)))
          fail(Err::AxiomFail, "counit law fails at id " + std::to_string(id));
      for (const auto& [t, c] : d[id]) {
        (void)c;
        if (counit[t] != 0)
          fail(Err::AxiomFail,
               "counit does not kill d at id " + std::to_string(id));
      }
    }
  }
}

ChevalleyComplex chevalley(const DgLieAlgebra& L, int n) {
  return build_chevalley(L, n, false);
}

ChevalleyComplex reduced_chevalley(const DgLieAlgebra& L, int n) {
  return build_chevalley(L, n, true);
}

FilteredComplex coproduct_filtration(const ChevalleyComplex& C) {
  if (C.reduced) fail(Err::BadInput, "coproduct_filtration needs a unit");
  FilteredComplex fc;
  fc.cx = C.cx;
  fc.n0 = 0;
  for (int k = 1; k <= C.n + 1; ++k) {
    std::map<int, std::map<std::vector<std::size_t>, std::size_t>> row_ids;
    std::map<int, std::vector<std::map<std::size_t, Rat>>> cols;
    for (int p : C.cx.space.degrees()) cols[p].resize(C.cx.space.dim(p));
    for (std::size_t id = 0; id < C.words.size(); ++id) {
      auto [deg, pos] = C.loc(id);
      std::map<std::vector<std::size_t>, Rat> curm;
      curm[{id}] = 1;
      for (int step = 1; step < k; ++step) {
        std::map<std::vector<std::size_t>, Rat> next;
        for (const auto& [tup, c] : curm)
          for (const auto& [a, b, c2] : C.coprod[tup[0]]) {
            std::vector<std::size_t> t2{a, b};
            for (std::size_t t = 1; t < tup.size(); ++t) t2.push_back(tup[t]);
            next[t2] += c * c2;
          }
        curm = std::move(next);
      }
      for (const auto& [tup, c] : curm) {
        if (c == 0) continue;
        bool has_unit = false;
        for (std::size_t t : tup) has_unit = has_unit || t == C.unit_id;
        if (has_unit) continue;
        auto& rid = row_ids[deg];
        auto [it, fresh] = rid.emplace(tup, rid.size());
        (void)fresh;
        cols[deg][pos][it->second] += c;
      }
    }
    std::map<int, QMat> step;
    for (int p : C.cx.space.degrees()) {
      std::size_t nrows = row_ids.count(p) ? row_ids[p].size() : 0;
      QMat m(nrows, C.cx.space.dim(p));
      for (std::size_t j = 0; j < C.cx.space.dim(p); ++j)
        for (const auto& [r, c] : cols[p][j]) m.at(r, j) = c;
      step[p] = m.kernel();
    }
    fc.steps.push_back(std::move(step));
  }
  fc.validate();
  return fc;
}

bool group_like(const ChevalleyComplex& C, const GradedVec& u) {
  if (C.reduced) fail(Err::BadInput, "group_like needs a unital coalgebra");
  if (!C.cx.d.apply(u).is_zero()) return false;
  auto uid = C.loc(C.unit_id);
  Rat eps = 0;
  auto it = u.c.find(uid.first);
  if (it != u.c.end() && it->second.size() > uid.second)
    eps = it->second[uid.second];
  if (eps != 1) return false;
  std::map<std::pair<std::size_t, std::size_t>, Rat> lhs, rhs;
  for (const auto& [p, xs] : u.c)
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (xs[i] == 0) continue;
      std::size_t id = C.id_at(p, i);
      for (const auto& [a, b, c] : C.coprod[id]) lhs[{a, b}] += xs[i] * c;
    }
  for (const auto& [p, xs] : u.c)
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (xs[i] == 0) continue;
      for (const auto& [q, ys] : u.c)
        for (std::size_t j = 0; j < ys.size(); ++j) {
          if (ys[j] == 0) continue;
          rhs[{C.id_at(p, i), C.id_at(q, j)}] += xs[i] * ys[j];
        }
    }
  for (auto& [k, v] : lhs)
    if (rhs[k] != v) return false;
  for (auto& [k, v] : rhs)
    if (lhs[k] != v) return false;
  return true;
}

bool is_unit(const ChevalleyComplex& C, const GradedVec& u) {
  if (!group_like(C, u)) return false;
  int k = C.n + 1;
  std::vector<Rat> uco(C.words.size(), Rat(0));
  for (const auto& [p, xs] : u.c)
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (xs[i] != 0) uco[C.id_at(p, i)] = xs[i];
  for (std::size_t id = 0; id < C.words.size(); ++id) {
    std::map<std::vector<std::size_t>, Rat> curm;
    curm[{id}] = 1;
    for (int step = 1; step < k; ++step) {
      std::map<std::vector<std::size_t>, Rat> next;
      for (const auto& [tup, c] : curm)
        for (const auto& [a, b, c2] : C.coprod[tup[0]]) {
          std::vector<std::size_t> t2{a, b};
          for (std::size_t t = 1; t < tup.size(); ++t) t2.push_back(tup[t]);
          next[t2] += c * c2;
        }
      curm = std::move(next);
    }
    std::map<std::vector<std::size_t>, Rat> proj;
    for (const auto& [tup, c] : curm) {
      for (std::size_t mask = 0; mask < (1u << tup.size()); ++mask) {
        Rat coeff = c;
        bool skip = false;
        for (std::size_t t = 0; t < tup.size() && !skip; ++t)
          if (mask & (1u << t)) {
            Rat eps = tup[t] == C.unit_id ? Rat(1) : Rat(0);
            if (eps == 0)
              skip = true;
            else
              coeff *= -eps;
          }
        if (skip || coeff == 0) continue;
        std::map<std::vector<std::size_t>, Rat> terms;
        terms[{}] = coeff;
        for (std::size_t t = 0; t < tup.size(); ++t) {
          std::map<std::vector<std::size_t>, Rat> nx;
          if (mask & (1u << t)) {
            for (const auto& [pre, pc] : terms)
              for (std::size_t uu = 0; uu < uco.size(); ++uu) {
                if (uco[uu] == 0) continue;
                auto p2 = pre;
                p2.push_back(uu);
                nx[p2] += pc * uco[uu];
              }
          } else {
            for (const auto& [pre, pc] : terms) {
              auto p2 = pre;
              p2.push_back(tup[t]);
              nx[p2] += pc;
            }
          }
          terms = std::move(nx);
        }
        for (const auto& [tt, cc] : terms) proj[tt] += cc;
      }
    }
    for (const auto& [tt, cc] : proj) {
      (void)tt;
      if (cc != 0) return false;
    }
  }
  return true;
}

ChainMap chevalley_functor(const ChainMap& phi, const ChevalleyComplex& src,
                           const ChevalleyComplex& tgt) {
  validate_lie_morphism(phi, src.L, tgt.L);
  if (src.n > tgt.n || src.reduced != tgt.reduced)
    fail(Err::BadInput, "chevalley_functor truncation mismatch");
  ChainMap f = ChainMap::zero(src.cx.space, tgt.cx.space, 0);
  std::map<int, QMat> blocks;
  auto ensure = [&](int p) -> QMat& {
    auto it = blocks.find(p);
    if (it == blocks.end())
      it = blocks.emplace(p, QMat(tgt.cx.space.dim(p), src.cx.space.dim(p)))
               .first;
    return it->second;
  };
  for (std::size_t id = 0; id < src.words.size(); ++id) {
    const Word& w = src.words[id];
    auto [deg, col] = src.loc(id);
    std::map<Word, Rat> terms;
    terms[{}] = 1;
    for (const auto& g : w) {
      std::map<Word, Rat> nx;
      QMat pb = phi.block(g.deg);
      for (const auto& [pre, pc] : terms)
        for (std::size_t r = 0; r < pb.rows(); ++r) {
          if (pb.at(r, g.idx) == 0) continue;
          Word p2 = pre;
          p2.push_back({g.deg, static_cast<int>(r)});
          nx[p2] += pc * pb.at(r, g.idx);
        }
      terms = std::move(nx);
    }
    for (const auto& [w2, c] : terms) {
      auto nrm = normalize_shifted(w2);
      if (!nrm) continue;
      auto it = tgt.word_id.find(nrm->second);
      if (it == tgt.word_id.end()) continue;
      auto [td, tpos] = tgt.loc(it->second);
      (void)td;
      ensure(deg).at(tpos, col) += c * Rat(nrm->first);
    }
  }
  for (auto& [p, m] : blocks)
    if (!m.is_zero()) f.blocks[p] = std::move(m);
  if (!is_chain_map(f, src.cx, tgt.cx))
    fail(Err::NotChainMap, "chevalley functor image");
  return f;
}

ChevalleyCoefficients chevalley_with_coefficients(const DgLieAlgebra& L,
                                                  const DgLieModule& M,
                                                  int n) {
  ChevalleyCoefficients H;
  H.base = reduced_chevalley(L, n);
  H.M = M;
  const auto& C = H.base;
  std::map<int, std::vector<std::pair<std::size_t, Gen>>> by_deg;
  for (std::size_t id = 0; id < C.words.size(); ++id) {
    int wd = C.loc(id).first;
    for (int q : M.mx.space.degrees())
      for (int j = 0; j < static_cast<int>(M.mx.space.dim(q)); ++j)
        by_deg[q - wd].push_back({id, {q, j}});
  }
  GradedSpace space;
  std::map<std::pair<std::size_t, std::pair<int, int>>,
           std::pair<int, std::size_t>>
      pos_of;
  for (const auto& [deg, ps] : by_deg) {
    std::vector<std::string> ls;
    for (std::size_t k = 0; k < ps.size(); ++k) {
      const auto& [wid, m] = ps[k];
      pos_of[{wid, {m.deg, m.idx}}] = {deg, k};
      H.hom_basis.push_back(ps[k]);
      ls.push_back(C.cx.space.comps.at(C.loc(wid).first)[C.loc(wid).second] +
                   "=>" + M.mx.space.comps.at(m.deg)[m.idx]);
    }
    space.comps[deg] = std::move(ls);
  }
  space.validate();
  ChainMap d = ChainMap::zero(space, space, 1);
  std::map<int, QMat> blocks;
  auto ensure = [&](int p) -> QMat& {
    auto it = blocks.find(p);
    if (it == blocks.end())
      it = blocks.emplace(p, QMat(space.dim(p + 1), space.dim(p))).first;
    return it->second;
  };
  std::vector<std::vector<std::pair<std::size_t, Rat>>> dc(C.words.size());
  for (std::size_t id = 0; id < C.words.size(); ++id) {
    auto [deg, pos] = C.loc(id);
    QMat b = C.cx.d.block(deg);
    for (std::size_t r = 0; r < b.rows(); ++r)
      if (b.at(r, pos) != 0)
        dc[id].emplace_back(C.id_at(deg + 1, r), b.at(r, pos));
  }
  for (const auto& [deg, ps] : by_deg) {
    for (std::size_t k = 0; k < ps.size(); ++k) {
      const auto& [wid, m] = ps[k];
      int gdeg = deg;
      for (std::size_t vid = 0; vid < C.words.size(); ++vid)
        for (const auto& [tid, c] : dc[vid])
          if (tid == wid) {
            auto it = pos_of.find({vid, {m.deg, m.idx}});
            if (it == pos_of.end()) continue;
            auto [td, tpos] = it->second;
            if (td != deg + 1)
              fail(Err::ShapeMismatch, "coefficient differential degree");
            ensure(deg).at(tpos, k) += Rat(-shift_sign(gdeg)) * c;
          }
      for (std::size_t vid = 0; vid < C.words.size(); ++vid)
        for (const auto& [a, b, c] : C.coprod[vid]) {
          if (b != wid || C.word_len(a) != 1) continue;
          const Gen x = C.words[a][0];
          GradedVec xv = GradedVec::basis(L.cx.space, x.deg, x.idx);
          GradedVec mv = GradedVec::basis(M.mx.space, m.deg, m.idx);
          GradedVec r = M.act(xv, mv);
          int sgn = koszul_sign(gdeg, x.deg - 1);
          for (const auto& [rd, xs] : r.c)
            for (std::size_t rr = 0; rr < xs.size(); ++rr) {
              if (xs[rr] == 0) continue;
              auto it = pos_of.find({vid, {rd, static_cast<int>(rr)}});
              if (it == pos_of.end()) continue;
              auto [td, tpos] = it->second;
              if (td != deg + 1) continue;
              ensure(deg).at(tpos, k) += Rat(sgn) * c * xs[rr];
            }
        }
    }
  }
  for (auto& [p, m] : blocks)
    if (!m.is_zero()) d.blocks[p] = std::move(m);
  H.cx = make_complex(space, d);
  return H;
}

// --- Quillen ----------------------------------------------------------------

ChainMap quillen_forward(const CoalgebraMorphism& f, const Coalgebra& src,
                         const ChevalleyComplex& tgt) {
  GradedSpace g1 = shift_space(tgt.L.cx.space, 1);
  ChainMap f1 = ChainMap::zero(src.cx.space, g1, 0);
  for (int p : src.cx.space.degrees()) {
    QMat fb = f.f.block(p);
    if (fb.is_zero()) continue;
    QMat m(g1.dim(p), src.cx.space.dim(p));
    bool nz = false;
    for (std::size_t col = 0; col < fb.cols(); ++col)
      for (std::size_t r = 0; r < fb.rows(); ++r) {
        if (fb.at(r, col) == 0) continue;
        std::size_t tid = tgt.id_at(p, r);
        if (tgt.word_len(tid) != 1) continue;
        const Gen x = tgt.words[tid][0];
        m.at(x.idx, col) += fb.at(r, col);
        nz = true;
      }
    if (nz) f1.blocks[p] = std::move(m);
  }
  return f1;
}

bool quillen_mc(const Coalgebra& C, const DgLieAlgebra& g, const ChainMap& f1) {
  GradedSpace g1 = shift_space(g.cx.space, 1);
  if (!f1.src.same_dims(C.cx.space) || !f1.tgt.same_dims(g1) || f1.degree != 0)
    fail(Err::ShapeMismatch, "quillen f1 shape");
  if (C.unit) {
    auto [ud, up] = C.loc(*C.unit);
    QMat b = f1.block(ud);
    for (std::size_t r = 0; r < b.rows(); ++r)
      if (b.at(r, up) != 0) return false;
  }
  Complex g1cx = shift(g.cx, 1);
  ChainMap t1 = f1.compose(C.cx.d);
  t1.tgt = g1cx.space;
  ChainMap t2 = g1cx.d.compose(f1);
  ChainMap br = ChainMap::zero(C.cx.space, g1cx.space, 1);
  std::map<int, QMat> blocks;
  for (std::size_t id = 0; id < C.size(); ++id) {
    auto [p, pos] = C.loc(id);
    for (const auto& [a, b, c] : C.coprod[id]) {
      if (C.unit && (a == *C.unit || b == *C.unit)) continue;
      auto [pa, ia] = C.loc(a);
      auto [pb, ib] = C.loc(b);
      QMat fa = f1.block(pa), fb = f1.block(pb);
      GradedVec va, vb;
      va.c[pa + 1].assign(g.cx.space.dim(pa + 1), Rat(0));
      vb.c[pb + 1].assign(g.cx.space.dim(pb + 1), Rat(0));
      bool za = true, zb = true;
      for (std::size_t r = 0; r < fa.rows(); ++r)
        if (fa.at(r, ia) != 0) {
          va.c[pa + 1][r] = fa.at(r, ia);
          za = false;
        }
      for (std::size_t r = 0; r < fb.rows(); ++r)
        if (fb.at(r, ib) != 0) {
          vb.c[pb + 1][r] = fb.at(r, ib);
          zb = false;
        }
      if (za || zb) continue;
      // decalage-twisted bracket on g[1]: the left slot carries (-1)^{p+1}
      // for a value in g^{p+1}
      GradedVec out = g.bracket_of(va, vb) * Rat(shift_sign(pa + 1));
      auto it = out.c.find(p + 2);
      if (it == out.c.end()) continue;
      auto bit = blocks.find(p);
      if (bit == blocks.end())
        bit = blocks.emplace(p, QMat(g1cx.space.dim(p + 1), C.cx.space.dim(p)))
                  .first;
      for (std::size_t r = 0; r < it->second.size(); ++r)
        if (it->second[r] != 0) bit->second.at(r, pos) += c * it->second[r];
    }
  }
  for (auto& [p, m] : blocks)
    if (!m.is_zero()) br.blocks[p] = std::move(m);
  ChainMap defect = t1 - t2 - br * rat(1, 2);
  return defect.is_zero();
}

CoalgebraMorphism quillen_inverse(const Coalgebra& C,
                                  const ChevalleyComplex& tgt,
                                  const ChainMap& f1) {
  if (tgt.reduced) fail(Err::BadInput, "quillen_inverse expects unital C(g)");
  if (!quillen_mc(C, tgt.L, f1))
    fail(Err::NotMaurerCartan, "quillen_inverse input");
  ChainMap f = ChainMap::zero(C.cx.space, tgt.cx.space, 0);
  std::map<int, QMat> blocks;
  auto ensure = [&](int p) -> QMat& {
    auto it = blocks.find(p);
    if (it == blocks.end())
      it = blocks.emplace(p, QMat(tgt.cx.space.dim(p), C.cx.space.dim(p)))
               .first;
    return it->second;
  };
  for (std::size_t id = 0; id < C.size(); ++id) {
    if (C.counit[id] == 0) continue;
    auto [p, pos] = C.loc(id);
    auto [ud, upos] = tgt.loc(tgt.unit_id);
    if (ud != p) fail(Err::ShapeMismatch, "unit degree");
    ensure(p).at(upos, pos) += C.counit[id];
  }
  long kfact = 1;
  for (int k = 1; k <= tgt.n; ++k) {
    kfact *= k;
    for (std::size_t id = 0; id < C.size(); ++id) {
      auto [p, pos] = C.loc(id);
      std::map<std::vector<std::size_t>, Rat> curm;
      curm[{id}] = 1;
      for (int step = 1; step < k; ++step) {
        std::map<std::vector<std::size_t>, Rat> next;
        for (const auto& [tup, c] : curm)
          for (const auto& [a, b, c2] : C.coprod[tup[0]]) {
            if (C.unit && (a == *C.unit || b == *C.unit)) continue;
            std::vector<std::size_t> t2{a, b};
            for (std::size_t t = 1; t < tup.size(); ++t) t2.push_back(tup[t]);
            next[t2] += c * c2;
          }
        curm = std::move(next);
      }
      for (const auto& [tup, c] : curm) {
        if (C.unit) {
          bool has_unit = false;
          for (std::size_t t : tup) has_unit = has_unit || t == *C.unit;
          if (has_unit) continue;
        }
        std::map<Word, Rat> terms;
        terms[{}] = c;
        for (std::size_t t = 0; t < tup.size(); ++t) {
          auto [pa, ia] = C.loc(tup[t]);
          QMat fb = f1.block(pa);
          std::map<Word, Rat> nx;
          for (const auto& [pre, pc] : terms)
            for (std::size_t r = 0; r < fb.rows(); ++r) {
              if (fb.at(r, ia) == 0) continue;
              Word p2 = pre;
              p2.push_back({pa + 1, static_cast<int>(r)});
              nx[p2] += pc * fb.at(r, ia);
            }
          terms = std::move(nx);
        }
        for (const auto& [gw, gc] : terms) {
          auto nrm = normalize_shifted(gw);
          if (!nrm) continue;
          auto it = tgt.word_id.find(nrm->second);
          if (it == tgt.word_id.end()) continue;
          auto [td, tpos] = tgt.loc(it->second);
          if (td != p) fail(Err::ShapeMismatch, "quillen word degree");
          ensure(p).at(tpos, pos) += gc * Rat(nrm->first) / Rat(kfact);
        }
      }
    }
  }
  for (auto& [p, m] : blocks)
    if (!m.is_zero()) f.blocks[p] = std::move(m);
  CoalgebraMorphism out{f};
  validate_coalgebra_morphism(f, C, tgt.as_coalgebra());
  if (!is_chain_map(f, C.cx, tgt.cx))
    fail(Err::NotCoalgebraMorphism, "quillen_inverse: not a chain map");
  return out;
}

void validate_coalgebra_morphism(const ChainMap& f, const Coalgebra& src,
                                 const Coalgebra& tgt) {
  if (f.degree != 0) fail(Err::NotCoalgebraMorphism, "degree != 0");
  auto img = [&](std::size_t id) {
    auto [p, pos] = src.loc(id);
    QMat b = f.block(p);
    std::vector<std::pair<std::size_t, Rat>> out;
    for (std::size_t r = 0; r < b.rows(); ++r)
      if (b.at(r, pos) != 0) out.emplace_back(tgt.id_at(p, r), b.at(r, pos));
    return out;
  };
  for (std::size_t id = 0; id < src.size(); ++id) {
    std::map<std::pair<std::size_t, std::size_t>, Rat> lhs, rhs;
    for (const auto& [t, c] : img(id))
      for (const auto& [a, b, c2] : tgt.coprod[t]) lhs[{a, b}] += c * c2;
    for (const auto& [a, b, c] : src.coprod[id])
      for (const auto& [ta, ca] : img(a))
        for (const auto& [tb, cb] : img(b)) rhs[{ta, tb}] += c * ca * cb;
    for (auto& [k, v] : lhs)
      if (rhs[k] != v)
        fail(Err::NotCoalgebraMorphism,
             "coproduct square fails at id " + std::to_string(id));
    for (auto& [k, v] : rhs)
      if (lhs[k] != v)
        fail(Err::NotCoalgebraMorphism,
             "coproduct square fails at id " + std::to_string(id));
    if (src.unit && tgt.unit) {
      Rat e = 0;
      for (const auto& [t, c] : img(id)) e += tgt.counit[t] * c;
      if (e != src.counit[id])
        fail(Err::NotCoalgebraMorphism,
             "counit fails at id " + std::to_string(id));
    }
  }
  if (src.unit && tgt.unit) {
    auto i = img(*src.unit);
    std::map<std::size_t, Rat> m;
    for (auto& [t, c] : i) m[t] += c;
    if (m.size() != 1 || m.begin()->first != *tgt.unit ||
        m.begin()->second != 1)
      fail(Err::NotCoalgebraMorphism, "unit not preserved");
  }
}

} // namespace ranjac
