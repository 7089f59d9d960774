#include "ranjac/graded.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "ranjac/config.hpp"
#include "ranjac/error.hpp"

namespace ranjac {

std::size_t GradedSpace::total_dim() const {
  std::size_t t = 0;
  for (const auto& [p, ls] : comps) t += ls.size();
  return t;
}

std::vector<int> GradedSpace::degrees() const {
  std::vector<int> ds;
  for (const auto& [p, ls] : comps)
    if (!ls.empty()) ds.push_back(p);
  return ds;
}

bool GradedSpace::same_dims(const GradedSpace& o) const {
  std::set<int> ds;
  for (const auto& [p, ls] : comps) ds.insert(p);
  for (const auto& [p, ls] : o.comps) ds.insert(p);
  for (int p : ds)
    if (dim(p) != o.dim(p)) return false;
  return true;
}

void GradedSpace::validate() const {
  for (const auto& [p, ls] : comps) {
    if (ls.empty()) continue;
    if (p < -kDegreeWindow || p > kDegreeWindow)
      fail(Err::WindowExceeded, "degree " + std::to_string(p));
    std::set<std::string> seen;
    for (const auto& l : ls)
      if (!seen.insert(l).second)
        fail(Err::BadInput, "duplicate label '" + l + "' in degree " +
                                std::to_string(p));
  }
}

GradedSpace shift_space(const GradedSpace& s, int n) {
  GradedSpace r;
  for (const auto& [p, ls] : s.comps)
    if (!ls.empty()) r.comps[p - n] = ls;
  return r;
}

GradedVec GradedVec::basis(const GradedSpace& s, int deg, std::size_t i) {
  GradedVec v;
  v.c[deg] = std::vector<Rat>(s.dim(deg));
  v.c[deg][i] = 1;
  return v;
}

bool GradedVec::is_zero() const {
  for (const auto& [p, xs] : c)
    for (const auto& x : xs)
      if (x != 0) return false;
  return true;
}

GradedVec GradedVec::operator+(const GradedVec& o) const {
  GradedVec r = *this;
  for (const auto& [p, xs] : o.c) {
    auto& dst = r.c[p];
    if (dst.size() < xs.size()) dst.resize(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) dst[i] += xs[i];
  }
  return r;
}

GradedVec GradedVec::operator*(const Rat& k) const {
  GradedVec r = *this;
  for (auto& [p, xs] : r.c)
    for (auto& x : xs) x *= k;
  return r;
}

void GradedVec::prune() {
  for (auto it = c.begin(); it != c.end();) {
    bool z = true;
    for (const auto& x : it->second)
      if (x != 0) {
        z = false;
        break;
      }
    it = z ? c.erase(it) : std::next(it);
  }
}

bool GradedVec::operator==(const GradedVec& o) const {
  GradedVec a = *this, b = o;
  a.prune();
  b.prune();
  return a.c == b.c;
}

int GradedVec::degree() const {
  GradedVec v = *this;
  v.prune();
  if (v.c.size() != 1) fail(Err::WrongDegree, "element is not homogeneous");
  return v.c.begin()->first;
}

ChainMap ChainMap::zero(const GradedSpace& src, const GradedSpace& tgt,
                        int degree) {
  ChainMap f;
  f.src = src;
  f.tgt = tgt;
  f.degree = degree;
  return f;
}

ChainMap ChainMap::identity(const GradedSpace& s) {
  ChainMap f = zero(s, s, 0);
  for (const auto& [p, ls] : s.comps)
    if (!ls.empty()) f.blocks[p] = QMat::identity(ls.size());
  return f;
}

QMat ChainMap::block(int p) const {
  auto it = blocks.find(p);
  if (it != blocks.end()) return it->second;
  return QMat(tgt.dim(p + degree), src.dim(p));
}

void ChainMap::set_block(int p, QMat m) {
  if (m.rows() != tgt.dim(p + degree) || m.cols() != src.dim(p))
    fail(Err::ShapeMismatch,
         "block at degree " + std::to_string(p) + " has shape " +
             std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  if (!m.is_zero()) blocks[p] = std::move(m);
}

void ChainMap::validate_shapes() const {
  for (const auto& [p, m] : blocks)
    if (m.rows() != tgt.dim(p + degree) || m.cols() != src.dim(p))
      fail(Err::ShapeMismatch, "block at degree " + std::to_string(p));
}

ChainMap ChainMap::compose(const ChainMap& inner) const {
  if (!inner.tgt.same_dims(src))
    fail(Err::ShapeMismatch, "compose: middle spaces differ");
  ChainMap r = zero(inner.src, tgt, degree + inner.degree);
  for (int p : inner.src.degrees()) {
    if (inner.src.dim(p) == 0) continue;
    QMat m = block(p + inner.degree) * inner.block(p);
    if (!m.is_zero()) r.blocks[p] = std::move(m);
  }
  return r;
}

ChainMap ChainMap::operator+(const ChainMap& o) const {
  if (degree != o.degree || !src.same_dims(o.src) || !tgt.same_dims(o.tgt))
    fail(Err::ShapeMismatch, "chain map add");
  ChainMap r = zero(src, tgt, degree);
  std::set<int> ps;
  for (const auto& [p, m] : blocks) ps.insert(p);
  for (const auto& [p, m] : o.blocks) ps.insert(p);
  for (int p : ps) {
    QMat m = block(p) + o.block(p);
    if (!m.is_zero()) r.blocks[p] = std::move(m);
  }
  return r;
}

ChainMap ChainMap::operator-(const ChainMap& o) const {
  return *this + (o * Rat(-1));
}

ChainMap ChainMap::operator*(const Rat& k) const {
  ChainMap r = *this;
  if (k == 0) {
    r.blocks.clear();
    return r;
  }
  for (auto& [p, m] : r.blocks) m = m * k;
  return r;
}

bool ChainMap::is_zero() const {
  for (const auto& [p, m] : blocks)
    if (!m.is_zero()) return false;
  return true;
}

bool ChainMap::equal_blocks(const ChainMap& o) const {
  if (degree != o.degree) return false;
  std::set<int> ps;
  for (const auto& [p, m] : blocks) ps.insert(p);
  for (const auto& [p, m] : o.blocks) ps.insert(p);
  for (int p : ps)
    if (block(p) != o.block(p)) return false;
  return true;
}

GradedVec ChainMap::apply(const GradedVec& v) const {
  GradedVec r;
  for (const auto& [p, xs] : v.c) {
    if (xs.empty()) continue;
    if (xs.size() != src.dim(p)) fail(Err::ShapeMismatch, "apply");
    if (tgt.dim(p + degree) == 0) continue;
    auto y = block(p).apply(xs);
    auto& dst = r.c[p + degree];
    if (dst.size() < y.size()) dst.resize(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) dst[i] += y[i];
  }
  r.prune();
  return r;
}

Complex make_complex(const GradedSpace& space, const ChainMap& d) {
  space.validate();
  if (d.degree != 1) fail(Err::ShapeMismatch, "differential degree != +1");
  if (!d.src.same_dims(space) || !d.tgt.same_dims(space))
    fail(Err::ShapeMismatch, "differential not an endomorphism");
  d.validate_shapes();
  for (int p : space.degrees()) {
    QMat sq = d.block(p + 1) * d.block(p);
    if (!sq.is_zero())
      fail(Err::SquareNonzero, "d^2 != 0 starting at degree " +
                                   std::to_string(p));
  }
  Complex C;
  C.space = space;
  C.d = d;
  C.d.src = space;
  C.d.tgt = space;
  return C;
}

bool is_chain_map(const ChainMap& f, const Complex& src, const Complex& tgt) {
  // f d = (-1)^{|f|} d f ; for |f| = 0 the usual commuting square.
  int s = shift_sign(f.degree);
  for (int p : src.space.degrees()) {
    QMat lhs = f.block(p + 1) * src.d.block(p);
    QMat rhs = (tgt.d.block(p + f.degree) * f.block(p)) * Rat(s);
    if (lhs != rhs) return false;
  }
  return true;
}

std::map<int, CohomDeg> cohomology(const Complex& C) {
  std::map<int, CohomDeg> H;
  for (int p : C.space.degrees()) {
    QMat K = C.d.block(p).kernel();
    QMat B = C.d.block(p - 1);
    std::size_t rb = B.cols() ? B.rank() : 0;
    CohomDeg h;
    h.dim = K.cols() - rb;
    // pick kernel columns extending the image
    std::vector<std::size_t> chosen;
    QMat Bb(C.space.dim(p), 0);
    if (B.cols()) Bb = B;
    span_extend(Bb, K, &chosen);
    h.reps = K.cols_subset(chosen);
    if (h.reps.cols() != h.dim)
      fail(Err::ShapeMismatch, "cohomology representative count");
    if (h.dim) H[p] = std::move(h);
  }
  return H;
}

std::map<int, std::size_t> cohomology_dims(const Complex& C) {
  std::map<int, std::size_t> d;
  for (const auto& [p, h] : cohomology(C)) d[p] = h.dim;
  return d;
}

Complex shift(const Complex& C, int n) {
  GradedSpace s = shift_space(C.space, n);
  ChainMap d = ChainMap::zero(s, s, 1);
  int sg = shift_sign(n);
  for (const auto& [p, m] : C.d.blocks) d.blocks[p - n] = m * Rat(sg);
  Complex r;
  r.space = s;
  r.d = d;
  return r;
}

// --- tensor ----------------------------------------------------------------

std::size_t Tensor2::dim(int n) const {
  auto it = terms.find(n);
  return it == terms.end() ? 0 : it->second.size();
}

std::size_t Tensor2::pos(int n, int p, int i, int q, int j) const {
  auto it = terms.find(n);
  if (it == terms.end()) return static_cast<std::size_t>(-1);
  const auto& v = it->second;
  std::array<int, 4> key{p, i, q, j};
  auto f = std::lower_bound(v.begin(), v.end(), key);
  if (f == v.end() || *f != key) return static_cast<std::size_t>(-1);
  return static_cast<std::size_t>(f - v.begin());
}

GradedSpace Tensor2::space() const {
  GradedSpace s;
  for (const auto& [n, v] : terms) {
    std::vector<std::string> ls;
    ls.reserve(v.size());
    for (const auto& t : v)
      ls.push_back(A.comps.at(t[0])[t[1]] + "|" + B.comps.at(t[2])[t[3]]);
    if (!ls.empty()) s.comps[n] = std::move(ls);
  }
  return s;
}

static Tensor2 tensor_basis(const GradedSpace& A, const GradedSpace& B) {
  Tensor2 t;
  t.A = A;
  t.B = B;
  for (int p : A.degrees())
    for (int q : B.degrees()) {
      auto& v = t.terms[p + q];
      for (int i = 0; i < static_cast<int>(A.dim(p)); ++i)
        for (int j = 0; j < static_cast<int>(B.dim(q)); ++j)
          v.push_back({p, i, q, j});
    }
  for (auto& [n, v] : t.terms) std::sort(v.begin(), v.end());
  return t;
}

TensorComplex tensor(const Complex& C, const Complex& D) {
  Tensor2 b = tensor_basis(C.space, D.space);
  GradedSpace s = b.space();
  s.validate();
  ChainMap d = ChainMap::zero(s, s, 1);
  for (const auto& [n, v] : b.terms) {
    if (v.empty() || b.dim(n + 1) == 0) continue;
    QMat m(b.dim(n + 1), v.size());
    for (std::size_t col = 0; col < v.size(); ++col) {
      auto [p, i, q, j] = v[col];
      // dx ⊗ y
      QMat dc = C.d.block(p);
      for (std::size_t r = 0; r < dc.rows(); ++r) {
        if (dc.at(r, i) == 0) continue;
        std::size_t pos = b.pos(n + 1, p + 1, static_cast<int>(r), q, j);
        if (pos != static_cast<std::size_t>(-1))
          m.at(pos, col) += dc.at(r, i);
      }
      // (-1)^p x ⊗ dy
      QMat dd = D.d.block(q);
      for (std::size_t r = 0; r < dd.rows(); ++r) {
        if (dd.at(r, j) == 0) continue;
        std::size_t pos = b.pos(n + 1, p, i, q + 1, static_cast<int>(r));
        if (pos != static_cast<std::size_t>(-1))
          m.at(pos, col) += Rat(shift_sign(p)) * dd.at(r, j);
      }
    }
    if (!m.is_zero()) d.blocks[n] = std::move(m);
  }
  TensorComplex tc;
  tc.cx = make_complex(s, d);
  tc.basis = std::move(b);
  return tc;
}

ChainMap tensor_swap(const Complex& C, const Complex& D) {
  Tensor2 src = tensor_basis(C.space, D.space);
  Tensor2 tgt = tensor_basis(D.space, C.space);
  ChainMap f = ChainMap::zero(src.space(), tgt.space(), 0);
  for (const auto& [n, v] : src.terms) {
    if (v.empty() || tgt.dim(n) == 0) continue;
    QMat m(tgt.dim(n), v.size());
    for (std::size_t col = 0; col < v.size(); ++col) {
      auto [p, i, q, j] = v[col];
      std::size_t pos = tgt.pos(n, q, j, p, i);
      m.at(pos, col) = koszul_sign(p, q);
    }
    f.blocks[n] = std::move(m);
  }
  return f;
}

ChainMap tensor_map(const ChainMap& f, const ChainMap& g, const Tensor2& srcb,
                    const Tensor2& tgtb) {
  ChainMap r =
      ChainMap::zero(srcb.space(), tgtb.space(), f.degree + g.degree);
  for (const auto& [n, v] : srcb.terms) {
    if (v.empty()) continue;
    int m_deg = n + f.degree + g.degree;
    if (tgtb.dim(m_deg) == 0) continue;
    QMat m(tgtb.dim(m_deg), v.size());
    bool nz = false;
    for (std::size_t col = 0; col < v.size(); ++col) {
      auto [p, i, q, j] = v[col];
      QMat fb = f.block(p);
      QMat gb = g.block(q);
      int sign = koszul_sign(g.degree, p);
      for (std::size_t r1 = 0; r1 < fb.rows(); ++r1) {
        if (fb.at(r1, i) == 0) continue;
        for (std::size_t r2 = 0; r2 < gb.rows(); ++r2) {
          if (gb.at(r2, j) == 0) continue;
          std::size_t pos =
              tgtb.pos(m_deg, p + f.degree, static_cast<int>(r1),
                       q + g.degree, static_cast<int>(r2));
          if (pos == static_cast<std::size_t>(-1)) continue;
          m.at(pos, col) += Rat(sign) * fb.at(r1, i) * gb.at(r2, j);
          nz = true;
        }
      }
    }
    if (nz) r.blocks[n] = std::move(m);
  }
  return r;
}

// --- words ------------------------------------------------------------------

std::optional<std::pair<int, Word>> word_normalize(Word w, WordKind kind) {
  int sign = 1;
  // insertion sort with explicit adjacent transpositions
  for (std::size_t i = 1; i < w.size(); ++i) {
    std::size_t j = i;
    while (j > 0 && w[j] < w[j - 1]) {
      int pa = w[j - 1].deg & 1, pb = w[j].deg & 1;
      int s = (pa && pb) ? -1 : 1;
      if (kind == WordKind::Wedge) s = -s;
      sign *= s;
      std::swap(w[j], w[j - 1]);
      --j;
    }
  }
  for (std::size_t i = 1; i < w.size(); ++i) {
    if (w[i] == w[i - 1]) {
      bool odd = w[i].deg & 1;
      if ((kind == WordKind::Sym && odd) || (kind == WordKind::Wedge && !odd))
        return std::nullopt;
    }
  }
  return std::make_pair(sign, std::move(w));
}

int PowerComplex::word_degree(const Word& w) const {
  int d = 0;
  for (const auto& g : w) d += g.deg;
  return d;
}

namespace {

std::string label_of_word(const GradedSpace& base, const Word& w,
                          WordKind kind) {
  if (w.empty()) return "1";
  const char* sep = kind == WordKind::Sym ? "." : "^";
  std::ostringstream os;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) os << sep;
    os << base.comps.at(w[i].deg)[w[i].idx];
  }
  return os.str();
}

void enumerate_words(const GradedSpace& base, int n, WordKind kind,
                     std::vector<Word>& out) {
  std::vector<Gen> gens;
  for (int p : base.degrees())
    for (int i = 0; i < static_cast<int>(base.dim(p)); ++i)
      gens.push_back({p, i});
  std::sort(gens.begin(), gens.end());
  Word cur;
  // non-decreasing words; repeats forbidden by parity rule
  auto rec = [&](auto&& self, std::size_t from) -> void {
    if (static_cast<int>(cur.size()) == n) {
      out.push_back(cur);
      return;
    }
    for (std::size_t k = from; k < gens.size(); ++k) {
      bool repeat = !cur.empty() && cur.back() == gens[k];
      if (repeat) {
        bool odd = gens[k].deg & 1;
        if ((kind == WordKind::Sym && odd) ||
            (kind == WordKind::Wedge && !odd))
          continue;
      }
      cur.push_back(gens[k]);
      self(self, k);
      cur.pop_back();
    }
  };
  rec(rec, 0);
}

PowerComplex build_power(const Complex& C, int n, WordKind kind) {
  if (n < 0) fail(Err::BadInput, "power exponent must be >= 0");
  PowerComplex P;
  P.kind = kind;
  enumerate_words(C.space, n, kind, P.words);
  for (std::size_t id = 0; id < P.words.size(); ++id) {
    P.id_of[P.words[id]] = id;
    int d = 0;
    for (const auto& g : P.words[id]) d += g.deg;
    P.by_deg[d].push_back(id);
  }
  GradedSpace s;
  for (auto& [d, ids] : P.by_deg) {
    std::vector<std::string> ls;
    for (std::size_t k = 0; k < ids.size(); ++k) {
      P.loc[ids[k]] = {d, k};
      ls.push_back(label_of_word(C.space, P.words[ids[k]], kind));
    }
    s.comps[d] = std::move(ls);
  }
  s.validate();
  // Leibniz differential with prefix Koszul signs, then renormalize.
  ChainMap d = ChainMap::zero(s, s, 1);
  std::map<int, QMat> blocks;
  for (const auto& [deg, ids] : P.by_deg) {
    std::size_t tdim = s.dim(deg + 1);
    if (tdim == 0) continue;
    QMat m(tdim, ids.size());
    bool nz = false;
    for (std::size_t col = 0; col < ids.size(); ++col) {
      const Word& w = P.words[ids[col]];
      int prefix = 1;
      for (std::size_t pos = 0; pos < w.size(); ++pos) {
        QMat db = C.d.block(w[pos].deg);
        for (std::size_t r = 0; r < db.rows(); ++r) {
          if (db.at(r, w[pos].idx) == 0) continue;
          Word w2 = w;
          w2[pos] = {w[pos].deg + 1, static_cast<int>(r)};
          auto nrm = word_normalize(w2, kind);
          if (!nrm) continue;
          auto it = P.id_of.find(nrm->second);
          if (it == P.id_of.end()) continue;
          auto [td, tpos] = P.loc[it->second];
          m.at(tpos, col) +=
              Rat(prefix * nrm->first) * db.at(r, w[pos].idx);
          nz = true;
        }
        if (w[pos].deg & 1) prefix = -prefix;
      }
    }
    if (nz) blocks[deg] = std::move(m);
  }
  for (auto& [p, m] : blocks) d.blocks[p] = std::move(m);
  P.cx = make_complex(s, d);
  return P;
}

} // namespace

PowerComplex sym_power(const Complex& C, int n) {
  return build_power(C, n, WordKind::Sym);
}

PowerComplex ext_power(const Complex& C, int n) {
  return build_power(C, n, WordKind::Wedge);
}

Decalage decalage(const Complex& C, int n) {
  Decalage D;
  D.sym = sym_power(shift(C, 1), n);
  D.wedge = ext_power(C, n);
  D.wedge_shifted = shift(D.wedge.cx, n);
  ChainMap iso =
      ChainMap::zero(D.sym.cx.space, D.wedge_shifted.space, 0);
  for (const auto& [deg, ids] : D.sym.by_deg) {
    if (ids.empty()) continue;
    QMat m(D.wedge_shifted.space.dim(deg), ids.size());
    for (std::size_t col = 0; col < ids.size(); ++col) {
      const Word& sw = D.sym.words[ids[col]]; // gens of C[1]
      Word ww = sw;
      long expo = 0;
      for (std::size_t i = 0; i < ww.size(); ++i) {
        ww[i].deg += 1; // unshifted degree p_i
        expo += static_cast<long>(ww.size() - 1 - i) * ww[i].deg;
      }
      auto it = D.wedge.id_of.find(ww);
      if (it == D.wedge.id_of.end())
        fail(Err::ShapeMismatch, "decalage word mismatch");
      auto [td, tpos] = D.wedge.loc[it->second];
      (void)td;
      m.at(tpos, col) = (expo % 2 == 0) ? 1 : -1;
    }
    iso.blocks[deg] = std::move(m);
  }
  D.iso = std::move(iso);
  return D;
}

Complex cone(const ChainMap& f, const Complex& src, const Complex& tgt) {
  if (f.degree != 0) fail(Err::NotChainMap, "cone expects a degree-0 map");
  if (!is_chain_map(f, src, tgt)) fail(Err::NotChainMap, "cone");
  GradedSpace s;
  std::set<int> ds;
  for (int p : src.space.degrees()) ds.insert(p - 1);
  for (int p : tgt.space.degrees()) ds.insert(p);
  for (int nn : ds) {
    std::vector<std::string> ls;
    for (const auto& l : src.space.comps.count(nn + 1)
                             ? src.space.comps.at(nn + 1)
                             : std::vector<std::string>{})
      ls.push_back("s:" + l);
    for (const auto& l : tgt.space.comps.count(nn)
                             ? tgt.space.comps.at(nn)
                             : std::vector<std::string>{})
      ls.push_back("t:" + l);
    if (!ls.empty()) s.comps[nn] = std::move(ls);
  }
  ChainMap d = ChainMap::zero(s, s, 1);
  for (int nn : s.degrees()) {
    std::size_t rs = src.space.dim(nn + 2), rt = tgt.space.dim(nn + 1);
    std::size_t cs = src.space.dim(nn + 1), ct = tgt.space.dim(nn);
    if (rs + rt == 0) continue;
    QMat m(rs + rt, cs + ct);
    QMat a = src.d.block(nn + 1), fb = f.block(nn + 1), b = tgt.d.block(nn);
    for (std::size_t i = 0; i < rs; ++i)
      for (std::size_t j = 0; j < cs; ++j) m.at(i, j) = -a.at(i, j);
    for (std::size_t i = 0; i < rt; ++i) {
      for (std::size_t j = 0; j < cs; ++j) m.at(rs + i, j) = fb.at(i, j);
      for (std::size_t j = 0; j < ct; ++j) m.at(rs + i, cs + j) = b.at(i, j);
    }
    if (!m.is_zero()) d.blocks[nn] = std::move(m);
  }
  return make_complex(s, d);
}

std::map<int, QMat> FilteredComplex::step(std::size_t i) const {
  return steps.at(i);
}

void FilteredComplex::validate() const {
  for (std::size_t i = 0; i < steps.size(); ++i) {
    for (const auto& [p, m] : steps[i]) {
      if (m.rows() != cx.space.dim(p))
        fail(Err::ShapeMismatch, "filtration step " + std::to_string(i));
      // d-stable
      QMat dm = cx.d.block(p) * m;
      QMat next = steps[i].count(p + 1) ? steps[i].at(p + 1)
                                        : QMat(cx.space.dim(p + 1), 0);
      if (!in_span(next, dm))
        fail(Err::FiltrationNotRespected,
             "step " + std::to_string(i) + " not d-stable at degree " +
                 std::to_string(p));
      // nested
      if (i + 1 < steps.size()) {
        QMat up = steps[i + 1].count(p) ? steps[i + 1].at(p)
                                        : QMat(cx.space.dim(p), 0);
        if (!in_span(up, m))
          fail(Err::FiltrationNotRespected,
               "step " + std::to_string(i) + " not nested at degree " +
                   std::to_string(p));
      }
    }
  }
  if (!steps.empty()) {
    const auto& top = steps.back();
    for (int p : cx.space.degrees()) {
      QMat t = top.count(p) ? top.at(p) : QMat(cx.space.dim(p), 0);
      if (t.rank() != cx.space.dim(p))
        fail(Err::FiltrationNotRespected,
             "filtration not exhaustive at degree " + std::to_string(p));
    }
  }
}

Subquot subquotient(const Complex& ambient, const std::map<int, QMat>& A,
                    const std::map<int, QMat>& B) {
  Subquot sq;
  GradedSpace s;
  std::map<int, QMat> chosen;
  for (int p : ambient.space.degrees()) {
    QMat a = A.count(p) ? A.at(p) : QMat(ambient.space.dim(p), 0);
    QMat b = B.count(p) ? B.at(p) : QMat(ambient.space.dim(p), 0);
    std::vector<std::size_t> pick;
    span_extend(a, b, &pick);
    QMat c = b.cols_subset(pick);
    if (c.cols()) {
      std::vector<std::string> ls;
      for (std::size_t i = 0; i < c.cols(); ++i)
        ls.push_back("q" + std::to_string(p) + "_" + std::to_string(i));
      s.comps[p] = std::move(ls);
    }
    chosen[p] = std::move(c);
    sq.sub[p] = std::move(a);
  }
  ChainMap d = ChainMap::zero(s, s, 1);
  for (int p : s.degrees()) {
    const QMat& c = chosen.at(p);
    if (c.cols() == 0) continue;
    QMat img = ambient.d.block(p) * c;
    QMat a1 = sq.sub.count(p + 1) ? sq.sub.at(p + 1)
                                  : QMat(ambient.space.dim(p + 1), 0);
    QMat c1 = chosen.count(p + 1) ? chosen.at(p + 1)
                                  : QMat(ambient.space.dim(p + 1), 0);
    QMat basis = a1.cols() ? a1.hstack(c1) : c1;
    auto sol = basis.cols() ? basis.solve(img)
                            : (img.is_zero() ? std::optional<QMat>(QMat(0, img.cols()))
                                             : std::nullopt);
    if (!sol)
      fail(Err::FiltrationNotRespected, "subquotient differential escapes");
    if (c1.cols()) {
      QMat m(c1.cols(), c.cols());
      for (std::size_t i = 0; i < c1.cols(); ++i)
        for (std::size_t j = 0; j < c.cols(); ++j)
          m.at(i, j) = sol->at(a1.cols() + i, j);
      if (!m.is_zero()) d.blocks[p] = std::move(m);
    }
  }
  sq.cx = make_complex(s, d);
  sq.chosen = std::move(chosen);
  return sq;
}

bool quasi_iso(const ChainMap& f, const Complex& src, const Complex& tgt) {
  if (!is_chain_map(f, src, tgt)) fail(Err::NotChainMap, "quasi_iso");
  auto Hs = cohomology(src);
  auto Ht = cohomology(tgt);
  std::set<int> ds;
  for (const auto& [p, h] : Hs) ds.insert(p);
  for (const auto& [p, h] : Ht) ds.insert(p);
  for (int p : ds) {
    std::size_t ns = Hs.count(p) ? Hs.at(p).dim : 0;
    std::size_t nt = Ht.count(p) ? Ht.at(p).dim : 0;
    if (ns != nt) return false;
    if (ns == 0) continue;
    QMat fr = f.block(p) * Hs.at(p).reps;
    QMat Bt = tgt.d.block(p - 1);
    QMat base = Bt.cols() ? Bt : QMat(tgt.space.dim(p), 0);
    std::size_t r0 = base.cols() ? base.rank() : 0;
    std::size_t r1 = base.cols() ? base.hstack(fr).rank() : fr.rank();
    if (r1 - r0 != ns) return false;
  }
  return true;
}

bool filtered_quasi_iso(const ChainMap& f, const FilteredComplex& src,
                        const FilteredComplex& tgt) {
  src.validate();
  tgt.validate();
  if (src.steps.size() != tgt.steps.size() || src.n0 != tgt.n0)
    fail(Err::FiltrationNotRespected, "filtration lengths differ");
  // f must respect filtrations
  for (std::size_t i = 0; i < src.steps.size(); ++i) {
    for (const auto& [p, m] : src.steps[i]) {
      QMat img = f.block(p) * m;
      QMat t = tgt.steps[i].count(p) ? tgt.steps[i].at(p)
                                     : QMat(tgt.cx.space.dim(p), 0);
      if (!in_span(t, img))
        fail(Err::FiltrationNotRespected,
             "map does not respect filtration step " + std::to_string(i));
    }
  }
  for (std::size_t i = 0; i < src.steps.size(); ++i) {
    std::map<int, QMat> a_s, a_t;
    if (i > 0) {
      a_s = src.steps[i - 1];
      a_t = tgt.steps[i - 1];
    }
    Subquot gs = subquotient(src.cx, a_s, src.steps[i]);
    Subquot gt = subquotient(tgt.cx, a_t, tgt.steps[i]);
    // induced map on the graded pieces
    ChainMap gf = ChainMap::zero(gs.cx.space, gt.cx.space, 0);
    for (int p : gs.cx.space.degrees()) {
      const QMat& c = gs.chosen.at(p);
      if (c.cols() == 0) continue;
      QMat img = f.block(p) * c;
      QMat a1 = a_t.count(p) ? a_t.at(p) : QMat(tgt.cx.space.dim(p), 0);
      QMat c1 = gt.chosen.count(p) ? gt.chosen.at(p)
                                   : QMat(tgt.cx.space.dim(p), 0);
      QMat basis = a1.cols() ? a1.hstack(c1) : c1;
      auto sol = basis.cols()
                     ? basis.solve(img)
                     : (img.is_zero()
                            ? std::optional<QMat>(QMat(0, img.cols()))
                            : std::nullopt);
      if (!sol)
        fail(Err::FiltrationNotRespected, "induced gr map escapes");
      if (c1.cols()) {
        QMat m(c1.cols(), c.cols());
        for (std::size_t r = 0; r < c1.cols(); ++r)
          for (std::size_t j = 0; j < c.cols(); ++j)
            m.at(r, j) = sol->at(a1.cols() + r, j);
        if (!m.is_zero()) gf.blocks[p] = std::move(m);
      }
    }
    if (!quasi_iso(gf, gs.cx, gt.cx)) return false;
  }
  return true;
}

} // namespace ranjac
