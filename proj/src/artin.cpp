#include "ranjac/artin.hpp"

#include <algorithm>
#include <map>

#include "ranjac/error.hpp"

namespace ranjac {

std::vector<Rat> ArtinLocalAlgebra::one() const {
  std::vector<Rat> e(dim);
  e[0] = 1;
  return e;
}

std::vector<Rat> ArtinLocalAlgebra::mul(const std::vector<Rat>& a,
                                        const std::vector<Rat>& b) const {
  if (a.size() != dim || b.size() != dim) fail(Err::ShapeMismatch, "artin mul");
  std::vector<Rat> r(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < dim; ++j) {
      if (b[j] == 0) continue;
      for (std::size_t k = 0; k < dim; ++k) {
        const Rat& c = mult.at(k, i * dim + j);
        if (c != 0) r[k] += a[i] * b[j] * c;
      }
    }
  }
  return r;
}

QMat ArtinLocalAlgebra::left_mult(const std::vector<Rat>& a) const {
  QMat m(dim, dim);
  for (std::size_t j = 0; j < dim; ++j) {
    std::vector<Rat> e(dim);
    e[j] = 1;
    auto r = mul(a, e);
    for (std::size_t k = 0; k < dim; ++k) m.at(k, j) = r[k];
  }
  return m;
}

bool ArtinLocalAlgebra::in_max_ideal(const std::vector<Rat>& a) const {
  return a.size() == dim && a[0] == 0;
}

void ArtinLocalAlgebra::validate() {
  if (dim == 0 || labels.size() != dim)
    fail(Err::BadInput, "artin: bad basis");
  if (mult.rows() != dim || mult.cols() != dim * dim)
    fail(Err::ShapeMismatch, "artin: bad table");
  auto basis = [&](std::size_t i) {
    std::vector<Rat> e(dim);
    e[i] = 1;
    return e;
  };
  // unit
  for (std::size_t i = 0; i < dim; ++i) {
    if (mul(one(), basis(i)) != basis(i) || mul(basis(i), one()) != basis(i))
      fail(Err::AxiomFail, "artin: e0 is not a unit");
  }
  // commutativity and associativity
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) {
      if (mul(basis(i), basis(j)) != mul(basis(j), basis(i)))
        fail(Err::AxiomFail, "artin: not commutative at (" +
                                 std::to_string(i) + "," + std::to_string(j) +
                                 ")");
      for (std::size_t k = 0; k < dim; ++k)
        if (mul(mul(basis(i), basis(j)), basis(k)) !=
            mul(basis(i), mul(basis(j), basis(k))))
          fail(Err::AxiomFail, "artin: not associative at (" +
                                   std::to_string(i) + "," +
                                   std::to_string(j) + "," +
                                   std::to_string(k) + ")");
    }
  // adapted basis: m = span(e1..e_{d-1}) is an ideal
  for (std::size_t i = 1; i < dim; ++i)
    for (std::size_t j = 1; j < dim; ++j)
      if (mul(basis(i), basis(j))[0] != 0)
        fail(Err::AxiomFail, "artin: basis not adapted to the maximal ideal");
  // nilpotence of m and the exponent
  QMat mk(dim, dim - 1);
  for (std::size_t i = 1; i < dim; ++i) mk.at(i, i - 1) = 1;
  int expo = 0;
  QMat cur = mk;
  for (int k = 1; k <= static_cast<int>(dim) + 1; ++k) {
    if (cur.cols() == 0 || cur.is_zero()) break;
    expo = k;
    // m^{k+1} = span of products of cur columns with m generators
    QMat next(dim, 0);
    for (std::size_t c = 0; c < cur.cols(); ++c) {
      std::vector<Rat> v(dim);
      for (std::size_t r = 0; r < dim; ++r) v[r] = cur.at(r, c);
      for (std::size_t i = 1; i < dim; ++i) {
        std::vector<Rat> e(dim);
        e[i] = 1;
        auto p = mul(v, e);
        QMat col(dim, 1);
        bool nz = false;
        for (std::size_t r = 0; r < dim; ++r) {
          col.at(r, 0) = p[r];
          nz = nz || p[r] != 0;
        }
        if (nz) next = span_extend(next, col);
      }
    }
    cur = std::move(next);
  }
  if (cur.cols() != 0 && !cur.is_zero())
    fail(Err::AxiomFail, "artin: maximal ideal is not nilpotent");
  exponent = expo;
}

ArtinLocalAlgebra artin_from_table(std::vector<std::string> labels,
                                   QMat mult) {
  ArtinLocalAlgebra A;
  A.dim = labels.size();
  A.labels = std::move(labels);
  A.mult = std::move(mult);
  A.validate();
  return A;
}

ArtinLocalAlgebra truncated_polynomial(int vars, int n) {
  if (vars < 0 || n < 0) fail(Err::BadInput, "truncated_polynomial");
  // monomials of degree <= n, graded lex
  std::vector<std::vector<int>> mono;
  std::vector<int> cur(vars, 0);
  auto rec = [&](auto&& self, int pos, int left) -> void {
    if (pos == vars) {
      mono.push_back(cur);
      return;
    }
    for (int e = left; e >= 0; --e) {
      cur[pos] = e;
      self(self, pos + 1, left - e);
      cur[pos] = 0;
    }
  };
  std::vector<std::vector<int>> all;
  for (int total = 0; total <= n; ++total) {
    mono.clear();
    rec(rec, 0, total);
    // keep only exact-degree monomials
    for (auto& m : mono) {
      int s = 0;
      for (int e : m) s += e;
      if (s == total) all.push_back(m);
    }
  }
  std::map<std::vector<int>, std::size_t> idx;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < all.size(); ++i) {
    idx[all[i]] = i;
    std::string l;
    for (int v = 0; v < vars; ++v) {
      for (int e = 0; e < all[i][v]; ++e) {
        if (!l.empty()) l += "*";
        l += "x" + std::to_string(v + 1);
      }
    }
    labels.push_back(l.empty() ? "1" : l);
  }
  QMat mult(all.size(), all.size() * all.size());
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = 0; j < all.size(); ++j) {
      std::vector<int> s(vars);
      int total = 0;
      for (int v = 0; v < vars; ++v) {
        s[v] = all[i][v] + all[j][v];
        total += s[v];
      }
      if (total <= n) mult.at(idx.at(s), i * all.size() + j) = 1;
    }
  return artin_from_table(std::move(labels), std::move(mult));
}

ArtinLocalAlgebra dual_numbers(int k) { return truncated_polynomial(1, k - 1); }

bool is_algebra_morphism(const ArtinLocalAlgebra& A,
                         const ArtinLocalAlgebra& B, const QMat& f) {
  if (f.rows() != B.dim || f.cols() != A.dim) return false;
  std::vector<Rat> one_img = f.apply(A.one());
  if (one_img != B.one()) return false;
  for (std::size_t i = 0; i < A.dim; ++i)
    for (std::size_t j = 0; j < A.dim; ++j) {
      std::vector<Rat> ei(A.dim), ej(A.dim);
      ei[i] = 1;
      ej[j] = 1;
      auto lhs = f.apply(A.mul(ei, ej));
      auto rhs = B.mul(f.apply(ei), f.apply(ej));
      if (lhs != rhs) return false;
    }
  return true;
}

std::optional<QMat> artin_iso(const ArtinLocalAlgebra& A,
                              const ArtinLocalAlgebra& B) {
  if (A.dim != B.dim) return std::nullopt;
  // m^2 spans
  auto msq = [](const ArtinLocalAlgebra& R) {
    QMat span(R.dim, 0);
    for (std::size_t i = 1; i < R.dim; ++i)
      for (std::size_t j = 1; j < R.dim; ++j) {
        std::vector<Rat> ei(R.dim), ej(R.dim);
        ei[i] = 1;
        ej[j] = 1;
        auto p = R.mul(ei, ej);
        QMat col(R.dim, 1);
        for (std::size_t r = 0; r < R.dim; ++r) col.at(r, 0) = p[r];
        if (!col.is_zero()) span = span_extend(span, col);
      }
    return span;
  };
  // canonical generators: earliest basis vectors spanning m / m^2
  auto gens = [&](const ArtinLocalAlgebra& R, const QMat& sq) {
    std::vector<std::size_t> g;
    QMat span = sq;
    for (std::size_t i = 1; i < R.dim; ++i) {
      QMat col(R.dim, 1);
      col.at(i, 0) = 1;
      if (!in_span(span, col)) {
        span = span_extend(span, col);
        g.push_back(i);
      }
    }
    return g;
  };
  QMat sqA = msq(A), sqB = msq(B);
  auto gA = gens(A, sqA), gB = gens(B, sqB);
  if (gA.size() != gB.size()) return std::nullopt;
  // multiplicative closure of the generators with images tracked in B
  std::vector<std::vector<Rat>> avecs, bvecs;
  avecs.push_back(A.one());
  bvecs.push_back(B.one());
  for (std::size_t k = 0; k < gA.size(); ++k) {
    std::vector<Rat> a(A.dim), b(B.dim);
    a[gA[k]] = 1;
    b[gB[k]] = 1;
    avecs.push_back(a);
    bvecs.push_back(b);
  }
  QMat span(A.dim, 0);
  for (const auto& v : avecs) {
    QMat col(A.dim, 1);
    for (std::size_t r = 0; r < A.dim; ++r) col.at(r, 0) = v[r];
    span = span_extend(span, col);
  }
  std::size_t head = 1;
  while (span.cols() < A.dim && head < avecs.size()) {
    std::size_t upto = avecs.size();
    for (std::size_t i = head; i < upto; ++i)
      for (std::size_t k = 1; k <= gA.size(); ++k) {
        auto pa = A.mul(avecs[i], avecs[k]);
        QMat col(A.dim, 1);
        bool nz = false;
        for (std::size_t r = 0; r < A.dim; ++r) {
          col.at(r, 0) = pa[r];
          nz = nz || pa[r] != 0;
        }
        if (!nz || in_span(span, col)) continue;
        span = span_extend(span, col);
        avecs.push_back(pa);
        bvecs.push_back(B.mul(bvecs[i], bvecs[k]));
      }
    if (upto == avecs.size()) break;
    head = upto;
  }
  if (span.cols() < A.dim) return std::nullopt;
  QMat Am(A.dim, avecs.size()), Bm(B.dim, bvecs.size());
  for (std::size_t c = 0; c < avecs.size(); ++c)
    for (std::size_t r = 0; r < A.dim; ++r) {
      Am.at(r, c) = avecs[c][r];
      Bm.at(r, c) = bvecs[c][r];
    }
  // f Am = Bm  =>  f = solve over the transposed system
  auto ft = Am.transpose().solve(Bm.transpose());
  if (!ft) return std::nullopt;
  QMat f = ft->transpose();
  if (f.rank() != A.dim) return std::nullopt;
  if (!is_algebra_morphism(A, B, f)) return std::nullopt;
  return f;
}

} // namespace ranjac
