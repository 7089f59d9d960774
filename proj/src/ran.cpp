#include "ranjac/ran.hpp"

#include <algorithm>
#include <set>

#include "ranjac/error.hpp"

namespace ranjac {

std::vector<FinSurjection> surjections(int m, int n) {
  std::vector<FinSurjection> out;
  if (m < 1 || n < 1 || n > m) return out;
  std::vector<int> a(m, 0);
  while (true) {
    std::set<int> hit(a.begin(), a.end());
    if (static_cast<int>(hit.size()) == n) {
      bool ok = true;
      for (int v : a) ok = ok && v < n;
      if (ok) out.push_back({m, n, a});
    }
    int i = m - 1;
    while (i >= 0 && a[i] == n - 1) a[i--] = 0;
    if (i < 0) break;
    ++a[i];
  }
  return out;
}

FinSurjection compose(const FinSurjection& outer, const FinSurjection& inner) {
  // inner: [k] ->> [m], outer: [m] ->> [n]; composite [k] ->> [n]
  if (inner.n != outer.m) fail(Err::ShapeMismatch, "surjection compose");
  FinSurjection r{inner.m, outer.n, {}};
  r.map.resize(inner.m);
  for (int i = 0; i < inner.m; ++i) r.map[i] = outer.map[inner.map[i]];
  return r;
}

std::size_t FiniteSpace::points_at_level(int k) const {
  std::size_t t = 1;
  for (int i = 0; i < k; ++i) t *= size();
  return t;
}

std::vector<int> FiniteSpace::tuple_of(std::size_t idx, int k) const {
  std::vector<int> t(k);
  for (int i = k - 1; i >= 0; --i) {
    t[i] = static_cast<int>(idx % size());
    idx /= size();
  }
  return t;
}

std::size_t FiniteSpace::index_of(const std::vector<int>& tuple) const {
  std::size_t idx = 0;
  for (int v : tuple) idx = idx * size() + static_cast<std::size_t>(v);
  return idx;
}

std::vector<int> FiniteSpace::value_set(const std::vector<int>& tuple) const {
  std::set<int> s(tuple.begin(), tuple.end());
  return std::vector<int>(s.begin(), s.end());
}

std::size_t diagonal_image(const FinSurjection& s, const FiniteSpace& X,
                           std::size_t x_index) {
  std::vector<int> x = X.tuple_of(x_index, s.n);
  std::vector<int> y(s.m);
  for (int j = 0; j < s.m; ++j) y[j] = x[s.map[j]];
  return X.index_of(y);
}

std::vector<std::string> union_map(const std::vector<std::string>& S,
                                   const std::vector<std::string>& T) {
  std::set<std::string> u(S.begin(), S.end());
  u.insert(T.begin(), T.end());
  return std::vector<std::string>(u.begin(), u.end());
}

std::vector<std::string> project_r(const FiniteSpace& X,
                                   const std::vector<int>& tuple) {
  std::set<std::string> s;
  for (int v : tuple) s.insert(X.pts[v]);
  return std::vector<std::string>(s.begin(), s.end());
}

const Complex& RanComplex::fiber(int k, std::size_t x) const {
  return levels.at(k - 1).at(x);
}

ChainMap RanComplex::theta_at(const FinSurjection& s, std::size_t x) const {
  auto it = theta.find(s);
  if (it == theta.end()) fail(Err::BadInput, "missing structure map");
  return it->second.at(x);
}

void RanComplex::validate() const {
  // θ^{id} = id and every θ is a chain map
  for (int k = 1; k <= N; ++k) {
    FinSurjection id{k, k, {}};
    for (int i = 0; i < k; ++i) id.map.push_back(i);
    for (std::size_t x = 0; x < X.points_at_level(k); ++x) {
      ChainMap t = theta_at(id, x);
      if (!t.equal_blocks(ChainMap::identity(fiber(k, x).space)))
        fail(Err::AxiomFail, "theta(id) != id");
    }
  }
  for (const auto& [s, maps] : theta) {
    for (std::size_t x = 0; x < X.points_at_level(s.n); ++x) {
      std::size_t y = diagonal_image(s, X, x);
      if (!is_chain_map(maps.at(x), fiber(s.m, y), fiber(s.n, x)))
        fail(Err::NotChainMap, "theta");
    }
  }
  // functoriality over compositions within the cutoff
  for (int k = 1; k <= N; ++k)
    for (int m = k; m <= N; ++m)
      for (int bigk = m; bigk <= N; ++bigk)
        for (const auto& rho : surjections(bigk, m))
          for (const auto& pi : surjections(m, k)) {
            FinSurjection comp = compose(pi, rho);
            for (std::size_t x = 0; x < X.points_at_level(k); ++x) {
              std::size_t y = diagonal_image(pi, X, x);
              ChainMap lhs = theta_at(comp, x);
              ChainMap rhs = theta_at(pi, x).compose(theta_at(rho, y));
              if (!lhs.equal_blocks(rhs))
                fail(Err::AxiomFail, "theta functoriality");
            }
          }
}

namespace {

Complex zero_fiber() {
  GradedSpace s;
  Complex c;
  c.space = s;
  c.d = ChainMap::zero(s, s, 1);
  return c;
}

} // namespace

RanComplex delta_pushforward(const FiniteSpace& X,
                             const std::vector<Complex>& M, int N) {
  if (M.size() != X.size()) fail(Err::ShapeMismatch, "delta_pushforward");
  RanComplex F;
  F.X = X;
  F.N = N;
  for (int k = 1; k <= N; ++k) {
    std::vector<Complex> lv;
    for (std::size_t x = 0; x < X.points_at_level(k); ++x) {
      std::vector<int> t = X.tuple_of(x, k);
      bool diag = true;
      for (int v : t) diag = diag && v == t[0];
      lv.push_back(diag ? M[t[0]] : zero_fiber());
    }
    F.levels.push_back(std::move(lv));
  }
  for (int k = 1; k <= N; ++k)
    for (int m = k; m <= N; ++m)
      for (const auto& s : surjections(m, k)) {
        std::vector<ChainMap> maps;
        for (std::size_t x = 0; x < X.points_at_level(k); ++x) {
          std::size_t y = diagonal_image(s, X, x);
          const Complex& src = F.fiber(m, y);
          const Complex& tgt = F.fiber(k, x);
          // identity on diagonal fibers, zero elsewhere
          if (src.space.total_dim() == tgt.space.total_dim() &&
              src.space.same_dims(tgt.space))
            maps.push_back(ChainMap::identity(tgt.space));
          else
            maps.push_back(ChainMap::zero(src.space, tgt.space, 0));
        }
        F.theta[s] = std::move(maps);
      }
  F.validate();
  return F;
}

RanComplex convolution(const RanComplex& F, const RanComplex& G) {
  if (F.X.pts != G.X.pts || F.N != G.N)
    fail(Err::CutoffExceeded, "convolution needs matching space and cutoff");
  const FiniteSpace& X = F.X;
  int N = F.N;
  RanComplex R;
  R.X = X;
  R.N = N;

  // restriction of a tuple to a block, reindexed along the order bijection
  auto restrict_tuple = [&](const std::vector<int>& t,
                            const std::vector<int>& block) {
    std::vector<int> r;
    for (int i : block) r.push_back(t[i]);
    return r;
  };
  auto blocks_of = [&](const FinSurjection& pi) {
    std::vector<int> b1, b2;
    for (int i = 0; i < pi.m; ++i)
      (pi.map[i] == 0 ? b1 : b2).push_back(i);
    return std::make_pair(b1, b2);
  };

  struct Summand {
    FinSurjection pi;
    Tensor2 basis;
  };
  // fibers with per-summand label prefixes
  std::vector<std::vector<std::vector<Summand>>> summands(N);
  for (int k = 1; k <= N; ++k) {
    std::vector<Complex> lv;
    summands[k - 1].resize(X.points_at_level(k));
    for (std::size_t x = 0; x < X.points_at_level(k); ++x) {
      std::vector<int> t = X.tuple_of(x, k);
      GradedSpace space;
      ChainMap d = ChainMap::zero(space, space, 1);
      std::map<int, std::vector<std::string>> comps;
      std::map<int, QMat> dblocks;
      // first pass: sizes
      std::vector<std::pair<Complex, Tensor2>> parts;
      auto pis = surjections(k, 2);
      for (std::size_t pidx = 0; pidx < pis.size(); ++pidx) {
        auto [b1, b2] = blocks_of(pis[pidx]);
        const Complex& fa =
            F.fiber(static_cast<int>(b1.size()),
                    X.index_of(restrict_tuple(t, b1)));
        const Complex& fb =
            G.fiber(static_cast<int>(b2.size()),
                    X.index_of(restrict_tuple(t, b2)));
        auto tc = tensor(fa, fb);
        summands[k - 1][x].push_back({pis[pidx], tc.basis});
        parts.emplace_back(tc.cx, tc.basis);
      }
      // assemble the direct sum with summand-prefixed labels
      std::map<int, std::vector<std::size_t>> offs; // per degree, per summand
      for (std::size_t pidx = 0; pidx < parts.size(); ++pidx) {
        for (int p : parts[pidx].first.space.degrees()) {
          offs[p].resize(parts.size() + 1, 0);
        }
      }
      GradedSpace s;
      std::map<int, std::vector<std::size_t>> off_at;
      for (std::size_t pidx = 0; pidx < parts.size(); ++pidx)
        for (int p : parts[pidx].first.space.degrees()) {
          auto& o = off_at[p];
          o.resize(parts.size(), 0);
          o[pidx] = s.dim(p);
          for (const auto& l : parts[pidx].first.space.comps.at(p))
            s.comps[p].push_back("s" + std::to_string(pidx) + ":" + l);
        }
      ChainMap dd = ChainMap::zero(s, s, 1);
      for (int p : s.degrees()) {
        QMat m(s.dim(p + 1), s.dim(p));
        bool nz = false;
        for (std::size_t pidx = 0; pidx < parts.size(); ++pidx) {
          QMat b = parts[pidx].first.d.block(p);
          if (b.is_zero()) continue;
          std::size_t ro = off_at.count(p + 1) && off_at[p + 1].size() > pidx
                               ? off_at[p + 1][pidx]
                               : 0;
          std::size_t co = off_at[p][pidx];
          for (std::size_t i = 0; i < b.rows(); ++i)
            for (std::size_t j = 0; j < b.cols(); ++j)
              if (b.at(i, j) != 0) {
                m.at(ro + i, co + j) = b.at(i, j);
                nz = true;
              }
        }
        if (nz) dd.blocks[p] = std::move(m);
      }
      Complex cx;
      cx.space = s;
      cx.d = dd;
      lv.push_back(make_complex(s, dd));
    }
    R.levels.push_back(std::move(lv));
  }

  // structure maps: factoring summands map via θ_F ⊗ θ_G, others vanish
  for (int k = 1; k <= N; ++k)
    for (int m = k; m <= N; ++m)
      for (const auto& s : surjections(m, k)) {
        std::vector<ChainMap> maps;
        for (std::size_t x = 0; x < X.points_at_level(k); ++x) {
          std::size_t y = diagonal_image(s, X, x);
          const Complex& src = R.fiber(m, y);
          const Complex& tgt = R.fiber(k, x);
          ChainMap f = ChainMap::zero(src.space, tgt.space, 0);
          const auto& src_sums = summands[m - 1][y];
          const auto& tgt_sums = summands[k - 1][x];
          std::vector<int> xt = X.tuple_of(x, k);
          for (std::size_t sp = 0; sp < src_sums.size(); ++sp) {
            const FinSurjection& pim = src_sums[sp].pi;
            // factor pim = pik ∘ s ?
            std::vector<int> pik_map(k, -1);
            bool ok = true;
            for (int i = 0; i < m && ok; ++i) {
              int j = s.map[i];
              if (pik_map[j] == -1)
                pik_map[j] = pim.map[i];
              else if (pik_map[j] != pim.map[i])
                ok = false;
            }
            if (!ok) continue;
            FinSurjection pik{k, 2, pik_map};
            // locate the target summand
            std::size_t tp = tgt_sums.size();
            for (std::size_t q = 0; q < tgt_sums.size(); ++q)
              if (tgt_sums[q].pi.map == pik_map) tp = q;
            if (tp == tgt_sums.size()) continue; // pik not surjective
            auto [mb1, mb2] = blocks_of(pim);
            auto [kb1, kb2] = blocks_of(pik);
            // induced surjections on the blocks
            auto block_surj = [&](const std::vector<int>& mb,
                                  const std::vector<int>& kb) {
              FinSurjection bs{static_cast<int>(mb.size()),
                               static_cast<int>(kb.size()),
                               {}};
              for (int i : mb) {
                int j = s.map[i];
                auto it = std::find(kb.begin(), kb.end(), j);
                bs.map.push_back(static_cast<int>(it - kb.begin()));
              }
              return bs;
            };
            FinSurjection s1 = block_surj(mb1, kb1);
            FinSurjection s2 = block_surj(mb2, kb2);
            std::size_t x1 = X.index_of(restrict_tuple(xt, kb1));
            std::size_t x2 = X.index_of(restrict_tuple(xt, kb2));
            ChainMap t1 = F.theta_at(s1, x1);
            ChainMap t2 = G.theta_at(s2, x2);
            ChainMap tt = tensor_map(t1, t2, src_sums[sp].basis,
                                     tgt_sums[tp].basis);
            // write into the direct-sum blocks
            for (const auto& [p, b] : tt.blocks) {
              if (b.is_zero()) continue;
              QMat big = f.block(p);
              // offsets of summands within the fibers, per degree
              auto off_in = [&](const Complex& fibc, std::size_t sidx,
                                int deg) {
                std::size_t off = 0;
                const auto& ls = fibc.space.comps.count(deg)
                                     ? fibc.space.comps.at(deg)
                                     : std::vector<std::string>{};
                std::string pre = "s" + std::to_string(sidx) + ":";
                for (const auto& l : ls) {
                  if (l.rfind(pre, 0) == 0) break;
                  ++off;
                }
                return off;
              };
              std::size_t co = off_in(src, sp, p);
              std::size_t ro = off_in(tgt, tp, p);
              for (std::size_t i = 0; i < b.rows(); ++i)
                for (std::size_t j = 0; j < b.cols(); ++j)
                  if (b.at(i, j) != 0) big.at(ro + i, co + j) += b.at(i, j);
              if (!big.is_zero()) f.blocks[p] = std::move(big);
            }
          }
          maps.push_back(std::move(f));
        }
        R.theta[s] = std::move(maps);
      }
  R.validate();
  return R;
}

GlobalSections global_sections(const RanComplex& F, int upto) {
  int N = upto == 0 ? F.N : std::min(upto, F.N);
  auto compute = [&](int cutN) {
    // rows: all fiber coordinates per degree
    std::map<int, std::vector<std::tuple<int, std::size_t, int, std::size_t>>>
        rows;
    std::map<std::tuple<int, std::size_t, int, std::size_t>, std::size_t>
        row_of;
    std::set<int> degs;
    for (int k = 1; k <= cutN; ++k)
      for (std::size_t x = 0; x < F.X.points_at_level(k); ++x)
        for (int p : F.fiber(k, x).space.degrees()) degs.insert(p);
    for (int p : degs)
      for (int k = 1; k <= cutN; ++k)
        for (std::size_t x = 0; x < F.X.points_at_level(k); ++x)
          for (std::size_t i = 0; i < F.fiber(k, x).space.dim(p); ++i) {
            row_of[{k, x, p, i}] = rows[p].size();
            rows[p].push_back({k, x, p, i});
          }
    // constraints per degree: θ^σ(v at Δσx) - v at x = 0
    std::map<int, QMat> kernels;
    for (int p : degs) {
      std::vector<std::map<std::size_t, Rat>> cons;
      for (int k = 1; k <= cutN; ++k)
        for (int m = k; m <= cutN; ++m)
          for (const auto& s : surjections(m, k)) {
            if (m == k) {
              bool is_id = true;
              for (int i = 0; i < k; ++i) is_id = is_id && s.map[i] == i;
              if (is_id) continue;
            }
            for (std::size_t x = 0; x < F.X.points_at_level(k); ++x) {
              std::size_t y = diagonal_image(s, F.X, x);
              ChainMap th = F.theta_at(s, x);
              QMat b = th.block(p);
              for (std::size_t r = 0; r < F.fiber(k, x).space.dim(p); ++r) {
                std::map<std::size_t, Rat> row;
                for (std::size_t j = 0; j < b.cols(); ++j)
                  if (b.at(r, j) != 0) row[row_of[{m, y, p, j}]] += b.at(r, j);
                row[row_of[{k, x, p, r}]] -= 1;
                bool nz = false;
                for (auto& [c, v] : row) nz = nz || v != 0;
                if (nz) cons.push_back(std::move(row));
              }
            }
          }
      QMat A(cons.size(), rows[p].size());
      for (std::size_t r = 0; r < cons.size(); ++r)
        for (const auto& [c, v] : cons[r]) A.at(r, c) = v;
      kernels[p] = A.kernel();
    }
    return std::make_pair(rows, kernels);
  };
  auto [rows, kernels] = compute(N);
  GlobalSections out;
  out.rows = rows;
  GradedSpace space;
  for (const auto& [p, K] : kernels) {
    if (K.cols() == 0) continue;
    std::vector<std::string> ls;
    for (std::size_t i = 0; i < K.cols(); ++i)
      ls.push_back("g" + std::to_string(p) + "_" + std::to_string(i));
    space.comps[p] = std::move(ls);
  }
  // induced differential: d acts fiberwise on the embedded coordinates
  ChainMap d = ChainMap::zero(space, space, 1);
  for (const auto& [p, K] : kernels) {
    if (K.cols() == 0) continue;
    auto next = kernels.find(p + 1);
    std::size_t nrows = rows.count(p + 1) ? rows.at(p + 1).size() : 0;
    QMat dK(nrows, K.cols());
    for (std::size_t c = 0; c < K.cols(); ++c)
      for (std::size_t r = 0; r < K.rows(); ++r) {
        if (K.at(r, c) == 0) continue;
        auto [k, x, deg, i] = rows.at(p)[r];
        QMat b = F.fiber(k, x).d.block(deg);
        for (std::size_t rr = 0; rr < b.rows(); ++rr) {
          if (b.at(rr, i) == 0) continue;
          // locate the row of (k, x, deg+1, rr)
          const auto& rws = rows.at(p + 1);
          for (std::size_t q = 0; q < rws.size(); ++q)
            if (rws[q] == std::make_tuple(k, x, deg + 1, rr)) {
              dK.at(q, c) += K.at(r, c) * b.at(rr, i);
              break;
            }
        }
      }
    if (next != kernels.end() && next->second.cols()) {
      auto sol = next->second.solve(dK);
      if (!sol) fail(Err::AxiomFail, "global sections differential escapes");
      if (!sol->is_zero()) d.blocks[p] = *sol;
    } else if (!dK.is_zero()) {
      fail(Err::AxiomFail, "global sections differential escapes");
    }
  }
  out.cx = make_complex(space, d);
  for (const auto& [p, K] : kernels) out.embed[p] = K;
  // stabilization against the one-lower cutoff
  if (N > 1) {
    auto [rows2, kernels2] = compute(N - 1);
    (void)rows2;
    bool same = true;
    std::set<int> ds;
    for (const auto& [p, K] : kernels) ds.insert(p);
    for (const auto& [p, K] : kernels2) ds.insert(p);
    for (int p : ds) {
      std::size_t a = kernels.count(p) ? kernels.at(p).cols() : 0;
      std::size_t b = kernels2.count(p) ? kernels2.at(p).cols() : 0;
      same = same && a == b;
    }
    out.stabilized = same;
  } else {
    out.stabilized = false;
  }
  return out;
}

bool admissible(const RanComplex& F) {
  for (int k = 1; k <= F.N; ++k)
    for (int m = k; m <= F.N; ++m)
      for (const auto& s : surjections(m, k))
        for (std::size_t x = 0; x < F.X.points_at_level(k); ++x) {
          std::size_t y = diagonal_image(s, F.X, x);
          ChainMap th = F.theta_at(s, x);
          if (!quasi_iso(th, F.fiber(m, y), F.fiber(k, x))) return false;
        }
  return true;
}

} // namespace ranjac
