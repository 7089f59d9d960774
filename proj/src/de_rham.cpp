#include "ranjac/de_rham.hpp"

#include <algorithm>
#include <set>

#include "ranjac/error.hpp"

namespace ranjac {

std::vector<Rat> CommAlgebra::one() const {
  std::vector<Rat> e(dim);
  if (dim) e[0] = 1;
  return e;
}

std::vector<Rat> CommAlgebra::mul(const std::vector<Rat>& a,
                                  const std::vector<Rat>& b) const {
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

void CommAlgebra::validate() const {
  if (dim == 0) return;
  if (labels.size() != dim || mult.rows() != dim || mult.cols() != dim * dim)
    fail(Err::ShapeMismatch, "algebra table");
  auto basis = [&](std::size_t i) {
    std::vector<Rat> e(dim);
    e[i] = 1;
    return e;
  };
  for (std::size_t i = 0; i < dim; ++i)
    if (mul(one(), basis(i)) != basis(i))
      fail(Err::AxiomFail, "algebra unit");
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) {
      if (mul(basis(i), basis(j)) != mul(basis(j), basis(i)))
        fail(Err::AxiomFail, "algebra commutativity");
      for (std::size_t k = 0; k < dim; ++k)
        if (mul(mul(basis(i), basis(j)), basis(k)) !=
            mul(basis(i), mul(basis(j), basis(k))))
          fail(Err::AxiomFail, "algebra associativity");
    }
}

CommAlgebra scalar_algebra() {
  CommAlgebra A;
  A.dim = 1;
  A.labels = {"1"};
  A.mult = QMat(1, 1);
  A.mult.at(0, 0) = 1;
  return A;
}

CommAlgebra poly_quotient(int k) {
  CommAlgebra A;
  A.dim = static_cast<std::size_t>(k);
  for (int i = 0; i < k; ++i)
    A.labels.push_back(i == 0 ? "1" : "x^" + std::to_string(i));
  A.mult = QMat(A.dim, A.dim * A.dim);
  for (std::size_t i = 0; i < A.dim; ++i)
    for (std::size_t j = 0; j < A.dim; ++j)
      if (i + j < A.dim) A.mult.at(i + j, i * A.dim + j) = 1;
  A.validate();
  return A;
}

namespace {

std::string expo_label(const DeRhamAlgebra& om, const std::vector<int>& a,
                       const std::vector<int>& S) {
  std::string l;
  for (std::size_t v = 0; v < a.size(); ++v)
    for (int e = 0; e < a[v]; ++e) l += "t" + std::to_string(om.vars[v]);
  for (int s : S) l += "dt" + std::to_string(om.vars[s]);
  return l.empty() ? "1" : l;
}

} // namespace

namespace {
DeRhamAlgebra build_de_rham(std::vector<int> I, int D, bool weight_cut);
}

DeRhamAlgebra de_rham(std::vector<int> I, int D) {
  return build_de_rham(std::move(I), D, false);
}

DeRhamAlgebra de_rham_nilpotent(std::vector<int> I, int D) {
  return build_de_rham(std::move(I), D, true);
}

namespace {
DeRhamAlgebra build_de_rham(std::vector<int> I, int D, bool weight_cut) {
  if (I.empty() || D < 0) fail(Err::BadInput, "de_rham");
  std::sort(I.begin(), I.end());
  DeRhamAlgebra om;
  om.I = I;
  om.D = D;
  om.weight_cut = weight_cut;
  om.vars.assign(I.begin(), I.end() - 1);
  int r = static_cast<int>(om.vars.size());
  // enumerate exponents with |a| <= D, then subsets
  std::vector<std::vector<int>> expos;
  std::vector<int> cur(r, 0);
  auto rec = [&](auto&& self, int pos, int left) -> void {
    if (pos == r) {
      expos.push_back(cur);
      return;
    }
    for (int e = 0; e <= left; ++e) {
      cur[pos] = e;
      self(self, pos + 1, left - e);
    }
    cur[pos] = 0;
  };
  rec(rec, 0, D);
  std::sort(expos.begin(), expos.end());
  std::vector<std::vector<int>> subsets;
  for (std::size_t mask = 0; mask < (1u << r); ++mask) {
    std::vector<int> s;
    for (int t = 0; t < r; ++t)
      if (mask & (1u << t)) s.push_back(t);
    subsets.push_back(s);
  }
  std::sort(subsets.begin(), subsets.end(),
            [](const auto& a, const auto& b) {
              return std::make_pair(a.size(), a) < std::make_pair(b.size(), b);
            });
  // group by form degree
  std::map<int, std::vector<std::pair<std::vector<int>, std::vector<int>>>>
      by_deg;
  for (const auto& S : subsets)
    for (const auto& a : expos) {
      if (weight_cut) {
        int w = static_cast<int>(S.size());
        for (int e : a) w += e;
        if (w > D) continue;
      }
      by_deg[static_cast<int>(S.size())].push_back({a, S});
    }
  GradedSpace space;
  for (const auto& [deg, bs] : by_deg) {
    std::vector<std::string> ls;
    for (const auto& b : bs) {
      om.id_of[b] = om.basis.size();
      om.basis.push_back(b);
      ls.push_back(expo_label(om, b.first, b.second));
    }
    space.comps[deg] = std::move(ls);
  }
  // d(t^a dt_S) = Σ_v a_v t^{a-e_v} dt_v ∧ dt_S
  ChainMap d = ChainMap::zero(space, space, 1);
  std::map<int, QMat> blocks;
  for (std::size_t id = 0; id < om.basis.size(); ++id) {
    const auto& [a, S] = om.basis[id];
    int deg = static_cast<int>(S.size());
    for (int v = 0; v < r; ++v) {
      if (a[v] == 0) continue;
      if (std::find(S.begin(), S.end(), v) != S.end()) continue;
      std::vector<int> a2 = a;
      a2[v] -= 1;
      std::vector<int> S2 = S;
      auto it = std::lower_bound(S2.begin(), S2.end(), v);
      int pos = static_cast<int>(it - S2.begin());
      S2.insert(it, v);
      int sign = (pos % 2 == 0) ? 1 : -1;
      std::size_t tid = om.id_of.at({a2, S2});
      auto bit = blocks.find(deg);
      if (bit == blocks.end())
        bit = blocks.emplace(deg, QMat(space.dim(deg + 1), space.dim(deg)))
                  .first;
      bit->second.at(om.loc(tid).second, om.loc(id).second) += Rat(a[v]) * sign;
    }
  }
  for (auto& [p, m] : blocks)
    if (!m.is_zero()) d.blocks[p] = std::move(m);
  om.cx = make_complex(space, d);
  return om;
}
} // namespace

std::pair<int, std::size_t> DeRhamAlgebra::loc(std::size_t id) const {
  int deg = static_cast<int>(basis[id].second.size());
  std::size_t hi = id;
  while (hi > 0 && basis[hi - 1].second.size() == basis[id].second.size()) --hi;
  return {deg, id - hi};
}

std::size_t DeRhamAlgebra::id_at(int deg, std::size_t pos) const {
  for (std::size_t id = 0; id < basis.size(); ++id)
    if (static_cast<int>(basis[id].second.size()) == deg) return id + pos;
  fail(Err::BadInput, "de rham id_at");
}

std::vector<std::pair<std::size_t, Rat>> DeRhamAlgebra::mul(
    std::size_t a, std::size_t b) const {
  const auto& [ea, Sa] = basis[a];
  const auto& [eb, Sb] = basis[b];
  std::vector<std::pair<std::size_t, Rat>> out;
  // dt's must be disjoint
  for (int s : Sa)
    if (std::find(Sb.begin(), Sb.end(), s) != Sb.end()) return out;
  std::vector<int> e(ea.size());
  int total = 0;
  for (std::size_t v = 0; v < ea.size(); ++v) {
    e[v] = ea[v] + eb[v];
    total += e[v];
  }
  int wtotal = total + static_cast<int>(Sa.size() + Sb.size());
  if (weight_cut ? wtotal > D : total > D) return out; // quotient/window drop
  // merge sort the dt's counting transpositions
  std::vector<int> S;
  int sign = 1;
  std::size_t i = 0, j = 0;
  while (i < Sa.size() || j < Sb.size()) {
    if (j == Sb.size() || (i < Sa.size() && Sa[i] < Sb[j])) {
      S.push_back(Sa[i++]);
    } else {
      if ((Sa.size() - i) % 2 == 1) sign = -sign;
      S.push_back(Sb[j++]);
    }
  }
  out.emplace_back(id_of.at({e, S}), Rat(sign));
  return out;
}

std::size_t DeRhamAlgebra::unit_id() const {
  std::vector<int> z(vars.size(), 0);
  return id_of.at({z, {}});
}

ChainMap de_rham_projection(const DeRhamAlgebra& from,
                            const DeRhamAlgebra& to) {
  // to.I ⊂ from.I required
  for (int i : to.I)
    if (std::find(from.I.begin(), from.I.end(), i) == from.I.end())
      fail(Err::BadInput, "projection needs K ⊂ I");
  // images of each variable/differential of `from` inside `to`
  // t_i ↦ t_i (re-expressed), or 0 if i ∉ K
  int r2 = static_cast<int>(to.vars.size());
  auto var_image = [&](int gi) {
    // polynomial image of t_{gi} in `to` coordinates: pairs (expo, coeff)
    std::map<std::vector<int>, Rat> poly;
    std::vector<int> z(r2, 0);
    if (std::find(to.I.begin(), to.I.end(), gi) == to.I.end()) return poly;
    if (gi == to.I.back()) {
      poly[z] = 1;
      for (int v = 0; v < r2; ++v) {
        std::vector<int> e(r2, 0);
        e[v] = 1;
        poly[e] -= 1;
      }
    } else {
      std::vector<int> e(r2, 0);
      e[std::find(to.vars.begin(), to.vars.end(), gi) - to.vars.begin()] = 1;
      poly[e] = 1;
    }
    return poly;
  };
  auto dvar_image = [&](int gi) {
    // dt_{gi} image: list of (var index in `to`, coeff)
    std::vector<std::pair<int, Rat>> out;
    if (std::find(to.I.begin(), to.I.end(), gi) == to.I.end()) return out;
    if (gi == to.I.back()) {
      for (int v = 0; v < r2; ++v) out.emplace_back(v, Rat(-1));
    } else {
      out.emplace_back(static_cast<int>(std::find(to.vars.begin(),
                                                  to.vars.end(), gi) -
                                        to.vars.begin()),
                       Rat(1));
    }
    return out;
  };
  ChainMap f = ChainMap::zero(from.cx.space, to.cx.space, 0);
  std::map<int, QMat> blocks;
  for (std::size_t id = 0; id < from.basis.size(); ++id) {
    const auto& [a, S] = from.basis[id];
    int deg = static_cast<int>(S.size());
    // multiply out Π var_image^{a_v} ∧ Π dvar_image
    std::map<std::pair<std::vector<int>, std::vector<int>>, Rat> acc;
    std::vector<int> z(r2, 0);
    acc[{z, {}}] = 1;
    bool dead = false;
    for (std::size_t v = 0; v < a.size() && !dead; ++v) {
      for (int e = 0; e < a[v] && !dead; ++e) {
        auto pi = var_image(from.vars[v]);
        if (pi.empty()) {
          dead = true;
          break;
        }
        std::map<std::pair<std::vector<int>, std::vector<int>>, Rat> nx;
        for (const auto& [mono, c] : acc)
          for (const auto& [pe, pc] : pi) {
            std::vector<int> e2(r2);
            int tot = 0;
            for (int t = 0; t < r2; ++t) {
              e2[t] = mono.first[t] + pe[t];
              tot += e2[t];
            }
            int wt = tot + static_cast<int>(mono.second.size());
            if (to.weight_cut ? wt > to.D : tot > to.D) continue;
            nx[{e2, mono.second}] += c * pc;
          }
        acc = std::move(nx);
      }
    }
    for (std::size_t si = 0; si < S.size() && !dead; ++si) {
      auto di = dvar_image(from.vars[S[si]]);
      if (di.empty()) {
        dead = true;
        break;
      }
      std::map<std::pair<std::vector<int>, std::vector<int>>, Rat> nx;
      for (const auto& [mono, c] : acc)
        for (const auto& [dv, dc] : di) {
          // wedge dt_dv at the end of mono.second
          std::vector<int> S2 = mono.second;
          if (std::find(S2.begin(), S2.end(), dv) != S2.end()) continue;
          // insert keeping sorted, sign by the number of passes from the end
          int pos = static_cast<int>(std::lower_bound(S2.begin(), S2.end(),
                                                      dv) -
                                     S2.begin());
          int sign = ((static_cast<int>(S2.size()) - pos) % 2 == 0) ? 1 : -1;
          S2.insert(S2.begin() + pos, dv);
          nx[{mono.first, S2}] += c * dc * sign;
        }
      acc = std::move(nx);
    }
    if (dead) continue;
    for (const auto& [mono, c] : acc) {
      if (c == 0) continue;
      std::size_t tid = to.id_of.at(mono);
      auto bit = blocks.find(deg);
      if (bit == blocks.end())
        bit = blocks
                  .emplace(deg, QMat(to.cx.space.dim(deg),
                                     from.cx.space.dim(deg)))
                  .first;
      bit->second.at(to.loc(tid).second, from.loc(id).second) += c;
    }
  }
  for (auto& [p, m] : blocks)
    if (!m.is_zero()) f.blocks[p] = std::move(m);
  return f;
}

ChainMap poincare_homotopy(const DeRhamAlgebra& om) {
  ChainMap h = ChainMap::zero(om.cx.space, om.cx.space, -1);
  std::map<int, QMat> blocks;
  for (std::size_t id = 0; id < om.basis.size(); ++id) {
    const auto& [a, S] = om.basis[id];
    int q = static_cast<int>(S.size());
    int atot = 0;
    for (int e : a) atot += e;
    if (atot + q == 0 || q == 0) continue;
    if (atot + 1 > om.D) continue; // leaves the window
    for (std::size_t j = 0; j < S.size(); ++j) {
      std::vector<int> a2 = a;
      a2[S[j]] += 1;
      std::vector<int> S2;
      for (std::size_t t = 0; t < S.size(); ++t)
        if (t != j) S2.push_back(S[t]);
      int sign = (j % 2 == 0) ? 1 : -1;
      std::size_t tid = om.id_of.at({a2, S2});
      auto bit = blocks.find(q);
      if (bit == blocks.end())
        bit = blocks
                  .emplace(q, QMat(om.cx.space.dim(q - 1),
                                   om.cx.space.dim(q)))
                  .first;
      bit->second.at(om.loc(tid).second, om.loc(id).second) +=
          rat(sign, atot + q);
    }
  }
  for (auto& [p, m] : blocks)
    if (!m.is_zero()) h.blocks[p] = std::move(m);
  return h;
}

std::size_t ModuleFamily::dim_at(const std::vector<int>& I) const {
  auto it = dims.find(I);
  return it == dims.end() ? 0 : it->second;
}

QMat ModuleFamily::res_at(const std::vector<int>& K,
                          const std::vector<int>& I) const {
  if (K == I) return QMat::identity(dim_at(K));
  auto it = res.find({K, I});
  if (it != res.end()) return it->second;
  return QMat(dim_at(I), dim_at(K));
}

void ModuleFamily::validate() const {
  for (const auto& [KI, m] : res) {
    const auto& [K, I] = KI;
    if (m.rows() != dim_at(I) || m.cols() != dim_at(K))
      fail(Err::ShapeMismatch, "restriction shape");
  }
  // functoriality over chains K ⊂ J ⊂ I
  std::vector<std::vector<int>> subs;
  for (const auto& [I, d] : dims) subs.push_back(I);
  for (const auto& K : subs)
    for (const auto& J : subs)
      for (const auto& I : subs) {
        if (K == J || J == I) continue;
        if (!std::includes(J.begin(), J.end(), K.begin(), K.end())) continue;
        if (!std::includes(I.begin(), I.end(), J.begin(), J.end())) continue;
        QMat lhs = res_at(J, I) * res_at(K, J);
        QMat rhs = res_at(K, I);
        if (lhs != rhs) fail(Err::AxiomFail, "restriction functoriality");
      }
}

std::size_t CoverDatum::odim(const std::vector<int>& I) const {
  auto it = O.find(I);
  return it == O.end() ? 0 : it->second.dim;
}

QMat CoverDatum::ores(const std::vector<int>& K,
                      const std::vector<int>& I) const {
  if (K == I) return QMat::identity(odim(K));
  auto it = res.find({K, I});
  if (it != res.end()) return it->second;
  return QMat(odim(I), odim(K));
}

ModuleFamily CoverDatum::structure_family() const {
  ModuleFamily f;
  for (const auto& [I, A] : O)
    if (A.dim) f.dims[I] = A.dim;
  f.res = res;
  return f;
}

void CoverDatum::validate() const {
  for (const auto& [I, A] : O) A.validate();
  structure_family().validate();
  // restrictions are unital algebra morphisms
  for (const auto& [KI, m] : res) {
    const auto& [K, I] = KI;
    auto ik = O.find(K);
    auto ii = O.find(I);
    if (ik == O.end() || ii == O.end() || ii->second.dim == 0) continue;
    const CommAlgebra& A = ik->second;
    const CommAlgebra& B = ii->second;
    if (m.apply(A.one()) != B.one())
      fail(Err::AxiomFail, "restriction not unital");
    for (std::size_t i = 0; i < A.dim; ++i)
      for (std::size_t j = 0; j < A.dim; ++j) {
        std::vector<Rat> ei(A.dim), ej(A.dim);
        ei[i] = 1;
        ej[j] = 1;
        if (m.apply(A.mul(ei, ej)) != B.mul(m.apply(ei), m.apply(ej)))
          fail(Err::AxiomFail, "restriction not multiplicative");
      }
  }
}

std::vector<std::vector<int>> CoverDatum::nerve() const {
  std::vector<std::vector<int>> out;
  for (const auto& [I, A] : O)
    if (A.dim) out.push_back(I);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::make_pair(a.size(), a) < std::make_pair(b.size(), b);
  });
  return out;
}

ThomSullivan thom_sullivan(const CoverDatum& cover, const ModuleFamily& fam,
                           int D, bool weight_cut) {
  cover.validate();
  fam.validate();
  ThomSullivan Q;
  Q.cover = cover;
  Q.family = fam;
  Q.D = D;
  Q.nerve = cover.nerve();
  for (const auto& I : Q.nerve)
    Q.omegas.push_back(weight_cut ? de_rham_nilpotent(I, D) : de_rham(I, D));
  // ambient space and rows
  GradedSpace amb;
  for (std::size_t ni = 0; ni < Q.nerve.size(); ++ni) {
    std::size_t md = fam.dim_at(Q.nerve[ni]);
    const DeRhamAlgebra& om = Q.omegas[ni];
    for (std::size_t oid = 0; oid < om.basis.size(); ++oid) {
      auto [deg, pos] = om.loc(oid);
      (void)pos;
      for (std::size_t mi = 0; mi < md; ++mi) {
        Q.rows[deg].push_back({ni, mi, oid});
        std::string nl;
        for (int i : Q.nerve[ni]) nl += std::to_string(i);
        amb.comps[deg].push_back(
            "U" + nl + "|m" + std::to_string(mi) + "|" +
            om.cx.space.comps.at(deg)[om.loc(oid).second]);
      }
    }
  }
  auto row_of = [&](int deg, std::size_t ni, std::size_t mi,
                    std::size_t oid) -> std::size_t {
    const auto& rows = Q.rows.at(deg);
    for (std::size_t r = 0; r < rows.size(); ++r)
      if (rows[r] == std::make_tuple(ni, mi, oid)) return r;
    fail(Err::BadInput, "row lookup");
  };
  ChainMap ad = ChainMap::zero(amb, amb, 1);
  {
    std::map<int, QMat> blocks;
    for (const auto& [deg, rows] : Q.rows) {
      std::size_t tdim = Q.rows.count(deg + 1) ? Q.rows.at(deg + 1).size() : 0;
      if (tdim == 0) continue;
      QMat m(tdim, rows.size());
      bool nz = false;
      for (std::size_t c = 0; c < rows.size(); ++c) {
        auto [ni, mi, oid] = rows[c];
        const DeRhamAlgebra& om = Q.omegas[ni];
        QMat b = om.cx.d.block(deg);
        for (std::size_t r = 0; r < b.rows(); ++r) {
          if (b.at(r, om.loc(oid).second) == 0) continue;
          std::size_t tid = om.id_at(deg + 1, r);
          m.at(row_of(deg + 1, ni, mi, tid), c) += b.at(r, om.loc(oid).second);
          nz = true;
        }
      }
      if (nz) blocks[deg] = std::move(m);
    }
    for (auto& [p, m] : blocks) ad.blocks[p] = std::move(m);
  }
  Q.ambient = make_complex(amb, ad);
  // compatibility constraints: (φ ⊗ id)(f_K) = (id ⊗ ψ)(f_I) for K ⊂ I,
  // rows in M(U_I) ⊗ Ω_K
  for (const auto& [deg, rows] : Q.rows) {
    std::vector<std::map<std::size_t, Rat>> cons;
    for (std::size_t ki = 0; ki < Q.nerve.size(); ++ki)
      for (std::size_t ii = 0; ii < Q.nerve.size(); ++ii) {
        const auto& K = Q.nerve[ki];
        const auto& I = Q.nerve[ii];
        if (K == I || !std::includes(I.begin(), I.end(), K.begin(), K.end()))
          continue;
        QMat phi = fam.res_at(K, I);
        ChainMap psi = de_rham_projection(Q.omegas[ii], Q.omegas[ki]);
        std::size_t mdI = fam.dim_at(I);
        const DeRhamAlgebra& omK = Q.omegas[ki];
        // for each target basis (m_I, ω_K) of degree deg
        for (std::size_t mi = 0; mi < mdI; ++mi)
          for (std::size_t ok = 0; ok < omK.cx.space.dim(deg); ++ok) {
            std::map<std::size_t, Rat> row;
            // (φ⊗id)(f_K): sum over source (m_K, same ω_K)
            for (std::size_t mk = 0; mk < fam.dim_at(K); ++mk)
              if (phi.at(mi, mk) != 0)
                row[row_of(deg, ki, mk, omK.id_at(deg, ok))] += phi.at(mi, mk);
            // -(id⊗ψ)(f_I): sum over ω_I mapping to ω_K
            QMat pb = psi.block(deg);
            for (std::size_t oi = 0; oi < pb.cols(); ++oi)
              if (pb.at(ok, oi) != 0)
                row[row_of(deg, ii, mi, Q.omegas[ii].id_at(deg, oi))] -=
                    pb.at(ok, oi);
            bool nz = false;
            for (auto& [c, v] : row) nz = nz || v != 0;
            if (nz) cons.push_back(std::move(row));
          }
      }
    QMat A(cons.size(), rows.size());
    for (std::size_t r = 0; r < cons.size(); ++r)
      for (const auto& [c, v] : cons[r]) A.at(r, c) = v;
    Q.q_basis[deg] = A.kernel();
    // window columns: total weight (poly + form degree) <= D
    std::vector<std::size_t> win;
    for (std::size_t c = 0; c < rows.size(); ++c) {
      auto [ni, mi, oid] = rows[c];
      (void)mi;
      const auto& [a, S] = Q.omegas[ni].basis[oid];
      int w = static_cast<int>(S.size());
      for (int e : a) w += e;
      if (w <= D) win.push_back(c);
    }
    QMat Aw = A.cols_subset(win);
    QMat kw = Aw.kernel();
    QMat emb(rows.size(), kw.cols());
    for (std::size_t c = 0; c < kw.cols(); ++c)
      for (std::size_t r = 0; r < win.size(); ++r)
        emb.at(win[r], c) = kw.at(r, c);
    Q.w_basis[deg] = std::move(emb);
  }
  // subcomplex structure
  GradedSpace qs;
  for (const auto& [deg, K] : Q.q_basis) {
    if (K.cols() == 0) continue;
    std::vector<std::string> ls;
    for (std::size_t i = 0; i < K.cols(); ++i)
      ls.push_back("q" + std::to_string(deg) + "_" + std::to_string(i));
    qs.comps[deg] = std::move(ls);
  }
  ChainMap qd = ChainMap::zero(qs, qs, 1);
  for (const auto& [deg, K] : Q.q_basis) {
    if (K.cols() == 0) continue;
    QMat img = Q.ambient.d.block(deg) * K;
    auto nextK = Q.q_basis.find(deg + 1);
    if (nextK != Q.q_basis.end() && nextK->second.cols()) {
      auto sol = nextK->second.solve(img);
      if (!sol) fail(Err::AxiomFail, "Q is not d-stable");
      if (!sol->is_zero()) qd.blocks[deg] = *sol;
    } else if (!img.is_zero()) {
      fail(Err::AxiomFail, "Q is not d-stable");
    }
  }
  Q.cx = make_complex(qs, qd);
  // window subcomplex
  GradedSpace ws;
  for (const auto& [deg, K] : Q.w_basis) {
    if (K.cols() == 0) continue;
    std::vector<std::string> ls;
    for (std::size_t i = 0; i < K.cols(); ++i)
      ls.push_back("w" + std::to_string(deg) + "_" + std::to_string(i));
    ws.comps[deg] = std::move(ls);
  }
  ChainMap wd = ChainMap::zero(ws, ws, 1);
  for (const auto& [deg, K] : Q.w_basis) {
    if (K.cols() == 0) continue;
    QMat img = Q.ambient.d.block(deg) * K;
    auto nextK = Q.w_basis.find(deg + 1);
    if (nextK != Q.w_basis.end() && nextK->second.cols()) {
      auto sol = nextK->second.solve(img);
      if (!sol) fail(Err::AxiomFail, "window subcomplex not d-stable");
      if (!sol->is_zero()) wd.blocks[deg] = *sol;
    } else if (!img.is_zero()) {
      fail(Err::AxiomFail, "window subcomplex not d-stable");
    }
  }
  Q.wcx = make_complex(ws, wd);
  return Q;
}

ThomSullivan thom_sullivan(const CoverDatum& cover, int D, bool weight_cut) {
  return thom_sullivan(cover, cover.structure_family(), D, weight_cut);
}

std::optional<GradedVec> ThomSullivan::q_mul(const GradedVec& a,
                                             const GradedVec& b) const {
  // multiply in the ambient algebra componentwise; nullopt if a monomial
  // leaves the polynomial window
  std::map<int, std::vector<Rat>> amb_a, amb_b;
  for (const auto& [p, xs] : a.c) {
    QMat K = q_basis.count(p) ? q_basis.at(p) : QMat(0, 0);
    if (K.cols() != xs.size()) fail(Err::ShapeMismatch, "q_mul");
    amb_a[p] = K.apply(xs);
  }
  for (const auto& [p, xs] : b.c) {
    QMat K = q_basis.count(p) ? q_basis.at(p) : QMat(0, 0);
    amb_b[p] = K.apply(xs);
  }
  std::map<int, std::vector<Rat>> prod;
  for (const auto& [pa, va] : amb_a)
    for (const auto& [pb, vb] : amb_b) {
      const auto& rowsa = rows.at(pa);
      const auto& rowsb = rows.at(pb);
      for (std::size_t i = 0; i < va.size(); ++i) {
        if (va[i] == 0) continue;
        auto [nia, mia, oia] = rowsa[i];
        for (std::size_t j = 0; j < vb.size(); ++j) {
          if (vb[j] == 0) continue;
          auto [nib, mib, oib] = rowsb[j];
          if (nia != nib) continue;
          const auto& I = nerve[nia];
          const CommAlgebra& A = cover.O.at(I);
          std::vector<Rat> ea(A.dim), eb(A.dim);
          ea[mia] = 1;
          eb[mib] = 1;
          auto mo = A.mul(ea, eb);
          auto om_terms = omegas[nia].mul(oia, oib);
          // window check: a nonzero-degree product that vanished only by
          // truncation is not representable
          if (om_terms.empty()) {
            // legitimate zero (dt collision) or window overflow; detect
            const auto& [ea2, Sa] = omegas[nia].basis[oia];
            const auto& [eb2, Sb] = omegas[nia].basis[oib];
            bool collide = false;
            for (int s : Sa)
              collide = collide ||
                        std::find(Sb.begin(), Sb.end(), s) != Sb.end();
            int tot = 0;
            for (std::size_t v = 0; v < ea2.size(); ++v)
              tot += ea2[v] + eb2[v];
            bool overflow =
                omegas[nia].weight_cut
                    ? tot + static_cast<int>(Sa.size() + Sb.size()) > D
                    : tot > D;
            if (!collide && overflow) {
              if (omegas[nia].weight_cut) continue; // honest quotient zero
              return std::nullopt;
            }
            continue;
          }
          int tdeg = pa + pb;
          auto& dst = prod[tdeg];
          dst.resize(rows.count(tdeg) ? rows.at(tdeg).size() : 0);
          for (const auto& [oid, oc] : om_terms)
            for (std::size_t mk = 0; mk < A.dim; ++mk) {
              if (mo[mk] == 0) continue;
              const auto& rws = rows.at(tdeg);
              for (std::size_t r = 0; r < rws.size(); ++r)
                if (rws[r] == std::make_tuple(nia, mk, oid)) {
                  dst[r] += va[i] * vb[j] * mo[mk] * oc;
                  break;
                }
            }
        }
      }
    }
  // express in the q basis
  GradedVec out;
  for (auto& [p, v] : prod) {
    bool nz = false;
    for (auto& x : v) nz = nz || x != 0;
    if (!nz) continue;
    QMat col(v.size(), 1);
    for (std::size_t r = 0; r < v.size(); ++r) col.at(r, 0) = v[r];
    const QMat& K = q_basis.at(p);
    auto sol = K.solve(col);
    if (!sol) fail(Err::AxiomFail, "product left the compatible subspace");
    out.c[p].resize(K.cols());
    for (std::size_t r = 0; r < K.cols(); ++r) out.c[p][r] = sol->at(r, 0);
  }
  out.prune();
  return out;
}

GradedVec ThomSullivan::embed_global(const std::vector<Rat>& cech0) const {
  // cech0: coordinates over ⊕_{|I|=1} M(U_I); the family f_I = φ(g)·1
  std::map<int, std::vector<Rat>> amb;
  amb[0].resize(rows.count(0) ? rows.at(0).size() : 0);
  std::size_t off = 0;
  std::map<std::vector<int>, std::vector<Rat>> g1;
  for (const auto& I : nerve) {
    if (I.size() != 1) continue;
    std::vector<Rat> v(family.dim_at(I));
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = cech0[off + i];
    g1[I] = v;
    off += v.size();
  }
  for (std::size_t ni = 0; ni < nerve.size(); ++ni) {
    const auto& I = nerve[ni];
    std::vector<int> first{I[0]};
    if (!g1.count(first)) continue;
    QMat phi = family.res_at(first, I);
    std::vector<Rat> fi = phi.apply(g1[first]);
    std::size_t uid = omegas[ni].unit_id();
    const auto& rws = rows.at(0);
    for (std::size_t mi = 0; mi < fi.size(); ++mi) {
      if (fi[mi] == 0) continue;
      for (std::size_t r = 0; r < rws.size(); ++r)
        if (rws[r] == std::make_tuple(ni, mi, uid)) amb[0][r] += fi[mi];
    }
  }
  // express in the q basis
  GradedVec out;
  QMat col(amb[0].size(), 1);
  for (std::size_t r = 0; r < amb[0].size(); ++r) col.at(r, 0) = amb[0][r];
  const QMat& K = q_basis.at(0);
  auto sol = K.solve(col);
  if (!sol) fail(Err::AxiomFail, "global section not compatible");
  out.c[0].resize(K.cols());
  for (std::size_t r = 0; r < K.cols(); ++r) out.c[0][r] = sol->at(r, 0);
  out.prune();
  return out;
}

Complex cech_complex(const CoverDatum& cover, const ModuleFamily& fam) {
  auto nerve = cover.nerve();
  GradedSpace s;
  std::map<std::vector<int>, std::pair<int, std::size_t>> off;
  for (const auto& I : nerve) {
    int q = static_cast<int>(I.size()) - 1;
    off[I] = {q, s.dim(q)};
    for (std::size_t i = 0; i < fam.dim_at(I); ++i) {
      std::string nl;
      for (int v : I) nl += std::to_string(v);
      s.comps[q].push_back("U" + nl + "|m" + std::to_string(i));
    }
  }
  ChainMap d = ChainMap::zero(s, s, 1);
  std::map<int, QMat> blocks;
  for (const auto& K : nerve) {
    int q = static_cast<int>(K.size()) - 1;
    for (const auto& I : nerve) {
      if (I.size() != K.size() + 1) continue;
      if (!std::includes(I.begin(), I.end(), K.begin(), K.end())) continue;
      // position of the extra index
      int j = 0;
      for (std::size_t t = 0; t < I.size(); ++t)
        if (std::find(K.begin(), K.end(), I[t]) == K.end())
          j = static_cast<int>(t);
      int sign = (j % 2 == 0) ? 1 : -1;
      QMat phi = fam.res_at(K, I);
      auto bit = blocks.find(q);
      if (bit == blocks.end())
        bit = blocks.emplace(q, QMat(s.dim(q + 1), s.dim(q))).first;
      auto [kq, ko] = off[K];
      auto [iq, io] = off[I];
      (void)kq;
      (void)iq;
      for (std::size_t r = 0; r < phi.rows(); ++r)
        for (std::size_t c = 0; c < phi.cols(); ++c)
          if (phi.at(r, c) != 0)
            bit->second.at(io + r, ko + c) += Rat(sign) * phi.at(r, c);
    }
  }
  for (auto& [p, m] : blocks)
    if (!m.is_zero()) d.blocks[p] = std::move(m);
  return make_complex(s, d);
}

Complex cech_complex(const CoverDatum& cover) {
  return cech_complex(cover, cover.structure_family());
}

DolbeaultReport dolbeault_check(const ThomSullivan& Q) {
  DolbeaultReport rep;
  rep.h_q = cohomology_dims(Q.wcx);
  rep.h_cech = cohomology_dims(cech_complex(Q.cover, Q.family));
  rep.structure_quasi_iso = rep.h_q == rep.h_cech;
  // Q ⊗ cone(id) acyclic
  GradedSpace s;
  s.comps[0] = {"a"};
  Complex a = make_complex(s, ChainMap::zero(s, s, 1));
  Complex cn = cone(ChainMap::identity(s), a, a);
  auto tc = tensor(Q.wcx, cn);
  rep.flat_on_acyclic = cohomology_dims(tc.cx).empty();
  return rep;
}

} // namespace ranjac
