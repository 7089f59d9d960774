#include "ranjac/seeded.hpp"

#include <random>

#include "ranjac/config.hpp"
#include "ranjac/error.hpp"

namespace ranjac {

namespace {

GradedSpace space_of(std::initializer_list<std::pair<int, int>> dims,
                     const std::string& prefix) {
  GradedSpace s;
  for (auto [p, n] : dims) {
    auto& ls = s.comps[p];
    for (int i = 0; i < n; ++i)
      ls.push_back(prefix + std::to_string(p) + "_" + std::to_string(i));
  }
  return s;
}

struct Block {
  Complex cx;
  std::vector<BracketTriple> br;
};

Block sl2_block(const std::string& pre) {
  GradedSpace s;
  s.comps[0] = {pre + "e", pre + "f", pre + "h"};
  Block b;
  b.cx = make_complex(s, ChainMap::zero(s, s, 1));
  Gen e{0, 0}, f{0, 1}, h{0, 2};
  b.br = {{e, f, h, 1}, {e, h, e, -2}, {f, h, f, 2}};
  return b;
}

Block heis_block(int a, int bdeg, const std::string& pre) {
  GradedSpace s;
  s.comps[a].push_back(pre + "x");
  s.comps[bdeg].push_back(pre + "y");
  s.comps[a + bdeg].push_back(pre + "z");
  Gen x{a, 0}, y{bdeg, static_cast<int>(s.comps[bdeg].size()) - 1};
  Gen z{a + bdeg, static_cast<int>(s.comps[a + bdeg].size()) - 1};
  Block b;
  b.cx = make_complex(s, ChainMap::zero(s, s, 1));
  if (std::make_pair(x.deg, x.idx) <= std::make_pair(y.deg, y.idx))
    b.br = {{x, y, z, 1}};
  else
    b.br = {{y, x, z, Rat(-koszul_sign(a, bdeg))}};
  return b;
}

Block acyclic_block(int p, const std::string& pre) {
  GradedSpace s;
  s.comps[p] = {pre + "a"};
  s.comps[p + 1] = {pre + "b"};
  ChainMap d = ChainMap::zero(s, s, 1);
  d.set_block(p, QMat::identity(1));
  Block b;
  b.cx = make_complex(s, d);
  return b;
}

Block zero_block(int p, int n, const std::string& pre) {
  GradedSpace s;
  for (int i = 0; i < n; ++i) s.comps[p].push_back(pre + std::to_string(i));
  Block b;
  b.cx = make_complex(s, ChainMap::zero(s, s, 1));
  return b;
}

// Direct sum of blocks; brackets stay within each block.
DgLieAlgebra direct_sum(const std::vector<Block>& blocks) {
  GradedSpace s;
  std::vector<std::map<int, int>> offs(blocks.size());
  for (std::size_t b = 0; b < blocks.size(); ++b)
    for (int p : blocks[b].cx.space.degrees()) {
      offs[b][p] = static_cast<int>(s.dim(p));
      for (const auto& l : blocks[b].cx.space.comps.at(p))
        s.comps[p].push_back(l);
    }
  ChainMap d = ChainMap::zero(s, s, 1);
  for (int p : s.degrees()) {
    QMat m(s.dim(p + 1), s.dim(p));
    bool nz = false;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      QMat db = blocks[b].cx.d.block(p);
      if (db.is_zero()) continue;
      int ro = offs[b].count(p + 1) ? offs[b][p + 1] : 0;
      int co = offs[b][p];
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
  for (std::size_t b = 0; b < blocks.size(); ++b)
    for (auto t : blocks[b].br) {
      t.a.idx += offs[b][t.a.deg];
      t.b.idx += offs[b][t.b.deg];
      t.t.idx += offs[b][t.t.deg];
      tr.push_back(t);
    }
  return make_dg_lie(cx, tr);
}

// g ⊗ Λ, Λ = Q<1, t, dt>, t^2 = t dt = 0, d t = dt: a contractible cdga that
// mixes the differential into the bracket.
DgLieAlgebra tensor_interval(const DgLieAlgebra& g) {
  // basis order per generator: x*1 (deg p), x*t (deg p), x*dt (deg p+1)
  GradedSpace s;
  struct Loc {
    int deg;
    int idx;
  };
  std::map<std::tuple<int, int, int>, Loc> loc; // (gdeg, gidx, which)
  for (int p : g.cx.space.degrees())
    for (int i = 0; i < static_cast<int>(g.cx.space.dim(p)); ++i) {
      const std::string& l = g.cx.space.comps.at(p)[i];
      loc[{p, i, 0}] = {p, static_cast<int>(s.dim(p))};
      s.comps[p].push_back(l + "*1");
      loc[{p, i, 1}] = {p, static_cast<int>(s.dim(p))};
      s.comps[p].push_back(l + "*t");
      loc[{p, i, 2}] = {p + 1, static_cast<int>(s.dim(p + 1))};
      s.comps[p + 1].push_back(l + "*dt");
    }
  ChainMap d = ChainMap::zero(s, s, 1);
  {
    std::map<int, QMat> blocks;
    auto ensure = [&](int p) -> QMat& {
      auto it = blocks.find(p);
      if (it == blocks.end())
        it = blocks.emplace(p, QMat(s.dim(p + 1), s.dim(p))).first;
      return it->second;
    };
    for (const auto& [key, lc] : loc) {
      auto [p, i, which] = key;
      // d(x*w) = dx*w ± x*dw
      QMat db = g.cx.d.block(p);
      for (std::size_t r = 0; r < db.rows(); ++r) {
        if (db.at(r, i) == 0) continue;
        Loc t = loc.at({p + 1, static_cast<int>(r), which});
        ensure(lc.deg).at(t.idx, lc.idx) += db.at(r, i);
      }
      if (which == 1) {
        // x*t -> (-1)^p x*dt
        Loc t = loc.at({p, i, 2});
        ensure(lc.deg).at(t.idx, lc.idx) += Rat(shift_sign(p));
      }
    }
    for (auto& [p, m] : blocks)
      if (!m.is_zero()) d.blocks[p] = std::move(m);
  }
  Complex cx = make_complex(s, d);
  auto tc = tensor(cx, cx);
  ChainMap br = ChainMap::zero(tc.cx.space, s, 0);
  std::map<int, QMat> blocks;
  auto ensure = [&](int n) -> QMat& {
    auto it = blocks.find(n);
    if (it == blocks.end())
      it = blocks.emplace(n, QMat(s.dim(n), tc.basis.dim(n))).first;
    return it->second;
  };
  // invert loc: flat index -> (gen, which)
  std::map<std::pair<int, int>, std::tuple<int, int, int>> unloc;
  for (const auto& [key, lc] : loc) unloc[{lc.deg, lc.idx}] = key;
  for (const auto& [n, terms] : tc.basis.terms) {
    for (std::size_t col = 0; col < terms.size(); ++col) {
      auto [p, i, q, j] = terms[col];
      auto [gp, gi, wa] = unloc.at({p, i});
      auto [gq, gj, wb] = unloc.at({q, j});
      // products in Λ: 1*1=1, 1*t=t, t*t=0, anything with dt except 1*dt=0
      int wprod;
      if (wa == 0)
        wprod = wb;
      else if (wb == 0)
        wprod = wa;
      else
        continue; // t*t = t*dt = dt*dt = 0
      // Koszul: a passes y: (-1)^{|a||y|}, |a| = wa==2 ? 1 : 0
      int sign = (wa == 2 && (gq & 1)) ? -1 : 1;
      GradedVec bx = GradedVec::basis(g.cx.space, gp, gi);
      GradedVec by = GradedVec::basis(g.cx.space, gq, gj);
      GradedVec b = g.bracket_of(bx, by);
      auto it = b.c.find(gp + gq);
      if (it == b.c.end()) continue;
      for (std::size_t r = 0; r < it->second.size(); ++r) {
        if (it->second[r] == 0) continue;
        Loc t = loc.at({gp + gq, static_cast<int>(r), wprod});
        ensure(n).at(t.idx, col) += Rat(sign) * it->second[r];
      }
    }
  }
  for (auto& [n, m] : blocks)
    if (!m.is_zero()) br.blocks[n] = std::move(m);
  return make_dg_lie(cx, br);
}

} // namespace

DgLieAlgebra sl2() {
  auto b = sl2_block("");
  return make_dg_lie(b.cx, b.br);
}

DgLieAlgebra heisenberg3() {
  GradedSpace s;
  s.comps[0] = {"x", "y", "z"};
  Complex cx = make_complex(s, ChainMap::zero(s, s, 1));
  return make_dg_lie(cx, {{{0, 0}, {0, 1}, {0, 2}, 1}});
}

DgLieAlgebra abelian_lie(std::initializer_list<std::pair<int, int>> dims) {
  GradedSpace s = space_of(dims, "a");
  Complex cx = make_complex(s, ChainMap::zero(s, s, 1));
  return make_dg_lie(cx, std::vector<BracketTriple>{});
}

DgLieAlgebra heisenberg_graded(int a, int b) {
  auto blk = heis_block(a, b, "");
  return make_dg_lie(blk.cx, blk.br);
}

void broken_sl2() {
  GradedSpace s;
  s.comps[0] = {"e", "f", "h"};
  Complex cx = make_complex(s, ChainMap::zero(s, s, 1));
  Gen e{0, 0}, f{0, 1}, h{0, 2};
  make_dg_lie(cx, {{e, f, h, 1}, {e, h, e, -1}, {f, h, f, 2}});
}

DgLieAlgebra seeded_dg_lie(std::uint64_t seed) {
  std::mt19937_64 rng(seed * 2654435761u + 17);
  std::uniform_int_distribution<int> pick(0, 4);
  std::uniform_int_distribution<int> degs(-2, 1);
  std::uniform_int_distribution<int> coin(0, 1);
  std::vector<Block> blocks;
  int nblocks = 1 + static_cast<int>(rng() % 2);
  for (int b = 0; b < nblocks; ++b) {
    std::string pre = "b" + std::to_string(b) + ".";
    switch (pick(rng)) {
      case 0:
        blocks.push_back(sl2_block(pre));
        break;
      case 1: {
        int a = degs(rng), c = degs(rng);
        if (a + c > 2 || a + c < -2) {
          a = 0;
          c = 0;
        }
        blocks.push_back(heis_block(a, c, pre));
        break;
      }
      case 2:
        blocks.push_back(acyclic_block(degs(rng), pre));
        break;
      case 3:
        blocks.push_back(zero_block(degs(rng), 1 + (rng() % 2), pre));
        break;
      default: {
        blocks.push_back(heis_block(0, 0, pre));
        break;
      }
    }
  }
  if (coin(rng)) blocks.push_back(acyclic_block(degs(rng), "c."));
  DgLieAlgebra g = direct_sum(blocks);
  int maxdeg = -kDegreeWindow;
  for (int p : g.cx.space.degrees()) maxdeg = std::max(maxdeg, p);
  if (g.dim() <= 3 && maxdeg <= 1 && coin(rng)) g = tensor_interval(g);
  return g;
}

SeededNilpotent seeded_nilpotent(std::uint64_t seed) {
  std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ull + 3);
  std::uniform_int_distribution<int> coin(0, 1);
  std::vector<Block> blocks;
  // x in deg 1, y in deg 0, z in deg 1: alpha = x is MC, twist is nonzero
  blocks.push_back(heis_block(1, 0, "n."));
  if (coin(rng)) blocks.push_back(zero_block(1, 1, "w."));
  if (coin(rng)) blocks.push_back(acyclic_block(coin(rng) ? -1 : 0, "k."));
  SeededNilpotent out{direct_sum(blocks), {}};
  // alpha = x (+ optionally the extra degree-1 abelian generator)
  GradedVec a = GradedVec::basis(out.g.cx.space, 1, 0);
  if (!check_mc(out.g, a)) fail(Err::NotMaurerCartan, "seeded mc");
  out.mc = a;
  return out;
}

ArtinLocalAlgebra seeded_artin(std::uint64_t seed) {
  switch (seed % 4) {
    case 0: return dual_numbers(2);
    case 1: return dual_numbers(3);
    case 2: return truncated_polynomial(2, 1);
    default: return truncated_polynomial(2, 2);
  }
}

} // namespace ranjac
