#ifndef RANJAC_GRADED_HPP
#define RANJAC_GRADED_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ranjac/matrix.hpp"

namespace ranjac {

// Finitely supported Z-graded Q-vector space with labelled bases.
struct GradedSpace {
  std::map<int, std::vector<std::string>> comps; // degree -> labels

  std::size_t dim(int p) const {
    auto it = comps.find(p);
    return it == comps.end() ? 0 : it->second.size();
  }
  std::size_t total_dim() const;
  std::vector<int> degrees() const;
  bool same_dims(const GradedSpace& o) const;
  void validate() const; // unique labels, degree window
};

GradedSpace shift_space(const GradedSpace& s, int n);

// Element of a graded space, stored per degree.
struct GradedVec {
  std::map<int, std::vector<Rat>> c;

  static GradedVec basis(const GradedSpace& s, int deg, std::size_t i);
  bool is_zero() const;
  GradedVec operator+(const GradedVec& o) const;
  GradedVec operator*(const Rat& k) const;
  // zero components are dropped so equality is structural
  void prune();
  bool operator==(const GradedVec& o) const;
  // the unique degree of a homogeneous element; throws if mixed
  int degree() const;
};

// Degree-homogeneous linear map between graded spaces; absent blocks are 0.
struct ChainMap {
  GradedSpace src, tgt;
  int degree = 0;
  std::map<int, QMat> blocks; // blocks[p] : src^p -> tgt^{p+degree}

  static ChainMap zero(const GradedSpace& src, const GradedSpace& tgt,
                       int degree);
  static ChainMap identity(const GradedSpace& s);

  QMat block(int p) const; // materializes zeros with correct shape
  void set_block(int p, QMat m);
  void validate_shapes() const;

  ChainMap compose(const ChainMap& inner) const; // this ∘ inner
  ChainMap operator+(const ChainMap& o) const;
  ChainMap operator-(const ChainMap& o) const;
  ChainMap operator*(const Rat& k) const;
  bool is_zero() const;
  bool equal_blocks(const ChainMap& o) const;

  GradedVec apply(const GradedVec& v) const;
};

struct Complex {
  GradedSpace space;
  ChainMap d; // degree +1 endomorphism

  std::size_t dim(int p) const { return space.dim(p); }
};

// Validates shapes and d^2 = 0; reports the first offending degree.
Complex make_complex(const GradedSpace& space, const ChainMap& d);

// True chain map test: f d_src = ±d_tgt f per the degree of f.
bool is_chain_map(const ChainMap& f, const Complex& src, const Complex& tgt);

struct CohomDeg {
  std::size_t dim = 0;
  QMat reps; // cocycle representatives, one column per class
};

std::map<int, CohomDeg> cohomology(const Complex& C);
std::map<int, std::size_t> cohomology_dims(const Complex& C);

Complex shift(const Complex& C, int n);

// --- tensor product -------------------------------------------------------

struct Tensor2 {
  GradedSpace A, B;
  // per total degree: tuples (p, i, q, j) with p+q = degree
  std::map<int, std::vector<std::array<int, 4>>> terms;

  std::size_t dim(int n) const;
  // position of (p,i,q,j) within degree n, or npos
  std::size_t pos(int n, int p, int i, int q, int j) const;
  GradedSpace space() const; // labelled basis "a|b"
};

struct TensorComplex {
  Complex cx;
  Tensor2 basis;
};

TensorComplex tensor(const Complex& C, const Complex& D);
// Koszul swap s_{C,D} : C⊗D -> D⊗C
ChainMap tensor_swap(const Complex& C, const Complex& D);
// f⊗g with the Koszul sign (-1)^{|g||x|}
ChainMap tensor_map(const ChainMap& f, const ChainMap& g, const Tensor2& srcb,
                    const Tensor2& tgtb);

// --- symmetric and exterior powers ----------------------------------------

struct Gen {
  int deg;
  int idx;
  auto operator<=>(const Gen&) const = default;
};
using Word = std::vector<Gen>;

enum class WordKind { Sym, Wedge };

// Sorts a word into canonical order collecting Koszul signs; nullopt if the
// class is zero (odd square in Sym, even square in Wedge).
std::optional<std::pair<int, Word>> word_normalize(Word w, WordKind kind);

struct PowerComplex {
  Complex cx;
  WordKind kind;
  std::vector<Word> words;                       // global word list
  std::map<Word, std::size_t> id_of;             // canonical word -> id
  std::map<int, std::vector<std::size_t>> by_deg; // degree -> ids, basis order
  std::map<std::size_t, std::pair<int, std::size_t>> loc; // id -> (deg, pos)

  int word_degree(const Word& w) const;
};

PowerComplex sym_power(const Complex& C, int n);
PowerComplex ext_power(const Complex& C, int n);

struct Decalage {
  PowerComplex sym;      // Sym^n(C[1])
  PowerComplex wedge;    // Λ^n(C), unshifted
  Complex wedge_shifted; // Λ^n(C)[n]
  ChainMap iso;          // Sym^n(C[1]) -> Λ^n(C)[n], degree 0
};

Decalage decalage(const Complex& C, int n);

// --- cones and filtrations -------------------------------------------------

// Cone of a degree-0 chain map: degree-n part src^{n+1} ⊕ tgt^n,
// d(x,y) = (-dx, f(x)+dy).
Complex cone(const ChainMap& f, const Complex& src, const Complex& tgt);

struct FilteredComplex {
  Complex cx;
  int n0 = 0;                                 // index of the first step
  std::vector<std::map<int, QMat>> steps;     // column spans per degree

  std::map<int, QMat> step(std::size_t i) const;
  void validate() const; // nested, d-stable, exhaustive
};

struct FilteredMap {
  ChainMap f;
  // src/tgt filtered complexes supplied at call sites
};

// Subquotient span(B)/span(A) of a complex, with chosen representatives.
struct Subquot {
  Complex cx;
  std::map<int, QMat> chosen; // representative columns in ambient coords
  std::map<int, QMat> sub;    // span(A)
};

Subquot subquotient(const Complex& ambient, const std::map<int, QMat>& A,
                    const std::map<int, QMat>& B);

bool quasi_iso(const ChainMap& f, const Complex& src, const Complex& tgt);

bool filtered_quasi_iso(const ChainMap& f, const FilteredComplex& src,
                        const FilteredComplex& tgt);

} // namespace ranjac

#endif
