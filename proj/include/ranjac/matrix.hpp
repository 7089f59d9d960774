#ifndef RANJAC_MATRIX_HPP
#define RANJAC_MATRIX_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ranjac/rational.hpp"

namespace ranjac {

// Dense matrix over Q, row major. The elimination and multiplication kernels
// are OpenMP-parallel over rows; every entry is produced by exactly one
// thread with a fixed sequential inner loop, so results are bit-identical
// for any thread count. Serial reference implementations live in
// ranjac::refimpl and are compared against the parallel kernels in the test
// and benchmark suites.
class QMat {
public:
  QMat() : rows_(0), cols_(0) {}
  QMat(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols) {}

  static QMat identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Rat& at(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const Rat& at(std::size_t i, std::size_t j) const {
    return a_[i * cols_ + j];
  }

  bool is_zero() const;
  bool operator==(const QMat& o) const;
  bool operator!=(const QMat& o) const { return !(*this == o); }

  QMat operator+(const QMat& o) const;
  QMat operator-(const QMat& o) const;
  QMat operator-() const;
  QMat operator*(const QMat& o) const; // OpenMP kernel
  QMat operator*(const Rat& c) const;

  QMat transpose() const;
  QMat hstack(const QMat& o) const;
  QMat vstack(const QMat& o) const;
  QMat cols_subset(const std::vector<std::size_t>& idx) const;
  QMat rows_subset(const std::vector<std::size_t>& idx) const;

  std::vector<Rat> apply(const std::vector<Rat>& v) const;

  // In-place reduced row echelon form; returns pivot column indices in
  // order. Deterministic: pivot = first row with a nonzero entry.
  std::vector<std::size_t> rref_inplace();

  // Rank by fraction-free Bareiss elimination on a denominator-cleared
  // integer copy.
  std::size_t rank() const;

  // Basis of the null space, one column per kernel vector.
  QMat kernel() const;

  // Particular solution of A x = b for every column b of B, or nullopt if
  // any column is inconsistent.
  std::optional<QMat> solve(const QMat& B) const;

  std::string to_string() const;

private:
  std::size_t rows_, cols_;
  std::vector<Rat> a_;
};

// Column-span helpers (all exact).
bool in_span(const QMat& span, const QMat& vecs);
bool span_equal(const QMat& a, const QMat& b);
// Columns of `add` that enlarge span(base), appended to a copy of base.
QMat span_extend(const QMat& base, const QMat& add,
                 std::vector<std::size_t>* chosen = nullptr);

// Incremental column-span tracker: keeps an eliminated basis so repeated
// membership tests and insertions cost O(rank * dim) each.
class SpanBuilder {
public:
  explicit SpanBuilder(std::size_t dim) : dim_(dim) {}
  bool add(std::vector<Rat> v); // returns false when dependent
  bool add(const QMat& col);
  bool contains(std::vector<Rat> v) const;
  bool contains(const QMat& col) const;
  std::size_t rank() const { return rows_.size(); }

private:
  void reduce(std::vector<Rat>& v) const;
  std::size_t dim_;
  std::vector<std::pair<std::size_t, std::vector<Rat>>> rows_;
};

namespace refimpl {
// Plain serial kernels kept as oracles for the OpenMP ones.
QMat mul(const QMat& a, const QMat& b);
std::size_t rank(QMat m); // rational Gauss elimination, no Bareiss
} // namespace refimpl

} // namespace ranjac

#endif
