#include "ranjac/matrix.hpp"

#include <algorithm>
#include <sstream>

#include "ranjac/error.hpp"

namespace ranjac {

QMat QMat::identity(std::size_t n) {
  QMat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

bool QMat::is_zero() const {
  for (const auto& x : a_)
    if (x != 0) return false;
  return true;
}

bool QMat::operator==(const QMat& o) const {
  return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
}

QMat QMat::operator+(const QMat& o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_)
    fail(Err::ShapeMismatch, "matrix add");
  QMat r(rows_, cols_);
  for (std::size_t k = 0; k < a_.size(); ++k) r.a_[k] = a_[k] + o.a_[k];
  return r;
}

QMat QMat::operator-(const QMat& o) const { return *this + (-o); }

QMat QMat::operator-() const {
  QMat r(rows_, cols_);
  for (std::size_t k = 0; k < a_.size(); ++k) r.a_[k] = -a_[k];
  return r;
}

QMat QMat::operator*(const QMat& o) const {
  if (cols_ != o.rows_) fail(Err::ShapeMismatch, "matrix mul");
  QMat r(rows_, o.cols_);
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(rows_);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < cols_; ++k) {
      const Rat& aik = at(static_cast<std::size_t>(i), k);
      if (aik == 0) continue;
      for (std::size_t j = 0; j < o.cols_; ++j) {
        const Rat& bkj = o.at(k, j);
        if (bkj != 0) r.at(static_cast<std::size_t>(i), j) += aik * bkj;
      }
    }
  }
  return r;
}

QMat QMat::operator*(const Rat& c) const {
  QMat r(rows_, cols_);
  for (std::size_t k = 0; k < a_.size(); ++k) r.a_[k] = a_[k] * c;
  return r;
}

QMat QMat::transpose() const {
  QMat r(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
  return r;
}

QMat QMat::hstack(const QMat& o) const {
  if (rows_ != o.rows_) fail(Err::ShapeMismatch, "hstack");
  QMat r(rows_, cols_ + o.cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) r.at(i, j) = at(i, j);
    for (std::size_t j = 0; j < o.cols_; ++j) r.at(i, cols_ + j) = o.at(i, j);
  }
  return r;
}

QMat QMat::vstack(const QMat& o) const {
  if (cols_ != o.cols_) fail(Err::ShapeMismatch, "vstack");
  QMat r(rows_ + o.rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r.at(i, j) = at(i, j);
  for (std::size_t i = 0; i < o.rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r.at(rows_ + i, j) = o.at(i, j);
  return r;
}

QMat QMat::cols_subset(const std::vector<std::size_t>& idx) const {
  QMat r(rows_, idx.size());
  for (std::size_t j = 0; j < idx.size(); ++j)
    for (std::size_t i = 0; i < rows_; ++i) r.at(i, j) = at(i, idx[j]);
  return r;
}

QMat QMat::rows_subset(const std::vector<std::size_t>& idx) const {
  QMat r(idx.size(), cols_);
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < cols_; ++j) r.at(i, j) = at(idx[i], j);
  return r;
}

std::vector<Rat> QMat::apply(const std::vector<Rat>& v) const {
  if (v.size() != cols_) fail(Err::ShapeMismatch, "matrix apply");
  std::vector<Rat> r(rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      if (at(i, j) != 0 && v[j] != 0) r[i] += at(i, j) * v[j];
  return r;
}

std::vector<std::size_t> QMat::rref_inplace() {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols_ && row < rows_; ++col) {
    std::size_t piv = rows_;
    for (std::size_t i = row; i < rows_; ++i) {
      if (at(i, col) != 0) {
        piv = i;
        break;
      }
    }
    if (piv == rows_) continue;
    if (piv != row)
      for (std::size_t j = 0; j < cols_; ++j) std::swap(at(piv, j), at(row, j));
    Rat inv = 1 / at(row, col);
    for (std::size_t j = col; j < cols_; ++j) at(row, j) *= inv;
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(rows_);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const std::size_t ii = static_cast<std::size_t>(i);
      if (ii == row) continue;
      const Rat f = at(ii, col);
      if (f == 0) continue;
      for (std::size_t j = col; j < cols_; ++j)
        if (at(row, j) != 0) at(ii, j) -= f * at(row, j);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

std::size_t QMat::rank() const {
  // Clear denominators row by row (rank is unchanged), then run Bareiss.
  std::vector<Int> m(rows_ * cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    Int l = 1;
    for (std::size_t j = 0; j < cols_; ++j)
      l = lcm(l, at(i, j).get_den());
    for (std::size_t j = 0; j < cols_; ++j) {
      Rat scaled = at(i, j) * Rat(l);
      m[i * cols_ + j] = scaled.get_num();
    }
  }
  auto e = [&](std::size_t i, std::size_t j) -> Int& {
    return m[i * cols_ + j];
  };
  std::size_t row = 0;
  Int prev = 1;
  for (std::size_t col = 0; col < cols_ && row < rows_; ++col) {
    std::size_t piv = rows_;
    for (std::size_t i = row; i < rows_; ++i)
      if (e(i, col) != 0) {
        piv = i;
        break;
      }
    if (piv == rows_) continue;
    if (piv != row)
      for (std::size_t j = 0; j < cols_; ++j) std::swap(e(piv, j), e(row, j));
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(rows_);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const std::size_t ii = static_cast<std::size_t>(i);
      if (ii <= row) continue;
      for (std::size_t j = col + 1; j < cols_; ++j) {
        Int t = e(row, col) * e(ii, j) - e(ii, col) * e(row, j);
        mpz_divexact(e(ii, j).get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
      }
      e(ii, col) = 0;
    }
    prev = e(row, col);
    ++row;
  }
  return row;
}

QMat QMat::kernel() const {
  QMat m = *this;
  std::vector<std::size_t> pivots = m.rref_inplace();
  std::vector<bool> is_pivot(cols_, false);
  for (std::size_t p : pivots) is_pivot[p] = true;
  std::vector<std::size_t> free_cols;
  for (std::size_t j = 0; j < cols_; ++j)
    if (!is_pivot[j]) free_cols.push_back(j);
  QMat k(cols_, free_cols.size());
  for (std::size_t f = 0; f < free_cols.size(); ++f) {
    std::size_t fc = free_cols[f];
    k.at(fc, f) = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r)
      k.at(pivots[r], f) = -m.at(r, fc);
  }
  return k;
}

std::optional<QMat> QMat::solve(const QMat& B) const {
  if (B.rows() != rows_) fail(Err::ShapeMismatch, "solve");
  QMat aug = hstack(B);
  std::vector<std::size_t> pivots = aug.rref_inplace();
  for (std::size_t p : pivots)
    if (p >= cols_) return std::nullopt; // pivot in the RHS block
  QMat x(cols_, B.cols());
  for (std::size_t r = 0; r < pivots.size(); ++r)
    for (std::size_t j = 0; j < B.cols(); ++j)
      x.at(pivots[r], j) = aug.at(r, cols_ + j);
  return x;
}

std::string QMat::to_string() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) {
      if (j) os << ' ';
      os << rat_str(at(i, j));
    }
    os << '\n';
  }
  return os.str();
}

bool in_span(const QMat& span, const QMat& vecs) {
  if (vecs.cols() == 0) return true;
  if (span.cols() == 0) return vecs.is_zero();
  return span.rank() == span.hstack(vecs).rank();
}

bool span_equal(const QMat& a, const QMat& b) {
  return in_span(a, b) && in_span(b, a);
}

QMat span_extend(const QMat& base, const QMat& add,
                 std::vector<std::size_t>* chosen) {
  QMat aug = base.cols() ? base.hstack(add) : add;
  QMat work = aug;
  std::vector<std::size_t> pivots = work.rref_inplace();
  QMat out = base;
  if (chosen) chosen->clear();
  for (std::size_t p : pivots) {
    if (p >= base.cols()) {
      std::vector<std::size_t> one{p};
      out = out.cols() ? out.hstack(aug.cols_subset(one))
                       : aug.cols_subset(one);
      if (chosen) chosen->push_back(p - base.cols());
    }
  }
  return out;
}

void SpanBuilder::reduce(std::vector<Rat>& v) const {
  for (const auto& [p, row] : rows_) {
    if (v[p] == 0) continue;
    Rat f = v[p];
    for (std::size_t j = p; j < dim_; ++j)
      if (row[j] != 0) v[j] -= f * row[j];
  }
}

bool SpanBuilder::add(std::vector<Rat> v) {
  if (v.size() != dim_) fail(Err::ShapeMismatch, "span builder");
  reduce(v);
  std::size_t p = dim_;
  for (std::size_t j = 0; j < dim_; ++j)
    if (v[j] != 0) {
      p = j;
      break;
    }
  if (p == dim_) return false;
  Rat inv = 1 / v[p];
  for (std::size_t j = p; j < dim_; ++j) v[j] *= inv;
  rows_.emplace_back(p, std::move(v));
  std::sort(rows_.begin(), rows_.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return true;
}

bool SpanBuilder::add(const QMat& col) {
  std::vector<Rat> v(dim_);
  for (std::size_t i = 0; i < dim_; ++i) v[i] = col.at(i, 0);
  return add(std::move(v));
}

bool SpanBuilder::contains(std::vector<Rat> v) const {
  reduce(v);
  for (const auto& x : v)
    if (x != 0) return false;
  return true;
}

bool SpanBuilder::contains(const QMat& col) const {
  std::vector<Rat> v(dim_);
  for (std::size_t i = 0; i < dim_; ++i) v[i] = col.at(i, 0);
  return contains(std::move(v));
}

namespace refimpl {

QMat mul(const QMat& a, const QMat& b) {
  if (a.cols() != b.rows()) fail(Err::ShapeMismatch, "refimpl mul");
  QMat r(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j)
      for (std::size_t k = 0; k < a.cols(); ++k)
        r.at(i, j) += a.at(i, k) * b.at(k, j);
  return r;
}

std::size_t rank(QMat m) {
  std::size_t row = 0;
  for (std::size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
    std::size_t piv = m.rows();
    for (std::size_t i = row; i < m.rows(); ++i)
      if (m.at(i, col) != 0) {
        piv = i;
        break;
      }
    if (piv == m.rows()) continue;
    for (std::size_t j = 0; j < m.cols(); ++j)
      std::swap(m.at(piv, j), m.at(row, j));
    for (std::size_t i = row + 1; i < m.rows(); ++i) {
      if (m.at(i, col) == 0) continue;
      Rat f = m.at(i, col) / m.at(row, col);
      for (std::size_t j = col; j < m.cols(); ++j)
        m.at(i, j) -= f * m.at(row, j);
    }
    ++row;
  }
  return row;
}

} // namespace refimpl

} // namespace ranjac
