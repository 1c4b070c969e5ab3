#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "summands/unipoly.hpp"

namespace summands {

// Dense matrix over a Field, row-major.
class Matrix {
 public:
  Matrix() = default;
  Matrix(FieldPtr f, size_t rows, size_t cols) : field_(std::move(f)), r_(rows), c_(cols), data_(rows * cols) {}
  static Matrix identity(FieldPtr f, size_t n);

  size_t rows() const { return r_; }
  size_t cols() const { return c_; }
  const FieldPtr& field() const { return field_; }
  Scalar& operator()(size_t i, size_t j) { return data_[i * c_ + j]; }
  const Scalar& operator()(size_t i, size_t j) const { return data_[i * c_ + j]; }
  bool operator==(const Matrix& o) const { return r_ == o.r_ && c_ == o.c_ && data_ == o.data_; }
  bool operator!=(const Matrix& o) const { return !(*this == o); }
  bool is_zero() const;
  bool is_identity() const;

  Matrix transpose() const;
  Matrix block(size_t r0, size_t c0, size_t nr, size_t nc) const;
  Matrix column(size_t j) const { return block(0, j, r_, 1); }
  static Matrix hstack(const std::vector<Matrix>& parts, FieldPtr f, size_t rows);
  std::string format() const;

 private:
  FieldPtr field_;
  size_t r_ = 0, c_ = 0;
  std::vector<Scalar> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix scale(const Matrix& a, const Scalar& s);
Matrix embed(const Matrix& a, const FieldPtr& target);

struct Echelon {
  Matrix reduced;
  std::vector<size_t> pivots;
  size_t rank() const { return pivots.size(); }
};

// Reduced row echelon form.
Echelon rref(const Matrix& a);
size_t rank(const Matrix& a);
// Columns form a basis of the right null space.
Matrix kernel(const Matrix& a);
std::optional<Matrix> inverse(const Matrix& a);
// Some X with A X = B, if one exists.
std::optional<Matrix> solve(const Matrix& a, const Matrix& b);
// Independent columns of `a` spanning its column space (left to right greedy).
std::vector<size_t> independent_columns(const Matrix& a);

// det(t*I - A) by Berkowitz's division-free recurrence, for any commutative
// ring given as an ops object with zero/one/add/sub/mul/neg.
template <class Ring>
std::vector<typename Ring::Elem> berkowitz(const Ring& R, const std::vector<std::vector<typename Ring::Elem>>& a) {
  using E = typename Ring::Elem;
  size_t n = a.size();
  std::vector<E> c{R.one()};
  if (n == 0) return c;
  c.push_back(R.neg(a[0][0]));
  for (size_t k = 1; k < n; ++k) {
    // q = (1, -a_kk, -R S, -R A S, ..., -R A^{k-1} S) for the leading k x k block A.
    std::vector<E> q{R.one(), R.neg(a[k][k])};
    std::vector<E> v(k);
    for (size_t i = 0; i < k; ++i) v[i] = a[i][k];
    for (size_t j = 0; j < k; ++j) {
      E s = R.zero();
      for (size_t i = 0; i < k; ++i) s = R.add(s, R.mul(a[k][i], v[i]));
      q.push_back(R.neg(s));
      if (j + 1 == k) break;
      std::vector<E> w(k, R.zero());
      for (size_t i = 0; i < k; ++i)
        for (size_t l = 0; l < k; ++l) w[i] = R.add(w[i], R.mul(a[i][l], v[l]));
      v = std::move(w);
    }
    std::vector<E> next(k + 2, R.zero());
    for (size_t i = 0; i < k + 2; ++i)
      for (size_t j = 0; j <= i && j < k + 1; ++j) next[i] = R.add(next[i], R.mul(q[i - j], c[j]));
    c = std::move(next);
  }
  // c holds coefficients from t^n down to t^0.
  std::reverse(c.begin(), c.end());
  return c;
}

struct FieldOps {
  using Elem = Scalar;
  FieldPtr f;
  Elem zero() const { return {}; }
  Elem one() const { return f->one(); }
  Elem add(const Elem& a, const Elem& b) const { return f->add(a, b); }
  Elem sub(const Elem& a, const Elem& b) const { return f->sub(a, b); }
  Elem mul(const Elem& a, const Elem& b) const { return f->mul(a, b); }
  Elem neg(const Elem& a) const { return f->neg(a); }
};

UniPoly charpoly(const Matrix& a);
// Least common multiple of the Krylov minimal polynomials of the unit vectors.
UniPoly minpoly(const Matrix& a);
Matrix evaluate(const UniPoly& f, const Matrix& a);

// Sparse linear system: each row is a list of (column, value) pairs.
using SparseRow = std::vector<std::pair<uint32_t, Scalar>>;
// Basis of {x : row . x = 0 for all rows}: one sparse vector, sorted by
// column, for each free column at or beyond `first_free`. The vector for
// free column c is zero on the other free columns and beyond c.
std::vector<SparseRow> sparse_kernel(const FieldPtr& f, size_t ncols, const std::vector<SparseRow>& rows,
                                     uint32_t first_free = 0);

}  // namespace summands
