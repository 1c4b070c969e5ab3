#include "summands/linalg.hpp"

#include <algorithm>
#include <map>

namespace summands {

Matrix Matrix::identity(FieldPtr f, size_t n) {
  Matrix m(f, n, n);
  for (size_t i = 0; i < n; ++i) m(i, i) = f->one();
  return m;
}

bool Matrix::is_zero() const {
  return std::all_of(data_.begin(), data_.end(), [](const Scalar& s) { return s.is_zero(); });
}

bool Matrix::is_identity() const {
  if (r_ != c_) return false;
  for (size_t i = 0; i < r_; ++i)
    for (size_t j = 0; j < c_; ++j)
      if (i == j ? !field_->is_one((*this)(i, j)) : !(*this)(i, j).is_zero()) return false;
  return true;
}

Matrix Matrix::transpose() const {
  Matrix t(field_, c_, r_);
  for (size_t i = 0; i < r_; ++i)
    for (size_t j = 0; j < c_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix Matrix::block(size_t r0, size_t c0, size_t nr, size_t nc) const {
  Matrix b(field_, nr, nc);
  for (size_t i = 0; i < nr; ++i)
    for (size_t j = 0; j < nc; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
  return b;
}

Matrix Matrix::hstack(const std::vector<Matrix>& parts, FieldPtr f, size_t rows) {
  size_t cols = 0;
  for (auto& p : parts) cols += p.cols();
  Matrix m(std::move(f), rows, cols);
  size_t off = 0;
  for (auto& p : parts) {
    for (size_t i = 0; i < rows; ++i)
      for (size_t j = 0; j < p.cols(); ++j) m(i, off + j) = p(i, j);
    off += p.cols();
  }
  return m;
}

std::string Matrix::format() const {
  std::string s = "[";
  for (size_t i = 0; i < r_; ++i) {
    s += i ? ", [" : "[";
    for (size_t j = 0; j < c_; ++j) {
      if (j) s += ", ";
      s += field_->format((*this)(i, j));
    }
    s += "]";
  }
  return s + "]";
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) fail(ErrorCode::ShapeMismatch, "matrix product shape mismatch");
  const Field& F = *a.field();
  Matrix m(a.field(), a.rows(), b.cols());
  for (size_t i = 0; i < a.rows(); ++i)
    for (size_t k = 0; k < a.cols(); ++k) {
      const Scalar& x = a(i, k);
      if (x.is_zero()) continue;
      for (size_t j = 0; j < b.cols(); ++j)
        if (!b(k, j).is_zero()) m(i, j) = F.add(m(i, j), F.mul(x, b(k, j)));
    }
  return m;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) fail(ErrorCode::ShapeMismatch, "matrix sum shape mismatch");
  Matrix m(a.field(), a.rows(), a.cols());
  for (size_t i = 0; i < a.rows(); ++i)
    for (size_t j = 0; j < a.cols(); ++j) m(i, j) = a.field()->add(a(i, j), b(i, j));
  return m;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) fail(ErrorCode::ShapeMismatch, "matrix difference shape mismatch");
  Matrix m(a.field(), a.rows(), a.cols());
  for (size_t i = 0; i < a.rows(); ++i)
    for (size_t j = 0; j < a.cols(); ++j) m(i, j) = a.field()->sub(a(i, j), b(i, j));
  return m;
}

Matrix scale(const Matrix& a, const Scalar& s) {
  Matrix m(a.field(), a.rows(), a.cols());
  for (size_t i = 0; i < a.rows(); ++i)
    for (size_t j = 0; j < a.cols(); ++j) m(i, j) = a.field()->mul(a(i, j), s);
  return m;
}

Matrix embed(const Matrix& a, const FieldPtr& target) {
  if (a.field() == target) return a;
  Matrix m(target, a.rows(), a.cols());
  for (size_t i = 0; i < a.rows(); ++i)
    for (size_t j = 0; j < a.cols(); ++j) m(i, j) = embed(a(i, j), a.field(), target);
  return m;
}

namespace {

Echelon rref_prime(const Matrix& a) {
  const uint64_t p = a.field()->characteristic();
  size_t R = a.rows(), C = a.cols();
  std::vector<uint64_t> m(R * C);
  for (size_t i = 0; i < R; ++i)
    for (size_t j = 0; j < C; ++j) m[i * C + j] = a(i, j).raw();
  auto inv = [&](uint64_t x) {
    uint64_t r = 1, b = x, e = p - 2;
    while (e) {
      if (e & 1) r = r * b % p;
      b = b * b % p;
      e >>= 1;
    }
    return r;
  };
  Echelon out;
  size_t row = 0;
  for (size_t col = 0; col < C && row < R; ++col) {
    size_t piv = row;
    while (piv < R && m[piv * C + col] == 0) ++piv;
    if (piv == R) continue;
    if (piv != row)
      for (size_t j = 0; j < C; ++j) std::swap(m[piv * C + j], m[row * C + j]);
    uint64_t iv = inv(m[row * C + col]);
    for (size_t j = col; j < C; ++j) m[row * C + j] = m[row * C + j] * iv % p;
    for (size_t i = 0; i < R; ++i) {
      if (i == row) continue;
      uint64_t f = m[i * C + col];
      if (!f) continue;
      uint64_t nf = p - f;
      for (size_t j = col; j < C; ++j) {
        uint64_t v = m[row * C + j];
        if (v) m[i * C + j] = (m[i * C + j] + nf * v) % p;
      }
    }
    out.pivots.push_back(col);
    ++row;
  }
  out.reduced = Matrix(a.field(), R, C);
  for (size_t i = 0; i < R; ++i)
    for (size_t j = 0; j < C; ++j) out.reduced(i, j) = Scalar::from_raw(uint32_t(m[i * C + j]));
  return out;
}

}  // namespace

Echelon rref(const Matrix& a) {
  if (a.field()->kind() == FieldKind::Prime) return rref_prime(a);
  const Field& F = *a.field();
  Echelon out;
  out.reduced = a;
  Matrix& m = out.reduced;
  size_t row = 0;
  for (size_t col = 0; col < m.cols() && row < m.rows(); ++col) {
    size_t piv = row;
    while (piv < m.rows() && m(piv, col).is_zero()) ++piv;
    if (piv == m.rows()) continue;
    if (piv != row)
      for (size_t j = 0; j < m.cols(); ++j) std::swap(m(piv, j), m(row, j));
    Scalar iv = F.inv(m(row, col));
    for (size_t j = col; j < m.cols(); ++j) m(row, j) = F.mul(m(row, j), iv);
    for (size_t i = 0; i < m.rows(); ++i) {
      if (i == row || m(i, col).is_zero()) continue;
      Scalar f = m(i, col);
      for (size_t j = col; j < m.cols(); ++j)
        if (!m(row, j).is_zero()) m(i, j) = F.sub(m(i, j), F.mul(f, m(row, j)));
    }
    out.pivots.push_back(col);
    ++row;
  }
  return out;
}

size_t rank(const Matrix& a) { return rref(a).rank(); }

Matrix kernel(const Matrix& a) {
  Echelon e = rref(a);
  const Field& F = *a.field();
  std::vector<bool> is_pivot(a.cols(), false);
  for (size_t c : e.pivots) is_pivot[c] = true;
  std::vector<size_t> free;
  for (size_t c = 0; c < a.cols(); ++c)
    if (!is_pivot[c]) free.push_back(c);
  Matrix k(a.field(), a.cols(), free.size());
  for (size_t t = 0; t < free.size(); ++t) {
    k(free[t], t) = F.one();
    for (size_t r = 0; r < e.pivots.size(); ++r) k(e.pivots[r], t) = F.neg(e.reduced(r, free[t]));
  }
  return k;
}

std::optional<Matrix> solve(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) fail(ErrorCode::ShapeMismatch, "solve: row mismatch");
  Matrix aug = Matrix::hstack({a, b}, a.field(), a.rows());
  Echelon e = rref(aug);
  Matrix x(a.field(), a.cols(), b.cols());
  for (size_t r = 0; r < e.pivots.size(); ++r) {
    size_t c = e.pivots[r];
    if (c >= a.cols()) return std::nullopt;
    for (size_t j = 0; j < b.cols(); ++j) x(c, j) = e.reduced(r, a.cols() + j);
  }
  return x;
}

std::optional<Matrix> inverse(const Matrix& a) {
  if (a.rows() != a.cols()) return std::nullopt;
  if (rank(a) != a.rows()) return std::nullopt;
  return solve(a, Matrix::identity(a.field(), a.rows()));
}

std::vector<size_t> independent_columns(const Matrix& a) { return rref(a).pivots; }

UniPoly charpoly(const Matrix& a) {
  if (a.rows() != a.cols()) fail(ErrorCode::ShapeMismatch, "characteristic polynomial of a non-square matrix");
  std::vector<std::vector<Scalar>> rows(a.rows(), std::vector<Scalar>(a.cols()));
  for (size_t i = 0; i < a.rows(); ++i)
    for (size_t j = 0; j < a.cols(); ++j) rows[i][j] = a(i, j);
  return UniPoly(a.field(), berkowitz(FieldOps{a.field()}, rows));
}

UniPoly minpoly(const Matrix& a) {
  const FieldPtr& f = a.field();
  size_t n = a.rows();
  UniPoly result = UniPoly::constant(f, f->one());
  for (size_t i = 0; i < n; ++i) {
    // Krylov sequence of e_i until the first linear dependency.
    std::vector<Matrix> seq;
    Matrix v(f, n, 1);
    v(i, 0) = f->one();
    // Skip unit vectors already annihilated by the current lcm.
    if (evaluate(result, a).column(i).is_zero()) continue;
    while (true) {
      seq.push_back(v);
      Matrix k = Matrix::hstack(seq, f, n);
      if (rank(k) < seq.size()) break;
      v = a * v;
    }
    size_t d = seq.size() - 1;
    Matrix base = Matrix::hstack(std::vector<Matrix>(seq.begin(), seq.begin() + long(d)), f, n);
    auto coeffs = solve(base, seq.back());
    std::vector<Scalar> c(d + 1);
    for (size_t j = 0; j < d; ++j) c[j] = f->neg((*coeffs)(j, 0));
    c[d] = f->one();
    UniPoly mv(f, c);
    result = monic(result * mv / gcd(result, mv));
  }
  return result;
}

Matrix evaluate(const UniPoly& p, const Matrix& a) {
  Matrix r(a.field(), a.rows(), a.cols());
  for (size_t k = p.c.size(); k-- > 0;) {
    r = r * a;
    for (size_t i = 0; i < a.rows(); ++i) r(i, i) = a.field()->add(r(i, i), p.c[k]);
  }
  return r;
}

namespace {

// r - f * p for rows sorted by column.
void axpy_row(const Field& F, const SparseRow& r, const Scalar& f, const SparseRow& p, SparseRow& out) {
  out.clear();
  size_t i = 0, j = 0;
  while (i < r.size() || j < p.size()) {
    if (j == p.size() || (i < r.size() && r[i].first < p[j].first)) {
      out.push_back(r[i++]);
    } else if (i == r.size() || p[j].first < r[i].first) {
      out.push_back({p[j].first, F.neg(F.mul(f, p[j].second))});
      ++j;
    } else {
      Scalar v = F.sub(r[i].second, F.mul(f, p[j].second));
      if (!v.is_zero()) out.push_back({r[i].first, v});
      ++i;
      ++j;
    }
  }
}

}  // namespace

std::vector<SparseRow> sparse_kernel(const FieldPtr& fp, size_t ncols, const std::vector<SparseRow>& rows,
                                     uint32_t first_free) {
  const Field& F = *fp;
  // Pivot rows keyed by leading column; each stored monic in its leading entry.
  std::map<uint32_t, SparseRow> pivots;
  SparseRow tmp;
  for (const SparseRow& input : rows) {
    SparseRow r = input;
    std::sort(r.begin(), r.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    // Merge duplicate columns.
    SparseRow merged;
    for (auto& [c, v] : r) {
      if (!merged.empty() && merged.back().first == c) merged.back().second = F.add(merged.back().second, v);
      else merged.push_back({c, v});
    }
    r.clear();
    for (auto& t : merged)
      if (!t.second.is_zero()) r.push_back(t);
    while (!r.empty()) {
      auto it = pivots.find(r.front().first);
      if (it == pivots.end()) break;
      axpy_row(F, r, r.front().second, it->second, tmp);
      r.swap(tmp);
    }
    if (r.empty()) continue;
    Scalar iv = F.inv(r.front().second);
    for (auto& t : r) t.second = F.mul(t.second, iv);
    pivots.emplace(r.front().first, std::move(r));
  }
  // Reduced echelon form: clear pivot columns to the right of each lead,
  // largest lead first, so every tail holds free columns only.
  for (auto it = pivots.rbegin(); it != pivots.rend(); ++it) {
    SparseRow& r = it->second;
    for (size_t k = 1; k < r.size();) {
      auto p = pivots.find(r[k].first);
      if (p == pivots.end()) {
        ++k;
        continue;
      }
      SparseRow head(r.begin(), r.begin() + long(k));
      SparseRow rest(r.begin() + long(k), r.end());
      axpy_row(F, rest, rest.front().second, p->second, tmp);
      head.insert(head.end(), tmp.begin(), tmp.end());
      r.swap(head);
    }
  }
  std::map<uint32_t, size_t> slot;
  std::vector<SparseRow> basis;
  for (uint32_t c = first_free; c < ncols; ++c)
    if (!pivots.count(c)) {
      slot[c] = basis.size();
      basis.push_back({});
    }
  for (auto& [lead, r] : pivots)
    for (size_t k = 1; k < r.size(); ++k) {
      auto s = slot.find(r[k].first);
      if (s != slot.end()) basis[s->second].push_back({lead, F.neg(r[k].second)});
    }
  for (auto& [c, s] : slot) basis[s].push_back({c, F.one()});
  return basis;
}

}  // namespace summands
