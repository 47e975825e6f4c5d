#include "mheat/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mheat/error.hpp"

namespace mheat {

SparseMatrix::SparseMatrix(int rows, int cols, const std::vector<Triplet>& triplets)
    : rows_(rows), cols_(cols) {
  if (rows < 0 || cols < 0) throw operator_error("negative matrix dimension");
  std::vector<int> count(rows + 1, 0);
  for (const Triplet& t : triplets) {
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
      throw operator_error("triplet index out of range");
    }
    ++count[t.row + 1];
  }
  std::partial_sum(count.begin(), count.end(), count.begin());
  std::vector<int> cols_tmp(triplets.size());
  std::vector<double> vals_tmp(triplets.size());
  std::vector<int> fill(count.begin(), count.end() - 1);
  for (const Triplet& t : triplets) {
    const int pos = fill[t.row]++;
    cols_tmp[pos] = t.col;
    vals_tmp[pos] = t.value;
  }

  row_ptr_.assign(rows + 1, 0);
  col_index_.reserve(triplets.size());
  values_.reserve(triplets.size());
  std::vector<int> order;
  for (int r = 0; r < rows; ++r) {
    order.resize(count[r + 1] - count[r]);
    std::iota(order.begin(), order.end(), count[r]);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return cols_tmp[a] < cols_tmp[b]; });
    int last = -1;
    for (int p : order) {
      if (cols_tmp[p] == last) {
        values_.back() += vals_tmp[p];
      } else {
        col_index_.push_back(cols_tmp[p]);
        values_.push_back(vals_tmp[p]);
        last = cols_tmp[p];
      }
    }
    row_ptr_[r + 1] = static_cast<int>(values_.size());
  }
}

SparseMatrix SparseMatrix::identity(int n) { return diagonal_matrix(Vector(n, 1.0)); }

SparseMatrix SparseMatrix::diagonal_matrix(const Vector& d) {
  std::vector<Triplet> t;
  t.reserve(d.size());
  for (int i = 0; i < static_cast<int>(d.size()); ++i) t.push_back({i, i, d[i]});
  const int n = static_cast<int>(d.size());
  return SparseMatrix(n, n, t);
}

double SparseMatrix::coeff(int r, int c) const {
  auto begin = col_index_.begin() + row_ptr_[r];
  auto end = col_index_.begin() + row_ptr_[r + 1];
  auto it = std::lower_bound(begin, end, c);
  if (it == end || *it != c) return 0.0;
  return values_[it - col_index_.begin()];
}

void SparseMatrix::apply(const Vector& x, Vector& y) const {
  if (static_cast<int>(x.size()) != cols_) throw operator_error("matrix-vector size mismatch");
  y.resize(rows_);
  for (int r = 0; r < rows_; ++r) {
    double s = 0.0;
    for (int p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) s += values_[p] * x[col_index_[p]];
    y[r] = s;
  }
}

Vector SparseMatrix::operator*(const Vector& x) const {
  Vector y;
  apply(x, y);
  return y;
}

Vector SparseMatrix::apply_transpose(const Vector& x) const {
  if (static_cast<int>(x.size()) != rows_) throw operator_error("transpose-vector size mismatch");
  Vector y(cols_, 0.0);
  for (int r = 0; r < rows_; ++r) {
    for (int p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) y[col_index_[p]] += values_[p] * x[r];
  }
  return y;
}

Vector SparseMatrix::diagonal() const {
  Vector d(std::min(rows_, cols_), 0.0);
  for (int r = 0; r < static_cast<int>(d.size()); ++r) d[r] = coeff(r, r);
  return d;
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<Triplet> t;
  t.reserve(values_.size());
  for (int r = 0; r < rows_; ++r) {
    for (int p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) t.push_back({col_index_[p], r, values_[p]});
  }
  return SparseMatrix(cols_, rows_, t);
}

SparseMatrix SparseMatrix::scaled_rows(const Vector& d) const {
  if (static_cast<int>(d.size()) != rows_) throw operator_error("row scaling size mismatch");
  SparseMatrix out = *this;
  for (int r = 0; r < rows_; ++r) {
    for (int p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) out.values_[p] *= d[r];
  }
  return out;
}

SparseMatrix SparseMatrix::scaled(double s) const {
  SparseMatrix out = *this;
  for (double& v : out.values_) v *= s;
  return out;
}

SparseMatrix SparseMatrix::submatrix(const std::vector<int>& row_ids, const std::vector<int>& col_ids) const {
  std::vector<int> col_map(cols_, -1);
  for (int j = 0; j < static_cast<int>(col_ids.size()); ++j) col_map[col_ids[j]] = j;
  std::vector<Triplet> t;
  for (int i = 0; i < static_cast<int>(row_ids.size()); ++i) {
    const int r = row_ids[i];
    for (int p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) {
      const int c = col_map[col_index_[p]];
      if (c >= 0) t.push_back({i, c, values_[p]});
    }
  }
  return SparseMatrix(static_cast<int>(row_ids.size()), static_cast<int>(col_ids.size()), t);
}

std::vector<Triplet> SparseMatrix::triplets() const {
  std::vector<Triplet> t;
  t.reserve(values_.size());
  for (int r = 0; r < rows_; ++r) {
    for (int p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p) t.push_back({r, col_index_[p], values_[p]});
  }
  return t;
}

SparseMatrix operator*(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.cols_ != b.rows_) throw operator_error("matrix product dimension mismatch");
  SparseMatrix out;
  out.rows_ = a.rows_;
  out.cols_ = b.cols_;
  out.row_ptr_.assign(a.rows_ + 1, 0);
  // Gustavson's row-by-row product with a dense accumulator.
  std::vector<double> acc(b.cols_, 0.0);
  std::vector<int> marker(b.cols_, -1);
  std::vector<int> touched;
  for (int r = 0; r < a.rows_; ++r) {
    touched.clear();
    for (int p = a.row_ptr_[r]; p < a.row_ptr_[r + 1]; ++p) {
      const int k = a.col_index_[p];
      const double av = a.values_[p];
      for (int q = b.row_ptr_[k]; q < b.row_ptr_[k + 1]; ++q) {
        const int c = b.col_index_[q];
        if (marker[c] != r) {
          marker[c] = r;
          acc[c] = 0.0;
          touched.push_back(c);
        }
        acc[c] += av * b.values_[q];
      }
    }
    std::sort(touched.begin(), touched.end());
    for (int c : touched) {
      out.col_index_.push_back(c);
      out.values_.push_back(acc[c]);
    }
    out.row_ptr_[r + 1] = static_cast<int>(out.values_.size());
  }
  return out;
}

SparseMatrix operator+(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw operator_error("matrix sum dimension mismatch");
  std::vector<Triplet> t = a.triplets();
  std::vector<Triplet> tb = b.triplets();
  t.insert(t.end(), tb.begin(), tb.end());
  return SparseMatrix(a.rows_, a.cols_, t);
}

SparseMatrix operator-(const SparseMatrix& a, const SparseMatrix& b) { return a + b.scaled(-1.0); }

SparseMatrix weighted_gram(const SparseMatrix& a, const Vector& w) {
  return a.transpose() * a.scaled_rows(w);
}

double dot(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double l2_norm(const Vector& a) { return std::sqrt(dot(a, a)); }

void axpy(double alpha, const Vector& x, Vector& y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

}  // namespace mheat
