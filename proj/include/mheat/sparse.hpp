#pragma once

#include <cstddef>
#include <vector>

namespace mheat {

using Vector = std::vector<double>;

struct Triplet {
  int row;
  int col;
  double value;
};

// Compressed sparse row matrix. Column indices are sorted within each row and
// unique; duplicates in the input triplets are summed.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(int rows, int cols, const std::vector<Triplet>& triplets);

  static SparseMatrix identity(int n);
  static SparseMatrix diagonal_matrix(const Vector& d);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t nonzeros() const { return values_.size(); }

  const std::vector<int>& row_ptr() const { return row_ptr_; }
  const std::vector<int>& col_index() const { return col_index_; }
  const std::vector<double>& values() const { return values_; }

  double coeff(int r, int c) const;

  void apply(const Vector& x, Vector& y) const;
  Vector operator*(const Vector& x) const;
  // y = Aᵀx without forming the transpose.
  Vector apply_transpose(const Vector& x) const;
  Vector diagonal() const;

  SparseMatrix transpose() const;
  SparseMatrix scaled_rows(const Vector& d) const;  // diag(d) A
  SparseMatrix scaled(double s) const;

  // Rows/columns selected by index lists (new index -> old index).
  SparseMatrix submatrix(const std::vector<int>& row_ids, const std::vector<int>& col_ids) const;

  std::vector<Triplet> triplets() const;

  friend SparseMatrix operator*(const SparseMatrix& a, const SparseMatrix& b);
  friend SparseMatrix operator+(const SparseMatrix& a, const SparseMatrix& b);
  friend SparseMatrix operator-(const SparseMatrix& a, const SparseMatrix& b);

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<int> row_ptr_{0};
  std::vector<int> col_index_;
  std::vector<double> values_;
};

// Aᵀ diag(w) A.
SparseMatrix weighted_gram(const SparseMatrix& a, const Vector& w);

// Dense-vector helpers shared across modules.
double dot(const Vector& a, const Vector& b);
double l2_norm(const Vector& a);
void axpy(double alpha, const Vector& x, Vector& y);

}  // namespace mheat
