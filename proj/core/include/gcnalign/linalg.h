#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace gcnalign {

// Row-major dense matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {}
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return values_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return values_[r * cols_ + c];
  }

  std::span<double> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {values_.data() + r * cols_, cols_};
  }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  bool all_finite() const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

struct CooEntry {
  std::int64_t row = 0;
  std::int64_t col = 0;
  double value = 0.0;
};

// Compressed sparse row matrix in canonical form: column indices strictly
// increasing inside each row, duplicate coordinates merged by summation.
class SparseMatrix {
 public:
  SparseMatrix() = default;

  // Any order, duplicates allowed; out-of-range coordinates throw.
  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                    std::span<const CooEntry> entries);
  static SparseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nonzeros() const { return values_.size(); }

  std::span<const std::int64_t> row_offsets() const { return row_offsets_; }
  std::span<const std::int64_t> col_indices() const { return col_indices_; }
  std::span<const double> values() const { return values_; }

  // Entry lookup by binary search within the row; 0 when absent.
  double at(std::size_t r, std::size_t c) const;

  SparseMatrix transpose() const;
  DenseMatrix to_dense() const;
  std::vector<double> row_sums() const;

  friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::int64_t> row_offsets_{0};
  std::vector<std::int64_t> col_indices_;
  std::vector<double> values_;

  friend SparseMatrix degree_scale(const SparseMatrix&, std::span<const double>,
                                   std::span<const double>);
};

// a * b.
DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& b);
// transpose(a) * b without materializing the transpose.
DenseMatrix spmm_transposed(const SparseMatrix& a, const DenseMatrix& b);

// a * b, a^T * b and a * b^T for dense operands.
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b);

// Rows with zero norm are returned unchanged.
DenseMatrix row_l2_normalize(const DenseMatrix& m);

enum class DegreeNormalization { kSymmetric, kRow };

// kSymmetric: D^-1/2 A D^-1/2, kRow: D^-1 A, with D_ii = sum_j A_ij.
// Throws if a row sum is not strictly positive.
SparseMatrix degree_normalize(const SparseMatrix& a, DegreeNormalization mode);

// diag(left) * a * diag(right).
SparseMatrix degree_scale(const SparseMatrix& a, std::span<const double> left,
                          std::span<const double> right);

}  // namespace gcnalign
