#include "gcnalign/linalg.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "gcnalign/error.h"

namespace gcnalign {

namespace {

std::string shape(std::size_t r, std::size_t c) {
  return "(" + std::to_string(r) + "x" + std::to_string(c) + ")";
}

void require_same(std::size_t lhs, std::size_t rhs, const char* op,
                  std::size_t ar, std::size_t ac, std::size_t br,
                  std::size_t bc) {
  if (lhs != rhs) {
    fail(ErrorCategory::kInvalidArgument, std::string(op) +
                                              ": dimension mismatch " +
                                              shape(ar, ac) + " vs " +
                                              shape(br, bc));
  }
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols,
                         std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows * cols) {
    fail(ErrorCategory::kInvalidArgument,
         "DenseMatrix: " + std::to_string(values_.size()) +
             " values for shape " + shape(rows, cols));
  }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

bool DenseMatrix::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                         std::span<const CooEntry> entries) {
  for (const CooEntry& e : entries) {
    if (e.row < 0 || e.col < 0 || static_cast<std::size_t>(e.row) >= rows ||
        static_cast<std::size_t>(e.col) >= cols) {
      fail(ErrorCategory::kInvalidArgument,
           "SparseMatrix: entry (" + std::to_string(e.row) + ", " +
               std::to_string(e.col) + ") outside " + shape(rows, cols));
    }
  }

  // Stable ordering by (row, col) keeps the summation order of duplicates
  // equal to their input order, so results do not depend on the sort.
  std::vector<std::size_t> order(entries.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) {
                     if (entries[x].row != entries[y].row) {
                       return entries[x].row < entries[y].row;
                     }
                     return entries[x].col < entries[y].col;
                   });

  SparseMatrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.row_offsets_.assign(rows + 1, 0);
  m.col_indices_.reserve(entries.size());
  m.values_.reserve(entries.size());
  std::int64_t last_row = -1;
  std::int64_t last_col = -1;
  for (std::size_t idx : order) {
    const CooEntry& e = entries[idx];
    if (e.row == last_row && e.col == last_col) {
      m.values_.back() += e.value;
      continue;
    }
    m.col_indices_.push_back(e.col);
    m.values_.push_back(e.value);
    ++m.row_offsets_[e.row + 1];
    last_row = e.row;
    last_col = e.col;
  }
  std::partial_sum(m.row_offsets_.begin(), m.row_offsets_.end(),
                   m.row_offsets_.begin());
  return m;
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  std::vector<CooEntry> entries(n);
  for (std::size_t i = 0; i < n; ++i) {
    entries[i] = {static_cast<std::int64_t>(i), static_cast<std::int64_t>(i), 1.0};
  }
  return from_triplets(n, n, entries);
}

double SparseMatrix::at(std::size_t r, std::size_t c) const {
  const auto begin = col_indices_.begin() + row_offsets_[r];
  const auto end = col_indices_.begin() + row_offsets_[r + 1];
  const auto it = std::lower_bound(begin, end, static_cast<std::int64_t>(c));
  if (it == end || *it != static_cast<std::int64_t>(c)) return 0.0;
  return values_[it - col_indices_.begin()];
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<CooEntry> entries;
  entries.reserve(nonzeros());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (auto k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
      entries.push_back({col_indices_[k], static_cast<std::int64_t>(r), values_[k]});
    }
  }
  return from_triplets(cols_, rows_, entries);
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix out(rows_, cols_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (auto k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
      out(r, col_indices_[k]) += values_[k];
    }
  }
  return out;
}

std::vector<double> SparseMatrix::row_sums() const {
  std::vector<double> sums(rows_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (auto k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
      sums[r] += values_[k];
    }
  }
  return sums;
}

DenseMatrix spmm(const SparseMatrix& a, const DenseMatrix& b) {
  require_same(a.cols(), b.rows(), "spmm", a.rows(), a.cols(), b.rows(), b.cols());
  DenseMatrix out(a.rows(), b.cols());
  const auto offsets = a.row_offsets();
  const auto cols = a.col_indices();
  const auto vals = a.values();
  for (std::size_t r = 0; r < a.rows(); ++r) {
    auto dst = out.row(r);
    for (auto k = offsets[r]; k < offsets[r + 1]; ++k) {
      const double v = vals[k];
      const auto src = b.row(cols[k]);
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += v * src[j];
    }
  }
  return out;
}

DenseMatrix spmm_transposed(const SparseMatrix& a, const DenseMatrix& b) {
  require_same(a.rows(), b.rows(), "spmm_transposed", a.rows(), a.cols(),
               b.rows(), b.cols());
  DenseMatrix out(a.cols(), b.cols());
  const auto offsets = a.row_offsets();
  const auto cols = a.col_indices();
  const auto vals = a.values();
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const auto src = b.row(r);
    for (auto k = offsets[r]; k < offsets[r + 1]; ++k) {
      const double v = vals[k];
      auto dst = out.row(cols[k]);
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += v * src[j];
    }
  }
  return out;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  require_same(a.cols(), b.rows(), "matmul", a.rows(), a.cols(), b.rows(), b.cols());
  DenseMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto dst = out.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double v = a(i, k);
      const auto src = b.row(k);
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += v * src[j];
    }
  }
  return out;
}

DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b) {
  require_same(a.rows(), b.rows(), "matmul_tn", a.rows(), a.cols(), b.rows(),
               b.cols());
  DenseMatrix out(a.cols(), b.cols());
  for (std::size_t k = 0; k < a.rows(); ++k) {
    const auto lhs = a.row(k);
    const auto rhs = b.row(k);
    for (std::size_t i = 0; i < lhs.size(); ++i) {
      const double v = lhs[i];
      auto dst = out.row(i);
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += v * rhs[j];
    }
  }
  return out;
}

DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b) {
  require_same(a.cols(), b.cols(), "matmul_nt", a.rows(), a.cols(), b.rows(),
               b.cols());
  DenseMatrix out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto lhs = a.row(i);
    for (std::size_t j = 0; j < b.rows(); ++j) {
      const auto rhs = b.row(j);
      double acc = 0.0;
      for (std::size_t k = 0; k < lhs.size(); ++k) acc += lhs[k] * rhs[k];
      out(i, j) = acc;
    }
  }
  return out;
}

DenseMatrix row_l2_normalize(const DenseMatrix& m) {
  DenseMatrix out = m;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    double sq = 0.0;
    for (double v : row) sq += v * v;
    if (sq == 0.0) continue;
    const double inv = 1.0 / std::sqrt(sq);
    for (double& v : row) v *= inv;
  }
  return out;
}

SparseMatrix degree_scale(const SparseMatrix& a, std::span<const double> left,
                          std::span<const double> right) {
  if (left.size() != a.rows() || right.size() != a.cols()) {
    fail(ErrorCategory::kInvalidArgument, "degree_scale: scale vector size mismatch");
  }
  SparseMatrix out = a;
  for (std::size_t r = 0; r < out.rows_; ++r) {
    for (auto k = out.row_offsets_[r]; k < out.row_offsets_[r + 1]; ++k) {
      out.values_[k] *= left[r] * right[out.col_indices_[k]];
    }
  }
  return out;
}

SparseMatrix degree_normalize(const SparseMatrix& a, DegreeNormalization mode) {
  if (a.rows() != a.cols()) {
    fail(ErrorCategory::kInvalidArgument,
         "degree_normalize: matrix must be square, got " + shape(a.rows(), a.cols()));
  }
  const std::vector<double> degree = a.row_sums();
  for (std::size_t i = 0; i < degree.size(); ++i) {
    if (!(degree[i] > 0.0)) {
      fail(ErrorCategory::kNumeric,
           "degree_normalize: row " + std::to_string(i) +
               " has non-positive degree (missing self-loop?)");
    }
  }
  std::vector<double> left(degree.size());
  std::vector<double> right(degree.size(), 1.0);
  if (mode == DegreeNormalization::kRow) {
    for (std::size_t i = 0; i < degree.size(); ++i) left[i] = 1.0 / degree[i];
  } else {
    for (std::size_t i = 0; i < degree.size(); ++i) {
      left[i] = 1.0 / std::sqrt(degree[i]);
    }
    right = left;
  }
  return degree_scale(a, left, right);
}

}  // namespace gcnalign
