#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace nestersolve {

using Vector = std::vector<double>;

/// Compressed-sparse-row matrix. Column indices within a row are sorted and
/// unique; the constructor validates the layout.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_offsets,
               std::vector<std::size_t> col_indices, std::vector<double> values);

  struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
  };

  /// Builds a matrix from (row, col, value) entries; duplicates are summed.
  static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                    std::vector<Triplet> entries);
  static SparseMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nnz() const noexcept { return values_.size(); }

  std::span<const std::size_t> row_offsets() const noexcept { return row_offsets_; }
  std::span<const std::size_t> col_indices() const noexcept { return col_indices_; }
  std::span<const double> values() const noexcept { return values_; }

  /// Entry (i, j), zero when not stored.
  double at(std::size_t i, std::size_t j) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<std::size_t> col_indices_;
  std::vector<double> values_;
};

/// Row-major dense matrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<const double> data() const noexcept { return data_; }

  static DenseMatrix identity(std::size_t n);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

DenseMatrix to_dense(const SparseMatrix& a);

/// y = A x, rows summed left to right.
Vector spmv(const SparseMatrix& a, std::span<const double> x);
void spmv(const SparseMatrix& a, std::span<const double> x, std::span<double> y);

/// y = A x for a dense matrix.
Vector matvec(const DenseMatrix& a, std::span<const double> x);

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
/// Returns a * x + y.
Vector axpy(double a, std::span<const double> x, std::span<const double> y);

/// LU factorization with partial pivoting; used for coarsest-grid solves and
/// as a reference solver in tests.
class LuFactorization {
 public:
  explicit LuFactorization(DenseMatrix a);

  std::size_t size() const noexcept { return lu_.rows(); }
  Vector solve(std::span<const double> rhs) const;

 private:
  DenseMatrix lu_;
  std::vector<std::size_t> pivots_;
};

/// A fixed linear map written into a caller-provided output span.
using LinearMap = std::function<void(std::span<const double>, std::span<double>)>;

/// Spectral radius of a linear map via the Gelfand growth rate ||A^k v||^(1/k).
///
/// Starts from a seeded random vector, renormalizes after every application
/// and returns the geometric mean of the growth factors over the last quarter
/// of the iterations performed. The run stops early once the estimates taken
/// at iteration k and k/2 agree to within tol/10. Works for maps whose
/// dominant eigenvalues form complex pairs, where plain power iteration on the
/// direction never settles.
///
/// Throws Divergence if an application produces non-finite values.
double spectral_radius_estimate(const LinearMap& apply, std::size_t dim,
                                std::size_t iters = 2000, double tol = 1e-3,
                                std::uint64_t seed = 0x5EED);

}  // namespace nestersolve
