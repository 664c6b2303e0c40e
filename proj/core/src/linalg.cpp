#include "nestersolve/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "nestersolve/error.hpp"
#include "nestersolve/random.hpp"

namespace nestersolve {

namespace {

void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw InvalidArgument(std::string(what) + ": length mismatch (" + std::to_string(a) +
                          " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols,
                           std::vector<std::size_t> row_offsets,
                           std::vector<std::size_t> col_indices, std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)),
      values_(std::move(values)) {
  if (row_offsets_.size() != rows_ + 1 || row_offsets_.front() != 0) {
    throw InvalidArgument("SparseMatrix: row offsets must have rows+1 entries starting at 0");
  }
  if (col_indices_.size() != values_.size() || row_offsets_.back() != values_.size()) {
    throw InvalidArgument("SparseMatrix: offsets, indices and values disagree on nnz");
  }
  for (std::size_t i = 0; i < rows_; ++i) {
    if (row_offsets_[i + 1] < row_offsets_[i]) {
      throw InvalidArgument("SparseMatrix: row offsets must be nondecreasing");
    }
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      if (col_indices_[k] >= cols_) {
        throw InvalidArgument("SparseMatrix: column index out of range");
      }
      if (k > row_offsets_[i] && col_indices_[k] <= col_indices_[k - 1]) {
        throw InvalidArgument("SparseMatrix: columns within a row must be sorted and unique");
      }
    }
  }
}

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                         std::vector<Triplet> entries) {
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<std::size_t> offsets(rows + 1, 0);
  std::vector<std::size_t> cols_out;
  std::vector<double> vals;
  cols_out.reserve(entries.size());
  vals.reserve(entries.size());
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const auto& t = entries[k];
    if (t.row >= rows || t.col >= cols) {
      throw InvalidArgument("SparseMatrix::from_triplets: entry out of range");
    }
    if (k > 0 && entries[k - 1].row == t.row && entries[k - 1].col == t.col) {
      vals.back() += t.value;
      continue;
    }
    cols_out.push_back(t.col);
    vals.push_back(t.value);
    ++offsets[t.row + 1];
  }
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  return SparseMatrix(rows, cols, std::move(offsets), std::move(cols_out), std::move(vals));
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  std::vector<std::size_t> offsets(n + 1);
  std::iota(offsets.begin(), offsets.end(), std::size_t{0});
  std::vector<std::size_t> cols(n);
  std::iota(cols.begin(), cols.end(), std::size_t{0});
  return SparseMatrix(n, n, std::move(offsets), std::move(cols), std::vector<double>(n, 1.0));
}

double SparseMatrix::at(std::size_t i, std::size_t j) const {
  if (i >= rows_ || j >= cols_) throw InvalidArgument("SparseMatrix::at: index out of range");
  const auto first = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i]);
  const auto last = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_offsets_[i + 1]);
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return 0.0;
  return values_[static_cast<std::size_t>(it - col_indices_.begin())];
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix to_dense(const SparseMatrix& a) {
  DenseMatrix d(a.rows(), a.cols());
  const auto offsets = a.row_offsets();
  const auto cols = a.col_indices();
  const auto vals = a.values();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) d(i, cols[k]) = vals[k];
  }
  return d;
}

void spmv(const SparseMatrix& a, std::span<const double> x, std::span<double> y) {
  require_same_length(a.cols(), x.size(), "spmv");
  require_same_length(a.rows(), y.size(), "spmv");
  const auto offsets = a.row_offsets();
  const auto cols = a.col_indices();
  const auto vals = a.values();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double sum = 0.0;
    for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) sum += vals[k] * x[cols[k]];
    y[i] = sum;
  }
}

Vector spmv(const SparseMatrix& a, std::span<const double> x) {
  Vector y(a.rows());
  spmv(a, x, y);
  return y;
}

Vector matvec(const DenseMatrix& a, std::span<const double> x) {
  require_same_length(a.cols(), x.size(), "matvec");
  Vector y(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double sum = 0.0;
    const auto row = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) sum += row[j] * x[j];
    y[i] = sum;
  }
  return y;
}

double dot(std::span<const double> x, std::span<const double> y) {
  require_same_length(x.size(), y.size(), "dot");
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sum += x[i] * y[i];
  return sum;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

Vector axpy(double a, std::span<const double> x, std::span<const double> y) {
  require_same_length(x.size(), y.size(), "axpy");
  Vector out(y.begin(), y.end());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] += a * x[i];
  return out;
}

LuFactorization::LuFactorization(DenseMatrix a) : lu_(std::move(a)) {
  const std::size_t n = lu_.rows();
  if (lu_.cols() != n) throw InvalidArgument("LuFactorization: matrix must be square");
  pivots_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = std::abs(lu_(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(lu_(i, k)) > best) {
        best = std::abs(lu_(i, k));
        p = i;
      }
    }
    if (best == 0.0) throw InvalidArgument("LuFactorization: matrix is singular");
    pivots_[k] = p;
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(p, j));
    }
    const double inv = 1.0 / lu_(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double l = lu_(i, k) * inv;
      lu_(i, k) = l;
      if (l == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= l * lu_(k, j);
    }
  }
}

Vector LuFactorization::solve(std::span<const double> rhs) const {
  const std::size_t n = size();
  require_same_length(n, rhs.size(), "LuFactorization::solve");
  Vector x(rhs.begin(), rhs.end());
  for (std::size_t k = 0; k < n; ++k) {
    if (pivots_[k] != k) std::swap(x[k], x[pivots_[k]]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    double sum = x[i];
    for (std::size_t j = 0; j < i; ++j) sum -= lu_(i, j) * x[j];
    x[i] = sum;
  }
  for (std::size_t i = n; i-- > 0;) {
    double sum = x[i];
    for (std::size_t j = i + 1; j < n; ++j) sum -= lu_(i, j) * x[j];
    x[i] = sum / lu_(i, i);
  }
  return x;
}

double spectral_radius_estimate(const LinearMap& apply, std::size_t dim, std::size_t iters,
                                double tol, std::uint64_t seed) {
  if (dim == 0) throw InvalidArgument("spectral_radius_estimate: dim must be positive");
  if (iters < 10) throw InvalidArgument("spectral_radius_estimate: iters must be >= 10");
  if (!(tol > 0.0)) throw InvalidArgument("spectral_radius_estimate: tol must be positive");

  SplitMix64 rng(seed);
  Vector v(dim);
  for (auto& e : v) e = rng.uniform(-1.0, 1.0);
  const double n0 = norm2(v);
  for (auto& e : v) e /= n0;

  Vector w(dim);
  // prefix[k] = sum of the first k log growth factors
  std::vector<double> prefix{0.0};
  prefix.reserve(iters + 1);
  const auto window_estimate = [&prefix](std::size_t k) {
    const std::size_t m = std::max<std::size_t>(1, k / 4);
    return std::exp((prefix[k] - prefix[k - m]) / static_cast<double>(m));
  };

  for (std::size_t k = 1; k <= iters; ++k) {
    apply(v, w);
    const double g = norm2(w);
    if (!std::isfinite(g)) throw Divergence("spectral_radius_estimate: divergent map");
    if (g == 0.0) return 0.0;
    for (std::size_t i = 0; i < dim; ++i) v[i] = w[i] / g;
    prefix.push_back(prefix.back() + std::log(g));
    if (k >= 64 && k % 8 == 0) {
      if (std::abs(window_estimate(k) - window_estimate(k / 2)) < 0.1 * tol) {
        return window_estimate(k);
      }
    }
  }
  return window_estimate(prefix.size() - 1);
}

}  // namespace nestersolve
