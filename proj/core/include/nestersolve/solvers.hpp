#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "nestersolve/error.hpp"
#include "nestersolve/linalg.hpp"
#include "nestersolve/spectral.hpp"

namespace nestersolve {

/// One application of a stationary iteration x <- B x + M^{-1} f.
///
/// Implementations must be affine in (x, rhs) and deterministic: every
/// accelerator and every spectral estimate in this library relies on it.
class StationarySweep {
 public:
  virtual ~StationarySweep() = default;

  virtual std::size_t size() const = 0;
  /// out = sweep(x, rhs). `out` never aliases `x` or `rhs`.
  virtual void apply(std::span<const double> x, std::span<const double> rhs,
                     std::span<double> out) const = 0;

  Vector sweep(std::span<const double> x, std::span<const double> rhs) const;
};

/// Synthetic sweep with diagonal iteration matrix B = diag(b):
/// sweep(x, f) = B x + f, a stationary method for (I - B) x = f.
class DiagonalSweep final : public StationarySweep {
 public:
  explicit DiagonalSweep(std::vector<double> eigenvalues);

  std::size_t size() const override { return eigenvalues_.size(); }
  void apply(std::span<const double> x, std::span<const double> rhs,
             std::span<double> out) const override;

  /// The system matrix I - diag(b) the sweep iterates on.
  SparseMatrix system_matrix() const;
  std::span<const double> eigenvalues() const noexcept { return eigenvalues_; }

 private:
  std::vector<double> eigenvalues_;
};

/// Damped Richardson x + omega (f - A x). With omega = 1 and used from a
/// zero start it is the identity preconditioner.
class RichardsonSweep final : public StationarySweep {
 public:
  RichardsonSweep(std::shared_ptr<const SparseMatrix> a, double omega = 1.0);

  std::size_t size() const override { return a_->rows(); }
  void apply(std::span<const double> x, std::span<const double> rhs,
             std::span<double> out) const override;

 private:
  std::shared_ptr<const SparseMatrix> a_;
  double omega_;
};

/// Exact solve A^{-1} f regardless of x (dense LU; small systems only).
class ExactSweep final : public StationarySweep {
 public:
  explicit ExactSweep(const SparseMatrix& a);

  std::size_t size() const override { return lu_.size(); }
  void apply(std::span<const double> x, std::span<const double> rhs,
             std::span<double> out) const override;

 private:
  LuFactorization lu_;
};

struct StopRule {
  double tol = 1e-8;  ///< stop once ||r_k|| / ||r_0|| <= tol
  std::size_t max_iter = 1000;

  void validate() const;
};

enum class SolveStatus { Converged, MaxIterations };

struct IterationRecord {
  std::size_t iteration = 0;
  double residual_norm = 0.0;
  /// ||r_k|| / ||r_{k-1}||; empty for iteration 0.
  std::optional<double> cf;
  /// Wall time since the solve started.
  double seconds = 0.0;
};

struct IterationTrace {
  std::vector<IterationRecord> records;
  SolveStatus status = SolveStatus::MaxIterations;

  /// Index of the last recorded iteration.
  std::size_t iterations() const noexcept {
    return records.empty() ? 0 : records.back().iteration;
  }
  bool converged() const noexcept { return status == SolveStatus::Converged; }
};

struct SolveResult {
  Vector x;
  IterationTrace trace;
};

/// Thrown when a residual becomes non-finite. Carries the trace up to and
/// including the failing iteration.
class SolveDiverged : public Divergence {
 public:
  SolveDiverged(const char* method, IterationTrace trace);
  const IterationTrace& trace() const noexcept { return trace_; }

 private:
  IterationTrace trace_;
};

/// PCG met p^T A p <= 0.
class IndefiniteSystem : public Error {
 public:
  using Error::Error;
};

SolveResult plain_solve(const StationarySweep& op, const SparseMatrix& a,
                        std::span<const double> rhs, std::span<const double> x0,
                        const StopRule& stop);

/// x_1 = sweep(x_0); x_{k+1} = sweep((1+c) x_k - c x_{k-1}). Requires |c| < 1.
SolveResult nesterov_solve(const StationarySweep& op, const SparseMatrix& a,
                           std::span<const double> rhs, std::span<const double> x0,
                           double c, const StopRule& stop);

/// Chebyshev semi-iteration on the extrapolated sweep gamma*sweep + (1-gamma)*I.
SolveResult chebyshev_solve(const StationarySweep& op, const SparseMatrix& a,
                            std::span<const double> rhs, std::span<const double> x0,
                            const ChebyshevParams& params, const StopRule& stop);

/// Preconditioned CG; the preconditioner is one sweep from the zero vector.
SolveResult pcg_solve(const SparseMatrix& a, const StationarySweep& precond,
                      std::span<const double> rhs, std::span<const double> x0,
                      const StopRule& stop);

/// Right-preconditioned GMRES without restart (modified Gram-Schmidt,
/// Givens rotations). The Krylov basis grows up to stop.max_iter vectors.
SolveResult gmres_solve(const SparseMatrix& a, const StationarySweep& precond,
                        std::span<const double> rhs, std::span<const double> x0,
                        const StopRule& stop);

/// Geometric mean of the last `m` convergence factors of a trace.
double acf_estimate(const IterationTrace& trace, std::size_t m = 5);

/// CSV with header iter,residual_norm,cf,seconds. With include_timing false
/// the seconds column is left empty so reruns compare byte for byte.
void write_trace_csv(std::ostream& out, const IterationTrace& trace, bool include_timing = true);

}  // namespace nestersolve
