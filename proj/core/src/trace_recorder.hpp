#pragma once

#include <chrono>
#include <cmath>
#include <span>

#include "nestersolve/linalg.hpp"
#include "nestersolve/solvers.hpp"

namespace nestersolve::detail {

/// Computes explicit residuals f - A x, appends them to a trace and applies
/// the stop rule.
class TraceRecorder {
 public:
  TraceRecorder(const char* method, const SparseMatrix& a, std::span<const double> rhs,
                const StopRule& stop)
      : method_(method), a_(a), rhs_(rhs), stop_(stop), residual_(rhs.size()),
        start_(std::chrono::steady_clock::now()) {
    stop.validate();
  }

  /// Records the residual of iterate x as the next iteration. Returns true
  /// when the stop rule is met (converged or iteration budget spent).
  bool record(std::span<const double> x) {
    spmv(a_, x, residual_);
    for (std::size_t i = 0; i < residual_.size(); ++i) residual_[i] = rhs_[i] - residual_[i];
    return record_norm(norm2(residual_));
  }

  bool record_norm(double rnorm) {
    IterationRecord rec;
    rec.iteration = trace_.records.size();
    rec.residual_norm = rnorm;
    if (!trace_.records.empty()) rec.cf = rnorm / trace_.records.back().residual_norm;
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    trace_.records.push_back(rec);
    if (!std::isfinite(rnorm)) throw SolveDiverged(method_, trace_);
    if (rec.iteration == 0) r0_ = rnorm;
    if (rnorm <= stop_.tol * r0_) {
      trace_.status = SolveStatus::Converged;
      return true;
    }
    return rec.iteration >= stop_.max_iter;
  }

  void mark_converged() { trace_.status = SolveStatus::Converged; }

  /// Residual vector of the most recent record() call.
  std::span<const double> residual() const { return residual_; }

  IterationTrace take() { return std::move(trace_); }

 private:
  const char* method_;
  const SparseMatrix& a_;
  std::span<const double> rhs_;
  StopRule stop_;
  Vector residual_;
  double r0_ = 0.0;
  IterationTrace trace_;
  std::chrono::steady_clock::time_point start_;
};

void require_sizes(const char* method, const SparseMatrix& a, std::size_t sweep_size,
                   std::size_t rhs_size, std::size_t x0_size);

}  // namespace nestersolve::detail
