#include "nestersolve/solvers.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "trace_recorder.hpp"

namespace nestersolve {

namespace detail {

void require_sizes(const char* method, const SparseMatrix& a, std::size_t sweep_size,
                   std::size_t rhs_size, std::size_t x0_size) {
  const std::size_t n = a.rows();
  if (a.cols() != n || sweep_size != n || rhs_size != n || x0_size != n) {
    throw InvalidArgument(std::string(method) + ": dimension mismatch");
  }
}

}  // namespace detail

Vector StationarySweep::sweep(std::span<const double> x, std::span<const double> rhs) const {
  Vector out(size());
  apply(x, rhs, out);
  return out;
}

DiagonalSweep::DiagonalSweep(std::vector<double> eigenvalues)
    : eigenvalues_(std::move(eigenvalues)) {
  for (double b : eigenvalues_) {
    if (!std::isfinite(b) || b == 1.0) {
      throw InvalidArgument("DiagonalSweep: eigenvalues must be finite and differ from 1");
    }
  }
}

void DiagonalSweep::apply(std::span<const double> x, std::span<const double> rhs,
                          std::span<double> out) const {
  for (std::size_t i = 0; i < eigenvalues_.size(); ++i) out[i] = eigenvalues_[i] * x[i] + rhs[i];
}

SparseMatrix DiagonalSweep::system_matrix() const {
  std::vector<SparseMatrix::Triplet> t;
  t.reserve(eigenvalues_.size());
  for (std::size_t i = 0; i < eigenvalues_.size(); ++i) t.push_back({i, i, 1.0 - eigenvalues_[i]});
  return SparseMatrix::from_triplets(eigenvalues_.size(), eigenvalues_.size(), std::move(t));
}

RichardsonSweep::RichardsonSweep(std::shared_ptr<const SparseMatrix> a, double omega)
    : a_(std::move(a)), omega_(omega) {
  if (!a_ || a_->rows() != a_->cols()) throw InvalidArgument("RichardsonSweep: square matrix required");
}

void RichardsonSweep::apply(std::span<const double> x, std::span<const double> rhs,
                            std::span<double> out) const {
  spmv(*a_, x, out);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] + omega_ * (rhs[i] - out[i]);
}

ExactSweep::ExactSweep(const SparseMatrix& a) : lu_(to_dense(a)) {}

void ExactSweep::apply(std::span<const double>, std::span<const double> rhs,
                       std::span<double> out) const {
  const Vector x = lu_.solve(rhs);
  std::copy(x.begin(), x.end(), out.begin());
}

void StopRule::validate() const {
  if (!(tol > 0.0)) throw InvalidArgument("StopRule: tol must be positive");
  if (max_iter < 1) throw InvalidArgument("StopRule: max_iter must be >= 1");
}

SolveDiverged::SolveDiverged(const char* method, IterationTrace trace)
    : Divergence(std::string(method) + ": diverged (non-finite residual at iteration " +
                 std::to_string(trace.iterations()) + ")"),
      trace_(std::move(trace)) {}

SolveResult plain_solve(const StationarySweep& op, const SparseMatrix& a,
                        std::span<const double> rhs, std::span<const double> x0,
                        const StopRule& stop) {
  detail::require_sizes("plain_solve", a, op.size(), rhs.size(), x0.size());
  detail::TraceRecorder rec("plain_solve", a, rhs, stop);
  Vector x(x0.begin(), x0.end());
  Vector next(x.size());
  bool done = rec.record(x);
  while (!done) {
    op.apply(x, rhs, next);
    x.swap(next);
    done = rec.record(x);
  }
  return {std::move(x), rec.take()};
}

SolveResult nesterov_solve(const StationarySweep& op, const SparseMatrix& a,
                           std::span<const double> rhs, std::span<const double> x0, double c,
                           const StopRule& stop) {
  detail::require_sizes("nesterov_solve", a, op.size(), rhs.size(), x0.size());
  if (!(std::abs(c) < 1.0)) throw InvalidArgument("nesterov_solve: requires |c| < 1");
  detail::TraceRecorder rec("nesterov_solve", a, rhs, stop);

  const std::size_t n = x0.size();
  Vector prev(x0.begin(), x0.end());
  Vector x(n);
  Vector y(n);
  if (rec.record(prev)) return {std::move(prev), rec.take()};

  // The first step has no previous iterate to extrapolate from.
  op.apply(prev, rhs, x);
  bool done = rec.record(x);
  while (!done) {
    for (std::size_t i = 0; i < n; ++i) y[i] = (1.0 + c) * x[i] - c * prev[i];
    prev.swap(x);
    op.apply(y, rhs, x);
    done = rec.record(x);
  }
  return {std::move(x), rec.take()};
}

SolveResult chebyshev_solve(const StationarySweep& op, const SparseMatrix& a,
                            std::span<const double> rhs, std::span<const double> x0,
                            const ChebyshevParams& params, const StopRule& stop) {
  detail::require_sizes("chebyshev_solve", a, op.size(), rhs.size(), x0.size());
  if (!(params.gamma > 0.0) || !(params.sigma >= 0.0 && params.sigma < 1.0)) {
    throw InvalidArgument("chebyshev_solve: requires gamma > 0 and sigma in [0, 1)");
  }
  detail::TraceRecorder rec("chebyshev_solve", a, rhs, stop);

  const std::size_t n = x0.size();
  const double gamma = params.gamma;
  Vector prev(x0.begin(), x0.end());
  Vector x(n);
  Vector swept(n);
  if (rec.record(prev)) return {std::move(prev), rec.take()};

  op.apply(prev, rhs, swept);
  for (std::size_t i = 0; i < n; ++i) x[i] = gamma * swept[i] + (1.0 - gamma) * prev[i];
  bool done = rec.record(x);
  double beta = params.beta(1, 1.0);
  std::size_t k = 1;
  while (!done) {
    beta = params.beta(++k, beta);
    op.apply(x, rhs, swept);
    for (std::size_t i = 0; i < n; ++i) {
      const double extrapolated = gamma * swept[i] + (1.0 - gamma) * x[i];
      // overwrite x_{k-1} with x_{k+1}
      prev[i] = beta * extrapolated + (1.0 - beta) * prev[i];
    }
    prev.swap(x);
    done = rec.record(x);
  }
  return {std::move(x), rec.take()};
}

double acf_estimate(const IterationTrace& trace, std::size_t m) {
  if (m == 0) throw InvalidArgument("acf_estimate: m must be positive");
  if (trace.records.size() < m + 1) {
    throw InvalidArgument("acf_estimate: trace has " + std::to_string(trace.records.size()) +
                          " records, need at least " + std::to_string(m + 1));
  }
  double log_sum = 0.0;
  for (std::size_t i = trace.records.size() - m; i < trace.records.size(); ++i) {
    const double cf = *trace.records[i].cf;
    if (cf == 0.0) return 0.0;
    log_sum += std::log(cf);
  }
  return std::exp(log_sum / static_cast<double>(m));
}

void write_trace_csv(std::ostream& out, const IterationTrace& trace, bool include_timing) {
  out << "iter,residual_norm,cf,seconds\n";
  char line[128];
  for (const auto& r : trace.records) {
    std::snprintf(line, sizeof line, "%zu,%.12g,", r.iteration, r.residual_norm);
    out << line;
    if (r.cf) {
      std::snprintf(line, sizeof line, "%.12g", *r.cf);
      out << line;
    }
    out << ',';
    if (include_timing) {
      std::snprintf(line, sizeof line, "%.6f", r.seconds);
      out << line;
    }
    out << '\n';
  }
}

}  // namespace nestersolve
