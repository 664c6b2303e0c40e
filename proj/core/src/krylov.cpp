#include <cmath>
#include <vector>

#include "nestersolve/solvers.hpp"
#include "trace_recorder.hpp"

namespace nestersolve {

namespace {

// M^{-1} r as one sweep from the zero vector.
void apply_preconditioner(const StationarySweep& precond, std::span<const double> r,
                          std::span<const double> zero, std::span<double> z) {
  precond.apply(zero, r, z);
}

}  // namespace

SolveResult pcg_solve(const SparseMatrix& a, const StationarySweep& precond,
                      std::span<const double> rhs, std::span<const double> x0,
                      const StopRule& stop) {
  detail::require_sizes("pcg_solve", a, precond.size(), rhs.size(), x0.size());
  detail::TraceRecorder rec("pcg_solve", a, rhs, stop);

  const std::size_t n = x0.size();
  const Vector zero(n, 0.0);
  Vector x(x0.begin(), x0.end());
  if (rec.record(x)) return {std::move(x), rec.take()};

  Vector r(rec.residual().begin(), rec.residual().end());
  Vector z(n), p(n), q(n);
  apply_preconditioner(precond, r, zero, z);
  p = z;
  double rz = dot(r, z);

  for (;;) {
    spmv(a, p, q);
    const double curvature = dot(p, q);
    if (!(curvature > 0.0)) {
      throw IndefiniteSystem("pcg_solve: indefinite (p^T A p <= 0)");
    }
    const double alpha = rz / curvature;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    if (rec.record(x)) break;
    apply_preconditioner(precond, r, zero, z);
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  return {std::move(x), rec.take()};
}

SolveResult gmres_solve(const SparseMatrix& a, const StationarySweep& precond,
                        std::span<const double> rhs, std::span<const double> x0,
                        const StopRule& stop) {
  detail::require_sizes("gmres_solve", a, precond.size(), rhs.size(), x0.size());
  detail::TraceRecorder rec("gmres_solve", a, rhs, stop);

  const std::size_t n = x0.size();
  const Vector zero(n, 0.0);
  Vector x(x0.begin(), x0.end());
  if (rec.record(x)) return {std::move(x), rec.take()};

  const double beta = norm2(rec.residual());
  std::vector<Vector> basis;  // V: orthonormal Krylov vectors
  std::vector<Vector> search; // Z: preconditioned basis, x = x0 + Z y
  basis.emplace_back(rec.residual().begin(), rec.residual().end());
  for (double& v : basis.back()) v /= beta;

  // Hessenberg columns after Givens rotation (upper triangular R).
  std::vector<Vector> r_cols;
  std::vector<double> cs, sn;
  std::vector<double> g{beta};
  Vector w(n);

  for (std::size_t j = 0;; ++j) {
    search.emplace_back(n);
    apply_preconditioner(precond, basis[j], zero, search[j]);
    spmv(a, search[j], w);
    const double w_norm_in = norm2(w);

    Vector h(j + 2, 0.0);
    for (std::size_t i = 0; i <= j; ++i) {
      h[i] = dot(w, basis[i]);
      for (std::size_t k = 0; k < n; ++k) w[k] -= h[i] * basis[i][k];
    }
    const double h_next = norm2(w);
    h[j + 1] = h_next;
    const bool breakdown = !(h_next > 1e-14 * w_norm_in);

    for (std::size_t i = 0; i < j; ++i) {
      const double t = cs[i] * h[i] + sn[i] * h[i + 1];
      h[i + 1] = -sn[i] * h[i] + cs[i] * h[i + 1];
      h[i] = t;
    }
    const double denom = std::hypot(h[j], h[j + 1]);
    cs.push_back(denom == 0.0 ? 1.0 : h[j] / denom);
    sn.push_back(denom == 0.0 ? 0.0 : h[j + 1] / denom);
    h[j] = denom;
    h[j + 1] = 0.0;
    g.push_back(-sn[j] * g[j]);
    g[j] = cs[j] * g[j];
    r_cols.push_back(std::move(h));

    // y = R^{-1} g, then x_j = x0 + Z y
    const std::size_t m = j + 1;
    Vector y(m);
    for (std::size_t i = m; i-- > 0;) {
      double s = g[i];
      for (std::size_t k = i + 1; k < m; ++k) s -= r_cols[k][i] * y[k];
      y[i] = r_cols[i][i] == 0.0 ? 0.0 : s / r_cols[i][i];
    }
    std::copy(x0.begin(), x0.end(), x.begin());
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t k = 0; k < n; ++k) x[k] += y[i] * search[i][k];
    }

    if (rec.record(x)) break;
    if (breakdown) {
      // the Krylov space is invariant: x is the exact minimizer
      rec.mark_converged();
      break;
    }
    basis.emplace_back(w);
    for (double& v : basis.back()) v /= h_next;
  }
  return {std::move(x), rec.take()};
}

}  // namespace nestersolve
