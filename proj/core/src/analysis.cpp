#include "nestersolve/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nestersolve/error.hpp"
#include "nestersolve/linalg.hpp"
#include "nestersolve/random.hpp"

namespace nestersolve {

double jacobi_symbol(double omega, double theta1, double theta2) {
  return 1.0 - omega + 0.5 * omega * (std::cos(theta1) + std::cos(theta2));
}

SymbolRange smoothing_range(double omega, std::size_t resolution, std::size_t sweeps) {
  if (!(omega > 0.0 && omega <= 1.0)) throw InvalidArgument("smoothing_range: omega must lie in (0, 1]");
  if (resolution < 64) throw InvalidArgument("smoothing_range: resolution must be >= 64");
  if (sweeps < 1) throw InvalidArgument("smoothing_range: sweeps must be >= 1");

  constexpr double pi = std::numbers::pi;
  double lo = INFINITY;
  double hi = -INFINITY;
  auto visit = [&](double t1, double t2) {
    const double s = std::pow(jacobi_symbol(omega, t1, t2), static_cast<double>(sweeps));
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  };
  const double step = pi / static_cast<double>(resolution - 1);
  for (std::size_t a = 0; a < resolution; ++a) {
    for (std::size_t b = 0; b < resolution; ++b) {
      const double t1 = step * static_cast<double>(a);
      const double t2 = step * static_cast<double>(b);
      if (std::max(t1, t2) >= pi / 2) visit(t1, t2);
    }
  }
  visit(pi / 2, 0.0);
  visit(0.0, pi / 2);
  visit(pi / 2, pi / 2);
  visit(pi, 0.0);
  visit(pi, pi);
  return {lo, hi, std::max(std::abs(lo), std::abs(hi))};
}

void PowerOptions::validate() const {
  if (iters < 20) throw InvalidArgument("power_extreme_eigs: iters must be >= 20");
  if (!(tol > 0.0)) throw InvalidArgument("power_extreme_eigs: tol must be positive");
  if (shift && !std::isfinite(*shift)) throw InvalidArgument("power_extreme_eigs: shift must be finite");
}

namespace {

constexpr double kSettledSlack = 1e-2;

struct PowerRun {
  double rayleigh = 0.0;
  double growth = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
};

PowerRun power_run(const LinearMap& map, std::size_t dim, const PowerOptions& opts) {
  SplitMix64 rng(opts.seed);
  Vector v(dim);
  for (auto& x : v) x = rng.uniform(-1.0, 1.0);
  double nv = norm2(v);
  for (auto& x : v) x /= nv;

  Vector w(dim);
  std::vector<double> log_growth;
  log_growth.reserve(opts.iters);
  PowerRun run;
  for (std::size_t k = 0; k < opts.iters; ++k) {
    map(v, w);
    const double nw = norm2(w);
    run.iterations = k + 1;
    if (!std::isfinite(nw)) throw Divergence("divergent map");
    if (nw == 0.0) {
      run = {0.0, 0.0, true, k + 1};
      return run;
    }
    const double q = dot(w, v);
    double res2 = 0.0;
    for (std::size_t i = 0; i < dim; ++i) res2 += (w[i] - q * v[i]) * (w[i] - q * v[i]);
    run.rayleigh = q;
    log_growth.push_back(std::log(nw));
    for (std::size_t i = 0; i < dim; ++i) v[i] = w[i] / nw;
    if (k >= 4 && std::sqrt(res2) <= opts.tol * std::abs(q)) {
      run.converged = true;
      run.growth = nw;
      return run;
    }
  }
  const std::size_t window = std::max<std::size_t>(1, log_growth.size() / 4);
  double sum = 0.0;
  for (std::size_t i = log_growth.size() - window; i < log_growth.size(); ++i) sum += log_growth[i];
  run.growth = std::exp(sum / static_cast<double>(window));
  // Slow but monotone convergence: the signed quotient still explains the growth.
  run.converged = std::abs(run.rayleigh) >= (1.0 - kSettledSlack) * run.growth;
  return run;
}

}  // namespace

PowerEstimate power_extreme_eigs(const StationarySweep& sweep, const PowerOptions& opts) {
  opts.validate();
  const std::size_t dim = sweep.size();
  if (dim == 0) throw InvalidArgument("power_extreme_eigs: empty sweep");

  const Vector zero(dim, 0.0);
  Vector offset(dim);
  sweep.apply(zero, zero, offset);
  const LinearMap error_map = [&](std::span<const double> x, std::span<double> y) {
    sweep.apply(x, zero, y);
    for (std::size_t i = 0; i < dim; ++i) y[i] -= offset[i];
  };

  PowerEstimate est;
  const PowerRun dom = power_run(error_map, dim, opts);
  est.complex_dominant = !dom.converged;
  est.dominant = dom.converged ? dom.rayleigh : dom.growth;
  est.iterations = dom.iterations;

  const double mu = opts.shift.value_or(est.dominant);
  est.shift = mu;
  const LinearMap shifted = [&](std::span<const double> x, std::span<double> y) {
    error_map(x, y);
    for (std::size_t i = 0; i < dim; ++i) y[i] -= mu * x[i];
  };
  const PowerRun opp = power_run(shifted, dim, opts);
  est.iterations += opp.iterations;
  if (opp.converged) {
    est.opposite = opp.rayleigh + mu;
  } else {
    est.opposite = mu >= 0.0 ? mu - opp.growth : mu + opp.growth;
  }
  return est;
}

}  // namespace nestersolve
