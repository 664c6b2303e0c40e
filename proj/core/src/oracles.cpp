#include "nestersolve/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "nestersolve/error.hpp"
#include "nestersolve/linalg.hpp"

namespace nestersolve::oracle {

namespace {

// Real block-diagonal B with the requested spectrum.
DenseMatrix realize_spectrum(std::span<const Complex> spectrum) {
  std::size_t n = 0;
  for (const auto& b : spectrum) n += (b.imag() == 0.0) ? 1 : 2;
  DenseMatrix m(n, n);
  std::size_t i = 0;
  for (const auto& b : spectrum) {
    if (b.imag() == 0.0) {
      m(i, i) = b.real();
      i += 1;
    } else {
      m(i, i) = b.real();
      m(i, i + 1) = -b.imag();
      m(i + 1, i) = b.imag();
      m(i + 1, i + 1) = b.real();
      i += 2;
    }
  }
  return m;
}

}  // namespace

double companion_rate(double c, std::span<const Complex> spectrum, std::size_t iters,
                      double tol) {
  if (!(std::abs(c) < 1.0)) throw InvalidArgument("companion_rate: requires |c| < 1");
  if (spectrum.empty()) throw InvalidArgument("companion_rate: empty spectrum");
  const DenseMatrix b = realize_spectrum(spectrum);
  const std::size_t n = b.rows();

  DenseMatrix gamma(2 * n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      gamma(i, j) = (1.0 + c) * b(i, j);
      gamma(i, n + j) = -c * b(i, j);
    }
    gamma(n + i, i) = 1.0;
  }
  const LinearMap apply = [&gamma](std::span<const double> x, std::span<double> y) {
    const Vector out = matvec(gamma, x);
    std::copy(out.begin(), out.end(), y.begin());
  };
  return spectral_radius_estimate(apply, 2 * n, iters, tol);
}

double scalar_recurrence_rate(const Scheme& scheme, Complex b, std::size_t iters) {
  if (iters < 100) throw InvalidArgument("scalar_recurrence_rate: iters must be >= 100");

  Complex prev = 1.0;
  Complex cur;
  // step(k, cur, prev) -> e_{k+1}, for k >= 1
  const auto step = [&](std::size_t k, double& beta) -> Complex {
    if (const auto* n = std::get_if<NesterovScheme>(&scheme)) {
      return b * ((1.0 + n->c) * cur - n->c * prev);
    }
    const auto& p = std::get<ChebyshevScheme>(scheme).params;
    beta = p.beta(k + 1, beta);
    return beta * (p.gamma * b + 1.0 - p.gamma) * cur + (1.0 - beta) * prev;
  };

  double beta = 1.0;
  if (const auto* ch = std::get_if<ChebyshevScheme>(&scheme)) {
    cur = (ch->params.gamma * b + 1.0 - ch->params.gamma) * prev;
  } else {
    cur = b * prev;
  }

  const auto state_norm = [&] { return std::hypot(std::abs(cur), std::abs(prev)); };
  std::vector<double> logs;
  logs.reserve(iters);
  double norm = state_norm();
  for (std::size_t k = 1; k < iters; ++k) {
    const Complex next = step(k, beta);
    prev = cur;
    cur = next;
    const double next_norm = state_norm();
    if (!std::isfinite(next_norm)) throw Divergence("scalar_recurrence_rate: divergent recurrence");
    if (next_norm == 0.0) return 0.0;
    logs.push_back(std::log(next_norm / norm));
    // rescale the (linear) state to stay in range
    cur /= next_norm;
    prev /= next_norm;
    norm = 1.0;
  }
  const std::size_t m = std::max<std::size_t>(1, iters / 4);
  double sum = 0.0;
  for (std::size_t i = logs.size() - m; i < logs.size(); ++i) sum += logs[i];
  return std::exp(sum / static_cast<double>(m));
}

}  // namespace nestersolve::oracle
