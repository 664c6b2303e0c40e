#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>

#include "nestersolve/solvers.hpp"

namespace nestersolve {

/// Fourier symbol of damped Jacobi on the five-point Laplacian:
/// 1 - w + (w/2)(cos t1 + cos t2).
double jacobi_symbol(double omega, double theta1, double theta2);

struct SymbolRange {
  double b1_hat = 0.0;
  double bN_hat = 0.0;
  double smoothing_factor = 0.0;
};

/// Range of the symbol raised to `sweeps` over the high-frequency set
/// max(t1, t2) >= pi/2, sampled on a resolution x resolution grid of
/// [0, pi]^2 plus the corners of the set.
SymbolRange smoothing_range(double omega, std::size_t resolution = 256, std::size_t sweeps = 1);

struct PowerOptions {
  std::size_t iters = 1000;
  /// Relative eigen-residual at which the direction counts as converged.
  double tol = 1e-4;
  /// Shift for the opposite end; defaults to the dominant estimate.
  std::optional<double> shift;
  std::uint64_t seed = 0x5EED;

  void validate() const;
};

struct PowerEstimate {
  double dominant = 0.0;
  double opposite = 0.0;
  /// Set when the dominant direction never settled; `dominant` is then the
  /// growth rate (a modulus) rather than a signed eigenvalue.
  bool complex_dominant = false;
  double shift = 0.0;
  std::size_t iterations = 0;
};

/// Extreme eigenvalues of the error propagator E(v) = sweep(v, 0) - sweep(0, 0).
PowerEstimate power_extreme_eigs(const StationarySweep& sweep, const PowerOptions& opts = {});

}  // namespace nestersolve
