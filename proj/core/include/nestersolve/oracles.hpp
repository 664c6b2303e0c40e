#pragma once

// Brute-force reference computations. They share no code path with the
// closed-form results in spectral.hpp and exist to check them.

#include <cstddef>
#include <span>
#include <variant>

#include "nestersolve/spectral.hpp"

namespace nestersolve::oracle {

/// Spectral radius of the 2N x 2N companion matrix
///   [(1+c)B  -cB]
///   [  I      0 ]
/// for a B realizing `spectrum`. Entries with nonzero imaginary part stand for
/// a conjugate pair and become a 2x2 rotation-scaling block.
double companion_rate(double c, std::span<const Complex> spectrum,
                      std::size_t iters = 2000, double tol = 1e-3);

struct NesterovScheme {
  double c = 0.0;
};
struct ChebyshevScheme {
  ChebyshevParams params;
};
using Scheme = std::variant<NesterovScheme, ChebyshevScheme>;

/// Runs the scalar error recurrence of the scheme with iteration "matrix" b
/// and returns the geometric mean of the last iters/4 per-step growth factors.
/// Growth is measured on the recurrence state (e_k, e_{k-1}).
double scalar_recurrence_rate(const Scheme& scheme, Complex b, std::size_t iters = 2000);

}  // namespace nestersolve::oracle
