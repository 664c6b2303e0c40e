#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <string_view>
#include <vector>

namespace nestersolve {

using Complex = std::complex<double>;

/// Smallest and largest real eigenvalues of a stationary iteration matrix.
///
/// Valid bounds satisfy -3 < b1 <= bN < 1. Momentum still converges for
/// b1 in (-3, -1], where the plain iteration diverges; such bounds are
/// reported as "extended".
struct SpectrumBounds {
  double b1 = 0.0;
  double bN = 0.0;

  /// Throws InvalidArgument when the bounds are out of range or unordered.
  void validate() const;
  bool extended() const noexcept { return b1 <= -1.0; }
  /// Spectral radius of the real spectrum, max(|b1|, |bN|).
  double radius() const noexcept;
};

/// Which extreme eigenvalue determines the optimal momentum coefficient.
enum class Regime {
  Top,  ///< bN >= -3 b1: c* depends only on bN
  Mid,  ///< both endpoints contribute equally
  Bot,  ///< bN <= -b1/3: c* depends only on b1
};

std::string_view to_string(Regime regime) noexcept;

struct OptimalAcceleration {
  double c_star = 0.0;
  double r_star = 0.0;
  Regime regime = Regime::Top;
  /// Complex eigenvalues with modulus at most this radius leave c* and r*
  /// unchanged.
  double robustness_radius = 0.0;
  /// Eigenvalue whose critical coefficient equals c*.
  double g = 0.0;
  /// b1 <= -1: outside the range where the robustness radius is established.
  bool extended = false;
};

/// Critical eigenvalue 4c/(1+c)^2 at which the momentum quadratic has a
/// double root. Throws for c = -1.
double critical_b(double c);

/// Momentum coefficient (1 - sqrt(1-b)) / (1 + sqrt(1-b)) minimizing the
/// accelerated rate of a single eigenvalue b. Requires b < 1.
double critical_c(double b);

/// Asymptotic rate of momentum c acting on the real eigenvalue b: the
/// largest root modulus of lambda^2 - (1+c) b lambda + c b. Requires |c| < 1.
double rate_real(double c, double b);

/// Same quantity for a complex eigenvalue, computed in complex arithmetic.
double rate_complex(double c, Complex b);

Regime regime_classify(const SpectrumBounds& bounds);

/// Optimal fixed momentum for the given extreme eigenvalues.
OptimalAcceleration optimal_coefficient(const SpectrumBounds& bounds);

/// log r* / log rho(B): asymptotic ratio of plain to accelerated iteration
/// counts. Throws InvalidArgument when rho(B) is not in (0, 1).
double acceleration_ratio(const SpectrumBounds& bounds);

/// Parameters of the Chebyshev semi-iteration built from b1 and bN only.
struct ChebyshevParams {
  double gamma = 1.0;  ///< extrapolation factor 2 / (2 - b1 - bN)
  double sigma = 0.0;  ///< spectral radius of the extrapolated iteration

  /// beta_k of the three-term recurrence, given beta_{k-1}. k counts from 1:
  /// beta_1 = 1, beta_2 = 1 / (1 - sigma^2/2),
  /// beta_{k+1} = 1 / (1 - sigma^2 beta_k / 4).
  double beta(std::size_t k, double previous) const noexcept;
  /// Fixed point of the recurrence, 2 / (1 + sqrt(1 - sigma^2)).
  double beta_limit() const noexcept;
};

/// Requires b1 > -1.
ChebyshevParams chebyshev_parameters(const SpectrumBounds& bounds);

/// Asymptotic convergence factor of Chebyshev acceleration tuned for
/// [b1, bN] on an eigenvalue b anywhere in the complex plane.
double chebyshev_asymptotic_rate(const SpectrumBounds& bounds, Complex b);

// Complex-plane scans -------------------------------------------------------

/// Rectangular sample grid, row-major with rows of constant imaginary part
/// (ascending) and columns of ascending real part.
struct RegionGrid {
  double re_min = -1.0;
  double re_max = 1.0;
  double im_min = -1.0;
  double im_max = 1.0;
  double step = 0.01;

  /// Square grid over [lo, hi]^2 with `points` samples per axis.
  static RegionGrid square(double lo, double hi, std::size_t points);

  std::size_t columns() const;
  std::size_t rows() const;
  double re(std::size_t column) const noexcept { return re_min + step * column; }
  double im(std::size_t row) const noexcept { return im_min + step * row; }
};

struct RegionPoint {
  double re = 0.0;
  double im = 0.0;
  double nesterov_rate = 0.0;
  double cheb_rate = 0.0;
  bool nesterov_valid = false;
  bool cheb_valid = false;
};

struct RegionMap {
  SpectrumBounds bounds;
  OptimalAcceleration acceleration;
  RegionGrid grid;
  std::vector<RegionPoint> points;
};

/// A point is valid for a scheme when its rate does not exceed r* + 1e-12.
inline constexpr double kRegionValidityTolerance = 1e-12;

/// Evaluates both schemes at every grid point. `threads` = 0 picks the
/// hardware concurrency; output order does not depend on it.
RegionMap region_scan(const SpectrumBounds& bounds, const RegionGrid& grid,
                      unsigned threads = 1);

/// CSV with header re,im,nesterov_rate,cheb_rate,nesterov_valid,cheb_valid.
void write_region_csv(std::ostream& out, const RegionMap& map);

}  // namespace nestersolve
