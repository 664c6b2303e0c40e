#include "nestersolve/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nestersolve/error.hpp"

namespace nestersolve {

namespace {

std::string describe(const SpectrumBounds& b) {
  return "(b1=" + std::to_string(b.b1) + ", bN=" + std::to_string(b.bN) + ")";
}

void require_momentum_range(double c, const char* what) {
  if (!(std::abs(c) < 1.0)) {
    throw InvalidArgument(std::string(what) + ": momentum coefficient must satisfy |c| < 1");
  }
}

// Regime boundaries are compared with a few ulps of slack so that bounds
// built as bN = -3*b1 (or b1 = -3*bN) land on the boundary regime despite
// rounding. g is continuous across both boundaries.
constexpr double kTieSlack = 8 * std::numeric_limits<double>::epsilon();

}  // namespace

void SpectrumBounds::validate() const {
  if (!std::isfinite(b1) || !std::isfinite(bN)) {
    throw InvalidArgument("spectrum bounds must be finite " + describe(*this));
  }
  if (b1 > bN) throw InvalidArgument("spectrum bounds require b1 <= bN " + describe(*this));
  if (!(b1 > -3.0)) throw InvalidArgument("spectrum bounds require b1 > -3 " + describe(*this));
  if (!(bN < 1.0)) throw InvalidArgument("spectrum bounds require bN < 1 " + describe(*this));
}

double SpectrumBounds::radius() const noexcept { return std::max(std::abs(b1), std::abs(bN)); }

std::string_view to_string(Regime regime) noexcept {
  switch (regime) {
    case Regime::Top:
      return "top";
    case Regime::Mid:
      return "mid";
    case Regime::Bot:
      return "bot";
  }
  return "unknown";
}

double critical_b(double c) {
  if (c == -1.0) throw InvalidArgument("critical_b: undefined for c = -1");
  return 4.0 * c / ((1.0 + c) * (1.0 + c));
}

double critical_c(double b) {
  if (!(b < 1.0)) throw InvalidArgument("critical_c: requires b < 1");
  const double s = std::sqrt(1.0 - b);
  return (1.0 - s) / (1.0 + s);
}

double rate_real(double c, double b) {
  require_momentum_range(c, "rate_real");
  if (b == 0.0) return 0.0;
  const bool same_sign = (b > 0.0) == (c > 0.0) && c != 0.0;
  if (same_sign && std::abs(b) < std::abs(critical_b(c))) {
    // complex conjugate roots of equal modulus
    return std::sqrt(c * b);
  }
  const double lead = (1.0 + c) * b;
  const double disc = std::max(lead * lead - 4.0 * c * b, 0.0);
  return 0.5 * std::abs(lead + std::copysign(std::sqrt(disc), b));
}

double rate_complex(double c, Complex b) {
  require_momentum_range(c, "rate_complex");
  const Complex lead = (1.0 + c) * b;
  const Complex root = std::sqrt(lead * lead - 4.0 * c * b);
  return 0.5 * std::max(std::abs(lead + root), std::abs(lead - root));
}

Regime regime_classify(const SpectrumBounds& bounds) {
  const double b1 = bounds.b1;
  const double bN = bounds.bN;
  const double slack = kTieSlack * (std::abs(bN) + 3.0 * std::abs(b1));
  if (bN >= -3.0 * b1 - slack) return Regime::Top;
  if (3.0 * bN <= -b1 + slack) return Regime::Bot;
  return Regime::Mid;
}

OptimalAcceleration optimal_coefficient(const SpectrumBounds& bounds) {
  bounds.validate();
  const double b1 = bounds.b1;
  const double bN = bounds.bN;

  OptimalAcceleration out;
  out.regime = regime_classify(bounds);
  out.extended = bounds.extended();
  switch (out.regime) {
    case Regime::Top:
      out.g = bN;
      out.c_star = critical_c(out.g);
      out.r_star = 1.0 - std::sqrt(1.0 - bN);
      out.robustness_radius = bN / 3.0;
      break;
    case Regime::Mid: {
      const double d = b1 - bN;
      out.g = -8.0 * bN * b1 * (b1 + bN) / (d * d);
      out.c_star = critical_c(out.g);
      out.r_star = rate_real(out.c_star, bN);
      out.robustness_radius = std::min(std::abs(b1), std::abs(bN));
      break;
    }
    case Regime::Bot:
      out.g = b1;
      out.c_star = critical_c(out.g);
      out.r_star = std::sqrt(1.0 - b1) - 1.0;
      out.robustness_radius = -b1 / 3.0;
      break;
  }
  // b1 = bN = 0 lands in Top with g = 0, giving c* = 0 and r* = 0.
  return out;
}

double acceleration_ratio(const SpectrumBounds& bounds) {
  const auto acc = optimal_coefficient(bounds);
  const double rho = bounds.radius();
  if (!(rho < 1.0)) {
    throw InvalidArgument("acceleration_ratio: unaccelerated divergent; AR undefined " +
                          describe(bounds));
  }
  if (!(rho > 0.0)) {
    throw InvalidArgument("acceleration_ratio: zero spectrum; AR undefined");
  }
  return std::log(acc.r_star) / std::log(rho);
}

double ChebyshevParams::beta(std::size_t k, double previous) const noexcept {
  if (k <= 1) return 1.0;
  if (k == 2) return 1.0 / (1.0 - 0.5 * sigma * sigma);
  return 1.0 / (1.0 - 0.25 * sigma * sigma * previous);
}

double ChebyshevParams::beta_limit() const noexcept {
  return 2.0 / (1.0 + std::sqrt(1.0 - sigma * sigma));
}

ChebyshevParams chebyshev_parameters(const SpectrumBounds& bounds) {
  bounds.validate();
  if (!(bounds.b1 > -1.0)) {
    throw InvalidArgument("chebyshev_parameters: requires b1 > -1 " + describe(bounds));
  }
  const double denom = 2.0 - bounds.b1 - bounds.bN;
  return ChebyshevParams{2.0 / denom, (bounds.bN - bounds.b1) / denom};
}

double chebyshev_asymptotic_rate(const SpectrumBounds& bounds, Complex b) {
  const double b1 = bounds.b1;
  const double bN = bounds.bN;
  if (bN == b1) {
    // Collapsed interval: the extrapolated iteration gamma*b + 1 - gamma.
    return std::abs(b - b1) / (1.0 - b1);
  }
  const double width = bN - b1;
  const Complex t = (2.0 * b - b1 - bN) / width;
  const Complex root = std::sqrt(t * t - 1.0);
  // exterior branch of the inverse Joukowski map
  double numerator = std::abs(t + root);
  if (numerator < 1.0) numerator = std::abs(t - root);
  const double t1 = (2.0 - b1 - bN) / width;
  return numerator / (t1 + std::sqrt(t1 * t1 - 1.0));
}

}  // namespace nestersolve
