// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "nestersolve/analysis.hpp"
#include "nestersolve/multigrid.hpp"
#include "nestersolve/oracles.hpp"
#include "nestersolve/random.hpp"
#include "nestersolve/solvers.hpp"
#include "nestersolve/spectral.hpp"

namespace ns = nestersolve;
using ns::Complex;
using ns::SpectrumBounds;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  const char* title;
  double budget_seconds;
  std::function<Outcome()> check;
};

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

SpectrumBounds random_bounds(ns::SplitMix64& rng, double lo = -1.0, double hi = 1.0) {
  double a, b;
  do {
    a = rng.uniform(lo, hi);
    b = rng.uniform(lo, hi);
  } while (a <= lo || b <= lo);
  if (a > b) std::swap(a, b);
  return {a, b};
}

double endpoint_rate(double c, const SpectrumBounds& b) {
  return std::max(ns::rate_real(c, b.b1), ns::rate_real(c, b.bN));
}

// Multigrid experiment plumbing ------------------------------------------------

struct MgProblem {
  std::shared_ptr<const ns::VCycleSweep> sweep;
  ns::SparseMatrix a;
  ns::Vector rhs;
  ns::Vector x0;
};

MgProblem make_problem(ns::StencilOperator op, const ns::CycleSpec& spec) {
  MgProblem p;
  p.a = op.to_csr();
  const std::size_t n = op.size();
  auto hier = std::make_shared<const ns::MultigridHierarchy>(std::move(op), spec);
  p.sweep = std::make_shared<const ns::VCycleSweep>(std::move(hier), spec);
  p.rhs.assign(n, 0.0);
  p.x0.resize(n);
  ns::SplitMix64 rng(1);
  for (auto& v : p.x0) v = rng.uniform(-1.0, 1.0);
  return p;
}

ns::CycleSpec jacobi_cycle(double omega, std::size_t nu2) {
  ns::CycleSpec spec;
  spec.nu1 = 1;
  spec.nu2 = nu2;
  spec.relax = {ns::RelaxKind::JacobiDamped, omega};
  return spec;
}

struct Race {
  std::size_t plain = 0, nesterov = 0, chebyshev = 0, pcg = 0, gmres = 0;
  bool all_converged = true;
};

Race race(const MgProblem& p, const SpectrumBounds& bounds, const ns::StopRule& stop) {
  Race r;
  auto count = [&](const ns::SolveResult& res) {
    r.all_converged = r.all_converged && res.trace.converged();
    return res.trace.iterations();
  };
  const auto& s = *p.sweep;
  r.plain = count(ns::plain_solve(s, p.a, p.rhs, p.x0, stop));
  r.nesterov = count(ns::nesterov_solve(s, p.a, p.rhs, p.x0, ns::optimal_coefficient(bounds).c_star, stop));
  r.chebyshev = count(ns::chebyshev_solve(s, p.a, p.rhs, p.x0, ns::chebyshev_parameters(bounds), stop));
  r.pcg = count(ns::pcg_solve(p.a, s, p.rhs, p.x0, stop));
  r.gmres = count(ns::gmres_solve(p.a, s, p.rhs, p.x0, stop));
  return r;
}

// Criteria ---------------------------------------------------------------------

Outcome closed_form_vs_companion() {
  ns::SplitMix64 rng(101);
  double worst = 0.0;
  SpectrumBounds worst_b{};
  for (int t = 0; t < 50; ++t) {
    const auto b = random_bounds(rng);
    const auto acc = ns::optimal_coefficient(b);
    const std::vector<Complex> spec{b.b1, b.bN};
    const double err = std::abs(ns::oracle::companion_rate(acc.c_star, spec) - acc.r_star);
    if (err > worst) {
      worst = err;
      worst_b = b;
    }
  }
  return {worst <= 1e-3, format("max |oracle - r*| = %.2e at (%.4f, %.4f)", worst, worst_b.b1, worst_b.bN)};
}

Outcome optimality_grid_search() {
  ns::SplitMix64 rng(102);
  double worst = INFINITY;
  for (int t = 0; t < 20; ++t) {
    const auto b = random_bounds(rng);
    const double r_star = ns::optimal_coefficient(b).r_star;
    for (int k = -999; k <= 999; ++k) {
      worst = std::min(worst, endpoint_rate(k * 1e-3, b) - r_star);
    }
  }
  return {worst >= -1e-6, format("min over grid of (rate - r*) = %.2e", worst)};
}

Outcome property_suite() {
  ns::SplitMix64 rng(103);
  std::size_t bad_c = 0, bad_endpoint = 0, bad_argmin = 0, bad_disc = 0;
  // |c*| < 1 on a dense bounds grid
  for (double b1 = -0.995; b1 < 1.0; b1 += 0.01) {
    for (double bN = b1; bN < 1.0; bN += 0.01) {
      if (!(std::abs(ns::optimal_coefficient({b1, bN}).c_star) < 1.0)) ++bad_c;
    }
  }
  // interval maximum attained at an endpoint
  for (int t = 0; t < 100; ++t) {
    const double c = rng.uniform(-0.999, 0.999);
    const auto b = random_bounds(rng);
    double inner = 0.0;
    for (int k = 0; k <= 1000; ++k) inner = std::max(inner, ns::rate_real(c, b.b1 + (b.bN - b.b1) * k / 1000.0));
    if (inner > endpoint_rate(c, b) + 1e-12) ++bad_endpoint;
  }
  // argmin over c of a single rate is the critical coefficient
  constexpr double step = 1e-4;
  for (int t = 0; t < 100; ++t) {
    const double b = rng.uniform(-0.999, 0.999);
    double best = INFINITY, best_c = 0.0;
    for (double c = -1.0 + step; c < 1.0; c += step) {
      const double r = ns::rate_real(c, b);
      if (r < best) {
        best = r;
        best_c = c;
      }
    }
    if (std::abs(best_c - ns::critical_c(b)) > 2 * step) ++bad_argmin;
  }
  // negative discriminant exactly for same-sign b, c below the critical b
  for (double c = -0.99; c < 0.995; c += 0.01) {
    for (double b = -0.999; b < 1.0; b += 0.0031) {
      const double disc = (1 + c) * (1 + c) * b * b - 4 * c * b;
      if (std::abs(disc) < 1e-12) continue;
      const bool same_sign = (b > 0 && c > 0) || (b < 0 && c < 0);
      const bool predicted = same_sign && std::abs(b) < std::abs(ns::critical_b(c));
      if ((disc < 0) != predicted) ++bad_disc;
    }
  }
  const bool ok = bad_c + bad_endpoint + bad_argmin + bad_disc == 0;
  return {ok, format("violations: |c*|<1 %zu, endpoint max %zu, argmin %zu, discriminant %zu", bad_c,
                     bad_endpoint, bad_argmin, bad_disc)};
}

Outcome robustness_disk() {
  ns::SplitMix64 rng(104);
  double worst = -INFINITY;
  for (int t = 0; t < 50; ++t) {
    const auto b = random_bounds(rng);
    const auto acc = ns::optimal_coefficient(b);
    for (int k = 0; k < 200; ++k) {
      const Complex z = std::polar(acc.robustness_radius * std::sqrt(rng.uniform()), rng.uniform(-kPi, kPi));
      worst = std::max(worst, ns::rate_complex(acc.c_star, z) - acc.r_star);
    }
  }
  struct Case {
    SpectrumBounds b;
    double radius;
  };
  const Case cases[] = {{{-0.3, 0.9}, 0.3}, {{-0.5, 0.9}, 0.5}, {{-0.9, 0.3}, 0.3}, {{-0.9, 0.5}, 0.5}};
  bool radii_ok = true;
  for (const auto& c : cases) radii_ok = radii_ok && ns::optimal_coefficient(c.b).robustness_radius == c.radius;
  return {worst <= 1e-9 && radii_ok,
          format("max (rate - r*) inside disk = %.2e; reference radii %s", worst, radii_ok ? "exact" : "MISMATCH")};
}

Outcome angle_monotonicity() {
  ns::SplitMix64 rng(105);
  std::vector<SpectrumBounds> bounds{{-0.3, 0.9}, {-0.5, 0.9}, {0.0, 0.6}, {-0.6, 0.6}, {0.2, 0.95}};
  while (bounds.size() < 40) {
    const auto b = random_bounds(rng);
    if (std::abs(b.b1) <= b.bN) bounds.push_back(b);
  }
  std::size_t violations = 0, checks = 0;
  double worst_drop = 0.0;
  for (const auto& b : bounds) {
    const double c = ns::optimal_coefficient(b).c_star;
    for (int m = 1; m <= 8; ++m) {
      const double mod = 0.1 * m;
      double prev = ns::rate_complex(c, mod);
      for (int k = 1; k <= 200; ++k) {
        const double theta = kPi * k / 200.0;
        const double r = ns::rate_complex(c, std::polar(mod, theta));
        const double r_neg = ns::rate_complex(c, std::polar(mod, -theta));
        ++checks;
        worst_drop = std::max(worst_drop, prev - r);
        if (r < prev - 1e-12 || std::abs(r - r_neg) > 1e-12) ++violations;
        prev = r;
      }
    }
  }
  return {violations == 0, format("%zu of %zu steps violate (largest drop %.2e)", violations, checks, worst_drop)};
}

Outcome region_containment() {
  std::string detail;
  bool ok = true;
  for (const SpectrumBounds b : {SpectrumBounds{-0.3, 0.9}, SpectrumBounds{-0.5, 0.9}}) {
    const auto map = ns::region_scan(b, ns::RegionGrid::square(-1.0, 1.0, 401), 0);
    std::size_t exceptions = 0;
    double max_im = 0.0;
    for (const auto& p : map.points) {
      if (p.cheb_valid && !p.nesterov_valid) {
        ++exceptions;
        max_im = std::max(max_im, std::abs(p.im));
      }
    }
    const double frac = static_cast<double>(exceptions) / map.points.size();
    ok = ok && frac <= 1e-3;
    detail += format("(%.1f,%.1f): %zu exceptions = %.3f%% (|im| <= %.3f); ", b.b1, b.bN, exceptions,
                     100 * frac, max_im);
  }
  detail += "allowance 0.1%";
  return {ok, detail};
}

Outcome chebyshev_real_superiority() {
  ns::SplitMix64 rng(107);
  double worst = -INFINITY;
  for (int t = 0; t < 50; ++t) {
    auto b = random_bounds(rng);
    if (b.b1 == b.bN) b.bN = std::min(0.999, b.bN + 1e-3);
    worst = std::max(worst, ns::chebyshev_asymptotic_rate(b, b.bN) - ns::optimal_coefficient(b).r_star);
  }
  return {worst < 0.0, format("max (cheb rate - r*) = %.3e", worst)};
}

Outcome damping_sweep() {
  const auto grid = ns::Grid2D::with_intervals(256);
  const auto op = ns::build_poisson_5pt(grid);
  const ns::StopRule stop{1e-8, 400};
  bool ok = true;
  double worst_plain = 0.0, worst_nest = 0.0;
  for (int i = 11; i <= 20; ++i) {
    const double omega = 0.05 * i;
    const auto range = ns::smoothing_range(omega);
    const auto acc = ns::optimal_coefficient({range.b1_hat, range.bN_hat});
    const auto p = make_problem(op, jacobi_cycle(omega, 0));
    const double plain = ns::acf_estimate(ns::plain_solve(*p.sweep, p.a, p.rhs, p.x0, stop).trace);
    const double nest =
        ns::acf_estimate(ns::nesterov_solve(*p.sweep, p.a, p.rhs, p.x0, acc.c_star, stop).trace);
    worst_plain = std::max(worst_plain, std::abs(plain - range.smoothing_factor));
    worst_nest = std::max(worst_nest, std::abs(nest - acc.r_star));
  }
  ok = worst_plain <= 0.05 && worst_nest <= 0.05;

  const auto p08 = make_problem(op, jacobi_cycle(0.8, 0));
  const double plain08 = ns::acf_estimate(ns::plain_solve(*p08.sweep, p08.a, p08.rhs, p08.x0, stop).trace);
  const double w = 8.0 / 13.0;
  const auto range = ns::smoothing_range(w);
  const auto p813 = make_problem(op, jacobi_cycle(w, 0));
  const double nest813 = ns::acf_estimate(
      ns::nesterov_solve(*p813.sweep, p813.a, p813.rhs, p813.x0,
                         ns::optimal_coefficient({range.b1_hat, range.bN_hat}).c_star, stop)
          .trace);
  ok = ok && std::abs(plain08 - 0.60) <= 0.05 && std::abs(nest813 - 0.45) <= 0.05;
  return {ok, format("plain(0.8) %.4f, nesterov(8/13) %.4f, max |pred-meas| plain %.4f nesterov %.4f",
                     plain08, nest813, worst_plain, worst_nest)};
}

Outcome jacobi_v11_ordering() {
  const auto op = ns::build_poisson_5pt(ns::Grid2D::with_intervals(128));
  const auto range = ns::smoothing_range(0.8, 256, 2);
  const auto r = race(make_problem(op, jacobi_cycle(0.8, 1)), {range.b1_hat, range.bN_hat}, {1e-8, 500});
  const bool ok = r.all_converged && r.chebyshev <= r.pcg + 1 && r.pcg + 1 <= r.nesterov && r.nesterov <= r.plain;
  return {ok, format("cheb %zu, pcg %zu, nesterov %zu, plain %zu (gmres %zu); bounds (%.3f, %.3f)", r.chebyshev,
                     r.pcg, r.nesterov, r.plain, r.gmres, range.b1_hat, range.bN_hat)};
}

Outcome redblack_v11_ordering() {
  const auto op = ns::build_poisson_5pt(ns::Grid2D::with_intervals(128));
  ns::CycleSpec spec;
  spec.nu2 = 1;
  spec.relax = {ns::RelaxKind::RedBlackGS, 1.0};
  const auto p = make_problem(op, spec);
  const auto est = ns::power_extreme_eigs(*p.sweep);
  const SpectrumBounds b{std::min(est.dominant, est.opposite), std::max(est.dominant, est.opposite)};
  const auto r = race(p, b, {1e-8, 500});
  const bool ok = r.all_converged && r.gmres <= r.nesterov && r.nesterov <= r.chebyshev;
  return {ok, format("gmres %zu, nesterov %zu, cheb %zu (plain %zu, pcg %zu); power bounds (%.4f, %.4f)", r.gmres,
                     r.nesterov, r.chebyshev, r.plain, r.pcg, b.b1, b.bN)};
}

Outcome diffusion_nesterov() {
  const auto grid = ns::Grid2D::with_intervals(128);
  ns::CycleSpec spec;
  spec.nu2 = 1;
  spec.relax = {ns::RelaxKind::LexGS, 1.0};
  spec.coarsening = ns::Coarsening::Galerkin;
  const ns::StopRule stop{1e-8, 500};
  bool ok = true;
  std::string detail;
  for (auto dist : {ns::CoefficientDistribution::LogNormal, ns::CoefficientDistribution::Uniform}) {
    const auto p = make_problem(ns::build_fem_diffusion(grid, ns::sample_coefficients(grid, dist, 42)), spec);
    const double bN = std::abs(ns::power_extreme_eigs(*p.sweep).dominant);
    const auto acc = ns::optimal_coefficient({0.0, bN});
    const auto plain = ns::plain_solve(*p.sweep, p.a, p.rhs, p.x0, stop);
    const auto nest = ns::nesterov_solve(*p.sweep, p.a, p.rhs, p.x0, acc.c_star, stop);
    const double acf = ns::acf_estimate(nest.trace);
    ok = ok && nest.trace.converged() && nest.trace.iterations() < plain.trace.iterations() &&
         acf <= acc.r_star + 0.05;
    detail += format("%s: nesterov %zu vs plain %zu, acf %.4f vs r* %.4f (bN %.4f); ",
                     dist == ns::CoefficientDistribution::LogNormal ? "lognormal" : "uniform",
                     nest.trace.iterations(), plain.trace.iterations(), acf, acc.r_star, bN);
  }
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

Outcome extended_regime() {
  const ns::DiagonalSweep sweep({-2.0, 0.5});
  const auto a = sweep.system_matrix();
  const ns::Vector rhs(2, 0.0), x0{1.0, 1.0};
  bool plain_diverged = false;
  try {
    const auto res = ns::plain_solve(sweep, a, rhs, x0, {1e-12, 200});
    plain_diverged = !res.trace.converged() &&
                     res.trace.records.back().residual_norm > res.trace.records.front().residual_norm;
  } catch (const ns::SolveDiverged&) {
    plain_diverged = true;
  }
  const auto acc = ns::optimal_coefficient({-2.0, 0.5});
  const auto nest = ns::nesterov_solve(sweep, a, rhs, x0, acc.c_star, {1e-12, 1000});
  const double acf = ns::acf_estimate(nest.trace);
  const bool ok = plain_diverged && nest.trace.converged() && std::abs(acf - (std::sqrt(3.0) - 1.0)) <= 0.02;
  return {ok, format("plain %s; nesterov c* %.5f converged in %zu, acf %.4f (target %.4f)",
                     plain_diverged ? "diverges" : "DOES NOT DIVERGE", acc.c_star, nest.trace.iterations(), acf,
                     std::sqrt(3.0) - 1.0)};
}

Outcome acceleration_ratio_flat() {
  bool ok = true;
  std::string detail;
  for (double bN : {0.3, 0.6, 0.9}) {
    const double a = ns::acceleration_ratio({-bN / 3.0, bN});
    const double b = ns::acceleration_ratio({-0.2 * bN, bN});
    const double c = ns::acceleration_ratio({0.0, bN});
    ok = ok && a == b && b == c;
    detail += format("bN %.1f: %.15g %.15g %.15g; ", bN, a, b, c);
  }
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "closed-form optimal rate matches companion-matrix oracle", 30, closed_form_vs_companion},
      {2, "no momentum on a 1e-3 grid beats the closed-form rate", 10, optimality_grid_search},
      {3, "coefficient range, endpoint maximum, critical argmin, discriminant sign", 30, property_suite},
      {4, "complex eigenvalues inside the robustness disk keep r*", 10, robustness_disk},
      {5, "complex rate nondecreasing in the eigenvalue angle", 5, angle_monotonicity},
      {6, "Chebyshev-valid region inside Nesterov-valid region", 60, region_containment},
      {7, "Chebyshev beats Nesterov on real spectra", 5, chebyshev_real_superiority},
      {8, "damping sweep at 256^2: predicted vs measured factors", 300, damping_sweep},
      {9, "V(1,1)-Jacobi at 128^2: cheb <= pcg+1 <= nesterov <= plain", 120, jacobi_v11_ordering},
      {10, "V(1,1)-RB at 128^2: gmres <= nesterov <= cheb", 120, redblack_v11_ordering},
      {11, "diffusion at 128^2 with bounds (0, bN): nesterov beats plain", 180, diffusion_nesterov},
      {12, "b1 = -2: plain diverges, momentum converges at sqrt(3)-1", 10, extended_regime},
      {13, "acceleration ratio flat for b1/bN in [-1/3, 0]", INFINITY, acceleration_ratio_flat},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.check();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_budget = secs < c.budget_seconds;
    const bool pass = out.pass && in_budget;
    failures += !pass;
    const std::string budget = std::isinf(c.budget_seconds) ? "no budget" : format("budget %.0f s", c.budget_seconds);
    std::printf("criterion %2d %s  %s | %s | %.2f s (%s)%s\n", c.id, pass ? "PASS" : "FAIL", c.title,
                out.detail.c_str(), secs, budget.c_str(), in_budget ? "" : " OVER BUDGET");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
