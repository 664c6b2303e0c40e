#include "nestersolve/cli/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "nestersolve/error.hpp"
#include "nestersolve/multigrid.hpp"
#include "nestersolve/random.hpp"

namespace nestersolve::cli {

using nlohmann::json;

Problem build_problem(const ExperimentConfig& cfg) {
  cfg.validate();
  Problem p;
  if (cfg.problem == ProblemKind::Diagonal) {
    auto sweep = std::make_shared<DiagonalSweep>(cfg.eigenvalues);
    p.matrix = std::make_shared<SparseMatrix>(sweep->system_matrix());
    p.sweep = std::move(sweep);
  } else {
    const Grid2D grid = Grid2D::with_intervals(cfg.n);
    StencilOperator op = [&] {
      switch (cfg.problem) {
        case ProblemKind::DiffusionLogNormal:
          return build_fem_diffusion(
              grid, sample_coefficients(grid, CoefficientDistribution::LogNormal, cfg.seed));
        case ProblemKind::DiffusionUniform:
          return build_fem_diffusion(
              grid, sample_coefficients(grid, CoefficientDistribution::Uniform, cfg.seed));
        default:
          return build_poisson_5pt(grid);
      }
    }();
    p.matrix = std::make_shared<SparseMatrix>(op.to_csr());
    auto hier = std::make_shared<const MultigridHierarchy>(std::move(op), cfg.cycle);
    p.sweep = std::make_shared<VCycleSweep>(std::move(hier), cfg.cycle);
  }
  const std::size_t dim = p.sweep->size();
  p.rhs.assign(dim, 0.0);
  p.x0.resize(dim);
  // start vector stream is independent of the coefficient stream
  SplitMix64 rng(cfg.seed ^ 0x9E3779B97F4A7C15ULL);
  for (auto& v : p.x0) v = rng.uniform(-1.0, 1.0);
  return p;
}

ResolvedBounds resolve_bounds(const ExperimentConfig& cfg, const Problem& problem) {
  ResolvedBounds out;
  out.source = cfg.bounds.source;
  out.assume_b1_zero = cfg.bounds.assume_b1_zero;
  switch (cfg.bounds.source) {
    case BoundSource::Explicit:
      out.bounds = {*cfg.bounds.b1, *cfg.bounds.bN};
      break;
    case BoundSource::Analytic: {
      const auto [lo, hi] = std::minmax_element(cfg.eigenvalues.begin(), cfg.eigenvalues.end());
      out.bounds = {*lo, *hi};
      break;
    }
    case BoundSource::Smoothing: {
      const SymbolRange range =
          smoothing_range(cfg.cycle.relax.omega, 256, cfg.cycle.nu1 + cfg.cycle.nu2);
      out.smoothing = range;
      out.bounds = {range.b1_hat, range.bN_hat};
      break;
    }
    case BoundSource::Power: {
      PowerOptions opts;
      opts.iters = cfg.bounds.power_iters;
      opts.tol = cfg.bounds.power_tol;
      opts.shift = cfg.bounds.power_shift;
      opts.seed = cfg.seed;
      const PowerEstimate est = power_extreme_eigs(*problem.sweep, opts);
      out.power = est;
      if (cfg.bounds.assume_b1_zero) {
        out.bounds = {0.0, std::abs(est.dominant)};
      } else {
        out.bounds = {std::min(est.dominant, est.opposite), std::max(est.dominant, est.opposite)};
      }
      break;
    }
  }
  if (cfg.bounds.assume_b1_zero && cfg.bounds.source != BoundSource::Power) out.bounds.b1 = 0.0;
  out.bounds.validate();
  return out;
}

json to_json(const SpectrumBounds& b) { return {{"b1", b.b1}, {"bN", b.bN}}; }

json to_json(const OptimalAcceleration& a) {
  return {{"c_star", a.c_star},
          {"r_star", a.r_star},
          {"regime", to_string(a.regime)},
          {"robustness_radius", a.robustness_radius},
          {"extended_regime", a.extended}};
}

json to_json(const PowerEstimate& p) {
  return {{"dominant", p.dominant},
          {"opposite", p.opposite},
          {"complex_dominant", p.complex_dominant},
          {"shift", p.shift},
          {"iterations", p.iterations}};
}

json to_json(const SymbolRange& s) {
  return {{"b1_hat", s.b1_hat}, {"bN_hat", s.bN_hat}, {"smoothing_factor", s.smoothing_factor}};
}

namespace {

json describe_problem(const ExperimentConfig& cfg, std::size_t unknowns) {
  json j{{"problem", to_string(cfg.problem)}, {"unknowns", unknowns}, {"seed", cfg.seed}};
  if (cfg.problem == ProblemKind::Diagonal) return j;
  j["n"] = cfg.n;
  json relax{{"kind", to_string(cfg.cycle.relax.kind)}};
  if (cfg.cycle.relax.kind == RelaxKind::JacobiDamped) relax["omega"] = cfg.cycle.relax.omega;
  j["cycle"] = {{"nu1", cfg.cycle.nu1},
                {"nu2", cfg.cycle.nu2},
                {"relax", relax},
                {"coarsening", to_string(cfg.cycle.coarsening)},
                {"coarsest_n", cfg.cycle.coarsest_n}};
  return j;
}

json describe_bounds(const ResolvedBounds& rb) {
  json j = to_json(rb.bounds);
  j["source"] = to_string(rb.source);
  j["assume_b1_zero"] = rb.assume_b1_zero;
  if (rb.power) j["power"] = to_json(*rb.power);
  if (rb.smoothing) j["smoothing"] = to_json(*rb.smoothing);
  return j;
}

bool needs_bounds(Method m) { return m == Method::Nesterov || m == Method::Chebyshev; }

}  // namespace

RunOutcome run_experiment(const ExperimentConfig& cfg, bool include_timing) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  const Problem problem = build_problem(cfg);

  RunOutcome out;
  json& s = out.summary;
  s["name"] = cfg.name;
  s["method"] = to_string(cfg.method);
  s["config"] = describe_problem(cfg, problem.sweep->size());
  s["tol"] = cfg.stop.tol;
  s["max_iter"] = cfg.stop.max_iter;

  std::optional<ResolvedBounds> rb;
  if (needs_bounds(cfg.method)) {
    rb = resolve_bounds(cfg, problem);
    s["bounds"] = describe_bounds(*rb);
  }
  const double setup_seconds = std::chrono::duration<double>(clock::now() - t0).count();

  const auto& sweep = *problem.sweep;
  const auto& a = *problem.matrix;
  try {
    SolveResult result;
    switch (cfg.method) {
      case Method::None:
        result = plain_solve(sweep, a, problem.rhs, problem.x0, cfg.stop);
        break;
      case Method::Nesterov: {
        const OptimalAcceleration acc = optimal_coefficient(rb->bounds);
        s["acceleration"] = to_json(acc);
        result = nesterov_solve(sweep, a, problem.rhs, problem.x0, acc.c_star, cfg.stop);
        break;
      }
      case Method::Chebyshev: {
        const ChebyshevParams params = chebyshev_parameters(rb->bounds);
        s["chebyshev"] = {{"gamma", params.gamma}, {"sigma", params.sigma}};
        result = chebyshev_solve(sweep, a, problem.rhs, problem.x0, params, cfg.stop);
        break;
      }
      case Method::Pcg:
        result = pcg_solve(a, sweep, problem.rhs, problem.x0, cfg.stop);
        break;
      case Method::Gmres:
        result = gmres_solve(a, sweep, problem.rhs, problem.x0, cfg.stop);
        break;
    }
    out.trace = std::move(result.trace);
  } catch (const SolveDiverged& e) {
    out.trace = e.trace();
    out.diverged = true;
    out.error = e.what();
  }

  const auto& recs = out.trace.records;
  s["status"] = out.diverged ? "diverged" : out.trace.converged() ? "converged" : "max_iterations";
  s["iterations"] = out.trace.iterations();
  if (!recs.empty() && recs.front().residual_norm > 0.0 && std::isfinite(recs.back().residual_norm)) {
    s["relative_residual"] = recs.back().residual_norm / recs.front().residual_norm;
  }
  if (recs.size() > cfg.acf_window && !out.diverged) {
    s["acf"] = acf_estimate(out.trace, cfg.acf_window);
  } else {
    s["acf"] = nullptr;
  }
  if (include_timing) {
    s["setup_seconds"] = setup_seconds;
    s["solve_seconds"] = recs.empty() ? 0.0 : recs.back().seconds;
  }
  if (out.diverged) s["error"] = out.error;
  return out;
}

}  // namespace nestersolve::cli
