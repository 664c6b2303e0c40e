#pragma once

#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "nestersolve/analysis.hpp"
#include "nestersolve/cli/config.hpp"
#include "nestersolve/linalg.hpp"
#include "nestersolve/solvers.hpp"
#include "nestersolve/spectral.hpp"

namespace nestersolve::cli {

/// A discretized problem with its stationary sweep. The right-hand side is
/// zero and the start vector uniform in [-1, 1], so the iterate is the error.
struct Problem {
  std::shared_ptr<const StationarySweep> sweep;
  std::shared_ptr<const SparseMatrix> matrix;
  Vector rhs;
  Vector x0;
};

Problem build_problem(const ExperimentConfig& cfg);

struct ResolvedBounds {
  SpectrumBounds bounds;
  BoundSource source = BoundSource::Explicit;
  bool assume_b1_zero = false;
  std::optional<PowerEstimate> power;
  std::optional<SymbolRange> smoothing;
};

ResolvedBounds resolve_bounds(const ExperimentConfig& cfg, const Problem& problem);

struct RunOutcome {
  nlohmann::json summary;
  IterationTrace trace;
  bool diverged = false;
  std::string error;
};

/// Builds, estimates bounds when the method needs them, and solves.
/// Divergence is reported in the outcome rather than thrown.
RunOutcome run_experiment(const ExperimentConfig& cfg, bool include_timing = true);

nlohmann::json to_json(const SpectrumBounds& b);
nlohmann::json to_json(const OptimalAcceleration& a);
nlohmann::json to_json(const PowerEstimate& p);
nlohmann::json to_json(const SymbolRange& s);

}  // namespace nestersolve::cli
