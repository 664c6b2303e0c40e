#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nestersolve/multigrid.hpp"
#include "nestersolve/solvers.hpp"

namespace nestersolve::cli {

enum class ProblemKind { Poisson, DiffusionLogNormal, DiffusionUniform, Diagonal };
enum class Method { None, Nesterov, Chebyshev, Pcg, Gmres };
enum class BoundSource { Explicit, Smoothing, Power, Analytic };

struct BoundsConfig {
  BoundSource source = BoundSource::Power;
  bool source_given = false;  ///< false: pick the default for the problem
  std::optional<double> b1;
  std::optional<double> bN;
  /// Replace the estimated lower bound by 0 (power source only).
  bool assume_b1_zero = false;
  std::size_t power_iters = 1000;
  double power_tol = 1e-4;
  std::optional<double> power_shift;
};

/// One solve. JSON schema (all keys optional except `problem`):
///   name, problem, n (mesh intervals per side), seed, eigenvalues (diagonal),
///   relax {kind: jacobi|rb|lex, omega}, nu1, nu2, coarsening, coarsest_n,
///   method, bounds {source, b1, bN, assume_b1_zero, power_iters, power_tol, shift},
///   tol, max_iter, acf_window.
struct ExperimentConfig {
  std::string name;
  ProblemKind problem = ProblemKind::Poisson;
  std::size_t n = 128;
  std::uint64_t seed = 1;
  std::vector<double> eigenvalues;
  CycleSpec cycle;
  bool coarsening_given = false;
  Method method = Method::None;
  BoundsConfig bounds;
  StopRule stop;
  std::size_t acf_window = 5;

  void validate() const;
};

ExperimentConfig parse_experiment(const nlohmann::json& j);

/// Either a single experiment or {"base": {...}, "runs": [{...}, ...]} where
/// each run is merged over base.
std::vector<ExperimentConfig> parse_experiment_list(const nlohmann::json& j);

nlohmann::json load_json_file(const std::string& path);

std::string to_string(ProblemKind kind);
std::string to_string(Method method);
std::string to_string(BoundSource source);
std::string to_string(RelaxKind kind);
std::string to_string(Coarsening kind);

ProblemKind parse_problem(const std::string& s);
Method parse_method(const std::string& s);
BoundSource parse_bound_source(const std::string& s);
RelaxKind parse_relax_kind(const std::string& s);
Coarsening parse_coarsening(const std::string& s);

}  // namespace nestersolve::cli
