#include "nestersolve/cli/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "nestersolve/analysis.hpp"
#include "nestersolve/cli/config.hpp"
#include "nestersolve/cli/experiment.hpp"
#include "nestersolve/error.hpp"
#include "nestersolve/spectral.hpp"

namespace nestersolve::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct GlobalOptions {
  bool json = false;
  bool no_timing = false;
  std::optional<std::uint64_t> seed;
};

/// Exit status reported after the command body ran; divergence is a
/// completed run with a failure status.
struct CommandFailed : Error {
  using Error::Error;
};

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path);
  if (!f) throw Error("cannot write '" + path.string() + "'");
  return f;
}

unsigned worker_threads() {
  if (const char* env = std::getenv("NESTERSOLVE_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return 0;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void print_table(std::ostream& out, const json& j, const std::string& prefix = "") {
  for (const auto& [key, value] : j.items()) {
    if (value.is_object()) {
      print_table(out, value, prefix + key + ".");
    } else if (value.is_number_float()) {
      out << prefix << key << " " << fmt(value.get<double>()) << "\n";
    } else if (value.is_string()) {
      out << prefix << key << " " << value.get<std::string>() << "\n";
    } else {
      out << prefix << key << " " << value.dump() << "\n";
    }
  }
}

void emit(std::ostream& out, const json& j, bool as_json) {
  if (as_json) {
    out << j.dump(2) << "\n";
  } else {
    print_table(out, j);
  }
}

// coef ----------------------------------------------------------------------

json coef_report(const SpectrumBounds& b) {
  const OptimalAcceleration acc = optimal_coefficient(b);
  json j = to_json(b);
  j.update(to_json(acc));
  try {
    j["acceleration_ratio"] = acceleration_ratio(b);
  } catch (const InvalidArgument&) {
    j["acceleration_ratio"] = nullptr;
  }
  return j;
}

// region --------------------------------------------------------------------

json region_summary(const RegionMap& map) {
  std::size_t nesterov = 0, cheb = 0, cheb_only = 0, disk = 0, disk_violations = 0;
  const double radius = map.acceleration.robustness_radius;
  for (const auto& p : map.points) {
    nesterov += p.nesterov_valid;
    cheb += p.cheb_valid;
    cheb_only += p.cheb_valid && !p.nesterov_valid;
    if (std::hypot(p.re, p.im) <= radius) {
      ++disk;
      disk_violations += !p.nesterov_valid;
    }
  }
  const double total = static_cast<double>(map.points.size());
  return {{"points", map.points.size()},
          {"nesterov_valid", nesterov},
          {"cheb_valid", cheb},
          {"cheb_not_nesterov", cheb_only},
          {"cheb_not_nesterov_fraction", total > 0 ? cheb_only / total : 0.0},
          {"disk_points", disk},
          {"disk_violations", disk_violations}};
}

// solve / compare -------------------------------------------------------------

void apply_overrides(ExperimentConfig& cfg, const GlobalOptions& g) {
  if (g.seed) cfg.seed = *g.seed;
}

json write_outcome(const ExperimentConfig& cfg, RunOutcome& outcome, const std::optional<fs::path>& dir,
                   bool include_timing) {
  if (dir) {
    const fs::path csv = *dir / (cfg.name + ".csv");
    auto f = open_output(csv);
    write_trace_csv(f, outcome.trace, include_timing);
    outcome.summary["trace_csv"] = csv.string();
  }
  return outcome.summary;
}

void write_summary(const json& summary, const std::optional<fs::path>& dir) {
  if (!dir) return;
  auto f = open_output(*dir / "summary.json");
  f << summary.dump(2) << "\n";
}

// damping-sweep -----------------------------------------------------------------

struct SweepArgs {
  double omega_min = 0.55;
  double omega_max = 1.0;
  double step = 0.05;
  std::size_t n = 256;
  std::size_t nu1 = 1;
  std::size_t nu2 = 0;
  std::size_t max_iter = 400;
  double tol = 1e-8;
  std::string out;
};

json damping_sweep(const SweepArgs& a, const GlobalOptions& g) {
  if (!(a.omega_min > 0.0 && a.omega_max <= 1.0 && a.omega_min <= a.omega_max)) {
    throw InvalidArgument("damping-sweep: need 0 < omega-min <= omega-max <= 1");
  }
  if (!(a.step > 0.0)) throw InvalidArgument("damping-sweep: step must be positive");
  const auto count =
      static_cast<std::size_t>(std::floor((a.omega_max - a.omega_min) / a.step + 1e-9)) + 1;

  auto f = open_output(a.out);
  f << "omega,b1,bN,plain_pred,nesterov_pred,plain_meas,nesterov_meas\n";
  json rows = json::array();
  std::optional<double> best_omega;
  double best_pred = INFINITY;
  for (std::size_t i = 0; i < count; ++i) {
    const double omega = std::min(1.0, a.omega_min + a.step * static_cast<double>(i));
    ExperimentConfig cfg;
    cfg.problem = ProblemKind::Poisson;
    cfg.n = a.n;
    cfg.seed = g.seed.value_or(1);
    cfg.cycle.nu1 = a.nu1;
    cfg.cycle.nu2 = a.nu2;
    cfg.cycle.relax = {RelaxKind::JacobiDamped, omega};
    cfg.stop = {a.tol, a.max_iter};
    cfg.bounds.source = BoundSource::Smoothing;

    const SymbolRange range = smoothing_range(omega, 256, a.nu1 + a.nu2);
    const OptimalAcceleration acc = optimal_coefficient({range.b1_hat, range.bN_hat});

    cfg.method = Method::None;
    const RunOutcome plain = run_experiment(cfg, false);
    cfg.method = Method::Nesterov;
    const RunOutcome nest = run_experiment(cfg, false);
    auto measured = [](const RunOutcome& o) {
      return o.summary["acf"].is_number() ? o.summary["acf"].get<double>() : NAN;
    };
    const double plain_meas = measured(plain);
    const double nest_meas = measured(nest);

    f << fmt(omega) << "," << fmt(range.b1_hat) << "," << fmt(range.bN_hat) << ","
      << fmt(range.smoothing_factor) << "," << fmt(acc.r_star) << "," << fmt(plain_meas) << ","
      << fmt(nest_meas) << "\n";
    rows.push_back({{"omega", omega},
                    {"b1", range.b1_hat},
                    {"bN", range.bN_hat},
                    {"plain_pred", range.smoothing_factor},
                    {"nesterov_pred", acc.r_star},
                    {"plain_meas", plain_meas},
                    {"nesterov_meas", nest_meas},
                    {"plain_status", plain.summary["status"]},
                    {"nesterov_status", nest.summary["status"]}});
    if (acc.r_star < best_pred) {
      best_pred = acc.r_star;
      best_omega = omega;
    }
  }
  return {{"csv", a.out},
          {"n", a.n},
          {"rows", rows},
          {"best_nesterov_omega", *best_omega},
          {"best_nesterov_pred", best_pred}};
}

// estimate ---------------------------------------------------------------------

json estimate(ExperimentConfig cfg, std::optional<std::size_t> iters, std::optional<double> shift) {
  if (iters) cfg.bounds.power_iters = *iters;
  if (shift) cfg.bounds.power_shift = *shift;
  cfg.bounds.source = BoundSource::Power;
  cfg.bounds.assume_b1_zero = false;
  const Problem problem = build_problem(cfg);
  PowerOptions opts;
  opts.iters = cfg.bounds.power_iters;
  opts.tol = cfg.bounds.power_tol;
  opts.shift = cfg.bounds.power_shift;
  opts.seed = cfg.seed;
  json j;
  j["problem"] = to_string(cfg.problem);
  j["unknowns"] = problem.sweep->size();
  j["power"] = to_json(power_extreme_eigs(*problem.sweep, opts));
  if (cfg.problem == ProblemKind::Poisson && cfg.cycle.relax.kind == RelaxKind::JacobiDamped) {
    j["smoothing"] = to_json(smoothing_range(cfg.cycle.relax.omega, 256, cfg.cycle.nu1 + cfg.cycle.nu2));
  }
  return j;
}

void report_error(std::ostream& err, const char* type, const std::string& message) {
  err << json{{"error", {{"type", type}, {"message", message}}}}.dump() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optimal momentum and Chebyshev acceleration for stationary solvers", "nestersolve"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_flag("--json", g.json, "Machine-readable output");
  app.add_flag("--no-timing", g.no_timing, "Omit wall-clock timings so reruns are byte-identical");
  app.add_option("--seed", g.seed, "Seed for coefficients and start vectors");

  std::function<void()> action;

  double b1 = 0.0, bN = 0.0;
  auto* coef = app.add_subcommand("coef", "Optimal coefficient, rate, regime and robustness radius");
  coef->add_option("--b1", b1, "Smallest eigenvalue of the iteration matrix")->required();
  coef->add_option("--bN", bN, "Largest eigenvalue of the iteration matrix")->required();
  coef->callback([&] {
    action = [&] {
      SpectrumBounds b{b1, bN};
      b.validate();
      emit(out, coef_report(b), g.json);
    };
  });

  std::size_t grid_points = 401;
  double extent = 1.0;
  std::string region_out;
  auto* region = app.add_subcommand("region", "Scan the complex plane for Nesterov and Chebyshev rates");
  region->add_option("--b1", b1)->required();
  region->add_option("--bN", bN)->required();
  region->add_option("--grid", grid_points, "Samples per axis")->check(CLI::Range(3, 100000));
  region->add_option("--extent", extent, "Scan [-extent, extent]^2")->check(CLI::PositiveNumber);
  region->add_option("--out", region_out, "CSV output path")->required();
  region->callback([&] {
    action = [&] {
      SpectrumBounds b{b1, bN};
      b.validate();
      const RegionMap map = region_scan(b, RegionGrid::square(-extent, extent, grid_points), worker_threads());
      auto f = open_output(region_out);
      write_region_csv(f, map);
      json j = region_summary(map);
      j["csv"] = region_out;
      j["acceleration"] = to_json(map.acceleration);
      emit(out, j, g.json);
    };
  });

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("damping-sweep", "Predicted and measured ACF against Jacobi damping");
  sweep->add_option("--omega-min", sweep_args.omega_min);
  sweep->add_option("--omega-max", sweep_args.omega_max);
  sweep->add_option("--step", sweep_args.step);
  sweep->add_option("--n", sweep_args.n, "Mesh intervals per side (power of two)");
  sweep->add_option("--nu1", sweep_args.nu1);
  sweep->add_option("--nu2", sweep_args.nu2);
  sweep->add_option("--max-iter", sweep_args.max_iter);
  sweep->add_option("--tol", sweep_args.tol);
  sweep->add_option("--out", sweep_args.out, "CSV output path")->required();
  sweep->callback([&] { action = [&] { emit(out, damping_sweep(sweep_args, g), true); }; });

  std::string config_path;
  std::string out_dir;
  std::string bound_source;
  std::optional<double> cli_b1, cli_bN;
  std::string method;
  auto add_experiment_options = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Experiment JSON")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Directory for trace CSVs and summary.json");
    sub->add_option("--bounds", bound_source, "explicit | smoothing | power | analytic");
    sub->add_option("--b1", cli_b1, "Explicit lower bound");
    sub->add_option("--bN", cli_bN, "Explicit upper bound");
  };
  auto load = [&] {
    auto cfgs = parse_experiment_list(load_json_file(config_path));
    for (auto& cfg : cfgs) {
      apply_overrides(cfg, g);
      if (!method.empty()) cfg.method = parse_method(method);
      if (cli_b1) cfg.bounds.b1 = cli_b1;
      if (cli_bN) cfg.bounds.bN = cli_bN;
      if (!bound_source.empty()) {
        cfg.bounds.source = parse_bound_source(bound_source);
      } else if (cli_b1 && cli_bN) {
        cfg.bounds.source = BoundSource::Explicit;
      }
      cfg.validate();
    }
    return cfgs;
  };
  auto dir = [&]() -> std::optional<fs::path> {
    if (out_dir.empty()) return std::nullopt;
    return fs::path(out_dir);
  };

  auto* solve = app.add_subcommand("solve", "Run one configured solve");
  add_experiment_options(solve);
  solve->add_option("--method", method, "none | nesterov | chebyshev | pcg | gmres");
  solve->callback([&] {
    action = [&] {
      auto cfgs = load();
      if (cfgs.size() != 1) throw InvalidArgument("solve: config holds several runs; use compare");
      RunOutcome outcome = run_experiment(cfgs.front(), !g.no_timing);
      const json summary = write_outcome(cfgs.front(), outcome, dir(), !g.no_timing);
      write_summary(summary, dir());
      out << summary.dump(2) << "\n";
      if (outcome.diverged) throw CommandFailed(outcome.error);
    };
  });

  auto* compare = app.add_subcommand("compare", "Run several solves and rank them by iterations");
  add_experiment_options(compare);
  compare->callback([&] {
    action = [&] {
      const auto cfgs = load();
      json runs = json::array();
      std::vector<std::pair<std::size_t, std::string>> ranking;
      std::string failure;
      for (const auto& cfg : cfgs) {
        RunOutcome outcome = run_experiment(cfg, !g.no_timing);
        runs.push_back(write_outcome(cfg, outcome, dir(), !g.no_timing));
        if (outcome.diverged) {
          failure = cfg.name + ": " + outcome.error;
        } else if (outcome.trace.converged()) {
          ranking.emplace_back(outcome.trace.iterations(), cfg.name);
        }
      }
      std::stable_sort(ranking.begin(), ranking.end(),
                       [](const auto& x, const auto& y) { return x.first < y.first; });
      json rank = json::array();
      for (const auto& [iters, name] : ranking) rank.push_back({{"name", name}, {"iterations", iters}});
      const json summary{{"runs", runs}, {"ranking", rank}};
      write_summary(summary, dir());
      out << summary.dump(2) << "\n";
      if (!failure.empty()) throw CommandFailed(failure);
    };
  });

  std::optional<std::size_t> iters;
  std::optional<double> shift;
  auto* est = app.add_subcommand("estimate", "Power-method estimate of the extreme eigenvalues");
  est->add_option("--config", config_path, "Experiment JSON")->required()->check(CLI::ExistingFile);
  est->add_option("--iters", iters, "Power iterations")->check(CLI::Range(20, 1000000));
  est->add_option("--shift", shift, "Shift for the opposite end (default: dominant estimate)");
  est->callback([&] {
    action = [&] {
      auto cfgs = parse_experiment_list(load_json_file(config_path));
      if (cfgs.size() != 1) throw InvalidArgument("estimate: config must hold a single experiment");
      apply_overrides(cfgs.front(), g);
      emit(out, estimate(cfgs.front(), iters, shift), g.json);
    };
  });

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    report_error(err, "usage", e.what());
    return 2;
  }

  try {
    if (action) action();
    return 0;
  } catch (const CommandFailed& e) {
    report_error(err, "divergence", e.what());
  } catch (const Divergence& e) {
    report_error(err, "divergence", e.what());
  } catch (const InvalidArgument& e) {
    report_error(err, "invalid_argument", e.what());
  } catch (const std::exception& e) {
    report_error(err, "error", e.what());
  }
  return 1;
}

}  // namespace nestersolve::cli
