#include "nestersolve/cli/config.hpp"

#include <fstream>

#include "nestersolve/error.hpp"

namespace nestersolve::cli {

using nlohmann::json;

namespace {

template <typename Enum, std::size_t N>
Enum lookup(const std::string& s, const std::pair<const char*, Enum> (&table)[N], const char* what) {
  for (const auto& [name, value] : table) {
    if (s == name) return value;
  }
  std::string known;
  for (const auto& [name, value] : table) known += std::string(known.empty() ? "" : ", ") + name;
  throw InvalidArgument(std::string("unknown ") + what + " '" + s + "' (expected one of: " + known + ")");
}

template <typename Enum, std::size_t N>
std::string name_of(Enum value, const std::pair<const char*, Enum> (&table)[N]) {
  for (const auto& [name, v] : table) {
    if (v == value) return name;
  }
  return "?";
}

constexpr std::pair<const char*, ProblemKind> kProblems[] = {
    {"poisson", ProblemKind::Poisson},
    {"diffusion-lognormal", ProblemKind::DiffusionLogNormal},
    {"diffusion-uniform", ProblemKind::DiffusionUniform},
    {"diagonal", ProblemKind::Diagonal}};
constexpr std::pair<const char*, Method> kMethods[] = {{"none", Method::None},
                                                       {"nesterov", Method::Nesterov},
                                                       {"chebyshev", Method::Chebyshev},
                                                       {"pcg", Method::Pcg},
                                                       {"gmres", Method::Gmres}};
constexpr std::pair<const char*, BoundSource> kSources[] = {{"explicit", BoundSource::Explicit},
                                                            {"smoothing", BoundSource::Smoothing},
                                                            {"power", BoundSource::Power},
                                                            {"analytic", BoundSource::Analytic}};
constexpr std::pair<const char*, RelaxKind> kRelax[] = {{"jacobi", RelaxKind::JacobiDamped},
                                                        {"rb", RelaxKind::RedBlackGS},
                                                        {"lex", RelaxKind::LexGS}};
constexpr std::pair<const char*, Coarsening> kCoarsening[] = {
    {"rediscretize", Coarsening::Rediscretize}, {"galerkin", Coarsening::Galerkin}};

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) out = it->get<T>();
}

template <typename T>
void read(const json& j, const char* key, std::optional<T>& out) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) out = it->get<T>();
}

}  // namespace

std::string to_string(ProblemKind kind) { return name_of(kind, kProblems); }
std::string to_string(Method method) { return name_of(method, kMethods); }
std::string to_string(BoundSource source) { return name_of(source, kSources); }
std::string to_string(RelaxKind kind) { return name_of(kind, kRelax); }
std::string to_string(Coarsening kind) { return name_of(kind, kCoarsening); }

ProblemKind parse_problem(const std::string& s) { return lookup(s, kProblems, "problem"); }
Method parse_method(const std::string& s) { return lookup(s, kMethods, "method"); }
BoundSource parse_bound_source(const std::string& s) { return lookup(s, kSources, "bound source"); }
RelaxKind parse_relax_kind(const std::string& s) { return lookup(s, kRelax, "relaxation"); }
Coarsening parse_coarsening(const std::string& s) { return lookup(s, kCoarsening, "coarsening"); }

void ExperimentConfig::validate() const {
  if (problem == ProblemKind::Diagonal) {
    if (eigenvalues.empty()) throw InvalidArgument("config: diagonal problem needs 'eigenvalues'");
  } else {
    Grid2D::with_intervals(n);
    cycle.validate();
    if (problem != ProblemKind::Poisson && cycle.coarsening == Coarsening::Rediscretize) {
      throw InvalidArgument("config: rediscretization only applies to the poisson problem");
    }
  }
  stop.validate();
  if (acf_window < 1) throw InvalidArgument("config: acf_window must be >= 1");
  if (bounds.source == BoundSource::Explicit && (!bounds.b1 || !bounds.bN)) {
    throw InvalidArgument("config: explicit bounds need b1 and bN");
  }
  if (bounds.source == BoundSource::Analytic && problem != ProblemKind::Diagonal) {
    throw InvalidArgument("config: analytic bounds are only known for the diagonal problem");
  }
  if (bounds.source == BoundSource::Smoothing &&
      (problem != ProblemKind::Poisson || cycle.relax.kind != RelaxKind::JacobiDamped)) {
    throw InvalidArgument("config: smoothing bounds need the poisson problem with jacobi relaxation");
  }
}

ExperimentConfig parse_experiment(const json& j) {
  if (!j.is_object()) throw InvalidArgument("config: experiment must be a JSON object");
  ExperimentConfig cfg;
  try {
    if (!j.contains("problem")) throw InvalidArgument("config: missing 'problem'");
    cfg.problem = parse_problem(j.at("problem").get<std::string>());
    read(j, "name", cfg.name);
    read(j, "n", cfg.n);
    read(j, "seed", cfg.seed);
    read(j, "eigenvalues", cfg.eigenvalues);
    if (auto it = j.find("relax"); it != j.end()) {
      if (it->contains("kind")) cfg.cycle.relax.kind = parse_relax_kind(it->at("kind").get<std::string>());
      read(*it, "omega", cfg.cycle.relax.omega);
    }
    read(j, "nu1", cfg.cycle.nu1);
    read(j, "nu2", cfg.cycle.nu2);
    read(j, "coarsest_n", cfg.cycle.coarsest_n);
    if (j.contains("coarsening")) {
      cfg.cycle.coarsening = parse_coarsening(j.at("coarsening").get<std::string>());
      cfg.coarsening_given = true;
    } else if (cfg.problem != ProblemKind::Poisson) {
      cfg.cycle.coarsening = Coarsening::Galerkin;
    }
    if (j.contains("method")) cfg.method = parse_method(j.at("method").get<std::string>());
    if (auto it = j.find("bounds"); it != j.end()) {
      auto& b = cfg.bounds;
      if (it->contains("source")) {
        b.source = parse_bound_source(it->at("source").get<std::string>());
        b.source_given = true;
      }
      read(*it, "b1", b.b1);
      read(*it, "bN", b.bN);
      read(*it, "assume_b1_zero", b.assume_b1_zero);
      read(*it, "power_iters", b.power_iters);
      read(*it, "power_tol", b.power_tol);
      read(*it, "shift", b.power_shift);
    }
    if (!cfg.bounds.source_given) {
      if (cfg.bounds.b1 && cfg.bounds.bN) {
        cfg.bounds.source = BoundSource::Explicit;
      } else if (cfg.problem == ProblemKind::Diagonal) {
        cfg.bounds.source = BoundSource::Analytic;
      } else if (cfg.problem == ProblemKind::Poisson &&
                 cfg.cycle.relax.kind == RelaxKind::JacobiDamped) {
        cfg.bounds.source = BoundSource::Smoothing;
      } else {
        cfg.bounds.source = BoundSource::Power;
      }
    }
    read(j, "tol", cfg.stop.tol);
    read(j, "max_iter", cfg.stop.max_iter);
    read(j, "acf_window", cfg.acf_window);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  if (cfg.name.empty()) cfg.name = to_string(cfg.method);
  cfg.validate();
  return cfg;
}

std::vector<ExperimentConfig> parse_experiment_list(const json& j) {
  if (!j.is_object() || !j.contains("runs")) return {parse_experiment(j)};
  const json base = j.value("base", json::object());
  const json& runs = j.at("runs");
  if (!runs.is_array() || runs.empty()) throw InvalidArgument("config: 'runs' must be a non-empty array");
  std::vector<ExperimentConfig> out;
  for (const auto& run : runs) {
    json merged = base;
    merged.merge_patch(run);
    out.push_back(parse_experiment(merged));
  }
  return out;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidArgument("'" + path + "': " + e.what());
  }
}

}  // namespace nestersolve::cli
