#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "devlab/obstacle.hpp"

namespace devlab {

using Json = nlohmann::ordered_json;

struct CoeffSpec {
  enum class Kind { Identity, Scalar, Matrix };
  Kind kind = Kind::Identity;
  std::string scalar_expr;
  std::vector<std::vector<double>> matrix;
};

struct SolverSpec {
  SolverMethod method = SolverMethod::ProjectedGradient;
  double tol = 1e-9;
  long max_iter = 0;
  std::optional<double> eps_active;
  int subspace_every = 25;
};

/// How an approximate primal field v is produced from the problem.
struct PrimalRecipe {
  enum class Kind { Exact, Perturb, Coarse, Iterate };
  enum class Mode { Smooth, Rough };
  std::string name;
  Kind kind = Kind::Exact;
  double eps = 0.0;
  Mode mode = Mode::Smooth;
  int n_coarse = 0;
  long k = 0;
};

/// How the dual approximation y* is produced from v.
struct DualRecipe {
  enum class Kind { Naive, Feasible, Exact };
  std::string name;
  Kind kind = Kind::Feasible;
};

struct ProblemConfig {
  int dim = 1;
  std::vector<Interval> bounds;
  std::vector<int> nodes;
  std::string f_expr = "0";
  std::string phi_expr = "-1";
  CoeffSpec a;
  SolverSpec solver;
  std::uint64_t seed = 42;
  std::vector<PrimalRecipe> primal;
  std::vector<DualRecipe> dual;
};

/// Reads a config in either JSON or the sectioned key = value text form:
///
///     dim = 1
///     bounds = [0, 1]
///     nodes = 41
///     f = "-50"
///     phi = "-0.01"
///
///     [solver]
///     tol = 1e-9
///
///     [primal.perturbed]
///     kind = "perturb"
///     eps = 1e-2
///
/// Values are JSON literals; bare words are taken as strings. A section
/// [primal.NAME] or [dual.NAME] appends a recipe called NAME in file order.
Json read_config_document(const std::filesystem::path& path);
Json parse_config_text(const std::string& text);

/// Throws ConfigError with a diagnostic on schema violations.
ProblemConfig config_from_json(const Json& doc);

ProblemConfig load_config(const std::filesystem::path& path);

/// Fully resolved config (defaults filled in) in JSON form.
Json config_to_json(const ProblemConfig& config);

Grid make_config_grid(const ProblemConfig& config);

/// Builds the problem on the config's grid, or on a grid with `nodes_override`
/// per axis. Samples f, phi (and a scalar coefficient) at the nodes; runs the
/// SPD and boundary-sign checks.
ObstacleProblem build_problem(const ProblemConfig& config, std::optional<int> nodes_override = std::nullopt);

struct LoadedProblem {
  ObstacleProblem problem;
  ProblemConfig config;
};

LoadedProblem load_problem(const std::filesystem::path& path);

SolverOptions solver_options(const ProblemConfig& config);

}  // namespace devlab
