#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "devlab/config.hpp"
#include "devlab/deviation.hpp"

namespace devlab {

enum class Command { Solve, VerifyIdentity, Majorant, Compare, OracleCheck };

Command parse_command(const std::string& name);
const char* to_string(Command command) noexcept;

struct RunFlags {
  bool force = false;
  std::optional<std::uint64_t> seed;
};

/// Exit codes of a run.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitViolation = 2;

struct ExperimentResult {
  Json report;
  std::string csv;       // empty for commands without a pair table
  std::string csv_name;  // file name inside the output directory
  int exit_code = kExitOk;
};

/// Fixed CSV header of the pair table.
extern const char* const kPairCsvHeader;

/// 17 significant digits, '.' decimal point.
std::string format_double(double v);

/// Produces v for a recipe. `index` is the recipe's position, mixed into the
/// seed so each perturbation draws its own stream.
ScalarField realize_primal(const PrimalRecipe& recipe, std::size_t index, const ProblemConfig& config,
                           const ObstacleProblem& problem, const PrimalSolution& solution, std::uint64_t seed);

TensorField realize_dual(const DualRecipe& recipe, const ScalarField& v, const ObstacleProblem& problem,
                         const PrimalSolution& solution);

/// Piecewise (bi)linear interpolation of a clamped coarse field onto a finer
/// grid over the same box. Boundary values stay exactly zero.
ScalarField prolongate(const ScalarField& coarse, const Grid& fine);

/// Raises v to the obstacle on interior nodes.
ScalarField project_to_constraint(ScalarField v, const ScalarField& phi);

/// Throws Error for usage problems (bad config, too many unknowns for the
/// oracle); invariant violations are reported through exit_code instead.
ExperimentResult run_experiment(const ProblemConfig& config, Command command, const RunFlags& flags = {});

void write_outputs(const ExperimentResult& result, const std::filesystem::path& out_dir);

/// Structural problems with a report document; empty when it conforms.
std::vector<std::string> validate_report(const Json& report);

}  // namespace devlab
