// devlab: solve clamped obstacle problems and evaluate deviation-identity
// error bounds for approximate primal/dual pairs.
//
//   devlab <command> --config <path> [--out <dir>] [--force] [--seed N]
//
// Commands: solve, verify-identity, majorant, compare, oracle-check.
// Exit codes: 0 success, 1 usage error, 2 invariant violation.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "devlab/error.hpp"
#include "devlab/experiment.hpp"

namespace {

void write_error_report(const std::string& out_dir, const std::string& command, const std::string& code,
                        const std::string& message) {
  if (out_dir.empty()) return;
  std::filesystem::create_directories(out_dir);
  devlab::Json report;
  report["command"] = command;
  report["errors"] = devlab::Json::array({{{"code", code}, {"message", message}}});
  report["exit_code"] = devlab::kExitUsage;
  std::ofstream(std::filesystem::path(out_dir) / "report.json") << report.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deviation identity lab for clamped obstacle problems"};
  std::string command;
  std::string config_path;
  std::string out_dir = "devlab_out";
  bool force = false;
  std::uint64_t seed = 0;

  app.add_option("command", command, "solve | verify-identity | majorant | compare | oracle-check")
      ->required()
      ->check(CLI::IsMember({"solve", "verify-identity", "majorant", "compare", "oracle-check"}));
  app.add_option("--config", config_path, "problem config (key = value text or JSON)")->required();
  app.add_option("--out", out_dir, "output directory for report.json and CSV tables");
  app.add_flag("--force", force, "evaluate majorants of inadmissible pairs (not guaranteed bounds)");
  auto* seed_opt = app.add_option("--seed", seed, "override the perturbation seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? devlab::kExitOk : devlab::kExitUsage;
  }

  try {
    const devlab::ProblemConfig config = devlab::load_config(config_path);
    devlab::RunFlags flags;
    flags.force = force;
    if (seed_opt->count() > 0) flags.seed = seed;

    const devlab::ExperimentResult result = devlab::run_experiment(config, devlab::parse_command(command), flags);
    devlab::write_outputs(result, out_dir);

    for (const auto& check : result.report["invariant_checks"]) {
      if (!check["pass"].get<bool>()) std::cerr << "FAIL " << check["name"].get<std::string>() << '\n';
    }
    for (const auto& err : result.report["errors"]) {
      std::cerr << "error [" << err["code"].get<std::string>() << "] " << err.value("pair", std::string()) << ": "
                << err["message"].get<std::string>() << '\n';
    }
    std::cout << command << ": wrote " << (std::filesystem::path(out_dir) / "report.json").string();
    if (!result.csv_name.empty()) std::cout << " and " << (std::filesystem::path(out_dir) / result.csv_name).string();
    std::cout << " (exit " << result.exit_code << ")\n";
    return result.exit_code;
  } catch (const devlab::Error& e) {
    std::cerr << "devlab: " << e.what() << '\n';
    write_error_report(out_dir, command, devlab::to_string(e.code()), e.what());
    return devlab::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "devlab: " << e.what() << '\n';
    write_error_report(out_dir, command, "internal", e.what());
    return devlab::kExitUsage;
  }
}
