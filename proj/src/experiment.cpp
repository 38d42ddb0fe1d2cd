#include "devlab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <thread>

#include "devlab/error.hpp"
#include "devlab/oracle.hpp"
#include "devlab/reconstruction.hpp"

namespace devlab {

const char* const kPairCsvHeader =
    "name,E_v,E_y,M_K,RHS,residual,mu_phi,mu_star_phi,penalty,majorant,true_error,admissible,rank";

Command parse_command(const std::string& name) {
  if (name == "solve") return Command::Solve;
  if (name == "verify-identity") return Command::VerifyIdentity;
  if (name == "majorant") return Command::Majorant;
  if (name == "compare") return Command::Compare;
  if (name == "oracle-check") return Command::OracleCheck;
  throw Error(ErrorCode::InvalidArgument, "unknown command '" + name + "'");
}

const char* to_string(Command command) noexcept {
  switch (command) {
    case Command::Solve: return "solve";
    case Command::VerifyIdentity: return "verify-identity";
    case Command::Majorant: return "majorant";
    case Command::Compare: return "compare";
    case Command::OracleCheck: return "oracle-check";
  }
  return "?";
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

unsigned thread_count() {
  if (const char* env = std::getenv("DEVLAB_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n >= 1) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs fn(i) for i in [0, n); results must be written to per-index slots.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_count(), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (std::thread& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

// Uniform draw in [-1, 1) with a platform-independent mapping.
double symmetric_unit(std::mt19937_64& rng) {
  return 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0;
}

std::mt19937_64 recipe_rng(std::uint64_t seed, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index)};
  return std::mt19937_64(seq);
}

struct PairEval {
  std::string name;
  std::string primal;
  std::string dual;
  DeviationReport dev;
  BiharmonicReport bih;
  std::optional<double> duality_gap;
  double primal_energy_value = 0.0;
  double dual_objective_value = 0.0;
  std::size_t rank = 0;
};

struct Checks {
  Json list = Json::array();
  bool all_pass = true;

  void add(const std::string& name, bool pass, double value, double tol) {
    list.push_back({{"name", name}, {"pass", pass}, {"value", value}, {"tol", tol}});
    all_pass = all_pass && pass;
  }
};

Json kkt_json(const KKTReport& k) {
  return {{"stationarity", k.stationarity},
          {"feasibility", k.feasibility},
          {"complementarity", k.complementarity},
          {"multiplier_sign", k.multiplier_sign}};
}

Json grid_json(const Grid& g) {
  Json bounds = Json::array();
  Json nodes = Json::array();
  Json spacing = Json::array();
  for (int a = 0; a < g.dim(); ++a) {
    bounds.push_back({g.bounds(a).lo, g.bounds(a).hi});
    nodes.push_back(g.nodes(a));
    spacing.push_back(g.spacing(a));
  }
  return {{"dim", g.dim()},
          {"bounds", bounds},
          {"nodes", nodes},
          {"spacing", spacing},
          {"node_count", g.size()},
          {"unknowns", g.interior().size()}};
}

Json json_number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

ScalarField project_to_constraint(ScalarField v, const ScalarField& phi) {
  require_same_grid(v.grid(), phi.grid());
  for (std::size_t k : v.grid().interior()) v[k] = std::max(v[k], phi[k]);
  return v;
}

ScalarField prolongate(const ScalarField& coarse, const Grid& fine) {
  const Grid& cg = coarse.grid();
  if (cg.dim() != fine.dim()) throw Error(ErrorCode::GridMismatch, "prolongation between grids of different dimension");
  for (int a = 0; a < cg.dim(); ++a) {
    if (!(cg.bounds(a) == fine.bounds(a))) throw Error(ErrorCode::GridMismatch, "prolongation needs equal boxes");
  }
  auto locate = [&](int axis, double x, int& cell, double& t) {
    const int n = cg.nodes(axis);
    const double s = (x - cg.bounds(axis).lo) / cg.spacing(axis);
    cell = std::clamp(static_cast<int>(std::floor(s)), 0, n - 2);
    t = std::clamp(s - cell, 0.0, 1.0);
  };
  ScalarField out(fine);
  for (std::size_t k : fine.interior()) {
    int i = 0;
    double tx = 0.0;
    locate(0, fine.x(k), i, tx);
    if (fine.dim() == 1) {
      out[k] = (1.0 - tx) * coarse[cg.index(i)] + tx * coarse[cg.index(i + 1)];
    } else {
      int j = 0;
      double ty = 0.0;
      locate(1, fine.y(k), j, ty);
      out[k] = (1.0 - tx) * (1.0 - ty) * coarse[cg.index(i, j)] + tx * (1.0 - ty) * coarse[cg.index(i + 1, j)] +
               (1.0 - tx) * ty * coarse[cg.index(i, j + 1)] + tx * ty * coarse[cg.index(i + 1, j + 1)];
    }
  }
  return out;
}

ScalarField realize_primal(const PrimalRecipe& recipe, std::size_t index, const ProblemConfig& config,
                           const ObstacleProblem& problem, const PrimalSolution& solution, std::uint64_t seed) {
  const Grid& grid = problem.grid();
  switch (recipe.kind) {
    case PrimalRecipe::Kind::Exact:
      return solution.u;
    case PrimalRecipe::Kind::Perturb: {
      std::mt19937_64 rng = recipe_rng(seed, index);
      ScalarField w(grid);
      if (recipe.mode == PrimalRecipe::Mode::Rough) {
        for (std::size_t k : grid.interior()) w[k] = symmetric_unit(rng);
      } else {
        for (const ScalarField& mode : clamped_eigenmodes(grid, 5)) {
          w += symmetric_unit(rng) * mode;
        }
      }
      return project_to_constraint(solution.u + recipe.eps * w, problem.obstacle());
    }
    case PrimalRecipe::Kind::Coarse: {
      const ObstacleProblem coarse = build_problem(config, recipe.n_coarse);
      const PrimalSolution cs = solve_primal(coarse, solver_options(config));
      return project_to_constraint(prolongate(cs.u, grid), problem.obstacle());
    }
    case PrimalRecipe::Kind::Iterate: {
      SolverOptions opts = solver_options(config);
      opts.max_iter = recipe.k;
      opts.subspace_every = 0;
      return solve_primal(problem, opts).u;
    }
  }
  return solution.u;
}

TensorField realize_dual(const DualRecipe& recipe, const ScalarField& v, const ObstacleProblem& problem,
                         const PrimalSolution& solution) {
  switch (recipe.kind) {
    case DualRecipe::Kind::Naive: return naive_flux(v, problem);
    case DualRecipe::Kind::Feasible: return feasible_flux(v, problem);
    case DualRecipe::Kind::Exact: return recover_dual(solution.u, problem);
  }
  return recover_dual(solution.u, problem);
}

ExperimentResult run_experiment(const ProblemConfig& config_in, Command command, const RunFlags& flags) {
  ProblemConfig config = config_in;
  if (flags.seed) config.seed = *flags.seed;
  if (config.primal.empty()) {
    if (command == Command::Compare) {
      throw Error(ErrorCode::ConfigError, "compare needs at least one primal recipe");
    }
    config.primal.push_back({"exact", PrimalRecipe::Kind::Exact});
  }
  if (config.dual.empty()) config.dual.push_back({"feasible", DualRecipe::Kind::Feasible});

  const ObstacleProblem problem = build_problem(config);
  const Grid& grid = problem.grid();
  if (command == Command::OracleCheck && grid.interior().size() > static_cast<std::size_t>(DenseQP::kMaxUnknowns)) {
    throw Error(ErrorCode::InvalidArgument, "oracle-check needs at most 16 unknowns; grid has " +
                                                std::to_string(grid.interior().size()));
  }

  const SolverOptions opts = solver_options(config);
  const PrimalSolution solution = solve_primal(problem, opts);
  const double kkt_threshold = opts.tol * (1.0 + problem.load().max_abs());

  ExperimentResult result;
  Json& report = result.report;
  report["command"] = to_string(command);
  report["config_echo"] = config_to_json(config);
  report["grid"] = grid_json(grid);
  report["solver"] = {{"method", to_string(opts.method)},
                      {"iterations", solution.iterations},
                      {"converged", solution.converged},
                      {"eps_active", solution.eps_active},
                      {"active_nodes", solution.partition.active.size()},
                      {"energy", primal_energy(solution.u, problem)},
                      {"kkt", kkt_json(solution.kkt)}};
  report["pairs"] = Json::array();
  Json errors = Json::array();
  Checks checks;
  checks.add("solver_converged", solution.converged, solution.kkt.max(), kkt_threshold);

  if (command == Command::Solve) {
    std::string csv = "x,y,u,phi,lambda,active\n";
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const bool active = std::binary_search(solution.partition.active.begin(), solution.partition.active.end(), k);
      csv += format_double(grid.x(k)) + "," + format_double(grid.y(k)) + "," + format_double(solution.u[k]) + "," +
             format_double(problem.obstacle()[k]) + "," + format_double(solution.lambda[k]) + "," +
             (active ? "1" : "0") + "\n";
    }
    result.csv = std::move(csv);
    result.csv_name = "solution.csv";
  } else if (command == Command::OracleCheck) {
    const DenseQP qp = make_dense_qp(problem);
    const OracleResult oracle = brute_force_qp(qp);
    const HessianOperator& op = problem.op();
    const ScalarField u_oracle = op.scatter(oracle.u);
    const ScalarField lam_oracle = op.scatter(oracle.lambda.cwiseQuotient(op.interior_weights()));
    const double diff = (solution.u - u_oracle).max_abs();
    bool sets_match = true;
    const Partition part = coincidence_set(u_oracle, problem.obstacle(), solution.eps_active);
    sets_match = part.active == solution.partition.active;
    const KKTReport okkt = kkt_report(u_oracle, lam_oracle, problem, solution.eps_active);
    report["oracle"] = {{"max_abs_diff", diff},
                        {"active_sets_match", sets_match},
                        {"degenerate", oracle.degenerate},
                        {"kkt_points", oracle.kkt_points},
                        {"oracle_active_nodes", part.active.size()},
                        {"kkt", kkt_json(okkt)}};
    checks.add("oracle_u_agreement", diff <= 1e-8, diff, 1e-8);
    // Degenerate KKT points are compared through u only.
    checks.add("oracle_active_sets", sets_match || oracle.degenerate, sets_match ? 0.0 : 1.0, 0.0);
    checks.add("oracle_kkt", okkt.max() <= 1e-10 * (1.0 + problem.load().max_abs()), okkt.max(),
               1e-10 * (1.0 + problem.load().max_abs()));
  } else {
    // Realize every primal and dual approximation, then evaluate all pairs.
    std::vector<ScalarField> vs;
    for (std::size_t i = 0; i < config.primal.size(); ++i) {
      vs.push_back(realize_primal(config.primal[i], i, config, problem, solution, config.seed));
    }
    struct PairInput {
      std::size_t p;
      std::size_t d;
    };
    std::vector<PairInput> inputs;
    for (std::size_t p = 0; p < config.primal.size(); ++p) {
      for (std::size_t d = 0; d < config.dual.size(); ++d) inputs.push_back({p, d});
    }
    std::vector<TensorField> ys(inputs.size(), TensorField(grid));
    std::vector<PairEval> evals(inputs.size());
    const TensorField p_star = recover_dual(solution.u, problem);

    parallel_for(inputs.size(), [&](std::size_t i) {
      const PrimalRecipe& pr = config.primal[inputs[i].p];
      const DualRecipe& dr = config.dual[inputs[i].d];
      const ScalarField& v = vs[inputs[i].p];
      ys[i] = realize_dual(dr, v, problem, solution);
      PairEval& e = evals[i];
      e.name = pr.name + "/" + dr.name;
      e.primal = pr.name;
      e.dual = dr.name;
      e.dev = deviation_terms(v, ys[i], solution.u, p_star, problem);
      e.bih = biharmonic_terms(v, ys[i], solution, problem);
      e.primal_energy_value = primal_energy(v, problem);
      const DualObjective dobj = dual_objective(ys[i], problem);
      if (dobj.finite) {
        e.dual_objective_value = dobj.value;
        e.duality_gap = e.primal_energy_value - dobj.value;
      }
    });

    std::vector<ApproximationPair> pairs;
    for (std::size_t i = 0; i < inputs.size(); ++i) pairs.push_back({evals[i].name, vs[inputs[i].p], ys[i]});
    for (const RankedEntry& r : compare_approximations(pairs, problem, &solution.u)) evals[r.input_index].rank = r.rank;

    std::string csv = std::string(kPairCsvHeader) + "\n";
    for (const PairEval& e : evals) {
      const BiharmonicReport& b = e.bih;
      const double scale = b.scale();
      const bool show_majorant = b.admissible || flags.force || command != Command::Majorant;
      Json terms = {{"E_v", e.dev.e_v},
                    {"E_y", e.dev.e_y},
                    {"M_K", e.dev.m_k},
                    {"RHS", e.dev.rhs},
                    {"RHS_alt", e.dev.rhs_alt},
                    {"residual", e.dev.residual},
                    {"error_term", b.error_term},
                    {"mu_phi", b.mu_phi},
                    {"mu_star_phi", b.mu_star_phi},
                    {"dual_term", b.dual_term},
                    {"rhs_norm", b.rhs_norm},
                    {"penalty", b.penalty},
                    {"biharmonic_residual", b.residual},
                    {"primal_energy", e.primal_energy_value},
                    {"dual_objective", e.duality_gap ? json_number(e.dual_objective_value) : Json(nullptr)},
                    {"duality_gap", e.duality_gap ? json_number(*e.duality_gap) : Json(nullptr)}};
      report["pairs"].push_back({{"name", e.name},
                                 {"primal", e.primal},
                                 {"dual", e.dual},
                                 {"terms", terms},
                                 {"majorant", show_majorant ? json_number(b.majorant()) : Json(nullptr)},
                                 {"forced", !b.admissible && show_majorant},
                                 {"true_error", b.error_term},
                                 {"admissible", b.admissible},
                                 {"dual_admissible", b.dual_admissible},
                                 {"primal_feasible", b.primal_feasible},
                                 {"rank", e.rank}});

      csv += e.name + "," + format_double(e.dev.e_v) + "," + format_double(e.dev.e_y) + "," +
             format_double(e.dev.m_k) + "," + format_double(e.dev.rhs) + "," + format_double(e.dev.residual) + "," +
             format_double(b.mu_phi) + "," + format_double(b.mu_star_phi) + "," + format_double(b.penalty) + "," +
             (show_majorant ? format_double(b.majorant()) : std::string()) + "," + format_double(b.error_term) +
             "," + (b.admissible ? "true" : "false") + "," + std::to_string(e.rank) + "\n";

      if (command == Command::VerifyIdentity) {
        const double id_tol = 1e-12 * (1.0 + e.dev.rhs);
        checks.add("identity_residual[" + e.name + "]", e.dev.residual <= id_tol, e.dev.residual, id_tol);
        const double alt = std::abs(e.dev.rhs_alt - e.dev.rhs);
        checks.add("norm_equivalence[" + e.name + "]", alt <= id_tol, alt, id_tol);
        const double bih_tol = 1e-10 * scale;
        checks.add("biharmonic_residual[" + e.name + "]", b.residual <= bih_tol, b.residual, bih_tol);
        if (b.admissible) {
          const double lowest =
              std::min({b.error_term, b.mu_phi, b.dual_term, b.mu_star_phi, b.rhs_norm, b.penalty});
          checks.add("nonnegativity[" + e.name + "]", lowest >= -1e-12 * scale, lowest, -1e-12 * scale);
        }
      }
      if (command == Command::Majorant || command == Command::Compare) {
        if (b.admissible) {
          const double margin = b.error_term - b.majorant();
          checks.add("guaranteed_bound[" + e.name + "]", margin <= 1e-10 * scale, margin, 1e-10 * scale);
          if (e.duality_gap) {
            const double gap_scale = 1.0 + std::abs(e.primal_energy_value) + std::abs(e.dual_objective_value);
            const double diff = std::abs(*e.duality_gap - b.majorant());
            checks.add("duality_gap[" + e.name + "]", diff <= 1e-10 * gap_scale, diff, 1e-10 * gap_scale);
          }
        } else if (command == Command::Majorant && !flags.force) {
          errors.push_back({{"code", to_string(b.dual_admissible ? ErrorCode::Infeasible : ErrorCode::Inadmissible)},
                            {"pair", e.name},
                            {"message", "majorant refused: pair is not admissible (use --force to evaluate)"}});
        }
      }
    }
    result.csv = std::move(csv);
    result.csv_name = "pairs.csv";
  }

  report["invariant_checks"] = checks.list;
  report["errors"] = errors;
  result.exit_code = (checks.all_pass && errors.empty()) ? kExitOk : kExitViolation;
  report["exit_code"] = result.exit_code;
  return result;
}

void write_outputs(const ExperimentResult& result, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream out(out_dir / "report.json", std::ios::binary);
    out << result.report.dump(2) << '\n';
  }
  if (!result.csv_name.empty()) {
    std::ofstream out(out_dir / result.csv_name, std::ios::binary);
    out << result.csv;
  }
}

std::vector<std::string> validate_report(const Json& report) {
  std::vector<std::string> problems;
  auto need = [&](const Json& obj, const char* key, auto pred, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) {
      problems.push_back(where + ": missing '" + key + "'");
    } else if (!pred(obj[key])) {
      problems.push_back(where + ": '" + key + "' has the wrong type");
    }
  };
  auto is_obj = [](const Json& j) { return j.is_object(); };
  auto is_arr = [](const Json& j) { return j.is_array(); };
  auto is_num = [](const Json& j) { return j.is_number(); };
  auto is_num_or_null = [](const Json& j) { return j.is_number() || j.is_null(); };
  auto is_bool = [](const Json& j) { return j.is_boolean(); };
  auto is_str = [](const Json& j) { return j.is_string(); };

  need(report, "command", is_str, "report");
  need(report, "config_echo", is_obj, "report");
  need(report, "grid", is_obj, "report");
  need(report, "solver", is_obj, "report");
  need(report, "pairs", is_arr, "report");
  need(report, "invariant_checks", is_arr, "report");
  need(report, "errors", is_arr, "report");
  need(report, "exit_code", is_num, "report");
  if (!problems.empty()) return problems;

  for (const char* key : {"dim", "bounds", "nodes", "f", "phi", "A", "solver", "seed", "primal", "dual"}) {
    if (!report["config_echo"].contains(key)) problems.push_back(std::string("config_echo: missing '") + key + "'");
  }
  need(report["grid"], "dim", is_num, "grid");
  need(report["grid"], "nodes", is_arr, "grid");
  need(report["grid"], "spacing", is_arr, "grid");
  need(report["solver"], "iterations", is_num, "solver");
  need(report["solver"], "converged", is_bool, "solver");
  need(report["solver"], "kkt", is_obj, "solver");
  for (std::size_t i = 0; i < report["pairs"].size(); ++i) {
    const Json& p = report["pairs"][i];
    const std::string where = "pairs[" + std::to_string(i) + "]";
    need(p, "name", is_str, where);
    need(p, "terms", is_obj, where);
    need(p, "admissible", is_bool, where);
    need(p, "rank", is_num, where);
    need(p, "majorant", is_num_or_null, where);
    if (p.contains("terms") && p["terms"].is_object()) {
      for (const char* key : {"E_v", "E_y", "M_K", "RHS", "residual", "mu_phi", "mu_star_phi", "penalty"}) {
        need(p["terms"], key, is_num, where + ".terms");
      }
    }
  }
  for (std::size_t i = 0; i < report["invariant_checks"].size(); ++i) {
    const Json& c = report["invariant_checks"][i];
    const std::string where = "invariant_checks[" + std::to_string(i) + "]";
    need(c, "name", is_str, where);
    need(c, "pass", is_bool, where);
    need(c, "value", is_num_or_null, where);
    need(c, "tol", is_num_or_null, where);
  }
  return problems;
}

}  // namespace devlab
