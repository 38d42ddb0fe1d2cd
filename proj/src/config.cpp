#include "devlab/config.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "devlab/error.hpp"
#include "devlab/expression.hpp"

namespace devlab {

namespace {

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

Json parse_value(const std::string& raw, int line) {
  try {
    return Json::parse(raw);
  } catch (const Json::parse_error&) {
    // Bare words are strings, but anything that looks structured must parse.
    if (!raw.empty() && (raw.front() == '[' || raw.front() == '{' || raw.front() == '"')) {
      config_error("line " + std::to_string(line) + ": malformed value '" + raw + "'");
    }
    return Json(raw);
  }
}

template <class T>
T get_as(const Json& j, const char* key, const std::string& ctx) {
  try {
    return j.get<T>();
  } catch (const Json::exception&) {
    config_error(ctx + ": key '" + key + "' has the wrong type");
  }
}

void reject_unknown(const Json& obj, const std::set<std::string>& allowed, const std::string& ctx) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) config_error(ctx + ": unknown key '" + it.key() + "'");
  }
}

Interval parse_interval(const Json& j, const std::string& ctx) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    config_error(ctx + ": bounds must be [lo, hi] pairs");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Expressions are strings; a bare number is accepted as a constant.
std::string expression_text(const Json& j, const std::string& key) {
  if (j.is_number()) return format_number(j.get<double>());
  return get_as<std::string>(j, key.c_str(), "config");
}

PrimalRecipe parse_primal(const Json& j, std::size_t index) {
  const std::string ctx = "primal recipe #" + std::to_string(index);
  if (!j.is_object()) config_error(ctx + ": must be an object");
  reject_unknown(j, {"name", "kind", "eps", "mode", "n_coarse", "k"}, ctx);
  PrimalRecipe r;
  const std::string kind = j.contains("kind") ? get_as<std::string>(j["kind"], "kind", ctx) : "exact";
  r.name = j.contains("name") ? get_as<std::string>(j["name"], "name", ctx) : kind + std::to_string(index);
  if (kind == "exact") {
    r.kind = PrimalRecipe::Kind::Exact;
  } else if (kind == "perturb") {
    r.kind = PrimalRecipe::Kind::Perturb;
    if (!j.contains("eps")) config_error(ctx + ": perturb needs 'eps'");
    r.eps = get_as<double>(j["eps"], "eps", ctx);
    const std::string mode = j.contains("mode") ? get_as<std::string>(j["mode"], "mode", ctx) : "smooth";
    if (mode == "smooth") {
      r.mode = PrimalRecipe::Mode::Smooth;
    } else if (mode == "rough") {
      r.mode = PrimalRecipe::Mode::Rough;
    } else {
      config_error(ctx + ": mode must be 'smooth' or 'rough'");
    }
  } else if (kind == "coarse") {
    r.kind = PrimalRecipe::Kind::Coarse;
    if (!j.contains("n_coarse")) config_error(ctx + ": coarse needs 'n_coarse'");
    r.n_coarse = get_as<int>(j["n_coarse"], "n_coarse", ctx);
  } else if (kind == "iterate") {
    r.kind = PrimalRecipe::Kind::Iterate;
    if (!j.contains("k")) config_error(ctx + ": iterate needs 'k'");
    r.k = get_as<long>(j["k"], "k", ctx);
    if (r.k < 1) config_error(ctx + ": k must be at least 1");
  } else {
    config_error(ctx + ": unknown kind '" + kind + "'");
  }
  return r;
}

DualRecipe parse_dual(const Json& j, std::size_t index) {
  const std::string ctx = "dual recipe #" + std::to_string(index);
  if (!j.is_object()) config_error(ctx + ": must be an object");
  reject_unknown(j, {"name", "kind"}, ctx);
  DualRecipe r;
  const std::string kind = j.contains("kind") ? get_as<std::string>(j["kind"], "kind", ctx) : "feasible";
  r.name = j.contains("name") ? get_as<std::string>(j["name"], "name", ctx) : kind;
  if (kind == "naive") {
    r.kind = DualRecipe::Kind::Naive;
  } else if (kind == "feasible") {
    r.kind = DualRecipe::Kind::Feasible;
  } else if (kind == "exact") {
    r.kind = DualRecipe::Kind::Exact;
  } else {
    config_error(ctx + ": unknown kind '" + kind + "'");
  }
  return r;
}

const char* primal_kind_name(PrimalRecipe::Kind k) {
  switch (k) {
    case PrimalRecipe::Kind::Exact: return "exact";
    case PrimalRecipe::Kind::Perturb: return "perturb";
    case PrimalRecipe::Kind::Coarse: return "coarse";
    case PrimalRecipe::Kind::Iterate: return "iterate";
  }
  return "?";
}

const char* dual_kind_name(DualRecipe::Kind k) {
  switch (k) {
    case DualRecipe::Kind::Naive: return "naive";
    case DualRecipe::Kind::Feasible: return "feasible";
    case DualRecipe::Kind::Exact: return "exact";
  }
  return "?";
}

ScalarField sample(const std::string& src, const Grid& grid, const char* what) {
  const Expression e = parse_expr(src, grid.dim());
  ScalarField field(grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double v = e.eval(grid.x(k), grid.y(k));
    if (!std::isfinite(v)) {
      config_error(std::string(what) + " is not finite at node (" + std::to_string(grid.x(k)) + ", " +
                   std::to_string(grid.y(k)) + ")");
    }
    field[k] = v;
  }
  return field;
}

}  // namespace

Json parse_config_text(const std::string& text) {
  Json doc = Json::object();
  Json* target = &doc;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') config_error("line " + std::to_string(lineno) + ": unterminated section header");
      const std::string section = trim(t.substr(1, t.size() - 2));
      const auto dot = section.find('.');
      const std::string head = section.substr(0, dot);
      if ((head == "primal" || head == "dual") && dot != std::string::npos) {
        Json& list = doc[head];
        if (list.is_null()) list = Json::array();
        list.push_back(Json{{"name", section.substr(dot + 1)}});
        target = &list.back();
      } else if (dot == std::string::npos && !section.empty()) {
        Json& obj = doc[section];
        if (!obj.is_object()) obj = Json::object();
        target = &obj;
      } else {
        config_error("line " + std::to_string(lineno) + ": bad section name '" + section + "'");
      }
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) config_error("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) config_error("line " + std::to_string(lineno) + ": empty key");
    (*target)[key] = parse_value(trim(t.substr(eq + 1)), lineno);
  }
  return doc;
}

Json read_config_document(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open config file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    try {
      return Json::parse(text);
    } catch (const Json::parse_error& e) {
      config_error(std::string("config JSON: ") + e.what());
    }
  }
  return parse_config_text(text);
}

ProblemConfig config_from_json(const Json& doc) {
  if (!doc.is_object()) config_error("config must be an object");
  reject_unknown(doc, {"dim", "bounds", "nodes", "f", "phi", "A", "solver", "seed", "primal", "dual"}, "config");
  ProblemConfig c;
  c.dim = doc.contains("dim") ? get_as<int>(doc["dim"], "dim", "config") : 1;
  if (c.dim != 1 && c.dim != 2) config_error("config: dim must be 1 or 2");

  const Json bounds = doc.value("bounds", Json::array({0.0, 1.0}));
  if (bounds.is_array() && bounds.size() == 2 && bounds[0].is_number()) {
    // A single [lo, hi] applies to every axis.
    c.bounds.assign(c.dim, parse_interval(bounds, "config"));
  } else if (bounds.is_array() && bounds.size() == static_cast<std::size_t>(c.dim)) {
    for (const Json& b : bounds) c.bounds.push_back(parse_interval(b, "config"));
  } else {
    config_error("config: bounds must give one [lo, hi] pair per axis");
  }

  if (!doc.contains("nodes")) config_error("config: 'nodes' is required");
  const Json& nodes = doc["nodes"];
  if (nodes.is_number_integer()) {
    c.nodes.assign(static_cast<std::size_t>(c.dim), nodes.get<int>());
  } else if (nodes.is_array() && nodes.size() == static_cast<std::size_t>(c.dim)) {
    for (const Json& n : nodes) c.nodes.push_back(get_as<int>(n, "nodes", "config"));
  } else {
    config_error("config: nodes must be an integer or one integer per axis");
  }

  if (doc.contains("f")) c.f_expr = expression_text(doc["f"], "f");
  if (doc.contains("phi")) c.phi_expr = expression_text(doc["phi"], "phi");

  if (doc.contains("A")) {
    const Json& a = doc["A"];
    if (a.is_string()) {
      if (a.get<std::string>() != "identity") config_error("config: A must be \"identity\" or an object");
    } else if (a.is_object()) {
      reject_unknown(a, {"scalar_expr", "matrix"}, "A");
      if (a.contains("scalar_expr") == a.contains("matrix")) {
        config_error("A: give exactly one of scalar_expr or matrix");
      }
      if (a.contains("scalar_expr")) {
        c.a.kind = CoeffSpec::Kind::Scalar;
        c.a.scalar_expr = get_as<std::string>(a["scalar_expr"], "scalar_expr", "A");
      } else {
        c.a.kind = CoeffSpec::Kind::Matrix;
        c.a.matrix = get_as<std::vector<std::vector<double>>>(a["matrix"], "matrix", "A");
      }
    } else {
      config_error("config: A must be \"identity\" or an object");
    }
  }

  if (doc.contains("solver")) {
    const Json& s = doc["solver"];
    if (!s.is_object()) config_error("config: solver must be an object");
    reject_unknown(s, {"method", "tol", "max_iter", "eps_active", "subspace_every"}, "solver");
    try {
      if (s.contains("method")) c.solver.method = parse_solver_method(s["method"].get<std::string>());
    } catch (const Json::exception&) {
      config_error("solver: method must be a string");
    } catch (const Error& e) {
      config_error(std::string("solver: ") + e.what());
    }
    if (s.contains("tol")) c.solver.tol = get_as<double>(s["tol"], "tol", "solver");
    if (s.contains("max_iter")) c.solver.max_iter = get_as<long>(s["max_iter"], "max_iter", "solver");
    if (s.contains("eps_active") && !s["eps_active"].is_null()) c.solver.eps_active = get_as<double>(s["eps_active"], "eps_active", "solver");
    if (s.contains("subspace_every")) {
      c.solver.subspace_every = get_as<int>(s["subspace_every"], "subspace_every", "solver");
    }
    if (!(c.solver.tol > 0.0)) config_error("solver: tol must be positive");
  }

  if (doc.contains("seed")) c.seed = get_as<std::uint64_t>(doc["seed"], "seed", "config");

  if (doc.contains("primal")) {
    const Json& list = doc["primal"];
    if (!list.is_array()) config_error("config: primal must be a list of recipes");
    for (std::size_t i = 0; i < list.size(); ++i) c.primal.push_back(parse_primal(list[i], i));
  }
  if (doc.contains("dual")) {
    const Json& list = doc["dual"];
    if (!list.is_array()) config_error("config: dual must be a list of recipes");
    for (std::size_t i = 0; i < list.size(); ++i) c.dual.push_back(parse_dual(list[i], i));
  }
  return c;
}

ProblemConfig load_config(const std::filesystem::path& path) { return config_from_json(read_config_document(path)); }

Json config_to_json(const ProblemConfig& c) {
  Json j;
  j["dim"] = c.dim;
  Json bounds = Json::array();
  for (const Interval& b : c.bounds) bounds.push_back({b.lo, b.hi});
  j["bounds"] = bounds;
  j["nodes"] = c.nodes;
  j["f"] = c.f_expr;
  j["phi"] = c.phi_expr;
  switch (c.a.kind) {
    case CoeffSpec::Kind::Identity: j["A"] = "identity"; break;
    case CoeffSpec::Kind::Scalar: j["A"] = {{"scalar_expr", c.a.scalar_expr}}; break;
    case CoeffSpec::Kind::Matrix: j["A"] = {{"matrix", c.a.matrix}}; break;
  }
  Json solver;
  solver["method"] = to_string(c.solver.method);
  solver["tol"] = c.solver.tol;
  solver["max_iter"] = c.solver.max_iter > 0 ? c.solver.max_iter : (c.dim == 1 ? 200000 : 500000);
  if (c.solver.eps_active) {
    solver["eps_active"] = *c.solver.eps_active;
  } else {
    solver["eps_active"] = nullptr;
  }
  solver["subspace_every"] = c.solver.subspace_every;
  j["solver"] = solver;
  j["seed"] = c.seed;
  Json primal = Json::array();
  for (const PrimalRecipe& r : c.primal) {
    Json e{{"name", r.name}, {"kind", primal_kind_name(r.kind)}};
    if (r.kind == PrimalRecipe::Kind::Perturb) {
      e["eps"] = r.eps;
      e["mode"] = r.mode == PrimalRecipe::Mode::Smooth ? "smooth" : "rough";
    }
    if (r.kind == PrimalRecipe::Kind::Coarse) e["n_coarse"] = r.n_coarse;
    if (r.kind == PrimalRecipe::Kind::Iterate) e["k"] = r.k;
    primal.push_back(e);
  }
  j["primal"] = primal;
  Json dual = Json::array();
  for (const DualRecipe& r : c.dual) dual.push_back({{"name", r.name}, {"kind", dual_kind_name(r.kind)}});
  j["dual"] = dual;
  return j;
}

Grid make_config_grid(const ProblemConfig& c) { return make_grid(c.dim, c.bounds, c.nodes); }

ObstacleProblem build_problem(const ProblemConfig& c, std::optional<int> nodes_override) {
  std::vector<int> nodes = c.nodes;
  if (nodes_override) std::fill(nodes.begin(), nodes.end(), *nodes_override);
  const Grid grid = make_grid(c.dim, c.bounds, nodes);

  ScalarField f = sample(c.f_expr, grid, "f");
  ScalarField phi = sample(c.phi_expr, grid, "phi");

  std::optional<CoefficientTensor> a;
  switch (c.a.kind) {
    case CoeffSpec::Kind::Identity:
      a = CoefficientTensor::identity(grid);
      break;
    case CoeffSpec::Kind::Scalar:
      a = CoefficientTensor::scalar_field(sample(c.a.scalar_expr, grid, "A scalar_expr"));
      break;
    case CoeffSpec::Kind::Matrix: {
      const auto n = static_cast<Eigen::Index>(c.a.matrix.size());
      Eigen::MatrixXd m(n, n);
      for (Eigen::Index r = 0; r < n; ++r) {
        if (c.a.matrix[r].size() != static_cast<std::size_t>(n)) config_error("A: matrix must be square");
        for (Eigen::Index col = 0; col < n; ++col) m(r, col) = c.a.matrix[r][col];
      }
      a = CoefficientTensor::matrix(grid, m);
      break;
    }
  }
  return ObstacleProblem(std::move(f), std::move(phi), std::move(*a));
}

LoadedProblem load_problem(const std::filesystem::path& path) {
  ProblemConfig config = load_config(path);
  ObstacleProblem problem = build_problem(config);
  return {std::move(problem), std::move(config)};
}

SolverOptions solver_options(const ProblemConfig& c) {
  SolverOptions o;
  o.method = c.solver.method;
  o.tol = c.solver.tol;
  o.max_iter = c.solver.max_iter;
  if (c.solver.eps_active) o.eps_active = *c.solver.eps_active;
  o.subspace_every = c.solver.subspace_every;
  return o;
}

}  // namespace devlab
