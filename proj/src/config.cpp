#include "rbeigs/config.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "rbeigs/errors.hpp"
#include "rbeigs/problem.hpp"

namespace rbeigs {

std::vector<std::vector<double>> GridSpec::points() const {
  std::vector<std::vector<double>> out;
  if (count.empty()) return out;
  std::size_t total = 1;
  for (std::size_t c : count) total *= c;
  out.reserve(total);
  std::vector<std::size_t> idx(count.size(), 0);
  for (std::size_t t = 0; t < total; ++t) {
    std::vector<double> mu(count.size());
    for (std::size_t d = 0; d < count.size(); ++d)
      mu[d] = start[d] + static_cast<double>(idx[d]) * step[d];
    out.push_back(std::move(mu));
    for (std::size_t d = count.size(); d-- > 0;) {  // last dimension fastest
      if (++idx[d] < count[d]) break;
      idx[d] = 0;
    }
  }
  return out;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& s, const std::string& key) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (trim(s.substr(used)).empty()) return v;
  } catch (...) {
  }
  throw ConfigError("bad numeric value for " + key + ": '" + s + "'");
}

std::uint64_t parse_u64(const std::string& s, const std::string& key) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(s, &used);
    if (trim(s.substr(used)).empty()) return v;
  } catch (...) {
  }
  throw ConfigError("bad integer value for " + key + ": '" + s + "'");
}

bool parse_bool(const std::string& s, const std::string& key) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("bad boolean value for " + key + ": '" + s + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  if (!out.empty() && out.back().empty()) out.pop_back();
  return out;
}

GridSpec parse_grid(const std::string& text) {
  GridSpec g;
  for (const std::string& dim : split(text, 'x')) {
    const std::vector<std::string> parts = split(dim, ':');
    if (parts.size() != 3) throw ConfigError("grid dimension needs start:step:count: '" + dim + "'");
    g.start.push_back(parse_double(parts[0], "grid start"));
    g.step.push_back(parse_double(parts[1], "grid step"));
    const std::uint64_t c = parse_u64(parts[2], "grid count");
    if (c == 0) throw ConfigError("grid count must be positive");
    g.count.push_back(c);
  }
  return g;
}

GridSpec make_grid_1d(double start, double step, std::size_t count) {
  GridSpec g;
  g.start = {start};
  g.step = {step};
  g.count = {count};
  return g;
}

}  // namespace

std::vector<std::vector<double>> parse_point_list(const std::string& text) {
  std::vector<std::vector<double>> points;
  for (const std::string& item : split(text, ';')) {
    if (item.empty()) continue;
    std::vector<double> mu;
    for (const std::string& comp : split(item, ','))
      mu.push_back(parse_double(comp, "parameter"));
    points.push_back(std::move(mu));
  }
  return points;
}

ExperimentConfig preset_config(const std::string& problem, const std::string& preset) {
  if (preset != "desk" && preset != "paper")
    throw ConfigError("unknown preset: " + preset);
  const bool paper = preset == "paper";
  (void)builtin_problem(problem);  // validates the name

  ExperimentConfig c;
  c.problem_name = problem;
  c.preset = preset;
  c.solver.preconditioner = Preconditioner::jacobi;
  c.solver.max_iter = 4000;

  if (problem == "laplace_robin_1d") {
    c.h = paper ? 1.0 / 2000.0 : 1.0 / 500.0;
    c.p = 5;
    c.train = {{1.0}, {5.0}, {9.0}};
    c.test = make_grid_1d(0.0, 0.25, 41);
    c.solver.tol = 1e-12;
  } else if (problem == "harmonic_oscillator_1d") {
    c.h = 1.0 / 50.0;  // the published mesh is already desk scale
    c.p = 4;
    c.train = {{1.0, 0.0}, {1.0, 0.5}, {1.0, 1.0}, {2.0, 0.0}, {2.0, 0.5},
               {2.0, 1.0}, {3.0, 0.0}, {3.0, 0.5}, {3.0, 1.0}};
    GridSpec g;
    g.start = {1.0, 0.0};
    g.step = {0.25, 0.1};
    g.count = {9, 11};
    c.test = g;
    c.solver.tol = 1e-11;
  } else if (problem == "gaussian_well_2d") {
    c.h = paper ? 1.0 / 128.0 : 1.0 / 32.0;
    c.p = 1;
    c.train = {{-2.5}, {2.5}};
    c.test = make_grid_1d(-5.0, 0.25, 41);
    c.solver.tol = 1e-9;
  } else if (problem == "diatomic_well_3d") {
    c.h = paper ? 1.0 / 128.0 : 1.0 / 16.0;
    c.p = 2;
    c.train = {{-1.25}, {0.0}, {1.25}};
    c.test = make_grid_1d(-2.0, 0.125, 33);
    c.solver.tol = 1e-9;
  } else if (problem == "fichera_diffusion_3d") {
    c.h = paper ? 1.0 / 64.0 : 1.0 / 8.0;
    c.element_order = paper ? 2 : 1;
    c.p = 9;
    c.train = {{0.0}, {10.0}, {20.0}};
    c.test = make_grid_1d(0.0, 0.5, 41);
    c.solver.tol = 1e-9;
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path,
                             const std::string& preset_override,
                             const std::uint64_t* seed_override,
                             const std::filesystem::path* out_override) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::map<std::string, std::string> kv;
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": bad section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = section + "." + trim(line.substr(0, eq));
    kv[key] = trim(line.substr(eq + 1));
  }

  const auto take = [&kv](const std::string& key) -> std::string* {
    const auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };

  const std::string* problem = take("experiment.problem");
  if (!problem) throw ConfigError(path.string() + ": missing experiment.problem");
  std::string preset = "desk";
  if (const std::string* v = take("experiment.preset")) preset = *v;
  if (!preset_override.empty()) preset = preset_override;

  ExperimentConfig c = preset_config(*problem, preset);
  kv.erase("experiment.problem");
  kv.erase("experiment.preset");

  if (const std::string* v = take("experiment.h")) c.h = parse_double(*v, "h");
  if (const std::string* v = take("experiment.element_order"))
    c.element_order = static_cast<int>(parse_u64(*v, "element_order"));
  if (const std::string* v = take("experiment.p")) c.p = parse_u64(*v, "p");
  if (const std::string* v = take("experiment.seed")) c.seed = parse_u64(*v, "seed");
  if (const std::string* v = take("experiment.partition_tol"))
    c.partition_tol = parse_double(*v, "partition_tol");
  if (const std::string* v = take("experiment.shift")) {
    if (*v == "auto")
      c.shift = BoundOptions::Shift::automatic;
    else if (*v == "always")
      c.shift = BoundOptions::Shift::always;
    else if (*v == "never")
      c.shift = BoundOptions::Shift::never;
    else
      throw ConfigError("bad shift policy: " + *v);
  }
  if (const std::string* v = take("train.mu")) c.train = parse_point_list(*v);
  if (const std::string* v = take("test.grid")) c.test = parse_grid(*v);
  if (const std::string* v = take("solver.tol")) c.solver.tol = parse_double(*v, "tol");
  if (const std::string* v = take("solver.max_iter"))
    c.solver.max_iter = parse_u64(*v, "max_iter");
  if (const std::string* v = take("solver.preconditioner")) {
    if (*v == "jacobi")
      c.solver.preconditioner = Preconditioner::jacobi;
    else if (*v == "none")
      c.solver.preconditioner = Preconditioner::none;
    else
      throw ConfigError("bad preconditioner: " + *v);
  }
  if (const std::string* v = take("solver.history_csv")) c.solver.history_csv = *v;
  if (const std::string* v = take("output.dir")) c.out_dir = *v;
  if (const std::string* v = take("output.eigenvectors"))
    c.write_eigenvectors = parse_bool(*v, "eigenvectors");
  if (const std::string* v = take("output.matrices"))
    c.write_matrices = parse_bool(*v, "matrices");
  if (const std::string* v = take("output.basis_csv"))
    c.write_basis_csv = parse_bool(*v, "basis_csv");

  for (const std::string known :
       {"experiment.h", "experiment.element_order", "experiment.p", "experiment.seed",
        "experiment.partition_tol", "experiment.shift", "train.mu", "test.grid",
        "solver.tol", "solver.max_iter", "solver.preconditioner", "solver.history_csv",
        "output.dir", "output.eigenvectors", "output.matrices", "output.basis_csv"})
    kv.erase(known);
  if (!kv.empty()) throw ConfigError("unknown config key: " + kv.begin()->first);

  if (seed_override) c.seed = *seed_override;
  if (out_override) c.out_dir = *out_override;
  c.solver.seed = c.seed;

  const ParametricProblem& prob = builtin_problem(c.problem_name);
  for (const auto& mu : c.train)
    if (!prob.contains(mu))
      throw ConfigError("training parameter outside the problem domain");
  for (const auto& mu : c.test.points())
    if (!prob.contains(mu))
      throw ConfigError("test parameter outside the problem domain");
  if (c.p < 1) throw ConfigError("p must be at least 1");
  return c;
}

}  // namespace rbeigs
