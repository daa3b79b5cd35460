#include "rbeigs/problem.hpp"

#include <cmath>
#include <map>

#include "rbeigs/errors.hpp"

namespace rbeigs {

namespace {

int round_ratio(double value, const char* what) {
  const double r = std::round(value);
  if (r < 1.0 || std::fabs(value - r) > 1e-9 * std::max(1.0, std::fabs(value)))
    throw IncompatibleResolution(std::string(what) + ": 1/h must divide the domain");
  return static_cast<int>(r);
}

double constant_one(const std::array<double, 3>&, std::span<const double>) { return 1.0; }
double constant_zero(const std::array<double, 3>&, std::span<const double>) { return 0.0; }

// 1D Laplacian on (0,1), Dirichlet at x=0, Robin with coefficient mu at x=1.
// The published grid has 1/h nodes (so n = 1/h - 1 free DOFs once the
// Dirichlet node is removed), giving n = 1999 at h = 1/2000.
ParametricProblem make_laplace_robin_1d() {
  ParametricProblem p;
  p.name = "laplace_robin_1d";
  p.description = "1D Laplacian on (0,1), Dirichlet left end, Robin(mu) right end";
  p.domain = Domain::interval;
  p.dim = 1;
  p.mesh_for = [](double h, int order) {
    MeshSpec s;
    s.domain = Domain::interval;
    s.lo = {0.0, 0.0, 0.0};
    s.hi = {1.0, 0.0, 0.0};
    s.cells = {round_ratio(1.0 / h, "laplace_robin_1d") - 1, 1, 1};
    s.element_order = order;
    return s;
  };
  p.sigma = constant_one;
  p.rho = constant_zero;
  p.alpha = [](const std::array<double, 3>& x, std::span<const double> mu) {
    return x[0] < 0.5 ? 1.0 : mu[0];
  };
  p.beta = [](const std::array<double, 3>& x, std::span<const double>) {
    return x[0] < 0.5 ? 0.0 : 1.0;
  };
  p.param_box = {{0.0, 10.0}};
  p.default_p = 5;
  p.has_affine = true;
  p.affine_a.push_back({[](std::span<const double>) { return 1.0; },
                        constant_one, nullptr, nullptr});
  p.affine_a.push_back({[](std::span<const double> mu) { return mu[0]; }, nullptr,
                        nullptr, constant_one});
  p.affine_m.push_back({[](std::span<const double>) { return 1.0; }, constant_one});
  return p;
}

// 1D Schroedinger operator with harmonic potential mu1^2 (x + 2 - 4 mu2)^2 on
// (-20,20), Neumann ends. Grid spacing is h exactly: 40/h cells, n = 40/h + 1.
ParametricProblem make_harmonic_oscillator_1d() {
  ParametricProblem p;
  p.name = "harmonic_oscillator_1d";
  p.description = "1D harmonic oscillator with parametric strength and center";
  p.domain = Domain::interval;
  p.dim = 1;
  p.mesh_for = [](double h, int order) {
    MeshSpec s;
    s.domain = Domain::interval;
    s.lo = {-20.0, 0.0, 0.0};
    s.hi = {20.0, 0.0, 0.0};
    s.cells = {round_ratio(40.0 / h, "harmonic_oscillator_1d"), 1, 1};
    s.element_order = order;
    return s;
  };
  p.sigma = constant_one;
  p.rho = [](const std::array<double, 3>& x, std::span<const double> mu) {
    const double s = x[0] + 2.0 - 4.0 * mu[1];
    return mu[0] * mu[0] * s * s;
  };
  p.alpha = constant_zero;
  p.beta = constant_one;
  p.param_box = {{1.0, 3.0}, {0.0, 1.0}};
  p.default_p = 4;
  return p;
}

// 2D Gaussian well on the unit square, Neumann boundary; the well center
// moves with mu along the x axis.
ParametricProblem make_gaussian_well_2d() {
  ParametricProblem p;
  p.name = "gaussian_well_2d";
  p.description = "2D Schroedinger operator with a moving Gaussian well";
  p.domain = Domain::square;
  p.dim = 2;
  p.mesh_for = [](double h, int order) {
    MeshSpec s;
    s.domain = Domain::square;
    s.lo = {0.0, 0.0, 0.0};
    s.hi = {1.0, 1.0, 0.0};
    const int c = round_ratio(1.0 / h, "gaussian_well_2d");
    s.cells = {c, c, 1};
    s.element_order = order;
    return s;
  };
  p.sigma = constant_one;
  p.rho = [](const std::array<double, 3>& x, std::span<const double> mu) {
    const double dx = x[0] - (0.5 + mu[0] / 128.0);
    const double dy = x[1] - 0.5;
    return -1200.0 * std::exp(-1024.0 * (dx * dx + dy * dy));
  };
  p.alpha = constant_zero;
  p.beta = constant_one;
  p.param_box = {{-5.0, 5.0}};
  p.default_p = 1;
  return p;
}

// 3D diatomic well: two mirror-symmetric Gaussian wells whose separation
// grows with mu. Kinetic coefficient 1/324, Neumann boundary.
ParametricProblem make_diatomic_well_3d() {
  ParametricProblem p;
  p.name = "diatomic_well_3d";
  p.description = "3D Kohn-Sham-like operator with a parametric diatomic well";
  p.domain = Domain::cube;
  p.dim = 3;
  p.mesh_for = [](double h, int order) {
    MeshSpec s;
    s.domain = Domain::cube;
    s.lo = {0.0, 0.0, 0.0};
    s.hi = {1.0, 1.0, 1.0};
    const int c = round_ratio(1.0 / h, "diatomic_well_3d");
    s.cells = {c, c, c};
    s.element_order = order;
    return s;
  };
  p.sigma = [](const std::array<double, 3>&, std::span<const double>) {
    return 1.0 / 324.0;
  };
  p.rho = [](const std::array<double, 3>& x, std::span<const double> mu) {
    static constexpr double amp[2] = {-28.9, -3.6};
    static constexpr double rad[2] = {7.0 / 450.0, 3.0 / 50.0};
    const double cx[2] = {13.0 / 36.0 - mu[0] / 128.0, 23.0 / 36.0 + mu[0] / 128.0};
    double v = 0.0;
    for (int center = 0; center < 2; ++center) {
      const double dx = x[0] - cx[center];
      const double dy = x[1] - 0.5;
      const double dz = x[2] - 0.5;
      const double r2 = dx * dx + dy * dy + dz * dz;
      for (int k = 0; k < 2; ++k) v += amp[k] * std::exp(-r2 / (2.0 * rad[k] * rad[k]));
    }
    return v;
  };
  p.alpha = constant_zero;
  p.beta = constant_one;
  p.param_box = {{-2.0, 2.0}};
  p.default_p = 2;
  return p;
}

// Heterogeneous diffusion on the Fichera domain with contrast mu inside the
// box |x|_inf <= 0.25, homogeneous Dirichlet boundary. h is the cube cell
// side, so there are 2/h cells per axis; 1/h must be even so the reentrant
// corner lies on the grid. The shipped presets use 1/h multiples of 4, which
// keeps every cell on one side of the box interface.
ParametricProblem make_fichera_diffusion_3d() {
  ParametricProblem p;
  p.name = "fichera_diffusion_3d";
  p.description = "3D contrast diffusion on the Fichera corner domain";
  p.domain = Domain::fichera;
  p.dim = 3;
  p.mesh_for = [](double h, int order) {
    MeshSpec s;
    s.domain = Domain::fichera;
    s.lo = {-1.0, -1.0, -1.0};
    s.hi = {1.0, 1.0, 1.0};
    const int per_unit = round_ratio(1.0 / h, "fichera_diffusion_3d");
    if (per_unit % 2 != 0)
      throw IncompatibleResolution(
          "fichera_diffusion_3d: 1/h must be even so the corner lies on the grid");
    s.cells = {2 * per_unit, 2 * per_unit, 2 * per_unit};
    s.element_order = order;
    return s;
  };
  auto chi_box = [](const std::array<double, 3>& x) {
    return (std::fabs(x[0]) <= 0.25 && std::fabs(x[1]) <= 0.25 && std::fabs(x[2]) <= 0.25)
               ? 1.0
               : 0.0;
  };
  p.sigma = [chi_box](const std::array<double, 3>& x, std::span<const double> mu) {
    return 1.0 + mu[0] * chi_box(x);
  };
  p.rho = constant_zero;
  p.alpha = constant_one;
  p.beta = constant_zero;
  p.param_box = {{0.0, 20.0}};
  p.default_p = 9;
  p.has_affine = true;
  p.affine_a.push_back({[](std::span<const double>) { return 1.0; },
                        constant_one, nullptr, nullptr});
  p.affine_a.push_back(
      {[](std::span<const double> mu) { return mu[0]; },
       [chi_box](const std::array<double, 3>& x, std::span<const double>) {
         return chi_box(x);
       },
       nullptr, nullptr});
  p.affine_m.push_back({[](std::span<const double>) { return 1.0; }, constant_one});
  return p;
}

}  // namespace

bool ParametricProblem::contains(std::span<const double> mu) const {
  if (mu.size() != param_box.size()) return false;
  for (std::size_t i = 0; i < mu.size(); ++i)
    if (mu[i] < param_box[i][0] - 1e-12 || mu[i] > param_box[i][1] + 1e-12) return false;
  return true;
}

const ParametricProblem& builtin_problem(const std::string& name) {
  static const std::map<std::string, ParametricProblem> registry = [] {
    std::map<std::string, ParametricProblem> r;
    for (auto&& p : {make_laplace_robin_1d(), make_harmonic_oscillator_1d(),
                     make_gaussian_well_2d(), make_diatomic_well_3d(),
                     make_fichera_diffusion_3d()})
      r.emplace(p.name, std::move(p));
    return r;
  }();
  const auto it = registry.find(name);
  if (it == registry.end()) throw ConfigError("unknown problem: " + name);
  return it->second;
}

std::vector<std::string> builtin_problem_names() {
  return {"laplace_robin_1d", "harmonic_oscillator_1d", "gaussian_well_2d",
          "diatomic_well_3d", "fichera_diffusion_3d"};
}

}  // namespace rbeigs
