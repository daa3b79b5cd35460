#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rbeigs/analysis.hpp"
#include "rbeigs/assemble.hpp"
#include "rbeigs/config.hpp"
#include "rbeigs/mesh.hpp"
#include "rbeigs/problem.hpp"
#include "rbeigs/rom.hpp"

namespace rbeigs {

/// Named problem + mesh prepared from an ExperimentConfig; shared by the CLI
/// subcommands and the test harnesses.
class ExperimentContext {
 public:
  explicit ExperimentContext(ExperimentConfig cfg);

  const ExperimentConfig& config() const noexcept { return cfg_; }
  const ParametricProblem& problem() const noexcept { return *problem_; }
  const Mesh& mesh() const noexcept { return mesh_; }

  /// Assemble and solve the FOM for the lowest `pairs` eigenpairs.
  EigenSolution solve_fom(std::span<const double> mu, std::size_t pairs,
                          AssembledPencil* pencil_out = nullptr) const;

  /// Offline stage: snapshots at the training set, QR, basis.
  ReducedBasis offline_basis() const;

  std::string mu_tag(std::span<const double> mu) const;
  std::filesystem::path basis_path() const;

 private:
  ExperimentConfig cfg_;
  const ParametricProblem* problem_;
  Mesh mesh_;
};

// CLI drivers. Each writes its CSV outputs under config().out_dir and
// returns the process exit code (0 ok, 1 bound failure, 2 solver failure,
// 3 config error).
int cmd_fom(const ExperimentContext& ctx, std::span<const double> mu);
int cmd_offline(const ExperimentContext& ctx);
int cmd_sweep(const ExperimentContext& ctx);
int cmd_bounds(const ExperimentContext& ctx, const std::vector<std::vector<double>>& mus);
int cmd_list_problems();

struct SweepRow {
  std::vector<double> mu;
  std::size_t k = 0;
  double lambda = 0, lambda_tilde = 0, eigval_err = 0, eps = 0;
  std::string status = "ok";
  double fom_ms = 0, rom_ms = 0;
};

/// Sweep worker shared by cmd_sweep and the acceptance tests; rows ordered by
/// (test point, k). Per-point failures produce a single row with the error
/// status and NaN values.
std::vector<SweepRow> run_sweep_rows(const ExperimentContext& ctx, const ReducedBasis& basis);

/// Bound verification at one parameter (FOM solve of r+1 pairs + ROM solve).
BoundReport run_bounds_at(const ExperimentContext& ctx, const ReducedBasis& basis,
                          std::span<const double> mu);

}  // namespace rbeigs
