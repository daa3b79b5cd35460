#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rbeigs/analysis.hpp"
#include "rbeigs/lobpcg.hpp"

namespace rbeigs {

/// Per-dimension uniform grid start:step:count; points enumerate with the
/// first dimension outermost.
struct GridSpec {
  std::vector<double> start, step;
  std::vector<std::size_t> count;

  std::vector<std::vector<double>> points() const;
  bool empty() const { return count.empty(); }
};

struct ExperimentConfig {
  std::string problem_name;
  std::string preset = "desk";  // desk | paper
  double h = 0.0;
  int element_order = 1;
  std::size_t p = 1;
  std::uint64_t seed = 12345;
  BoundOptions::Shift shift = BoundOptions::Shift::automatic;
  double partition_tol = 1e-6;
  std::vector<std::vector<double>> train;
  GridSpec test;
  SolverOptions solver;
  std::filesystem::path out_dir = "out";
  bool write_eigenvectors = false;
  bool write_matrices = false;
  bool write_basis_csv = false;
};

/// Built-in defaults for a named problem and preset ("desk" or "paper").
ExperimentConfig preset_config(const std::string& problem, const std::string& preset);

/// Line-oriented key = value sections; see README for the schema. Optional
/// overrides replace values from the file.
ExperimentConfig load_config(const std::filesystem::path& path,
                             const std::string& preset_override = "",
                             const std::uint64_t* seed_override = nullptr,
                             const std::filesystem::path* out_override = nullptr);

/// "1; 5; 9" or "3,0.8; 1,0" -> list of parameter points.
std::vector<std::vector<double>> parse_point_list(const std::string& text);

}  // namespace rbeigs
