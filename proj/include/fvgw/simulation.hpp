#pragma once

// Builds mesh, model, discretization and initial state from a configuration
// and runs it, optionally writing the output directory.

#include "fvgw/config.hpp"
#include "fvgw/output.hpp"

#include <memory>

namespace fvgw {

Mesh build_mesh(const SimulationConfig& config);

/// Porosity and permeability are cell averages of their field specs.
/// Violated hypotheses raise ConfigError unless test_mode is set.
FluidModel build_model(const SimulationConfig& config, const Mesh& mesh, HypothesisReport* report = nullptr);

class Problem {
 public:
  explicit Problem(SimulationConfig config);
  Problem(const Problem&) = delete;
  Problem& operator=(const Problem&) = delete;

  const SimulationConfig& config() const { return config_; }
  const Mesh& mesh() const { return mesh_; }
  const Discretization& discretization() const { return *disc_; }
  const State& initial() const { return initial_; }
  const HypothesisReport& hypotheses() const { return hypotheses_; }

 private:
  SimulationConfig config_;
  Mesh mesh_;
  HypothesisReport hypotheses_;
  std::unique_ptr<Discretization> disc_;
  State initial_;
};

struct SimulationResult {
  Trajectory trajectory;
  std::filesystem::path output_directory;
};

/// Runs the problem; writes monitors.csv, field CSVs (and VTK), the
/// canonical config and metadata.json when write_output is set.
SimulationResult simulate(const Problem& problem, bool write_output = true);

std::filesystem::path resolve_output_directory(const SimulationConfig& config);

}  // namespace fvgw
