#pragma once

// Simulation configuration, read from and written to TOML. Parsing rejects
// unknown keys; serialization is canonical (every key, fixed order).

#include "fvgw/mesh.hpp"
#include "fvgw/physics.hpp"
#include "fvgw/scheme.hpp"
#include "fvgw/solver.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

namespace fvgw {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MeshSection {
  RectMeshSpec rect;
  /// External mesh file; replaces the rectangular generator when set.
  std::optional<std::string> file;
};

struct FluidSection {
  DensityLaw density = ConstantDensity{};
  double water_density = 1.0;
  MobilityLaw gas_mobility = PowerMobility{1.0, 2.0, false};
  MobilityLaw water_mobility = PowerMobility{1.0, 2.0, true};
  double m0 = 0.5;
  CapillaryLaw capillary = PowerCapillary{};
  double capillary_offset = 0.0;
  FieldSpec porosity = FieldSpec::constant(1.0);
  FieldSpec permeability = FieldSpec::constant(1.0);
  std::pair<double, double> pressure_range{-10.0, 10.0};
  bool test_mode = false;
};

struct InitialSection {
  FieldSpec pressure = FieldSpec::constant(0.0);
  FieldSpec saturation = FieldSpec::constant(0.0);
};

struct OutputSection {
  std::string directory = "output";
  bool fields = true;
  bool vtk = false;
};

struct SimulationConfig {
  MeshSection mesh;
  FluidSection fluid;
  SolverConfig solver;  // carries [time] and [solver]
  SourceModel sources;
  Vec3 gravity = Vec3::Zero();
  DirichletData boundary;
  InitialSection initial;
  OutputSection output;
  /// Directory relative paths (mesh file, output) are resolved against.
  std::filesystem::path base_directory = ".";
};

SimulationConfig parse_config(const std::string& text, const std::filesystem::path& base_directory = ".");
SimulationConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const SimulationConfig& config);

}  // namespace fvgw
