#include "fvgw/convergence.hpp"
#include "fvgw/simulation.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace fvgw;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = FVGW_SCENARIO_DIR;
const std::string kCli = FVGW_CLI_PATH;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path workdir(const std::string& name) {
  const fs::path dir = fs::current_path() / "cli-work" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Copies a shipped scenario into a scratch directory so outputs land there.
fs::path stage(const std::string& scenario, const std::string& name) {
  const fs::path dir = workdir(name);
  fs::copy_file(kScenarios / scenario, dir / scenario);
  return dir / scenario;
}

int run(const std::string& args, const fs::path& log) {
  const std::string cmd = kCli + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(cell);
    rows.push_back(row);
  }
  return rows;
}

const char* kMinimal = R"(
[mesh]
cells = [3, 2]
[mesh.boundary]
west = "water_injection"
east = "impervious"
south = "impervious"
north = "impervious"
[fluid]
[time]
dt = 0.1
final_time = 0.2
)";

}  // namespace

TEST(Config, MissingTimeSectionNamed) {
  std::string text = kMinimal;
  text = text.substr(0, text.find("[time]"));
  try {
    parse_config(text);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("[time]"), std::string::npos) << e.what();
  }
}

TEST(Config, UnknownKeysRejected) {
  EXPECT_NO_THROW(parse_config(kMinimal));
  EXPECT_THROW(parse_config(std::string(kMinimal) + "colour = 3\n"), ConfigError);
  EXPECT_THROW(parse_config(std::string(kMinimal) + "[output]\nformat = \"vtk\"\n"), ConfigError);
  EXPECT_THROW(parse_config(std::string(kMinimal) + "[shiny]\n"), ConfigError);
}

TEST(Config, ValidationErrors) {
  std::string bad_tag = kMinimal;
  bad_tag.replace(bad_tag.find("\"impervious\""), 12, "\"porous\"");
  EXPECT_THROW(parse_config(bad_tag), ConfigError);
  EXPECT_THROW(parse_config(std::string(kMinimal) + "[fluid.capillary]\noffset = 0.01\n"), ConfigError);
  std::string bad_dt = kMinimal;
  bad_dt.replace(bad_dt.find("dt = 0.1"), 8, "dt = -1.0");
  EXPECT_THROW(parse_config(bad_dt), ConfigError);
  EXPECT_THROW(parse_config("[mesh\n"), ConfigError);
  // H3 violated: mobilities s^2 and (1-s)^2 cannot guarantee m0 = 0.6
  EXPECT_THROW(Problem(parse_config(std::string(kMinimal).replace(std::string(kMinimal).find("[fluid]"), 7,
                                                                  "[fluid]\nm0 = 0.6"))),
               ConfigError);
}

TEST(Config, RoundTripIsIdempotent) {
  for (const char* name : {"injection.toml", "gravity.toml", "heterogeneous.toml", "uniform.toml", "smooth.toml"}) {
    const SimulationConfig cfg = load_config(kScenarios / name);
    const std::string once = serialize_config(cfg);
    const std::string twice = serialize_config(parse_config(once));
    EXPECT_EQ(once, twice) << name;
  }
}

TEST(Output, CsvEscaping) {
  EXPECT_EQ(csv_escape("plain"), "plain");
  EXPECT_EQ(csv_escape("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_escape("say \"hi\""), "\"say \"\"hi\"\"\"");
}

TEST(Output, FieldAndVtkLayout) {
  const Mesh m = build_rect_mesh(2, 1, Box{Vec3::Zero(), Vec3(2, 1, 0)}, SideTags{BoundaryTag::impervious, BoundaryTag::impervious, BoundaryTag::impervious, BoundaryTag::impervious});
  const State st{(CellField(2) << 0.25, -1.0).finished(), (CellField(2) << 0.5, 0.125).finished()};
  std::ostringstream csv;
  write_fields_csv(csv, m, st);
  EXPECT_EQ(csv.str(), "cell_id,x,y,p,s\n0,0.5,0.5,0.25,0.5\n1,1.5,0.5,-1,0.125\n");
  std::ostringstream vtk;
  write_vtk(vtk, m, st, "t");
  const std::string v = vtk.str();
  EXPECT_EQ(v.rfind("# vtk DataFile Version", 0), 0u);
  EXPECT_NE(v.find("DATASET UNSTRUCTURED_GRID"), std::string::npos);
  EXPECT_NE(v.find("CELL_TYPES 2\n9\n9\n"), std::string::npos);
  EXPECT_NE(v.find("CELL_DATA 2"), std::string::npos);
}

TEST(Convergence, ConstantSolutionHasZeroErrors) {
  SimulationConfig cfg = load_config(kScenarios / "uniform.toml");
  cfg.mesh.rect.counts = {2, 2, 1};
  cfg.solver.final_time = 0.2;
  const ErrorTable t = run_convergence(cfg, 3);
  ASSERT_EQ(t.levels.size(), 3u);
  for (const auto& e : t.levels) {
    EXPECT_LE(e.error_p, 1e-10);
    EXPECT_LE(e.error_s, 1e-10);
  }
  for (std::size_t l = 1; l < t.levels.size(); ++l) EXPECT_LT(t.levels[l].h, t.levels[l - 1].h);
}

TEST(Convergence, Preconditions) {
  const SimulationConfig cfg = load_config(kScenarios / "smooth.toml");
  EXPECT_THROW(run_convergence(cfg, 2), ConfigError);
  SimulationConfig file = cfg;
  file.mesh.file = "two_cells.mesh";
  EXPECT_THROW(refine_config(file, 1), ConfigError);
  const SimulationConfig r = refine_config(cfg, 2);
  EXPECT_EQ(r.mesh.rect.counts[0], 16);
  EXPECT_DOUBLE_EQ(r.solver.dt, cfg.solver.dt / 4);
}

TEST(Convergence, RestrictionAveragesBlocks) {
  const SideTags t{BoundaryTag::impervious, BoundaryTag::impervious, BoundaryTag::impervious, BoundaryTag::impervious};
  const Mesh fine = build_rect_mesh(4, 2, Box{Vec3::Zero(), Vec3(1, 1, 0)}, t);
  const Mesh coarse = build_rect_mesh(2, 1, Box{Vec3::Zero(), Vec3(1, 1, 0)}, t);
  const CellField v = CellField::LinSpaced(8, 0, 7);
  const CellField r = restrict_to(fine, v, coarse);
  EXPECT_DOUBLE_EQ(r[0], (0 + 1 + 4 + 5) / 4.0);
  EXPECT_DOUBLE_EQ(r[1], (2 + 3 + 6 + 7) / 4.0);
}

TEST(Convergence, FinerReferenceIsRobust) {
  const SimulationConfig cfg = load_config(kScenarios / "smooth.toml");
  const ErrorTable a = run_convergence(cfg, 3, 1);
  const ErrorTable b = run_convergence(cfg, 3, 2);
  EXPECT_LT(std::abs(a.levels[0].error_p - b.levels[0].error_p), 0.1 * b.levels[0].error_p);
  EXPECT_LT(std::abs(a.levels[0].error_s - b.levels[0].error_s), 0.1 * b.levels[0].error_s);
}

TEST(Cli, SimulateUniform) {
  const fs::path cfg = stage("uniform.toml", "uniform");
  ASSERT_EQ(run("simulate " + cfg.string(), cfg.parent_path() / "log.txt"), 0) << slurp(cfg.parent_path() / "log.txt");
  const fs::path out = cfg.parent_path() / "out/uniform";
  const auto rows = read_csv(out / "fields_000010.csv");
  ASSERT_EQ(rows.size(), 65u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"cell_id", "x", "y", "p", "s"}));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_EQ(std::stod(rows[i][3]), 0.3);
    EXPECT_EQ(std::stod(rows[i][4]), 0.4);
  }
  EXPECT_TRUE(fs::exists(out / "metadata.json"));
  EXPECT_TRUE(fs::exists(out / "config.toml"));
}

TEST(Cli, SimulateInjectionBoundsAndDeterminism) {
  const fs::path cfg = stage("injection.toml", "injection");
  const fs::path out = cfg.parent_path() / "out/injection";
  ASSERT_EQ(run("simulate " + cfg.string(), cfg.parent_path() / "log.txt"), 0);
  const auto rows = read_csv(out / "monitors.csv");
  ASSERT_EQ(rows.size(), 101u);
  const std::string header = slurp(out / "monitors.csv").substr(0, slurp(out / "monitors.csv").find('\n'));
  EXPECT_EQ(header, kMonitorHeader);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_LE(std::stod(rows[i][5]), 1 + 1e-10);
    EXPECT_GE(std::stod(rows[i][4]), -1e-10);
  }
  const std::string first = slurp(out / "fields_000100.csv");
  const std::string monitors = slurp(out / "monitors.csv");
  ASSERT_EQ(run("simulate " + cfg.string(), cfg.parent_path() / "log2.txt"), 0);
  EXPECT_EQ(first, slurp(out / "fields_000100.csv"));
  EXPECT_EQ(monitors, slurp(out / "monitors.csv"));
}

TEST(Cli, SimulateVtkFlag) {
  const fs::path dir = workdir("vtk");
  std::ofstream(dir / "v.toml") << kMinimal << "[output]\ndirectory = \"o\"\nvtk = true\n";
  ASSERT_EQ(run("simulate " + (dir / "v.toml").string(), dir / "log.txt"), 0);
  EXPECT_TRUE(fs::exists(dir / "o/fields_000002.vtk"));
}

TEST(Cli, MissingTimeExitsTwo) {
  const fs::path dir = workdir("badcfg");
  std::string text = kMinimal;
  std::ofstream(dir / "bad.toml") << text.substr(0, text.find("[time]"));
  EXPECT_EQ(run("simulate " + (dir / "bad.toml").string(), dir / "log.txt"), 2);
  EXPECT_NE(slurp(dir / "log.txt").find("[time]"), std::string::npos);
}

TEST(Cli, RuntimeAbortExitsThree) {
  const fs::path dir = workdir("abort");
  // a tolerance below round-off cannot be met, so dt shrinks past dt_min
  std::ofstream(dir / "a.toml") << kMinimal << "[solver]\nnewton_tol = 1e-30\nnewton_max_iter = 2\ndt_min = 0.05\n"
                                << "[initial]\nsaturation = 0.5\n";
  EXPECT_EQ(run("simulate " + (dir / "a.toml").string(), dir / "log.txt"), 3) << slurp(dir / "log.txt");
}

TEST(Cli, VerifyQuickAndFault) {
  const fs::path dir = workdir("verify");
  EXPECT_EQ(run("verify --quick", dir / "quick.txt"), 0) << slurp(dir / "quick.txt");
  EXPECT_EQ(run("verify --quick --inject-fault g2-sign", dir / "fault.txt"), 1);
  EXPECT_NE(slurp(dir / "fault.txt").find("[FAIL] fluxes.conservativity"), std::string::npos);
  EXPECT_NE(slurp(dir / "fault.txt").find("[PASS] mesh.duality"), std::string::npos);
}

TEST(Cli, VerifySuiteFilter) {
  const fs::path dir = workdir("filter");
  ASSERT_EQ(run("verify --suite duality", dir / "log.txt"), 0);
  const std::string log = slurp(dir / "log.txt");
  EXPECT_NE(log.find("mesh.duality"), std::string::npos);
  EXPECT_EQ(log.find("physics."), std::string::npos);
  EXPECT_EQ(log.find("fluxes."), std::string::npos);
  EXPECT_NE(log.find("1 suites"), std::string::npos);
  ASSERT_EQ(run("verify --suite mesh", dir / "mesh.txt"), 0);
  EXPECT_NE(slurp(dir / "mesh.txt").find("4 suites"), std::string::npos);
  EXPECT_EQ(run("verify --suite nonesuch", dir / "none.txt"), 2);
}

TEST(Cli, SeedFromEnvironment) {
  const fs::path dir = workdir("seed");
  ASSERT_EQ(run("verify --suite duality", dir / "default.txt"), 0);
  EXPECT_NE(slurp(dir / "default.txt").find("seed 20240917"), std::string::npos);
  const std::string cmd = "FVGW_SEED=99 " + kCli + " verify --suite duality > " + (dir / "env.txt").string();
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_NE(slurp(dir / "env.txt").find("seed 99"), std::string::npos);
}

TEST(Cli, ConvergenceWritesTable) {
  const fs::path cfg = stage("smooth.toml", "conv");
  ASSERT_EQ(run("convergence " + cfg.string() + " --levels 3", cfg.parent_path() / "log.txt"), 0);
  const auto rows = read_csv(cfg.parent_path() / "out/smooth/convergence.csv");
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0][0], "level");
  EXPECT_NE(slurp(cfg.parent_path() / "log.txt").find("order p"), std::string::npos);
  EXPECT_EQ(run("convergence " + cfg.string() + " --levels 2", cfg.parent_path() / "log2.txt"), 2);
}

TEST(Cli, CheckMesh) {
  const fs::path dir = workdir("mesh");
  EXPECT_EQ(run("check-mesh " + (kScenarios / "two_cells.mesh").string(), dir / "ok.txt"), 0);
  EXPECT_NE(slurp(dir / "ok.txt").find("admissible: yes"), std::string::npos);
  EXPECT_EQ(run("check-mesh " + (kScenarios / "skewed.mesh").string(), dir / "bad.txt"), 1);
  EXPECT_NE(slurp(dir / "bad.txt").find("admissible: no"), std::string::npos);
  EXPECT_EQ(run("check-mesh " + (dir / "missing.mesh").string(), dir / "missing.txt"), 2);
}

TEST(Cli, MeshFileScenario) {
  const fs::path dir = workdir("meshfile");
  fs::copy_file(kScenarios / "two_cells.mesh", dir / "two_cells.mesh");
  std::string text = kMinimal;
  const auto a = text.find("[mesh]"), b = text.find("[fluid]");
  text.replace(a, b - a, "[mesh]\nfile = \"two_cells.mesh\"\n");
  std::ofstream(dir / "f.toml") << text << "[initial]\nsaturation = 0.5\n";
  EXPECT_EQ(run("simulate " + (dir / "f.toml").string(), dir / "log.txt"), 0) << slurp(dir / "log.txt");
  fs::copy_file(kScenarios / "skewed.mesh", dir / "skewed.mesh");
  text.replace(text.find("two_cells.mesh"), 14, "skewed.mesh");
  std::ofstream(dir / "g.toml") << text;
  EXPECT_EQ(run("simulate " + (dir / "g.toml").string(), dir / "log2.txt"), 2);
}
