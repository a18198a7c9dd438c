#include "fvgw/config.hpp"

#include <fmt/format.h>
#include <toml.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace fvgw {

namespace {

constexpr std::array<const char*, 6> kSideNames{"west", "east", "south", "north", "bottom", "top"};

class Reader {
 public:
  Reader(const toml::table& table, std::string path) : table_(&table), path_(std::move(path)) {}

  const std::string& path() const { return path_; }
  std::string where(std::string_view key) const { return path_.empty() ? std::string(key) : path_ + "." + std::string(key); }

  [[noreturn]] void fail(std::string_view key, const std::string& what) const {
    throw ConfigError(fmt::format("[{}] {}", where(key), what));
  }

  bool has(std::string_view key) const { return table_->contains(key); }

  const toml::node* node(std::string_view key) {
    seen_.insert(std::string(key));
    return table_->get(key);
  }

  std::optional<double> number(std::string_view key) {
    const toml::node* n = node(key);
    if (!n) return std::nullopt;
    if (auto v = n->value_exact<double>()) return *v;
    if (auto v = n->value_exact<int64_t>()) return static_cast<double>(*v);
    fail(key, "expected a number");
  }
  double number(std::string_view key, double fallback) { return number(key).value_or(fallback); }
  double required_number(std::string_view key) {
    auto v = number(key);
    if (!v) fail(key, "is required");
    return *v;
  }

  std::optional<int64_t> integer(std::string_view key) {
    const toml::node* n = node(key);
    if (!n) return std::nullopt;
    if (auto v = n->value_exact<int64_t>()) return *v;
    fail(key, "expected an integer");
  }
  int64_t integer(std::string_view key, int64_t fallback) { return integer(key).value_or(fallback); }

  bool boolean(std::string_view key, bool fallback) {
    const toml::node* n = node(key);
    if (!n) return fallback;
    if (auto v = n->value_exact<bool>()) return *v;
    fail(key, "expected true or false");
  }

  std::optional<std::string> string(std::string_view key) {
    const toml::node* n = node(key);
    if (!n) return std::nullopt;
    if (auto v = n->value_exact<std::string>()) return *v;
    fail(key, "expected a string");
  }

  std::optional<std::vector<double>> numbers(std::string_view key) {
    const toml::node* n = node(key);
    if (!n) return std::nullopt;
    const toml::array* arr = n->as_array();
    if (!arr) fail(key, "expected an array of numbers");
    std::vector<double> out;
    for (const toml::node& e : *arr) {
      if (auto v = e.value_exact<double>()) out.push_back(*v);
      else if (auto i = e.value_exact<int64_t>()) out.push_back(static_cast<double>(*i));
      else fail(key, "expected an array of numbers");
    }
    return out;
  }

  std::optional<Vec3> vector(std::string_view key) {
    auto v = numbers(key);
    if (!v) return std::nullopt;
    if (v->empty() || v->size() > 3) fail(key, "expected 1 to 3 components");
    Vec3 out = Vec3::Zero();
    for (std::size_t i = 0; i < v->size(); ++i) out[static_cast<Index>(i)] = (*v)[i];
    return out;
  }

  std::optional<Reader> table(std::string_view key) {
    const toml::node* n = node(key);
    if (!n) return std::nullopt;
    const toml::table* t = n->as_table();
    if (!t) fail(key, "expected a table");
    return Reader(*t, where(key));
  }

  std::vector<Reader> tables(std::string_view key) {
    std::vector<Reader> out;
    const toml::node* n = node(key);
    if (!n) return out;
    const toml::array* arr = n->as_array();
    if (!arr) fail(key, "expected an array of tables");
    for (std::size_t i = 0; i < arr->size(); ++i) {
      const toml::table* t = (*arr)[i].as_table();
      if (!t) fail(key, "expected an array of tables");
      out.emplace_back(*t, fmt::format("{}[{}]", where(key), i));
    }
    return out;
  }

  /// Rejects keys nobody asked for.
  void finish() const {
    for (const auto& [k, v] : *table_) {
      (void)v;
      if (!seen_.count(std::string(k.str()))) throw ConfigError(fmt::format("unknown key [{}]", where(k.str())));
    }
  }

 private:
  const toml::table* table_;
  std::string path_;
  std::set<std::string> seen_;
};

FieldSpec read_field(Reader& parent, std::string_view key, double fallback) {
  FieldSpec spec = FieldSpec::constant(fallback);
  if (!parent.has(key)) return spec;
  if (auto direct = parent.number(key); direct) {
    spec.base = *direct;
    return spec;
  }
  spec.base = 0.0;
  return spec;
}

FieldSpec read_field_table(Reader& r) {
  FieldSpec spec;
  spec.base = r.number("base", 0.0);
  spec.gradient = r.vector("gradient").value_or(Vec3::Zero());
  for (Reader& b : r.tables("bumps")) {
    GaussianBump g;
    g.center = b.vector("center").value_or(Vec3::Zero());
    g.amplitude = b.required_number("amplitude");
    g.width = b.required_number("width");
    if (!(g.width > 0.0)) b.fail("width", "must be positive");
    b.finish();
    spec.bumps.push_back(g);
  }
  for (Reader& b : r.tables("boxes")) {
    BoxValue box;
    auto lo = b.vector("lower");
    auto hi = b.vector("upper");
    if (!lo || !hi) b.fail("lower", "boxes need lower and upper corners");
    box.box = {*lo, *hi};
    box.value = b.required_number("value");
    b.finish();
    spec.boxes.push_back(box);
  }
  if (auto w = r.numbers("window")) {
    if (w->size() != 2 || !((*w)[1] > (*w)[0])) r.fail("window", "expected [start, stop] with stop > start");
    spec.window = std::pair{(*w)[0], (*w)[1]};
  }
  r.finish();
  return spec;
}

FieldSpec field(Reader& parent, std::string_view key, double fallback) {
  if (!parent.has(key)) {
    parent.node(key);
    return FieldSpec::constant(fallback);
  }
  const toml::node* n = parent.node(key);
  if (n->is_table()) {
    Reader sub = *parent.table(key);
    return read_field_table(sub);
  }
  return read_field(parent, key, fallback);
}

BoundaryTag tag_of(Reader& r, std::string_view key) {
  const auto text = r.string(key);
  if (!text) r.fail(key, "side is not tagged");
  const auto tag = parse_boundary_tag(*text);
  if (!tag) r.fail(key, fmt::format("unknown boundary tag '{}'", *text));
  return *tag;
}

MeshSection read_mesh(Reader& r) {
  MeshSection m;
  m.file = r.string("file");
  if (m.file) {
    r.finish();
    return m;
  }
  auto cells = r.numbers("cells");
  if (!cells) r.fail("cells", "is required (or give a mesh file)");
  if (cells->size() != 2 && cells->size() != 3) r.fail("cells", "expected [nx, ny] or [nx, ny, nz]");
  m.rect.dimension = static_cast<int>(cells->size());
  for (std::size_t a = 0; a < cells->size(); ++a) {
    const double c = (*cells)[a];
    if (!(c >= 1.0) || c != std::floor(c)) r.fail("cells", "counts must be positive integers");
    m.rect.counts[a] = static_cast<Index>(c);
  }
  const Vec3 lo = r.vector("lower").value_or(Vec3::Zero());
  const Vec3 hi = r.vector("upper").value_or(Vec3::Ones());
  m.rect.extent = {lo, hi};
  for (int a = 0; a < m.rect.dimension; ++a)
    if (!(hi[a] > lo[a])) r.fail("upper", "extent is degenerate");
  auto b = r.table("boundary");
  if (!b) r.fail("boundary", "every side needs a boundary tag");
  for (int side = 0; side < 2 * m.rect.dimension; ++side)
    m.rect.tags[static_cast<std::size_t>(side)] = tag_of(*b, kSideNames[static_cast<std::size_t>(side)]);
  b->finish();
  r.finish();
  return m;
}

DensityLaw read_density(Reader& r) {
  const std::string law = r.string("law").value_or("constant");
  DensityLaw out;
  if (law == "constant") {
    out = ConstantDensity{r.number("value", 1.0)};
  } else if (law == "exponential") {
    out = ExponentialDensity{r.number("rho_min", 0.5), r.number("rho_max", 1.5), r.number("rate", 1.0)};
  } else if (law == "logistic") {
    out = LogisticDensity{r.number("rho_min", 0.5), r.number("rho_max", 1.5), r.number("rate", 1.0),
                          r.number("midpoint", 0.0)};
  } else if (law == "linear") {
    out = LinearDensity{r.number("intercept", 0.0), r.number("slope", 1.0), r.number("rho_min", 1.0),
                        r.number("rho_max", 3.0)};
  } else {
    r.fail("law", fmt::format("unknown density law '{}'", law));
  }
  r.finish();
  return out;
}

MobilityLaw read_mobility(Reader& r, bool decreasing) {
  const std::string law = r.string("law").value_or("power");
  MobilityLaw out;
  if (law == "power") {
    out = PowerMobility{r.number("scale", 1.0), r.number("exponent", 2.0), decreasing};
  } else if (law == "polynomial") {
    auto c = r.numbers("coefficients");
    if (!c || c->empty()) r.fail("coefficients", "is required for polynomial mobilities");
    out = PolynomialMobility{*c};
  } else {
    r.fail("law", fmt::format("unknown mobility law '{}'", law));
  }
  r.finish();
  return out;
}

CapillaryLaw read_capillary(Reader& r, double& offset) {
  const std::string law = r.string("law").value_or("power");
  CapillaryLaw out;
  if (law == "power") {
    out = PowerCapillary{r.number("scale", 1.0), r.number("exponent", 1.0)};
  } else if (law == "polynomial") {
    auto c = r.numbers("coefficients");
    if (!c || c->empty()) r.fail("coefficients", "is required for polynomial capillarity");
    out = PolynomialCapillary{*c};
  } else if (law == "saturating") {
    out = SaturatingCapillary{r.number("scale", 1.0), r.number("rate", 5.0)};
  } else {
    r.fail("law", fmt::format("unknown capillary law '{}'", law));
  }
  offset = r.number("offset", 0.0);
  r.finish();
  return out;
}

FluidSection read_fluid(Reader& r) {
  FluidSection f;
  f.test_mode = r.boolean("test_mode", false);
  f.water_density = r.number("water_density", 1.0);
  f.m0 = r.number("m0", 0.5);
  if (auto t = r.table("density")) f.density = read_density(*t);
  if (auto t = r.table("gas_mobility")) f.gas_mobility = read_mobility(*t, false);
  if (auto t = r.table("water_mobility")) f.water_mobility = read_mobility(*t, true);
  if (auto t = r.table("capillary")) f.capillary = read_capillary(*t, f.capillary_offset);
  f.porosity = field(r, "porosity", 1.0);
  f.permeability = field(r, "permeability", 1.0);
  if (auto pr = r.numbers("pressure_range")) {
    if (pr->size() != 2 || !((*pr)[1] > (*pr)[0])) r.fail("pressure_range", "expected [low, high] with high > low");
    f.pressure_range = {(*pr)[0], (*pr)[1]};
  }
  r.finish();

  // Construct the laws once so bad parameters surface as configuration errors.
  try {
    Density d(f.density);
    Mobility g(f.gas_mobility), w(f.water_mobility);
    Capillary c(f.capillary, f.capillary_offset);
  } catch (const ModelError& e) {
    throw ConfigError(fmt::format("[fluid] {}", e.what()));
  }
  if (!(f.water_density > 0.0)) throw ConfigError("[fluid.water_density] must be positive");
  if (!(f.m0 > 0.0)) throw ConfigError("[fluid.m0] must be positive");
  if (!f.test_mode && std::holds_alternative<LinearDensity>(f.density))
    throw ConfigError("[fluid.density] the linear law is only available with test_mode = true");
  if (!f.test_mode && f.capillary_offset != 0.0)
    throw ConfigError("[fluid.capillary.offset] a nonzero offset requires test_mode = true");
  return f;
}

void read_time(Reader& r, SolverConfig& s) {
  s.dt = r.required_number("dt");
  s.final_time = r.required_number("final_time");
  s.save_every = static_cast<int>(r.integer("save_every", 1));
  r.finish();
}

void read_solver(Reader& r, SolverConfig& s) {
  s.newton_tol = r.number("newton_tol", s.newton_tol);
  s.newton_max_iter = static_cast<int>(r.integer("newton_max_iter", s.newton_max_iter));
  s.damping = r.number("damping", s.damping);
  s.max_halvings = static_cast<int>(r.integer("max_halvings", s.max_halvings));
  s.dt_min = r.number("dt_min", s.dt_min);
  s.dt_growth = r.number("dt_growth", s.dt_growth);
  s.easy_iterations = static_cast<int>(r.integer("easy_iterations", s.easy_iterations));
  s.krylov_tol = r.number("krylov_tol", s.krylov_tol);
  s.krylov_max_iter = static_cast<int>(r.integer("krylov_max_iter", s.krylov_max_iter));
  if (auto ls = r.string("linear_solver")) {
    if (*ls == "sparse_lu") s.linear_solver = LinearSolverKind::sparse_lu;
    else if (*ls == "bicgstab") s.linear_solver = LinearSolverKind::bicgstab;
    else r.fail("linear_solver", fmt::format("unknown linear solver '{}'", *ls));
  }
  if (auto j = r.string("jacobian")) {
    if (*j == "analytic") s.jacobian = JacobianKind::analytic;
    else if (*j == "finite_difference") s.jacobian = JacobianKind::finite_difference;
    else r.fail("jacobian", fmt::format("unknown jacobian kind '{}'", *j));
  }
  r.finish();
}

// ---------------------------------------------------------------------------
// Emission

toml::array to_array(const Vec3& v, int dim) {
  toml::array a;
  for (int i = 0; i < dim; ++i) a.push_back(v[i]);
  return a;
}

toml::array to_array(const std::vector<double>& v) {
  toml::array a;
  for (double x : v) a.push_back(x);
  return a;
}

toml::table field_table(const FieldSpec& f, int dim) {
  toml::table t;
  t.insert("base", f.base);
  t.insert("gradient", to_array(f.gradient, dim));
  toml::array bumps;
  for (const auto& b : f.bumps)
    bumps.push_back(toml::table{{"center", to_array(b.center, dim)}, {"amplitude", b.amplitude}, {"width", b.width}});
  t.insert("bumps", bumps);
  toml::array boxes;
  for (const auto& b : f.boxes)
    boxes.push_back(toml::table{
        {"lower", to_array(b.box.lower, dim)}, {"upper", to_array(b.box.upper, dim)}, {"value", b.value}});
  t.insert("boxes", boxes);
  if (f.window) t.insert("window", toml::array{f.window->first, f.window->second});
  return t;
}

toml::table density_table(const DensityLaw& law) {
  if (auto* l = std::get_if<ConstantDensity>(&law)) return toml::table{{"law", "constant"}, {"value", l->value}};
  if (auto* l = std::get_if<ExponentialDensity>(&law))
    return toml::table{{"law", "exponential"}, {"rho_min", l->rho_min}, {"rho_max", l->rho_max}, {"rate", l->rate}};
  if (auto* l = std::get_if<LogisticDensity>(&law))
    return toml::table{{"law", "logistic"},
                       {"rho_min", l->rho_min},
                       {"rho_max", l->rho_max},
                       {"rate", l->rate},
                       {"midpoint", l->midpoint}};
  const auto& l = std::get<LinearDensity>(law);
  return toml::table{
      {"law", "linear"}, {"intercept", l.intercept}, {"slope", l.slope}, {"rho_min", l.rho_min}, {"rho_max", l.rho_max}};
}

toml::table mobility_table(const MobilityLaw& law) {
  if (auto* l = std::get_if<PowerMobility>(&law))
    return toml::table{{"law", "power"}, {"scale", l->scale}, {"exponent", l->exponent}};
  return toml::table{{"law", "polynomial"}, {"coefficients", to_array(std::get<PolynomialMobility>(law).coefficients)}};
}

toml::table capillary_table(const CapillaryLaw& law, double offset) {
  toml::table t;
  if (auto* l = std::get_if<PowerCapillary>(&law)) {
    t = toml::table{{"law", "power"}, {"scale", l->scale}, {"exponent", l->exponent}};
  } else if (auto* l = std::get_if<PolynomialCapillary>(&law)) {
    t = toml::table{{"law", "polynomial"}, {"coefficients", to_array(l->coefficients)}};
  } else {
    const auto& s = std::get<SaturatingCapillary>(law);
    t = toml::table{{"law", "saturating"}, {"scale", s.scale}, {"rate", s.rate}};
  }
  t.insert("offset", offset);
  return t;
}

}  // namespace

SimulationConfig parse_config(const std::string& text, const std::filesystem::path& base_directory) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    throw ConfigError(fmt::format("TOML syntax error at line {}: {}", e.source().begin.line, e.description()));
  }
  SimulationConfig cfg;
  cfg.base_directory = base_directory;
  Reader top(root, "");

  auto need = [&](std::string_view name) {
    auto r = top.table(name);
    if (!r) throw ConfigError(fmt::format("missing required section [{}]", name));
    return *r;
  };
  {
    Reader r = need("mesh");
    cfg.mesh = read_mesh(r);
  }
  {
    Reader r = need("fluid");
    cfg.fluid = read_fluid(r);
  }
  {
    Reader r = need("time");
    read_time(r, cfg.solver);
  }
  if (auto r = top.table("solver")) read_solver(*r, cfg.solver);
  try {
    cfg.solver.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(fmt::format("[solver] {}", e.what()));
  }
  if (auto r = top.table("sources")) {
    cfg.sources.production = field(*r, "production", 0.0);
    cfg.sources.injection = field(*r, "injection", 0.0);
    r->finish();
  }
  if (auto r = top.table("gravity")) {
    cfg.gravity = r->vector("vector").value_or(Vec3::Zero());
    r->finish();
  }
  if (auto r = top.table("boundary")) {
    cfg.boundary.pressure = r->number("pressure", 0.0);
    cfg.boundary.saturation = r->number("saturation", 0.0);
    r->finish();
  }
  if (auto r = top.table("initial")) {
    cfg.initial.pressure = field(*r, "pressure", 0.0);
    cfg.initial.saturation = field(*r, "saturation", 0.0);
    r->finish();
  }
  if (auto r = top.table("output")) {
    cfg.output.directory = r->string("directory").value_or(cfg.output.directory);
    cfg.output.fields = r->boolean("fields", true);
    cfg.output.vtk = r->boolean("vtk", false);
    r->finish();
  }
  top.finish();
  return cfg;
}

SimulationConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open configuration file '{}'", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

std::string serialize_config(const SimulationConfig& cfg) {
  const int dim = cfg.mesh.file ? 3 : cfg.mesh.rect.dimension;
  toml::table root;

  toml::table mesh;
  if (cfg.mesh.file) {
    mesh.insert("file", *cfg.mesh.file);
  } else {
    const auto& r = cfg.mesh.rect;
    toml::array cells;
    for (int a = 0; a < r.dimension; ++a) cells.push_back(static_cast<int64_t>(r.counts[static_cast<std::size_t>(a)]));
    mesh.insert("cells", cells);
    mesh.insert("lower", to_array(r.extent.lower, dim));
    mesh.insert("upper", to_array(r.extent.upper, dim));
    toml::table tags;
    for (int side = 0; side < 2 * r.dimension; ++side)
      if (const auto& t = r.tags[static_cast<std::size_t>(side)])
        tags.insert(kSideNames[static_cast<std::size_t>(side)], std::string(to_string(*t)));
    mesh.insert("boundary", tags);
  }
  root.insert("mesh", mesh);

  const auto& f = cfg.fluid;
  toml::table fluid{{"test_mode", f.test_mode},
                    {"water_density", f.water_density},
                    {"m0", f.m0},
                    {"pressure_range", toml::array{f.pressure_range.first, f.pressure_range.second}}};
  fluid.insert("density", density_table(f.density));
  fluid.insert("gas_mobility", mobility_table(f.gas_mobility));
  fluid.insert("water_mobility", mobility_table(f.water_mobility));
  fluid.insert("capillary", capillary_table(f.capillary, f.capillary_offset));
  fluid.insert("porosity", field_table(f.porosity, dim));
  fluid.insert("permeability", field_table(f.permeability, dim));
  root.insert("fluid", fluid);

  const auto& s = cfg.solver;
  root.insert("time", toml::table{{"dt", s.dt},
                                  {"final_time", s.final_time},
                                  {"save_every", static_cast<int64_t>(s.save_every)}});
  root.insert("solver", toml::table{{"newton_tol", s.newton_tol},
                                    {"newton_max_iter", static_cast<int64_t>(s.newton_max_iter)},
                                    {"damping", s.damping},
                                    {"max_halvings", static_cast<int64_t>(s.max_halvings)},
                                    {"dt_min", s.dt_min},
                                    {"dt_growth", s.dt_growth},
                                    {"easy_iterations", static_cast<int64_t>(s.easy_iterations)},
                                    {"krylov_tol", s.krylov_tol},
                                    {"krylov_max_iter", static_cast<int64_t>(s.krylov_max_iter)},
                                    {"linear_solver", std::string(to_string(s.linear_solver))},
                                    {"jacobian", std::string(to_string(s.jacobian))}});
  root.insert("sources", toml::table{{"production", field_table(cfg.sources.production, dim)},
                                     {"injection", field_table(cfg.sources.injection, dim)}});
  root.insert("gravity", toml::table{{"vector", to_array(cfg.gravity, dim)}});
  root.insert("boundary", toml::table{{"pressure", cfg.boundary.pressure}, {"saturation", cfg.boundary.saturation}});
  root.insert("initial", toml::table{{"pressure", field_table(cfg.initial.pressure, dim)},
                                     {"saturation", field_table(cfg.initial.saturation, dim)}});
  root.insert("output", toml::table{{"directory", cfg.output.directory},
                                    {"fields", cfg.output.fields},
                                    {"vtk", cfg.output.vtk}});

  std::ostringstream out;
  out << toml::toml_formatter(root, toml::toml_formatter::default_flags & ~toml::format_flags::indentation);
  out << '\n';
  return out.str();
}

}  // namespace fvgw
