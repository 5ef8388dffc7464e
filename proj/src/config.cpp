#include "qins/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

namespace qins {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "domain.mode", "domain.l1", "domain.l2", "grid.n1", "grid.n2",
      "params.alpha", "params.beta", "params.epsilon", "params.eps0",
      "closures.nu1", "closures.nu2", "closures.eta1", "closures.eta2", "potential",
      "time.dt", "time.total",
      "picard.window", "picard.tol", "picard.max_iter", "picard.mode", "picard.theta",
      "picard.guess",
      "init.kind", "init.amplitude", "init.file",
      "output.dir", "output.stride", "seed",
      "spectrum.a0", "spectrum.a0_sweep", "spectrum.modes",
      "contraction.windows",
      "lincheck.c0", "lincheck.a0", "lincheck.amplitude", "lincheck.samples",
      "check.mass_drift", "check.lt2"};
  return keys;
}

class Reader {
 public:
  explicit Reader(std::map<std::string, std::string> kv) : kv_(std::move(kv)) {}

  bool has(const std::string& key) const { return kv_.count(key) != 0; }

  double real(const std::string& key, double def) const {
    if (!has(key)) return def;
    return parse_real(key, kv_.at(key));
  }

  int integer(const std::string& key, int def) const {
    if (!has(key)) return def;
    const std::string& s = kv_.at(key);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
      throw ConfigError("invalid integer for key '" + key + "': " + s);
    return v;
  }

  std::string text(const std::string& key, const std::string& def) const {
    return has(key) ? kv_.at(key) : def;
  }

  std::vector<double> list(const std::string& key, const std::vector<double>& def) const {
    if (!has(key)) return def;
    std::vector<double> out;
    std::stringstream ss(kv_.at(key));
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_real(key, trim(item)));
    if (out.empty()) throw ConfigError("empty list for key '" + key + "'");
    return out;
  }

 private:
  static double parse_real(const std::string& key, const std::string& s) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(s, &pos);
      if (pos != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("invalid number for key '" + key + "': " + s);
    }
  }

  std::map<std::string, std::string> kv_;
};

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError("invalid value for key '" + key + "': " + what);
}

}  // namespace

std::map<std::string, std::string> parse_key_values(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (!known_keys().count(key)) throw ConfigError("unknown key '" + key + "'");
    if (kv.count(key)) throw ConfigError("duplicate key '" + key + "'");
    kv[key] = value;
  }
  return kv;
}

RunConfig parse_config(std::istream& in) {
  const Reader r(parse_key_values(in));
  RunConfig c;

  const std::string mode = r.text("domain.mode", "torus");
  require(mode == "torus" || mode == "rect", "domain.mode", "expected torus or rect");
  c.mode = mode == "torus" ? Mode::Torus : Mode::NeumannRect;
  const double def_l = c.mode == Mode::Torus ? 2.0 * std::numbers::pi : std::numbers::pi;
  c.l1 = r.real("domain.l1", def_l);
  c.l2 = r.real("domain.l2", def_l);
  require(c.l1 > 0.0, "domain.l1", "must be positive");
  require(c.l2 > 0.0, "domain.l2", "must be positive");
  c.n1 = r.integer("grid.n1", c.n1);
  c.n2 = r.integer("grid.n2", c.n2);
  require(c.n1 >= 4 && c.n1 % 2 == 0, "grid.n1", "must be even and >= 4");
  require(c.n2 >= 4 && c.n2 % 2 == 0, "grid.n2", "must be even and >= 4");

  PhysParams& p = c.params;
  p.alpha = r.real("params.alpha", p.alpha);
  p.beta = r.real("params.beta", p.beta);
  p.epsilon = r.real("params.epsilon", p.epsilon);
  p.eps0 = r.real("params.eps0", p.eps0);
  p.closures.nu1 = r.real("closures.nu1", p.closures.nu1);
  p.closures.nu2 = r.real("closures.nu2", p.closures.nu2);
  p.closures.eta1 = r.real("closures.eta1", p.closures.eta1);
  p.closures.eta2 = r.real("closures.eta2", p.closures.eta2);
  require(r.text("potential", "double_well") == "double_well", "potential",
          "only double_well is available");
  try {
    p.validate_linear();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  c.dt = r.real("time.dt", c.dt);
  c.total = r.real("time.total", c.total);
  require(c.dt > 0.0, "time.dt", "must be positive");
  require(c.total > 0.0, "time.total", "must be positive");

  PicardConfig& pc = c.picard;
  pc.dt = c.dt;
  pc.window_T = r.real("picard.window", pc.window_T);
  pc.tol = r.real("picard.tol", pc.tol);
  pc.max_iter = r.integer("picard.max_iter", pc.max_iter);
  pc.theta = r.real("picard.theta", pc.theta);
  const std::string pm = r.text("picard.mode", "frozen");
  require(pm == "frozen" || pm == "updated", "picard.mode", "expected frozen or updated");
  pc.coefficient_mode =
      pm == "frozen" ? CoefficientMode::FrozenAtWindowStart : CoefficientMode::UpdatedEachIteration;
  const std::string guess = r.text("picard.guess", "lift");
  require(guess == "lift" || guess == "lift_then_map", "picard.guess",
          "expected lift or lift_then_map");
  pc.guess = guess == "lift" ? InitialGuess::Lift : InitialGuess::LiftThenMap;
  require(pc.window_T >= c.dt, "picard.window", "must be >= time.dt");
  require(pc.tol > 0.0, "picard.tol", "must be positive");
  require(pc.max_iter >= 1, "picard.max_iter", "must be >= 1");
  require(pc.theta >= 0.5 && pc.theta <= 1.0, "picard.theta", "must lie in [0.5, 1]");

  c.init_kind = r.text("init.kind", c.init_kind);
  require(c.init_kind == "equilibrium" || c.init_kind == "cosine" || c.init_kind == "random" ||
              c.init_kind == "file",
          "init.kind", "expected equilibrium, cosine, random or file");
  c.init_amplitude = r.real("init.amplitude", c.init_amplitude);
  c.init_file = r.text("init.file", "");
  require(c.init_kind != "file" || !c.init_file.empty(), "init.file", "required for init.kind = file");
  c.output_dir = r.text("output.dir", c.output_dir);
  c.output_stride = r.integer("output.stride", c.output_stride);
  require(c.output_stride >= 1, "output.stride", "must be >= 1");
  c.seed = static_cast<std::uint64_t>(r.integer("seed", static_cast<int>(c.seed)));

  c.spectrum_a0 = r.real("spectrum.a0", c.spectrum_a0);
  c.spectrum_a0_sweep = r.list("spectrum.a0_sweep", c.spectrum_a0_sweep);
  c.spectrum_modes = r.integer("spectrum.modes", c.spectrum_modes);
  require(c.spectrum_a0 > 0.0, "spectrum.a0", "must be positive");
  require(c.spectrum_modes >= 1, "spectrum.modes", "must be >= 1");
  for (double a : c.spectrum_a0_sweep) require(a > 0.0, "spectrum.a0_sweep", "entries must be positive");

  c.contraction_windows = r.list("contraction.windows", c.contraction_windows);
  for (double t : c.contraction_windows)
    require(t >= 2.0 * c.dt, "contraction.windows", "entries must cover at least two steps");

  c.lincheck_c0 = r.text("lincheck.c0", c.lincheck_c0);
  require(c.lincheck_c0 == "constant" || c.lincheck_c0 == "random", "lincheck.c0",
          "expected constant or random");
  c.lincheck_a0 = r.real("lincheck.a0", c.lincheck_a0);
  c.lincheck_amplitude = r.real("lincheck.amplitude", c.lincheck_amplitude);
  c.lincheck_samples = r.integer("lincheck.samples", c.lincheck_samples);
  require(c.lincheck_samples >= 1, "lincheck.samples", "must be >= 1");

  c.check_mass_drift = r.real("check.mass_drift", c.check_mass_drift);
  c.check_lt2 = r.real("check.lt2", c.check_lt2);
  return c;
}

RunConfig parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return parse_config(in);
}

Grid RunConfig::grid() const { return Grid(mode, l1, l2, n1, n2); }

MaterialState RunConfig::initial_state() const {
  if (init_kind == "file") {
    Snapshot s = read_snapshot(init_file);
    if (s.grid.mode() != mode || s.grid.points(0) != n1 || s.grid.points(1) != n2)
      throw ConfigError("init.file: snapshot grid does not match grid.n1/grid.n2/domain.mode");
    return MaterialState{std::move(s.v), std::move(s.c)};
  }
  const Grid g = grid();
  VectorField v(g);
  if (init_kind == "equilibrium") return MaterialState{v, ScalarField::constant(g, init_amplitude)};
  if (init_kind == "cosine") {
    const double k = (mode == Mode::Torus ? 2.0 : 1.0) * std::numbers::pi / l1;
    return MaterialState{
        v, ScalarField::from_function(g, [&](double x, double) { return init_amplitude * std::cos(k * x); })};
  }
  std::mt19937_64 rng(seed);
  ScalarField c = random_smooth(g, kScalarSym, rng, 3, 0.5);
  c *= init_amplitude / std::max(max_abs(c), 1e-300);
  return MaterialState{v, std::move(c)};
}

}  // namespace qins
