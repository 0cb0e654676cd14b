#include "cavsol/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "cavsol/errors.hpp"

namespace cavsol::cli {

using nlohmann::json;

namespace {

json complex_list(const std::vector<Complex>& values) {
  json out = json::array();
  for (const auto& z : values) out.push_back(json::array({z.real(), z.imag()}));
  return out;
}

template <class T>
json optional_value(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

// Recursively overlays src on dst; every key in src must already exist in dst.
void overlay(json& dst, const json& src, const std::string& path) {
  if (!src.is_object()) throw ConfigError(fmt::format("'{}' must be an object", path));
  for (const auto& [key, value] : src.items()) {
    const std::string where = path.empty() ? key : path + "." + key;
    if (!dst.contains(key)) throw ConfigError(fmt::format("unknown key '{}'", where));
    json& slot = dst[key];
    if (slot.is_object()) {
      overlay(slot, value, where);
    } else {
      slot = value;
    }
  }
}

template <class T>
T get(const json& doc, const char* section, const char* key) {
  try {
    return doc.at(section).at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(fmt::format("'{}.{}' has the wrong type", section, key));
  }
}

template <class T>
std::optional<T> get_optional(const json& doc, const char* section, const char* key) {
  if (doc.at(section).at(key).is_null()) return std::nullopt;
  return get<T>(doc, section, key);
}

Complex to_complex(const json& v, const std::string& where) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  throw ConfigError(fmt::format("'{}' entries must be numbers or [re, im] pairs", where));
}

std::vector<Complex> get_complex_list(const json& doc, const char* section, const char* key) {
  const auto& v = doc.at(section).at(key);
  const std::string where = fmt::format("{}.{}", section, key);
  if (!v.is_array()) throw ConfigError(fmt::format("'{}' must be an array", where));
  std::vector<Complex> out;
  for (const auto& e : v) out.push_back(to_complex(e, where));
  return out;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

}  // namespace

json default_document() {
  const ExperimentConfig d;
  json doc;
  doc["model"] = {{"sites", 256},
                  {"atoms", 10},
                  {"hopping", 1.0},
                  {"coupling", 10.0},
                  {"spacing", 1.0},
                  {"hp_order", 1},
                  {"boundary", "periodic"}};
  doc["integrator"] = {{"method", "rk4_fixed"},
                       {"dt", 0.0},
                       {"step_fraction", d.step_fraction},
                       {"tol", d.integrator.tol},
                       {"t_end", 300.0},
                       {"hp_guard", d.integrator.hp_guard},
                       {"conservation_alarm", d.integrator.conservation_alarm}};
  json branches = json::array();
  for (auto b : d.dispersion.branches) branches.push_back(std::string(to_string(b)));
  doc["dispersion"] = {{"k_grid", d.dispersion.k_grid},
                       {"branches", branches},
                       {"measure", d.dispersion.measure},
                       {"amplitude", d.dispersion.amplitude},
                       {"record_time", d.dispersion.record_time},
                       {"probe_site", d.dispersion.probe_site}};
  doc["soliton"] = {{"k", d.soliton.k},
                    {"width", d.soliton.width},
                    {"amplitude_scale", d.soliton.amplitude_scale},
                    {"center", optional_value(d.soliton.center)},
                    {"linear_contrast", d.soliton.linear_contrast},
                    {"noise", d.soliton.noise},
                    {"sample_interval", d.soliton.sample_interval}};
  doc["collide"] = {{"k", d.collide.k},
                    {"width", d.collide.width},
                    {"centers", d.collide.centers},
                    {"pre_time", d.collide.pre_time},
                    {"co_moving", d.collide.co_moving},
                    {"sample_interval", d.collide.sample_interval}};
  doc["transition"] = {{"k", d.transition.k},
                       {"width", d.transition.width},
                       {"atoms_sweep", d.transition.atoms_sweep},
                       {"reference_atoms", optional_value(d.transition.reference_atoms)},
                       {"score", d.transition.score},
                       {"linear_control", d.transition.linear_control},
                       {"center", optional_value(d.transition.center)},
                       {"amplitude", optional_value(d.transition.amplitude)}};
  doc["oracle"] = {{"photon_cutoff", d.oracle.photon_cutoff},
                   {"alpha0", complex_list(d.oracle.alpha0)},
                   {"beta0", complex_list(d.oracle.beta0)},
                   {"window", d.oracle.window},
                   {"samples", d.oracle.samples},
                   {"bound_fraction", d.oracle.bound_fraction}};
  doc["run"] = {{"seed", d.run.seed}, {"workers", d.run.workers}};
  return doc;
}

void apply_override(json& doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  require(eq != std::string_view::npos && eq > 0,
          fmt::format("override '{}' is not of the form key=value", assignment));
  const std::string path(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
    require(!key.empty(), fmt::format("override key '{}' is malformed", path));
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    json& next = (*node)[key];
    if (next.is_null()) next = json::object();
    require(next.is_object(), fmt::format("override '{}' descends into a value", path));
    node = &next;
    start = dot + 1;
  }
}

ExperimentConfig parse_config(const json& doc) {
  json merged = default_document();
  overlay(merged, doc, "");

  ExperimentConfig c;
  auto& m = c.model;
  m.sites = get<int>(merged, "model", "sites");
  m.atoms = get<int>(merged, "model", "atoms");
  m.hopping = get<double>(merged, "model", "hopping");
  m.coupling = get<double>(merged, "model", "coupling");
  m.spacing = get<double>(merged, "model", "spacing");
  m.hp_order = get<int>(merged, "model", "hp_order");

  auto& in = c.integrator;
  in.dt = get<double>(merged, "integrator", "dt");
  in.tol = get<double>(merged, "integrator", "tol");
  in.t_end = get<double>(merged, "integrator", "t_end");
  in.hp_guard = get<double>(merged, "integrator", "hp_guard");
  in.conservation_alarm = get<double>(merged, "integrator", "conservation_alarm");
  c.step_fraction = get<double>(merged, "integrator", "step_fraction");

  auto& ds = c.dispersion;
  ds.k_grid = get<std::vector<double>>(merged, "dispersion", "k_grid");
  ds.measure = get<bool>(merged, "dispersion", "measure");
  ds.amplitude = get<double>(merged, "dispersion", "amplitude");
  ds.record_time = get<double>(merged, "dispersion", "record_time");
  ds.probe_site = get<int>(merged, "dispersion", "probe_site");

  auto& so = c.soliton;
  so.k = get<double>(merged, "soliton", "k");
  so.width = get<double>(merged, "soliton", "width");
  so.amplitude_scale = get<double>(merged, "soliton", "amplitude_scale");
  so.center = get_optional<double>(merged, "soliton", "center");
  so.linear_contrast = get<bool>(merged, "soliton", "linear_contrast");
  so.noise = get<double>(merged, "soliton", "noise");
  so.sample_interval = get<double>(merged, "soliton", "sample_interval");

  auto& co = c.collide;
  co.k = get<double>(merged, "collide", "k");
  co.width = get<double>(merged, "collide", "width");
  co.centers = get<std::vector<double>>(merged, "collide", "centers");
  co.pre_time = get<double>(merged, "collide", "pre_time");
  co.co_moving = get<bool>(merged, "collide", "co_moving");
  co.sample_interval = get<double>(merged, "collide", "sample_interval");

  auto& tr = c.transition;
  tr.k = get<double>(merged, "transition", "k");
  tr.width = get<double>(merged, "transition", "width");
  tr.atoms_sweep = get<std::vector<int>>(merged, "transition", "atoms_sweep");
  tr.reference_atoms = get_optional<int>(merged, "transition", "reference_atoms");
  tr.score = get<std::string>(merged, "transition", "score");
  tr.linear_control = get<bool>(merged, "transition", "linear_control");
  tr.center = get_optional<double>(merged, "transition", "center");
  tr.amplitude = get_optional<double>(merged, "transition", "amplitude");

  auto& orc = c.oracle;
  orc.photon_cutoff = get<int>(merged, "oracle", "photon_cutoff");
  orc.alpha0 = get_complex_list(merged, "oracle", "alpha0");
  orc.beta0 = get_complex_list(merged, "oracle", "beta0");
  orc.window = get<double>(merged, "oracle", "window");
  orc.samples = get<int>(merged, "oracle", "samples");
  orc.bound_fraction = get<double>(merged, "oracle", "bound_fraction");

  c.run.seed = get<std::uint64_t>(merged, "run", "seed");
  c.run.workers = get<int>(merged, "run", "workers");

  try {
    m.boundary = parse_boundary(get<std::string>(merged, "model", "boundary"));
    in.method = parse_method(get<std::string>(merged, "integrator", "method"));
    ds.branches.clear();
    for (const auto& b : get<std::vector<std::string>>(merged, "dispersion", "branches"))
      ds.branches.push_back(parse_branch(b));
    m.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }

  require(in.dt >= 0.0 && std::isfinite(in.dt), "integrator.dt must be >= 0 (0 selects automatically)");
  require(c.step_fraction > 0.0 && c.step_fraction <= 0.05,
          "integrator.step_fraction must lie in (0, 0.05]");
  require(in.tol > 0.0, "integrator.tol must be > 0");
  require(in.hp_guard > 0.0 && in.hp_guard <= 2.0, "integrator.hp_guard must lie in (0, 2]");
  require(in.conservation_alarm > 0.0, "integrator.conservation_alarm must be > 0");
  require(std::isfinite(in.t_end) && in.t_end > 0.0, "integrator.t_end must be > 0");

  require(!ds.k_grid.empty(), "dispersion.k_grid must not be empty");
  require(!ds.branches.empty(), "dispersion.branches must not be empty");
  require(ds.amplitude > 0.0, "dispersion.amplitude must be > 0");
  require(ds.record_time > 0.0, "dispersion.record_time must be > 0");
  require(ds.probe_site >= 0 && ds.probe_site < m.sites,
          "dispersion.probe_site must index a lattice site");

  require(so.width > 0.0, "soliton.width must be > 0");
  require(so.amplitude_scale >= 0.0, "soliton.amplitude_scale must be >= 0");
  require(so.noise >= 0.0, "soliton.noise must be >= 0");
  require(so.sample_interval > 0.0, "soliton.sample_interval must be > 0");

  require(co.width > 0.0, "collide.width must be > 0");
  require(co.centers.size() == 2, "collide.centers must hold two positions");
  require(co.pre_time >= 0.0 && co.pre_time < in.t_end,
          "collide.pre_time must lie in [0, integrator.t_end)");
  require(co.sample_interval > 0.0, "collide.sample_interval must be > 0");

  require(tr.width > 0.0, "transition.width must be > 0");
  require(tr.atoms_sweep.size() >= 2, "transition.atoms_sweep needs at least two points");
  for (int n : tr.atoms_sweep) require(n >= 1, "transition.atoms_sweep entries must be >= 1");
  require(tr.score == "participation" || tr.score == "rms" || tr.score == "fit",
          "transition.score must be participation, rms or fit");
  require(!tr.reference_atoms || *tr.reference_atoms >= 1,
          "transition.reference_atoms must be >= 1");
  require(!tr.amplitude || *tr.amplitude > 0.0, "transition.amplitude must be > 0");

  require(orc.photon_cutoff >= 1, "oracle.photon_cutoff must be >= 1");
  require(orc.window > 0.0, "oracle.window must be > 0");
  require(orc.samples >= 2, "oracle.samples must be >= 2");
  require(orc.bound_fraction > 0.0, "oracle.bound_fraction must be > 0");

  require(c.run.workers >= 1, "run.workers must be >= 1");

  c.resolved = std::move(merged);
  c.hash = fnv1a_hex(c.resolved.dump());
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path,
                             const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path.string()));
  json doc = json::parse(in, nullptr, false, true);
  if (doc.is_discarded()) throw ConfigError(fmt::format("'{}' is not valid JSON", path.string()));
  for (const auto& o : overrides) apply_override(doc, o);
  return parse_config(doc);
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

IntegratorConfig run_integrator(const ExperimentConfig& cfg, const LatticeModel& model,
                                double t_end, double sample_interval) {
  IntegratorConfig in = cfg.integrator;
  double dt = in.dt;
  if (!(dt > 0.0)) {
    // RK4 damps a mode of frequency w by about (w dt)^6 / 144 per step, so
    // the drift over the run is near T w f^5 / 144 with f = w dt. Keep it
    // below a tenth of the alarm threshold.
    const double w = model.max_frequency(in.hp_guard);
    const double span = std::abs(t_end);
    double fraction = cfg.step_fraction;
    if (w > 0.0 && span > 0.0 && std::isfinite(in.conservation_alarm))
      fraction = std::min(fraction,
                          std::pow(144.0 * 0.1 * in.conservation_alarm / (span * w), 0.2));
    dt = stable_step(model, in.hp_guard, fraction);
  }
  const double steps = std::ceil(sample_interval / dt - 1e-9);
  in.dt = sample_interval / steps;
  in.sample_stride = static_cast<int>(steps);
  in.t_end = t_end;
  return in;
}

}  // namespace cavsol::cli
