#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include <fmt/format.h>

#include "nvnmr/core/error.hpp"
#include "nvnmr/core/units.hpp"
#include "nvnmr/io/files.hpp"

namespace nvnmr::cli {

using nlohmann::json;

namespace {

// Reads one JSON object, remembering which keys were consumed so the rest can
// be rejected as unknown.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("", "expected an object");
  }

  void number(const char* key, double& out) {
    if (const json* v = take(key)) {
      if (!v->is_number()) fail(key, "expected a number");
      out = v->get<double>();
      if (!std::isfinite(out)) fail(key, "must be finite");
    }
  }

  void number(const char* key, std::optional<double>& out) {
    if (const json* v = take(key)) {
      if (v->is_null()) {
        out.reset();
        return;
      }
      if (!v->is_number()) fail(key, "expected a number or null");
      out = v->get<double>();
    }
  }

  template <class Int>
  void integer(const char* key, Int& out) {
    if (const json* v = take(key)) {
      if (!v->is_number_integer()) fail(key, "expected an integer");
      if (v->is_number_unsigned()) {
        out = static_cast<Int>(v->get<std::uint64_t>());
      } else {
        const auto x = v->get<std::int64_t>();
        if (x < 0 && std::is_unsigned_v<Int>) fail(key, "must be >= 0");
        out = static_cast<Int>(x);
      }
    }
  }

  void string(const char* key, std::string& out) {
    if (const json* v = take(key)) {
      if (!v->is_string()) fail(key, "expected a string");
      out = v->get<std::string>();
    }
  }

  void boolean(const char* key, bool& out) {
    if (const json* v = take(key)) {
      if (!v->is_boolean()) fail(key, "expected true or false");
      out = v->get<bool>();
    }
  }

  void strings(const char* key, std::vector<std::string>& out) {
    if (const json* v = take(key)) {
      if (!v->is_array()) fail(key, "expected an array of strings");
      out.clear();
      for (const auto& e : *v) {
        if (!e.is_string()) fail(key, "expected an array of strings");
        out.push_back(e.get<std::string>());
      }
    }
  }

  void numbers(const char* key, std::vector<double>& out) {
    if (const json* v = take(key)) {
      if (!v->is_array()) fail(key, "expected an array of numbers");
      out.clear();
      for (const auto& e : *v) {
        if (!e.is_number()) fail(key, "expected an array of numbers");
        out.push_back(e.get<double>());
      }
    }
  }

  /// Sub-object reader, or nullopt when the key is absent.
  std::optional<Reader> section(const char* key) {
    if (const json* v = take(key)) return Reader(*v, child(key));
    return std::nullopt;
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) fail(k, "unknown key");
    }
  }

  [[noreturn]] void fail(std::string_view key, std::string_view what) const {
    const std::string where = key.empty() ? path_ : child(key);
    throw ConfigError(fmt::format("config: {}: {}", where.empty() ? "<root>" : where, what));
  }

 private:
  const json* take(const char* key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string child(std::string_view key) const {
    return path_.empty() ? std::string(key) : fmt::format("{}.{}", path_, key);
  }

  const json& j_;
  std::string path_;
  std::set<std::string, std::less<>> seen_;
};

template <class Fn>
auto as_config_error(std::string_view field, Fn&& fn) {
  try {
    return fn();
  } catch (const InvalidArgument& e) {
    throw ConfigError(fmt::format("config: {}: {}", field, e.what()));
  }
}

void require(bool ok, std::string_view field, std::string_view what) {
  if (!ok) throw ConfigError(fmt::format("config: {}: {}", field, what));
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

RunConfig config_from_json(const json& j) {
  RunConfig c;
  Reader root(j, "");
  root.integer("schema_version", c.schema_version);
  require(j.contains("schema_version"), "schema_version", "missing (expected 1)");
  require(c.schema_version == kSchemaVersion, "schema_version",
          fmt::format("unsupported version {} (expected {})", c.schema_version, kSchemaVersion));
  root.integer("seed", c.seed);
  root.integer("jobs", c.jobs);
  require(c.jobs >= 1, "jobs", "must be >= 1");

  if (auto s = root.section("sample")) {
    s->number("rho_per_nm3", c.sample.rho_per_nm3);
    s->number("rho_sigma_per_nm3", c.sample.rho_sigma_per_nm3);
    s->number("gamma_n_rad_per_s_per_t", c.sample.gamma_n);
    s->number("t2n_us", c.sample.t2n_us);
    if (auto g = s->section("geometry")) {
      g->string("type", c.sample.geometry);
      g->number("z1_nm", c.sample.z1_nm);
      g->number("z2_nm", c.sample.z2_nm);
      g->finish();
    }
    s->finish();
  }
  if (auto s = root.section("nv")) {
    s->number("depth_nm", c.nv.depth_nm);
    s->number("alpha_deg", c.nv.alpha_deg);
    s->finish();
  }
  if (auto s = root.section("sequence")) {
    s->string("family", c.sequence.family);
    s->integer("n_pulses", c.sequence.n_pulses);
    s->number("b0_gauss", c.sequence.b0_gauss);
    s->string("validation", c.sequence.validation);
    if (auto t = s->section("tau_ns")) {
      t->number("start", c.sequence.tau.start_ns);
      t->number("stop", c.sequence.tau.stop_ns);
      t->integer("points", c.sequence.tau.points);
      t->numbers("list", c.sequence.tau.list_ns);
      t->finish();
    }
    s->finish();
  }
  if (auto s = root.section("simulate")) {
    s->number("noise", c.simulate.noise);
    s->boolean("include_off_resonant", c.simulate.include_off_resonant);
    s->string("id", c.simulate.id);
    s->string("sample_id", c.simulate.sample_id);
    s->string("nv_id", c.simulate.nv_id);
    s->string("output", c.simulate.output);
    if (auto r = s->section("raw")) {
      r->boolean("enabled", c.simulate.raw.enabled);
      r->number("counts", c.simulate.raw.counts);
      r->number("amplitude", c.simulate.raw.amplitude);
      r->number("background_t2_us", c.simulate.raw.background_t2_us);
      r->number("background_p", c.simulate.raw.background_p);
      r->finish();
    }
    s->finish();
  }
  if (auto s = root.section("fit")) {
    s->strings("inputs", c.fit.inputs);
    s->string("t2n_mode", c.fit.t2n_mode);
    s->string("omega", c.fit.omega);
    s->number("omega_window", c.fit.omega_window);
    s->boolean("joint", c.fit.joint);
    s->number("depth_min_nm", c.fit.depth_min_nm);
    s->number("depth_max_nm", c.fit.depth_max_nm);
    s->integer("depth_grid", c.fit.depth_grid);
    s->number("dip_guess_ns", c.fit.dip_guess_ns);
    s->number("window_half_width_ns", c.fit.window_half_width_ns);
    s->string("output_dir", c.fit.output_dir);
    s->finish();
  }
  if (auto s = root.section("normalize")) {
    s->strings("inputs", c.normalize.inputs);
    s->number("dip_guess_ns", c.normalize.dip_guess_ns);
    s->number("window_half_width_ns", c.normalize.window_half_width_ns);
    s->string("output_dir", c.normalize.output_dir);
    s->finish();
  }
  if (auto s = root.section("oracle")) {
    s->number("depth_nm", c.oracle.depth_nm);
    s->number("r_max_nm", c.oracle.r_max_nm);
    s->integer("pseudospin_cases", c.oracle.pseudospin_cases);
    s->number("pseudospin_spins", c.oracle.pseudospin_spins);
    s->number("tolerance", c.oracle.tolerance);
    s->string("output", c.oracle.output);
    s->finish();
  }
  if (auto s = root.section("linewidth")) {
    s->number("depth_min_nm", c.linewidth.depth_min_nm);
    s->number("depth_max_nm", c.linewidth.depth_max_nm);
    s->integer("points", c.linewidth.points);
    s->string("convention", c.linewidth.convention);
    s->number("diffusion_m2_per_s", c.linewidth.diffusion_m2_per_s);
    s->number("kinematic_viscosity_cst", c.linewidth.kinematic_viscosity_cst);
    s->number("mass_density_kg_per_m3", c.linewidth.mass_density_kg_per_m3);
    s->number("dynamic_viscosity_pa_s", c.linewidth.dynamic_viscosity_pa_s);
    s->number("hydrodynamic_radius_nm", c.linewidth.hydrodynamic_radius_nm);
    s->number("temperature_k", c.linewidth.temperature_k);
    s->string("output", c.linewidth.output);
    s->finish();
  }
  if (auto s = root.section("stats")) {
    s->strings("inputs", c.stats.inputs);
    s->number("bin_width_nm", c.stats.bin_width_nm);
    s->string("output", c.stats.output);
    s->finish();
  }
  root.finish();

  // Enumerations and ranges are checked here so errors name the field.
  require(c.sample.geometry == "semi_infinite" || c.sample.geometry == "slab", "sample.geometry.type",
          "expected semi_infinite or slab");
  as_config_error("fit.t2n_mode", [&] { return pipeline::parse_t2n_mode(c.fit.t2n_mode); });
  require(c.fit.omega == "free" || c.fit.omega == "fixed", "fit.omega", "expected free or fixed");
  require(c.fit.omega_window > 0.0 && c.fit.omega_window < 1.0, "fit.omega_window", "must be in (0, 1)");
  require(c.fit.depth_grid >= 2, "fit.depth_grid", "must be >= 2");
  require(c.sequence.validation == "strict" || c.sequence.validation == "warn", "sequence.validation",
          "expected strict or warn");
  as_config_error("linewidth.convention", [&] { return linewidth::parse_convention(c.linewidth.convention); });
  require(c.linewidth.points >= 2, "linewidth.points", "must be >= 2");
  require(c.simulate.noise >= 0.0, "simulate.noise", "must be >= 0");
  require(c.oracle.pseudospin_cases >= 0, "oracle.pseudospin_cases", "must be >= 0");
  require(c.oracle.tolerance > 0.0, "oracle.tolerance", "must be > 0");

  // Build every domain object once so invariant violations surface as
  // config errors before any work starts.
  c.nuclear_sample();
  c.nv_center();
  c.pulse_sequence();
  c.field();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  const std::string text = io::read_file(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("config: {}: {}", path.string(), e.what()));
  }
  return config_from_json(j);
}

NuclearSample RunConfig::nuclear_sample() const {
  return as_config_error("sample", [&] {
    NuclearSample::Params p;
    p.rho = units::per_nm3_to_per_m3(sample.rho_per_nm3);
    p.gamma_n = sample.gamma_n;
    p.t2n_star = sample.t2n_us ? DephasingTime::finite(units::us_to_s(*sample.t2n_us)) : DephasingTime::infinite();
    if (sample.geometry == "slab") {
      p.geometry = Slab{units::nm_to_m(sample.z1_nm), units::nm_to_m(sample.z2_nm)};
    }
    return NuclearSample(p);
  });
}

double RunConfig::alpha_rad() const {
  return nv.alpha_deg ? units::deg_to_rad(*nv.alpha_deg) : kAlpha100;
}

NvCenter RunConfig::nv_center() const {
  return as_config_error("nv", [&] { return NvCenter(units::nm_to_m(nv.depth_nm), alpha_rad()); });
}

std::vector<double> RunConfig::tau_grid() const {
  std::vector<double> out;
  if (!sequence.tau.list_ns.empty()) {
    for (double t : sequence.tau.list_ns) out.push_back(units::ns_to_s(t));
    return out;
  }
  const auto& g = sequence.tau;
  require(g.points >= 2, "sequence.tau_ns.points", "must be >= 2");
  for (int i = 0; i < g.points; ++i) {
    const double t = g.start_ns + (g.stop_ns - g.start_ns) * static_cast<double>(i) / (g.points - 1);
    out.push_back(units::ns_to_s(t));
  }
  return out;
}

PulseSequence RunConfig::pulse_sequence() const {
  return as_config_error("sequence", [&] {
    return PulseSequence(parse_pulse_family(sequence.family), sequence.n_pulses, tau_grid(),
                         sequence.validation == "strict" ? Validation::Strict : Validation::WarnAndAccept);
  });
}

StaticField RunConfig::field() const {
  return as_config_error("sequence.b0_gauss", [&] { return StaticField::from_gauss(sequence.b0_gauss); });
}

pipeline::FitConfig RunConfig::fit_config() const {
  pipeline::FitConfig f;
  f.rho = units::per_nm3_to_per_m3(sample.rho_per_nm3);
  if (sample.rho_sigma_per_nm3) f.rho_sigma = units::per_nm3_to_per_m3(*sample.rho_sigma_per_nm3);
  f.gamma_n = sample.gamma_n;
  f.alpha = alpha_rad();
  f.geometry = nuclear_sample().geometry();
  f.t2n_mode = pipeline::parse_t2n_mode(fit.t2n_mode);
  f.omega_free = fit.omega == "free";
  f.omega_window = fit.omega_window;
  f.depth_min = units::nm_to_m(fit.depth_min_nm);
  f.depth_max = units::nm_to_m(fit.depth_max_nm);
  f.depth_grid = fit.depth_grid;
  return f;
}

linewidth::DiffusionSample RunConfig::diffusion_sample() const {
  linewidth::DiffusionSample s;
  s.temperature = linewidth.temperature_k;
  if (linewidth.diffusion_m2_per_s) {
    s.diffusion_coefficient = linewidth.diffusion_m2_per_s;
    return s;
  }
  if (linewidth.kinematic_viscosity_cst) {
    s.kinematic_viscosity = units::cst_to_m2_per_s(*linewidth.kinematic_viscosity_cst);
  }
  s.mass_density = linewidth.mass_density_kg_per_m3;
  s.dynamic_viscosity = linewidth.dynamic_viscosity_pa_s;
  s.hydrodynamic_radius = units::nm_to_m(linewidth.hydrodynamic_radius_nm);
  return s;
}

json config_to_json(const RunConfig& c) {
  json j;
  j["schema_version"] = c.schema_version;
  j["seed"] = c.seed;
  j["jobs"] = c.jobs;
  j["sample"] = {{"rho_per_nm3", c.sample.rho_per_nm3},
                 {"rho_sigma_per_nm3", optional_json(c.sample.rho_sigma_per_nm3)},
                 {"gamma_n_rad_per_s_per_t", c.sample.gamma_n},
                 {"t2n_us", optional_json(c.sample.t2n_us)},
                 {"geometry", {{"type", c.sample.geometry}, {"z1_nm", c.sample.z1_nm}, {"z2_nm", c.sample.z2_nm}}}};
  j["nv"] = {{"depth_nm", c.nv.depth_nm}, {"alpha_deg", optional_json(c.nv.alpha_deg)}};
  j["sequence"] = {{"family", c.sequence.family},
                   {"n_pulses", c.sequence.n_pulses},
                   {"b0_gauss", c.sequence.b0_gauss},
                   {"validation", c.sequence.validation},
                   {"tau_ns",
                    {{"start", c.sequence.tau.start_ns},
                     {"stop", c.sequence.tau.stop_ns},
                     {"points", c.sequence.tau.points},
                     {"list", c.sequence.tau.list_ns}}}};
  j["simulate"] = {{"noise", c.simulate.noise},
                   {"include_off_resonant", c.simulate.include_off_resonant},
                   {"id", c.simulate.id},
                   {"sample_id", c.simulate.sample_id},
                   {"nv_id", c.simulate.nv_id},
                   {"output", c.simulate.output},
                   {"raw",
                    {{"enabled", c.simulate.raw.enabled},
                     {"counts", c.simulate.raw.counts},
                     {"amplitude", c.simulate.raw.amplitude},
                     {"background_t2_us", c.simulate.raw.background_t2_us},
                     {"background_p", c.simulate.raw.background_p}}}};
  j["fit"] = {{"inputs", c.fit.inputs},
              {"t2n_mode", c.fit.t2n_mode},
              {"omega", c.fit.omega},
              {"omega_window", c.fit.omega_window},
              {"joint", c.fit.joint},
              {"depth_min_nm", c.fit.depth_min_nm},
              {"depth_max_nm", c.fit.depth_max_nm},
              {"depth_grid", c.fit.depth_grid},
              {"dip_guess_ns", optional_json(c.fit.dip_guess_ns)},
              {"window_half_width_ns", optional_json(c.fit.window_half_width_ns)},
              {"output_dir", c.fit.output_dir}};
  j["normalize"] = {{"inputs", c.normalize.inputs},
                    {"dip_guess_ns", optional_json(c.normalize.dip_guess_ns)},
                    {"window_half_width_ns", optional_json(c.normalize.window_half_width_ns)},
                    {"output_dir", c.normalize.output_dir}};
  j["oracle"] = {{"depth_nm", optional_json(c.oracle.depth_nm)},
                 {"r_max_nm", optional_json(c.oracle.r_max_nm)},
                 {"pseudospin_cases", c.oracle.pseudospin_cases},
                 {"pseudospin_spins", c.oracle.pseudospin_spins},
                 {"tolerance", c.oracle.tolerance},
                 {"output", c.oracle.output}};
  j["linewidth"] = {{"depth_min_nm", c.linewidth.depth_min_nm},
                    {"depth_max_nm", c.linewidth.depth_max_nm},
                    {"points", c.linewidth.points},
                    {"convention", c.linewidth.convention},
                    {"diffusion_m2_per_s", optional_json(c.linewidth.diffusion_m2_per_s)},
                    {"kinematic_viscosity_cst", optional_json(c.linewidth.kinematic_viscosity_cst)},
                    {"mass_density_kg_per_m3", optional_json(c.linewidth.mass_density_kg_per_m3)},
                    {"dynamic_viscosity_pa_s", optional_json(c.linewidth.dynamic_viscosity_pa_s)},
                    {"hydrodynamic_radius_nm", c.linewidth.hydrodynamic_radius_nm},
                    {"temperature_k", c.linewidth.temperature_k},
                    {"output", c.linewidth.output}};
  j["stats"] = {{"inputs", c.stats.inputs}, {"bin_width_nm", c.stats.bin_width_nm}, {"output", c.stats.output}};
  return j;
}

std::string config_hash(const RunConfig& c) {
  json j = config_to_json(c);
  j.erase("jobs");
  for (const char* section : {"simulate", "fit", "normalize", "oracle", "linewidth", "stats"}) {
    for (const char* key : {"inputs", "output", "output_dir"}) j[section].erase(key);
  }
  return io::sha256_hex(j.dump());
}

}  // namespace nvnmr::cli
