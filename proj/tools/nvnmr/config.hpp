#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nvnmr/core/types.hpp"
#include "nvnmr/linewidth/linewidth.hpp"
#include "nvnmr/pipeline/fit.hpp"

namespace nvnmr::cli {

inline constexpr int kSchemaVersion = 1;

struct SampleConfig {
  double rho_per_nm3 = 68.0;
  std::optional<double> rho_sigma_per_nm3;
  double gamma_n = kProtonGammaDefault;  // rad/s/T
  std::optional<double> t2n_us;          // empty: infinite
  std::string geometry = "semi_infinite";
  double z1_nm = 0.0;
  double z2_nm = 0.0;
};

struct NvConfig {
  double depth_nm = 10.0;
  std::optional<double> alpha_deg;  // empty: atan(sqrt 2)
};

struct TauGrid {
  double start_ns = 500.0;
  double stop_ns = 700.0;
  int points = 201;
  std::vector<double> list_ns;  // overrides start/stop/points when non-empty
};

struct SequenceConfig {
  std::string family = "XY8";
  long n_pulses = 64;
  double b0_gauss = 197.0;
  TauGrid tau;
  std::string validation = "strict";
};

struct RawSimConfig {
  bool enabled = false;
  double counts = 2e5;          // mean F0 + F1 per point
  double amplitude = 0.3;       // S(tau) scale before decay
  double background_t2_us = 80.0;
  double background_p = 1.5;
};

struct SimulateConfig {
  double noise = 0.0;  // absolute Gaussian sigma on C
  bool include_off_resonant = false;
  std::string id = "sim";
  std::string sample_id;
  std::string nv_id;
  std::string output = "simulated.csv";
  RawSimConfig raw;
};

struct FitSection {
  std::vector<std::string> inputs;
  std::string t2n_mode = "auto";
  std::string omega = "free";
  double omega_window = 0.05;
  bool joint = false;
  double depth_min_nm = 1.0;
  double depth_max_nm = 100.0;
  int depth_grid = 41;
  std::optional<double> dip_guess_ns;
  std::optional<double> window_half_width_ns;
  std::string output_dir = "fit_out";
};

struct NormalizeSection {
  std::vector<std::string> inputs;
  std::optional<double> dip_guess_ns;
  std::optional<double> window_half_width_ns;
  std::string output_dir = "normalized";
};

struct OracleSection {
  std::optional<double> depth_nm;  // empty: nv.depth_nm
  std::optional<double> r_max_nm;  // empty: 10 x depth
  int pseudospin_cases = 3;
  double pseudospin_spins = 2e5;  // expected spins per pseudospin realization
  double tolerance = 0.01;
  std::string output = "oracle.json";
};

struct LinewidthSection {
  double depth_min_nm = 2.0;
  double depth_max_nm = 30.0;
  int points = 15;
  std::string convention = "paper";
  std::optional<double> diffusion_m2_per_s;
  std::optional<double> kinematic_viscosity_cst = 450.0;
  std::optional<double> mass_density_kg_per_m3 = 900.0;
  std::optional<double> dynamic_viscosity_pa_s;
  double hydrodynamic_radius_nm = 1.0;
  double temperature_k = 293.0;
  std::string output = "linewidth.csv";
};

struct StatsSection {
  std::vector<std::string> inputs;
  double bin_width_nm = 2.0;
  std::string output = "stats.json";
};

struct RunConfig {
  int schema_version = kSchemaVersion;
  std::uint64_t seed = 0;
  int jobs = 1;
  SampleConfig sample;
  NvConfig nv;
  SequenceConfig sequence;
  SimulateConfig simulate;
  FitSection fit;
  NormalizeSection normalize;
  OracleSection oracle;
  LinewidthSection linewidth;
  StatsSection stats;

  /// Domain objects built from the config; throw ConfigError naming the field.
  NuclearSample nuclear_sample() const;
  NvCenter nv_center() const;
  double alpha_rad() const;
  std::vector<double> tau_grid() const;  // s
  PulseSequence pulse_sequence() const;
  StaticField field() const;
  pipeline::FitConfig fit_config() const;
  linewidth::DiffusionSample diffusion_sample() const;
};

/// Parses and validates a config document. Unknown keys, wrong types and
/// an unsupported schema_version throw ConfigError with the field path.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

/// Complete effective config (defaults filled in).
nlohmann::json config_to_json(const RunConfig& c);

/// SHA-256 of the canonical (sorted-key, compact) effective config, leaving
/// out the thread count and file locations. Input contents are hashed
/// separately in each output.
std::string config_hash(const RunConfig& c);

}  // namespace nvnmr::cli
