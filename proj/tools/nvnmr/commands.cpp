#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "nvnmr/core/error.hpp"
#include "nvnmr/core/units.hpp"
#include "nvnmr/io/csv.hpp"
#include "nvnmr/io/files.hpp"
#include "nvnmr/linewidth/linewidth.hpp"
#include "nvnmr/model/contrast.hpp"
#include "nvnmr/model/geometry.hpp"
#include "nvnmr/oracle/bath.hpp"
#include "nvnmr/oracle/pseudospin.hpp"
#include "nvnmr/pipeline/normalize.hpp"
#include "nvnmr/pipeline/stats.hpp"
#include "oracle_suite.hpp"
#include "report.hpp"

namespace nvnmr::cli {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

void stamp(io::CsvHeader& h, const Provenance& p) {
  h.set("config_hash", p.config_hash);
  h.set("seed", fmt::format("{}", p.seed));
  h.set("tool_version", p.tool_version);
}

/// A trace file as read from disk.
struct InputTrace {
  std::string path;
  std::string sha256;
  io::TraceFileKind kind = io::TraceFileKind::Normalized;
  pipeline::RawTrace raw;
  pipeline::ContrastTrace trace;  // signal or normalized stage
};

InputTrace load_trace(const std::string& path) {
  InputTrace in;
  in.path = path;
  std::string text;
  try {
    text = io::read_file(path);
  } catch (const Error& e) {
    throw ParseError(path, e.what());
  }
  in.sha256 = io::sha256_hex(text);
  std::istringstream ss(text);
  const io::CsvTable table = io::read_csv(ss, path);
  in.kind = io::detect_trace_kind(table);
  if (in.kind == io::TraceFileKind::Raw) {
    in.raw = io::raw_trace_from_csv(table, path);
    in.trace.meta = in.raw.meta;
  } else {
    in.trace = io::contrast_trace_from_csv(table, path);
  }
  return in;
}

ordered_json inputs_json(const std::vector<InputTrace>& inputs) {
  ordered_json a = ordered_json::array();
  for (const auto& in : inputs) a.push_back({{"path", in.path}, {"sha256", in.sha256}});
  return a;
}

ordered_json background_json(const pipeline::BackgroundFit& bg) {
  return ordered_json{{"model", "A*exp(-(N*tau/T2)^p)"},
                      {"amplitude", bg.amplitude},
                      {"t2_us", units::s_to_us(bg.t2)},
                      {"p", bg.p},
                      {"window_lo_ns", units::s_to_ns(bg.window_lo)},
                      {"window_hi_ns", units::s_to_ns(bg.window_hi)},
                      {"window_mode", bg.auto_window ? "auto" : "fixed"},
                      {"points_used", bg.points_used},
                      {"chi2", bg.chi2}};
}

double dip_guess_for(const pipeline::TraceMetadata& meta, const std::optional<double>& guess_ns, double gamma_n) {
  if (guess_ns) return units::ns_to_s(*guess_ns);
  const double omega = gamma_n * meta.b0;
  if (!(omega > 0.0)) {
    throw InvalidArgument(fmt::format("trace '{}' has B0 = 0; set a dip guess explicitly", meta.id));
  }
  return std::numbers::pi / omega;
}

/// Signal or raw input taken to the normalized stage.
struct Prepared {
  pipeline::ContrastTrace normalized;
  std::optional<pipeline::BackgroundFit> background;
};

Prepared prepare(const InputTrace& in, const std::optional<double>& guess_ns,
                 const std::optional<double>& window_ns, double gamma_n) {
  if (in.kind == io::TraceFileKind::Normalized) return {in.trace, std::nullopt};
  const pipeline::ContrastTrace signal =
      in.kind == io::TraceFileKind::Raw ? pipeline::to_signal_contrast(in.raw) : in.trace;
  pipeline::BackgroundOptions opts;
  if (window_ns) opts.window_half_width = units::ns_to_s(*window_ns);
  auto res = pipeline::normalize_background(signal, dip_guess_for(signal.meta, guess_ns, gamma_n), opts);
  return {std::move(res.normalized), res.background};
}

std::string output_name(const std::string& path, std::string_view suffix) {
  return fs::path(path).stem().string() + std::string(suffix);
}

std::string row_key(const pipeline::TraceMetadata& m) {
  if (m.sample_id.empty() && m.nv_id.empty()) return "\x01" + m.id;
  return m.sample_id + "\x02" + m.nv_id;
}

template <class T>
void insert_sorted_unique(std::vector<T>& v, T x) {
  const auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it == v.end() || *it != x) v.insert(it, x);
}

}  // namespace

Provenance provenance_for(const RunConfig& config) {
  Provenance p;
  p.config_hash = config_hash(config);
  p.seed = config.seed;
  return p;
}

// ---------------------------------------------------------------- simulate

pipeline::ContrastTrace simulate_trace(const RunConfig& config) {
  const PulseSequence seq = config.pulse_sequence();
  const NuclearSample sample = config.nuclear_sample();
  model::ContrastModelParams p{config.nv_center(), sample, seq.family(), seq.n_pulses(),
                               larmor_frequency(sample, config.field())};
  model::ContrastOptions opts;
  opts.include_off_resonant = config.simulate.include_off_resonant;

  pipeline::ContrastTrace t;
  t.stage = pipeline::TraceStage::Normalized;
  t.tau = seq.tau_grid();
  t.value = model::contrast_curve(p, t.tau, opts);
  t.meta.id = config.simulate.id;
  t.meta.sample_id = config.simulate.sample_id;
  t.meta.nv_id = config.simulate.nv_id;
  t.meta.family = seq.family();
  t.meta.n_pulses = seq.n_pulses();
  t.meta.b0 = config.field().tesla();
  if (config.simulate.noise > 0.0) {
    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> noise(0.0, config.simulate.noise);
    for (double& v : t.value) v += noise(rng);
    t.sigma.assign(t.size(), config.simulate.noise);
  }
  return t;
}

pipeline::RawTrace simulate_raw(const RunConfig& config) {
  RunConfig noiseless = config;
  noiseless.simulate.noise = 0.0;
  const pipeline::ContrastTrace c = simulate_trace(noiseless);
  const auto& raw = config.simulate.raw;
  if (!(raw.counts > 0.0) || !(raw.amplitude > 0.0) || raw.amplitude >= 1.0 || !(raw.background_t2_us > 0.0) ||
      !(raw.background_p > 0.0)) {
    throw ConfigError("config: simulate.raw: need counts > 0, 0 < amplitude < 1, background_t2_us > 0, "
                      "background_p > 0");
  }
  const double t2 = units::us_to_s(raw.background_t2_us);
  std::mt19937_64 rng(config.seed);
  pipeline::RawTrace r;
  r.meta = c.meta;
  r.tau = c.tau;
  const double n = static_cast<double>(c.meta.n_pulses);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double s = raw.amplitude * std::exp(-std::pow(n * c.tau[i] / t2, raw.background_p)) * c.value[i];
    std::poisson_distribution<long> f0(0.5 * raw.counts * (1.0 + s));
    std::poisson_distribution<long> f1(0.5 * raw.counts * (1.0 - s));
    r.f0.push_back(static_cast<double>(f0(rng)));
    r.f1.push_back(static_cast<double>(f1(rng)));
  }
  return r;
}

int cmd_simulate(const RunConfig& config, const fs::path& output, const Console& io) {
  const Provenance prov = provenance_for(config);
  io::CsvTable table;
  if (config.simulate.raw.enabled) {
    table = io::raw_trace_to_csv(simulate_raw(config));
    table.header.set("counts", io::format_double(config.simulate.raw.counts));
    table.header.set("amplitude", io::format_double(config.simulate.raw.amplitude));
    table.header.set("background_t2_us", io::format_double(config.simulate.raw.background_t2_us));
    table.header.set("background_p", io::format_double(config.simulate.raw.background_p));
  } else {
    table = io::contrast_trace_to_csv(simulate_trace(config));
    table.header.set("noise", io::format_double(config.simulate.noise));
  }
  auto& h = table.header;
  h.set("depth_nm", io::format_double(config.nv.depth_nm));
  h.set("rho_per_nm3", io::format_double(config.sample.rho_per_nm3));
  h.set("gamma_n_rad_per_s_per_t", io::format_double(config.sample.gamma_n));
  h.set("alpha_deg", io::format_double(units::rad_to_deg(config.alpha_rad())));
  h.set("geometry", config.sample.geometry);
  h.set("t2n_mode", config.sample.t2n_us ? "finite" : "infinite");
  if (config.sample.t2n_us) h.set("t2n_us", io::format_double(*config.sample.t2n_us));
  h.set("include_off_resonant", config.simulate.include_off_resonant ? "true" : "false");
  stamp(h, prov);
  io::write_file_atomic(output, io::to_csv_string(table));
  io.out << fmt::format("simulate: wrote {} ({} rows)\n", output.string(), table.rows.size());
  return kExitOk;
}

// --------------------------------------------------------------- normalize

int cmd_normalize(const RunConfig& config, const std::vector<std::string>& inputs, const fs::path& output_dir,
                  const Console& io) {
  if (inputs.empty()) throw ConfigError("normalize: no input files");
  const Provenance prov = provenance_for(config);
  std::vector<InputTrace> loaded;
  for (const auto& p : inputs) loaded.push_back(load_trace(p));

  int failures = 0;
  ordered_json summary = provenance_to_json(prov);
  summary["inputs"] = inputs_json(loaded);
  ordered_json results = ordered_json::array();
  for (const auto& in : loaded) {
    ordered_json r{{"input", in.path}, {"id", in.trace.meta.id}};
    try {
      if (in.kind == io::TraceFileKind::Normalized) throw InvalidArgument("input is already normalized");
      const Prepared p = prepare(in, config.normalize.dip_guess_ns, config.normalize.window_half_width_ns,
                                 config.sample.gamma_n);
      io::CsvTable table = io::contrast_trace_to_csv(p.normalized);
      const auto& bg = *p.background;
      table.header.set("source", in.path);
      table.header.set("source_sha256", in.sha256);
      table.header.set("background_amplitude", io::format_double(bg.amplitude));
      table.header.set("background_t2_us", io::format_double(units::s_to_us(bg.t2)));
      table.header.set("background_p", io::format_double(bg.p));
      table.header.set("window_lo_ns", io::format_double(units::s_to_ns(bg.window_lo)));
      table.header.set("window_hi_ns", io::format_double(units::s_to_ns(bg.window_hi)));
      table.header.set("window_mode", bg.auto_window ? "auto" : "fixed");
      stamp(table.header, prov);
      const fs::path out = output_dir / output_name(in.path, ".normalized.csv");
      io::write_file_atomic(out, io::to_csv_string(table));
      r["output"] = out.string();
      r["background"] = background_json(bg);
      io.out << fmt::format("normalize: {} -> {}\n", in.path, out.string());
    } catch (const Error& e) {
      ++failures;
      r["error"] = e.what();
      io.err << fmt::format("normalize: {}: {}\n", in.path, e.what());
    }
    results.push_back(std::move(r));
  }
  summary["results"] = results;
  io::write_file_atomic(output_dir / "normalize_summary.json", dump(summary));
  return failures ? kExitFit : kExitOk;
}

// --------------------------------------------------------------------- fit

int cmd_fit(const RunConfig& config, const std::vector<std::string>& inputs, const fs::path& output_dir,
            const Console& io) {
  if (inputs.empty()) throw ConfigError("fit: no input files");
  const Provenance prov = provenance_for(config);
  const pipeline::FitConfig fcfg = config.fit_config();

  std::vector<InputTrace> loaded;
  for (const auto& p : inputs) loaded.push_back(load_trace(p));

  // Normalize whatever is not yet normalized; failures stay per trace.
  std::vector<std::optional<Prepared>> prepared(loaded.size());
  std::vector<std::string> prep_error(loaded.size());
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    try {
      prepared[i] =
          prepare(loaded[i], config.fit.dip_guess_ns, config.fit.window_half_width_ns, config.sample.gamma_n);
    } catch (const Error& e) {
      prep_error[i] = e.what();
    }
  }

  // Group by NV, keeping first-seen order.
  std::vector<std::string> keys;
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    const std::string k = row_key(loaded[i].trace.meta);
    if (!groups.count(k)) keys.push_back(k);
    groups[k].push_back(i);
  }

  FitReport report;
  report.provenance = prov;
  report.joint = config.fit.joint;
  report.t2n_mode = config.fit.t2n_mode;
  report.bin_width_nm = config.stats.bin_width_nm;

  int failures = 0;
  auto write_fit = [&](const pipeline::FitResult& fit, const std::vector<std::size_t>& members,
                       const std::string& name) {
    ordered_json j = provenance_to_json(prov);
    std::vector<InputTrace> used;
    for (auto i : members) used.push_back(loaded[i]);
    j["inputs"] = inputs_json(used);
    j["result"] = fit_to_json(fit);
    ordered_json traces = ordered_json::array();
    for (std::size_t m = 0; m < members.size(); ++m) {
      const auto i = members[m];
      const auto& t = prepared[i]->normalized;
      ordered_json tj{{"id", t.meta.id},
                      {"input", loaded[i].path},
                      {"n_pulses", t.meta.n_pulses},
                      {"b0_gauss", units::tesla_to_gauss(t.meta.b0)}};
      if (prepared[i]->background) tj["background"] = background_json(*prepared[i]->background);
      std::vector<double> tau_ns;
      for (double tau : t.tau) tau_ns.push_back(units::s_to_ns(tau));
      tj["tau_ns"] = tau_ns;
      tj["contrast"] = t.value;
      tj["fitted"] = pipeline::fitted_curve(fit, t, fcfg);
      tj["residuals"] = m < fit.residuals.size() ? fit.residuals[m] : std::vector<double>{};
      traces.push_back(std::move(tj));
    }
    j["traces"] = traces;
    const fs::path out = output_dir / (name + ".fit.json");
    io::write_file_atomic(out, dump(j));
  };

  // Independent fits run as one parallel batch over all prepared traces.
  std::vector<std::optional<pipeline::BatchOutcome>> outcomes(loaded.size());
  if (!config.fit.joint) {
    std::vector<pipeline::ContrastTrace> batch;
    std::vector<std::size_t> index;
    for (std::size_t i = 0; i < loaded.size(); ++i) {
      if (prepared[i]) {
        batch.push_back(prepared[i]->normalized);
        index.push_back(i);
      }
    }
    auto res = pipeline::fit_batch(batch, fcfg, config.jobs);
    for (std::size_t b = 0; b < res.size(); ++b) outcomes[index[b]] = std::move(res[b]);
  }

  for (const auto& key : keys) {
    const auto& members = groups[key];
    ReportRow row;
    const auto& meta0 = loaded[members.front()].trace.meta;
    row.sample_id = meta0.sample_id;
    row.nv_id = meta0.nv_id.empty() && meta0.sample_id.empty() ? meta0.id : meta0.nv_id;
    std::vector<std::size_t> ok;
    for (auto i : members) {
      const auto& meta = loaded[i].trace.meta;
      row.trace_ids.push_back(meta.id);
      insert_sorted_unique(row.b0_gauss, units::tesla_to_gauss(meta.b0));
      insert_sorted_unique(row.n_pulses, meta.n_pulses);
      if (!prepared[i]) {
        row.failures.push_back(fmt::format("{}: {}", meta.id, prep_error[i]));
      } else {
        ok.push_back(i);
      }
    }

    if (config.fit.joint) {
      if (!ok.empty()) {
        std::vector<pipeline::ContrastTrace> ts;
        for (auto i : ok) ts.push_back(prepared[i]->normalized);
        try {
          const auto fit = pipeline::fit_depth(std::span<const pipeline::ContrastTrace>(ts), fcfg);
          row.depth_nm = units::m_to_nm(fit.depth);
          row.depth_sigma_nm = units::m_to_nm(fit.depth_sigma);
          row.method = ts.size() > 1 ? "joint" : "single";
          const std::string name =
              row.sample_id.empty() ? row.nv_id : fmt::format("{}_{}", row.sample_id, row.nv_id);
          write_fit(fit, ok, name);
        } catch (const Error& e) {
          row.failures.push_back(fmt::format("joint fit: {}", e.what()));
        }
      }
    } else {
      std::vector<pipeline::FitResult> fits;
      for (auto i : ok) {
        const auto& o = *outcomes[i];
        if (o.result) {
          fits.push_back(*o.result);
          write_fit(*o.result, {i}, loaded[i].trace.meta.id);
        } else {
          row.failures.push_back(fmt::format("{}: {}{}", loaded[i].trace.meta.id,
                                             o.insufficient_signal ? "insufficient signal: " : "", o.error));
        }
      }
      if (fits.size() == 1) {
        row.depth_nm = units::m_to_nm(fits[0].depth);
        row.depth_sigma_nm = units::m_to_nm(fits[0].depth_sigma);
        row.method = "single";
      } else if (fits.size() > 1) {
        const auto c = pipeline::combine_independent(fits);
        row.depth_nm = units::m_to_nm(c.depth);
        row.depth_sigma_nm = units::m_to_nm(c.sigma);
        row.method = "weighted mean";
      }
    }
    failures += static_cast<int>(row.failures.size());
    for (const auto& f : row.failures) io.err << "fit: " << f << '\n';
    report.rows.push_back(std::move(row));
  }

  report.cohorts = cohort_entries(report.rows, config.stats.bin_width_nm);
  ordered_json rj = report_to_json(report);
  rj["inputs"] = inputs_json(loaded);
  io::write_file_atomic(output_dir / "report.json", dump(rj));
  const std::string text = report_to_text(report);
  io::write_file_atomic(output_dir / "report.txt", text);
  io.out << text;
  return failures ? kExitFit : kExitOk;
}

// ------------------------------------------------------------------ oracle

int cmd_oracle(const RunConfig& config, const fs::path& output, const Console& io) {
  const Provenance prov = provenance_for(config);
  const NuclearSample sample = config.nuclear_sample();
  const double depth = units::nm_to_m(config.oracle.depth_nm.value_or(config.nv.depth_nm));
  const double r_max = config.oracle.r_max_nm ? units::nm_to_m(*config.oracle.r_max_nm) : 10.0 * depth;
  const double tol = config.oracle.tolerance;

  ordered_json checks = ordered_json::array();
  bool all_pass = true;
  auto record = [&](ordered_json c, bool pass) {
    c["pass"] = pass;
    all_pass = all_pass && pass;
    io.out << fmt::format("oracle: {:<24} {}\n", c["name"].get<std::string>(), pass ? "PASS" : "FAIL");
    checks.push_back(std::move(c));
  };

  // Monte Carlo geometric factor against the closed form.
  try {
    const NvCenter nv(depth, config.alpha_rad());
    const oracle::BathSampler sampler(sample, nv, r_max, config.seed);
    const auto gs = oracle::geometric_sum(sampler, PhysicalConstants::standard(), config.jobs);
    const double analytic = model::geometric_factor_reduced(nv.alpha(), depth, sample.geometry());
    const double dev = gs.gamma_tilde / analytic - 1.0;
    const double tail = oracle::truncation_tail_bound(nv, sample.geometry(), r_max) / analytic;
    ordered_json c{{"name", "geometric_factor"},
                   {"depth_nm", units::m_to_nm(depth)},
                   {"r_max_nm", units::m_to_nm(r_max)},
                   {"spins", gs.count},
                   {"expected_spins", sampler.expected_count()},
                   {"gamma_tilde_mc_per_nm3", units::per_m3_to_per_nm3(gs.gamma_tilde)},
                   {"gamma_tilde_se_per_nm3", units::per_m3_to_per_nm3(gs.gamma_tilde_se)},
                   {"gamma_tilde_analytic_per_nm3", units::per_m3_to_per_nm3(analytic)},
                   {"relative_deviation", dev},
                   {"deviation_in_se", gs.gamma_tilde_se > 0 ? (gs.gamma_tilde - analytic) / gs.gamma_tilde_se : 0.0},
                   {"truncation_bound_relative", tail},
                   {"b_rms_mc_t", std::sqrt(gs.b_rms_sq)},
                   {"tolerance", tol}};
    record(std::move(c), gs.count > 0 && std::abs(dev) < tol);
  } catch (const Error& e) {
    record(ordered_json{{"name", "geometric_factor"}, {"error", e.what()}}, false);
  }

  // kappa / B_RMS identity on a thinned copy of the same region.
  try {
    const NvCenter nv(depth, config.alpha_rad());
    const double volume = oracle::region_volume(nv, sample.geometry(), r_max);
    const double rho = std::min(sample.rho(), config.oracle.pseudospin_spins / volume);
    const oracle::BathSampler sampler(sample.with_rho(rho), nv, r_max, config.seed + 1);
    const auto bath = sampler.materialize();
    const auto b = oracle::kappa_brms_bridge(bath, nv);
    ordered_json c{{"name", "kappa_bridge"},
                   {"spins", b.count},
                   {"sum_kappa_sq", b.sum_kappa_sq},
                   {"four_gamma_e2_brms_sq", b.four_ge2_brms_sq},
                   {"relative_difference", b.relative_difference},
                   {"tolerance", 1e-10}};
    record(std::move(c), std::abs(b.relative_difference) < 1e-10);
  } catch (const Error& e) {
    record(ordered_json{{"name", "kappa_bridge"}, {"error", e.what()}}, false);
  }

  // Pseudospin product against the exponential form.
  for (int i = 0; i < config.oracle.pseudospin_cases; ++i) {
    const std::string name = fmt::format("pseudospin_{}", i);
    try {
      const auto pc = make_pseudospin_case(config.seed, static_cast<std::size_t>(i), config.alpha_rad(),
                                           sample.gamma_n(), sample.geometry(), config.oracle.pseudospin_spins);
      const auto r = run_pseudospin_case(pc, sample.gamma_n(), sample.geometry(), config.jobs);
      ordered_json c{{"name", name},
                     {"depth_nm", units::m_to_nm(pc.depth)},
                     {"n_pulses", pc.n_pulses},
                     {"omega_l_rad_per_s", pc.omega_l},
                     {"tau_ns", units::s_to_ns(pc.tau)},
                     {"spins", r.spins},
                     {"product", r.product},
                     {"exponential", r.exponential},
                     {"relative_difference", r.relative_difference},
                     {"log_relative_difference", r.log_relative_difference},
                     {"max_single_spin_dip", r.max_dip},
                     {"weak_coupling", r.weak_coupling},
                     {"tolerance", tol}};
      record(std::move(c), r.weak_coupling && std::abs(r.relative_difference) < tol);
    } catch (const Error& e) {
      record(ordered_json{{"name", name}, {"error", e.what()}}, false);
    }
  }

  ordered_json j = provenance_to_json(prov);
  j["checks"] = checks;
  j["pass"] = all_pass;
  io::write_file_atomic(output, dump(j));
  io.out << fmt::format("oracle: wrote {}\n", output.string());
  return all_pass ? kExitOk : kExitOracle;
}

// --------------------------------------------------------------- linewidth

int cmd_linewidth(const RunConfig& config, const fs::path& output, const Console& io) {
  const Provenance prov = provenance_for(config);
  const auto& lw = config.linewidth;
  const auto conv = linewidth::parse_convention(lw.convention);
  double d_coeff = 0.0;
  try {
    d_coeff = linewidth::diffusion_coefficient(config.diffusion_sample());
  } catch (const InvalidArgument& e) {
    throw ConfigError(fmt::format("config: linewidth: {}", e.what()));
  }
  if (!(lw.depth_min_nm > 0.0) || !(lw.depth_max_nm > lw.depth_min_nm)) {
    throw ConfigError("config: linewidth: need 0 < depth_min_nm < depth_max_nm");
  }
  io::CsvTable t;
  t.header.set("nvnmr_csv_version", std::string(io::kCsvVersion));
  t.header.set("kind", "linewidth");
  t.header.set("convention", std::string(linewidth::to_string(conv)));
  t.header.set("diffusion_m2_per_s", io::format_double(d_coeff));
  t.header.set("temperature_k", io::format_double(lw.temperature_k));
  stamp(t.header, prov);
  t.columns = {"depth_nm", "tau_d_s", "t2n_star_us", "fwhm_hz", "fwhm_khz"};
  for (int i = 0; i < lw.points; ++i) {
    const double d_nm = lw.depth_min_nm + (lw.depth_max_nm - lw.depth_min_nm) * i / (lw.points - 1);
    const double tau_d = linewidth::correlation_time(units::nm_to_m(d_nm), d_coeff);
    const double fwhm = linewidth::linewidth_fwhm(tau_d, conv);
    t.rows.push_back({d_nm, tau_d, units::s_to_us(linewidth::t2n_star_equivalent(tau_d)), fwhm,
                      units::hz_to_khz(fwhm)});
  }
  io::write_file_atomic(output, io::to_csv_string(t));
  io.out << fmt::format("linewidth: D = {:.3g} m^2/s, wrote {} ({} rows)\n", d_coeff, output.string(),
                        t.rows.size());
  return kExitOk;
}

// ------------------------------------------------------------------- stats

int cmd_stats(const RunConfig& config, const std::vector<std::string>& inputs, const fs::path& output,
              const Console& io) {
  if (inputs.empty()) throw ConfigError("stats: no input files");
  const Provenance prov = provenance_for(config);
  std::vector<pipeline::DepthValue> values;
  ordered_json in_json = ordered_json::array();
  for (const auto& path : inputs) {
    std::string text;
    try {
      text = io::read_file(path);
    } catch (const Error& e) {
      throw ParseError(path, e.what());
    }
    in_json.push_back({{"path", path}, {"sha256", io::sha256_hex(text)}});
    if (fs::path(path).extension() == ".json") {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(text);
      } catch (const nlohmann::json::exception& e) {
        throw ParseError(path, e.what());
      }
      auto take = [&](const nlohmann::json& o) {
        if (!o.contains("depth_nm") || !o["depth_nm"].is_number()) return;
        const double s = o.contains("depth_sigma_nm") && o["depth_sigma_nm"].is_number()
                             ? o["depth_sigma_nm"].get<double>()
                             : 0.0;
        values.push_back({o["depth_nm"].get<double>(), s});
      };
      if (j.contains("rows")) {
        for (const auto& r : j["rows"]) take(r);
      } else if (j.contains("result")) {
        take(j["result"]);
      } else {
        throw ParseError(path, "expected a fit report (rows) or a fit result (result)");
      }
    } else {
      std::istringstream ss(text);
      const auto table = io::read_csv(ss, path, false);
      const auto d = table.column("depth_nm");
      if (!d) throw ParseError(path, "no depth_nm column");
      const auto s = table.column("sigma_nm");
      for (const auto& row : table.rows) values.push_back({row[*d], s ? row[*s] : 0.0});
    }
  }
  pipeline::HistogramOptions h;
  h.bin_width = config.stats.bin_width_nm;
  pipeline::CohortStats st;
  try {
    st = pipeline::cohort_stats(std::span<const pipeline::DepthValue>(values), h);
  } catch (const InvalidArgument& e) {
    throw ConfigError(fmt::format("stats: {}", e.what()));
  }
  ordered_json j = provenance_to_json(prov);
  j["inputs"] = in_json;
  j["cohort"] = cohort_to_json(st);
  io::write_file_atomic(output, dump(j));
  io.out << fmt::format("stats: n={} mean={:.1f} nm std={:.1f} nm, wrote {}\n", st.n, st.mean, st.std_dev,
                        output.string());
  return kExitOk;
}

}  // namespace nvnmr::cli
