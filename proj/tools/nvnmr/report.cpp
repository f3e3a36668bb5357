#include "report.hpp"

#include <algorithm>
#include <map>
#include <numbers>

#include <fmt/format.h>

#include "nvnmr/core/units.hpp"

namespace nvnmr::cli {

using nlohmann::ordered_json;

namespace {

std::string join_numbers(const std::vector<double>& v) {
  std::string out;
  for (double x : v) out += fmt::format("{}{:g}", out.empty() ? "" : ",", x);
  return out;
}

std::string join_counts(const std::vector<long> &v) {
  std::string out;
  for (long x : v) out += fmt::format("{}{}", out.empty() ? "" : ",", x);
  return out;
}

ordered_json optional_json(const std::optional<double>& v, double scale = 1.0) {
  return v ? ordered_json(*v * scale) : ordered_json(nullptr);
}

}  // namespace

std::vector<CohortEntry> cohort_entries(const std::vector<ReportRow>& rows, double bin_width_nm) {
  std::map<std::string, std::vector<double>> by_sample;
  std::vector<double> all;
  for (const auto& r : rows) {
    if (!r.depth_nm) continue;
    by_sample[r.sample_id].push_back(*r.depth_nm);
    all.push_back(*r.depth_nm);
  }
  pipeline::HistogramOptions h;
  h.bin_width = bin_width_nm;
  std::vector<CohortEntry> out;
  for (const auto& [id, v] : by_sample) {
    if (v.size() >= 2) out.push_back({id, pipeline::cohort_stats(std::span<const double>(v), h)});
  }
  if (by_sample.size() > 1 && all.size() >= 2) {
    out.push_back({"", pipeline::cohort_stats(std::span<const double>(all), h)});
  }
  return out;
}

ordered_json provenance_to_json(const Provenance& p) {
  return ordered_json{{"tool", "nvnmr"},
                      {"tool_version", p.tool_version},
                      {"config_hash", p.config_hash},
                      {"seed", p.seed}};
}

ordered_json cohort_to_json(const pipeline::CohortStats& s) {
  ordered_json bins = ordered_json::array();
  for (const auto& b : s.bins) bins.push_back({{"lo_nm", b.lo}, {"hi_nm", b.hi}, {"count", b.count}});
  return ordered_json{{"n", s.n},
                      {"mean_nm", s.mean},
                      {"std_nm", s.std_dev},
                      {"mean_nm_rounded", fmt::format("{:.1f}", s.mean)},
                      {"std_nm_rounded", fmt::format("{:.1f}", s.std_dev)},
                      {"histogram", bins}};
}

ordered_json fit_to_json(const pipeline::FitResult& fit) {
  ordered_json j;
  j["t2n_mode"] = std::string(pipeline::to_string(fit.mode));
  j["joint"] = fit.joint;
  j["depth_nm"] = units::m_to_nm(fit.depth);
  j["depth_sigma_nm"] = units::m_to_nm(fit.depth_sigma);
  j["depth_sigma_fit_nm"] = units::m_to_nm(fit.depth_sigma_fit);
  j["depth_table"] = pipeline::format_with_uncertainty(units::m_to_nm(fit.depth), units::m_to_nm(fit.depth_sigma));
  ordered_json omega = ordered_json::array();
  for (std::size_t g = 0; g < fit.omega_l.size(); ++g) {
    omega.push_back({{"b0_gauss", units::tesla_to_gauss(fit.group_b0[g])},
                     {"omega_l_rad_per_s", fit.omega_l[g]},
                     {"omega_l_sigma_rad_per_s", fit.omega_l_sigma[g]},
                     {"dip_tau_ns", units::s_to_ns(std::numbers::pi / fit.omega_l[g])}});
  }
  j["omega_l"] = omega;
  j["omega_l_policy"] = fit.omega_fixed ? "fixed" : "free";
  j["t2n_us"] = optional_json(fit.t2n, 1e6);
  j["t2n_sigma_us"] = optional_json(fit.t2n_sigma, 1e6);
  j["chi2"] = fit.chi2;
  j["chi2_reduced"] = fit.chi2_reduced;
  j["dof"] = fit.dof;
  j["points"] = fit.points;
  j["unit_weights"] = fit.unit_weights;
  j["errors_scaled_by_chi2"] = fit.errors_scaled;
  j["parameters"] = fit.parameter_names;
  ordered_json cov = ordered_json::array();
  for (Eigen::Index r = 0; r < fit.covariance.rows(); ++r) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index c = 0; c < fit.covariance.cols(); ++c) row.push_back(fit.covariance(r, c));
    cov.push_back(row);
  }
  j["covariance"] = cov;
  j["ambiguous"] = fit.ambiguous;
  j["ambiguity_note"] = fit.ambiguity_note;
  ordered_json cands = ordered_json::array();
  for (const auto& c : fit.candidates) {
    cands.push_back({{"depth_nm", units::m_to_nm(c.depth)}, {"chi2", c.chi2}, {"converged", c.converged},
                     {"note", c.note}});
  }
  j["candidates"] = cands;
  if (fit.chi2_infinite || fit.chi2_finite) {
    j["model_selection"] = {{"chi2_infinite", optional_json(fit.chi2_infinite)},
                            {"chi2_finite", optional_json(fit.chi2_finite)},
                            {"depth_infinite_nm", optional_json(fit.depth_infinite, 1e9)},
                            {"depth_finite_nm", optional_json(fit.depth_finite, 1e9)}};
  }
  j["held"] = {{"rho_per_nm3", units::per_m3_to_per_nm3(fit.rho)},
               {"rho_sigma_per_nm3", fit.rho_sigma ? ordered_json(units::per_m3_to_per_nm3(*fit.rho_sigma))
                                                   : ordered_json(nullptr)},
               {"alpha_deg", units::rad_to_deg(fit.alpha)},
               {"gamma_n_rad_per_s_per_t", fit.gamma_n},
               {"gamma_e_rad_per_s_per_t", fit.gamma_e},
               {"n_pulses", fit.n_pulses}};
  return j;
}

ordered_json report_to_json(const FitReport& report) {
  ordered_json j = provenance_to_json(report.provenance);
  j["fit_kind"] = report.joint ? "joint" : "independent";
  j["t2n_mode"] = report.t2n_mode;
  ordered_json rows = ordered_json::array();
  for (const auto& r : report.rows) {
    ordered_json row{{"sample_id", r.sample_id},
                     {"nv_id", r.nv_id},
                     {"b0_gauss", r.b0_gauss},
                     {"n_pulses", r.n_pulses},
                     {"depth_nm", optional_json(r.depth_nm)},
                     {"depth_sigma_nm", r.depth_nm ? ordered_json(r.depth_sigma_nm) : ordered_json(nullptr)},
                     {"depth_table", r.depth_nm ? pipeline::format_with_uncertainty(*r.depth_nm, r.depth_sigma_nm)
                                                : std::string("-")},
                     {"method", r.method},
                     {"traces", r.trace_ids},
                     {"failures", r.failures}};
    rows.push_back(std::move(row));
  }
  j["rows"] = rows;
  ordered_json cohorts = ordered_json::array();
  for (const auto& c : report.cohorts) {
    ordered_json e = cohort_to_json(c.stats);
    e["sample_id"] = c.sample_id.empty() ? ordered_json(nullptr) : ordered_json(c.sample_id);
    cohorts.push_back(std::move(e));
  }
  j["cohorts"] = cohorts;
  j["histogram_bin_width_nm"] = report.bin_width_nm;
  return j;
}

std::string report_to_text(const FitReport& report) {
  std::string out;
  out += fmt::format("# nvnmr {} depth report ({} fits, T2n* mode {})\n", report.provenance.tool_version,
                     report.joint ? "joint" : "independent", report.t2n_mode);
  out += fmt::format("# config_hash={} seed={}\n", report.provenance.config_hash, report.provenance.seed);
  out += fmt::format("{:<10} {:<10} {:<14} {:<16} {:<12} {}\n", "Sample", "NV", "B0 (G)", "N", "Depth (nm)",
                     "Method");
  for (const auto& r : report.rows) {
    const std::string depth =
        r.depth_nm ? pipeline::format_with_uncertainty(*r.depth_nm, r.depth_sigma_nm) : std::string("-");
    out += fmt::format("{:<10} {:<10} {:<14} {:<16} {:<12} {}\n", r.sample_id.empty() ? "-" : r.sample_id,
                       r.nv_id.empty() ? "-" : r.nv_id, join_numbers(r.b0_gauss), join_counts(r.n_pulses), depth,
                       r.method);
  }
  for (const auto& c : report.cohorts) {
    out += fmt::format("Cohort {}: n={} mean={:.1f} nm std={:.1f} nm\n",
                       c.sample_id.empty() ? "(all)" : c.sample_id, c.stats.n, c.stats.mean, c.stats.std_dev);
  }
  bool header = false;
  for (const auto& r : report.rows) {
    for (const auto& f : r.failures) {
      if (!header) out += "Failures:\n";
      header = true;
      out += fmt::format("  {}\n", f);
    }
  }
  return out;
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace nvnmr::cli
