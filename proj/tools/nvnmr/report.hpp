#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "nvnmr/pipeline/fit.hpp"
#include "nvnmr/pipeline/stats.hpp"

namespace nvnmr::cli {

/// One NV in the depth table.
struct ReportRow {
  std::string sample_id;
  std::string nv_id;
  std::vector<double> b0_gauss;  // distinct fields, ascending
  std::vector<long> n_pulses;    // distinct pulse counts, ascending
  std::optional<double> depth_nm;
  double depth_sigma_nm = 0.0;
  std::string method;  // "single", "joint" or "weighted mean"
  std::vector<std::string> trace_ids;
  std::vector<std::string> failures;  // "id: message"
};

struct CohortEntry {
  std::string sample_id;  // empty: all NVs
  pipeline::CohortStats stats;
};

struct FitReport {
  Provenance provenance;
  bool joint = false;
  std::string t2n_mode;
  std::vector<ReportRow> rows;
  std::vector<CohortEntry> cohorts;
  double bin_width_nm = 2.0;
};

/// Per-sample cohort statistics (and an overall entry when more than one
/// sample is present) for every group with at least two fitted depths.
std::vector<CohortEntry> cohort_entries(const std::vector<ReportRow>& rows, double bin_width_nm);

nlohmann::ordered_json report_to_json(const FitReport& report);

/// Fixed-width table in the style "10.4(7)" followed by cohort lines.
std::string report_to_text(const FitReport& report);

nlohmann::ordered_json cohort_to_json(const pipeline::CohortStats& s);

/// Fit parameters, covariance and held values in boundary units.
nlohmann::ordered_json fit_to_json(const pipeline::FitResult& fit);

nlohmann::ordered_json provenance_to_json(const Provenance& p);

/// Pretty-printed JSON with a trailing newline.
std::string dump(const nlohmann::ordered_json& j);

}  // namespace nvnmr::cli
