#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nvnmr/pipeline/trace.hpp"

namespace nvnmr::io {

/// Major.minor of the CSV layout written by this library. Readers accept any
/// minor version of the same major.
inline constexpr std::string_view kCsvVersion = "1.0";
inline constexpr int kCsvMajor = 1;

/// Ordered `# key=value` lines at the top of a CSV file.
class CsvHeader {
 public:
  std::optional<std::string> get(std::string_view key) const;
  /// Replaces an existing key in place or appends it.
  void set(std::string_view key, std::string value);
  const std::vector<std::pair<std::string, std::string>>& entries() const noexcept { return entries_; }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

struct CsvTable {
  CsvHeader header;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  /// Index of a column, or nullopt.
  std::optional<std::size_t> column(std::string_view name) const;
};

/// Shortest decimal that round-trips a double ("%.17g").
std::string format_double(double v);

/// Parses a table. Throws ParseError naming `source:line` for malformed rows,
/// missing or unknown-major `nvnmr_csv_version` (when `require_version`).
CsvTable read_csv(std::istream& in, std::string_view source, bool require_version = true);
CsvTable read_csv_file(const std::filesystem::path& path, bool require_version = true);

/// Header lines, the column line, then rows; `nvnmr_csv_version` is written
/// first if the header lacks it.
void write_csv(std::ostream& out, const CsvTable& table);
std::string to_csv_string(const CsvTable& table);

enum class TraceFileKind { Raw, Signal, Normalized };

/// Kind from the `kind` header, else from the columns (f0/f1 means raw).
TraceFileKind detect_trace_kind(const CsvTable& table);

/// Trace metadata from header keys id, sample_id, nv_id, family, N, B0_G.
pipeline::TraceMetadata metadata_from_header(const CsvHeader& h, std::string_view source);
void metadata_to_header(const pipeline::TraceMetadata& meta, CsvHeader& h);

/// tau column tagged tau_s, tau_us or tau_ns; value column `contrast` (or
/// `signal`); optional `sigma`.
pipeline::ContrastTrace contrast_trace_from_csv(const CsvTable& table, std::string_view source);
/// tau_*, f0, f1 and an optional repetitions column.
pipeline::RawTrace raw_trace_from_csv(const CsvTable& table, std::string_view source);

CsvTable contrast_trace_to_csv(const pipeline::ContrastTrace& trace);
CsvTable raw_trace_to_csv(const pipeline::RawTrace& trace);

}  // namespace nvnmr::io
