#include "nvnmr/io/csv.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "nvnmr/core/error.hpp"
#include "nvnmr/core/units.hpp"

namespace nvnmr::io {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end || s.empty()) return std::nullopt;
  return v;
}

std::string where(std::string_view source, std::size_t line) { return fmt::format("{}:{}", source, line); }

double header_number(const CsvHeader& h, std::string_view key, std::string_view source) {
  const auto v = h.get(key);
  if (!v) throw ParseError(std::string(source), fmt::format("missing '# {}=' header", key));
  const auto d = parse_double(trim(*v));
  if (!d) throw ParseError(std::string(source), fmt::format("header {}='{}' is not a number", key, *v));
  return *d;
}

struct TauColumn {
  std::size_t index;
  double scale;  // multiplies the stored value into seconds
};

TauColumn find_tau(const CsvTable& t, std::string_view source) {
  if (auto i = t.column("tau_s")) return {*i, 1.0};
  if (auto i = t.column("tau_us")) return {*i, units::kMicrosecond};
  if (auto i = t.column("tau_ns")) return {*i, units::kNanosecond};
  throw ParseError(std::string(source), "no tau column (expected tau_s, tau_us or tau_ns)");
}

double to_seconds(double v, const TauColumn& c) {
  if (c.scale == units::kMicrosecond) return units::us_to_s(v);
  if (c.scale == units::kNanosecond) return units::ns_to_s(v);
  return v;
}

// Re-raises a validation failure as a parse error against the file.
template <class Trace>
void validate_as_parse(const Trace& t, std::string_view source) {
  try {
    t.validate();
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string(source), e.what());
  }
}

}  // namespace

std::optional<std::string> CsvHeader::get(std::string_view key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return v;
  }
  return std::nullopt;
}

void CsvHeader::set(std::string_view key, std::string value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  entries_.emplace_back(std::string(key), std::move(value));
}

std::optional<std::size_t> CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  return std::nullopt;
}

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

CsvTable read_csv(std::istream& in, std::string_view source, bool require_version) {
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  bool have_columns = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view s = trim(line);
    if (s.empty()) continue;
    if (s.front() == '#') {
      if (have_columns) continue;
      const std::string_view body = trim(s.substr(1));
      const auto eq = body.find('=');
      if (eq != std::string_view::npos) t.header.set(trim(body.substr(0, eq)), std::string(trim(body.substr(eq + 1))));
      continue;
    }
    if (!have_columns) {
      for (auto c : split(s)) {
        if (c.empty()) throw ParseError(where(source, lineno), "empty column name");
        t.columns.emplace_back(c);
      }
      have_columns = true;
      continue;
    }
    const auto fields = split(s);
    if (fields.size() != t.columns.size()) {
      throw ParseError(where(source, lineno),
                       fmt::format("expected {} fields, got {}", t.columns.size(), fields.size()));
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const auto v = parse_double(fields[i]);
      if (!v) {
        throw ParseError(where(source, lineno),
                         fmt::format("column '{}': '{}' is not a number", t.columns[i], fields[i]));
      }
      row.push_back(*v);
    }
    t.rows.push_back(std::move(row));
  }
  if (!have_columns) throw ParseError(std::string(source), "no column header line");
  if (require_version) {
    const auto v = t.header.get("nvnmr_csv_version");
    if (!v) throw ParseError(std::string(source), "missing '# nvnmr_csv_version=' header");
    const auto dot = v->find('.');
    const std::string major = v->substr(0, dot);
    int m = -1;
    const auto [ptr, ec] = std::from_chars(major.data(), major.data() + major.size(), m);
    if (ec != std::errc{} || ptr != major.data() + major.size()) {
      throw ParseError(std::string(source), fmt::format("malformed nvnmr_csv_version '{}'", *v));
    }
    if (m != kCsvMajor) {
      throw ParseError(std::string(source),
                       fmt::format("unsupported nvnmr_csv_version {} (this build reads {}.x)", *v, kCsvMajor));
    }
  }
  return t;
}

CsvTable read_csv_file(const std::filesystem::path& path, bool require_version) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), "cannot open file");
  return read_csv(in, path.string(), require_version);
}

void write_csv(std::ostream& out, const CsvTable& table) {
  if (!table.header.get("nvnmr_csv_version")) out << "# nvnmr_csv_version=" << kCsvVersion << '\n';
  for (const auto& [k, v] : table.header.entries()) out << "# " << k << '=' << v << '\n';
  for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
    out << '\n';
  }
}

std::string to_csv_string(const CsvTable& table) {
  std::ostringstream ss;
  write_csv(ss, table);
  return ss.str();
}

TraceFileKind detect_trace_kind(const CsvTable& table) {
  if (const auto k = table.header.get("kind")) {
    if (*k == "raw") return TraceFileKind::Raw;
    if (*k == "signal") return TraceFileKind::Signal;
    if (*k == "normalized" || *k == "simulated") return TraceFileKind::Normalized;
  }
  if (table.column("f0") && table.column("f1")) return TraceFileKind::Raw;
  if (table.column("signal")) return TraceFileKind::Signal;
  return TraceFileKind::Normalized;
}

pipeline::TraceMetadata metadata_from_header(const CsvHeader& h, std::string_view source) {
  pipeline::TraceMetadata m;
  m.id = h.get("id").value_or(std::string(source));
  m.sample_id = h.get("sample_id").value_or("");
  m.nv_id = h.get("nv_id").value_or("");
  if (const auto f = h.get("family")) {
    try {
      m.family = parse_pulse_family(*f);
    } catch (const InvalidArgument& e) {
      throw ParseError(std::string(source), e.what());
    }
  }
  const double n = header_number(h, "N", source);
  if (!(n >= 1.0) || n != std::floor(n)) {
    throw ParseError(std::string(source), fmt::format("header N={} is not a positive integer", n));
  }
  m.n_pulses = static_cast<long>(n);
  m.b0 = units::gauss_to_tesla(header_number(h, "B0_G", source));
  return m;
}

void metadata_to_header(const pipeline::TraceMetadata& meta, CsvHeader& h) {
  if (!meta.id.empty()) h.set("id", meta.id);
  if (!meta.sample_id.empty()) h.set("sample_id", meta.sample_id);
  if (!meta.nv_id.empty()) h.set("nv_id", meta.nv_id);
  h.set("family", std::string(to_string(meta.family)));
  h.set("N", fmt::format("{}", meta.n_pulses));
  h.set("B0_G", format_double(units::tesla_to_gauss(meta.b0)));
}

pipeline::ContrastTrace contrast_trace_from_csv(const CsvTable& table, std::string_view source) {
  pipeline::ContrastTrace t;
  const auto kind = detect_trace_kind(table);
  if (kind == TraceFileKind::Raw) throw ParseError(std::string(source), "expected a contrast trace, got raw counts");
  t.stage = kind == TraceFileKind::Signal ? pipeline::TraceStage::Signal : pipeline::TraceStage::Normalized;
  t.meta = metadata_from_header(table.header, source);
  const TauColumn tau = find_tau(table, source);
  auto value = table.column("contrast");
  if (!value) value = table.column("signal");
  if (!value) throw ParseError(std::string(source), "no contrast column (expected contrast or signal)");
  const auto sigma = table.column("sigma");
  for (const auto& row : table.rows) {
    t.tau.push_back(to_seconds(row[tau.index], tau));
    t.value.push_back(row[*value]);
    if (sigma) t.sigma.push_back(row[*sigma]);
  }
  validate_as_parse(t, source);
  return t;
}

pipeline::RawTrace raw_trace_from_csv(const CsvTable& table, std::string_view source) {
  pipeline::RawTrace t;
  t.meta = metadata_from_header(table.header, source);
  const TauColumn tau = find_tau(table, source);
  const auto f0 = table.column("f0");
  const auto f1 = table.column("f1");
  if (!f0 || !f1) throw ParseError(std::string(source), "raw trace needs f0 and f1 columns");
  const auto reps = table.column("repetitions");
  for (const auto& row : table.rows) {
    t.tau.push_back(to_seconds(row[tau.index], tau));
    t.f0.push_back(row[*f0]);
    t.f1.push_back(row[*f1]);
    if (reps) t.repetitions.push_back(row[*reps]);
  }
  validate_as_parse(t, source);
  return t;
}

CsvTable contrast_trace_to_csv(const pipeline::ContrastTrace& trace) {
  CsvTable t;
  t.header.set("nvnmr_csv_version", std::string(kCsvVersion));
  t.header.set("kind", std::string(pipeline::to_string(trace.stage)));
  metadata_to_header(trace.meta, t.header);
  t.columns = {"tau_s", trace.stage == pipeline::TraceStage::Signal ? "signal" : "contrast"};
  if (trace.has_sigma()) t.columns.emplace_back("sigma");
  for (std::size_t i = 0; i < trace.size(); ++i) {
    std::vector<double> row{trace.tau[i], trace.value[i]};
    if (trace.has_sigma()) row.push_back(trace.sigma[i]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable raw_trace_to_csv(const pipeline::RawTrace& trace) {
  CsvTable t;
  t.header.set("nvnmr_csv_version", std::string(kCsvVersion));
  t.header.set("kind", "raw");
  metadata_to_header(trace.meta, t.header);
  t.columns = {"tau_s", "f0", "f1"};
  if (!trace.repetitions.empty()) t.columns.emplace_back("repetitions");
  for (std::size_t i = 0; i < trace.size(); ++i) {
    std::vector<double> row{trace.tau[i], trace.f0[i], trace.f1[i]};
    if (!trace.repetitions.empty()) row.push_back(trace.repetitions[i]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace nvnmr::io
