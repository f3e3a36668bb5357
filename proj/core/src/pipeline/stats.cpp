#include "nvnmr/pipeline/stats.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "nvnmr/core/error.hpp"
#include "nvnmr/detail/numeric.hpp"

namespace nvnmr::pipeline {

CohortStats cohort_stats(std::span<const double> values, const HistogramOptions& opts) {
  if (values.size() < 2) throw InvalidArgument("cohort statistics need at least two values");
  if (!(opts.bin_width > 0.0)) throw InvalidArgument("histogram bin width must be > 0");
  CohortStats out;
  out.n = values.size();
  detail::CompensatedSum sum;
  for (double v : values) {
    if (!std::isfinite(v)) throw InvalidArgument("cohort values must be finite");
    sum.add(v);
  }
  out.mean = sum.value() / static_cast<double>(out.n);
  detail::CompensatedSum sq;
  for (double v : values) sq.add((v - out.mean) * (v - out.mean));
  out.std_dev = std::sqrt(sq.value() / static_cast<double>(out.n - 1));

  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const auto first = static_cast<long>(std::floor((*lo_it - opts.origin) / opts.bin_width));
  const auto last = static_cast<long>(std::floor((*hi_it - opts.origin) / opts.bin_width));
  for (long b = first; b <= last; ++b) {
    out.bins.push_back({opts.origin + static_cast<double>(b) * opts.bin_width,
                        opts.origin + static_cast<double>(b + 1) * opts.bin_width, 0});
  }
  for (double v : values) {
    const auto b = static_cast<long>(std::floor((v - opts.origin) / opts.bin_width));
    ++out.bins[static_cast<std::size_t>(b - first)].count;
  }
  return out;
}

CohortStats cohort_stats(std::span<const DepthValue> depths, const HistogramOptions& opts) {
  std::vector<double> values;
  values.reserve(depths.size());
  for (const auto& d : depths) values.push_back(d.value);
  return cohort_stats(std::span<const double>(values), opts);
}

std::string format_with_uncertainty(double value, double sigma, int fallback_decimals) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) return fmt::format("{:.{}f}", value, fallback_decimals);
  int exponent = static_cast<int>(std::floor(std::log10(sigma)));
  double digit = std::round(sigma / std::pow(10.0, exponent));
  if (digit >= 10.0) {  // 0.96 rounds to 1.0
    ++exponent;
    digit = 1.0;
  }
  const int decimals = std::max(0, -exponent);
  if (exponent > 0) {
    // Uncertainty spans integer digits: print it in the value's units.
    const double unit = std::pow(10.0, exponent);
    return fmt::format("{:.0f}({:.0f})", std::round(value / unit) * unit, digit * unit);
  }
  return fmt::format("{:.{}f}({:.0f})", value, decimals, digit);
}

}  // namespace nvnmr::pipeline
