#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace nvnmr::pipeline {

struct DepthValue {
  double value = 0.0;
  double sigma = 0.0;
};

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
};

struct CohortStats {
  std::size_t n = 0;
  double mean = 0.0;
  double std_dev = 0.0;  // sample standard deviation (n - 1)
  std::vector<HistogramBin> bins;
};

struct HistogramOptions {
  double bin_width = 2.0;
  double origin = 0.0;
};

/// Mean, n-1 standard deviation and fixed-width histogram of the values.
/// Units are those of the input. Throws InvalidArgument for n < 2 or a
/// non-positive bin width.
CohortStats cohort_stats(std::span<const DepthValue> depths, const HistogramOptions& opts = {});
CohortStats cohort_stats(std::span<const double> values, const HistogramOptions& opts = {});

/// Value with its 1-sigma uncertainty in the last digit, e.g. 10.4(7) or
/// 9(1). sigma is rounded to one significant digit; a non-positive sigma
/// prints the value with `fallback_decimals`.
std::string format_with_uncertainty(double value, double sigma, int fallback_decimals = 1);

}  // namespace nvnmr::pipeline
