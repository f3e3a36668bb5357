#pragma once

#include <cstddef>
#include <optional>

#include "nvnmr/pipeline/trace.hpp"

namespace nvnmr::pipeline {

/// (F0 - F1) / (F0 + F1) per row with shot-noise sigma
/// 2 sqrt(F0^2 F1 + F1^2 F0) / (F0 + F1)^2, divided by sqrt(repetitions) when
/// given. A zero count is raised to one in the sigma formula so sigma stays
/// positive.
ContrastTrace to_signal_contrast(const RawTrace& raw);

/// Stretched-exponential decay A exp[-(N tau / T2)^p].
struct BackgroundFit {
  double amplitude = 1.0;
  double t2 = 0.0;  // s
  double p = 1.0;
  double window_lo = 0.0;  // excluded tau interval, s
  double window_hi = 0.0;
  bool auto_window = true;
  std::size_t points_used = 0;
  double chi2 = 0.0;
  long n_pulses = 0;

  double operator()(double tau) const;
};

struct BackgroundOptions {
  /// Half-width of the excluded window around the dip; empty selects
  /// max(3 grid steps, 4 dip_guess / N).
  std::optional<double> window_half_width;
  std::size_t min_points = 6;
};

struct NormalizationResult {
  ContrastTrace normalized;
  BackgroundFit background;
};

/// Fits the background to rows outside the dip window and divides it out.
/// Throws InvalidArgument when dip_guess lies outside the tau range or the
/// trace has no pulse count, FitError with fewer than `min_points` rows
/// outside the window or when no start converges.
NormalizationResult normalize_background(const ContrastTrace& signal, double dip_guess,
                                         const BackgroundOptions& opts = {});

/// Median spacing of a strictly increasing grid.
double median_step(const std::vector<double>& tau);

}  // namespace nvnmr::pipeline
