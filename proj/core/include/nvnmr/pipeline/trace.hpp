#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "nvnmr/core/types.hpp"

namespace nvnmr::pipeline {

/// Acquisition settings carried alongside a trace.
struct TraceMetadata {
  std::string id;
  std::string sample_id;
  std::string nv_id;
  PulseFamily family = PulseFamily::XY8;
  long n_pulses = 0;
  double b0 = 0.0;  // T
};

/// Paired fluorescence counts per tau: F0 and F1 read out after the two
/// final projections. `repetitions` is empty or one entry per row.
struct RawTrace {
  std::vector<double> tau;  // s
  std::vector<double> f0;
  std::vector<double> f1;
  std::vector<double> repetitions;
  TraceMetadata meta;

  std::size_t size() const noexcept { return tau.size(); }
  /// Throws InvalidArgument on ragged columns, non-increasing tau, negative
  /// counts, F0 + F1 == 0 or non-positive repetitions.
  void validate() const;
};

enum class TraceStage { Signal, Normalized };

std::string_view to_string(TraceStage s) noexcept;

/// (tau, value, sigma) rows at the signal-contrast or normalized stage.
/// `sigma` may be empty, meaning unknown (unit weights in fits).
struct ContrastTrace {
  TraceStage stage = TraceStage::Normalized;
  std::vector<double> tau;    // s
  std::vector<double> value;
  std::vector<double> sigma;
  TraceMetadata meta;

  std::size_t size() const noexcept { return tau.size(); }
  bool has_sigma() const noexcept { return !sigma.empty(); }
  /// Throws InvalidArgument on ragged columns, non-increasing or
  /// non-positive tau, non-finite values or sigma <= 0.
  void validate() const;
};

}  // namespace nvnmr::pipeline
