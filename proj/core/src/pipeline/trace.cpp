#include "nvnmr/pipeline/trace.hpp"

#include <cmath>

#include <fmt/format.h>

#include "nvnmr/core/error.hpp"

namespace nvnmr::pipeline {

namespace {

void check_tau(const std::vector<double>& tau) {
  for (std::size_t i = 0; i < tau.size(); ++i) {
    if (!(tau[i] > 0.0) || !std::isfinite(tau[i])) {
      throw InvalidArgument(fmt::format("row {}: tau must be positive and finite, got {}", i, tau[i]));
    }
    if (i > 0 && !(tau[i] > tau[i - 1])) {
      throw InvalidArgument(fmt::format("row {}: tau must be strictly increasing", i));
    }
  }
}

}  // namespace

void RawTrace::validate() const {
  const std::size_t n = tau.size();
  if (f0.size() != n || f1.size() != n || (!repetitions.empty() && repetitions.size() != n)) {
    throw InvalidArgument("raw trace columns have different lengths");
  }
  check_tau(tau);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(f0[i] >= 0.0) || !(f1[i] >= 0.0) || !std::isfinite(f0[i]) || !std::isfinite(f1[i])) {
      throw InvalidArgument(fmt::format("row {}: counts must be finite and >= 0", i));
    }
    if (!(f0[i] + f1[i] > 0.0)) throw InvalidArgument(fmt::format("row {}: F0 + F1 is zero", i));
    if (!repetitions.empty() && !(repetitions[i] > 0.0)) {
      throw InvalidArgument(fmt::format("row {}: repetitions must be > 0", i));
    }
  }
}

std::string_view to_string(TraceStage s) noexcept {
  return s == TraceStage::Signal ? "signal" : "normalized";
}

void ContrastTrace::validate() const {
  const std::size_t n = tau.size();
  if (value.size() != n || (!sigma.empty() && sigma.size() != n)) {
    throw InvalidArgument("trace columns have different lengths");
  }
  check_tau(tau);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(value[i])) throw InvalidArgument(fmt::format("row {}: value is not finite", i));
    if (!sigma.empty() && (!(sigma[i] > 0.0) || !std::isfinite(sigma[i]))) {
      throw InvalidArgument(fmt::format("row {}: sigma must be positive, got {}", i, sigma[i]));
    }
  }
}

}  // namespace nvnmr::pipeline
