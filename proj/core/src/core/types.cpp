#include "nvnmr/core/types.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <fmt/format.h>

#include "nvnmr/core/error.hpp"
#include "nvnmr/core/units.hpp"

namespace nvnmr {

PhysicalConstants::PhysicalConstants(const Values& v) : v_(v) {
  if (!(std::abs(v.gamma_e / 1.76e11 - 1.0) <= 0.005)) {
    throw InvalidArgument(fmt::format("gamma_e = {} rad/s/T is not within 0.5% of 1.76e11", v.gamma_e));
  }
  if (!(v.mu0_over_4pi > 0.0) || !(v.hbar > 0.0) || !(v.kB > 0.0)) {
    throw InvalidArgument("physical constants must be positive");
  }
}

const PhysicalConstants& PhysicalConstants::standard() {
  static const PhysicalConstants c;
  return c;
}

NvCenter::NvCenter(double depth_m, double alpha_rad) : depth_(depth_m), alpha_(alpha_rad) {
  if (!std::isfinite(depth_m) || !(depth_m > 0.0)) {
    throw InvalidArgument(fmt::format("NV depth must be positive and finite, got {} m", depth_m));
  }
  // A small tolerance admits pi/2 computed in degrees.
  if (!(alpha_rad >= 0.0) || !(alpha_rad <= std::numbers::pi / 2 + 1e-12)) {
    throw InvalidArgument(fmt::format("NV tilt alpha must lie in [0, pi/2], got {} rad", alpha_rad));
  }
}

NvCenter NvCenter::from_nm(double depth_nm, double alpha_rad) {
  return {units::nm_to_m(depth_nm), alpha_rad};
}

void validate_geometry(const SampleGeometry& g) {
  if (const auto* slab = std::get_if<Slab>(&g)) {
    if (!std::isfinite(slab->z1) || !(slab->z1 >= 0.0)) {
      throw InvalidArgument(fmt::format("slab z1 must be >= 0, got {}", slab->z1));
    }
    if (std::isnan(slab->z2) || !(slab->z2 > slab->z1)) {
      throw InvalidArgument(fmt::format("slab requires z2 > z1, got z1={} z2={}", slab->z1, slab->z2));
    }
  }
}

DephasingTime DephasingTime::finite(double seconds) {
  if (!std::isfinite(seconds) || !(seconds > 0.0)) {
    throw InvalidArgument(fmt::format("T2n* must be positive and finite, got {} s", seconds));
  }
  DephasingTime t;
  t.seconds_ = seconds;
  return t;
}

NuclearSample::NuclearSample(const Params& p) : p_(p) {
  if (!std::isfinite(p.rho) || p.rho < 0.0) {
    throw InvalidArgument(fmt::format("spin density must be >= 0, got {} m^-3", p.rho));
  }
  if (!std::isfinite(p.gamma_n) || !(p.gamma_n > 0.0)) {
    throw InvalidArgument(fmt::format("gamma_n must be positive, got {}", p.gamma_n));
  }
  if (p.spin != 0.5) {
    throw InvalidArgument(fmt::format("only spin-1/2 nuclei are supported, got I = {}", p.spin));
  }
  validate_geometry(p.geometry);
}

NuclearSample NuclearSample::immersion_oil(DephasingTime t2n) {
  Params p;
  p.rho = units::per_nm3_to_per_m3(68.0);
  p.t2n_star = t2n;
  return NuclearSample(p);
}

NuclearSample NuclearSample::with_rho(double rho) const {
  Params p = p_;
  p.rho = rho;
  return NuclearSample(p);
}

NuclearSample NuclearSample::with_t2n_star(DephasingTime t) const {
  Params p = p_;
  p.t2n_star = t;
  return NuclearSample(p);
}

std::string_view to_string(PulseFamily f) noexcept {
  switch (f) {
    case PulseFamily::XY8:
      return "XY8";
    case PulseFamily::CPMG:
      return "CPMG";
  }
  return "?";
}

PulseFamily parse_pulse_family(std::string_view s) {
  std::string up(s);
  std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return std::toupper(c); });
  if (up == "XY8") return PulseFamily::XY8;
  if (up == "CPMG") return PulseFamily::CPMG;
  throw InvalidArgument(fmt::format("unknown pulse family '{}' (expected XY8 or CPMG)", s));
}

PulseSequence::PulseSequence(PulseFamily family, long n_pulses, std::vector<double> tau_grid,
                             Validation mode)
    : family_(family), n_(n_pulses), tau_(std::move(tau_grid)) {
  if (n_ < 1) throw InvalidArgument(fmt::format("pulse count must be >= 1, got {}", n_));
  for (std::size_t i = 0; i < tau_.size(); ++i) {
    if (!std::isfinite(tau_[i]) || !(tau_[i] > 0.0)) {
      throw InvalidArgument(fmt::format("tau[{}] = {} s is not strictly positive", i, tau_[i]));
    }
    if (i > 0 && !(tau_[i] > tau_[i - 1])) {
      throw InvalidArgument(fmt::format("tau grid is not strictly increasing at index {}", i));
    }
  }
  if (family_ == PulseFamily::XY8 && n_ % 8 != 0) {
    auto msg = fmt::format("XY8 sequence with N = {} is not a multiple of 8", n_);
    if (mode == Validation::Strict) throw InvalidArgument(msg);
    warnings_.push_back(std::move(msg));
  }
}

StaticField::StaticField(double b0_tesla) : b0_(b0_tesla) {
  if (!std::isfinite(b0_tesla) || b0_tesla < 0.0) {
    throw InvalidArgument(fmt::format("static field must be >= 0 T, got {}", b0_tesla));
  }
}

StaticField StaticField::from_gauss(double gauss) { return StaticField(units::gauss_to_tesla(gauss)); }

}  // namespace nvnmr
