#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nvnmr/core/constants.hpp"

namespace nvnmr {

/// NV axis tilt for a {100}-oriented surface, atan(sqrt 2) = 54.7356 deg.
inline const double kAlpha100 = std::atan(std::numbers::sqrt2);

/// A single NV center: depth below the diamond surface and the angle between
/// its axis (also the quantization and B0 axis) and the surface normal.
class NvCenter {
 public:
  /// Throws InvalidArgument unless depth > 0 (finite) and 0 <= alpha <= pi/2.
  NvCenter(double depth_m, double alpha_rad);

  static NvCenter from_nm(double depth_nm, double alpha_rad = kAlpha100);

  double depth() const noexcept { return depth_; }
  double alpha() const noexcept { return alpha_; }

  NvCenter with_depth(double depth_m) const { return {depth_m, alpha_}; }

 private:
  double depth_;
  double alpha_;
};

struct SemiInfinite {
  bool operator==(const SemiInfinite&) const = default;
};

/// Sample layer between heights z1 < z2 above the surface (metres).
struct Slab {
  double z1 = 0.0;
  double z2 = 0.0;
  bool operator==(const Slab&) const = default;
};

using SampleGeometry = std::variant<SemiInfinite, Slab>;

/// Throws InvalidArgument for a slab with z1 < 0, z2 <= z1 or non-finite bounds.
void validate_geometry(const SampleGeometry& g);

/// Nuclear dephasing time T2n*, either a finite duration or the infinite limit.
class DephasingTime {
 public:
  static DephasingTime infinite() noexcept { return DephasingTime{}; }
  /// Throws InvalidArgument unless seconds > 0 and finite.
  static DephasingTime finite(double seconds);

  bool is_infinite() const noexcept { return !seconds_.has_value(); }
  /// Seconds; +inf for the infinite limit.
  double seconds() const noexcept {
    return seconds_ ? *seconds_ : std::numeric_limits<double>::infinity();
  }
  bool operator==(const DephasingTime&) const = default;

 private:
  DephasingTime() = default;
  std::optional<double> seconds_;
};

/// Nuclear spin sample on the diamond surface. Only spin-1/2 nuclei are
/// modelled (high-temperature limit).
class NuclearSample {
 public:
  struct Params {
    double rho = 0.0;                         // spins per m^3
    double gamma_n = kProtonGammaDefault;     // rad s^-1 T^-1
    double spin = 0.5;
    DephasingTime t2n_star = DephasingTime::infinite();
    SampleGeometry geometry = SemiInfinite{};
  };

  /// Throws InvalidArgument on rho < 0, gamma_n <= 0, spin != 1/2 or an
  /// invalid geometry.
  explicit NuclearSample(const Params& p);

  /// Proton immersion oil, rho = 68 nm^-3.
  static NuclearSample immersion_oil(DephasingTime t2n = DephasingTime::infinite());

  double rho() const noexcept { return p_.rho; }
  double gamma_n() const noexcept { return p_.gamma_n; }
  static constexpr double spin() noexcept { return 0.5; }
  const DephasingTime& t2n_star() const noexcept { return p_.t2n_star; }
  const SampleGeometry& geometry() const noexcept { return p_.geometry; }
  const Params& params() const noexcept { return p_; }

  NuclearSample with_rho(double rho) const;
  NuclearSample with_t2n_star(DephasingTime t) const;

 private:
  Params p_;
};

enum class PulseFamily { XY8, CPMG };

std::string_view to_string(PulseFamily f) noexcept;
/// Accepts "XY8"/"xy8"/"CPMG"/"cpmg"; throws InvalidArgument otherwise.
PulseFamily parse_pulse_family(std::string_view s);

enum class Validation { Strict, WarnAndAccept };

/// Dynamical-decoupling sequence: family, pi-pulse count and the grid of
/// free-precession times tau (s).
class PulseSequence {
 public:
  /// Throws InvalidArgument when N < 1 or the grid is not strictly positive and
  /// strictly increasing. An XY8 count that is not a multiple of 8 throws in
  /// Strict mode and is recorded in `warnings()` otherwise.
  PulseSequence(PulseFamily family, long n_pulses, std::vector<double> tau_grid,
                Validation mode = Validation::Strict);

  PulseFamily family() const noexcept { return family_; }
  long n_pulses() const noexcept { return n_; }
  const std::vector<double>& tau_grid() const noexcept { return tau_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

 private:
  PulseFamily family_;
  long n_;
  std::vector<double> tau_;
  std::vector<std::string> warnings_;
};

/// Static bias field magnitude along the NV axis (tesla).
class StaticField {
 public:
  /// Throws InvalidArgument for negative or non-finite b0. Zero is accepted.
  explicit StaticField(double b0_tesla);
  static StaticField from_gauss(double gauss);

  double tesla() const noexcept { return b0_; }

 private:
  double b0_;
};

/// Nuclear Larmor angular frequency gamma_n * B0 (rad/s).
inline double larmor_frequency(const NuclearSample& sample, const StaticField& field) noexcept {
  return sample.gamma_n() * field.tesla();
}

}  // namespace nvnmr
