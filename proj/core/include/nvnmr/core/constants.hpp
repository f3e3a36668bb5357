#pragma once

namespace nvnmr {

/// Physical constants used by the forward model. Immutable after construction.
///
/// The defaults are CODATA values, except `mu0_over_4pi`, which uses the
/// classical exact 1e-7 (the SI-2019 value differs by 5.5e-10 relative).
class PhysicalConstants {
 public:
  struct Values {
    double gamma_e = 1.76085963023e11;  // rad s^-1 T^-1
    double mu0_over_4pi = 1e-7;         // T m A^-1
    double hbar = 1.054571817e-34;      // J s
    double kB = 1.380649e-23;           // J K^-1
  };

  PhysicalConstants() : PhysicalConstants(Values{}) {}
  /// Throws InvalidArgument when gamma_e is not within 0.5% of 1.76e11 rad/s/T
  /// or any constant is non-positive.
  explicit PhysicalConstants(const Values& v);

  static const PhysicalConstants& standard();

  double gamma_e() const noexcept { return v_.gamma_e; }
  double mu0_over_4pi() const noexcept { return v_.mu0_over_4pi; }
  double hbar() const noexcept { return v_.hbar; }
  double kB() const noexcept { return v_.kB; }

  /// (mu0 * hbar * gamma_n / 4pi)^2, the squared point-dipole coupling
  /// prefactor in T^2 m^6.
  double dipolar_prefactor_sq(double gamma_n) const noexcept {
    const double c = v_.mu0_over_4pi * v_.hbar * gamma_n;
    return c * c;
  }

 private:
  Values v_;
};

/// Proton gyromagnetic ratio as used by the depth analysis (rad s^-1 T^-1).
inline constexpr double kProtonGammaDefault = 2.68e8;
/// CODATA 2018 proton gyromagnetic ratio, available as an override.
inline constexpr double kProtonGammaCodata = 2.6752218744e8;

}  // namespace nvnmr
