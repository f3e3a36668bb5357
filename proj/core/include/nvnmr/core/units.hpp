#pragma once

// Boundary unit conversions. Everything inside the library is SI
// (m, s, T, rad/s); these are the only places nm / us / ns / G / kHz appear.

#include <numbers>

namespace nvnmr::units {

inline constexpr double kNanometre = 1e-9;
inline constexpr double kMicrosecond = 1e-6;
inline constexpr double kNanosecond = 1e-9;
inline constexpr double kGauss = 1e-4;
inline constexpr double kPerCubicNanometre = 1e27;

// Scaling is written as division by the exact decimal power so that the
// inverse is a multiplication by the same power; a round trip is within 1 ulp.
constexpr double nm_to_m(double nm) { return nm / 1e9; }
constexpr double m_to_nm(double m) { return m * 1e9; }
constexpr double us_to_s(double us) { return us / 1e6; }
constexpr double s_to_us(double s) { return s * 1e6; }
constexpr double ns_to_s(double ns) { return ns / 1e9; }
constexpr double s_to_ns(double s) { return s * 1e9; }
constexpr double gauss_to_tesla(double g) { return g / 1e4; }
constexpr double tesla_to_gauss(double t) { return t * 1e4; }
constexpr double hz_to_khz(double hz) { return hz / 1e3; }
constexpr double khz_to_hz(double khz) { return khz * 1e3; }
constexpr double per_nm3_to_per_m3(double n) { return n * 1e27; }
constexpr double per_m3_to_per_nm3(double n) { return n / 1e27; }
constexpr double cst_to_m2_per_s(double cst) { return cst / 1e6; }

constexpr double deg_to_rad(double deg) { return deg * (std::numbers::pi / 180.0); }
constexpr double rad_to_deg(double rad) { return rad * (180.0 / std::numbers::pi); }

}  // namespace nvnmr::units
