#pragma once
// Generated by tests/oracles/generate_frozen.py (mpmath, 50 digits). Do not edit.

namespace nvnmr::frozen {

inline constexpr double kLarmor197G = 5279600.0;  // rad/s
inline constexpr double kLarmor1609G = 43121200.0;  // rad/s
inline constexpr double kGammaTildeAlpha0D3 = 3.2320912073969066239e+24;  // m^-3
inline constexpr double kGammaTildeAlpha100D3 = 2.6934093394974221866e+24;  // m^-3
inline constexpr double kGammaTildeAlpha0D10 = 8.7266462599716478846e+22;  // m^-3
inline constexpr double kGammaTildeAlpha100D10 = 7.2722052166430399038e+22;  // m^-3
inline constexpr double kGammaTildeAlpha0D30 = 3.2320912073969066239e+21;  // m^-3
inline constexpr double kGammaTildeAlpha100D30 = 2.6934093394974221866e+21;  // m^-3
inline constexpr double kGammaTildeAlpha100D10Integral = 7.2722052166430399038e+22;  // m^-3, direct quadrature
inline constexpr double kGammaTildeAlpha30D7Integral = 2.4845817750010385969e+23;  // m^-3, direct quadrature
inline constexpr double kGammaTildeSlabAlpha100D10Z2Z7 = 2.7282556312014329535e+22;  // m^-3, slab [2, 7] nm
inline constexpr double kBrmsSqRho68D10 = 8.8874969842538459576e-14;  // T^2
inline constexpr double kBrmsRho68D10 = 2.9811905313572036028e-7;  // T
inline constexpr double kKInfN64Tau596 = 1.4411338738102651861e-9;  // s^2
inline constexpr double kKFiniteCase0 = 8.3980634823989083323e-10;  // s^2, N=64 tau=5.96e-7 T2=2.0e-5
inline constexpr double kKFiniteIntegralCase0 = 8.3980634826428756682e-10;  // s^2, Lorentzian quadrature
inline constexpr double kKFiniteCase1 = 1.3703242458608426961e-10;  // s^2, N=32 tau=5.9e-7 T2=5.0e-6
inline constexpr double kKFiniteIntegralCase1 = 1.3703242457212521901e-10;  // s^2, Lorentzian quadrature
inline constexpr double kKFiniteCase2 = 8.7993375939142819955e-11;  // s^2, N=16 tau=6.0e-7 T2=0.0001
inline constexpr double kKFiniteIntegralCase2 = 8.7993375939250355467e-11;  // s^2, Lorentzian quadrature
inline constexpr double kKFiniteCase3 = 3.8786148555093831169e-11;  // s^2, N=128 tau=7.29e-8 T2=3.0e-6
inline constexpr double kKFiniteIntegralCase3 = 3.8786148560333029841e-11;  // s^2, Lorentzian quadrature
inline constexpr double kKFiniteResonanceNtauEqT2OverT2Sq = 0.73575888234288464319;  // 2 (e^-1 + 1 - 1)
inline constexpr double kKFiniteRatioT2Is1e4Ntau = 0.99996666749998333361;  // k_finite/k_infinite on resonance
inline constexpr double kContrastD10N64 = 0.44496922663179995646;  // d=10 nm, N=64, tau=pi/wL
inline constexpr double kDipPosition197G = 5.9499860863443053759e-7;  // s
inline constexpr double kDipPosition1609G = 7.2890780825749263073e-8;  // s
inline constexpr double kFilterDirectN16W105 = 2.2616091790100264666e-11;  // s^2, omega = 1.05 pi/tau, tau = 600 ns
inline constexpr double kFilterAllKN16W105 = 2.2616091790100264666e-11;  // s^2
inline constexpr double kFilterDirectN8W093 = 6.5919127883282992359e-12;  // s^2, omega = 0.93 pi/tau
inline constexpr double kEtaOil = 0.405;  // Pa s
inline constexpr double kDiffusionOil293K = 5.2990102153325502557e-13;  // m^2/s
inline constexpr double kTauD10nm = 0.0004;  // s
inline constexpr double kTauD4nm = 0.000064;  // s
inline constexpr double kFwhm10nmNumeric = 5000.0;  // Hz
inline constexpr double kFwhm4nmNumeric = 31250.0;  // Hz
inline constexpr double kSingleSpinGammaTermUz1OverSqrt2R10 = 1.9969257554234996816e-18;  // T^2, D^2 uz^2 (1 - uz^2)
inline constexpr double kPseudospinDipN16 = 0.0018407339109780232293;  // kappa=2e4, azz=1.5e4, wL=5.28e6
inline constexpr double kPseudospinDipN15 = 0.0016183769481457412256;  // odd N
inline constexpr double kPseudospinDipStrongN8 = 0.63683178241905742703;  // strong coupling
inline constexpr double kSampleAMean = 10.5;  // nm
inline constexpr double kSampleAStd = 2.8209927330640183696;  // nm, n-1
inline constexpr double kSampleCMean = 8.5;  // nm
inline constexpr double kSampleCStd = 2.733739807175023256;  // nm, n-1

}  // namespace nvnmr::frozen
