#pragma once

#include <numbers>

namespace chirp {

// Frequencies cross module boundaries in MHz and durations in ns. Internally
// every Hamiltonian is stored in angular units of rad/ns.
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Electron gyromagnetic ratio, MHz per gauss.
inline constexpr double kGammaElectronMhzPerGauss = 2.8025;

constexpr double mhz_to_angular(double mhz) { return kTwoPi * mhz * 1e-3; }
constexpr double angular_to_mhz(double rad_per_ns) { return rad_per_ns * 1e3 / kTwoPi; }

constexpr double larmor_mhz_from_gauss(double gauss) { return kGammaElectronMhzPerGauss * gauss; }
constexpr double gauss_from_larmor_mhz(double mhz) { return mhz / kGammaElectronMhzPerGauss; }

}  // namespace chirp
