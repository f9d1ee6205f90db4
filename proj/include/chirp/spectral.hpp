#pragma once

#include <complex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "chirp/ramsey.hpp"

namespace chirp {

struct Window {
  enum class Kind { none, exponential };
  Kind kind = Kind::none;
  double tau_ns = 0.0;  // decay constant of the exponential apodization

  static Window none() { return {}; }
  static Window exponential(double tau_ns) { return {Kind::exponential, tau_ns}; }
};

std::string to_string(Window::Kind k);
std::string to_string(const Window& w);

/// One-sided spectrum of a real fringe on [0, 1/(2 dt1)]. Values are the raw
/// (unnormalized) DFT of the mean-removed, windowed, zero-padded record.
struct Spectrum {
  std::vector<double> freq_mhz;
  std::vector<std::complex<double>> values;
  double dt1_ns = 0.0;
  std::size_t n_samples = 0;  // before zero padding
  int zero_pad = 1;
  Window window;
  std::string source;

  std::size_t size() const { return values.size(); }
  double native_bin_mhz() const { return 1000.0 / (static_cast<double>(n_samples) * dt1_ns); }
  double bin_mhz() const { return native_bin_mhz() / zero_pad; }
  double nyquist_mhz() const { return 500.0 / dt1_ns; }
  std::size_t nearest_bin(double f_mhz) const;
  std::vector<double> real() const;
  std::vector<double> imag() const;
  std::vector<double> magnitude() const;
  /// Complex value at f, linearly interpolated between bins.
  std::complex<double> at(double f_mhz) const;
};

/// Requires at least 8 samples and zero_pad >= 1.
Spectrum fft_spectrum(std::span<const double> samples, double dt1_ns, Window window = {},
                      int zero_pad = 4, std::string source = {});
Spectrum fft_spectrum(const FringeRecord& record, Window window = {}, int zero_pad = 4);

/// Binwise (a + b, a - b). Throws std::invalid_argument on mismatched axes.
std::pair<Spectrum, Spectrum> phase_cycle_combine(const Spectrum& a, const Spectrum& b);

enum class PeakClass { sq, dq, zq, unknown };
std::string to_string(PeakClass c);

struct Peak {
  double freq_mhz;
  std::complex<double> amplitude;
  double abs_amp;
  PeakClass cls = PeakClass::unknown;
};

using PeakList = std::vector<Peak>;

/// Local maxima of |X| above threshold * max|X|, refined by a parabola
/// through the three top bins, kept greedily by height with at least
/// min_separation between accepted peaks. Sorted by frequency.
PeakList find_peaks(const Spectrum& spec, double threshold, double min_separation_mhz);

/// Fraction of the pair's energy at f that changes sign under alpha -> alpha + pi:
/// |a - b|^2 / (|a - b|^2 + |a + b|^2).
double flip_fraction(std::complex<double> a, std::complex<double> b);

/// Sign flip under alpha -> alpha + pi marks SQ, invariance DQ; flip
/// fractions inside (dead_lo, dead_hi) are left unknown.
PeakList classify_peaks(const PeakList& peaks, const Spectrum& at_alpha,
                        const Spectrum& at_alpha_plus_pi, double dead_lo = 0.3,
                        double dead_hi = 0.7);

/// Labels by the frequency slope under a change of the axial Larmor
/// frequency: |slope| near 1 is SQ, near 2 DQ, near 0 ZQ. Each base peak is
/// matched to the nearest perturbed peak within max_shift_mhz.
PeakList classify_by_field_slope(const PeakList& base, const PeakList& perturbed,
                                 double delta_omega0_mhz, double max_shift_mhz,
                                 double slope_tolerance = 0.25);

/// Full width at half maximum (MHz) of the power spectrum |X|^2 around the
/// peak nearest f, with linear interpolation of the half-height crossings.
double power_fwhm_mhz(const Spectrum& spec, double f_mhz);

}  // namespace chirp
