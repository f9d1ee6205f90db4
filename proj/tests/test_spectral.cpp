#include <doctest.h>

#include <cmath>
#include <numeric>

#include "chirp/spectral.hpp"
#include "chirp/units.hpp"

using namespace chirp;

namespace {

std::vector<double> tones(std::size_t n, double dt, std::initializer_list<std::pair<double, double>> f_amp,
                          double decay_ns = 0.0) {
  std::vector<double> s(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = dt * static_cast<double>(i);
    const double env = decay_ns > 0.0 ? std::exp(-t / decay_ns) : 1.0;
    for (auto [f, a] : f_amp) s[i] += a * env * std::cos(mhz_to_angular(f * t));
  }
  return s;
}

}  // namespace

TEST_CASE("axis: Nyquist edge and bin spacing") {
  const Spectrum s = fft_spectrum(tones(2500, 2.0, {{10.0, 1.0}}), 2.0, {}, 4);
  CHECK(s.nyquist_mhz() == doctest::Approx(250.0));
  CHECK(s.freq_mhz.back() == doctest::Approx(250.0));
  CHECK(s.native_bin_mhz() == doctest::Approx(0.2));
  CHECK(s.bin_mhz() == doctest::Approx(0.05));
  const Spectrum s1 = fft_spectrum(tones(5000, 1.0, {{10.0, 1.0}}), 1.0, {}, 1);
  CHECK(s1.freq_mhz.back() == doctest::Approx(500.0));
  CHECK(s1.native_bin_mhz() == doctest::Approx(0.2));
}

TEST_CASE("a pure cosine yields one peak") {
  const Spectrum s = fft_spectrum(tones(2500, 2.0, {{146.0, 1.0}}), 2.0);
  const PeakList p = find_peaks(s, 0.5, 1.0);
  REQUIRE(p.size() == 1);
  CHECK(std::abs(p[0].freq_mhz - 146.0) <= s.native_bin_mhz());
}

TEST_CASE("mean is removed before the transform") {
  std::vector<double> s = tones(64, 1.0, {{100.0, 1.0}});
  for (double& x : s) x += 5.0;
  const Spectrum spec = fft_spectrum(s, 1.0, {}, 1);
  CHECK(std::abs(spec.values[0]) < 1e-12);
}

TEST_CASE("Parseval with one-sided weights") {
  for (std::size_t n : {2500u, 2501u}) {
    CAPTURE(n);
    const std::vector<double> x = tones(n, 2.0, {{8.5, 0.4}, {146.0, 0.7}, {154.5, 0.2}}, 900.0);
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    double time_power = 0.0;
    for (double v : x) time_power += (v - mean) * (v - mean);
    const Spectrum s = fft_spectrum(x, 2.0, {}, 1);
    double freq_power = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
      const bool unpaired = k == 0 || (n % 2 == 0 && k == n / 2);
      freq_power += (unpaired ? 1.0 : 2.0) * std::norm(s.values[k]);
    }
    CHECK(std::abs(freq_power / static_cast<double>(n) - time_power) <= 1e-9 * time_power);
  }
}

TEST_CASE("sum and difference reconstruct the originals") {
  const Spectrum a = fft_spectrum(tones(1000, 2.0, {{20.0, 1.0}, {70.0, 0.5}}), 2.0);
  const Spectrum b = fft_spectrum(tones(1000, 2.0, {{20.0, -1.0}, {70.0, 0.5}}), 2.0);
  const auto [sum, diff] = phase_cycle_combine(a, b);
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    worst = std::max(worst, std::abs(sum.values[k] + diff.values[k] - 2.0 * a.values[k]));
    worst = std::max(worst, std::abs(sum.values[k] - diff.values[k] - 2.0 * b.values[k]));
  }
  CHECK(worst < 1e-9);
  CHECK(std::abs(sum.values[sum.nearest_bin(20.0)]) < 1e-9);
  CHECK(std::abs(diff.values[diff.nearest_bin(70.0)]) < 1e-9);
}

TEST_CASE("phase_cycle_combine rejects mismatched axes") {
  const Spectrum a = fft_spectrum(tones(1000, 2.0, {{20.0, 1.0}}), 2.0);
  CHECK_THROWS_AS(phase_cycle_combine(a, fft_spectrum(tones(1000, 1.0, {{20.0, 1.0}}), 1.0)), std::invalid_argument);
  CHECK_THROWS_AS(phase_cycle_combine(a, fft_spectrum(tones(1000, 2.0, {{20.0, 1.0}}), 2.0, {}, 2)),
                  std::invalid_argument);
  CHECK_THROWS_AS(phase_cycle_combine(a, fft_spectrum(tones(1000, 2.0, {{20.0, 1.0}}), 2.0, Window::exponential(500.0))),
                  std::invalid_argument);
}

TEST_CASE("peak positions are stable under zero padding") {
  const std::vector<double> x = tones(2500, 2.0, {{37.33, 1.0}, {146.07, 0.8}});
  const Spectrum ref = fft_spectrum(x, 2.0, {}, 1);
  const PeakList base = find_peaks(ref, 0.5, 1.0);
  REQUIRE(base.size() == 2);
  for (int pad : {2, 4, 8}) {
    const PeakList p = find_peaks(fft_spectrum(x, 2.0, {}, pad), 0.5, 1.0);
    REQUIRE(p.size() == 2);
    for (int i = 0; i < 2; ++i) CHECK(std::abs(p[i].freq_mhz - base[i].freq_mhz) <= 0.5 * ref.native_bin_mhz());
  }
}

TEST_CASE("parabolic refinement stays within half a bin of the top bin") {
  const Spectrum s = fft_spectrum(tones(500, 2.0, {{51.3, 1.0}}), 2.0, {}, 1);
  const PeakList p = find_peaks(s, 0.5, 1.0);
  REQUIRE(p.size() == 1);
  const double top = s.freq_mhz[s.nearest_bin(p[0].freq_mhz)];
  CHECK(std::abs(p[0].freq_mhz - top) <= 0.5 * s.bin_mhz() + 1e-12);
  CHECK(std::abs(p[0].freq_mhz - 51.3) < std::abs(top - 51.3) + 1e-12);
}

TEST_CASE("min_separation keeps the stronger of two close maxima") {
  const Spectrum s = fft_spectrum(tones(2500, 2.0, {{100.0, 1.0}, {101.0, 0.5}}), 2.0);
  CHECK(find_peaks(s, 0.2, 0.5).size() == 2);
  const PeakList merged = find_peaks(s, 0.2, 2.0);
  REQUIRE(merged.size() == 1);
  CHECK(merged[0].freq_mhz == doctest::Approx(100.0).epsilon(1e-3));
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(fft_spectrum(std::vector<double>(7, 0.0), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(fft_spectrum(std::vector<double>(16, 0.0), 1.0, {}, 0), std::invalid_argument);
  CHECK_THROWS_AS(fft_spectrum(std::vector<double>(16, 0.0), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(fft_spectrum(std::vector<double>(16, 0.0), 1.0, Window::exponential(0.0)), std::invalid_argument);
  const Spectrum s = fft_spectrum(tones(64, 1.0, {{100.0, 1.0}}), 1.0);
  CHECK_THROWS_AS(find_peaks(s, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(find_peaks(s, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("classification by sign flip under alpha + pi") {
  const auto a = fft_spectrum(tones(2000, 2.0, {{30.0, 1.0}, {90.0, 1.0}, {150.0, 1.0}}), 2.0);
  // 30 flips, 90 is invariant, 150 is half flipped (quadrature).
  std::vector<double> xb(2000);
  for (std::size_t i = 0; i < xb.size(); ++i) {
    const double t = 2.0 * static_cast<double>(i);
    xb[i] = -std::cos(mhz_to_angular(30.0 * t)) + std::cos(mhz_to_angular(90.0 * t)) +
            std::cos(mhz_to_angular(150.0 * t) + kPi / 2);
  }
  const auto b = fft_spectrum(xb, 2.0);
  const PeakList p = classify_peaks(find_peaks(a, 0.5, 1.0), a, b);
  REQUIRE(p.size() == 3);
  CHECK(p[0].cls == PeakClass::sq);
  CHECK(p[1].cls == PeakClass::dq);
  CHECK(p[2].cls == PeakClass::unknown);
  CHECK(flip_fraction({1.0, 0.0}, {-1.0, 0.0}) == doctest::Approx(1.0));
  CHECK(flip_fraction({1.0, 0.0}, {1.0, 0.0}) == doctest::Approx(0.0));
}

TEST_CASE("classification by field slope") {
  PeakList base{{50.0, {}, 1.0}, {100.0, {}, 1.0}, {126.5, {}, 1.0}, {180.0, {}, 1.0}};
  PeakList moved{{49.0, {}, 1.0}, {102.0, {}, 1.0}, {126.5, {}, 1.0}, {181.0, {}, 1.0}};
  const PeakList c = classify_by_field_slope(base, moved, 1.0, 3.0);
  CHECK(c[0].cls == PeakClass::sq);
  CHECK(c[1].cls == PeakClass::dq);
  CHECK(c[2].cls == PeakClass::zq);
  CHECK(c[3].cls == PeakClass::sq);
  const PeakList far = classify_by_field_slope(base, {{300.0, {}, 1.0}}, 1.0, 3.0);
  for (const auto& p : far) CHECK(p.cls == PeakClass::unknown);
  CHECK_THROWS_AS(classify_by_field_slope(base, moved, 0.0, 3.0), std::invalid_argument);
}

TEST_CASE("power-spectrum FWHM of a decaying cosine is 1/(pi T)") {
  for (double decay : {500.0, 1000.0}) {
    const Spectrum s = fft_spectrum(tones(5000, 2.0, {{80.0, 1.0}}, decay), 2.0, {}, 8);
    CHECK(power_fwhm_mhz(s, 80.0) == doctest::Approx(1000.0 / (kPi * decay)).epsilon(0.02));
  }
  // Exponential apodization adds its own rate.
  const Spectrum w = fft_spectrum(tones(5000, 2.0, {{80.0, 1.0}}, 1000.0), 2.0, Window::exponential(1000.0), 8);
  CHECK(power_fwhm_mhz(w, 80.0) == doctest::Approx(1000.0 / (kPi * 500.0)).epsilon(0.02));
}
