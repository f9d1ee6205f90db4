#include "chirp/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace chirp {

namespace {

// FFTW planning is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

std::string to_string(Window::Kind k) { return k == Window::Kind::none ? "none" : "exponential"; }

std::string to_string(const Window& w) {
  if (w.kind == Window::Kind::none) return "none";
  std::ostringstream os;
  os << "exponential(" << w.tau_ns << ")";
  return os.str();
}

std::string to_string(PeakClass c) {
  switch (c) {
    case PeakClass::sq: return "SQ";
    case PeakClass::dq: return "DQ";
    case PeakClass::zq: return "ZQ";
    case PeakClass::unknown: break;
  }
  return "unknown";
}

std::size_t Spectrum::nearest_bin(double f_mhz) const {
  const double k = std::round(f_mhz / bin_mhz());
  return static_cast<std::size_t>(std::clamp(k, 0.0, static_cast<double>(size() - 1)));
}

std::vector<double> Spectrum::real() const {
  std::vector<double> out(size());
  std::transform(values.begin(), values.end(), out.begin(), [](auto v) { return v.real(); });
  return out;
}

std::vector<double> Spectrum::imag() const {
  std::vector<double> out(size());
  std::transform(values.begin(), values.end(), out.begin(), [](auto v) { return v.imag(); });
  return out;
}

std::vector<double> Spectrum::magnitude() const {
  std::vector<double> out(size());
  std::transform(values.begin(), values.end(), out.begin(), [](auto v) { return std::abs(v); });
  return out;
}

std::complex<double> Spectrum::at(double f_mhz) const {
  const double x = std::clamp(f_mhz / bin_mhz(), 0.0, static_cast<double>(size() - 1));
  const auto k = static_cast<std::size_t>(std::floor(x));
  if (k + 1 >= size()) return values.back();
  const double frac = x - static_cast<double>(k);
  return (1.0 - frac) * values[k] + frac * values[k + 1];
}

Spectrum fft_spectrum(std::span<const double> samples, double dt1_ns, Window window, int zero_pad,
                      std::string source) {
  if (samples.size() < 8) throw std::invalid_argument("fft_spectrum: need at least 8 samples");
  if (zero_pad < 1) throw std::invalid_argument("fft_spectrum: zero_pad must be >= 1");
  if (!(dt1_ns > 0.0)) throw std::invalid_argument("fft_spectrum: dt1 must be positive");
  if (window.kind == Window::Kind::exponential && !(window.tau_ns > 0.0)) {
    throw std::invalid_argument("fft_spectrum: exponential window needs tau > 0");
  }

  const std::size_t n = samples.size();
  const std::size_t padded = n * static_cast<std::size_t>(zero_pad);
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(n);

  std::vector<double> in(padded, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double w = 1.0;
    if (window.kind == Window::Kind::exponential) w = std::exp(-static_cast<double>(i) * dt1_ns / window.tau_ns);
    in[i] = (samples[i] - mean) * w;
  }
  const std::size_t bins = padded / 2 + 1;
  std::vector<std::complex<double>> out(bins);

  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(padded), in.data(),
                                reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }

  Spectrum s;
  s.dt1_ns = dt1_ns;
  s.n_samples = n;
  s.zero_pad = zero_pad;
  s.window = window;
  s.source = std::move(source);
  s.values = std::move(out);
  s.freq_mhz.resize(bins);
  for (std::size_t k = 0; k < bins; ++k) s.freq_mhz[k] = static_cast<double>(k) * s.bin_mhz();
  return s;
}

Spectrum fft_spectrum(const FringeRecord& record, Window window, int zero_pad) {
  std::ostringstream id;
  id << to_string(record.meta.engine) << ":w_ref=" << record.meta.sequence.phase_law.w_ref_mhz
     << ":alpha=" << record.meta.sequence.phase_law.alpha_const_rad;
  return fft_spectrum(record.p0, record.dt1_ns(), window, zero_pad, id.str());
}

std::pair<Spectrum, Spectrum> phase_cycle_combine(const Spectrum& a, const Spectrum& b) {
  if (a.size() != b.size() || a.dt1_ns != b.dt1_ns || a.n_samples != b.n_samples ||
      a.zero_pad != b.zero_pad || a.window.kind != b.window.kind || a.window.tau_ns != b.window.tau_ns) {
    throw std::invalid_argument("phase_cycle_combine: spectra have different axes or windows");
  }
  Spectrum sum = a;
  Spectrum diff = a;
  for (std::size_t k = 0; k < a.size(); ++k) {
    sum.values[k] = a.values[k] + b.values[k];
    diff.values[k] = a.values[k] - b.values[k];
  }
  sum.source = "sum(" + a.source + "," + b.source + ")";
  diff.source = "diff(" + a.source + "," + b.source + ")";
  return {std::move(sum), std::move(diff)};
}

PeakList find_peaks(const Spectrum& spec, double threshold, double min_separation_mhz) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw std::invalid_argument("find_peaks: threshold must lie in (0, 1)");
  }
  const std::vector<double> mag = spec.magnitude();
  if (mag.size() < 3) return {};
  const double top = *std::max_element(mag.begin() + 1, mag.end());
  const double floor_level = threshold * top;

  PeakList candidates;
  for (std::size_t k = 1; k + 1 < mag.size(); ++k) {
    if (mag[k] < floor_level || mag[k] < mag[k - 1] || mag[k] <= mag[k + 1]) continue;
    const double y0 = mag[k - 1], y1 = mag[k], y2 = mag[k + 1];
    const double denom = y0 - 2.0 * y1 + y2;
    double delta = denom != 0.0 ? 0.5 * (y0 - y2) / denom : 0.0;
    delta = std::clamp(delta, -0.5, 0.5);
    const double height = y1 - 0.25 * (y0 - y2) * delta;
    candidates.push_back({(static_cast<double>(k) + delta) * spec.bin_mhz(), spec.values[k], height,
                          PeakClass::unknown});
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Peak& a, const Peak& b) { return a.abs_amp > b.abs_amp; });
  PeakList kept;
  for (const Peak& p : candidates) {
    const bool clear = std::none_of(kept.begin(), kept.end(), [&](const Peak& q) {
      return std::abs(q.freq_mhz - p.freq_mhz) < min_separation_mhz;
    });
    if (clear) kept.push_back(p);
  }
  std::sort(kept.begin(), kept.end(), [](const Peak& a, const Peak& b) { return a.freq_mhz < b.freq_mhz; });
  return kept;
}

double flip_fraction(std::complex<double> a, std::complex<double> b) {
  const double flip = std::norm(a - b);
  const double keep = std::norm(a + b);
  return flip + keep > 0.0 ? flip / (flip + keep) : 0.5;
}

PeakList classify_peaks(const PeakList& peaks, const Spectrum& at_alpha,
                        const Spectrum& at_alpha_plus_pi, double dead_lo, double dead_hi) {
  if (at_alpha.size() != at_alpha_plus_pi.size() || at_alpha.bin_mhz() != at_alpha_plus_pi.bin_mhz()) {
    throw std::invalid_argument("classify_peaks: spectra have different axes");
  }
  PeakList out = peaks;
  for (Peak& p : out) {
    const std::size_t k = at_alpha.nearest_bin(p.freq_mhz);
    const double f = flip_fraction(at_alpha.values[k], at_alpha_plus_pi.values[k]);
    if (f >= dead_hi) {
      p.cls = PeakClass::sq;
    } else if (f <= dead_lo) {
      p.cls = PeakClass::dq;
    } else {
      p.cls = PeakClass::unknown;
    }
  }
  return out;
}

PeakList classify_by_field_slope(const PeakList& base, const PeakList& perturbed,
                                 double delta_omega0_mhz, double max_shift_mhz,
                                 double slope_tolerance) {
  if (delta_omega0_mhz == 0.0) throw std::invalid_argument("classify_by_field_slope: zero field step");
  PeakList out = base;
  for (Peak& p : out) {
    p.cls = PeakClass::unknown;
    const Peak* best = nullptr;
    for (const Peak& q : perturbed) {
      const double shift = std::abs(q.freq_mhz - p.freq_mhz);
      if (shift <= max_shift_mhz && (!best || shift < std::abs(best->freq_mhz - p.freq_mhz))) best = &q;
    }
    if (!best) continue;
    const double slope = std::abs((best->freq_mhz - p.freq_mhz) / delta_omega0_mhz);
    if (std::abs(slope - 1.0) <= slope_tolerance) {
      p.cls = PeakClass::sq;
    } else if (std::abs(slope - 2.0) <= slope_tolerance) {
      p.cls = PeakClass::dq;
    } else if (slope <= slope_tolerance) {
      p.cls = PeakClass::zq;
    }
  }
  return out;
}

double power_fwhm_mhz(const Spectrum& spec, double f_mhz) {
  std::vector<double> power(spec.size());
  for (std::size_t k = 0; k < spec.size(); ++k) power[k] = std::norm(spec.values[k]);
  std::size_t k = spec.nearest_bin(f_mhz);
  while (k > 0 && power[k - 1] > power[k]) --k;
  while (k + 1 < power.size() && power[k + 1] > power[k]) ++k;
  const double half = 0.5 * power[k];
  std::size_t lo = k;
  while (lo > 0 && power[lo] > half) --lo;
  std::size_t hi = k;
  while (hi + 1 < power.size() && power[hi] > half) ++hi;
  if (power[lo] > half || power[hi] > half) {
    throw std::runtime_error("power_fwhm_mhz: half-height crossing outside the spectrum");
  }
  const double left = static_cast<double>(lo) + (half - power[lo]) / (power[lo + 1] - power[lo]);
  const double right = static_cast<double>(hi) - (half - power[hi]) / (power[hi - 1] - power[hi]);
  return (right - left) * spec.bin_mhz();
}

}  // namespace chirp
