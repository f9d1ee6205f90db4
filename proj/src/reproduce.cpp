#include "chirp/reproduce.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "chirp/ramsey.hpp"
#include "chirp/spectral.hpp"
#include "chirp/units.hpp"

namespace chirp {

namespace {

std::string fmt(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string fmt_list(const std::vector<double>& v, int digits = 2) {
  std::string out;
  for (double x : v) out += (out.empty() ? "" : ", ") + fmt(x, digits);
  return out;
}

/// Peak nearest `f` within `window_mhz`, or NaN.
double nearest_peak(const PeakList& peaks, double f, double window_mhz) {
  double best = std::nan("");
  for (const Peak& p : peaks) {
    if (std::abs(p.freq_mhz - f) <= window_mhz && (std::isnan(best) || std::abs(p.freq_mhz - f) < std::abs(best - f))) {
      best = p.freq_mhz;
    }
  }
  return best;
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

ChirpPulse calibrated(const SpinSystem& sys, ChirpPulse p) {
  p.rabi_mhz = calibrate_first_line(sys, p, 0.5).rabi_mhz;
  return p;
}

void bare_nv(ScenarioReport& rep, unsigned workers) {
  SpinSystem sys;
  sys.d_zfs_mhz = 2871.5;
  sys.omega0_mhz = 73.0;
  ChirpPulse pulse;
  pulse.w_start_mhz = 2770.0;
  pulse.w_bdw_mhz = 250.0;
  pulse.tau_p_ns = 120.0;
  pulse = calibrated(sys, pulse);

  RamseyOptions opts;
  opts.workers = workers;
  const RamseySimulator sim(sys, pulse, Engine::numeric, opts);
  RamseySequence seq;
  seq.pulse = pulse;
  seq.dt1_ns = 2.0;
  seq.n_points = 2500;

  const double bin = 1000.0 / (seq.dt1_ns * static_cast<double>(seq.n_points));
  std::vector<double> dq;
  for (double w_ref : {2790.0, 2770.0, 2750.0, 2730.0, 2710.0}) {
    seq.phase_law.w_ref_mhz = w_ref;
    const Spectrum spec = fft_spectrum(sim.run(seq));
    const PeakList peaks = find_peaks(spec, 0.1, 1.0);
    const double lo = std::abs(2798.5 - w_ref), hi = std::abs(2944.5 - w_ref);
    const double m_lo = nearest_peak(peaks, lo, 2.0), m_hi = nearest_peak(peaks, hi, 2.0);
    const double m_dq = nearest_peak(peaks, 146.0, 2.0);
    dq.push_back(m_dq);
    rep.results.push_back({"SQ lines at w_ref=" + fmt(w_ref, 1), fmt_list({m_lo, m_hi}),
                           fmt_list({lo, hi}) + " +/- " + fmt(bin, 1),
                           std::abs(m_lo - lo) <= bin && std::abs(m_hi - hi) <= bin});
    rep.results.push_back({"DQ line at w_ref=" + fmt(w_ref, 1), fmt(m_dq, 2), "146.00 +/- " + fmt(bin, 1),
                           std::abs(m_dq - 146.0) <= bin});
  }
  const auto [mn, mx] = std::minmax_element(dq.begin(), dq.end());
  rep.results.push_back({"DQ spread across w_ref", fmt(*mx - *mn, 3), "< " + fmt(bin, 1), *mx - *mn < bin});
}

void nitrogen(ScenarioReport& rep, unsigned workers) {
  SpinSystem sys;
  sys.d_zfs_mhz = 2870.0;
  sys.omega0_mhz = 157.5;
  sys.nuclei.push_back(NuclearSpin::n14(2.15));
  ChirpPulse pulse;
  pulse.w_start_mhz = 2630.0;
  pulse.w_bdw_mhz = 500.0;
  pulse.tau_p_ns = 50.0;
  pulse = calibrated(sys, pulse);

  RamseySequence seq;
  seq.pulse = pulse;
  seq.dt1_ns = 1.0;
  seq.n_points = 5000;
  seq.phase_law.w_ref_mhz = 2652.5;
  RamseyOptions opts;
  opts.workers = workers;
  const auto [ra, rb] = run_phase_pair(sys, seq, Engine::numeric, opts);
  const Spectrum a = fft_spectrum(ra), b = fft_spectrum(rb);
  const auto [sum, diff] = phase_cycle_combine(a, b);
  const double bin = a.native_bin_mhz();

  double sq_leak = 0.0, dq_leak = 0.0;
  bool flips = true;
  for (double centre : {60.0, 375.0}) {
    for (int m : {-1, 0, 1}) {
      const std::size_t k = diff.nearest_bin(centre + 2.15 * m);
      sq_leak = std::max(sq_leak, std::abs(sum.values[k]) / std::abs(diff.values[k]));
      flips = flips && a.values[k].real() * b.values[k].real() < 0.0;
    }
  }
  for (int m : {-1, 0, 1}) {
    const std::size_t k = sum.nearest_bin(315.0 + 4.3 * m);
    dq_leak = std::max(dq_leak, std::abs(diff.values[k]) / std::abs(sum.values[k]));
    flips = flips && a.values[k].real() * b.values[k].real() > 0.0;
  }
  rep.results.push_back({"SQ residual in sum / diff", fmt(sq_leak, 6), "<= 0.01", sq_leak <= 0.01});
  rep.results.push_back({"DQ residual in diff / sum", fmt(dq_leak, 6), "<= 0.01", dq_leak <= 0.01});
  rep.results.push_back({"real part: SQ flips, DQ keeps sign", flips ? "yes" : "no", "yes", flips});

  const PeakList sq_peaks = find_peaks(diff, 0.1, 1.0);
  const PeakList dq_peaks = find_peaks(sum, 0.1, 1.0);
  for (double centre : {60.0, 375.0}) {
    const double lo = nearest_peak(sq_peaks, centre - 2.15, 0.6), hi = nearest_peak(sq_peaks, centre + 2.15, 0.6);
    const double mid = nearest_peak(sq_peaks, centre, 0.6);
    const bool ok = std::abs(mid - lo - 2.15) <= bin && std::abs(hi - mid - 2.15) <= bin;
    rep.results.push_back({"14N SQ triplet near " + fmt(centre, 0), fmt_list({lo, mid, hi}),
                           "spacing 2.15 +/- " + fmt(bin, 1), ok});
  }
  const double lo = nearest_peak(dq_peaks, 315.0 - 4.3, 0.6), hi = nearest_peak(dq_peaks, 315.0 + 4.3, 0.6);
  const double mid = nearest_peak(dq_peaks, 315.0, 0.6);
  rep.results.push_back({"14N DQ triplet near 315", fmt_list({lo, mid, hi}), "spacing 4.30 +/- " + fmt(bin, 1),
                         std::abs(mid - lo - 4.3) <= bin && std::abs(hi - mid - 4.3) <= bin});
}

void bfield(ScenarioReport& rep, unsigned workers) {
  ChirpPulse base;
  base.w_start_mhz = 2650.8;
  base.w_bdw_mhz = 500.0;
  base.tau_p_ns = 50.0;
  RamseySequence seq;
  seq.dt1_ns = 1.0;
  seq.n_points = 5000;
  seq.phase_law.w_ref_mhz = 2670.8;
  RamseyOptions opts;
  opts.workers = workers;
  const double bin = 1000.0 / (seq.dt1_ns * static_cast<double>(seq.n_points));

  std::vector<double> omegas, splits, dqs;
  bool equal = true;
  for (double omega0 : {40.0, 60.0, 80.0, 100.0, 120.0}) {
    SpinSystem sys;
    sys.d_zfs_mhz = 2870.0;
    sys.omega0_mhz = omega0;
    seq.pulse = calibrated(sys, base);
    const PeakList peaks = find_peaks(fft_spectrum(run_ramsey(sys, seq, Engine::numeric, opts)), 0.1, 1.0);
    const double lo = nearest_peak(peaks, 2870.0 - omega0 - seq.phase_law.w_ref_mhz, 2.0);
    const double hi = nearest_peak(peaks, 2870.0 + omega0 - seq.phase_law.w_ref_mhz, 2.0);
    const double dq = nearest_peak(peaks, 2.0 * omega0, 2.0);
    omegas.push_back(omega0);
    splits.push_back(hi - lo);
    dqs.push_back(dq);
    const bool ok = std::abs(hi - lo - dq) <= bin;
    equal = equal && ok;
    rep.results.push_back({"SQ splitting = DQ at omega0=" + fmt(omega0, 0), fmt(hi - lo, 3) + " vs " + fmt(dq, 3),
                           "equal within " + fmt(bin, 1), ok});
  }
  const double s_split = slope(omegas, splits), s_dq = slope(omegas, dqs);
  rep.results.push_back({"SQ splitting slope", fmt(s_split, 4), "2.0 +/- 1%", std::abs(s_split - 2.0) <= 0.02});
  rep.results.push_back({"DQ slope", fmt(s_dq, 4), "2.0 +/- 1%", std::abs(s_dq - 2.0) <= 0.02});
}

void carbon(ScenarioReport& rep, unsigned workers) {
  SpinSystem sys;
  sys.d_zfs_mhz = 2870.0;
  sys.omega0_mhz = larmor_mhz_from_gauss(3.7);
  sys.nuclei = {NuclearSpin::c13(126.5), NuclearSpin::c13(6.55), NuclearSpin::n14(2.15)};
  ChirpPulse pulse;
  pulse.w_start_mhz = 2750.3;
  pulse.w_bdw_mhz = 250.0;
  pulse.tau_p_ns = 60.0;
  pulse = calibrated(sys, pulse);
  RamseySequence seq;
  seq.pulse = pulse;
  seq.dt1_ns = 2.0;
  seq.n_points = 2500;
  seq.phase_law.w_ref_mhz = 2770.0;
  RamseyOptions opts;
  opts.workers = workers;

  auto sq_peaks = [&](const SpinSystem& s) {
    const auto [ra, rb] = run_phase_pair(s, seq, Engine::numeric, opts);
    return find_peaks(phase_cycle_combine(fft_spectrum(ra), fft_spectrum(rb)).second, 0.25, 1.0);
  };
  const PeakList peaks = sq_peaks(sys);
  const double bin = 1000.0 / (seq.dt1_ns * static_cast<double>(seq.n_points));

  std::vector<std::vector<double>> groups;
  for (const Peak& p : peaks) {
    if (groups.empty() || p.freq_mhz - groups.back().back() > 5.0) groups.emplace_back();
    groups.back().push_back(p.freq_mhz);
  }
  std::vector<double> sizes, centres;
  for (const auto& g : groups) {
    sizes.push_back(static_cast<double>(g.size()));
    centres.push_back(std::accumulate(g.begin(), g.end(), 0.0) / static_cast<double>(g.size()));
  }
  const bool shape = groups.size() == 4 && std::all_of(sizes.begin(), sizes.end(), [](double n) { return n == 6; });
  rep.results.push_back({"SQ groups x lines", fmt_list(sizes, 0), "6, 6, 6, 6", shape});
  if (shape) {
    const double s1 = centres[2] - centres[0], s2 = centres[3] - centres[1];
    rep.results.push_back({"group-pair separation", fmt_list({s1, s2}, 3), "126.5 +/- " + fmt(bin, 1),
                           std::abs(s1 - 126.5) <= bin && std::abs(s2 - 126.5) <= bin});
  }

  SpinSystem full = sys;
  full.mode = CouplingMode::full;
  full.set_field_gauss(3.7 / std::cos(65.0 * kPi / 180.0), 65.0 * kPi / 180.0);
  full.nuclei[0].a_perp_mhz = 30.0;
  const PeakList full_peaks = sq_peaks(full);
  rep.results.push_back({"full-mode line count >= secular", std::to_string(full_peaks.size()) + " vs " +
                                                                   std::to_string(peaks.size()),
                         ">=", full_peaks.size() >= peaks.size()});
}

}  // namespace

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::bare_nv: return "bare_nv";
    case Scenario::nitrogen: return "nitrogen";
    case Scenario::carbon: return "carbon";
    case Scenario::bfield: break;
  }
  return "bfield";
}

Scenario parse_scenario(const std::string& name) {
  for (Scenario s : {Scenario::bare_nv, Scenario::nitrogen, Scenario::carbon, Scenario::bfield}) {
    if (to_string(s) == name) return s;
  }
  throw std::invalid_argument("unknown scenario '" + name + "' (expected bare_nv, nitrogen, carbon or bfield)");
}

bool ScenarioReport::passed() const {
  return !results.empty() && std::all_of(results.begin(), results.end(), [](const auto& r) { return r.pass; });
}

std::string ScenarioReport::text() const {
  std::ostringstream os;
  for (const auto& r : results) {
    os << (r.pass ? "PASS " : "FAIL ") << to_string(scenario) << ": " << r.name << ": measured " << r.measured
       << ", expected " << r.expected << '\n';
  }
  os << to_string(scenario) << ": " << (passed() ? "PASS" : "FAIL") << " (" << fmt(seconds, 2) << " s)\n";
  return os.str();
}

ScenarioReport reproduce(Scenario s, unsigned workers) {
  const auto t0 = std::chrono::steady_clock::now();
  ScenarioReport rep{s, {}, 0.0};
  switch (s) {
    case Scenario::bare_nv: bare_nv(rep, workers); break;
    case Scenario::nitrogen: nitrogen(rep, workers); break;
    case Scenario::carbon: carbon(rep, workers); break;
    case Scenario::bfield: bfield(rep, workers); break;
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace chirp
