// Command-line front end: simulate, scan, calibrate, reproduce.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "chirp/config.hpp"
#include "chirp/csv_io.hpp"
#include "chirp/errors.hpp"
#include "chirp/ramsey.hpp"
#include "chirp/reproduce.hpp"
#include "chirp/spectral.hpp"
#include "chirp/units.hpp"

namespace fs = std::filesystem;
using namespace chirp;

namespace {

enum ExitCode { kOk = 0, kConfig = 1, kNumerical = 2, kAcceptance = 3 };

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
};

struct Context {
  ExperimentConfig cfg;
  fs::path out;
  Provenance prov;
};

Context load(const CommonArgs& args) {
  Context ctx;
  ctx.cfg = load_config(args.config_path);
  if (args.seed) ctx.cfg.output.seed = *args.seed;
  if (!args.out_dir.empty()) ctx.cfg.output.directory = args.out_dir;
  ctx.out = ctx.cfg.output.directory;
  // The hash covers everything that shapes the data, not where it is written.
  ExperimentConfig hashed = ctx.cfg;
  hashed.output.directory.clear();
  ctx.prov.config_hash = fnv1a(serialize_config(hashed));
  ctx.prov.seed = ctx.cfg.output.seed;
  fs::create_directories(ctx.out);
  return ctx;
}

ChirpPulse resolve_pulse(const ExperimentConfig& cfg, const SpinSystem& sys) {
  ChirpPulse pulse = cfg.chirp_pulse();
  if (!cfg.pulse.rabi_mhz) pulse.rabi_mhz = calibrate_first_line(sys, pulse, cfg.pulse.calibration_target).rabi_mhz;
  return pulse;
}

std::string tag(const std::string& prefix, std::size_t i) { return prefix + std::to_string(i); }

FringeRecord maybe_noisy(const ExperimentConfig& cfg, const FringeRecord& rec, std::uint64_t stream) {
  if (cfg.output.photons_per_point == 0) return rec;
  return shot_noise(rec, cfg.output.photons_per_point, cfg.output.contrast, cfg.output.seed + stream);
}

/// Pairs (i, j) of alpha values that differ by pi.
std::optional<std::pair<std::size_t, std::size_t>> pi_pair(const std::vector<double>& alphas) {
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    for (std::size_t j = i + 1; j < alphas.size(); ++j) {
      const double d = std::remainder(alphas[j] - alphas[i] - kPi, kTwoPi);
      if (std::abs(d) < 1e-9) return std::pair{i, j};
    }
  }
  return std::nullopt;
}

int cmd_simulate(const CommonArgs& args) {
  const Context ctx = load(args);
  const ExperimentConfig& cfg = ctx.cfg;
  const SpinSystem sys = cfg.spin_system();
  const ChirpPulse pulse = resolve_pulse(cfg, sys);
  const RamseySimulator sim(sys, pulse, cfg.sequence.engine, cfg.ramsey_options(args.workers));
  for (const auto& w : sim.warnings()) std::cerr << "warning: " << w << '\n';

  std::vector<Spectrum> spectra;
  for (std::size_t i = 0; i < cfg.sequence.alpha_rad.size(); ++i) {
    const FringeRecord rec = maybe_noisy(cfg, sim.run(cfg.ramsey_sequence(pulse, cfg.sequence.alpha_rad[i])), i);
    const Spectrum spec = fft_spectrum(rec, cfg.window(), cfg.analysis.zero_pad);
    const PeakList peaks = find_peaks(spec, cfg.analysis.peak_threshold, cfg.analysis.min_separation_mhz);
    write_fringe_csv(ctx.out / (tag("fringe_alpha", i) + ".csv"), rec, ctx.prov);
    write_spectrum_csv(ctx.out / (tag("spectrum_alpha", i) + ".csv"), spec, ctx.prov);
    write_peaks_csv(ctx.out / (tag("peaks_alpha", i) + ".csv"), peaks, ctx.prov);
    spectra.push_back(spec);
  }
  if (const auto pair = pi_pair(cfg.sequence.alpha_rad)) {
    const Spectrum& a = spectra[pair->first];
    const Spectrum& b = spectra[pair->second];
    const auto [sum, diff] = phase_cycle_combine(a, b);
    write_spectrum_csv(ctx.out / "spectrum_sum.csv", sum, ctx.prov);
    write_spectrum_csv(ctx.out / "spectrum_diff.csv", diff, ctx.prov);
    const PeakList peaks =
        classify_peaks(find_peaks(a, cfg.analysis.peak_threshold, cfg.analysis.min_separation_mhz), a, b);
    write_peaks_csv(ctx.out / "peaks_classified.csv", peaks, ctx.prov);
  }
  std::cout << "rabi_mhz " << format_double(pulse.rabi_mhz) << "\nwrote " << ctx.out.string() << '\n';
  return kOk;
}

int cmd_scan(const CommonArgs& args, const std::string& variable, const std::vector<std::string>& raw_values) {
  if (raw_values.empty()) throw ConfigError("scan: --values must not be empty");
  std::vector<double> values;
  for (const auto& v : raw_values) {
    try {
      values.push_back(parse_angle_value(v));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("scan: ") + e.what());
    }
  }
  const Context ctx = load(args);

  std::vector<std::vector<std::string>> peak_rows, summary_rows;
  auto summarize = [&](double value, const PeakList& peaks) {
    std::vector<double> sq, dq;
    for (const Peak& p : peaks) {
      peak_rows.push_back({format_double(value), format_double(p.freq_mhz), format_double(p.abs_amp), to_string(p.cls)});
      if (p.cls == PeakClass::sq) sq.push_back(p.freq_mhz);
      if (p.cls == PeakClass::dq) dq.push_back(p.freq_mhz);
    }
    const auto strongest_dq = std::max_element(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) {
      return (a.cls == PeakClass::dq ? a.abs_amp : -1.0) < (b.cls == PeakClass::dq ? b.abs_amp : -1.0);
    });
    const std::string na = "nan";
    const bool have_sq = !sq.empty();
    const bool have_dq = !dq.empty();
    summary_rows.push_back({format_double(value), std::to_string(sq.size()), std::to_string(dq.size()),
                            have_sq ? format_double(sq.front()) : na, have_sq ? format_double(sq.back()) : na,
                            have_sq ? format_double(sq.back() - sq.front()) : na,
                            have_dq ? format_double(strongest_dq->freq_mhz) : na});
  };

  if (variable == "alpha") {
    const ExperimentConfig& cfg = ctx.cfg;
    const SpinSystem sys = cfg.spin_system();
    const ChirpPulse pulse = resolve_pulse(cfg, sys);
    const RamseySimulator sim(sys, pulse, cfg.sequence.engine, cfg.ramsey_options(args.workers));
    std::vector<Spectrum> spectra;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const FringeRecord rec = maybe_noisy(cfg, sim.run(cfg.ramsey_sequence(pulse, values[i])), i);
      spectra.push_back(fft_spectrum(rec, cfg.window(), cfg.analysis.zero_pad));
      write_spectrum_csv(ctx.out / (tag("spectrum_", i) + ".csv"), spectra.back(), ctx.prov);
      summarize(values[i], find_peaks(spectra.back(), cfg.analysis.peak_threshold, cfg.analysis.min_separation_mhz));
    }
    if (const auto pair = pi_pair(values)) {
      const auto [sum, diff] = phase_cycle_combine(spectra[pair->first], spectra[pair->second]);
      write_spectrum_csv(ctx.out / "spectrum_sum.csv", sum, ctx.prov);
      write_spectrum_csv(ctx.out / "spectrum_diff.csv", diff, ctx.prov);
    }
  } else if (variable == "ref_freq" || variable == "b_field") {
    for (std::size_t i = 0; i < values.size(); ++i) {
      ExperimentConfig cfg = ctx.cfg;
      if (variable == "ref_freq") {
        cfg.sequence.w_ref_mhz = values[i];
      } else {
        if (cfg.system.electron != ElectronSpin::spin_one) throw ConfigError("scan b_field needs a spin_one electron");
        cfg.system.omega0_mhz.reset();
        cfg.system.omega_perp_mhz.reset();
        cfg.system.b_gauss = values[i];
      }
      cfg.validate();
      const SpinSystem sys = cfg.spin_system();
      const ChirpPulse pulse = resolve_pulse(cfg, sys);
      const RamseySimulator sim(sys, pulse, cfg.sequence.engine, cfg.ramsey_options(args.workers));
      const double alpha = cfg.sequence.alpha_rad.front();
      const Spectrum a = fft_spectrum(maybe_noisy(cfg, sim.run(cfg.ramsey_sequence(pulse, alpha)), 2 * i),
                                      cfg.window(), cfg.analysis.zero_pad);
      const Spectrum b = fft_spectrum(maybe_noisy(cfg, sim.run(cfg.ramsey_sequence(pulse, alpha + kPi)), 2 * i + 1),
                                      cfg.window(), cfg.analysis.zero_pad);
      write_spectrum_csv(ctx.out / (tag("spectrum_", i) + ".csv"), a, ctx.prov);
      summarize(values[i],
                classify_peaks(find_peaks(a, cfg.analysis.peak_threshold, cfg.analysis.min_separation_mhz), a, b));
    }
  } else {
    throw ConfigError("scan: unknown variable '" + variable + "' (expected ref_freq, b_field or alpha)");
  }

  write_file_atomic(ctx.out / "scan_peaks.csv",
                    table_csv({variable, "freq_MHz", "abs_amp", "class"}, peak_rows, ctx.prov));
  write_file_atomic(ctx.out / "scan_summary.csv",
                    table_csv({variable, "n_sq", "n_dq", "sq_min_MHz", "sq_max_MHz", "sq_splitting_MHz", "dq_MHz"},
                              summary_rows, ctx.prov));
  std::cout << "scanned " << values.size() << " values of " << variable << "\nwrote " << ctx.out.string() << '\n';
  return kOk;
}

int cmd_calibrate(const CommonArgs& args) {
  const Context ctx = load(args);
  ExperimentConfig cfg = ctx.cfg;
  const SpinSystem sys = cfg.spin_system();
  const CalibrationResult cal = calibrate_first_line(sys, cfg.chirp_pulse(), cfg.pulse.calibration_target);
  std::ostringstream report;
  report << "target " << format_double(cfg.pulse.calibration_target) << '\n'
         << "rabi_mhz " << format_double(cal.rabi_mhz) << '\n'
         << "lz_seed_mhz " << format_double(cal.seed_mhz) << '\n'
         << "seed_ratio " << format_double(cal.seed_ratio()) << '\n'
         << "transfer " << format_double(cal.transfer) << '\n'
         << "iterations " << cal.iterations << '\n'
         << "monotonic " << (cal.monotonic ? "yes" : "no") << '\n';
  std::cout << report.str();
  cfg.pulse.rabi_mhz = cal.rabi_mhz;
  write_file_atomic(ctx.out / "calibration.txt", ctx.prov.header() + report.str());
  write_file_atomic(ctx.out / "calibrated.cfg", serialize_config(cfg));
  if (!cal.monotonic) std::cerr << "warning: transfer was not monotonic on the calibration bracket\n";
  return kOk;
}

int cmd_reproduce(const std::string& scenario, const std::string& out_dir, unsigned workers) {
  const ScenarioReport rep = reproduce(parse_scenario(scenario), workers);
  std::cout << rep.text();
  if (!out_dir.empty()) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : rep.results) rows.push_back({r.name, r.measured, r.expected, r.pass ? "PASS" : "FAIL"});
    for (auto& row : rows) {
      for (auto& cell : row) std::replace(cell.begin(), cell.end(), ',', ';');
    }
    Provenance prov;
    write_file_atomic(fs::path(out_dir) / ("reproduce_" + scenario + ".csv"),
                      table_csv({"criterion", "measured", "expected", "result"}, rows, prov));
  }
  return rep.passed() ? kOk : kAcceptance;
}

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "Experiment config file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", args.out_dir, "Output directory (overrides [output] directory)");
  cmd->add_option("--seed", args.seed, "RNG seed for shot noise (overrides [output] seed)");
  cmd->add_option("--workers", args.workers, "Worker threads")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chirped-pulse broadband Ramsey spectroscopy simulator"};
  app.set_version_flag("--version", CHIRP_VERSION);
  app.require_subcommand(1);

  CommonArgs sim_args, scan_args, cal_args;
  auto* simulate = app.add_subcommand("simulate", "Run one Ramsey experiment per alpha value");
  add_common(simulate, sim_args);

  auto* scan = app.add_subcommand("scan", "Repeat the experiment over a list of values");
  add_common(scan, scan_args);
  std::string variable;
  std::vector<std::string> values;
  scan->add_option("--variable", variable, "ref_freq (MHz), b_field (gauss) or alpha (rad)")
      ->required()
      ->check(CLI::IsMember({"ref_freq", "b_field", "alpha"}));
  scan->add_option("--values", values, "Comma-separated values")->required()->delimiter(',');

  auto* calibrate = app.add_subcommand("calibrate", "Calibrate the drive amplitude on the first swept line");
  add_common(calibrate, cal_args);

  auto* repro = app.add_subcommand("reproduce", "Run a canned reproduction scenario");
  std::string scenario, repro_out;
  unsigned repro_workers = 1;
  repro->add_option("scenario", scenario, "bare_nv, nitrogen, carbon or bfield")
      ->required()
      ->check(CLI::IsMember({"bare_nv", "nitrogen", "carbon", "bfield"}));
  repro->add_option("--out", repro_out, "Directory for the report CSV");
  repro->add_option("--workers", repro_workers, "Worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*simulate) return cmd_simulate(sim_args);
    if (*scan) return cmd_scan(scan_args, variable, values);
    if (*calibrate) return cmd_calibrate(cal_args);
    if (*repro) return cmd_reproduce(scenario, repro_out, repro_workers);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
  return kOk;
}
