#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chirp/ramsey.hpp"
#include "chirp/spectral.hpp"

namespace chirp {

struct SystemSection {
  ElectronSpin electron = ElectronSpin::spin_one;
  double d_zfs_mhz = 2870.0;
  double two_level_mhz = 0.0;  // transition frequency when electron = two_level
  // The field is given either as Larmor components or as |B| and its angle.
  std::optional<double> omega0_mhz;
  std::optional<double> omega_perp_mhz;
  std::optional<double> b_gauss;
  std::optional<double> b_angle_deg;
  CouplingMode mode = CouplingMode::secular;

  bool operator==(const SystemSection&) const = default;
};

struct NucleusSection {
  NuclearSpecies species = NuclearSpecies::C13;
  double a_par_mhz = 0.0;
  double a_perp_mhz = 0.0;
  double quadrupole_mhz = 0.0;
  std::optional<double> gamma_mhz_per_t;

  bool operator==(const NucleusSection&) const = default;
};

struct PulseSection {
  double w_start_mhz = 2770.0;
  double w_bdw_mhz = 250.0;
  double tau_p_ns = 120.0;
  std::optional<double> rabi_mhz;  // unset: calibrate to calibration_target
  double calibration_target = 0.5;
  double phase0_rad = 0.0;

  bool operator==(const PulseSection&) const = default;
};

struct SequenceSection {
  double t1_start_ns = 0.0;
  double dt1_ns = 2.0;
  std::size_t n_points = 2500;
  double w_ref_mhz = 0.0;
  std::vector<double> alpha_rad{0.0};
  std::optional<double> t2star_us;
  Engine engine = Engine::numeric;
  Integrator integrator = Integrator::magnus4;
  std::optional<double> frame_mhz;

  bool operator==(const SequenceSection&) const = default;
};

struct AnalysisSection {
  Window::Kind window = Window::Kind::none;
  double window_tau_ns = 0.0;
  int zero_pad = 4;
  double peak_threshold = 0.1;
  double min_separation_mhz = 1.0;

  bool operator==(const AnalysisSection&) const = default;
};

struct OutputSection {
  std::string directory = "out";
  std::uint64_t seed = 0;
  std::uint64_t photons_per_point = 0;  // 0 disables shot noise
  double contrast = 0.3;

  bool operator==(const OutputSection&) const = default;
};

/// Line-based `key = value` file with [system], [nucleus] (repeatable),
/// [pulse], [sequence], [analysis] and [output] sections. Frequencies in
/// MHz, durations in ns, T2* in us. Angles accept `pi` terms such as
/// `pi`, `-pi/2` or `0.25*pi`.
struct ExperimentConfig {
  SystemSection system;
  std::vector<NucleusSection> nuclei;
  PulseSection pulse;
  SequenceSection sequence;
  AnalysisSection analysis;
  OutputSection output;

  bool operator==(const ExperimentConfig&) const = default;

  /// Throws ConfigError on inconsistent values.
  void validate() const;

  SpinSystem spin_system() const;
  /// Pulse with rabi set when given explicitly, 0 otherwise.
  ChirpPulse chirp_pulse() const;
  RamseySequence ramsey_sequence(const ChirpPulse& pulse, double alpha_rad) const;
  Window window() const;
  RamseyOptions ramsey_options(unsigned workers) const;
};

/// Throws ConfigError carrying the offending line number.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);
/// Canonical text form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& cfg);

/// Parses a number with an optional `pi` factor.
double parse_angle_value(std::string_view text);

}  // namespace chirp
