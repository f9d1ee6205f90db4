#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chirp/pulse_engine.hpp"
#include "chirp/spin_model.hpp"

namespace chirp {

enum class Engine { numeric, analytic_passage };
std::string to_string(Engine e);

/// Readout-pulse phase relative to the excitation pulse:
/// alpha(t1) = 2 pi w_ref t1 + alpha_const.
struct PhaseLaw {
  double w_ref_mhz = 0.0;
  double alpha_const_rad = 0.0;
  double alpha(double t1_ns) const;
};

struct RamseySequence {
  ChirpPulse pulse;
  double t1_start_ns = 0.0;
  double dt1_ns = 2.0;
  std::size_t n_points = 2500;
  PhaseLaw phase_law;
  std::optional<double> t2star_us;

  void validate() const;
  double t1(std::size_t i) const { return t1_start_ns + dt1_ns * static_cast<double>(i); }
  double nyquist_mhz() const { return 500.0 / dt1_ns; }
};

struct FringeMetadata {
  RamseySequence sequence;
  SpinSystem system;
  Engine engine = Engine::numeric;
  double frame_mhz = 0.0;
  double integrator_dt_ns = 0.0;
  std::vector<std::string> warnings;
};

/// P(|m_S = 0>) versus free-evolution time.
struct FringeRecord {
  std::vector<double> t1_ns;
  std::vector<double> p0;
  std::vector<double> p0_sigma;  // empty unless shot noise was applied
  FringeMetadata meta;

  std::size_t size() const { return p0.size(); }
  double dt1_ns() const { return meta.sequence.dt1_ns; }
};

struct RamseyOptions {
  PropagatorOptions propagator;
  PassageModelOptions passage;
  unsigned workers = 1;
};

/// Caches the eigenstructure and pulse propagator of one system and pulse so
/// many t1 grids and phase laws can be evaluated cheaply.
class RamseySimulator {
 public:
  RamseySimulator(const SpinSystem& sys, const ChirpPulse& pulse, Engine engine,
                  const RamseyOptions& opts = {});

  /// seq.pulse must equal the pulse given at construction.
  FringeRecord run(const RamseySequence& seq) const;

  const DriveModel& model() const { return model_; }
  /// Lab-frame pulse propagator in the eigenbasis.
  const ComplexMatrix& pulse_unitary() const { return pulse_lab_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  SpinSystem system_;
  ChirpPulse pulse_;
  Engine engine_;
  RamseyOptions opts_;
  DriveModel model_;
  ComplexMatrix pulse_lab_;
  double frame_mhz_ = 0.0;
  double dt_ns_ = 0.0;
  std::vector<std::string> warnings_;
};

FringeRecord run_ramsey(const SpinSystem& sys, const RamseySequence& seq, Engine engine,
                        const RamseyOptions& opts = {});

/// Records at alpha_const and alpha_const + pi.
std::pair<FringeRecord, FringeRecord> run_phase_pair(const SpinSystem& sys,
                                                     const RamseySequence& seq, Engine engine,
                                                     const RamseyOptions& opts = {});

/// 1/2 [1 - cos(2 pi omega0 t1 + phi1 + phi2)] for a two-level Ramsey fringe.
double analytic_two_level(double omega0_mhz, double phi1, double phi2, double t1_ns);

struct ThreeLevelAmplitudes {
  double a1;  // sin^2(theta/2) cos(theta/2)
  double a2;  // cos^4(theta/2)
};
ThreeLevelAmplitudes three_level_amplitudes(double theta);

/// AC part of the three-level chirped Ramsey signal with readout phase alpha.
double analytic_three_level(double theta, double phi, double omega_p_mhz, double omega_m_mhz,
                            double alpha, double t1_ns);

/// Photon-count readout: each point is a binomial draw of
/// `photons_per_point` with bright fraction 1 - contrast (1 - p0), mapped
/// back to a population estimate. contrast = 0 carries no spin information
/// and yields a flat record at 1.
FringeRecord shot_noise(const FringeRecord& record, std::uint64_t photons_per_point,
                        double contrast, std::uint64_t seed);

/// A line expected in the fringe spectrum after the reference-frequency shift.
struct ExpectedLine {
  double apparent_mhz;  // folded into [0, nyquist]
  double true_mhz;
  TransitionKind kind;
  std::string config_tag;
};

double fold_frequency(double f_mhz, double nyquist_mhz);

/// Allowed SQ lines appear at |f - w_ref|, DQ and ZQ lines at f.
std::vector<ExpectedLine> expected_lines(const SpinSystem& sys, const RamseySequence& seq);

}  // namespace chirp
