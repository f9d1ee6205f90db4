#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chirp/quantum_core.hpp"
#include "chirp/spin_model.hpp"

namespace chirp {

/// Static Hamiltonian in its eigenbasis plus the pieces the microwave drive
/// needs. The rotating frame is generated by the projector onto eigenstates
/// outside the bright manifold, so both |0> <-> |+1> and |0> <-> |-1> are
/// co-rotating with a single linearly polarized drive.
struct DriveModel {
  SpinSystem system;
  EigenStructure eig;
  Eigen::VectorXd excited;  // 1 outside the bright manifold, 0 inside
  ComplexMatrix raising;    // <excited| D |bright>; 1/2 for an allowed line
  std::vector<std::vector<Eigen::Index>> blocks;  // invariant subspaces under drive

  static DriveModel build(const SpinSystem& sys);

  Eigen::Index dim() const { return eig.energies.size(); }
  const Eigen::VectorXd& energies() const { return eig.energies; }

  /// Column c is |bright> (x) |nuclear config c> expressed in the eigenbasis.
  ComplexMatrix initial_states() const;
};

/// Linear frequency sweep with a rectangular envelope.
struct ChirpPulse {
  double w_start_mhz = 2770.0;
  double w_bdw_mhz = 250.0;
  double tau_p_ns = 120.0;
  double rabi_mhz = 0.0;
  double phase0_rad = 0.0;

  void validate() const;
  double w_end_mhz() const { return w_start_mhz + w_bdw_mhz; }
  double sweep_rate_mhz_per_ns() const { return w_bdw_mhz / tau_p_ns; }
  double instantaneous_mhz(double t_ns) const { return w_start_mhz + sweep_rate_mhz_per_ns() * t_ns; }
  /// Carrier phase phase0 + 2 pi (w_start t + k t^2 / 2), in rad.
  double lab_phase(double t_ns) const;
  bool covers(double f_mhz) const { return f_mhz >= w_start_mhz && f_mhz <= w_end_mhz(); }
};

struct FrameSpec {
  double w_frame_mhz = 0.0;
  static FrameSpec sweep_center(const ChirpPulse& p) { return {p.w_start_mhz + 0.5 * p.w_bdw_mhz}; }
};

enum class Integrator { midpoint, magnus4 };
std::string to_string(Integrator i);

struct PropagatorOptions {
  std::optional<FrameSpec> frame;  // default: sweep center
  Integrator integrator = Integrator::magnus4;
  std::optional<double> dt_ns;     // fixed step; disables refinement
  double tolerance = 1e-8;         // max entry change on halving dt
  int max_refinements = 12;
};

struct PulsePropagator {
  ComplexMatrix rotating;  // eigenbasis, rotating frame
  ComplexMatrix lab;       // eigenbasis, lab frame at the end of the pulse
  FrameSpec frame;
  double dt_ns = 0.0;
  std::size_t steps = 0;
  double self_convergence = 0.0;  // max entry change against the previous (2 dt) step
};

/// Time-ordered product of piecewise-constant exponentials in the rotating
/// frame, refined by step halving until successive results agree to
/// `tolerance`. Throws NumericalError when refinement is exhausted.
PulsePropagator pulse_propagator(const DriveModel& model, const ChirpPulse& pulse,
                                 const PropagatorOptions& opts = {});

/// One pass with a fixed step; no convergence control.
ComplexMatrix propagate_fixed_step(const DriveModel& model, const ChirpPulse& pulse,
                                   const FrameSpec& frame, double dt_ns,
                                   Integrator integrator = Integrator::magnus4);

/// exp(-i w_frame G tau) U: moves a rotating-frame pulse propagator to the lab frame.
ComplexMatrix to_lab_frame(const DriveModel& model, const ComplexMatrix& rotating,
                           const FrameSpec& frame, double tau_ns);

/// Effective flip angle and passage phase of one rapid passage.
struct PassageParams {
  double theta = kHalfPi;
  double phi = 0.0;
  static constexpr double kHalfPi = 1.5707963267948966;
};

enum class PassageOrder { excitation, readout };

/// Identity except on (bright, excited), where it holds
///   excitation: diag(e^{i phi/2}, e^{-i phi/2}) R(theta)
///   readout:    R(theta) diag(e^{i phi/2}, e^{-i phi/2})
/// with R(theta) = [[cos theta/2, sin theta/2], [-sin theta/2, cos theta/2]].
ComplexMatrix passage_unitary(const PassageParams& params, Eigen::Index bright,
                              Eigen::Index excited, Eigen::Index dim,
                              PassageOrder order = PassageOrder::excitation);

/// A rapid passage fitted from a numeric two-level propagation.
struct FittedPassage {
  PassageParams params;
  double transfer = 0.0;
};

/// Fit theta and phi for a line at `transition_mhz` whose drive coupling is
/// `coupling` (1/2 for an allowed line) using the interaction-picture
/// two-level propagator of `pulse`.
FittedPassage fit_passage(double transition_mhz, double coupling, const ChirpPulse& pulse,
                          const PropagatorOptions& opts = {});

struct AppliedPassage {
  Eigen::Index bright;
  Eigen::Index excited;
  double freq_mhz;
  PassageParams params;
  double transfer;
};

struct PassageModelOptions {
  std::optional<double> theta;  // same flip angle on every passage
  std::optional<double> phi;    // same passage phase on every passage
  PropagatorOptions numeric;    // used for fitting when theta or phi is unset
};

struct PassageModel {
  ComplexMatrix interaction;  // product of passage blocks, in sweep order
  ComplexMatrix lab;          // exp(-i E tau) * interaction
  std::vector<AppliedPassage> passages;
  std::vector<std::string> warnings;
};

/// Lines are addressed one at a time in sweep order. Only allowed lines
/// (strength > 1/4) inside the sweep window are driven.
PassageModel sequential_passage_model(const DriveModel& model, const ChirpPulse& pulse,
                                      const PassageModelOptions& opts = {});

struct CalibrationResult {
  double rabi_mhz = 0.0;
  double seed_mhz = 0.0;   // Landau-Zener estimate
  double transfer = 0.0;   // achieved single-passage transfer
  int iterations = 0;
  bool monotonic = true;
  double dt_ns = 0.0;
  double seed_ratio() const { return seed_mhz > 0 ? rabi_mhz / seed_mhz : 1.0; }
};

/// Landau-Zener estimate of the Rabi frequency (MHz) giving `target`
/// transfer for an allowed line swept at the pulse's rate.
double landau_zener_rabi_mhz(const ChirpPulse& pulse, double target);

/// Single-passage transfer |<excited| U |bright>|^2 for the one allowed
/// line inside the sweep window.
double single_passage_transfer(const DriveModel& model, const ChirpPulse& pulse,
                               const PropagatorOptions& opts = {});

/// Bisection on the numeric propagator, seeded by the Landau-Zener formula.
/// Requires exactly one allowed line inside the sweep window.
CalibrationResult calibrate_rabi(const DriveModel& model, const ChirpPulse& pulse, double target,
                                 double tolerance = 1e-5);

/// Calibrates on a two-level reduction of the lowest allowed line of `sys`
/// inside the sweep window.
CalibrationResult calibrate_first_line(const SpinSystem& sys, const ChirpPulse& pulse,
                                       double target, double tolerance = 1e-5);

}  // namespace chirp
