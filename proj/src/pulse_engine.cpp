#include "chirp/pulse_engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "chirp/errors.hpp"
#include "chirp/units.hpp"

namespace chirp {

std::string to_string(Integrator i) { return i == Integrator::magnus4 ? "magnus4" : "midpoint"; }

void ChirpPulse::validate() const {
  if (!(tau_p_ns > 0.0) || !std::isfinite(tau_p_ns)) {
    throw std::invalid_argument("chirp pulse: tau_p must be positive");
  }
  if (!(w_bdw_mhz > 0.0) || !std::isfinite(w_bdw_mhz)) {
    throw std::invalid_argument("chirp pulse: bandwidth must be positive");
  }
  if (!std::isfinite(w_start_mhz) || !std::isfinite(phase0_rad)) {
    throw std::invalid_argument("chirp pulse: non-finite start frequency or phase");
  }
  if (!(rabi_mhz >= 0.0) || !std::isfinite(rabi_mhz)) {
    throw std::invalid_argument("chirp pulse: rabi must be finite and >= 0");
  }
}

double ChirpPulse::lab_phase(double t_ns) const {
  return phase0_rad +
         mhz_to_angular(w_start_mhz * t_ns + 0.5 * sweep_rate_mhz_per_ns() * t_ns * t_ns);
}

namespace {

// Drive restricted to one invariant block.
struct BlockDrive {
  std::vector<Eigen::Index> index;
  Eigen::VectorXd diag;  // E - w_frame G, rad/ns
  ComplexMatrix raising;
  bool driven = false;
};

std::vector<BlockDrive> block_drives(const DriveModel& model, const FrameSpec& frame) {
  const double wf = mhz_to_angular(frame.w_frame_mhz);
  std::vector<BlockDrive> out;
  for (const auto& block : model.blocks) {
    BlockDrive bd;
    bd.index = block;
    const auto m = static_cast<Eigen::Index>(block.size());
    bd.diag.resize(m);
    bd.raising.resize(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      bd.diag(i) = model.energies()(block[i]) - wf * model.excited(block[i]);
      for (Eigen::Index j = 0; j < m; ++j) bd.raising(i, j) = model.raising(block[i], block[j]);
    }
    bd.driven = bd.raising.cwiseAbs().maxCoeff() > 0.0;
    out.push_back(std::move(bd));
  }
  return out;
}

class BlockStepper {
 public:
  BlockStepper(const BlockDrive& bd, const ChirpPulse& pulse, const FrameSpec& frame)
      : bd_(bd),
        pulse_(pulse),
        rabi_(mhz_to_angular(pulse.rabi_mhz)),
        wf_(mhz_to_angular(frame.w_frame_mhz)) {}

  ComplexMatrix hamiltonian(double t) const {
    const double dphi = pulse_.lab_phase(t) - wf_ * t;
    const cplx f = rabi_ * std::polar(1.0, -dphi);
    ComplexMatrix h = f * bd_.raising;
    h += h.adjoint().eval();
    h.diagonal() += bd_.diag.cast<cplx>();
    return h;
  }

  ComplexMatrix propagate(double dt_target, Integrator integrator, std::size_t& steps) {
    const auto m = static_cast<Eigen::Index>(bd_.index.size());
    const double tau = pulse_.tau_p_ns;
    if (!bd_.driven || rabi_ == 0.0) {
      ComplexMatrix u = ComplexMatrix::Zero(m, m);
      for (Eigen::Index i = 0; i < m; ++i) u(i, i) = std::polar(1.0, -bd_.diag(i) * tau);
      return u;
    }
    const auto n = static_cast<std::size_t>(std::ceil(tau / dt_target - 1e-9));
    const double h = tau / static_cast<double>(n);
    steps = std::max(steps, n);
    ComplexMatrix u = identity(m);
    constexpr double c = 0.28867513459481287;  // sqrt(3)/6
    for (std::size_t k = 0; k < n; ++k) {
      const double t0 = h * static_cast<double>(k);
      ComplexMatrix heff;
      if (integrator == Integrator::midpoint) {
        heff = hamiltonian(t0 + 0.5 * h);
      } else {
        const ComplexMatrix h1 = hamiltonian(t0 + (0.5 - c) * h);
        const ComplexMatrix h2 = hamiltonian(t0 + (0.5 + c) * h);
        const ComplexMatrix comm = h2 * h1 - h1 * h2;
        heff = 0.5 * (h1 + h2) - cplx(0.0, 0.5 * c * h) * comm;
        heff = 0.5 * (heff + heff.adjoint()).eval();
      }
      solver_.compute(heff);
      ComplexMatrix scaled = solver_.eigenvectors();
      for (Eigen::Index q = 0; q < m; ++q) {
        scaled.col(q) *= std::polar(1.0, -solver_.eigenvalues()(q) * h);
      }
      u = multiply(multiply(scaled, solver_.eigenvectors().adjoint()), u);
    }
    return u;
  }

 private:
  const BlockDrive& bd_;
  const ChirpPulse& pulse_;
  double rabi_;
  double wf_;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver_;
};

ComplexMatrix propagate_blocks(const DriveModel& model, const std::vector<BlockDrive>& drives,
                               const ChirpPulse& pulse, const FrameSpec& frame, double dt,
                               Integrator integrator, std::size_t& steps) {
  const Eigen::Index d = model.dim();
  ComplexMatrix u = ComplexMatrix::Zero(d, d);
  for (const auto& bd : drives) {
    BlockStepper stepper(bd, pulse, frame);
    const ComplexMatrix ub = stepper.propagate(dt, integrator, steps);
    const auto m = static_cast<Eigen::Index>(bd.index.size());
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) u(bd.index[i], bd.index[j]) = ub(i, j);
    }
  }
  return u;
}

// Largest frequency (MHz) the step must resolve.
double max_resolved_mhz(const std::vector<BlockDrive>& drives, const ChirpPulse& pulse,
                        const FrameSpec& frame) {
  double f = pulse.rabi_mhz;
  f = std::max(f, std::abs(pulse.w_start_mhz - frame.w_frame_mhz));
  f = std::max(f, std::abs(pulse.w_end_mhz() - frame.w_frame_mhz));
  for (const auto& bd : drives) {
    if (!bd.driven) continue;
    for (Eigen::Index i = 0; i < bd.diag.size(); ++i) f = std::max(f, std::abs(angular_to_mhz(bd.diag(i))));
  }
  return std::max(f, 1.0);
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

ComplexMatrix propagate_fixed_step(const DriveModel& model, const ChirpPulse& pulse,
                                   const FrameSpec& frame, double dt_ns, Integrator integrator) {
  pulse.validate();
  if (!(dt_ns > 0.0)) throw std::invalid_argument("propagate_fixed_step: dt must be positive");
  std::size_t steps = 0;
  return propagate_blocks(model, block_drives(model, frame), pulse, frame, dt_ns, integrator, steps);
}

ComplexMatrix to_lab_frame(const DriveModel& model, const ComplexMatrix& rotating,
                           const FrameSpec& frame, double tau_ns) {
  ComplexMatrix lab = rotating;
  const double wf = mhz_to_angular(frame.w_frame_mhz);
  for (Eigen::Index i = 0; i < lab.rows(); ++i) {
    lab.row(i) *= std::polar(1.0, -wf * model.excited(i) * tau_ns);
  }
  return lab;
}

PulsePropagator pulse_propagator(const DriveModel& model, const ChirpPulse& pulse,
                                 const PropagatorOptions& opts) {
  pulse.validate();
  PulsePropagator out;
  out.frame = opts.frame.value_or(FrameSpec::sweep_center(pulse));
  const auto drives = block_drives(model, out.frame);

  if (opts.dt_ns) {
    out.dt_ns = *opts.dt_ns;
    out.rotating = propagate_blocks(model, drives, pulse, out.frame, out.dt_ns, opts.integrator, out.steps);
  } else {
    double dt = 1000.0 / (20.0 * max_resolved_mhz(drives, pulse, out.frame));
    std::size_t steps = 0;
    ComplexMatrix prev = propagate_blocks(model, drives, pulse, out.frame, dt, opts.integrator, steps);
    bool converged = false;
    for (int r = 0; r < opts.max_refinements; ++r) {
      dt *= 0.5;
      steps = 0;
      ComplexMatrix next = propagate_blocks(model, drives, pulse, out.frame, dt, opts.integrator, steps);
      out.self_convergence = max_abs_diff(prev, next);
      prev = std::move(next);
      if (out.self_convergence < opts.tolerance) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      std::ostringstream os;
      os << "pulse_propagator: no convergence to " << opts.tolerance << " after "
         << opts.max_refinements << " step halvings (last change " << out.self_convergence << ")";
      throw NumericalError(os.str());
    }
    out.dt_ns = dt;
    out.steps = steps;
    out.rotating = std::move(prev);
  }
  out.lab = to_lab_frame(model, out.rotating, out.frame, pulse.tau_p_ns);
  return out;
}

ComplexMatrix passage_unitary(const PassageParams& params, Eigen::Index bright,
                              Eigen::Index excited, Eigen::Index dim, PassageOrder order) {
  if (bright == excited) throw std::invalid_argument("passage_unitary: identical indices");
  if (bright < 0 || excited < 0 || bright >= dim || excited >= dim) {
    throw std::invalid_argument("passage_unitary: index out of range");
  }
  if (!(params.theta >= 0.0 && params.theta <= kPi) || !std::isfinite(params.phi)) {
    throw std::invalid_argument("passage_unitary: theta must lie in [0, pi]");
  }
  const double c = std::cos(0.5 * params.theta);
  const double s = std::sin(0.5 * params.theta);
  const cplx p = std::polar(1.0, 0.5 * params.phi);
  const cplx pc = std::conj(p);
  ComplexMatrix u = identity(dim);
  if (order == PassageOrder::excitation) {
    u(bright, bright) = p * c;
    u(bright, excited) = p * s;
    u(excited, bright) = -pc * s;
    u(excited, excited) = pc * c;
  } else {
    u(bright, bright) = p * c;
    u(bright, excited) = pc * s;
    u(excited, bright) = -p * s;
    u(excited, excited) = pc * c;
  }
  return u;
}

namespace {

double wrap_phase(double a) { return std::remainder(a, kTwoPi); }

// Interaction-picture propagator of a two-level reduction with coupling
// scaled to `coupling`. Index 0 is excited, index 1 bright.
ComplexMatrix two_level_interaction(double transition_mhz, double coupling, const ChirpPulse& pulse,
                                    const PropagatorOptions& opts, double* dt_used = nullptr) {
  ChirpPulse scaled = pulse;
  scaled.rabi_mhz = pulse.rabi_mhz * 2.0 * coupling;
  const DriveModel model = DriveModel::build(SpinSystem::two_level(transition_mhz));
  const PulsePropagator prop = pulse_propagator(model, scaled, opts);
  if (dt_used) *dt_used = prop.dt_ns;
  ComplexMatrix ui = prop.lab;
  for (Eigen::Index i = 0; i < 2; ++i) {
    ui.row(i) *= std::polar(1.0, model.energies()(i) * pulse.tau_p_ns);
  }
  return ui;
}

}  // namespace

FittedPassage fit_passage(double transition_mhz, double coupling, const ChirpPulse& pulse,
                          const PropagatorOptions& opts) {
  const ComplexMatrix ui = two_level_interaction(transition_mhz, coupling, pulse, opts);
  const cplx ubb = ui(1, 1);
  const cplx ueb = ui(0, 1);
  FittedPassage fit;
  fit.transfer = std::min(1.0, std::norm(ueb));
  fit.params.theta = 2.0 * std::asin(std::sqrt(fit.transfer));
  if (std::abs(ueb) < 1e-12) {
    fit.params.phi = wrap_phase(2.0 * std::arg(ubb));
  } else if (std::abs(ubb) < 1e-12) {
    fit.params.phi = wrap_phase(-2.0 * std::arg(-ueb));
  } else {
    fit.params.phi = wrap_phase(std::arg(ubb) - std::arg(-ueb));
  }
  return fit;
}

namespace {

struct AddressedLine {
  Eigen::Index bright, excited;
  double freq, coupling;
};

std::vector<AddressedLine> allowed_in_window(const DriveModel& model, const ChirpPulse& pulse) {
  std::vector<AddressedLine> out;
  for (Eigen::Index e = 0; e < model.dim(); ++e) {
    for (Eigen::Index b = 0; b < model.dim(); ++b) {
      const double coupling = std::abs(model.raising(e, b));
      if (4.0 * coupling * coupling <= 0.25) continue;
      const double f = angular_to_mhz(model.energies()(e) - model.energies()(b));
      if (pulse.covers(f)) out.push_back({b, e, f, coupling});
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& x, const auto& y) { return x.freq < y.freq; });
  return out;
}

}  // namespace

PassageModel sequential_passage_model(const DriveModel& model, const ChirpPulse& pulse,
                                      const PassageModelOptions& opts) {
  pulse.validate();
  const Eigen::Index d = model.dim();
  PassageModel out;

  const auto lines = allowed_in_window(model, pulse);
  if (lines.empty()) out.warnings.push_back("no allowed transition inside the sweep window");
  for (std::size_t i = 0; i < lines.size(); ++i) {
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      const bool share = lines[i].bright == lines[j].bright || lines[i].excited == lines[j].excited;
      if (share && std::abs(lines[i].freq - lines[j].freq) < 2.0 * pulse.rabi_mhz) {
        std::ostringstream os;
        os << "lines at " << lines[i].freq << " and " << lines[j].freq
           << " MHz overlap within the power-broadened width";
        out.warnings.push_back(os.str());
      }
    }
  }

  out.interaction = identity(d);
  for (const AddressedLine& line : lines) {
    AppliedPassage ap{line.bright, line.excited, line.freq, {}, 0.0};
    if (opts.theta && opts.phi) {
      ap.params = {*opts.theta, *opts.phi};
      ap.transfer = std::pow(std::sin(0.5 * *opts.theta), 2);
    } else {
      const FittedPassage fit = fit_passage(line.freq, line.coupling, pulse, opts.numeric);
      ap.params = fit.params;
      ap.transfer = fit.transfer;
      if (opts.theta) {
        ap.params.theta = *opts.theta;
        ap.transfer = std::pow(std::sin(0.5 * *opts.theta), 2);
      }
      if (opts.phi) ap.params.phi = *opts.phi;
    }
    out.interaction = multiply(passage_unitary(ap.params, line.bright, line.excited, d), out.interaction);
    out.passages.push_back(ap);
  }

  out.lab = out.interaction;
  for (Eigen::Index i = 0; i < d; ++i) {
    out.lab.row(i) *= std::polar(1.0, -model.energies()(i) * pulse.tau_p_ns);
  }
  return out;
}

double landau_zener_rabi_mhz(const ChirpPulse& pulse, double target) {
  if (!(target >= 0.0 && target < 1.0)) {
    throw std::invalid_argument("landau_zener_rabi_mhz: target must lie in [0, 1)");
  }
  // Transfer 1 - exp(-pi Omega^2 / (2 k)) for angular Rabi Omega and sweep rate k.
  const double k = mhz_to_angular(pulse.sweep_rate_mhz_per_ns());
  const double omega = std::sqrt(-(2.0 * k / kPi) * std::log1p(-target));
  return angular_to_mhz(omega);
}


double single_passage_transfer(const DriveModel& model, const ChirpPulse& pulse,
                               const PropagatorOptions& opts) {
  const auto lines = allowed_in_window(model, pulse);
  if (lines.size() != 1) {
    throw std::invalid_argument("single_passage_transfer: expected exactly one allowed line in the sweep window, found " +
                                std::to_string(lines.size()));
  }
  const PulsePropagator prop = pulse_propagator(model, pulse, opts);
  return std::norm(prop.rotating(lines[0].excited, lines[0].bright));
}

CalibrationResult calibrate_rabi(const DriveModel& model, const ChirpPulse& pulse, double target,
                                 double tolerance) {
  pulse.validate();
  if (!(target >= 0.0 && target < 1.0)) {
    throw std::invalid_argument("calibrate_rabi: target must lie in [0, 1)");
  }
  const auto lines = allowed_in_window(model, pulse);
  if (lines.size() != 1) {
    throw std::invalid_argument("calibrate_rabi: expected exactly one allowed line in the sweep window, found " +
                                std::to_string(lines.size()));
  }
  CalibrationResult res;
  if (target == 0.0) return res;

  const double coupling_scale = 2.0 * lines[0].coupling;
  res.seed_mhz = landau_zener_rabi_mhz(pulse, target) / coupling_scale;

  // Step size is fixed once, at the top of the bracket, and reused.
  ChirpPulse trial = pulse;
  PropagatorOptions opts;
  auto transfer_at = [&](double rabi) {
    trial.rabi_mhz = rabi;
    const PulsePropagator prop = pulse_propagator(model, trial, opts);
    if (!opts.dt_ns) opts.dt_ns = prop.dt_ns;
    return std::norm(prop.rotating(lines[0].excited, lines[0].bright));
  };

  double lo = 0.0;
  double hi = 1.5 * res.seed_mhz;
  double f_lo = 0.0;
  double f_hi = transfer_at(hi);
  res.dt_ns = *opts.dt_ns;
  int expansions = 0;
  while (f_hi < target) {
    if (++expansions > 12) {
      throw NumericalError("calibrate_rabi: transfer never reached the target; over-driven or truncated sweep");
    }
    lo = hi;
    f_lo = f_hi;
    hi *= 1.5;
    f_hi = transfer_at(hi);
    if (f_hi < f_lo) res.monotonic = false;
  }

  double mid = 0.5 * (lo + hi);
  double f_mid = transfer_at(mid);
  for (res.iterations = 1; std::abs(f_mid - target) > tolerance && res.iterations < 100; ++res.iterations) {
    if (f_mid < f_lo || f_mid > f_hi) res.monotonic = false;
    if (f_mid < target) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
      f_hi = f_mid;
    }
    mid = 0.5 * (lo + hi);
    f_mid = transfer_at(mid);
  }
  if (std::abs(f_mid - target) > tolerance) {
    throw NumericalError("calibrate_rabi: bisection did not reach the requested tolerance");
  }
  res.rabi_mhz = mid;
  res.transfer = f_mid;
  return res;
}

CalibrationResult calibrate_first_line(const SpinSystem& sys, const ChirpPulse& pulse,
                                       double target, double tolerance) {
  const DriveModel model = DriveModel::build(sys);
  const auto lines = allowed_in_window(model, pulse);
  if (lines.empty()) {
    throw std::invalid_argument("calibrate_first_line: no allowed line inside the sweep window");
  }
  const DriveModel reduced = DriveModel::build(SpinSystem::two_level(lines[0].freq));
  CalibrationResult res = calibrate_rabi(reduced, pulse, target, tolerance);
  // The reduced line is fully allowed; rescale to the actual coupling.
  const double scale = 2.0 * lines[0].coupling;
  res.rabi_mhz /= scale;
  res.seed_mhz /= scale;
  return res;
}

}  // namespace chirp
