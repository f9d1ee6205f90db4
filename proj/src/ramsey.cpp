#include "chirp/ramsey.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "chirp/kernels.hpp"
#include "chirp/parallel.hpp"
#include "chirp/units.hpp"

namespace chirp {

std::string to_string(Engine e) { return e == Engine::numeric ? "numeric" : "analytic_passage"; }

double PhaseLaw::alpha(double t1_ns) const {
  return mhz_to_angular(w_ref_mhz * t1_ns) + alpha_const_rad;
}

void RamseySequence::validate() const {
  pulse.validate();
  if (!(dt1_ns > 0.0) || !std::isfinite(dt1_ns)) throw std::invalid_argument("ramsey: dt1 must be positive");
  if (!(t1_start_ns >= 0.0) || !std::isfinite(t1_start_ns)) {
    throw std::invalid_argument("ramsey: t1 start must be >= 0");
  }
  if (n_points < 1) throw std::invalid_argument("ramsey: empty t1 grid");
  if (!std::isfinite(phase_law.w_ref_mhz) || !std::isfinite(phase_law.alpha_const_rad)) {
    throw std::invalid_argument("ramsey: non-finite phase law");
  }
  if (t2star_us && !(*t2star_us > 0.0)) throw std::invalid_argument("ramsey: T2* must be positive");
}

namespace {

bool same_pulse(const ChirpPulse& a, const ChirpPulse& b) {
  return a.w_start_mhz == b.w_start_mhz && a.w_bdw_mhz == b.w_bdw_mhz && a.tau_p_ns == b.tau_p_ns &&
         a.rabi_mhz == b.rabi_mhz && a.phase0_rad == b.phase0_rad;
}

}  // namespace

RamseySimulator::RamseySimulator(const SpinSystem& sys, const ChirpPulse& pulse, Engine engine,
                                 const RamseyOptions& opts)
    : system_(sys), pulse_(pulse), engine_(engine), opts_(opts), model_(DriveModel::build(sys)) {
  pulse_.validate();
  if (engine_ == Engine::numeric) {
    const PulsePropagator prop = pulse_propagator(model_, pulse_, opts_.propagator);
    pulse_lab_ = prop.lab;
    frame_mhz_ = prop.frame.w_frame_mhz;
    dt_ns_ = prop.dt_ns;
  } else {
    PassageModel pm = sequential_passage_model(model_, pulse_, opts_.passage);
    pulse_lab_ = std::move(pm.lab);
    warnings_ = std::move(pm.warnings);
  }
}

FringeRecord RamseySimulator::run(const RamseySequence& seq) const {
  seq.validate();
  if (!same_pulse(seq.pulse, pulse_)) {
    throw std::invalid_argument("RamseySimulator::run: sequence pulse differs from the simulator pulse");
  }
  const Eigen::Index d = model_.dim();
  const Eigen::Index nc = system_.nuclear_dim();
  const auto& g = model_.excited;

  // State after the excitation pulse, one column per nuclear configuration.
  const ComplexMatrix x = multiply(pulse_lab_, model_.initial_states());
  ComplexMatrix c = pulse_lab_;
  for (Eigen::Index j = 0; j < d; ++j) c.col(j) *= std::polar(1.0, seq.phase_law.alpha_const_rad * g(j));

  const Eigen::VectorXd shifted = model_.energies() - mhz_to_angular(seq.phase_law.w_ref_mhz) * g;
  const std::vector<double> weights(model_.eig.bright_weight.begin(), model_.eig.bright_weight.end());

  // Time-independent part: pairs of eigenstates with equal shifted energy.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return shifted(a) < shifted(b); });
  std::vector<std::vector<Eigen::Index>> groups;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i == 0 || shifted(order[i]) - shifted(order[i - 1]) > 1e-10) groups.emplace_back();
    groups.back().push_back(order[i]);
  }
  double dc = 0.0;
  for (Eigen::Index col = 0; col < nc; ++col) {
    for (Eigen::Index k = 0; k < d; ++k) {
      for (const auto& grp : groups) {
        cplx acc = 0.0;
        for (Eigen::Index j : grp) acc += c(k, j) * x(j, col);
        dc += weights[k] * std::norm(acc);
      }
    }
  }
  dc /= static_cast<double>(nc);

  FringeRecord rec;
  rec.t1_ns.resize(seq.n_points);
  rec.p0.resize(seq.n_points);
  rec.meta = {seq, system_, engine_, frame_mhz_, dt_ns_, warnings_};

  const kernels::KernelTable& kt = kernels::active();
  const auto du = static_cast<std::size_t>(d);
  const auto ncu = static_cast<std::size_t>(nc);
  parallel_for(seq.n_points, opts_.workers, [&](std::size_t i) {
    const double t1 = seq.t1(i);
    std::vector<cplx> phase(du);
    for (std::size_t j = 0; j < du; ++j) phase[j] = std::polar(1.0, -shifted(j) * t1);
    ComplexMatrix y(d, nc), z(d, nc);
    kt.scale_rows(du, ncu, phase.data(), x.data(), du, y.data(), du);
    kt.gemm(du, ncu, du, c.data(), du, y.data(), du, z.data(), du);
    double p = kt.weighted_norm2(du, ncu, weights.data(), z.data(), du) / static_cast<double>(nc);
    if (seq.t2star_us) p = dc + (p - dc) * std::exp(-t1 / (1000.0 * *seq.t2star_us));
    rec.t1_ns[i] = t1;
    rec.p0[i] = std::clamp(p, 0.0, 1.0);
  });
  return rec;
}

FringeRecord run_ramsey(const SpinSystem& sys, const RamseySequence& seq, Engine engine,
                        const RamseyOptions& opts) {
  return RamseySimulator(sys, seq.pulse, engine, opts).run(seq);
}

std::pair<FringeRecord, FringeRecord> run_phase_pair(const SpinSystem& sys,
                                                     const RamseySequence& seq, Engine engine,
                                                     const RamseyOptions& opts) {
  const RamseySimulator sim(sys, seq.pulse, engine, opts);
  RamseySequence shifted = seq;
  shifted.phase_law.alpha_const_rad += kPi;
  return {sim.run(seq), sim.run(shifted)};
}

double analytic_two_level(double omega0_mhz, double phi1, double phi2, double t1_ns) {
  return 0.5 * (1.0 - std::cos(mhz_to_angular(omega0_mhz * t1_ns) + phi1 + phi2));
}

ThreeLevelAmplitudes three_level_amplitudes(double theta) {
  const double c = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  return {s * s * c, c * c * c * c};
}

double analytic_three_level(double theta, double phi, double omega_p_mhz, double omega_m_mhz,
                            double alpha, double t1_ns) {
  const auto [a1, a2] = three_level_amplitudes(theta);
  const double dq = 2.0 * a1 * a1 * std::cos(mhz_to_angular((omega_p_mhz - omega_m_mhz) * t1_ns));
  const double sq = 2.0 * a1 * a2 *
                    (std::sin(mhz_to_angular(omega_m_mhz * t1_ns) + 2.5 * phi - alpha) +
                     std::sin(mhz_to_angular(omega_p_mhz * t1_ns) + 2.5 * phi - alpha));
  return dq + sq;
}

FringeRecord shot_noise(const FringeRecord& record, std::uint64_t photons_per_point, double contrast,
                        std::uint64_t seed) {
  if (photons_per_point < 1) throw std::invalid_argument("shot_noise: need at least one photon per point");
  if (!(contrast >= 0.0 && contrast <= 1.0)) throw std::invalid_argument("shot_noise: contrast must lie in [0, 1]");
  FringeRecord out = record;
  out.p0_sigma.assign(record.size(), 0.0);
  std::mt19937_64 rng(seed);
  const double n = static_cast<double>(photons_per_point);
  for (std::size_t i = 0; i < record.size(); ++i) {
    const double bright = 1.0 - contrast * (1.0 - record.p0[i]);
    std::binomial_distribution<std::uint64_t> draw(photons_per_point, std::clamp(bright, 0.0, 1.0));
    const double f = static_cast<double>(draw(rng)) / n;
    if (contrast == 0.0) {
      out.p0[i] = f;
      out.p0_sigma[i] = 0.0;
      continue;
    }
    out.p0[i] = std::clamp(1.0 - (1.0 - f) / contrast, 0.0, 1.0);
    out.p0_sigma[i] = std::sqrt(std::max(f * (1.0 - f), 1.0 / n) / n) / contrast;
  }
  return out;
}

double fold_frequency(double f_mhz, double nyquist_mhz) {
  const double period = 2.0 * nyquist_mhz;
  double r = std::fmod(std::abs(f_mhz), period);
  if (r > nyquist_mhz) r = period - r;
  return r;
}

std::vector<ExpectedLine> expected_lines(const SpinSystem& sys, const RamseySequence& seq) {
  const TransitionTable table = transition_table(sys);
  std::vector<ExpectedLine> out;
  for (const auto& t : table.entries) {
    if (t.nuclear_flip) continue;
    double shift = 0.0;
    if (t.kind == TransitionKind::sq_plus || t.kind == TransitionKind::sq_minus) {
      shift = seq.phase_law.w_ref_mhz;
    } else if (t.kind != TransitionKind::dq) {
      continue;
    }
    out.push_back({fold_frequency(t.freq_mhz - shift, seq.nyquist_mhz()), t.freq_mhz, t.kind, t.config_tag});
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.apparent_mhz < b.apparent_mhz; });
  return out;
}

}  // namespace chirp
