#include "chirp/spin_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "chirp/units.hpp"

namespace chirp {

namespace {

constexpr double kGammaC13MhzPerT = 10.705;
constexpr double kGammaN14MhzPerT = 3.077;

// Tesla per MHz of electron Larmor frequency.
constexpr double tesla_from_larmor(double mhz) { return gauss_from_larmor_mhz(mhz) * 1e-4; }

std::vector<Eigen::Index> dims_of(const SpinSystem& sys) {
  std::vector<Eigen::Index> dims{sys.electron_dim()};
  for (const auto& n : sys.nuclei) dims.push_back(n.dim());
  return dims;
}

// Embed `op` acting on spin `slot` (0 = electron) into the composite space.
ComplexMatrix embed(const SpinSystem& sys, const ComplexMatrix& op, std::size_t slot) {
  const auto dims = dims_of(sys);
  ComplexMatrix out = identity(1);
  for (std::size_t i = 0; i < dims.size(); ++i) {
    out = kron(out, i == slot ? op : identity(dims[i]));
  }
  return out;
}

// Connected components of the nonzero pattern of a Hermitian matrix.
std::vector<std::vector<Eigen::Index>> connected_blocks(const ComplexMatrix& h) {
  const Eigen::Index n = h.rows();
  std::vector<Eigen::Index> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](Eigen::Index i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      if (h(i, j) != cplx(0.0, 0.0)) parent[find(i)] = find(j);
    }
  }
  std::vector<std::vector<Eigen::Index>> blocks;
  std::vector<Eigen::Index> slot(static_cast<std::size_t>(n), -1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<Eigen::Index>(blocks.size());
      blocks.emplace_back();
    }
    blocks[slot[r]].push_back(i);
  }
  return blocks;
}

std::string m_string(double m) {
  if (m == 0.0) return "0";
  std::ostringstream os;
  os << (m > 0 ? "+" : "-");
  const double a = std::abs(m);
  if (std::abs(a - std::round(a)) > 0.25) {
    os << static_cast<int>(std::lround(2 * a)) << "/2";
  } else {
    os << static_cast<int>(std::lround(a));
  }
  return os.str();
}

}  // namespace

std::string to_string(NuclearSpecies s) { return s == NuclearSpecies::C13 ? "C13" : "N14"; }
std::string to_string(ElectronSpin e) {
  return e == ElectronSpin::spin_one ? "spin_one" : "two_level";
}
std::string to_string(CouplingMode m) { return m == CouplingMode::secular ? "secular" : "full"; }

std::string to_string(TransitionKind k) {
  switch (k) {
    case TransitionKind::sq_plus: return "SQ+";
    case TransitionKind::sq_minus: return "SQ-";
    case TransitionKind::dq: return "DQ";
    case TransitionKind::zq: return "ZQ";
    case TransitionKind::unassigned: break;
  }
  return "unassigned";
}

NuclearSpin NuclearSpin::c13(double a_par_mhz, double a_perp_mhz) {
  return {NuclearSpecies::C13, a_par_mhz, a_perp_mhz, kGammaC13MhzPerT, 0.0};
}

NuclearSpin NuclearSpin::n14(double a_par_mhz, double a_perp_mhz, double quadrupole_mhz) {
  return {NuclearSpecies::N14, a_par_mhz, a_perp_mhz, kGammaN14MhzPerT, quadrupole_mhz};
}

SpinSystem SpinSystem::two_level(double transition_mhz) {
  SpinSystem sys;
  sys.electron = ElectronSpin::two_level;
  sys.d_zfs_mhz = 0.0;
  sys.omega0_mhz = transition_mhz;
  return sys;
}

void SpinSystem::set_field_gauss(double magnitude_gauss, double angle_rad) {
  omega0_mhz = larmor_mhz_from_gauss(magnitude_gauss * std::cos(angle_rad));
  omega_perp_mhz = larmor_mhz_from_gauss(magnitude_gauss * std::sin(angle_rad));
}

Eigen::Index SpinSystem::nuclear_dim() const {
  Eigen::Index d = 1;
  for (const auto& n : nuclei) d *= n.dim();
  return d;
}

void SpinSystem::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  if (electron == ElectronSpin::spin_one && !(d_zfs_mhz > 0.0)) {
    throw std::invalid_argument("spin system: zero-field splitting must be positive");
  }
  if (!finite(d_zfs_mhz) || !finite(omega0_mhz) || !finite(omega_perp_mhz)) {
    throw std::invalid_argument("spin system: non-finite field or splitting");
  }
  for (const auto& n : nuclei) {
    if (!finite(n.a_par_mhz) || !finite(n.a_perp_mhz) || !finite(n.gamma_mhz_per_t) ||
        !finite(n.quadrupole_mhz)) {
      throw std::invalid_argument("spin system: non-finite nuclear parameter");
    }
    if (n.a_perp_mhz < 0.0) throw std::invalid_argument("spin system: a_perp must be >= 0");
    if (n.species == NuclearSpecies::C13 && n.quadrupole_mhz != 0.0) {
      throw std::invalid_argument("spin system: C13 has no quadrupole moment");
    }
  }
  if (nuclear_dim() > kMaxHilbertDim || dim() > kMaxHilbertDim) {
    throw std::invalid_argument("spin system: Hilbert dimension " + std::to_string(dim()) +
                                " exceeds " + std::to_string(kMaxHilbertDim));
  }
}

ComplexMatrix electron_operator(const SpinSystem& sys, const ComplexMatrix& op) {
  return embed(sys, op, 0);
}

ComplexMatrix build_hamiltonian(const SpinSystem& sys) {
  sys.validate();
  const SpinOperators s = spin_operators(sys.electron_spin());
  const bool full = sys.mode == CouplingMode::full;

  ComplexMatrix h = ComplexMatrix::Zero(sys.dim(), sys.dim());
  if (sys.electron == ElectronSpin::spin_one) {
    h += sys.d_zfs_mhz * embed(sys, s.z * s.z, 0);
  }
  h += sys.omega0_mhz * embed(sys, s.z, 0);
  h += sys.omega_perp_mhz * embed(sys, s.x, 0);

  const double b_par_t = tesla_from_larmor(sys.omega0_mhz);
  const double b_perp_t = tesla_from_larmor(sys.omega_perp_mhz);
  for (std::size_t i = 0; i < sys.nuclei.size(); ++i) {
    const NuclearSpin& n = sys.nuclei[i];
    const std::size_t slot = i + 1;
    const SpinOperators ni = spin_operators(n.spin());
    const ComplexMatrix sz = embed(sys, s.z, 0);
    h += n.a_par_mhz * sz * embed(sys, ni.z, slot);
    if (n.quadrupole_mhz != 0.0) {
      const double ii = n.spin() * (n.spin() + 1.0);
      h += n.quadrupole_mhz *
           embed(sys, ni.z * ni.z - (ii / 3.0) * identity(n.dim()), slot);
    }
    if (full) {
      h += n.a_perp_mhz * (embed(sys, s.x, 0) * embed(sys, ni.x, slot) +
                           embed(sys, s.y, 0) * embed(sys, ni.y, slot));
      h -= n.gamma_mhz_per_t *
           (b_par_t * embed(sys, ni.z, slot) + b_perp_t * embed(sys, ni.x, slot));
    }
  }
  h *= mhz_to_angular(1.0);
  return 0.5 * (h + h.adjoint());
}

ProductLabel product_label(const SpinSystem& sys, Eigen::Index index) {
  const auto dims = dims_of(sys);
  std::vector<Eigen::Index> digits(dims.size());
  for (std::size_t i = dims.size(); i-- > 0;) {
    digits[i] = index % dims[i];
    index /= dims[i];
  }
  ProductLabel label{sys.electron_spin() - static_cast<double>(digits[0]), {}};
  for (std::size_t i = 0; i < sys.nuclei.size(); ++i) {
    label.m_nuclear.push_back(sys.nuclei[i].spin() - static_cast<double>(digits[i + 1]));
  }
  return label;
}

EigenStructure eigen_structure(const SpinSystem& sys) {
  const ComplexMatrix h = build_hamiltonian(sys);
  const Eigen::Index d = h.rows();
  EigenStructure es;
  es.energies = Eigen::VectorXd::Zero(d);
  es.vectors = ComplexMatrix::Zero(d, d);

  for (const auto& block : connected_blocks(h)) {
    const auto b = static_cast<Eigen::Index>(block.size());
    ComplexMatrix sub(b, b);
    for (Eigen::Index i = 0; i < b; ++i) {
      for (Eigen::Index j = 0; j < b; ++j) sub(i, j) = h(block[i], block[j]);
    }
    const HermitianEigen e = eigh(sub);
    // Greedy assignment of eigenvectors to product states by overlap.
    std::vector<std::tuple<double, Eigen::Index, Eigen::Index>> overlaps;
    for (Eigen::Index k = 0; k < b; ++k) {
      for (Eigen::Index i = 0; i < b; ++i) overlaps.emplace_back(std::norm(e.vectors(i, k)), i, k);
    }
    std::stable_sort(overlaps.begin(), overlaps.end(),
                     [](const auto& x, const auto& y) { return std::get<0>(x) > std::get<0>(y); });
    std::vector<bool> row_used(b, false), vec_used(b, false);
    for (const auto& [w, i, k] : overlaps) {
      if (row_used[i] || vec_used[k]) continue;
      row_used[i] = vec_used[k] = true;
      const Eigen::Index target = block[i];
      es.energies(target) = e.values(k);
      // Fix the phase so the dominant component is real and positive.
      const cplx lead = e.vectors(i, k);
      const cplx phase = std::abs(lead) > 0 ? std::conj(lead) / std::abs(lead) : cplx(1.0);
      for (Eigen::Index r = 0; r < b; ++r) es.vectors(block[r], target) = phase * e.vectors(r, k);
    }
  }

  const Eigen::Index ne = sys.electron_dim();
  const Eigen::Index nn = sys.nuclear_dim();
  for (Eigen::Index k = 0; k < d; ++k) {
    Eigen::VectorXd we = Eigen::VectorXd::Zero(ne);
    Eigen::VectorXd wn = Eigen::VectorXd::Zero(nn);
    for (Eigen::Index i = 0; i < d; ++i) {
      const double p = std::norm(es.vectors(i, k));
      we(i / nn) += p;
      wn(i % nn) += p;
    }
    Eigen::Index ei = 0, ni = 0;
    es.electron_weight.push_back(we.maxCoeff(&ei));
    es.nuclear_weight.push_back(wn.maxCoeff(&ni));
    es.electron_index.push_back(ei);
    es.nuclear_index.push_back(ni);
    es.bright_weight.push_back(we(sys.bright_electron_index()));
  }
  return es;
}

std::vector<Transition> TransitionTable::of_kind(TransitionKind k, bool allow_nuclear_flip) const {
  std::vector<Transition> out;
  for (const auto& t : entries) {
    if (t.kind == k && (allow_nuclear_flip || !t.nuclear_flip)) out.push_back(t);
  }
  return out;
}

std::vector<Transition> TransitionTable::allowed_sq() const {
  auto out = of_kind(TransitionKind::sq_plus);
  const auto minus = of_kind(TransitionKind::sq_minus);
  out.insert(out.end(), minus.begin(), minus.end());
  std::sort(out.begin(), out.end(),
            [](const Transition& a, const Transition& b) { return a.freq_mhz < b.freq_mhz; });
  return out;
}

TransitionTable transition_table(const SpinSystem& sys) {
  const EigenStructure es = eigen_structure(sys);
  const SpinOperators s = spin_operators(sys.electron_spin());
  const ComplexMatrix drive =
      es.vectors.adjoint() * electron_operator(sys, s.x / std::sqrt(2.0 * sys.electron_spin())) *
      es.vectors;
  const Eigen::Index d = sys.dim();
  const Eigen::Index nn = sys.nuclear_dim();

  TransitionTable table;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i + 1; j < d; ++j) {
      const bool i_low = es.energies(i) <= es.energies(j);
      const Eigen::Index lo = i_low ? i : j;
      const Eigen::Index hi = i_low ? j : i;
      Transition t{TransitionKind::unassigned,
                   lo,
                   hi,
                   angular_to_mhz(es.energies(hi) - es.energies(lo)),
                   es.nuclear_index[i] != es.nuclear_index[j],
                   4.0 * std::norm(drive(hi, lo)),
                   {}};
      const ProductLabel lab = product_label(sys, es.electron_index[lo] * nn + es.nuclear_index[lo]);
      std::string tag = "(";
      for (std::size_t q = 0; q < lab.m_nuclear.size(); ++q) {
        tag += (q ? "," : "") + m_string(lab.m_nuclear[q]);
      }
      t.config_tag = tag + ")";

      if (es.electron_weight[i] > kLabelThreshold && es.electron_weight[j] > kLabelThreshold &&
          es.nuclear_weight[i] > kLabelThreshold && es.nuclear_weight[j] > kLabelThreshold) {
        const double mi = sys.electron_spin() - static_cast<double>(es.electron_index[i]);
        const double mj = sys.electron_spin() - static_cast<double>(es.electron_index[j]);
        const double dm = std::abs(mi - mj);
        if (std::abs(dm - 1.0) < 1e-9) {
          const double m_excited =
              es.electron_index[i] == sys.bright_electron_index() ? mj : mi;
          t.kind = m_excited > 0 ? TransitionKind::sq_plus : TransitionKind::sq_minus;
        } else if (std::abs(dm - 2.0) < 1e-9) {
          t.kind = TransitionKind::dq;
        } else if (dm < 1e-9 && t.nuclear_flip) {
          t.kind = TransitionKind::zq;
        }
      }
      table.entries.push_back(std::move(t));
    }
  }
  return table;
}

}  // namespace chirp
