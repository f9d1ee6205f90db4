#include <cmath>
#include <numeric>

#include "chirp/pulse_engine.hpp"

namespace chirp {

DriveModel DriveModel::build(const SpinSystem& sys) {
  DriveModel m;
  m.system = sys;
  m.eig = eigen_structure(sys);
  const Eigen::Index d = m.dim();
  const Eigen::Index bright = sys.bright_electron_index();

  m.excited = Eigen::VectorXd::Zero(d);
  for (Eigen::Index k = 0; k < d; ++k) m.excited(k) = m.eig.electron_index[k] == bright ? 0.0 : 1.0;

  const SpinOperators s = spin_operators(sys.electron_spin());
  const ComplexMatrix drive = m.eig.vectors.adjoint() *
                              electron_operator(sys, s.x / std::sqrt(2.0 * sys.electron_spin())) *
                              m.eig.vectors;
  m.raising = ComplexMatrix::Zero(d, d);
  for (Eigen::Index e = 0; e < d; ++e) {
    if (m.excited(e) == 0.0) continue;
    for (Eigen::Index b = 0; b < d; ++b) {
      if (m.excited(b) == 0.0) m.raising(e, b) = drive(e, b);
    }
  }

  // Invariant subspaces of diag(E) + raising + raising^dagger.
  std::vector<Eigen::Index> parent(static_cast<std::size_t>(d));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](Eigen::Index i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  const double scale = m.raising.cwiseAbs().maxCoeff();
  for (Eigen::Index e = 0; e < d; ++e) {
    for (Eigen::Index b = 0; b < d; ++b) {
      if (std::abs(m.raising(e, b)) > 1e-15 * scale) parent[find(e)] = find(b);
    }
  }
  std::vector<Eigen::Index> slot(static_cast<std::size_t>(d), -1);
  for (Eigen::Index i = 0; i < d; ++i) {
    const Eigen::Index r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<Eigen::Index>(m.blocks.size());
      m.blocks.emplace_back();
    }
    m.blocks[slot[r]].push_back(i);
  }
  return m;
}

ComplexMatrix DriveModel::initial_states() const {
  const Eigen::Index nn = system.nuclear_dim();
  const Eigen::Index offset = system.bright_electron_index() * nn;
  // Rows of V^dagger for the bright product states.
  return eig.vectors.adjoint().middleCols(offset, nn);
}

}  // namespace chirp
