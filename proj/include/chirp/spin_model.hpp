#pragma once

#include <string>
#include <vector>

#include "chirp/quantum_core.hpp"

namespace chirp {

enum class NuclearSpecies { C13, N14 };
enum class ElectronSpin { spin_one, two_level };
enum class CouplingMode { secular, full };

std::string to_string(NuclearSpecies s);
std::string to_string(ElectronSpin e);
std::string to_string(CouplingMode m);

struct NuclearSpin {
  NuclearSpecies species = NuclearSpecies::C13;
  double a_par_mhz = 0.0;
  double a_perp_mhz = 0.0;        // 0 keeps the coupling secular even in full mode
  double gamma_mhz_per_t = 10.705;
  double quadrupole_mhz = 0.0;    // N14 only

  static NuclearSpin c13(double a_par_mhz, double a_perp_mhz = 0.0);
  static NuclearSpin n14(double a_par_mhz, double a_perp_mhz = 0.0, double quadrupole_mhz = 0.0);

  double spin() const { return species == NuclearSpecies::C13 ? 0.5 : 1.0; }
  Eigen::Index dim() const { return species == NuclearSpecies::C13 ? 2 : 3; }
};

/// Static parameters of the electron spin and its nuclear neighbours.
/// Field components are given as electron Larmor frequencies.
struct SpinSystem {
  ElectronSpin electron = ElectronSpin::spin_one;
  double d_zfs_mhz = 2870.0;
  double omega0_mhz = 0.0;       // along the symmetry axis
  double omega_perp_mhz = 0.0;   // transverse, along x
  std::vector<NuclearSpin> nuclei;
  CouplingMode mode = CouplingMode::secular;

  /// Two-level stand-in for one electron transition at the given frequency.
  static SpinSystem two_level(double transition_mhz);

  /// Field of |B| gauss at `angle_rad` from the symmetry axis.
  void set_field_gauss(double magnitude_gauss, double angle_rad);

  Eigen::Index electron_dim() const { return electron == ElectronSpin::spin_one ? 3 : 2; }
  double electron_spin() const { return electron == ElectronSpin::spin_one ? 1.0 : 0.5; }
  /// Basis index of the optically bright electron state (m_S = 0, or m = -1/2).
  Eigen::Index bright_electron_index() const { return 1; }
  Eigen::Index nuclear_dim() const;
  Eigen::Index dim() const { return electron_dim() * nuclear_dim(); }

  /// Throws std::invalid_argument on out-of-range parameters.
  void validate() const;
};

inline constexpr Eigen::Index kMaxHilbertDim = 64;

/// H in rad/ns. Composite basis is electron-first lexicographic, each spin
/// ordered m = +s ... -s.
ComplexMatrix build_hamiltonian(const SpinSystem& sys);

/// op acting on the electron, identity on the nuclei.
ComplexMatrix electron_operator(const SpinSystem& sys, const ComplexMatrix& op);

/// m quantum numbers of every spin for a composite basis index.
struct ProductLabel {
  double m_electron;
  std::vector<double> m_nuclear;
};
ProductLabel product_label(const SpinSystem& sys, Eigen::Index index);

/// Eigenstates of the static Hamiltonian, ordered so eigenvector k has its
/// largest overlap with product state k. Diagonalization is done per
/// connected block of H, so a diagonal H yields exactly the product basis.
struct EigenStructure {
  Eigen::VectorXd energies;  // rad/ns
  ComplexMatrix vectors;
  std::vector<Eigen::Index> electron_index;  // dominant electron basis index
  std::vector<double> electron_weight;
  std::vector<Eigen::Index> nuclear_index;   // dominant nuclear product index
  std::vector<double> nuclear_weight;
  std::vector<double> bright_weight;         // total weight on the bright electron state
};

EigenStructure eigen_structure(const SpinSystem& sys);

enum class TransitionKind { sq_plus, sq_minus, dq, zq, unassigned };
std::string to_string(TransitionKind k);

struct Transition {
  TransitionKind kind;
  Eigen::Index lower;  // eigen index with lower energy
  Eigen::Index upper;
  double freq_mhz;
  bool nuclear_flip;       // dominant nuclear configurations differ
  double strength;         // |<upper| drive |lower>|^2 normalized to 1 for an allowed line
  std::string config_tag;  // nuclear m values of the lower state
};

struct TransitionTable {
  std::vector<Transition> entries;

  std::vector<Transition> of_kind(TransitionKind k, bool allow_nuclear_flip = false) const;
  /// SQ+ and SQ- lines without a nuclear flip, sorted by frequency.
  std::vector<Transition> allowed_sq() const;
};

/// Dominant-character threshold for labeling eigenstates.
inline constexpr double kLabelThreshold = 0.5;

TransitionTable transition_table(const SpinSystem& sys);

}  // namespace chirp
