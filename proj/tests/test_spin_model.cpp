#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "chirp/spin_model.hpp"
#include "chirp/units.hpp"

using namespace chirp;

namespace {

Eigen::VectorXd sorted_mhz(const Eigen::VectorXd& angular) {
  Eigen::VectorXd v = angular / mhz_to_angular(1.0);
  std::sort(v.data(), v.data() + v.size());
  return v;
}

SpinSystem bare(double d, double omega0) {
  SpinSystem sys;
  sys.d_zfs_mhz = d;
  sys.omega0_mhz = omega0;
  return sys;
}

SpinSystem carbon_system() {
  SpinSystem sys = bare(2870.0, larmor_mhz_from_gauss(3.7));
  sys.nuclei = {NuclearSpin::c13(126.5), NuclearSpin::c13(6.55), NuclearSpin::n14(2.15)};
  return sys;
}

}  // namespace

TEST_CASE("bare S=1 eigenvalues are 0 and D +/- omega0") {
  const SpinSystem sys = bare(2871.5, 73.0);
  const Eigen::VectorXd e = sorted_mhz(eigen_structure(sys).energies);
  CHECK(e(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(e(1) == doctest::Approx(2798.5).epsilon(1e-12));
  CHECK(e(2) == doctest::Approx(2944.5).epsilon(1e-12));
}

TEST_CASE("transverse field eigenvalues of the two-level electron") {
  SpinSystem sys = SpinSystem::two_level(30.0);
  sys.omega_perp_mhz = 40.0;
  const Eigen::VectorXd e = sorted_mhz(eigen_structure(sys).energies);
  CHECK(e(1) - e(0) == doctest::Approx(50.0).epsilon(1e-12));
}

TEST_CASE("secular Hamiltonian is diagonal and its eigenvectors are the product basis") {
  const SpinSystem sys = carbon_system();
  const ComplexMatrix h = build_hamiltonian(sys);
  CHECK(h.rows() == 36);
  const ComplexMatrix off = h - ComplexMatrix(h.diagonal().asDiagonal());
  CHECK(off.cwiseAbs().maxCoeff() == 0.0);
  const EigenStructure es = eigen_structure(sys);
  CHECK((es.vectors - ComplexMatrix::Identity(36, 36)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("bare S=1 transition table") {
  const TransitionTable t = transition_table(bare(2871.5, 73.0));
  const auto sq = t.allowed_sq();
  REQUIRE(sq.size() == 2);
  CHECK(sq[0].freq_mhz == doctest::Approx(2798.5));
  CHECK(sq[0].kind == TransitionKind::sq_minus);
  CHECK(sq[1].freq_mhz == doctest::Approx(2944.5));
  CHECK(sq[1].kind == TransitionKind::sq_plus);
  for (const auto& s : sq) CHECK(s.strength == doctest::Approx(1.0));
  const auto dq = t.of_kind(TransitionKind::dq);
  REQUIRE(dq.size() == 1);
  CHECK(dq[0].freq_mhz == doctest::Approx(146.0));
  CHECK(dq[0].strength == doctest::Approx(0.0));
}

TEST_CASE("14N hyperfine splits SQ lines into 2.15 MHz triplets and DQ into 4.3 MHz") {
  SpinSystem sys = bare(2870.0, 157.5);
  sys.nuclei.push_back(NuclearSpin::n14(2.15, 0.0, -4.95));
  const TransitionTable t = transition_table(sys);
  const auto sq = t.allowed_sq();
  REQUIRE(sq.size() == 6);
  for (std::size_t g = 0; g < 2; ++g) {
    CHECK(sq[3 * g + 1].freq_mhz - sq[3 * g].freq_mhz == doctest::Approx(2.15));
    CHECK(sq[3 * g + 2].freq_mhz - sq[3 * g + 1].freq_mhz == doctest::Approx(2.15));
  }
  CHECK(sq[1].freq_mhz == doctest::Approx(2712.5));
  CHECK(sq[4].freq_mhz == doctest::Approx(3027.5));
  auto dq = t.of_kind(TransitionKind::dq);
  REQUIRE(dq.size() == 3);
  std::sort(dq.begin(), dq.end(), [](const auto& a, const auto& b) { return a.freq_mhz < b.freq_mhz; });
  CHECK(dq[1].freq_mhz - dq[0].freq_mhz == doctest::Approx(4.3));
  CHECK(dq[2].freq_mhz - dq[1].freq_mhz == doctest::Approx(4.3));
}

TEST_CASE("two 13C plus 14N give four groups of six SQ lines") {
  const auto sq = transition_table(carbon_system()).allowed_sq();
  REQUIRE(sq.size() == 24);
  std::vector<std::vector<double>> groups;
  for (const auto& s : sq) {
    if (groups.empty() || s.freq_mhz - groups.back().back() > 5.0) groups.emplace_back();
    groups.back().push_back(s.freq_mhz);
  }
  REQUIRE(groups.size() == 4);
  for (const auto& g : groups) CHECK(g.size() == 6);
  // Groups of equal m_S are split by the large carbon coupling.
  const auto centre = [](const std::vector<double>& g) { return 0.5 * (g.front() + g.back()); };
  CHECK(centre(groups[2]) - centre(groups[0]) == doctest::Approx(126.5));
  CHECK(centre(groups[3]) - centre(groups[1]) == doctest::Approx(126.5));
  std::map<std::string, int> tags;
  for (const auto& s : sq) ++tags[s.config_tag];
  CHECK(tags.size() == 12);
}

TEST_CASE("field slope: DQ moves twice as fast as each SQ line") {
  const double delta = 0.5;
  const auto a = transition_table(bare(2870.0, 60.0));
  const auto b = transition_table(bare(2870.0, 60.0 + delta));
  const double dq_slope = (b.of_kind(TransitionKind::dq)[0].freq_mhz - a.of_kind(TransitionKind::dq)[0].freq_mhz) / delta;
  const double sq_lo = (b.allowed_sq()[0].freq_mhz - a.allowed_sq()[0].freq_mhz) / delta;
  const double sq_hi = (b.allowed_sq()[1].freq_mhz - a.allowed_sq()[1].freq_mhz) / delta;
  CHECK(dq_slope == doctest::Approx(2.0));
  CHECK(sq_lo == doctest::Approx(-1.0));
  CHECK(sq_hi == doctest::Approx(1.0));
}

TEST_CASE("full mode couples nuclear states and stays Hermitian") {
  SpinSystem sys = bare(2870.0, 0.0);
  sys.set_field_gauss(9.0, 65.0 * kPi / 180.0);
  CHECK(sys.omega0_mhz == doctest::Approx(kGammaElectronMhzPerGauss * 9.0 * std::cos(65.0 * kPi / 180.0)));
  sys.nuclei = {NuclearSpin::c13(126.5, 30.0)};
  sys.mode = CouplingMode::full;
  const ComplexMatrix h = build_hamiltonian(sys);
  CHECK(is_hermitian(h));
  const EigenStructure es = eigen_structure(sys);
  CHECK(*std::min_element(es.nuclear_weight.begin(), es.nuclear_weight.end()) < 0.999);
  CHECK(unitarity_error(es.vectors) < 1e-12);
  CHECK((h * es.vectors - es.vectors * es.energies.asDiagonal()).cwiseAbs().maxCoeff() < 1e-9);

  sys.mode = CouplingMode::secular;
  const EigenStructure secular = eigen_structure(sys);
  CHECK(*std::min_element(secular.nuclear_weight.begin(), secular.nuclear_weight.end()) == doctest::Approx(1.0));
}

TEST_CASE("validation rejects bad systems") {
  SpinSystem sys = bare(2870.0, 10.0);
  sys.nuclei.assign(4, NuclearSpin::n14(2.15));
  CHECK_THROWS_AS(sys.validate(), std::invalid_argument);  // 3 * 81 > 64

  SpinSystem neg = bare(2870.0, 10.0);
  neg.nuclei = {NuclearSpin::c13(10.0, -1.0)};
  CHECK_THROWS_AS(build_hamiltonian(neg), std::invalid_argument);

  SpinSystem quad = bare(2870.0, 10.0);
  quad.nuclei = {NuclearSpin::c13(10.0)};
  quad.nuclei[0].quadrupole_mhz = 1.0;
  CHECK_THROWS_AS(quad.validate(), std::invalid_argument);

  CHECK_THROWS_AS(bare(-1.0, 0.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(bare(2870.0, std::nan("")).validate(), std::invalid_argument);
}

TEST_CASE("product labels follow m = +s ... -s ordering") {
  SpinSystem sys = bare(2870.0, 0.0);
  sys.nuclei = {NuclearSpin::c13(1.0), NuclearSpin::n14(2.0)};
  const ProductLabel l0 = product_label(sys, 0);
  CHECK(l0.m_electron == 1.0);
  CHECK(l0.m_nuclear == std::vector<double>{0.5, 1.0});
  const ProductLabel last = product_label(sys, sys.dim() - 1);
  CHECK(last.m_electron == -1.0);
  CHECK(last.m_nuclear == std::vector<double>{-0.5, -1.0});
  CHECK(sys.bright_electron_index() == 1);
}
