#include <doctest.h>

#include <cmath>

#include "chirp/config.hpp"
#include "chirp/csv_io.hpp"
#include "chirp/errors.hpp"
#include "chirp/units.hpp"

using namespace chirp;

namespace {

const char* kCarbonConfig = R"(# two carbons and the host nitrogen
[system]
d_zfs_mhz = 2870
b_gauss = 8.755
b_angle_deg = 65
mode = full

[nucleus]
species = C13
a_par_mhz = 126.5
a_perp_mhz = 30

[nucleus]
species = C13
a_par_mhz = 6.55

[nucleus]
species = N14
a_par_mhz = 2.15
quadrupole_mhz = -4.95

[pulse]
w_start_mhz = 2750.3
w_bdw_mhz = 250
tau_p_ns = 60
rabi_mhz = auto

[sequence]
dt1_ns = 2
n_points = 2500
w_ref_mhz = 2770
alpha_rad = 0, pi
t2star_us = 1.5
engine = numeric

[analysis]
zero_pad = 4
peak_threshold = 0.25

[output]
directory = carbon_out
seed = 17
)";

int error_line(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST_CASE("parse a full config") {
  const ExperimentConfig c = parse_config(kCarbonConfig);
  CHECK(c.system.mode == CouplingMode::full);
  REQUIRE(c.nuclei.size() == 3);
  CHECK(c.nuclei[0].a_perp_mhz == 30.0);
  CHECK(c.nuclei[2].species == NuclearSpecies::N14);
  CHECK_FALSE(c.pulse.rabi_mhz.has_value());
  REQUIRE(c.sequence.alpha_rad.size() == 2);
  CHECK(c.sequence.alpha_rad[1] == kPi);
  CHECK(c.output.seed == 17);
  const SpinSystem sys = c.spin_system();
  CHECK(sys.omega0_mhz == doctest::Approx(kGammaElectronMhzPerGauss * 8.755 * std::cos(65.0 * kPi / 180.0)));
  CHECK(sys.nuclei[2].quadrupole_mhz == -4.95);
}

TEST_CASE("parse -> serialize -> parse is the identity") {
  const ExperimentConfig a = parse_config(kCarbonConfig);
  const std::string text = serialize_config(a);
  const ExperimentConfig b = parse_config(text);
  CHECK(a == b);
  CHECK(serialize_config(b) == text);

  ExperimentConfig d;
  d.pulse.rabi_mhz = 11.46958;
  d.sequence.alpha_rad = {0.1, 0.1 + kPi};
  d.sequence.frame_mhz = 2880.25;
  d.analysis.window = Window::Kind::exponential;
  d.analysis.window_tau_ns = 750.0;
  d.system.omega0_mhz = 1.0 / 3.0;
  CHECK(parse_config(serialize_config(d)) == d);
}

TEST_CASE("pi expressions") {
  CHECK(parse_angle_value("pi") == kPi);
  CHECK(parse_angle_value("-pi") == -kPi);
  CHECK(parse_angle_value("pi/2") == kPi / 2);
  CHECK(parse_angle_value("0.25*pi") == 0.25 * kPi);
  CHECK(parse_angle_value("3 pi / 4") == 3.0 * kPi / 4.0);
  CHECK(parse_angle_value(" 1.5 ") == 1.5);
  CHECK_THROWS_AS(parse_angle_value("pi*2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_angle_value("pie"), std::invalid_argument);
}

TEST_CASE("strict parsing reports the offending line") {
  CHECK(error_line("[system]\nd_zfs_mhz = 2870\nomega_0 = 3\n") == 3);
  CHECK(error_line("[system]\n[pulse]\ntau_p_ns = abc\n") == 3);
  CHECK(error_line("[systm]\n") == 1);
  CHECK(error_line("d_zfs_mhz = 2870\n") == 1);
  CHECK(error_line("[pulse]\ntau_p_ns = 5\ntau_p_ns = 6\n") == 3);
  CHECK(error_line("[pulse]\n[pulse]\n") == 2);
  CHECK(error_line("[sequence]\nengine = magic\n") == 2);
  CHECK(error_line("[sequence]\nn_points = -3\n") == 2);
  CHECK(error_line("[pulse]\ntau_p_ns\n") == 2);
  CHECK(error_line("[output]\nseed =\n") == 2);
}

TEST_CASE("semantic validation") {
  CHECK_THROWS_AS(parse_config("[system]\nomega0_mhz = 3\nb_gauss = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[system]\nelectron = two_level\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[pulse]\ntau_p_ns = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[analysis]\nwindow = exponential\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[sequence]\ndt1_ns = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[analysis]\npeak_threshold = 1.5\n"), ConfigError);
  CHECK_NOTHROW(parse_config("[system]\nelectron = two_level\ntwo_level_mhz = 2850\n"));
}

TEST_CASE("derived objects") {
  const ExperimentConfig c = parse_config(kCarbonConfig);
  const ChirpPulse p = c.chirp_pulse();
  CHECK(p.rabi_mhz == 0.0);
  CHECK(p.tau_p_ns == 60.0);
  const RamseySequence seq = c.ramsey_sequence(p, kPi);
  CHECK(seq.phase_law.alpha_const_rad == kPi);
  CHECK(seq.phase_law.w_ref_mhz == 2770.0);
  CHECK(*seq.t2star_us == 1.5);
  CHECK(c.window().kind == Window::Kind::none);
  CHECK(c.ramsey_options(3).workers == 3);
}

TEST_CASE("csv helpers") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(format_double(0.1) == "0.1");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  Provenance prov;
  prov.config_hash = 0xabcdef;
  prov.seed = 5;
  const std::string h = prov.header();
  CHECK(h.find("# config_hash: 0000000000abcdef") != std::string::npos);
  CHECK(h.find("# seed: 5") != std::string::npos);
  const std::string t = table_csv({"a", "b"}, {{"1", "2"}}, prov);
  CHECK(t.substr(t.size() - 8) == "a,b\n1,2\n");
  CHECK_THROWS_AS(table_csv({"a", "b"}, {{"1"}}, prov), std::invalid_argument);
}
