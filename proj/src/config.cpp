#include "chirp/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "chirp/csv_io.hpp"
#include "chirp/errors.hpp"
#include "chirp/units.hpp"

namespace chirp {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || end != s.data() + s.size() || !std::isfinite(v)) {
    throw std::invalid_argument("expected a finite number, got '" + std::string(s) + "'");
  }
  return v;
}

std::uint64_t parse_unsigned(std::string_view s) {
  s = trim(s);
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || end != s.data() + s.size()) {
    throw std::invalid_argument("expected a non-negative integer, got '" + std::string(s) + "'");
  }
  return v;
}

template <typename E>
E parse_enum(std::string_view s, std::initializer_list<E> options) {
  s = trim(s);
  std::string allowed;
  for (E e : options) {
    if (s == to_string(e)) return e;
    allowed += (allowed.empty() ? "" : ", ") + to_string(e);
  }
  throw std::invalid_argument("unknown value '" + std::string(s) + "' (expected one of: " + allowed + ")");
}

std::string list_to_string(const std::vector<double>& v) {
  std::string out;
  for (double x : v) out += (out.empty() ? "" : ", ") + format_double(x);
  return out;
}

using Setter = std::function<void(ExperimentConfig&, std::string_view)>;
using Getter = std::function<std::optional<std::string>(const ExperimentConfig&)>;

struct Field {
  std::string key;
  Setter set;
  Getter get;
};

std::optional<std::string> opt(const std::optional<double>& v) {
  return v ? std::optional<std::string>(format_double(*v)) : std::nullopt;
}

#define CHIRP_DOUBLE(section, member)                                                          \
  Field {                                                                                      \
    #member, [](ExperimentConfig& c, std::string_view v) { c.section.member = parse_number(v); }, \
        [](const ExperimentConfig& c) -> std::optional<std::string> {                          \
          return format_double(c.section.member);                                              \
        }                                                                                      \
  }
#define CHIRP_OPT_DOUBLE(section, member)                                                      \
  Field {                                                                                      \
    #member, [](ExperimentConfig& c, std::string_view v) { c.section.member = parse_number(v); }, \
        [](const ExperimentConfig& c) { return opt(c.section.member); }                        \
  }

const std::map<std::string, std::vector<Field>>& schema() {
  static const std::map<std::string, std::vector<Field>> s = [] {
    std::map<std::string, std::vector<Field>> m;
    m["system"] = {
        {"electron",
         [](ExperimentConfig& c, std::string_view v) {
           c.system.electron = parse_enum(v, {ElectronSpin::spin_one, ElectronSpin::two_level});
         },
         [](const ExperimentConfig& c) -> std::optional<std::string> { return to_string(c.system.electron); }},
        CHIRP_DOUBLE(system, d_zfs_mhz),
        CHIRP_DOUBLE(system, two_level_mhz),
        CHIRP_OPT_DOUBLE(system, omega0_mhz),
        CHIRP_OPT_DOUBLE(system, omega_perp_mhz),
        CHIRP_OPT_DOUBLE(system, b_gauss),
        CHIRP_OPT_DOUBLE(system, b_angle_deg),
        {"mode",
         [](ExperimentConfig& c, std::string_view v) {
           c.system.mode = parse_enum(v, {CouplingMode::secular, CouplingMode::full});
         },
         [](const ExperimentConfig& c) -> std::optional<std::string> { return to_string(c.system.mode); }},
    };
    m["nucleus"] = {
        {"species",
         [](ExperimentConfig& c, std::string_view v) {
           c.nuclei.back().species = parse_enum(v, {NuclearSpecies::C13, NuclearSpecies::N14});
         },
         [](const ExperimentConfig&) -> std::optional<std::string> { return std::nullopt; }},
        {"a_par_mhz", [](ExperimentConfig& c, std::string_view v) { c.nuclei.back().a_par_mhz = parse_number(v); },
         nullptr},
        {"a_perp_mhz",
         [](ExperimentConfig& c, std::string_view v) { c.nuclei.back().a_perp_mhz = parse_number(v); }, nullptr},
        {"quadrupole_mhz",
         [](ExperimentConfig& c, std::string_view v) { c.nuclei.back().quadrupole_mhz = parse_number(v); },
         nullptr},
        {"gamma_mhz_per_t",
         [](ExperimentConfig& c, std::string_view v) { c.nuclei.back().gamma_mhz_per_t = parse_number(v); },
         nullptr},
    };
    m["pulse"] = {
        CHIRP_DOUBLE(pulse, w_start_mhz),
        CHIRP_DOUBLE(pulse, w_bdw_mhz),
        CHIRP_DOUBLE(pulse, tau_p_ns),
        {"rabi_mhz",
         [](ExperimentConfig& c, std::string_view v) {
           if (trim(v) == "auto") {
             c.pulse.rabi_mhz.reset();
           } else {
             c.pulse.rabi_mhz = parse_number(v);
           }
         },
         [](const ExperimentConfig& c) -> std::optional<std::string> {
           return c.pulse.rabi_mhz ? format_double(*c.pulse.rabi_mhz) : "auto";
         }},
        CHIRP_DOUBLE(pulse, calibration_target),
        {"phase0_rad", [](ExperimentConfig& c, std::string_view v) { c.pulse.phase0_rad = parse_angle_value(v); },
         [](const ExperimentConfig& c) -> std::optional<std::string> { return format_double(c.pulse.phase0_rad); }},
    };
    m["sequence"] = {
        CHIRP_DOUBLE(sequence, t1_start_ns),
        CHIRP_DOUBLE(sequence, dt1_ns),
        {"n_points",
         [](ExperimentConfig& c, std::string_view v) { c.sequence.n_points = parse_unsigned(v); },
         [](const ExperimentConfig& c) -> std::optional<std::string> { return std::to_string(c.sequence.n_points); }},
        CHIRP_DOUBLE(sequence, w_ref_mhz),
        {"alpha_rad",
         [](ExperimentConfig& c, std::string_view v) {
           c.sequence.alpha_rad.clear();
           std::string item;
           std::stringstream ss{std::string(v)};
           while (std::getline(ss, item, ',')) c.sequence.alpha_rad.push_back(parse_angle_value(item));
         },
         [](const ExperimentConfig& c) -> std::optional<std::string> { return list_to_string(c.sequence.alpha_rad); }},
        CHIRP_OPT_DOUBLE(sequence, t2star_us),
        {"engine",
         [](ExperimentConfig& c, std::string_view v) {
           c.sequence.engine = parse_enum(v, {Engine::numeric, Engine::analytic_passage});
         },
         [](const ExperimentConfig& c) -> std::optional<std::string> { return to_string(c.sequence.engine); }},
        {"integrator",
         [](ExperimentConfig& c, std::string_view v) {
           c.sequence.integrator = parse_enum(v, {Integrator::magnus4, Integrator::midpoint});
         },
         [](const ExperimentConfig& c) -> std::optional<std::string> { return to_string(c.sequence.integrator); }},
        CHIRP_OPT_DOUBLE(sequence, frame_mhz),
    };
    m["analysis"] = {
        {"window",
         [](ExperimentConfig& c, std::string_view v) {
           c.analysis.window = parse_enum(v, {Window::Kind::none, Window::Kind::exponential});
         },
         [](const ExperimentConfig& c) -> std::optional<std::string> { return to_string(c.analysis.window); }},
        CHIRP_DOUBLE(analysis, window_tau_ns),
        {"zero_pad",
         [](ExperimentConfig& c, std::string_view v) {
           const auto z = parse_unsigned(v);
           if (z < 1 || z > 64) throw std::invalid_argument("zero_pad must lie in [1, 64]");
           c.analysis.zero_pad = static_cast<int>(z);
         },
         [](const ExperimentConfig& c) -> std::optional<std::string> { return std::to_string(c.analysis.zero_pad); }},
        CHIRP_DOUBLE(analysis, peak_threshold),
        CHIRP_DOUBLE(analysis, min_separation_mhz),
    };
    m["output"] = {
        {"directory", [](ExperimentConfig& c, std::string_view v) { c.output.directory = std::string(trim(v)); },
         [](const ExperimentConfig& c) -> std::optional<std::string> { return c.output.directory; }},
        {"seed", [](ExperimentConfig& c, std::string_view v) { c.output.seed = parse_unsigned(v); },
         [](const ExperimentConfig& c) -> std::optional<std::string> { return std::to_string(c.output.seed); }},
        {"photons_per_point",
         [](ExperimentConfig& c, std::string_view v) { c.output.photons_per_point = parse_unsigned(v); },
         [](const ExperimentConfig& c) -> std::optional<std::string> {
           return std::to_string(c.output.photons_per_point);
         }},
        CHIRP_DOUBLE(output, contrast),
    };
    return m;
  }();
  return s;
}

#undef CHIRP_DOUBLE
#undef CHIRP_OPT_DOUBLE

const std::vector<std::string>& section_order() {
  static const std::vector<std::string> order{"system", "pulse", "sequence", "analysis", "output"};
  return order;
}

}  // namespace

double parse_angle_value(std::string_view text) {
  std::string_view s = trim(text);
  const auto pos = s.find("pi");
  if (pos == std::string_view::npos) return parse_number(s);

  std::string_view coef = trim(s.substr(0, pos));
  std::string_view rest = trim(s.substr(pos + 2));
  double factor = 1.0;
  if (!coef.empty() && coef.back() == '*') coef = trim(coef.substr(0, coef.size() - 1));
  if (coef == "-") {
    factor = -1.0;
  } else if (!coef.empty() && coef != "+") {
    factor = parse_number(coef);
  }
  double divisor = 1.0;
  if (!rest.empty()) {
    if (rest.front() != '/') throw std::invalid_argument("malformed pi expression '" + std::string(s) + "'");
    divisor = parse_number(rest.substr(1));
    if (divisor == 0.0) throw std::invalid_argument("division by zero in '" + std::string(s) + "'");
  }
  return factor * kPi / divisor;
}

void ExperimentConfig::validate() const {
  const bool larmor = system.omega0_mhz || system.omega_perp_mhz;
  const bool field = system.b_gauss || system.b_angle_deg;
  if (larmor && field) throw ConfigError("[system] give either omega0_mhz/omega_perp_mhz or b_gauss/b_angle_deg");
  if (system.b_angle_deg && !system.b_gauss) throw ConfigError("[system] b_angle_deg requires b_gauss");
  if (system.electron == ElectronSpin::two_level) {
    if (!(system.two_level_mhz > 0.0)) throw ConfigError("[system] two_level requires two_level_mhz > 0");
    if (!nuclei.empty()) throw ConfigError("[nucleus] not supported with a two_level electron");
  }
  if (sequence.alpha_rad.empty()) throw ConfigError("[sequence] alpha_rad must not be empty");
  if (!(pulse.calibration_target >= 0.0 && pulse.calibration_target < 1.0)) {
    throw ConfigError("[pulse] calibration_target must lie in [0, 1)");
  }
  if (!(analysis.peak_threshold > 0.0 && analysis.peak_threshold < 1.0)) {
    throw ConfigError("[analysis] peak_threshold must lie in (0, 1)");
  }
  if (analysis.window == Window::Kind::exponential && !(analysis.window_tau_ns > 0.0)) {
    throw ConfigError("[analysis] exponential window needs window_tau_ns > 0");
  }
  if (output.photons_per_point > 0 && !(output.contrast > 0.0 && output.contrast <= 1.0)) {
    throw ConfigError("[output] contrast must lie in (0, 1]");
  }
  try {
    spin_system().validate();
    chirp_pulse().validate();
    ramsey_sequence(chirp_pulse(), sequence.alpha_rad.front()).validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

SpinSystem ExperimentConfig::spin_system() const {
  SpinSystem sys;
  if (system.electron == ElectronSpin::two_level) {
    sys = SpinSystem::two_level(system.two_level_mhz);
    sys.mode = system.mode;
    return sys;
  }
  sys.d_zfs_mhz = system.d_zfs_mhz;
  sys.mode = system.mode;
  if (system.b_gauss) {
    sys.set_field_gauss(*system.b_gauss, system.b_angle_deg.value_or(0.0) * kPi / 180.0);
  } else {
    sys.omega0_mhz = system.omega0_mhz.value_or(0.0);
    sys.omega_perp_mhz = system.omega_perp_mhz.value_or(0.0);
  }
  for (const auto& n : nuclei) {
    NuclearSpin ns = n.species == NuclearSpecies::C13 ? NuclearSpin::c13(n.a_par_mhz, n.a_perp_mhz)
                                                      : NuclearSpin::n14(n.a_par_mhz, n.a_perp_mhz, n.quadrupole_mhz);
    if (n.species == NuclearSpecies::C13) ns.quadrupole_mhz = n.quadrupole_mhz;
    if (n.gamma_mhz_per_t) ns.gamma_mhz_per_t = *n.gamma_mhz_per_t;
    sys.nuclei.push_back(ns);
  }
  return sys;
}

ChirpPulse ExperimentConfig::chirp_pulse() const {
  ChirpPulse p;
  p.w_start_mhz = pulse.w_start_mhz;
  p.w_bdw_mhz = pulse.w_bdw_mhz;
  p.tau_p_ns = pulse.tau_p_ns;
  p.rabi_mhz = pulse.rabi_mhz.value_or(0.0);
  p.phase0_rad = pulse.phase0_rad;
  return p;
}

RamseySequence ExperimentConfig::ramsey_sequence(const ChirpPulse& p, double alpha_rad) const {
  RamseySequence seq;
  seq.pulse = p;
  seq.t1_start_ns = sequence.t1_start_ns;
  seq.dt1_ns = sequence.dt1_ns;
  seq.n_points = sequence.n_points;
  seq.phase_law = {sequence.w_ref_mhz, alpha_rad};
  seq.t2star_us = sequence.t2star_us;
  return seq;
}

Window ExperimentConfig::window() const {
  return analysis.window == Window::Kind::none ? Window::none() : Window::exponential(analysis.window_tau_ns);
}

RamseyOptions ExperimentConfig::ramsey_options(unsigned workers) const {
  RamseyOptions opts;
  opts.workers = workers;
  opts.propagator.integrator = sequence.integrator;
  if (sequence.frame_mhz) opts.propagator.frame = FrameSpec{*sequence.frame_mhz};
  opts.passage.numeric = opts.propagator;
  return opts;
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  const auto& sch = schema();
  std::string section;
  std::set<std::string> seen_sections;
  std::set<std::string> seen_keys;
  int line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("malformed section header", line_no);
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!sch.count(section)) throw ConfigError("unknown section [" + section + "]", line_no);
      if (section == "nucleus") {
        cfg.nuclei.emplace_back();
      } else if (!seen_sections.insert(section).second) {
        throw ConfigError("duplicate section [" + section + "]", line_no);
      }
      seen_keys.clear();
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", line_no);
    if (section.empty()) throw ConfigError("key outside of any section", line_no);
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    const auto& fields = sch.at(section);
    const auto it = std::find_if(fields.begin(), fields.end(), [&](const Field& f) { return f.key == key; });
    if (it == fields.end()) throw ConfigError("unknown key '" + key + "' in [" + section + "]", line_no);
    if (!seen_keys.insert(key).second) throw ConfigError("duplicate key '" + key + "'", line_no);
    if (value.empty()) throw ConfigError("empty value for '" + key + "'", line_no);
    try {
      it->set(cfg, value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(key + ": " + e.what(), line_no);
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  const auto& sch = schema();
  std::ostringstream os;
  auto emit_section = [&](const std::string& name) {
    os << '[' << name << "]\n";
    for (const Field& f : sch.at(name)) {
      if (auto v = f.get(cfg)) os << f.key << " = " << *v << '\n';
    }
    os << '\n';
  };
  emit_section("system");
  for (const auto& n : cfg.nuclei) {
    os << "[nucleus]\n";
    os << "species = " << to_string(n.species) << '\n';
    os << "a_par_mhz = " << format_double(n.a_par_mhz) << '\n';
    os << "a_perp_mhz = " << format_double(n.a_perp_mhz) << '\n';
    os << "quadrupole_mhz = " << format_double(n.quadrupole_mhz) << '\n';
    if (n.gamma_mhz_per_t) os << "gamma_mhz_per_t = " << format_double(*n.gamma_mhz_per_t) << '\n';
    os << '\n';
  }
  for (const auto& name : section_order()) {
    if (name != "system") emit_section(name);
  }
  return os.str();
}

}  // namespace chirp
