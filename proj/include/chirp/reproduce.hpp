#pragma once

#include <string>
#include <vector>

namespace chirp {

enum class Scenario { bare_nv, nitrogen, carbon, bfield };
std::string to_string(Scenario s);
/// Throws std::invalid_argument for unknown names.
Scenario parse_scenario(const std::string& name);

struct CriterionResult {
  std::string name;
  std::string measured;
  std::string expected;
  bool pass = false;
};

struct ScenarioReport {
  Scenario scenario;
  std::vector<CriterionResult> results;
  double seconds = 0.0;
  bool passed() const;
  /// One `PASS|FAIL name: measured ... expected ...` line per criterion.
  std::string text() const;
};

/// Runs one canned scenario with noiseless numeric propagation.
ScenarioReport reproduce(Scenario s, unsigned workers = 1);

}  // namespace chirp
