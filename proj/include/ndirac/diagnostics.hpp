#pragma once

#include "ndirac/nehari.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ndirac {

struct CheckEntry {
  std::string name;
  bool pass = false;
  double margin = 0.0;     ///< signed slack; >= 0 means satisfied
  double tolerance = 0.0;
  std::size_t samples = 0;
  std::string detail;
};

struct DiagnosticsReport {
  Grid grid{16, 8.0};
  std::string model_description;
  std::uint64_t seed = 0;
  std::string rng = "std::mt19937_64";
  std::vector<CheckEntry> checks;  ///< model conditions first, then the canonical battery in order
  FConditionReport f_report;
  VkReport vk_report;
  double embedding_constant = 0.0;
  MountainPass mountain_pass;
  double wall_time = 0.0;

  bool all_pass() const;
  const CheckEntry* find(const std::string& name) const;
};

/// Names of the canonical battery, in report order.
const std::vector<std::string>& canonical_checks();

/// Runs the model-condition checks followed by the twelve canonical
/// identity/inequality checks. Failures (including thrown errors) become
/// report entries; the run itself does not throw.
DiagnosticsReport run_suite(const ProblemModel& model, std::uint64_t seed);

/// int_{|x|>r} K |u|^q / int K |u|^q over the grid. Requires r < L and q in [2, 3].
double tail_fraction(const SpinorField& u, double r, double q, const ProblemModel& model);

/// Measure of {x : t0 <= |u(x)| <= t1}. Requires 0 < t0 < t1.
double superlevel_measure(const SpinorField& u, double t0, double t1);

}  // namespace ndirac
