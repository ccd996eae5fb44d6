#pragma once

#include "serpent/scenario.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace serpent {

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scenario families:
///   open     one sparse column, goal just past it
///   ablation two or three staggered columns with narrow passages
///   trap     two columns; the robot starts threaded through a column-0 gap
///            that leads nowhere and must back out to use another one
enum class Difficulty { open, ablation, trap };

std::string to_string(Difficulty d);
Difficulty difficulty_from_string(const std::string& s);

struct SuiteParams {
  Difficulty difficulty = Difficulty::ablation;
  int num_units = 5;
  int subunits_per_unit = 5;
  double resolution = 0.01;
  int attempts_per_scenario = 200;  // retry budget before GenerationError
};

struct GeneratedScenario {
  Scenario scenario;
  /// Valid transitions from the start; the goal is the last state's tip.
  std::vector<Configuration> walk;
  const Configuration& witness() const { return walk.back(); }
};

/// Deterministic in (seed, count, params).
std::vector<GeneratedScenario> generate_suite(std::uint64_t seed, int count, const SuiteParams& params);
GeneratedScenario generate_scenario(std::uint64_t seed, int index, const SuiteParams& params);

/// Writes `<name>.scn` per scenario into `dir` (created if needed).
std::vector<std::filesystem::path> write_suite(const std::filesystem::path& dir,
                                               const std::vector<GeneratedScenario>& suite);

}  // namespace serpent
