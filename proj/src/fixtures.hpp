#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace dagcast {

// A bundled instance the binary can replay without any input files: either a
// capacity computation with a pinned value, or a parameter sweep with a
// pinned row count. These double as smoke tests in CI and as ready-made
// starting points for experiments.
struct Fixture {
  std::string name;
  std::string summary;
  std::string kind;          // "capacity" or "sweep"
  std::string mode;          // capacity fixtures: "exact" or "static"
  std::string network_json;  // capacity fixtures
  std::string process_json;  // exact mode only
  double expected_lambda = 0.0;
  std::string sweep_json;    // sweep fixtures
  std::size_t expected_rows = 0;
};

const std::vector<Fixture>& fixtures();

// nullptr when the name is unknown.
const Fixture* find_fixture(const std::string& name);

// Replays the fixture and checks its expectation (capacity values within
// 1e-6, sweeps complete with every row succeeding). Returns the result
// document with a "pass" flag; sweep fixtures also hand their CSV to
// csv_out when given.
nlohmann::json run_fixture(const Fixture& f, std::string* csv_out);

}  // namespace dagcast
