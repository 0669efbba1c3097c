#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "overt/network.hpp"
#include "overt/reach.hpp"

namespace overt {

struct BenchmarkInstance {
  SystemSpec system;
  Property property;
  Box initial;
  int horizon = 0;
  ConcretizationSchedule default_schedule;
  // Named linear measurements over the state (e.g. the spacing margin of a
  // cruise-control system), reported alongside raw state boxes.
  std::map<std::string, std::map<std::string, double>> derived_outputs;
};

// Built-in systems: "pendulum", "tora", "car", "acc".
BenchmarkInstance get_system(const std::string& name);
std::vector<std::string> benchmark_names();

struct Trajectory {
  std::vector<std::vector<double>> states;    // horizon + 1 entries
  std::vector<std::vector<double>> controls;  // horizon entries
};

struct McResult {
  std::vector<Trajectory> trajectories;
  std::vector<Box> hulls;  // per-timestep min/max envelope, index 0 = initial
};

// Exact closed-loop rollouts from uniform samples of the initial box;
// deterministic under the seed. Sample 0 is the box midpoint.
McResult simulate_mc(const BenchmarkInstance& instance, const Network& controller,
                     int samples, uint64_t seed, int horizon_override = -1,
                     bool keep_trajectories = false);

SystemSpec load_system(const std::string& path);
std::string system_to_json_text(const SystemSpec& s);

}  // namespace overt
