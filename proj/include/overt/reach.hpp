#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "overt/mip.hpp"
#include "overt/network.hpp"
#include "overt/overapprox.hpp"

namespace overt {

struct Box {
  std::vector<Interval> dims;

  Box() = default;
  explicit Box(std::vector<Interval> d) : dims(std::move(d)) {}
  size_t size() const { return dims.size(); }
  bool contains(const std::vector<double>& x, double tol = 0.0) const;
  bool contains(const Box& other, double tol = 0.0) const;
  double max_width() const;
};

// Bounded temporal predicate: modality over an inclusive timestep range,
// with a conjunction of linear atoms over the state names.
struct Property {
  enum class Modality { G, F };
  Modality modality = Modality::G;
  int t_begin = 1;
  int t_end = 1;
  std::vector<LinearAtom> atoms;

  void validate() const;
};

struct ConcretizationSchedule {
  std::vector<int> segments;
  int horizon() const;
  void validate(int expected_horizon) const;
};

struct TimedBox {
  int t = 0;
  Box box;
  bool symbolic = false;
};

struct Verdict {
  enum class Status { Holds, Fails, Inconclusive, Unknown };
  Status status = Status::Unknown;
  std::string reason;
  // Abstract counterexample trace (states for t = 0..k) when a feasibility
  // query found one; `counterexample_real` marks a replay that violates the
  // property on the exact system.
  std::vector<std::vector<double>> counterexample;
  bool counterexample_real = false;
};

struct ResetPolicy {
  enum class Kind { Never, FixedInterval, DiameterGrowth };
  Kind kind = Kind::FixedInterval;
  int interval = 5;
  double growth_factor = 2.0;
};

struct ReachOptions {
  ApproxParams approx;
  SolveOptions solver;
  int jobs = 1;
  // Simulate a handful of exact trajectories from the input set to seed
  // solver incumbents; sound because true trajectories satisfy the
  // abstraction.
  bool seed_incumbents = true;
  bool smooth_activations = false;
};

struct SolveEffort {
  long lp_solves = 0;
  long bb_nodes = 0;
  long mip_solves = 0;
  void absorb(const SolveStats& s) {
    lp_solves += s.lp_solves;
    bb_nodes += s.nodes;
    ++mip_solves;
  }
};

// Certified min/max box of the state after `steps.size()` timesteps from
// `input` through the chained abstractions. Nullopt when any solve comes
// back unusable (error or unbounded certified bound).
std::optional<Box> symbolic_reach(const std::vector<const OverApproximation*>& steps,
                                  const Box& input, const Network* controller,
                                  const SystemSpec& system, const ReachOptions& opt,
                                  SolveEffort* effort = nullptr);

struct ReachResult {
  std::vector<TimedBox> boxes;  // one per timestep 1..horizon (prefix on unknown)
  bool complete = true;
  SolveEffort effort;
};

// Hybrid-symbolic reachable sets: within each schedule segment of length n,
// n-1 one-step concrete sets from successive re-abstraction, then one
// symbolic solve from the segment's entry box.
ReachResult compute_reach_sets(const SystemSpec& system, const Network* controller,
                               const Box& initial, const ConcretizationSchedule& schedule,
                               const ReachOptions& opt);

// Invariant-feasibility driver: at each step i <= n the negated predicate
// is appended at step i of a query chained from the original initial set;
// holds only if every step is infeasible.
Verdict feasibility_G(const SystemSpec& system, const Network* controller, const Box& initial,
                      int horizon, const Property& prop, const ReachOptions& opt,
                      SolveEffort* effort = nullptr);

// Goal-reaching variant: holds as soon as one step's negated-goal query is
// infeasible (every abstract trace meets the goal there).
Verdict feasibility_F(const SystemSpec& system, const Network* controller, const Box& initial,
                      int horizon, const Property& prop, const ReachOptions& opt,
                      SolveEffort* effort = nullptr);

// Feasibility with periodic symbolic concretization: on reset the frontier
// becomes the new input set, the horizon shrinks, and the step counter
// restarts.
Verdict hs_feasibility_G(const SystemSpec& system, const Network* controller,
                         const Box& initial, int horizon, const Property& prop,
                         const ResetPolicy& reset, const ReachOptions& opt,
                         SolveEffort* effort = nullptr);

// Adjudicates a property against per-timestep boxes. G: holds when every
// box in range avoids the negated region, never fails from boxes alone.
// F: holds when some box sits inside the goal; proven failure when every
// box in range misses the goal entirely.
Verdict evaluate_property(const std::vector<TimedBox>& boxes, const Property& prop,
                          const std::vector<std::string>& state_names);

// Simulates the exact closed loop from the trace's initial state; returns
// true (real counterexample) when the property fails on the replay.
bool replay_counterexample(const SystemSpec& system, const Network* controller,
                           const std::vector<double>& x0, int horizon, const Property& prop,
                           std::vector<std::vector<double>>* trajectory = nullptr);

// Interval control range for an abstraction step ([] for autonomous
// systems).
std::vector<Interval> control_range(const SystemSpec& system, const Network* controller,
                                    const Box& state_box);

// One step of the closed loop abstracted over a state box (control range
// from the controller via interval propagation).
OverApproximation abstract_closed_loop(const SystemSpec& system, const Network* controller,
                                       const Box& state_box, const ReachOptions& opt);

}  // namespace overt
