#include <cmath>

#include "overt/reach.hpp"

namespace overt {

namespace {

enum class FeasOutcome { Unsat, Sat, Unknown };

// One symbolic feasibility query: unroll `window` from `input_set`, append
// the negated predicate at the final step.
FeasOutcome multi_step_feas(const std::vector<const OverApproximation*>& window,
                            const Box& input_set, const Network* controller,
                            const SystemSpec& system, const Property& prop,
                            const ReachOptions& opt, SolveEffort* effort,
                            std::vector<std::vector<double>>* witness_states) {
  QueryOptions qopt;
  qopt.smooth_activations = opt.smooth_activations;
  qopt.approx = opt.approx;
  UnrolledQuery q = build_query(window, input_set.dims, controller, qopt);
  append_negated_predicate(q, prop.atoms, window.size(), system.state_names);
  SolveResult r = check_feasible(q.problem, opt.solver);
  if (effort) effort->absorb(r.stats);
  switch (r.status) {
    case SolveResult::Status::Infeasible:
      return FeasOutcome::Unsat;
    case SolveResult::Status::Feasible: {
      if (witness_states) {
        witness_states->clear();
        for (const auto& step_vars : q.state_vars) {
          std::vector<double> x;
          for (int v : step_vars) x.push_back(r.witness[v]);
          witness_states->push_back(std::move(x));
        }
      }
      return FeasOutcome::Sat;
    }
    default:
      return FeasOutcome::Unknown;
  }
}

Verdict sat_verdict(const SystemSpec& system, const Network* controller, const Box& initial,
                    int horizon, const Property& prop,
                    std::vector<std::vector<double>>&& states) {
  Verdict v;
  v.counterexample = std::move(states);
  // Replay the abstract counterexample through the exact dynamics from its
  // initial state (clamped into the input set against solver tolerance).
  std::vector<double> x0 = v.counterexample.front();
  for (size_t k = 0; k < x0.size(); ++k)
    x0[k] = std::min(std::max(x0[k], initial.dims[k].lo), initial.dims[k].hi);
  bool real = replay_counterexample(system, controller, x0, horizon, prop);
  v.counterexample_real = real;
  if (real) {
    v.status = Verdict::Status::Fails;
    v.reason = "abstract counterexample replays to a real violation";
  } else {
    v.status = Verdict::Status::Inconclusive;
    v.reason = "abstract counterexample is spurious on replay";
  }
  return v;
}

}  // namespace

Verdict feasibility_G(const SystemSpec& system, const Network* controller, const Box& initial,
                      int horizon, const Property& prop, const ReachOptions& opt,
                      SolveEffort* effort) {
  prop.validate();
  if (prop.modality != Property::Modality::G)
    throw std::invalid_argument("feasibility_G: property must be an invariant (G)");
  Box frontier = initial;
  std::vector<OverApproximation> approximations;
  const int last_check = std::min(horizon, prop.t_end);
  for (int i = 1; i <= last_check; ++i) {
    approximations.push_back(abstract_closed_loop(system, controller, frontier, opt));
    std::vector<const OverApproximation*> window;
    for (const auto& a : approximations) window.push_back(&a);

    if (i >= prop.t_begin && i <= prop.t_end) {
      std::vector<std::vector<double>> states;
      FeasOutcome out = multi_step_feas(window, initial, controller, system, prop, opt,
                                        effort, &states);
      if (out == FeasOutcome::Unknown) {
        Verdict v;
        v.status = Verdict::Status::Unknown;
        v.reason = "solver hit a resource limit at step " + std::to_string(i);
        return v;
      }
      if (out == FeasOutcome::Sat)
        return sat_verdict(system, controller, initial, horizon, prop, std::move(states));
    }

    std::vector<const OverApproximation*> last{&approximations.back()};
    auto next = symbolic_reach(last, frontier, controller, system, opt, effort);
    if (!next) {
      Verdict v;
      v.status = Verdict::Status::Unknown;
      v.reason = "one-step reach failed at step " + std::to_string(i);
      return v;
    }
    frontier = *next;
  }
  Verdict v;
  v.status = Verdict::Status::Holds;
  v.reason = "negated predicate infeasible at every step";
  return v;
}

Verdict feasibility_F(const SystemSpec& system, const Network* controller, const Box& initial,
                      int horizon, const Property& prop, const ReachOptions& opt,
                      SolveEffort* effort) {
  prop.validate();
  if (prop.modality != Property::Modality::F)
    throw std::invalid_argument("feasibility_F: property must be goal-reaching (F)");
  Box frontier = initial;
  std::vector<OverApproximation> approximations;
  bool any_unknown = false;
  for (int i = 1; i <= horizon && i <= prop.t_end; ++i) {
    approximations.push_back(abstract_closed_loop(system, controller, frontier, opt));
    std::vector<const OverApproximation*> window;
    for (const auto& a : approximations) window.push_back(&a);

    if (i >= prop.t_begin) {
      FeasOutcome out = multi_step_feas(window, initial, controller, system, prop, opt,
                                        effort, nullptr);
      if (out == FeasOutcome::Unsat) {
        // Every abstract trace satisfies the goal at step i.
        Verdict v;
        v.status = Verdict::Status::Holds;
        v.reason = "all abstract traces meet the goal at t=" + std::to_string(i);
        return v;
      }
      if (out == FeasOutcome::Unknown) any_unknown = true;
    }

    std::vector<const OverApproximation*> last{&approximations.back()};
    auto next = symbolic_reach(last, frontier, controller, system, opt, effort);
    if (!next) {
      Verdict v;
      v.status = Verdict::Status::Unknown;
      v.reason = "one-step reach failed at step " + std::to_string(i);
      return v;
    }
    frontier = *next;
  }
  Verdict v;
  v.status = any_unknown ? Verdict::Status::Unknown : Verdict::Status::Inconclusive;
  v.reason = "no step where the goal provably captures all abstract traces";
  return v;
}

Verdict hs_feasibility_G(const SystemSpec& system, const Network* controller,
                         const Box& initial, int horizon, const Property& prop,
                         const ResetPolicy& reset, const ReachOptions& opt,
                         SolveEffort* effort) {
  prop.validate();
  if (prop.modality != Property::Modality::G)
    throw std::invalid_argument("hs_feasibility_G: property must be an invariant (G)");
  Box input_set = initial;
  Box frontier = initial;
  std::vector<OverApproximation> approximations;
  size_t window_start = 0;
  int remaining = horizon;
  int i = 1;
  int global_t = 1;

  while (i <= remaining && global_t <= prop.t_end) {
    approximations.push_back(abstract_closed_loop(system, controller, frontier, opt));
    std::vector<const OverApproximation*> window;
    for (size_t j = window_start; j < approximations.size(); ++j)
      window.push_back(&approximations[j]);

    if (global_t >= prop.t_begin && global_t <= prop.t_end) {
      std::vector<std::vector<double>> states;
      FeasOutcome out = multi_step_feas(window, input_set, controller, system, prop, opt,
                                        effort, &states);
      if (out == FeasOutcome::Unknown) {
        Verdict v;
        v.status = Verdict::Status::Unknown;
        v.reason = "solver hit a resource limit at step " + std::to_string(global_t);
        return v;
      }
      if (out == FeasOutcome::Sat) {
        // The windowed trace starts at the last reset, not at t=0, so a
        // replay only makes sense from the window's own initial state.
        Verdict v = sat_verdict(system, controller, input_set, remaining, prop,
                                std::move(states));
        return v;
      }
    }

    bool do_reset = false;
    switch (reset.kind) {
      case ResetPolicy::Kind::Never: do_reset = false; break;
      case ResetPolicy::Kind::FixedInterval:
        do_reset = reset.interval > 0 && i % reset.interval == 0;
        break;
      case ResetPolicy::Kind::DiameterGrowth:
        do_reset = frontier.max_width() >
                   reset.growth_factor * std::max(1e-12, input_set.max_width());
        break;
    }

    if (do_reset && i < remaining) {
      auto boxed = symbolic_reach(window, input_set, controller, system, opt, effort);
      if (!boxed) {
        Verdict v;
        v.status = Verdict::Status::Unknown;
        v.reason = "symbolic concretization failed at step " + std::to_string(global_t);
        return v;
      }
      frontier = *boxed;
      input_set = frontier;
      remaining -= i;
      i = 1;
      window_start = approximations.size();
      ++global_t;
      continue;
    }

    std::vector<const OverApproximation*> last{&approximations.back()};
    auto next = symbolic_reach(last, frontier, controller, system, opt, effort);
    if (!next) {
      Verdict v;
      v.status = Verdict::Status::Unknown;
      v.reason = "one-step reach failed at step " + std::to_string(global_t);
      return v;
    }
    frontier = *next;
    ++i;
    ++global_t;
  }
  Verdict v;
  v.status = Verdict::Status::Holds;
  v.reason = "negated predicate infeasible at every step";
  return v;
}

}  // namespace overt
