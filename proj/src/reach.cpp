#include <algorithm>
#include <cmath>
#include <future>

#include "overt/reach.hpp"

namespace overt {

bool Box::contains(const std::vector<double>& x, double tol) const {
  if (x.size() != dims.size()) return false;
  for (size_t i = 0; i < dims.size(); ++i)
    if (x[i] < dims[i].lo - tol || x[i] > dims[i].hi + tol) return false;
  return true;
}
bool Box::contains(const Box& other, double tol) const {
  if (other.size() != size()) return false;
  for (size_t i = 0; i < dims.size(); ++i)
    if (other.dims[i].lo < dims[i].lo - tol || other.dims[i].hi > dims[i].hi + tol)
      return false;
  return true;
}
double Box::max_width() const {
  double w = 0.0;
  for (const auto& d : dims) w = std::max(w, d.width());
  return w;
}

void Property::validate() const {
  if (t_begin < 1 || t_end < t_begin)
    throw std::invalid_argument("Property: need 1 <= t_begin <= t_end");
  if (atoms.empty()) throw std::invalid_argument("Property: empty predicate");
}

int ConcretizationSchedule::horizon() const {
  int h = 0;
  for (int s : segments) h += s;
  return h;
}
void ConcretizationSchedule::validate(int expected_horizon) const {
  for (int s : segments)
    if (s < 1) throw std::invalid_argument("schedule: segment lengths must be positive");
  if (horizon() != expected_horizon)
    throw std::invalid_argument("schedule: segments must sum to the horizon");
}

std::vector<Interval> control_range(const SystemSpec& system, const Network* controller,
                                    const Box& state_box) {
  if (system.control_dim() == 0) return {};
  if (!controller) throw std::invalid_argument("control_range: controller required");
  return output_range(*controller, state_box.dims, RangeMethod::IntervalArithmetic);
}

namespace {

// Exact closed-loop runs from a few deterministic points of the input box;
// the resulting coordinates are attainable inside the abstraction, so they
// make valid incumbents.
std::vector<std::vector<double>> corner_trajectories(const SystemSpec& system,
                                                     const Network* controller,
                                                     const Box& input, size_t steps) {
  std::vector<std::vector<double>> starts;
  const size_t dim = input.size();
  if (dim <= 10) {
    for (size_t mask = 0; mask < (size_t{1} << dim); ++mask) {
      std::vector<double> x(dim);
      for (size_t k = 0; k < dim; ++k)
        x[k] = (mask >> k) & 1 ? input.dims[k].hi : input.dims[k].lo;
      starts.push_back(std::move(x));
    }
  }
  {
    std::vector<double> mid(dim);
    for (size_t k = 0; k < dim; ++k) mid[k] = input.dims[k].mid();
    starts.push_back(std::move(mid));
  }
  std::vector<std::vector<double>> finals;
  for (auto& x0 : starts) {
    std::vector<double> x = x0;
    bool ok = true;
    for (size_t t = 0; t < steps && ok; ++t) {
      std::vector<double> u;
      if (system.control_dim()) u = forward(*controller, x);
      try {
        x = system.step(x, u);
      } catch (const EvalError&) {
        ok = false;  // left a partial function's domain; skip this seed
      }
    }
    if (ok) finals.push_back(std::move(x));
  }
  return finals;
}

}  // namespace

std::optional<Box> symbolic_reach(const std::vector<const OverApproximation*>& steps,
                                  const Box& input, const Network* controller,
                                  const SystemSpec& system, const ReachOptions& opt,
                                  SolveEffort* effort) {
  if (steps.empty()) return input;
  QueryOptions qopt;
  qopt.smooth_activations = opt.smooth_activations;
  qopt.approx = opt.approx;
  UnrolledQuery q = build_query(steps, input.dims, controller, qopt);
  const size_t n = steps.size();
  const size_t dim = input.size();

  std::vector<std::vector<double>> seeds;
  if (opt.seed_incumbents) seeds = corner_trajectories(system, controller, input, n);

  struct Task {
    size_t k;
    bool maximize;
  };
  std::vector<Task> tasks;
  for (size_t k = 0; k < dim; ++k) {
    tasks.push_back({k, false});
    tasks.push_back({k, true});
  }

  std::vector<SolveResult> results(tasks.size());
  auto run_task = [&](size_t i) {
    const Task& t = tasks[i];
    MipProblem p = q.problem;
    p.objective = LinExpr::of_var(q.state_vars[n][t.k]);
    p.maximize = t.maximize;
    SolveOptions so = opt.solver;
    if (!seeds.empty()) {
      double best = t.maximize ? -1e300 : 1e300;
      for (const auto& s : seeds)
        best = t.maximize ? std::max(best, s[t.k]) : std::min(best, s[t.k]);
      so.known_feasible_objective = best;
    }
    results[i] = optimize(p, so);
  };

  const int jobs = std::max(1, opt.jobs);
  for (size_t at = 0; at < tasks.size();) {
    size_t batch = std::min<size_t>(jobs, tasks.size() - at);
    if (batch == 1) {
      run_task(at++);
      continue;
    }
    std::vector<std::future<void>> fs;
    for (size_t b = 0; b < batch; ++b)
      fs.push_back(std::async(std::launch::async, run_task, at + b));
    for (auto& f : fs) f.get();
    at += batch;
  }

  Box out;
  out.dims.resize(dim);
  for (size_t k = 0; k < dim; ++k) {
    const SolveResult& lo = results[2 * k];
    const SolveResult& hi = results[2 * k + 1];
    if (effort) {
      effort->absorb(lo.stats);
      effort->absorb(hi.stats);
    }
    auto usable = [](const SolveResult& r) {
      return (r.status == SolveResult::Status::Optimal ||
              r.status == SolveResult::Status::BoundOnly) &&
             std::isfinite(r.bound);
    };
    if (!usable(lo) || !usable(hi)) return std::nullopt;
    // Certified bounds, nudged outward against rounding, clipped to the
    // variable's own (sound) domain bounds.
    const auto& var = q.problem.vars[q.state_vars[n][k]];
    double l = std::max(var.lo, lo.bound - (1e-9 + 1e-12 * std::fabs(lo.bound)));
    double h = std::min(var.hi, hi.bound + (1e-9 + 1e-12 * std::fabs(hi.bound)));
    if (l > h) {
      double mid = 0.5 * (l + h);
      l = mid;
      h = mid;
    }
    if (h - l < 1e-12) {  // numeric floor keeps downstream domains well-posed
      double mid = 0.5 * (l + h);
      l = mid - 5e-13;
      h = mid + 5e-13;
    }
    out.dims[k] = Interval(l, h);
  }
  return out;
}

OverApproximation abstract_closed_loop(const SystemSpec& system, const Network* controller,
                                       const Box& state_box, const ReachOptions& opt) {
  return overapproximate_dynamics(system, state_box.dims,
                                  control_range(system, controller, state_box), opt.approx);
}

ReachResult compute_reach_sets(const SystemSpec& system, const Network* controller,
                               const Box& initial, const ConcretizationSchedule& schedule,
                               const ReachOptions& opt) {
  ReachResult out;
  Box sym_input = initial;
  Box frontier = initial;
  std::vector<OverApproximation> approximations;
  int t = 0;
  for (int n : schedule.segments) {
    for (int i = 1; i <= n - 1; ++i) {
      approximations.push_back(abstract_closed_loop(system, controller, frontier, opt));
      std::vector<const OverApproximation*> one{&approximations.back()};
      auto box = symbolic_reach(one, frontier, controller, system, opt, &out.effort);
      if (!box) {
        out.complete = false;
        return out;
      }
      frontier = *box;
      out.boxes.push_back({++t, frontier, false});
    }
    approximations.push_back(abstract_closed_loop(system, controller, frontier, opt));
    std::vector<const OverApproximation*> window;
    for (size_t j = approximations.size() - n; j < approximations.size(); ++j)
      window.push_back(&approximations[j]);
    auto box = symbolic_reach(window, sym_input, controller, system, opt, &out.effort);
    if (!box) {
      out.complete = false;
      return out;
    }
    frontier = *box;
    out.boxes.push_back({++t, frontier, true});
    sym_input = frontier;
  }
  return out;
}

Verdict evaluate_property(const std::vector<TimedBox>& boxes, const Property& prop,
                          const std::vector<std::string>& state_names) {
  prop.validate();
  auto atom_range = [&](const LinearAtom& atom, const Box& box) {
    double lo = 0.0, hi = 0.0;
    for (const auto& [name, coef] : atom.coeffs) {
      auto it = std::find(state_names.begin(), state_names.end(), name);
      if (it == state_names.end())
        throw std::invalid_argument("evaluate_property: unknown state " + name);
      const Interval& d = box.dims[it - state_names.begin()];
      if (coef >= 0) {
        lo += coef * d.lo;
        hi += coef * d.hi;
      } else {
        lo += coef * d.hi;
        hi += coef * d.lo;
      }
    }
    return Interval(lo, hi);
  };
  // Per box: all atoms hold everywhere / all fail somewhere / the box is
  // entirely outside one atom.
  auto box_inside = [&](const Box& b) {
    for (const auto& atom : prop.atoms) {
      Interval r = atom_range(atom, b);
      bool ok = atom.rel == Rel::Ge ? r.lo >= atom.rhs : r.hi <= atom.rhs;
      if (!ok) return false;
    }
    return true;
  };
  auto box_disjoint = [&](const Box& b) {
    for (const auto& atom : prop.atoms) {
      Interval r = atom_range(atom, b);
      bool miss = atom.rel == Rel::Ge ? r.hi < atom.rhs : r.lo > atom.rhs;
      if (miss) return true;
    }
    return false;
  };

  std::vector<const TimedBox*> in_range;
  for (const auto& tb : boxes)
    if (tb.t >= prop.t_begin && tb.t <= prop.t_end) in_range.push_back(&tb);
  if (static_cast<int>(in_range.size()) != prop.t_end - prop.t_begin + 1)
    throw std::invalid_argument("evaluate_property: boxes do not cover the timestep range");

  Verdict v;
  if (prop.modality == Property::Modality::G) {
    for (const auto* tb : in_range) {
      if (!box_inside(tb->box)) {
        v.status = Verdict::Status::Inconclusive;
        v.reason = "reachable box at t=" + std::to_string(tb->t) +
                   " overlaps the negated predicate";
        return v;
      }
    }
    v.status = Verdict::Status::Holds;
    v.reason = "every reachable box lies inside the predicate";
    return v;
  }
  // F: subset of the goal at some step proves it; disjoint everywhere
  // disproves it.
  for (const auto* tb : in_range) {
    if (box_inside(tb->box)) {
      v.status = Verdict::Status::Holds;
      v.reason = "reachable box at t=" + std::to_string(tb->t) + " lies inside the goal";
      return v;
    }
  }
  bool all_disjoint = true;
  for (const auto* tb : in_range) all_disjoint = all_disjoint && box_disjoint(tb->box);
  if (all_disjoint) {
    v.status = Verdict::Status::Fails;
    v.reason = "every reachable box is disjoint from the goal: the goal is never reached";
    return v;
  }
  v.status = Verdict::Status::Inconclusive;
  v.reason = "reachable boxes neither enter the goal fully nor avoid it";
  return v;
}

bool replay_counterexample(const SystemSpec& system, const Network* controller,
                           const std::vector<double>& x0, int horizon, const Property& prop,
                           std::vector<std::vector<double>>* trajectory) {
  std::vector<double> x = x0;
  if (trajectory) trajectory->push_back(x);
  auto atom_value = [&](const LinearAtom& atom, const std::vector<double>& state) {
    double v = 0.0;
    for (const auto& [name, coef] : atom.coeffs) {
      auto it = std::find(system.state_names.begin(), system.state_names.end(), name);
      if (it == system.state_names.end())
        throw std::invalid_argument("replay: unknown state " + name);
      v += coef * state[it - system.state_names.begin()];
    }
    return v;
  };
  bool violated = false;
  for (int t = 1; t <= horizon; ++t) {
    std::vector<double> u;
    if (system.control_dim()) u = forward(*controller, x);
    try {
      x = system.step(x, u);
    } catch (const EvalError&) {
      return false;  // replay left the model's domain; treat as spurious
    }
    if (trajectory) trajectory->push_back(x);
    if (t >= prop.t_begin && t <= prop.t_end) {
      bool sat = true;
      for (const auto& atom : prop.atoms) {
        double v = atom_value(atom, x);
        sat = sat && (atom.rel == Rel::Ge ? v >= atom.rhs : v <= atom.rhs);
      }
      if (prop.modality == Property::Modality::G && !sat) violated = true;
    }
  }
  return violated;
}

}  // namespace overt
