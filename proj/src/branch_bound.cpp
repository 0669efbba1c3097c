#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <queue>

#include "overt/mip.hpp"
#include "overt/simplex.hpp"

namespace overt {

namespace {

using Clock = std::chrono::steady_clock;

struct Node {
  long id = 0;
  double key = std::numeric_limits<double>::infinity();  // inherited bound
  std::vector<std::pair<int, int8_t>> fixings;
};

struct NodeOrder {
  // Best bound first; ties prefer the newest node (plunge).
  bool operator()(const Node& a, const Node& b) const {
    if (a.key != b.key) return a.key < b.key;
    return a.id < b.id;
  }
};

// Activity-based bound tightening with a conservative slack so no feasible
// point is ever cut. Returns false on detected infeasibility.
bool propagate(const MipProblem& p, std::vector<double>& lo, std::vector<double>& hi) {
  constexpr double kViol = 1e-7;
  // Guard against cutting feasible points to rounding error, scaled to the
  // magnitude of the derived bound.
  auto slack_for = [](double v) { return 1e-12 + 1e-12 * std::fabs(v); };
  for (int round = 0; round < 4; ++round) {
    bool changed = false;
    for (const auto& con : p.cons) {
      double act_lo = 0.0, act_hi = 0.0;
      for (const auto& [j, a] : con.expr.terms) {
        if (a > 0) {
          act_lo += a * lo[j];
          act_hi += a * hi[j];
        } else {
          act_lo += a * hi[j];
          act_hi += a * lo[j];
        }
      }
      bool upper = con.rel != Rel::Ge;  // a'x <= rhs applies
      bool lower = con.rel != Rel::Le;  // a'x >= rhs applies
      if (upper && act_lo > con.rhs + kViol) return false;
      if (lower && act_hi < con.rhs - kViol) return false;
      for (const auto& [j, a] : con.expr.terms) {
        double contrib_lo = a > 0 ? a * lo[j] : a * hi[j];
        double contrib_hi = a > 0 ? a * hi[j] : a * lo[j];
        if (upper) {
          double others = act_lo - contrib_lo;
          double room = con.rhs - others;
          if (a > 0) {
            double cand = room / a; cand += slack_for(cand);
            if (cand < hi[j] - kViol) { hi[j] = cand; changed = true; }
          } else {
            double cand = room / a; cand -= slack_for(cand);
            if (cand > lo[j] + kViol) { lo[j] = cand; changed = true; }
          }
        }
        if (lower) {
          double others = act_hi - contrib_hi;
          double room = con.rhs - others;
          if (a > 0) {
            double cand = room / a; cand -= slack_for(cand);
            if (cand > lo[j] + kViol) { lo[j] = cand; changed = true; }
          } else {
            double cand = room / a; cand += slack_for(cand);
            if (cand < hi[j] - kViol) { hi[j] = cand; changed = true; }
          }
        }
      }
    }
    for (size_t j = 0; j < p.vars.size(); ++j) {
      if (lo[j] > hi[j] + kViol) return false;
      if (lo[j] > hi[j]) lo[j] = hi[j];
      if (p.vars[j].binary) {
        if (lo[j] > 1e-6) lo[j] = 1.0;
        if (hi[j] < 1.0 - 1e-6) hi[j] = 0.0;
        if (lo[j] > hi[j]) return false;
      }
    }
    if (!changed) break;
  }
  return true;
}

class ReferenceSolver final : public MipSolver {
 public:
  SolveResult optimize(const MipProblem& p, const SolveOptions& opt) override {
    return solve(p, opt, false);
  }
  SolveResult check_feasible(const MipProblem& p, const SolveOptions& opt) override {
    return solve(p, opt, true);
  }

 private:
  SolveResult solve(const MipProblem& p, const SolveOptions& opt, bool feasibility) {
    SolveResult res;
    p.validate();
    if (!feasibility && !p.objective) {
      res.message = "optimize: no objective";
      return res;
    }

    const auto t0 = Clock::now();
    auto elapsed = [&] {
      return std::chrono::duration<double>(Clock::now() - t0).count();
    };

    const int n = static_cast<int>(p.vars.size());
    std::vector<double> c(n, 0.0);
    const double sense = p.maximize ? 1.0 : -1.0;  // internally always maximize
    if (p.objective)
      for (const auto& [j, coef] : p.objective->terms) c[j] = sense * coef;
    const double obj_shift = p.objective ? p.objective->constant : 0.0;

    std::vector<int> binaries;
    for (int j = 0; j < n; ++j)
      if (p.vars[j].binary) binaries.push_back(j);

    std::vector<double> root_lo(n), root_hi(n);
    for (int j = 0; j < n; ++j) {
      root_lo[j] = p.vars[j].lo;
      root_hi[j] = p.vars[j].hi;
    }

    LpSolver lp(p);
    double incumbent = -std::numeric_limits<double>::infinity();
    std::vector<double> incumbent_x;
    if (!feasibility && opt.known_feasible_objective)
      incumbent = sense * (*opt.known_feasible_objective - obj_shift);
    double pruned_bound = -std::numeric_limits<double>::infinity();
    bool limit_hit = false;

    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    long next_id = 0;
    open.push(Node{next_id++, std::numeric_limits<double>::infinity(), {}});

    std::vector<double> lo(n), hi(n);
    while (!open.empty()) {
      if (res.stats.nodes >= opt.max_nodes || elapsed() > opt.time_limit_s) {
        limit_hit = true;
        break;
      }
      Node node = open.top();
      open.pop();
      ++res.stats.nodes;

      double gap = std::max(opt.gap_abs, opt.gap_rel * std::fabs(incumbent));
      if (!feasibility && node.key <= incumbent + gap) {
        // Best-first: nothing left can improve on the incumbent.
        pruned_bound = std::max(pruned_bound, node.key);
        break;
      }

      lo = root_lo;
      hi = root_hi;
      for (auto [j, v] : node.fixings) {
        lo[j] = v;
        hi[j] = v;
      }
      if (!propagate(p, lo, hi)) continue;

      LpResult lpres = lp.solve(lo, hi, c, true);
      ++res.stats.lp_solves;
      if (lpres.status == LpResult::Status::Infeasible) continue;
      if (lpres.status == LpResult::Status::IterLimit) {
        res.status = SolveResult::Status::Error;
        res.message = "LP iteration limit";
        return res;
      }
      double z = lpres.obj;
      if (!feasibility && z <= incumbent + gap) {
        pruned_bound = std::max(pruned_bound, z);
        continue;
      }

      int branch_var = -1;
      double best_frac = opt.int_tol;
      for (int j : binaries) {
        double f = std::fabs(lpres.x[j] - std::round(lpres.x[j]));
        if (f > best_frac) {
          best_frac = f;
          branch_var = j;
        }
      }
      if (branch_var < 0) {
        // Integer feasible. Binaries may sit a hair off 0/1; re-solving
        // with them pinned polishes the point to simplex precision.
        bool exact = true;
        for (int j : binaries)
          exact = exact && (lo[j] == hi[j] || lpres.x[j] == std::round(lpres.x[j]));
        if (!exact) {
          for (int j : binaries) lo[j] = hi[j] = std::round(lpres.x[j]);
          LpResult polished = lp.solve(lo, hi, c, true);
          ++res.stats.lp_solves;
          if (polished.status == LpResult::Status::Optimal) lpres = std::move(polished);
        }
        double leaf = lpres.obj;
        if (feasibility) {
          for (int j : binaries) lpres.x[j] = std::round(lpres.x[j]);
          double viol = p.violation(lpres.x);
          if (viol > 1e-7) {
            res.status = SolveResult::Status::Error;
            res.message = "witness failed substitution check";
            return res;
          }
          res.status = SolveResult::Status::Feasible;
          res.witness = std::move(lpres.x);
          res.primal = 0.0;
          res.bound = 0.0;
          return res;
        }
        if (leaf > incumbent) {
          incumbent = leaf;
          incumbent_x = lpres.x;
          for (int j : binaries) incumbent_x[j] = std::round(incumbent_x[j]);
        }
        pruned_bound = std::max(pruned_bound, z);
        continue;
      }

      Node a{next_id++, feasibility ? node.key : z, node.fixings};
      a.fixings.emplace_back(branch_var, int8_t{0});
      Node b{next_id++, feasibility ? node.key : z, node.fixings};
      b.fixings.emplace_back(branch_var, int8_t{1});
      // Push the rounded side last so equal keys plunge toward it.
      if (lpres.x[branch_var] >= 0.5) {
        open.push(a);
        open.push(b);
      } else {
        open.push(b);
        open.push(a);
      }
    }

    if (feasibility) {
      if (limit_hit || !open.empty()) {
        res.status = SolveResult::Status::Error;
        res.message = "resource limit before the search tree closed";
      } else {
        res.status = SolveResult::Status::Infeasible;
      }
      return res;
    }

    double open_max = -std::numeric_limits<double>::infinity();
    while (!open.empty()) {
      open_max = std::max(open_max, open.top().key);
      open.pop();
    }
    double global_bound = std::max({incumbent, pruned_bound, open_max});
    bool have_primal = incumbent > -std::numeric_limits<double>::infinity();
    if (limit_hit) {
      res.status = SolveResult::Status::BoundOnly;
      res.message = "node or time limit";
    } else if (!have_primal) {
      res.status = SolveResult::Status::Infeasible;
      return res;
    } else {
      res.status = SolveResult::Status::Optimal;
    }
    res.primal = have_primal ? sense * incumbent + obj_shift
                             : std::numeric_limits<double>::quiet_NaN();
    res.bound = sense * global_bound + obj_shift;
    res.witness = std::move(incumbent_x);
    return res;
  }
};

}  // namespace

std::unique_ptr<MipSolver> make_reference_solver() {
  return std::make_unique<ReferenceSolver>();
}

std::unique_ptr<MipSolver> make_solver_from_env() {
  const char* env = std::getenv("OVERT_SOLVER");
  std::string name = env ? env : "reference";
  if (name == "reference" || name.empty()) return make_reference_solver();
  throw std::invalid_argument("OVERT_SOLVER: unknown backend '" + name +
                              "' (available: reference)");
}

namespace {
MipSolver& env_solver() {
  // The reference backend is stateless, so concurrent solves may share it.
  static std::unique_ptr<MipSolver> solver = make_solver_from_env();
  return *solver;
}
}  // namespace

SolveResult optimize(const MipProblem& p, const SolveOptions& opt) {
  return env_solver().optimize(p, opt);
}
SolveResult check_feasible(const MipProblem& p, const SolveOptions& opt) {
  return env_solver().check_feasible(p, opt);
}

}  // namespace overt
