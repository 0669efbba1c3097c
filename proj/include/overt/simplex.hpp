#pragma once

#include <vector>

#include "overt/mip.hpp"

namespace overt {

struct LpResult {
  enum class Status { Optimal, Infeasible, IterLimit };
  Status status = Status::IterLimit;
  double obj = 0.0;
  std::vector<double> x;  // structural variables only
};

// Dense bounded-variable primal simplex over a fixed constraint matrix;
// variable bounds change per solve (branch-and-bound fixings). Phase 1 runs
// on per-row artificials, phase 2 on the caller's objective. Not
// thread-safe: use one instance per concurrent solve.
class LpSolver {
 public:
  explicit LpSolver(const MipProblem& p);

  LpResult solve(const std::vector<double>& lo, const std::vector<double>& hi,
                 const std::vector<double>& objective, bool maximize);

 private:
  bool slack_bounds(const std::vector<double>& lo, const std::vector<double>& hi,
                    std::vector<double>& slo, std::vector<double>& shi) const;
  void refresh_basics();
  void refresh_duals();
  bool run(long iter_cap);

  int n_, m_, T_, stride_;
  std::vector<double> rows_;  // pristine tableau (A | I_slack | I_art | b)
  std::vector<Rel> rel_;
  std::vector<double> rhs_;

  // Per-solve state.
  std::vector<double> tab_, d_, cost_, lo_, hi_, xB_;
  std::vector<int> basis_;
  std::vector<char> at_upper_, in_basis_;
};

}  // namespace overt
