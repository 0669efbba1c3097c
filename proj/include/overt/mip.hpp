#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "overt/expr.hpp"
#include "overt/interval.hpp"
#include "overt/network.hpp"
#include "overt/overapprox.hpp"

namespace overt {

// Linear expression over problem variables, kept sorted by index.
struct LinExpr {
  std::map<int, double> terms;
  double constant = 0.0;

  LinExpr() = default;
  explicit LinExpr(double c) : constant(c) {}
  static LinExpr of_var(int v, double coef = 1.0) {
    LinExpr e;
    e.terms[v] = coef;
    return e;
  }
  LinExpr& operator+=(const LinExpr& o);
  LinExpr& operator-=(const LinExpr& o);
  LinExpr& operator*=(double s);
  bool is_constant() const { return terms.empty(); }
};

enum class Rel { Le, Ge, Eq };

struct MipProblem {
  struct Var {
    std::string name;
    double lo, hi;
    bool binary = false;
  };
  struct Con {
    LinExpr expr;  // constant folded into rhs on insertion
    Rel rel;
    double rhs;
  };

  std::vector<Var> vars;
  std::vector<Con> cons;
  std::optional<LinExpr> objective;
  bool maximize = false;

  int add_var(const std::string& name, double lo, double hi, bool binary = false);
  int add_binary(const std::string& name) { return add_var(name, 0.0, 1.0, true); }
  void add_con(LinExpr e, Rel rel, double rhs);

  // Interval of a linear expression from variable bounds.
  Interval activity(const LinExpr& e) const;
  size_t num_binaries() const;
  void validate() const;  // finite bounds everywhere

  // Largest absolute constraint violation of a full assignment.
  double violation(const std::vector<double>& x) const;
};

struct SolveOptions {
  double int_tol = 1e-6;
  double gap_abs = 1e-8;
  double gap_rel = 1e-9;
  long max_nodes = 1000000;
  double time_limit_s = std::numeric_limits<double>::infinity();
  // Objective value known to be attainable (e.g. from simulating the
  // concrete system): used as the starting incumbent for pruning.
  std::optional<double> known_feasible_objective;
};

struct SolveStats {
  long nodes = 0;
  long lp_solves = 0;
};

struct SolveResult {
  enum class Status {
    Optimal,     // primal and bound agree within the gap
    BoundOnly,   // resource limit; bound is still certified
    Feasible,    // feasibility query: witness found
    Infeasible,  // search tree closed with no feasible point
    Error,       // resource limit on a feasibility query, or numerical failure
  };
  Status status = Status::Error;
  double primal = std::numeric_limits<double>::quiet_NaN();
  double bound = std::numeric_limits<double>::quiet_NaN();  // certified dual bound
  std::vector<double> witness;  // full assignment when available
  SolveStats stats;
  std::string message;
};

// Pluggable backend; the bundled reference implementation is a dense
// bounded-variable simplex under best-bound branch and bound.
class MipSolver {
 public:
  virtual ~MipSolver() = default;
  virtual SolveResult optimize(const MipProblem& p, const SolveOptions& opt) = 0;
  virtual SolveResult check_feasible(const MipProblem& p, const SolveOptions& opt) = 0;
};

std::unique_ptr<MipSolver> make_reference_solver();
// Honors OVERT_SOLVER (only "reference" ships; unknown names throw).
std::unique_ptr<MipSolver> make_solver_from_env();

SolveResult optimize(const MipProblem& p, const SolveOptions& opt = {});
SolveResult check_feasible(const MipProblem& p, const SolveOptions& opt = {});

std::string to_lp_format(const MipProblem& p);

// ---- Encoding -----------------------------------------------------------

// Incremental encoder; thin sugar over MipProblem that tracks fresh names.
class MipBuilder {
 public:
  MipProblem problem;

  int add_cont(const std::string& name, const Interval& dom);
  int add_bin(const std::string& name);
  void add_row(LinExpr e, Rel rel, double rhs);
  Interval activity(const LinExpr& e) const { return problem.activity(e); }
  std::string fresh(const std::string& stem);

  // Bounded relu/min/max encodings. Interval-fixed cases collapse to the
  // operand itself and introduce no binaries.
  LinExpr encode_relu(const LinExpr& z, const std::string& tag);
  LinExpr encode_minmax(bool is_max, const std::vector<LinExpr>& ops, const std::string& tag);

  // Encodes an affine/min/max/relu expression tree over named variables.
  LinExpr encode_expr(const Expr& e, const std::map<std::string, int>& vars,
                      const std::string& tag);

  // Ties `inputs` to the network outputs; bounds come from an interval pass
  // over `box`. Tanh layers route through the one-dimensional bound
  // machinery when `smooth` is set.
  std::vector<LinExpr> encode_network(const Network& net, const std::vector<Interval>& box,
                                      const std::vector<LinExpr>& inputs,
                                      const std::string& tag, bool smooth = false,
                                      const ApproxParams* smooth_params = nullptr);

 private:
  int fresh_counter_ = 0;
};

// Exact output envelope of a relu/linear network via 2*out certified
// optimizations.
std::vector<Interval> output_range_mip(const Network& net, const std::vector<Interval>& box);

// ---- Closed-loop unrolling ----------------------------------------------

// Linear predicate over named state variables: sum coeffs*x rel rhs.
struct LinearAtom {
  std::map<std::string, double> coeffs;
  Rel rel = Rel::Ge;
  double rhs = 0.0;
};

struct QueryOptions {
  bool smooth_activations = false;  // tanh controllers through PWL bounds
  ApproxParams approx;              // used only for smooth activations
};

// Time-indexed unrolled closed loop: one OverApproximation per step,
// chained on shared state variables, with the controller encoded at every
// step. The result exposes variable indices for states per timestep.
struct UnrolledQuery {
  MipProblem problem;
  std::vector<std::vector<int>> state_vars;  // [t][dim], t = 0..n
};

UnrolledQuery build_query(const std::vector<const OverApproximation*>& steps,
                          const std::vector<Interval>& input_box, const Network* controller,
                          const QueryOptions& opt = {});

// Appends the negation of `conj` (a conjunction of atoms) over the state
// variables at timestep `t`; a multi-atom negation becomes an indicator
// disjunction.
void append_negated_predicate(UnrolledQuery& q, const std::vector<LinearAtom>& conj,
                              size_t t, const std::vector<std::string>& state_names);

}  // namespace overt
