#include "overt/simplex.hpp"

#include <cmath>

namespace overt {

namespace {

constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr double kFeasTol = 1e-7;

}  // namespace

LpSolver::LpSolver(const MipProblem& p)
    : n_(static_cast<int>(p.vars.size())), m_(static_cast<int>(p.cons.size())) {
  T_ = n_ + 2 * m_;
  stride_ = T_ + 1;
  // Static copies of the constraint matrix in dense row-major form.
  rows_.assign(static_cast<size_t>(m_) * stride_, 0.0);
  rel_.resize(m_);
  rhs_.resize(m_);
  for (int i = 0; i < m_; ++i) {
    const auto& c = p.cons[i];
    double* row = &rows_[static_cast<size_t>(i) * stride_];
    for (const auto& [v, coef] : c.expr.terms) row[v] = coef;
    row[n_ + i] = 1.0;           // slack
    row[n_ + m_ + i] = 1.0;      // artificial
    row[T_] = c.rhs;
    rel_[i] = c.rel;
    rhs_[i] = c.rhs;
  }
}

// Computes slack bounds for the current structural bounds; returns false
// when a row cannot be satisfied inside the box at all.
bool LpSolver::slack_bounds(const std::vector<double>& lo, const std::vector<double>& hi,
                            std::vector<double>& slo, std::vector<double>& shi) const {
  for (int i = 0; i < m_; ++i) {
    const double* row = &rows_[static_cast<size_t>(i) * stride_];
    double amin = 0.0, amax = 0.0;
    for (int j = 0; j < n_; ++j) {
      double a = row[j];
      if (a == 0.0) continue;
      if (a > 0) {
        amin += a * lo[j];
        amax += a * hi[j];
      } else {
        amin += a * hi[j];
        amax += a * lo[j];
      }
    }
    // slack = rhs - a'x, then clipped by the relation's sign requirement
    double s_lo = rhs_[i] - amax, s_hi = rhs_[i] - amin;
    switch (rel_[i]) {
      case Rel::Le: s_lo = std::max(s_lo, 0.0); break;                 // a'x <= b
      case Rel::Ge: s_hi = std::min(s_hi, 0.0); break;                 // a'x >= b
      case Rel::Eq: s_lo = std::max(s_lo, 0.0); s_hi = std::min(s_hi, 0.0); break;
    }
    if (s_lo > s_hi + kFeasTol) return false;
    if (s_lo > s_hi) s_lo = s_hi;
    slo[i] = s_lo;
    shi[i] = s_hi;
  }
  return true;
}

void LpSolver::refresh_basics() {
  for (int i = 0; i < m_; ++i) {
    const double* row = &tab_[static_cast<size_t>(i) * stride_];
    double v = row[T_];
    for (int j = 0; j < T_; ++j) {
      if (in_basis_[j]) continue;
      double xj = at_upper_[j] ? hi_[j] : lo_[j];
      if (xj != 0.0 && row[j] != 0.0) v -= row[j] * xj;
    }
    xB_[i] = v;
  }
}

void LpSolver::refresh_duals() {
  for (int j = 0; j < T_; ++j) d_[j] = cost_[j];
  for (int i = 0; i < m_; ++i) {
    double cb = cost_[basis_[i]];
    if (cb == 0.0) continue;
    const double* row = &tab_[static_cast<size_t>(i) * stride_];
    for (int j = 0; j < T_; ++j) d_[j] -= cb * row[j];
  }
}

// Primal simplex with bounded variables on the current tableau/cost.
// Returns false on iteration exhaustion.
bool LpSolver::run(long iter_cap) {
  int degenerate_streak = 0;
  bool bland = false;
  for (long iter = 0; iter < iter_cap; ++iter) {
    if ((iter & 511) == 511) {
      refresh_basics();
      refresh_duals();
    }
    // Pricing.
    int q = -1;
    double best = kDualTol;
    for (int j = 0; j < T_; ++j) {
      if (in_basis_[j] || lo_[j] == hi_[j]) continue;
      double viol = at_upper_[j] ? d_[j] : -d_[j];
      if (viol > best) {
        q = j;
        if (bland) break;
        best = viol;
      }
    }
    if (q < 0) return true;  // optimal

    double dir = at_upper_[q] ? -1.0 : 1.0;
    const double t_flip = hi_[q] - lo_[q];
    double t_best = t_flip;
    int leave = -1;
    double leave_rate = 0.0;
    for (int i = 0; i < m_; ++i) {
      double alpha = tab_[static_cast<size_t>(i) * stride_ + q];
      if (std::fabs(alpha) <= kPivotTol) continue;
      double rate = -dir * alpha;  // d xB_i / dt
      int k = basis_[i];
      double t;
      if (rate > 0.0)
        t = (hi_[k] - xB_[i]) / rate;
      else
        t = (lo_[k] - xB_[i]) / rate;
      if (t < -1e-9) t = 0.0;  // basic slightly out of bounds: degenerate step
      if (t < t_best - 1e-12 ||
          (leave >= 0 && t < t_best + 1e-12 &&
           std::fabs(alpha) > std::fabs(leave_rate) + 1e-12)) {
        t_best = std::max(t, 0.0);
        leave = i;
        leave_rate = alpha;
      }
    }

    if (t_best >= 1e30) return false;  // cannot happen with finite bounds

    if (leave < 0) {
      // Bound flip of the entering variable.
      for (int i = 0; i < m_; ++i) {
        double alpha = tab_[static_cast<size_t>(i) * stride_ + q];
        if (alpha != 0.0) xB_[i] += -dir * alpha * t_best;
      }
      at_upper_[q] = !at_upper_[q];
      degenerate_streak = 0;
      continue;
    }

    // Pivot q into row `leave`.
    for (int i = 0; i < m_; ++i) {
      if (i == leave) continue;
      double alpha = tab_[static_cast<size_t>(i) * stride_ + q];
      if (alpha != 0.0) xB_[i] += -dir * alpha * t_best;
    }
    double enter_val = (at_upper_[q] ? hi_[q] : lo_[q]) + dir * t_best;
    int k = basis_[leave];
    double rate = -dir * leave_rate;
    at_upper_[k] = rate > 0.0;  // leaves at the bound it ran into
    in_basis_[k] = false;

    double* prow = &tab_[static_cast<size_t>(leave) * stride_];
    double piv = prow[q];
    double inv = 1.0 / piv;
    for (int j = 0; j <= T_; ++j) prow[j] *= inv;
    prow[q] = 1.0;
    for (int i = 0; i < m_; ++i) {
      if (i == leave) continue;
      double* row = &tab_[static_cast<size_t>(i) * stride_];
      double f = row[q];
      if (f == 0.0) continue;
      for (int j = 0; j <= T_; ++j) row[j] -= f * prow[j];
      row[q] = 0.0;
    }
    double dq = d_[q];
    if (dq != 0.0) {
      for (int j = 0; j < T_; ++j) d_[j] -= dq * prow[j];
      d_[q] = 0.0;
    }

    basis_[leave] = q;
    in_basis_[q] = true;
    xB_[leave] = enter_val;

    if (t_best * std::fabs(dq) < 1e-12) {
      if (++degenerate_streak > 60) bland = true;
    } else {
      degenerate_streak = 0;
      bland = false;
    }
  }
  return false;
}

LpResult LpSolver::solve(const std::vector<double>& lo, const std::vector<double>& hi,
                         const std::vector<double>& objective, bool maximize) {
  LpResult res;
  lo_.assign(T_, 0.0);
  hi_.assign(T_, 0.0);
  for (int j = 0; j < n_; ++j) {
    lo_[j] = lo[j];
    hi_[j] = hi[j];
    if (lo_[j] > hi_[j]) {
      res.status = LpResult::Status::Infeasible;
      return res;
    }
  }
  {
    std::vector<double> slo(m_), shi(m_);
    if (!slack_bounds(lo, hi, slo, shi)) {
      res.status = LpResult::Status::Infeasible;
      return res;
    }
    for (int i = 0; i < m_; ++i) {
      lo_[n_ + i] = slo[i];
      hi_[n_ + i] = shi[i];
    }
  }

  tab_ = rows_;
  basis_.resize(m_);
  at_upper_.assign(T_, 0);
  in_basis_.assign(T_, 0);
  xB_.assign(m_, 0.0);
  cost_.assign(T_, 0.0);
  d_.assign(T_, 0.0);

  // Start: structurals at lower bound, slacks basic, artificials absorbing
  // whatever violation remains.
  bool need_phase1 = false;
  for (int i = 0; i < m_; ++i) {
    const double* row = &rows_[static_cast<size_t>(i) * stride_];
    double ax = 0.0;
    for (int j = 0; j < n_; ++j)
      if (row[j] != 0.0) ax += row[j] * lo_[j];
    double want = rhs_[i] - ax;
    double clamped = std::min(std::max(want, lo_[n_ + i]), hi_[n_ + i]);
    double resid = want - clamped;
    int art = n_ + m_ + i;
    if (std::fabs(resid) > kFeasTol) {
      need_phase1 = true;
      lo_[art] = std::min(0.0, resid);
      hi_[art] = std::max(0.0, resid);
      cost_[art] = resid > 0 ? 1.0 : -1.0;
      basis_[i] = art;
      in_basis_[art] = true;
      xB_[i] = resid;
      at_upper_[n_ + i] = clamped == hi_[n_ + i] && lo_[n_ + i] != hi_[n_ + i];
    } else {
      lo_[art] = hi_[art] = 0.0;
      basis_[i] = n_ + i;
      in_basis_[n_ + i] = true;
      xB_[i] = clamped;
    }
  }

  const long iter_cap = 20000 + 40L * (m_ + T_);
  if (need_phase1) {
    refresh_duals();
    if (!run(iter_cap)) {
      res.status = LpResult::Status::IterLimit;
      return res;
    }
    double infeas = 0.0;
    for (int i = 0; i < m_; ++i) {
      int b = basis_[i];
      if (b >= n_ + m_) infeas += std::fabs(xB_[i]);
    }
    for (int j = n_ + m_; j < T_; ++j)
      if (!in_basis_[j]) infeas += std::fabs(at_upper_[j] ? hi_[j] : lo_[j]);
    if (infeas > kFeasTol * (1 + m_)) {
      res.status = LpResult::Status::Infeasible;
      return res;
    }
    // Pin artificials to zero for phase 2.
    for (int i = 0; i < m_; ++i) {
      int art = n_ + m_ + i;
      lo_[art] = hi_[art] = 0.0;
    }
  }

  std::fill(cost_.begin(), cost_.end(), 0.0);
  double sense = maximize ? -1.0 : 1.0;
  for (int j = 0; j < n_; ++j) cost_[j] = sense * objective[j];
  refresh_basics();
  refresh_duals();
  if (!run(iter_cap)) {
    res.status = LpResult::Status::IterLimit;
    return res;
  }

  refresh_basics();
  res.x.assign(n_, 0.0);
  for (int j = 0; j < n_; ++j)
    if (!in_basis_[j]) res.x[j] = at_upper_[j] ? hi_[j] : lo_[j];
  for (int i = 0; i < m_; ++i) {
    int b = basis_[i];
    if (b < n_) res.x[b] = xB_[i];
    if (b >= n_ + m_ && std::fabs(xB_[i]) > kFeasTol * 10) {
      res.status = LpResult::Status::Infeasible;  // stuck artificial
      return res;
    }
  }
  double obj = 0.0;
  for (int j = 0; j < n_; ++j) obj += objective[j] * res.x[j];
  res.obj = obj;
  res.status = LpResult::Status::Optimal;
  return res;
}

}  // namespace overt
