#include "mecc/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace mecc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotEps = 1e-9;
constexpr double kCostEps = 1e-9;

// Bounded-variable two-phase primal simplex on a dense tableau. Bland's rule
// is used for both the entering and the leaving choice, which rules out
// cycling and keeps the pivot sequence deterministic.
class BoundedSimplex {
 public:
  BoundedSimplex(const LinearProgram& lp) : lp_(lp) { build(); }

  LpSolution run() {
    LpSolution out;
    if (trivially_infeasible_) {
      out.status = LpStatus::infeasible;
      return out;
    }
    if (!phase1()) {
      out.status = LpStatus::infeasible;
      return out;
    }
    if (!phase2()) {
      out.status = LpStatus::unbounded;
      return out;
    }
    out.status = LpStatus::optimal;
    out.x.assign(xval_.begin(), xval_.begin() + n_);
    out.value = 0;
    for (std::size_t j = 0; j < n_; ++j) out.value += lp_.objective[j] * out.x[j];
    audit(out);
    return out;
  }

 private:
  void build() {
    n_ = lp_.num_vars();
    const std::size_t m_ub = lp_.a_ub.size();
    const std::size_t m_eq = lp_.a_eq.size();

    lo_.assign(n_, 0.0);
    hi_.assign(n_, kInf);
    if (!lp_.lower.empty()) lo_ = lp_.lower;
    if (!lp_.upper.empty()) hi_ = lp_.upper;

    // Row-normalize and collect all rows as equalities with slack columns.
    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
    std::vector<int> slack_of_row;
    for (std::size_t i = 0; i < m_ub + m_eq; ++i) {
      const bool is_ub = i < m_ub;
      const auto& src = is_ub ? lp_.a_ub[i] : lp_.a_eq[i - m_ub];
      double b = is_ub ? lp_.b_ub[i] : lp_.b_eq[i - m_ub];
      double norm = 0;
      for (double a : src) norm = std::max(norm, std::fabs(a));
      if (norm == 0) {
        // 0 <= b or 0 = b: decide now, the tableau never sees this row.
        const bool ok = is_ub ? b >= -1e-12 * (1 + std::fabs(b)) : std::fabs(b) <= 1e-12;
        if (!ok) trivially_infeasible_ = true;
        continue;
      }
      std::vector<double> row(src);
      for (double& a : row) a /= norm;
      rows.push_back(std::move(row));
      rhs.push_back(b / norm);
      slack_of_row.push_back(is_ub ? 1 : 0);
    }

    m_ = rows.size();
    const std::size_t n_slack = static_cast<std::size_t>(
        std::count(slack_of_row.begin(), slack_of_row.end(), 1));
    nc_ = n_ + n_slack + m_;
    art0_ = n_ + n_slack;

    tab_.assign(m_, std::vector<double>(nc_, 0.0));
    lo_.resize(nc_, 0.0);
    hi_.resize(nc_, kInf);
    xval_.assign(nc_, 0.0);
    at_upper_.assign(nc_, 0);
    in_basis_.assign(nc_, 0);
    basis_.assign(m_, 0);

    // Nonbasic structurals start at their lower bound.
    for (std::size_t j = 0; j < n_; ++j) xval_[j] = lo_[j];

    std::size_t next_slack = n_;
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) tab_[i][j] = rows[i][j];
      if (slack_of_row[i]) tab_[i][next_slack++] = 1.0;
      double resid = rhs[i];
      for (std::size_t j = 0; j < n_; ++j) resid -= rows[i][j] * xval_[j];
      const bool flipped = resid < 0;
      if (flipped) {  // flip the whole equation so the artificial starts >= 0
        for (std::size_t j = 0; j < nc_; ++j) tab_[i][j] = -tab_[i][j];
        resid = -resid;
      }
      rhs_.push_back(flipped ? -rhs[i] : rhs[i]);
      const std::size_t art = art0_ + i;
      tab_[i][art] = 1.0;
      basis_[i] = static_cast<int>(art);
      in_basis_[art] = 1;
      xval_[art] = resid;
    }
    a0_ = tab_;  // pristine copy for residual computation
  }

  // The artificial columns of the running tableau hold the basis inverse, so
  // the basic values can be recomputed from the original data; two rounds of
  // iterative refinement against the pristine rows then push the residual of
  // the basic system down to machine precision. This washes out the drift
  // the incremental updates accumulate across pivots.
  void refresh_basic_values() {
    for (std::size_t i = 0; i < m_; ++i) {
      double xb = 0;
      for (std::size_t k = 0; k < m_; ++k) xb += tab_[i][art0_ + k] * rhs_[k];
      for (std::size_t j = 0; j < art0_; ++j) {
        if (in_basis_[j] || xval_[j] == 0) continue;
        xb -= tab_[i][j] * xval_[j];
      }
      xval_[basis_[i]] = xb;
    }
    std::vector<double> resid(m_);
    for (int round = 0; round < 2; ++round) {
      for (std::size_t i = 0; i < m_; ++i) {
        double r = rhs_[i];
        for (std::size_t j = 0; j < nc_; ++j) {
          if (xval_[j] != 0) r -= a0_[i][j] * xval_[j];
        }
        resid[i] = r;
      }
      for (std::size_t i = 0; i < m_; ++i) {
        double delta = 0;
        for (std::size_t k = 0; k < m_; ++k) delta += tab_[i][art0_ + k] * resid[k];
        xval_[basis_[i]] += delta;
      }
    }
  }

  // One simplex phase over the current objective row. Returns false when an
  // improving ray is unbounded.
  bool iterate(std::vector<double>& d) {
    const int max_iters = 500 + 50 * static_cast<int>(nc_);
    double cost_scale = 1.0;
    for (double v : d) cost_scale = std::max(cost_scale, std::fabs(v));
    const double ceps = kCostEps * cost_scale;

    for (int iter = 0; iter < max_iters; ++iter) {
      // Entering: smallest eligible index (Bland).
      int enter = -1;
      int dir = 0;
      for (std::size_t j = 0; j < nc_; ++j) {
        if (in_basis_[j] || hi_[j] - lo_[j] <= 0) continue;
        if (!at_upper_[j] && d[j] < -ceps) { enter = static_cast<int>(j); dir = 1; break; }
        if (at_upper_[j] && d[j] > ceps) { enter = static_cast<int>(j); dir = -1; break; }
      }
      if (enter < 0) return true;  // phase optimum

      // Ratio test against the basics and the entering variable's own span.
      double t_best = hi_[enter] - lo_[enter];  // bound flip distance, may be inf
      int leave_row = -1;
      int leave_var = -1;
      bool leave_at_upper = false;
      for (std::size_t i = 0; i < m_; ++i) {
        const double coef = dir * tab_[i][enter];
        const int bv = basis_[i];
        double t;
        bool to_upper;
        if (coef > kPivotEps) {
          t = (xval_[bv] - lo_[bv]) / coef;
          to_upper = false;
        } else if (coef < -kPivotEps && hi_[bv] < kInf) {
          t = (xval_[bv] - hi_[bv]) / coef;
          to_upper = true;
        } else {
          continue;
        }
        if (t < 0) t = 0;  // degenerate basics may sit a hair past the bound
        const bool take = t < t_best ||
                          (t == t_best && leave_row >= 0 && bv < leave_var);
        if (take) {
          t_best = t;
          leave_row = static_cast<int>(i);
          leave_var = bv;
          leave_at_upper = to_upper;
        }
      }
      if (t_best == kInf) return false;  // unbounded ray

      // Move every basic along the entering direction.
      const double delta = dir * t_best;
      xval_[enter] += delta;
      for (std::size_t i = 0; i < m_; ++i) xval_[basis_[i]] -= delta * tab_[i][enter];

      if (leave_row < 0) {  // plain bound flip
        at_upper_[enter] = !at_upper_[enter];
        xval_[enter] = at_upper_[enter] ? hi_[enter] : lo_[enter];
        continue;
      }

      // Pivot: entering becomes basic in leave_row.
      xval_[leave_var] = leave_at_upper ? hi_[leave_var] : lo_[leave_var];
      at_upper_[leave_var] = leave_at_upper;
      in_basis_[leave_var] = 0;
      in_basis_[enter] = 1;
      basis_[leave_row] = enter;

      auto& prow = tab_[leave_row];
      const double piv = prow[enter];
      if (std::fabs(piv) < kPivotEps) throw std::logic_error("solve_lp: vanishing pivot");
      for (double& a : prow) a /= piv;
      for (std::size_t i = 0; i < m_; ++i) {
        if (i == static_cast<std::size_t>(leave_row)) continue;
        const double f = tab_[i][enter];
        if (f == 0) continue;
        for (std::size_t j = 0; j < nc_; ++j) tab_[i][j] -= f * prow[j];
        tab_[i][enter] = 0;
      }
      const double fd = d[enter];
      if (fd != 0) {
        for (std::size_t j = 0; j < nc_; ++j) d[j] -= fd * prow[j];
        d[enter] = 0;
      }
      // Instances are tiny; recomputing the basic values from the pristine
      // rows after every pivot keeps the ratio test honest on knife-edge
      // feasible sets.
      refresh_basic_values();
    }
    throw std::logic_error("solve_lp: simplex failed to terminate");
  }

  bool phase1() {
    std::vector<double> d(nc_, 0.0);
    // Reduced costs of min(sum of artificials) with the artificial basis.
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t j = 0; j < nc_; ++j) d[j] -= tab_[i][j];
    for (std::size_t i = 0; i < m_; ++i) d[basis_[i]] = 0;

    if (!iterate(d)) throw std::logic_error("solve_lp: phase 1 unbounded");

    refresh_basic_values();
    double infeas = 0;
    for (std::size_t k = 0; k < m_; ++k) infeas += std::fabs(xval_[art0_ + k]);
    if (infeas > 1e-7) return false;

    // Pin artificials at zero and pivot basic ones out where possible.
    for (std::size_t k = 0; k < m_; ++k) {
      lo_[art0_ + k] = hi_[art0_ + k] = 0.0;
      xval_[art0_ + k] = 0.0;
    }
    for (std::size_t i = 0; i < m_; ++i) {
      const std::size_t bv = static_cast<std::size_t>(basis_[i]);
      if (bv < art0_) continue;
      std::size_t piv_col = nc_;
      for (std::size_t j = 0; j < art0_; ++j) {
        if (!in_basis_[j] && std::fabs(tab_[i][j]) > 1e-7) { piv_col = j; break; }
      }
      if (piv_col == nc_) continue;  // redundant row, artificial stays pinned at 0
      in_basis_[bv] = 0;
      at_upper_[bv] = 0;
      in_basis_[piv_col] = 1;
      basis_[i] = static_cast<int>(piv_col);
      auto& prow = tab_[i];
      const double piv = prow[piv_col];
      for (double& a : prow) a /= piv;
      for (std::size_t r = 0; r < m_; ++r) {
        if (r == i) continue;
        const double f = tab_[r][piv_col];
        if (f == 0) continue;
        for (std::size_t j = 0; j < nc_; ++j) tab_[r][j] -= f * prow[j];
        tab_[r][piv_col] = 0;
      }
    }
    return true;
  }

  bool phase2() {
    std::vector<double> d(nc_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) d[j] = lp_.objective[j];
    for (std::size_t i = 0; i < m_; ++i) {
      const int bv = basis_[i];
      const double cb = bv < static_cast<int>(n_) ? lp_.objective[bv] : 0.0;
      if (cb == 0) continue;
      for (std::size_t j = 0; j < nc_; ++j) d[j] -= cb * tab_[i][j];
    }
    for (std::size_t i = 0; i < m_; ++i) d[basis_[i]] = 0;
    if (!iterate(d)) return false;
    refresh_basic_values();
    return true;
  }

  void audit(const LpSolution& out) const {
    auto fail = [](const char* what, std::size_t idx, double amount) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "solve_lp: optimal point violates %s %zu by %.3e", what,
                    idx, amount);
      throw std::logic_error(buf);
    };
    for (std::size_t i = 0; i < lp_.a_ub.size(); ++i) {
      double lhs = 0;
      for (std::size_t j = 0; j < n_; ++j) lhs += lp_.a_ub[i][j] * out.x[j];
      if (lhs - lp_.b_ub[i] > 1e-8 * (1 + std::fabs(lp_.b_ub[i])))
        fail("inequality row", i, lhs - lp_.b_ub[i]);
    }
    for (std::size_t i = 0; i < lp_.a_eq.size(); ++i) {
      double lhs = 0;
      for (std::size_t j = 0; j < n_; ++j) lhs += lp_.a_eq[i][j] * out.x[j];
      if (std::fabs(lhs - lp_.b_eq[i]) > 1e-8 * (1 + std::fabs(lp_.b_eq[i])))
        fail("equality row", i, lhs - lp_.b_eq[i]);
    }
    for (std::size_t j = 0; j < n_; ++j) {
      if (out.x[j] < lo_[j] - 1e-9 * (1 + std::fabs(lo_[j])) ||
          out.x[j] > hi_[j] + 1e-9 * (1 + std::fabs(hi_[j])))
        fail("bound on variable", j, 0.0);
    }
  }

  const LinearProgram& lp_;
  std::size_t n_ = 0;    // structural variables
  std::size_t m_ = 0;    // tableau rows
  std::size_t nc_ = 0;   // structural + slack + artificial columns
  std::size_t art0_ = 0;
  bool trivially_infeasible_ = false;
  std::vector<std::vector<double>> tab_, a0_;
  std::vector<double> lo_, hi_, xval_, rhs_;
  std::vector<char> at_upper_, in_basis_;
  std::vector<int> basis_;
};

}  // namespace

void LinearProgram::check_shape() const {
  const std::size_t n = num_vars();
  if (n == 0) throw std::invalid_argument("LinearProgram: no variables");
  if (a_ub.size() != b_ub.size()) throw std::invalid_argument("LinearProgram: a_ub/b_ub mismatch");
  if (a_eq.size() != b_eq.size()) throw std::invalid_argument("LinearProgram: a_eq/b_eq mismatch");
  for (const auto& r : a_ub)
    if (r.size() != n) throw std::invalid_argument("LinearProgram: a_ub row width mismatch");
  for (const auto& r : a_eq)
    if (r.size() != n) throw std::invalid_argument("LinearProgram: a_eq row width mismatch");
  if (!lower.empty() && lower.size() != n)
    throw std::invalid_argument("LinearProgram: lower bound width mismatch");
  if (!upper.empty() && upper.size() != n)
    throw std::invalid_argument("LinearProgram: upper bound width mismatch");
  for (std::size_t j = 0; j < n; ++j) {
    const double lo = lower.empty() ? 0.0 : lower[j];
    const double hi = upper.empty() ? kInf : upper[j];
    if (!(lo <= hi)) throw std::invalid_argument("LinearProgram: lower > upper");
    if (!std::isfinite(lo)) throw std::invalid_argument("LinearProgram: lower bound must be finite");
  }
}

LpSolution solve_lp(const LinearProgram& lp) {
  lp.check_shape();
  BoundedSimplex simplex(lp);
  return simplex.run();
}

FeasibilityResult max_supportable_bits(const Scenario& s) {
  s.validate();
  const double T = s.block_length_s;
  const double r01 = rate_user_helper(s, s.p_user_max_w);
  const double r0 = rate_user_ap(s, s.p_user_max_w);
  const double r1 = rate_helper_ap(s, s.p_helper_max_w);

  // Variables: tau1, tau2, tau3, l_u, l_h, l_a.
  LinearProgram lp;
  lp.objective = {0, 0, 0, -1, -1, -1};
  lp.a_ub = {
      {-r01, 0, 0, 0, 1, 0},  // helper bits limited by the first slot
      {0, -r01, 0, 0, 0, 1},  // AP bits limited by what the helper can decode
  };
  lp.b_ub = {0, 0};
  lp.a_eq = {
      {0, 0, 0, s.cycles_per_bit_user, 0, 0},                 // user CPU saturated
      {s.f_helper_max_hz, 0, 0, 0, s.cycles_per_bit_helper, 0},  // helper CPU saturated
      {1, 1, 1, 0, 0, 1.0 / s.f_ap_max_hz},                   // whole block used
      {0, r0 - r01, r1, 0, 0, 0},                             // relay slots balanced
  };
  lp.b_eq = {T * s.f_user_max_hz, T * s.f_helper_max_hz, T, 0};
  lp.lower = {0, 0, 0, 0, 0, 0};
  lp.upper = {T, T, T, kInf, kInf, kInf};

  const LpSolution sol = solve_lp(lp);
  if (sol.status != LpStatus::optimal)
    throw std::logic_error("max_supportable_bits: feasibility LP did not solve");

  FeasibilityResult out;
  out.l_max_bits = sol.x[3] + sol.x[4] + sol.x[5];
  out.witness.tau1_s = sol.x[0];
  out.witness.tau2_s = sol.x[1];
  out.witness.tau3_s = sol.x[2];
  out.witness.p1_w = s.p_user_max_w;
  out.witness.p2_w = s.p_user_max_w;
  out.witness.p3_w = s.p_helper_max_w;
  out.witness.bits_local = sol.x[3];
  out.witness.bits_helper = sol.x[4];
  out.witness.bits_ap = sol.x[5];
  return out;
}

PrimalRecovery recover_primal(const PrimalRecoveryInput& in, const Scenario& s,
                              double row_relaxation) {
  s.validate();
  const double T = s.block_length_s;
  const double L = s.task_bits;
  const double r01_1 = rate_user_helper(s, in.p1_w);
  const double r0_2 = rate_user_ap(s, in.p2_w);
  const double r01_2 = rate_user_helper(s, in.p2_w);
  const double r1_3 = rate_helper_ap(s, in.p3_w);
  const double cm = s.cycles_per_bit_helper * in.m1_bps;
  const double helper_power = s.kappa_helper * cm * cm * cm;  // compute power draw at rate m1

  // Variables: tau1, tau2, tau3, l_a.
  LinearProgram lp;
  lp.objective = {in.p1_w - helper_power, in.p2_w, in.p3_w, 0};
  lp.a_ub = {
      {-(in.m1_bps + r01_1), 0, 0, 0},    // helper must receive what it computes
      {0, -r0_2, -r1_3, 1},               // relay sum capacity
      {0, -r01_2, 0, 1},                  // relay decode capacity
      {1, 1, 1, 1.0 / s.f_ap_max_hz},     // time budget
  };
  lp.b_ub = {-in.m1_bps * T, 0, 0, T};
  lp.a_eq = {{-in.m1_bps, 0, 0, 1}};      // task partition with l_u fixed
  lp.b_eq = {L - in.bits_local - in.m1_bps * T};
  lp.lower = {0, 0, 0, 0};
  lp.upper = {T, T, T, kInf};
  if (row_relaxation > 0)
    for (double& b : lp.b_ub) b += row_relaxation * (1 + std::fabs(b));

  const LpSolution sol = solve_lp(lp);
  PrimalRecovery out;
  if (sol.status == LpStatus::unbounded)
    throw std::logic_error("recover_primal: recovery LP unbounded");
  if (sol.status != LpStatus::optimal) {
    out.feasible = false;
    return out;
  }
  out.feasible = true;
  auto clip = [T](double v) { return std::min(std::max(v, 0.0), T); };
  out.allocation.tau1_s = clip(sol.x[0]);
  out.allocation.tau2_s = clip(sol.x[1]);
  out.allocation.tau3_s = clip(sol.x[2]);
  out.allocation.p1_w = in.p1_w;
  out.allocation.p2_w = in.p2_w;
  out.allocation.p3_w = in.p3_w;
  out.allocation.bits_local = in.bits_local;
  out.allocation.bits_helper = in.m1_bps * (T - out.allocation.tau1_s);
  out.allocation.bits_ap = std::max(sol.x[3], 0.0);
  out.objective_j = sol.value + helper_power * T;
  return out;
}

}  // namespace mecc
