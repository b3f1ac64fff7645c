// Small dense linear programming layer. The instances in this project never
// exceed a handful of variables, so the solver favours robustness over speed:
// bounded-variable primal simplex, two phases, Bland's anti-cycling rule,
// rows normalized to unit infinity-norm before solving.
#pragma once

#include <vector>

#include "mecc/model.hpp"

namespace mecc {

enum class LpStatus { optimal, infeasible, unbounded };

// minimize objective . x
//   subject to  a_ub x <= b_ub,  a_eq x = b_eq,  lower <= x <= upper.
// Lower bounds must be finite (0 by default); upper bounds may be +inf.
struct LinearProgram {
  std::vector<double> objective;
  std::vector<std::vector<double>> a_ub;
  std::vector<double> b_ub;
  std::vector<std::vector<double>> a_eq;
  std::vector<double> b_eq;
  std::vector<double> lower;  // empty means all 0
  std::vector<double> upper;  // empty means all +inf

  std::size_t num_vars() const { return objective.size(); }
  // Throws std::invalid_argument on inconsistent dimensions or bounds.
  void check_shape() const;
};

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  std::vector<double> x;     // only meaningful when optimal
  double value = 0;
};

// Deterministic for identical input. When the result is optimal the solution
// is self-audited against every constraint within 1e-8 * (1 + |b|).
LpSolution solve_lp(const LinearProgram& lp);

// Largest task the three nodes can absorb inside one block when everyone
// spends maximum transmit power and CPU frequency. The joint problem is
// feasible exactly when task_bits <= l_max_bits.
struct FeasibilityResult {
  double l_max_bits = 0;
  Allocation witness;   // one maximizing schedule, powers pinned at the caps
};
FeasibilityResult max_supportable_bits(const Scenario& s);

// Inputs recovered from the converged dual stage: optimal powers, the helper
// compute rate, and the user's local bit share.
struct PrimalRecoveryInput {
  double p1_w = 0, p2_w = 0, p3_w = 0;
  double m1_bps = 0;        // helper compute rate
  double bits_local = 0;
};

struct PrimalRecovery {
  bool feasible = false;    // false signals non-converged multipliers
  Allocation allocation;    // complete schedule, bits_helper = m1 (T - tau1)
  double objective_j = 0;   // offload + helper-compute energy of the LP
};

// Re-optimizes the slot durations and the AP bit share once the powers and
// rates are fixed, resolving the tie-broken slot choices of the dual stage.
// At a time-binding optimum the feasible set can degenerate to a point, so
// near-converged multipliers may leave it marginally empty; row_relaxation
// loosens every inequality by that relative amount to recover the sliver
// (the caller re-establishes exact feasibility afterwards).
PrimalRecovery recover_primal(const PrimalRecoveryInput& in, const Scenario& s,
                              double row_relaxation = 0);

}  // namespace mecc
