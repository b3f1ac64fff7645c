// Lagrange-dual machinery for the joint cooperation problem. The partial
// Lagrangian splits into five independent subproblems, one per slot or bit
// share, and each has a closed-form minimizer (a water-filling style power
// level, a cube-root compute rate, and bang-bang slot/bit choices). The dual
// function is maximized with a central-cut ellipsoid over the five
// multipliers; a small LP afterwards resolves the slot durations that the
// bang-bang tie-breaks leave undetermined.
#pragma once

#include <array>

#include "mecc/lp.hpp"
#include "mecc/model.hpp"

namespace mecc {

// Multipliers: lambda1 prices the helper-offload link, lambda2 the relay sum
// capacity, lambda3 the relay decode capacity, mu1 the time budget, and mu2
// the task-partition equality. mu2 is sign-free, the others are nonnegative.
struct DualPoint {
  double lambda1 = 0, lambda2 = 0, lambda3 = 0;
  double mu1 = 0;
  double mu2 = 0;

  bool in_domain() const {
    return lambda1 >= 0 && lambda2 >= 0 && lambda3 >= 0 && mu1 >= 0;
  }
};

// Whether a slot's per-second cost sign pushes its duration to 0, to the full
// block, or leaves it indifferent. Indifferent slots evaluate as 0.
enum class SlotRule { zero, full, tie };

struct Sub1Solution {
  double p1_w = 0;       // offload power to the helper
  double m1_bps = 0;     // helper compute rate
  double rho1 = 0;       // per-second cost of growing the first slot
  double alpha1 = 0;     // multiplier of the power cap, nonzero only at the cap
  double beta1 = 0;      // multiplier of the helper CPU cap
  SlotRule tau1_rule = SlotRule::zero;
};

struct Sub2Solution {
  double p2_w = 0;       // broadcast power in the relay slot
  double rho2 = 0;
  double alpha2 = 0;
  SlotRule tau2_rule = SlotRule::zero;
};

struct Sub3Solution {
  double p3_w = 0;       // helper forward power
  double rho3 = 0;
  double alpha3 = 0;
  SlotRule tau3_rule = SlotRule::zero;
};

// Everything the five subproblems produce at one dual point, including the
// tie-broken minimizers used to evaluate the dual function.
struct SubproblemSolution {
  Sub1Solution sub1;
  Sub2Solution sub2;
  Sub3Solution sub3;
  double bits_local = 0;                    // l_u*
  double bits_ap = 0;                       // l_a*, either 0 or the full task
  double tau1_s = 0, tau2_s = 0, tau3_s = 0;
  double bits_helper = 0;                   // m1 * (T - tau1)
  double value1 = 0, value2 = 0, value3 = 0, value4 = 0, value5 = 0;
};

struct DualEvaluation {
  double value = 0;                         // g(lambda, mu)
  SubproblemSolution sub;
  std::array<double, 5> subgradient{};      // d/d(lambda1..3, mu1, mu2)
};

Sub1Solution solve_subproblem1(const DualPoint& d, const Scenario& s);
Sub2Solution solve_subproblem2(const DualPoint& d, const Scenario& s);
Sub3Solution solve_subproblem3(const DualPoint& d, const Scenario& s);
double solve_subproblem4(const DualPoint& d, const Scenario& s);  // l_u*
double solve_subproblem5(const DualPoint& d, const Scenario& s);  // l_a*

// Dual function value, minimizers and subgradient. Throws if d is outside
// the dual-feasible set.
DualEvaluation eval_dual(const DualPoint& d, const Scenario& s);

// The ellipsoid runs on rescaled multipliers (bits in Mbit, energy in mJ) so
// every coordinate is O(1)-ish; results are reported back in SI.
struct EllipsoidConfig {
  double initial_radius = 1e6;  // in normalized multiplier units
  double eps_rel = 1e-8;
  double eps_abs = 1e-14;       // on the normalized dual value (mJ)
  int max_iters = 5000;
};

struct EllipsoidTrace {
  int iterations = 0;
  bool converged = false;
  double gap_bound = 0;         // last sqrt(s' P s), normalized units
};

struct EllipsoidResult {
  DualPoint best_point;
  double best_value = 0;        // g at best_point, joules
  EllipsoidTrace trace;
};

// Central-cut ellipsoid maximization of the dual. Feasibility cuts handle
// the sign constraints; objective cuts use the dual subgradient. Returns the
// best feasible iterate even when the iteration budget runs out.
EllipsoidResult ellipsoid_maximize(const Scenario& s, const EllipsoidConfig& cfg = {});

enum class SolveStatus { optimal, infeasible_task, not_converged };

struct SolveConfig {
  EllipsoidConfig ellipsoid;
  double gap_tolerance_abs_j = 1e-6;
  double gap_tolerance_rel = 1e-3;
  double validation_tolerance = 1e-9;
};

struct SolveReport {
  SolveStatus status = SolveStatus::not_converged;
  Allocation allocation;
  EnergyBreakdown energy;
  double dual_value_j = 0;
  double duality_gap_j = 0;     // primal energy minus dual value
  int ellipsoid_iterations = 0;
  double l_max_bits = 0;        // from the feasibility gate
  DualPoint multipliers;
};

// Full pipeline: feasibility gate, dual maximization, closed-form mapping of
// the optimal multipliers, LP recovery of the slot durations, validation.
SolveReport solve_joint(const Scenario& s, const SolveConfig& cfg = {});

}  // namespace mecc
