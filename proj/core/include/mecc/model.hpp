// Physical system model for the three-node cooperative MEC setup: one user
// with a computation deadline, one idle helper, and an access point with an
// edge server. The block of length T is split into an offload-to-helper slot,
// two relay slots (user broadcast, helper forward) and the server execution
// tail. All quantities are SI: bits, seconds, watts, joules, hertz.
#pragma once

#include <string>
#include <vector>

namespace mecc {

// One problem instance: channels, radio limits, CPU constants, deadline, load.
struct Scenario {
  double bandwidth_hz = 0;            // B
  double gain_user_helper = 0;        // linear power gain, user -> helper
  double gain_user_ap = 0;            // user -> AP
  double gain_helper_ap = 0;          // helper -> AP
  double noise_helper_w = 0;          // AWGN power at the helper receiver
  double noise_ap_w = 0;              // AWGN power at the AP receiver
  double capacity_gap = 1.0;          // modulation/coding gap, >= 1
  double p_user_max_w = 0;
  double p_helper_max_w = 0;
  double cycles_per_bit_user = 0;
  double cycles_per_bit_helper = 0;
  double kappa_user = 0;              // effective capacitance coefficient
  double kappa_helper = 0;
  double f_user_max_hz = 0;
  double f_helper_max_hz = 0;
  double f_ap_max_hz = 0;
  double block_length_s = 0;          // T
  double task_bits = 0;               // L

  // Throws std::invalid_argument unless every field is strictly positive,
  // task_bits >= 0 and capacity_gap >= 1.
  void validate() const;

  // Most bits the user CPU can chew through in a block: T f_u,max / c_u.
  double user_bit_cap() const { return block_length_s * f_user_max_hz / cycles_per_bit_user; }
  // Same for the helper, which only computes after the first slot ends.
  double helper_bit_cap(double tau1_s) const {
    return (block_length_s - tau1_s) * f_helper_max_hz / cycles_per_bit_helper;
  }
  // Helper compute throughput ceiling in bits/s.
  double helper_rate_cap() const { return f_helper_max_hz / cycles_per_bit_helper; }
};

// A candidate schedule. The server execution slot is not stored; it is always
// bits_ap / f_ap_max_hz because the grid-powered server runs flat out.
struct Allocation {
  double tau1_s = 0, tau2_s = 0, tau3_s = 0;
  double p1_w = 0, p2_w = 0, p3_w = 0;
  double bits_local = 0, bits_helper = 0, bits_ap = 0;

  double tau4_s(const Scenario& s) const { return bits_ap / s.f_ap_max_hz; }
};

struct EnergyBreakdown {
  double e_offload_1_j = 0;
  double e_offload_2_j = 0;
  double e_offload_3_j = 0;
  double e_compute_user_j = 0;
  double e_compute_helper_j = 0;
  double e_total_j = 0;   // always the exact sum of the five parts
};

struct ConstraintEntry {
  std::string label;
  double slack = 0;       // signed; >= 0 means satisfied
  bool satisfied = false;
};

struct ConstraintReport {
  std::vector<ConstraintEntry> entries;
  bool feasible = false;  // every entry satisfied
};

// Free-space power-law gain: beta0 * (d / d0)^(-exponent).
double path_loss_gain(double distance_m, double beta0, double d0_m, double exponent);

// Shannon rate with a capacity gap: B log2(1 + P h / (gap sigma^2)), bits/s.
double achievable_rate(double power_w, double gain, double noise_w,
                       double bandwidth_hz, double capacity_gap);

// Transmit power needed to move `bits` in `duration_s` over the given link.
// Zero duration with positive bits yields +infinity.
double invert_rate(double bits, double duration_s, double gain, double noise_w,
                   double bandwidth_hz, double capacity_gap);

// Energy of computing `bits` within `window_s` at the frequency that just
// meets the deadline: kappa c^3 bits^3 / window^2.
double compute_energy(double bits, double window_s, double kappa, double cycles_per_bit);

// Link-bound rate shorthands.
double rate_user_helper(const Scenario& s, double power_w);  // r01
double rate_user_ap(const Scenario& s, double power_w);      // r0
double rate_helper_ap(const Scenario& s, double power_w);    // r1

// Per-slot offload energies plus both compute energies. A slot with zero
// duration contributes nothing regardless of the stored power.
EnergyBreakdown total_energy(const Allocation& alloc, const Scenario& s);

// Checks the full constraint set of the joint problem: task partition, both
// link-capacity bounds of the decode-and-forward pair, CPU caps, the time
// budget and the power boxes. Tolerance is relative to the larger side of
// each inequality. Infeasibility is reported, never thrown.
ConstraintReport validate_allocation(const Allocation& alloc, const Scenario& s,
                                     double tolerance = 1e-9);

}  // namespace mecc
