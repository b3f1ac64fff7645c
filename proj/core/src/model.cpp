#include "mecc/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mecc {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

void Scenario::validate() const {
  require(bandwidth_hz > 0, "Scenario: bandwidth_hz must be positive");
  require(gain_user_helper > 0, "Scenario: gain_user_helper must be positive");
  require(gain_user_ap > 0, "Scenario: gain_user_ap must be positive");
  require(gain_helper_ap > 0, "Scenario: gain_helper_ap must be positive");
  require(noise_helper_w > 0, "Scenario: noise_helper_w must be positive");
  require(noise_ap_w > 0, "Scenario: noise_ap_w must be positive");
  require(capacity_gap >= 1.0, "Scenario: capacity_gap must be >= 1");
  require(p_user_max_w > 0, "Scenario: p_user_max_w must be positive");
  require(p_helper_max_w > 0, "Scenario: p_helper_max_w must be positive");
  require(cycles_per_bit_user > 0, "Scenario: cycles_per_bit_user must be positive");
  require(cycles_per_bit_helper > 0, "Scenario: cycles_per_bit_helper must be positive");
  require(kappa_user > 0, "Scenario: kappa_user must be positive");
  require(kappa_helper > 0, "Scenario: kappa_helper must be positive");
  require(f_user_max_hz > 0, "Scenario: f_user_max_hz must be positive");
  require(f_helper_max_hz > 0, "Scenario: f_helper_max_hz must be positive");
  require(f_ap_max_hz > 0, "Scenario: f_ap_max_hz must be positive");
  require(block_length_s > 0, "Scenario: block_length_s must be positive");
  require(task_bits >= 0, "Scenario: task_bits must be nonnegative");
}

double path_loss_gain(double distance_m, double beta0, double d0_m, double exponent) {
  require(distance_m > 0, "path_loss_gain: distance must be positive");
  require(beta0 > 0, "path_loss_gain: beta0 must be positive");
  require(d0_m > 0, "path_loss_gain: reference distance must be positive");
  require(exponent > 0, "path_loss_gain: exponent must be positive");
  return beta0 * std::pow(distance_m / d0_m, -exponent);
}

double achievable_rate(double power_w, double gain, double noise_w,
                       double bandwidth_hz, double capacity_gap) {
  require(power_w >= 0, "achievable_rate: power must be nonnegative");
  require(gain > 0 && noise_w > 0 && bandwidth_hz > 0, "achievable_rate: bad link parameters");
  require(capacity_gap >= 1.0, "achievable_rate: capacity_gap must be >= 1");
  return bandwidth_hz * std::log2(1.0 + power_w * gain / (capacity_gap * noise_w));
}

double invert_rate(double bits, double duration_s, double gain, double noise_w,
                   double bandwidth_hz, double capacity_gap) {
  require(bits >= 0, "invert_rate: bits must be nonnegative");
  require(duration_s >= 0, "invert_rate: duration must be nonnegative");
  require(gain > 0 && noise_w > 0 && bandwidth_hz > 0, "invert_rate: bad link parameters");
  require(capacity_gap >= 1.0, "invert_rate: capacity_gap must be >= 1");
  if (bits == 0) return 0.0;
  if (duration_s == 0) return std::numeric_limits<double>::infinity();
  return (std::exp2(bits / (duration_s * bandwidth_hz)) - 1.0) * capacity_gap * noise_w / gain;
}

double compute_energy(double bits, double window_s, double kappa, double cycles_per_bit) {
  require(bits >= 0, "compute_energy: bits must be nonnegative");
  require(kappa > 0 && cycles_per_bit > 0, "compute_energy: bad device parameters");
  if (bits == 0) return 0.0;
  require(window_s > 0, "compute_energy: positive bits need a positive window");
  const double cl = cycles_per_bit * bits;
  return kappa * cl * cl * cl / (window_s * window_s);
}

double rate_user_helper(const Scenario& s, double power_w) {
  return achievable_rate(power_w, s.gain_user_helper, s.noise_helper_w, s.bandwidth_hz,
                         s.capacity_gap);
}

double rate_user_ap(const Scenario& s, double power_w) {
  return achievable_rate(power_w, s.gain_user_ap, s.noise_ap_w, s.bandwidth_hz, s.capacity_gap);
}

double rate_helper_ap(const Scenario& s, double power_w) {
  return achievable_rate(power_w, s.gain_helper_ap, s.noise_ap_w, s.bandwidth_hz, s.capacity_gap);
}

EnergyBreakdown total_energy(const Allocation& a, const Scenario& s) {
  EnergyBreakdown e;
  e.e_offload_1_j = a.tau1_s == 0 ? 0.0 : a.tau1_s * a.p1_w;
  e.e_offload_2_j = a.tau2_s == 0 ? 0.0 : a.tau2_s * a.p2_w;
  e.e_offload_3_j = a.tau3_s == 0 ? 0.0 : a.tau3_s * a.p3_w;
  e.e_compute_user_j = compute_energy(a.bits_local, s.block_length_s, s.kappa_user,
                                      s.cycles_per_bit_user);
  e.e_compute_helper_j = compute_energy(a.bits_helper, s.block_length_s - a.tau1_s,
                                        s.kappa_helper, s.cycles_per_bit_helper);
  // Fixed accumulation order so e_total is bit-exact reproducible.
  e.e_total_j = ((((e.e_offload_1_j + e.e_offload_2_j) + e.e_offload_3_j) +
                  e.e_compute_user_j) +
                 e.e_compute_helper_j);
  return e;
}

namespace {

// lhs <= rhs, slack = rhs - lhs, tolerance relative to the larger side.
ConstraintEntry check_upper(std::string label, double lhs, double rhs, double tol) {
  ConstraintEntry c;
  c.label = std::move(label);
  c.slack = rhs - lhs;
  const double scale = std::max({1.0, std::fabs(lhs), std::fabs(rhs)});
  c.satisfied = c.slack >= -tol * scale;
  return c;
}

ConstraintEntry check_equal(std::string label, double lhs, double rhs, double tol) {
  ConstraintEntry c;
  c.label = std::move(label);
  c.slack = -std::fabs(lhs - rhs);
  const double scale = std::max({1.0, std::fabs(lhs), std::fabs(rhs)});
  c.satisfied = c.slack >= -tol * scale;
  return c;
}

}  // namespace

ConstraintReport validate_allocation(const Allocation& a, const Scenario& s, double tolerance) {
  ConstraintReport r;
  const double T = s.block_length_s;
  // Stored rates honour the zero-slot convention: an empty slot carries nothing.
  const double bits_slot1 = a.tau1_s == 0 ? 0.0 : a.tau1_s * rate_user_helper(s, a.p1_w);
  const double bits_direct = a.tau2_s == 0 ? 0.0 : a.tau2_s * rate_user_ap(s, a.p2_w);
  const double bits_decode = a.tau2_s == 0 ? 0.0 : a.tau2_s * rate_user_helper(s, a.p2_w);
  const double bits_forward = a.tau3_s == 0 ? 0.0 : a.tau3_s * rate_helper_ap(s, a.p3_w);

  r.entries.push_back(check_equal("task partition",
                                  a.bits_local + a.bits_helper + a.bits_ap, s.task_bits,
                                  tolerance));
  r.entries.push_back(check_upper("helper offload link", a.bits_helper, bits_slot1, tolerance));
  r.entries.push_back(check_upper("relay sum capacity", a.bits_ap, bits_direct + bits_forward,
                                  tolerance));
  r.entries.push_back(check_upper("relay decode capacity", a.bits_ap, bits_decode, tolerance));
  r.entries.push_back(check_upper("user cpu cap", s.cycles_per_bit_user * a.bits_local,
                                  T * s.f_user_max_hz, tolerance));
  r.entries.push_back(check_upper("helper cpu cap", s.cycles_per_bit_helper * a.bits_helper,
                                  (T - a.tau1_s) * s.f_helper_max_hz, tolerance));
  r.entries.push_back(check_upper("time budget",
                                  a.tau1_s + a.tau2_s + a.tau3_s + a.bits_ap / s.f_ap_max_hz, T,
                                  tolerance));
  r.entries.push_back(check_upper("user power slot 1", a.p1_w, s.p_user_max_w, tolerance));
  r.entries.push_back(check_upper("user power slot 2", a.p2_w, s.p_user_max_w, tolerance));
  r.entries.push_back(check_upper("helper power slot 3", a.p3_w, s.p_helper_max_w, tolerance));

  r.feasible = true;
  for (const auto& e : r.entries) r.feasible = r.feasible && e.satisfied;
  return r;
}

}  // namespace mecc
