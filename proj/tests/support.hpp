// Shared helpers for the test suites: the default simulation setup, seeded
// RNG shorthands and a tiny golden-section minimizer used as an independent
// 1-D reference.
#pragma once

#include <cmath>
#include <functional>
#include <random>

#include "mecc/model.hpp"

namespace mecc::test {

// Default simulation setup: user and AP 250 m apart, helper on the line at
// distance D, -60 dB reference loss at 10 m with exponent 3, 1 MHz band,
// -70 dBm noise, 40 dBm power caps, 2/3/5 GHz CPUs.
inline Scenario default_scenario(double helper_distance_m = 120, double block_s = 0.1,
                                 double task_bits = 2e4) {
  const double beta0 = 1e-6;
  Scenario s;
  s.bandwidth_hz = 1e6;
  s.gain_user_helper = path_loss_gain(helper_distance_m, beta0, 10, 3);
  s.gain_user_ap = path_loss_gain(250, beta0, 10, 3);
  s.gain_helper_ap = path_loss_gain(250 - helper_distance_m, beta0, 10, 3);
  s.noise_helper_w = 1e-10;
  s.noise_ap_w = 1e-10;
  s.capacity_gap = 1;
  s.p_user_max_w = 10;
  s.p_helper_max_w = 10;
  s.cycles_per_bit_user = 1e3;
  s.cycles_per_bit_helper = 1e3;
  s.kappa_user = 1e-27;
  s.kappa_helper = 0.3e-27;
  s.f_user_max_hz = 2e9;
  s.f_helper_max_hz = 3e9;
  s.f_ap_max_hz = 5e9;
  s.block_length_s = block_s;
  s.task_bits = task_bits;
  return s;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Golden-section argmin of a unimodal function on [lo, hi].
inline double golden_argmin(const std::function<double(double)>& f, double lo, double hi,
                            int iters = 120) {
  constexpr double phi = 0.61803398874989484820;
  double a = lo, b = hi;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 <= f2) {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace mecc::test
