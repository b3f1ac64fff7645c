// Brute-force reference minimizer for the joint cooperation problem. It
// shares nothing with the dual solver beyond the physical model: a nested
// grid over slot durations and the bit partition, with the transmit powers
// recovered analytically (rate inversion) and a one-dimensional line search
// for the broadcast power of the relay pair. Accuracy is bounded by the grid
// resolution by design; refinement rounds shrink the grid around the
// incumbent.
#pragma once

#include <optional>

#include "mecc/model.hpp"

namespace mecc {

struct GridSpec {
  int tau_points = 25;     // per slot-duration axis
  int bit_points = 40;     // per bit-partition axis
  int power_points = 60;   // broadcast-power line search
  int refine_rounds = 2;   // extra passes shrinking each axis 5x around the incumbent

  // Throws std::invalid_argument unless every count is >= 2 and rounds >= 0.
  void validate() const;
};

// Optional pins for restricted runs (benchmark cross-checks). A pinned axis
// collapses to the single given value.
struct OracleRestrictions {
  std::optional<double> tau1_s;
  std::optional<double> tau2_s;
  std::optional<double> tau3_s;
  std::optional<double> bits_helper;
};

struct OracleResult {
  bool feasible = false;   // false: no feasible point at this grid resolution
  double energy_j = 0;
  Allocation allocation;
};

OracleResult brute_force_min_energy(const Scenario& s, const GridSpec& grid = {},
                                    const OracleRestrictions& pins = {});

}  // namespace mecc
