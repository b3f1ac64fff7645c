#include "mecc/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace mecc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> linspace(double lo, double hi, int points) {
  if (hi - lo < 1e-300 || points < 2) return {lo};
  std::vector<double> v(points);
  for (int i = 0; i < points; ++i) v[i] = lo + (hi - lo) * i / (points - 1);
  return v;
}

struct AxisRange {
  double lo = 0, hi = 0;
};

struct RelayOpt {
  double cost = kInf;
  double p2 = 0, p3 = 0;
};

// Grid candidate identity in canonical axis order (tau1, tau2, tau3, l_u,
// l_h); ties in energy go to the lexicographically smallest index.
using GridIndex = std::array<int, 5>;

struct Incumbent {
  bool found = false;
  double energy = kInf;
  GridIndex index{};
  Allocation alloc;

  void offer(double e, const GridIndex& idx, const Allocation& a) {
    if (!found || e < energy || (e == energy && idx < index)) {
      found = true;
      energy = e;
      index = idx;
      alloc = a;
    }
  }
};

// Cheapest way to push `bits` through the broadcast+forward pair with the
// given slot lengths: unimodal in the broadcast power, searched over a
// discrete candidate ladder that starts at the exact decode-binding power.
class RelaySearch {
 public:
  RelaySearch(const Scenario& s, int power_points)
      : s_(s), points_(power_points),
        r1_max_(rate_helper_ap(s, s.p_helper_max_w)) {}

  RelayOpt solve(double bits, double tau2, double tau3) const {
    RelayOpt best;
    if (bits <= 0) {
      best.cost = 0;
      return best;
    }
    if (tau2 <= 0) return best;
    const double p2_min =
        invert_rate(bits, tau2, s_.gain_user_helper, s_.noise_helper_w, s_.bandwidth_hz,
                    s_.capacity_gap);
    if (!(p2_min <= s_.p_user_max_w * (1 + 1e-12))) return best;

    std::vector<double> powers = linspace(std::min(p2_min, s_.p_user_max_w),
                                          s_.p_user_max_w, points_);
    // Exact power at which the direct link alone carries everything; beyond
    // it the forward slot is idle and the cost grows linearly.
    const double p2_zero = invert_rate(bits, tau2, s_.gain_user_ap, s_.noise_ap_w,
                                       s_.bandwidth_hz, s_.capacity_gap);
    if (p2_zero > powers.front() && p2_zero < powers.back()) {
      powers.insert(std::upper_bound(powers.begin(), powers.end(), p2_zero), p2_zero);
    }
    const int K = static_cast<int>(powers.size());

    std::vector<double> direct(K);
    for (int k = 0; k < K; ++k) direct[k] = tau2 * rate_user_ap(s_, powers[k]);

    // Forward-hop feasibility is monotone in the broadcast power.
    const double forward_cap = tau3 * r1_max_ * (1 + 1e-12);
    int k0 = 0;
    {
      int lo = 0, hi = K;  // first k with residual within the forward cap
      while (lo < hi) {
        const int mid = (lo + hi) / 2;
        if (bits - direct[mid] <= forward_cap) hi = mid; else lo = mid + 1;
      }
      k0 = lo;
    }
    if (k0 >= K) return best;

    std::vector<double> memo(K, -1.0);
    auto cost_at = [&](int k) {
      if (memo[k] >= 0) return memo[k];
      double c = tau2 * powers[k];
      const double resid = bits - direct[k];
      if (resid > 0) {
        const double p3 = invert_rate(resid, tau3, s_.gain_helper_ap, s_.noise_ap_w,
                                      s_.bandwidth_hz, s_.capacity_gap);
        c = p3 <= s_.p_helper_max_w * (1 + 1e-12) ? c + tau3 * std::min(p3, s_.p_helper_max_w)
                                                  : kInf;
      }
      memo[k] = c;
      return c;
    };

    int lo = k0, hi = K - 1;
    while (hi - lo > 3) {
      const int m1 = lo + (hi - lo) / 3;
      const int m2 = hi - (hi - lo) / 3;
      if (cost_at(m1) <= cost_at(m2)) hi = m2; else lo = m1;
    }
    int k_best = lo;
    for (int k = lo + 1; k <= hi; ++k)
      if (cost_at(k) < cost_at(k_best)) k_best = k;

    best.cost = cost_at(k_best);
    if (best.cost == kInf) return best;
    best.p2 = powers[k_best];
    const double resid = bits - direct[k_best];
    best.p3 = resid > 0 ? std::min(invert_rate(resid, tau3, s_.gain_helper_ap, s_.noise_ap_w,
                                               s_.bandwidth_hz, s_.capacity_gap),
                                   s_.p_helper_max_w)
                        : 0.0;
    return best;
  }

 private:
  const Scenario& s_;
  int points_;
  double r1_max_;
};

}  // namespace

void GridSpec::validate() const {
  if (tau_points < 2 || bit_points < 2 || power_points < 2)
    throw std::invalid_argument("GridSpec: every axis needs at least 2 points");
  if (refine_rounds < 0)
    throw std::invalid_argument("GridSpec: refine_rounds must be nonnegative");
}

OracleResult brute_force_min_energy(const Scenario& s, const GridSpec& grid,
                                    const OracleRestrictions& pins) {
  s.validate();
  grid.validate();
  const double T = s.block_length_s;
  const double L = s.task_bits;

  const AxisRange full_t1 = pins.tau1_s ? AxisRange{*pins.tau1_s, *pins.tau1_s}
                                        : AxisRange{0, T};
  const AxisRange full_t2 = pins.tau2_s ? AxisRange{*pins.tau2_s, *pins.tau2_s}
                                        : AxisRange{0, T};
  const AxisRange full_t3 = pins.tau3_s ? AxisRange{*pins.tau3_s, *pins.tau3_s}
                                        : AxisRange{0, T};
  const AxisRange full_lu{0, std::min(L, s.user_bit_cap())};
  const AxisRange full_lh = pins.bits_helper
                                ? AxisRange{*pins.bits_helper, *pins.bits_helper}
                                : AxisRange{0, std::min(L, s.helper_bit_cap(0))};

  std::array<AxisRange, 5> ranges{full_t1, full_t2, full_t3, full_lu, full_lh};
  const std::array<AxisRange, 5> full{full_t1, full_t2, full_t3, full_lu, full_lh};

  RelaySearch relay(s, grid.power_points);
  Incumbent best;

  for (int round = 0; round <= grid.refine_rounds; ++round) {
    const std::vector<double> t1s = linspace(ranges[0].lo, ranges[0].hi, grid.tau_points);
    const std::vector<double> t2s = linspace(ranges[1].lo, ranges[1].hi, grid.tau_points);
    const std::vector<double> t3s = linspace(ranges[2].lo, ranges[2].hi, grid.tau_points);
    const std::vector<double> lus = linspace(ranges[3].lo, ranges[3].hi, grid.bit_points);
    const std::vector<double> lhs = linspace(ranges[4].lo, ranges[4].hi, grid.bit_points);
    const int t2n = static_cast<int>(t2s.size());
    const int t3n = static_cast<int>(t3s.size());

    std::vector<RelayOpt> relay_tab(static_cast<std::size_t>(t2n) * t3n);
    std::vector<char> relay_row_done(t2n);

    for (int iu = 0; iu < static_cast<int>(lus.size()); ++iu) {
      const double lu = lus[iu];
      const double e_user = compute_energy(lu, T, s.kappa_user, s.cycles_per_bit_user);
      for (int ih = 0; ih < static_cast<int>(lhs.size()); ++ih) {
        const double lh = lhs[ih];
        double la = L - lu - lh;
        if (la < -1e-6) continue;
        if (la < 1e-6) la = 0;
        const double tau4 = la / s.f_ap_max_hz;
        if (tau4 > T) continue;

        // Per-tau1 offload + compute cost; the relay part is independent.
        std::vector<double> base(t1s.size(), kInf);
        std::vector<double> p1s(t1s.size(), 0.0);
        double min_base = kInf;
        for (std::size_t i1 = 0; i1 < t1s.size(); ++i1) {
          const double t1 = t1s[i1];
          if (s.cycles_per_bit_helper * lh > (T - t1) * s.f_helper_max_hz * (1 + 1e-12))
            continue;
          double p1 = 0;
          if (lh > 0) {
            if (t1 <= 0) continue;
            p1 = invert_rate(lh, t1, s.gain_user_helper, s.noise_helper_w, s.bandwidth_hz,
                             s.capacity_gap);
            if (!(p1 <= s.p_user_max_w * (1 + 1e-12))) continue;
            p1 = std::min(p1, s.p_user_max_w);
          }
          const double e_helper =
              compute_energy(lh, T - t1, s.kappa_helper, s.cycles_per_bit_helper);
          base[i1] = t1 * p1 + e_user + e_helper;
          p1s[i1] = p1;
          min_base = std::min(min_base, base[i1]);
        }
        if (min_base == kInf) continue;

        if (la == 0) {
          for (std::size_t i1 = 0; i1 < t1s.size(); ++i1) {
            if (base[i1] == kInf || t1s[i1] > T * (1 + 1e-12)) continue;
            Allocation a;
            a.tau1_s = t1s[i1];
            a.p1_w = p1s[i1];
            a.bits_local = lu;
            a.bits_helper = lh;
            best.offer(base[i1], GridIndex{static_cast<int>(i1), 0, 0, iu, ih}, a);
          }
          continue;
        }

        // Relay cost is strictly positive here, so combinations whose base
        // already matches the incumbent can never win or tie.
        if (min_base >= best.energy) continue;

        std::fill(relay_row_done.begin(), relay_row_done.end(), 0);
        auto relay_at = [&](int i2, int i3) -> const RelayOpt& {
          if (!relay_row_done[i2]) {
            for (int j = 0; j < t3n; ++j)
              relay_tab[static_cast<std::size_t>(i2) * t3n + j] =
                  relay.solve(la, t2s[i2], t3s[j]);
            relay_row_done[i2] = 1;
          }
          return relay_tab[static_cast<std::size_t>(i2) * t3n + i3];
        };

        for (std::size_t i1 = 0; i1 < t1s.size(); ++i1) {
          if (base[i1] >= best.energy) continue;
          const double t1 = t1s[i1];
          const double budget = T - t1 - tau4;
          for (int i2 = 0; i2 < t2n; ++i2) {
            const double t2 = t2s[i2];
            if (t2 > budget * (1 + 1e-12)) break;  // t2s ascending
            for (int i3 = 0; i3 < t3n; ++i3) {
              if (t2 + t3s[i3] > budget * (1 + 1e-12) + 1e-15) break;
              const RelayOpt& r = relay_at(i2, i3);
              if (r.cost == kInf) continue;
              const double e = base[i1] + r.cost;
              if (e < best.energy ||
                  (e == best.energy &&
                   GridIndex{static_cast<int>(i1), i2, i3, iu, ih} < best.index) ||
                  !best.found) {
                Allocation a;
                a.tau1_s = t1;
                a.tau2_s = t2;
                a.tau3_s = t3s[i3];
                a.p1_w = p1s[i1];
                a.p2_w = r.p2;
                a.p3_w = r.p3;
                a.bits_local = lu;
                a.bits_helper = lh;
                a.bits_ap = la;
                best.offer(e, GridIndex{static_cast<int>(i1), i2, i3, iu, ih}, a);
              }
            }
            // The time budget usually binds at the optimum, so also try the
            // exact boundary value of tau3 for this slot pair.
            if (!pins.tau3_s) {
              const double t3b = budget - t2;
              if (t3b >= 0 && t3b >= ranges[2].lo && t3b <= ranges[2].hi &&
                  base[i1] < best.energy) {
                const RelayOpt r = relay.solve(la, t2, t3b);
                if (r.cost != kInf && base[i1] + r.cost < best.energy) {
                  Allocation a;
                  a.tau1_s = t1;
                  a.tau2_s = t2;
                  a.tau3_s = t3b;
                  a.p1_w = p1s[i1];
                  a.p2_w = r.p2;
                  a.p3_w = r.p3;
                  a.bits_local = lu;
                  a.bits_helper = lh;
                  a.bits_ap = la;
                  best.offer(base[i1] + r.cost,
                             GridIndex{static_cast<int>(i1), i2, t3n, iu, ih}, a);
                }
              }
            }
          }
        }
      }
    }

    if (!best.found) return OracleResult{};  // infeasible at this resolution

    if (round < grid.refine_rounds) {
      const std::array<double, 5> centre{best.alloc.tau1_s, best.alloc.tau2_s,
                                         best.alloc.tau3_s, best.alloc.bits_local,
                                         best.alloc.bits_helper};
      for (int ax = 0; ax < 5; ++ax) {
        const double width = (ranges[ax].hi - ranges[ax].lo) / 5.0;
        ranges[ax].lo = std::max(full[ax].lo, centre[ax] - width / 2.0);
        ranges[ax].hi = std::min(full[ax].hi, centre[ax] + width / 2.0);
      }
    }
  }

  OracleResult out;
  out.feasible = true;
  out.energy_j = best.energy;
  out.allocation = best.alloc;
  return out;
}

}  // namespace mecc
