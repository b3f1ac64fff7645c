#include "mecc/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
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

// Golden-section minimum of a unimodal function; returns its argmin.
double golden_min(const std::function<double(double)>& f, double lo, double hi) {
  if (hi <= lo) return lo;
  constexpr double phi = 0.61803398874989484820;
  double a = lo, b = hi;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < 80 && b - a > 1e-14 * (1 + std::fabs(a) + std::fabs(b)); ++i) {
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

}  // namespace

const char* scheme_name(SchemeId id) {
  switch (id) {
    case SchemeId::local: return "local";
    case SchemeId::computation_coop: return "computation_coop";
    case SchemeId::communication_coop: return "communication_coop";
    case SchemeId::joint: return "joint";
  }
  return "?";
}

SchemeResult local_only(const Scenario& s) {
  s.validate();
  SchemeResult r;
  r.scheme = SchemeId::local;
  if (s.cycles_per_bit_user * s.task_bits > s.block_length_s * s.f_user_max_hz) {
    return r;  // the user CPU alone cannot finish in time
  }
  r.feasible = true;
  r.allocation.bits_local = s.task_bits;
  r.energy_j = compute_energy(s.task_bits, s.block_length_s, s.kappa_user,
                              s.cycles_per_bit_user);
  return r;
}

SchemeResult computation_coop(const Scenario& s) {
  s.validate();
  SchemeResult r;
  r.scheme = SchemeId::computation_coop;
  const double T = s.block_length_s;
  const double L = s.task_bits;
  if (L == 0) {
    r.feasible = true;
    return r;
  }
  const double lh_lo = std::max(0.0, L - s.user_bit_cap());
  const double lh_hi_all = std::min(L, s.helper_bit_cap(0));
  if (lh_lo > lh_hi_all) return r;

  // Energy of splitting: transmit the helper share in the first slot, then
  // both CPUs run in parallel. +inf marks infeasible combinations.
  auto energy_at = [&](double t1, double lh) -> double {
    if (lh < lh_lo || lh > L || t1 < 0 || t1 > T) return kInf;
    if (s.cycles_per_bit_helper * lh > (T - t1) * s.f_helper_max_hz * (1 + 1e-12)) return kInf;
    double p1 = 0;
    if (lh > 0) {
      if (t1 <= 0) return kInf;
      p1 = invert_rate(lh, t1, s.gain_user_helper, s.noise_helper_w, s.bandwidth_hz,
                       s.capacity_gap);
      if (!(p1 <= s.p_user_max_w * (1 + 1e-12))) return kInf;
      p1 = std::min(p1, s.p_user_max_w);
    }
    return t1 * p1 + compute_energy(L - lh, T, s.kappa_user, s.cycles_per_bit_user) +
           compute_energy(lh, T - t1, s.kappa_helper, s.cycles_per_bit_helper);
  };

  double best = kInf, best_t1 = 0, best_lh = 0;
  const auto t1s = linspace(0, T, 121);
  const auto lhs = linspace(lh_lo, lh_hi_all, 121);
  for (double t1 : t1s)
    for (double lh : lhs) {
      const double e = energy_at(t1, lh);
      if (e < best) { best = e; best_t1 = t1; best_lh = lh; }
    }
  if (best == kInf) return r;

  // Coordinate-wise golden polish around the grid incumbent; keep it only
  // if it actually improves.
  const double dt = T / 60.0, dl = (lh_hi_all - lh_lo) / 60.0;
  double t1 = best_t1, lh = best_lh;
  for (int pass = 0; pass < 3; ++pass) {
    t1 = golden_min([&](double t) { return energy_at(t, lh); },
                    std::max(0.0, t1 - dt), std::min(T, t1 + dt));
    lh = golden_min([&](double l) { return energy_at(t1, l); },
                    std::max(lh_lo, lh - dl), std::min(lh_hi_all, lh + dl));
  }
  const double polished = energy_at(t1, lh);
  if (polished < best) {
    best = polished;
    best_t1 = t1;
    best_lh = lh;
  }

  r.feasible = true;
  r.energy_j = best;
  r.allocation.tau1_s = best_t1;
  r.allocation.bits_helper = best_lh;
  r.allocation.bits_local = L - best_lh;
  r.allocation.p1_w =
      best_lh > 0 ? std::min(invert_rate(best_lh, best_t1, s.gain_user_helper,
                                         s.noise_helper_w, s.bandwidth_hz, s.capacity_gap),
                             s.p_user_max_w)
                  : 0.0;
  return r;
}

SchemeResult communication_coop(const Scenario& s, const CommunicationCoopOptions& opt) {
  s.validate();
  SchemeResult r;
  r.scheme = SchemeId::communication_coop;
  const double T = s.block_length_s;
  const double L = s.task_bits;
  if (L == 0) {
    r.feasible = true;
    if (opt.literal_full_block) r.allocation.tau3_s = T;
    return r;
  }
  const double la_lo = std::max(0.0, L - s.user_bit_cap());
  if (la_lo > L) return r;
  const double r1_max = rate_helper_ap(s, s.p_helper_max_w);

  struct Point {
    double cost = kInf;
    double p2 = 0, p3 = 0;
  };

  // Best broadcast/forward powers for one (bits, tau2, tau3) triple. The
  // broadcast power is searched by golden section between the decode-binding
  // power and the point where the direct link alone suffices.
  auto relay = [&](double la, double t2, double t3) -> Point {
    Point out;
    if (la <= 0) {
      out.cost = 0;
      return out;
    }
    if (t2 <= 0) return out;
    const double p_decode = invert_rate(la, t2, s.gain_user_helper, s.noise_helper_w,
                                        s.bandwidth_hz, s.capacity_gap);
    if (!(p_decode <= s.p_user_max_w * (1 + 1e-12))) return out;
    // Forward-hop cap limits how much residual tau3 can absorb.
    const double resid_cap = t3 * r1_max;
    double p_lo = std::min(p_decode, s.p_user_max_w);
    if (la - t2 * rate_user_ap(s, p_lo) > resid_cap * (1 + 1e-12)) {
      const double need = la - resid_cap;
      const double p_fwd = invert_rate(std::max(need, 0.0), t2, s.gain_user_ap, s.noise_ap_w,
                                       s.bandwidth_hz, s.capacity_gap);
      p_lo = std::max(p_lo, p_fwd);
      if (!(p_lo <= s.p_user_max_w * (1 + 1e-12))) return out;
      p_lo = std::min(p_lo, s.p_user_max_w);
    }
    const double p_zero = invert_rate(la, t2, s.gain_user_ap, s.noise_ap_w, s.bandwidth_hz,
                                      s.capacity_gap);
    const double p_hi = std::min(s.p_user_max_w, std::max(p_zero, p_lo));

    auto cost_at = [&](double p2) -> double {
      const double resid = la - t2 * rate_user_ap(s, p2);
      if (resid <= 0) return t2 * p2;
      if (t3 <= 0) return kInf;
      const double p3 = invert_rate(resid, t3, s.gain_helper_ap, s.noise_ap_w, s.bandwidth_hz,
                                    s.capacity_gap);
      if (!(p3 <= s.p_helper_max_w * (1 + 1e-12))) return kInf;
      return t2 * p2 + t3 * std::min(p3, s.p_helper_max_w);
    };

    double p_best = golden_min(cost_at, p_lo, p_hi);
    double c_best = cost_at(p_best);
    for (double p : {p_lo, p_hi}) {
      const double c = cost_at(p);
      if (c < c_best) { c_best = c; p_best = p; }
    }
    if (c_best == kInf) return out;
    out.cost = c_best;
    out.p2 = p_best;
    const double resid = la - t2 * rate_user_ap(s, p_best);
    out.p3 = resid > 0 ? std::min(invert_rate(resid, t3, s.gain_helper_ap, s.noise_ap_w,
                                              s.bandwidth_hz, s.capacity_gap),
                                  s.p_helper_max_w)
                       : 0.0;
    return out;
  };

  double best = kInf;
  Allocation ba;
  auto offer = [&](double la, double t2, double t3) {
    const Point p = relay(la, t2, t3);
    if (p.cost == kInf) return;
    const double e = p.cost + compute_energy(L - la, T, s.kappa_user, s.cycles_per_bit_user);
    if (e < best) {
      best = e;
      ba = Allocation{};
      ba.tau2_s = t2;
      ba.tau3_s = t3;
      ba.p2_w = p.p2;
      ba.p3_w = p.p3;
      ba.bits_local = L - la;
      ba.bits_ap = la;
    }
  };

  double la_a = la_lo, la_b = L, t2_a = 0, t2_b = T;
  for (int round = 0; round < 3; ++round) {
    const auto las = linspace(la_a, la_b, 49);
    const auto t2s = linspace(t2_a, t2_b, 49);
    for (double la : las) {
      const double tau4 = opt.literal_full_block ? 0.0 : la / s.f_ap_max_hz;
      if (tau4 > T) continue;
      for (double t2 : t2s) {
        if (t2 > T - tau4) break;
        if (opt.literal_full_block) {
          offer(la, t2, T - t2);
        } else {
          for (double t3 : linspace(0, T - tau4 - t2, 25)) offer(la, t2, t3);
        }
      }
    }
    if (best == kInf) break;
    const double wa = (la_b - la_a) / 5, wt = (t2_b - t2_a) / 5;
    la_a = std::max(la_lo, ba.bits_ap - wa / 2);
    la_b = std::min(L, ba.bits_ap + wa / 2);
    t2_a = std::max(0.0, ba.tau2_s - wt / 2);
    t2_b = std::min(T, ba.tau2_s + wt / 2);
  }
  if (best == kInf) return r;

  r.feasible = true;
  r.energy_j = best;
  r.allocation = ba;
  return r;
}

}  // namespace mecc
