#include "mecc/dual.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mecc {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

// Normalization of the multiplier space for the ellipsoid: bit prices are
// O(1e-7) J/bit and the time price O(1e-2) J/s, so the ellipsoid works on
// mJ/Mbit and mJ/s coordinates instead.
constexpr double kBitPrice = 1e-9;   // J/bit per normalized unit
constexpr double kTimePrice = 1e-3;  // J/s per normalized unit
constexpr double kEnergyScale = 1e3; // normalized dual value is in mJ

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

SlotRule rule_from_sign(double rho) {
  if (rho < 0) return SlotRule::full;
  if (rho > 0) return SlotRule::zero;
  return SlotRule::tie;
}

DualPoint from_normalized(const std::array<double, 5>& y) {
  DualPoint d;
  d.lambda1 = y[0] * kBitPrice;
  d.lambda2 = y[1] * kBitPrice;
  d.lambda3 = y[2] * kBitPrice;
  d.mu1 = y[3] * kTimePrice;
  d.mu2 = y[4] * kBitPrice;
  return d;
}

}  // namespace

Sub1Solution solve_subproblem1(const DualPoint& d, const Scenario& s) {
  Sub1Solution r;
  const double snr1 = s.gain_user_helper / (s.capacity_gap * s.noise_helper_w);
  const double B = s.bandwidth_hz;

  const double p_raw = d.lambda1 * B / kLn2 - 1.0 / snr1;
  r.p1_w = clamp(p_raw, 0.0, s.p_user_max_w);

  const double kc3 = s.kappa_helper * s.cycles_per_bit_helper * s.cycles_per_bit_helper *
                     s.cycles_per_bit_helper;
  const double m_cap = s.helper_rate_cap();
  if (d.mu2 - d.lambda1 >= 0) {
    r.m1_bps = clamp(std::sqrt((d.mu2 - d.lambda1) / (3.0 * kc3)), 0.0, m_cap);
  } else {
    r.m1_bps = 0.0;
  }

  const double snr_term = r.p1_w * snr1;
  if (p_raw >= s.p_user_max_w) {
    r.alpha1 = d.lambda1 * B * snr1 / (kLn2 * (1.0 + snr_term)) - 1.0;
  }
  if (d.mu2 - d.lambda1 >= 0 &&
      std::sqrt((d.mu2 - d.lambda1) / (3.0 * kc3)) >= m_cap) {
    r.beta1 = d.mu2 - d.lambda1 - 3.0 * kc3 * r.m1_bps * r.m1_bps;
  }

  const double cm = s.cycles_per_bit_helper * r.m1_bps;
  r.rho1 = d.mu1 - d.lambda1 * rate_user_helper(s, r.p1_w) + 2.0 * s.kappa_helper * cm * cm * cm +
           d.lambda1 * B * snr_term / ((1.0 + snr_term) * kLn2) - r.alpha1 * s.p_user_max_w +
           r.beta1 * s.f_helper_max_hz / s.cycles_per_bit_helper;
  r.tau1_rule = rule_from_sign(r.rho1);
  return r;
}

Sub2Solution solve_subproblem2(const DualPoint& d, const Scenario& s) {
  Sub2Solution r;
  const double B = s.bandwidth_hz;
  const double a = s.gain_user_ap / (s.capacity_gap * s.noise_ap_w);      // direct-link SNR slope
  const double b = s.gain_user_helper / (s.capacity_gap * s.noise_helper_w);  // decode SNR slope

  // Stationary power solves u p^2 + v p + w = 0; the discriminant is
  // nonnegative for every nonnegative multiplier pair.
  const double u = (kLn2 / B) * a * b;
  const double v = (kLn2 / B) * (a + b) - (d.lambda2 + d.lambda3) * a * b;
  const double w = kLn2 / B - d.lambda2 * a - d.lambda3 * b;
  double disc = v * v - 4.0 * u * w;
  if (disc < -1e-12 * std::max(v * v, std::fabs(4.0 * u * w)))
    throw std::logic_error("solve_subproblem2: negative discriminant");
  disc = std::max(disc, 0.0);
  const double root = v > 0 ? -2.0 * w / (v + std::sqrt(disc))
                            : (std::sqrt(disc) - v) / (2.0 * u);
  r.p2_w = clamp(root, 0.0, s.p_user_max_w);

  const double sa = r.p2_w * a;
  const double sb = r.p2_w * b;
  if (root >= s.p_user_max_w) {
    r.alpha2 = d.lambda3 * B * b / ((1.0 + sb) * kLn2) +
               d.lambda2 * B * a / ((1.0 + sa) * kLn2) - 1.0;
  }
  r.rho2 = d.mu1 - d.lambda2 * rate_user_ap(s, r.p2_w) + d.lambda2 * B * sa / ((1.0 + sa) * kLn2) -
           d.lambda3 * rate_user_helper(s, r.p2_w) + d.lambda3 * B * sb / ((1.0 + sb) * kLn2) -
           r.alpha2 * s.p_user_max_w;
  r.tau2_rule = rule_from_sign(r.rho2);
  return r;
}

Sub3Solution solve_subproblem3(const DualPoint& d, const Scenario& s) {
  Sub3Solution r;
  const double B = s.bandwidth_hz;
  const double snr = s.gain_helper_ap / (s.capacity_gap * s.noise_ap_w);

  const double p_raw = d.lambda2 * B / kLn2 - 1.0 / snr;
  r.p3_w = clamp(p_raw, 0.0, s.p_helper_max_w);

  const double st = r.p3_w * snr;
  if (p_raw >= s.p_helper_max_w) {
    r.alpha3 = d.lambda2 * B * snr / ((1.0 + st) * kLn2) - 1.0;
  }
  r.rho3 = d.mu1 + d.lambda2 * B * st / ((1.0 + st) * kLn2) -
           d.lambda2 * rate_helper_ap(s, r.p3_w) - r.alpha3 * s.p_helper_max_w;
  r.tau3_rule = rule_from_sign(r.rho3);
  return r;
}

double solve_subproblem4(const DualPoint& d, const Scenario& s) {
  if (d.mu2 <= 0) return 0.0;
  const double kc3 = s.kappa_user * s.cycles_per_bit_user * s.cycles_per_bit_user *
                     s.cycles_per_bit_user;
  const double raw = s.block_length_s * std::sqrt(d.mu2 / (3.0 * kc3));
  return clamp(raw, 0.0, s.user_bit_cap());
}

double solve_subproblem5(const DualPoint& d, const Scenario& s) {
  const double slope = d.lambda2 + d.lambda3 + d.mu1 / s.f_ap_max_hz - d.mu2;
  return slope < 0 ? s.task_bits : 0.0;
}

DualEvaluation eval_dual(const DualPoint& d, const Scenario& s) {
  if (!d.in_domain())
    throw std::invalid_argument("eval_dual: multipliers outside the dual-feasible set");

  DualEvaluation ev;
  auto& sub = ev.sub;
  sub.sub1 = solve_subproblem1(d, s);
  sub.sub2 = solve_subproblem2(d, s);
  sub.sub3 = solve_subproblem3(d, s);
  sub.bits_local = solve_subproblem4(d, s);
  sub.bits_ap = solve_subproblem5(d, s);

  const double T = s.block_length_s;
  sub.tau1_s = sub.sub1.tau1_rule == SlotRule::full ? T : 0.0;
  sub.tau2_s = sub.sub2.tau2_rule == SlotRule::full ? T : 0.0;
  sub.tau3_s = sub.sub3.tau3_rule == SlotRule::full ? T : 0.0;
  sub.bits_helper = sub.sub1.m1_bps * (T - sub.tau1_s);

  // Perspective convention: an empty slot transmits nothing and costs nothing.
  const double carried1 = sub.tau1_s == 0 ? 0.0 : sub.tau1_s * rate_user_helper(s, sub.sub1.p1_w);
  const double carried2_sum = sub.tau2_s == 0 ? 0.0 : sub.tau2_s * rate_user_ap(s, sub.sub2.p2_w);
  const double carried2_dec =
      sub.tau2_s == 0 ? 0.0 : sub.tau2_s * rate_user_helper(s, sub.sub2.p2_w);
  const double carried3 = sub.tau3_s == 0 ? 0.0 : sub.tau3_s * rate_helper_ap(s, sub.sub3.p3_w);

  sub.value1 = sub.tau1_s * sub.sub1.p1_w + d.mu1 * sub.tau1_s - d.lambda1 * carried1 +
               compute_energy(sub.bits_helper, T - sub.tau1_s, s.kappa_helper,
                              s.cycles_per_bit_helper) +
               (d.lambda1 - d.mu2) * sub.bits_helper;
  sub.value2 = sub.tau2_s * sub.sub2.p2_w + d.mu1 * sub.tau2_s - d.lambda2 * carried2_sum -
               d.lambda3 * carried2_dec;
  sub.value3 = sub.tau3_s * sub.sub3.p3_w + d.mu1 * sub.tau3_s - d.lambda2 * carried3;
  sub.value4 = compute_energy(sub.bits_local, T, s.kappa_user, s.cycles_per_bit_user) -
               d.mu2 * sub.bits_local;
  sub.value5 = (d.lambda2 + d.lambda3 + d.mu1 / s.f_ap_max_hz - d.mu2) * sub.bits_ap;

  ev.value = sub.value1 + sub.value2 + sub.value3 + sub.value4 + sub.value5 - d.mu1 * T +
             d.mu2 * s.task_bits;
  ev.subgradient = {
      sub.bits_helper - carried1,
      sub.bits_ap - carried2_sum - carried3,
      sub.bits_ap - carried2_dec,
      sub.tau1_s + sub.tau2_s + sub.tau3_s + sub.bits_ap / s.f_ap_max_hz - T,
      s.task_bits - sub.bits_local - sub.bits_helper - sub.bits_ap,
  };
  return ev;
}

EllipsoidResult ellipsoid_maximize(const Scenario& s, const EllipsoidConfig& cfg) {
  s.validate();
  constexpr int n = 5;
  std::array<double, n> x{1, 1, 1, 1, 1};  // normalized multipliers
  std::array<double, static_cast<std::size_t>(n) * n> P{};
  for (int i = 0; i < n; ++i) P[i * n + i] = cfg.initial_radius * cfg.initial_radius;

  EllipsoidResult res;
  res.best_value = -std::numeric_limits<double>::infinity();
  bool have_best = false;

  std::array<double, n> a{};   // cut normal; the kept half-space is a.(z-x) <= 0
  std::array<double, n> Pa{};
  int k = 0;
  for (; k < cfg.max_iters; ++k) {
    // Feasibility cut on the first violated sign constraint, otherwise an
    // objective cut along the negated subgradient.
    int violated = -1;
    for (int i = 0; i < 4; ++i) {
      if (x[i] < 0) { violated = i; break; }
    }
    bool check_stop = false;
    double g_norm = 0;
    if (violated >= 0) {
      a.fill(0.0);
      a[violated] = -1.0;
    } else {
      const DualEvaluation ev = eval_dual(from_normalized(x), s);
      if (!have_best || ev.value > res.best_value) {
        have_best = true;
        res.best_value = ev.value;
        res.best_point = from_normalized(x);
      }
      // Subgradient in normalized coordinates: Mbit for the bit prices,
      // seconds (times the energy scale) for the time price.
      a[0] = -ev.subgradient[0] * kEnergyScale * kBitPrice;
      a[1] = -ev.subgradient[1] * kEnergyScale * kBitPrice;
      a[2] = -ev.subgradient[2] * kEnergyScale * kBitPrice;
      a[3] = -ev.subgradient[3] * kEnergyScale * kTimePrice;
      a[4] = -ev.subgradient[4] * kEnergyScale * kBitPrice;
      g_norm = ev.value * kEnergyScale;
      check_stop = true;
    }

    double aPa = 0;
    for (int i = 0; i < n; ++i) {
      double t = 0;
      for (int j = 0; j < n; ++j) t += P[i * n + j] * a[j];
      Pa[i] = t;
      aPa += a[i] * t;
    }
    if (check_stop) {
      const double bound = aPa > 0 ? std::sqrt(aPa) : 0.0;
      res.trace.gap_bound = bound;
      if (bound <= cfg.eps_abs + cfg.eps_rel * std::fabs(g_norm)) {
        res.trace.converged = true;
        break;
      }
    }
    if (aPa <= 0) {  // ellipsoid degenerated numerically, nothing left to cut
      res.trace.converged = have_best;
      break;
    }

    // Central-cut update.
    const double inv = 1.0 / std::sqrt(aPa);
    for (int i = 0; i < n; ++i) x[i] -= Pa[i] * inv / (n + 1.0);
    const double scale = n * n / (n * n - 1.0);
    const double coef = 2.0 / (n + 1.0) * inv * inv;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) P[i * n + j] = scale * (P[i * n + j] - coef * Pa[i] * Pa[j]);
    for (int i = 0; i < n; ++i)  // keep P symmetric against drift
      for (int j = i + 1; j < n; ++j) {
        const double m = 0.5 * (P[i * n + j] + P[j * n + i]);
        P[i * n + j] = P[j * n + i] = m;
      }
  }
  res.trace.iterations = k;
  return res;
}

namespace {

// Fallback recovery for near-capacity tasks: the stated recovery pins the
// helper bits to m1 (T - tau1), which collapses the feasible set to a knife
// edge when every node is saturated, so a ~1e-6 relative error in m1 leaves
// nothing to recover. Here the helper and local shares float as variables
// with their compute costs linearized at the dual anchors; the deviations
// are a few bits, far below where the linearization could mislead.
PrimalRecovery recover_flexible(const PrimalRecoveryInput& in, const Scenario& s) {
  const double T = s.block_length_s;
  const double L = s.task_bits;
  const double r01_1 = rate_user_helper(s, in.p1_w);
  const double r0_2 = rate_user_ap(s, in.p2_w);
  const double r01_2 = rate_user_helper(s, in.p2_w);
  const double r1_3 = rate_helper_ap(s, in.p3_w);
  const double kc3_h = s.kappa_helper * s.cycles_per_bit_helper * s.cycles_per_bit_helper *
                       s.cycles_per_bit_helper;
  const double kc3_u = s.kappa_user * s.cycles_per_bit_user * s.cycles_per_bit_user *
                       s.cycles_per_bit_user;
  const double lu_window = std::max(100.0, 1e-3 * L);

  // Variables: tau1, tau2, tau3, l_h, l_a, l_u.
  LinearProgram lp;
  lp.objective = {in.p1_w + 2 * kc3_h * in.m1_bps * in.m1_bps * in.m1_bps,
                  in.p2_w,
                  in.p3_w,
                  3 * kc3_h * in.m1_bps * in.m1_bps,
                  0,
                  3 * kc3_u * in.bits_local * in.bits_local / (T * T)};
  lp.a_ub = {
      {-r01_1, 0, 0, 1, 0, 0},                                  // helper feed
      {s.f_helper_max_hz, 0, 0, s.cycles_per_bit_helper, 0, 0}, // helper CPU cap
      {0, -r0_2, -r1_3, 0, 1, 0},                               // relay sum
      {0, -r01_2, 0, 0, 1, 0},                                  // relay decode
      {1, 1, 1, 0, 1.0 / s.f_ap_max_hz, 0},                     // time budget
  };
  lp.b_ub = {0, T * s.f_helper_max_hz, 0, 0, T};
  lp.a_eq = {{0, 0, 0, 1, 1, 1}};
  lp.b_eq = {L};
  lp.lower = {0, 0, 0, 0, 0, std::max(0.0, in.bits_local - lu_window)};
  lp.upper = {T, T, T, std::numeric_limits<double>::infinity(),
              std::numeric_limits<double>::infinity(),
              std::min({s.user_bit_cap(), L, in.bits_local + lu_window})};
  if (lp.lower[5] > lp.upper[5]) lp.lower[5] = lp.upper[5];

  const LpSolution sol = solve_lp(lp);
  PrimalRecovery out;
  if (sol.status != LpStatus::optimal) return out;
  out.feasible = true;
  auto clip = [T](double v) { return std::min(std::max(v, 0.0), T); };
  out.allocation.tau1_s = clip(sol.x[0]);
  out.allocation.tau2_s = clip(sol.x[1]);
  out.allocation.tau3_s = clip(sol.x[2]);
  out.allocation.p1_w = in.p1_w;
  out.allocation.p2_w = in.p2_w;
  out.allocation.p3_w = in.p3_w;
  out.allocation.bits_helper = std::max(sol.x[3], 0.0);
  out.allocation.bits_ap = std::max(sol.x[4], 0.0);
  out.allocation.bits_local = std::max(sol.x[5], 0.0);
  return out;
}

// Re-establish exact feasibility of a recovered schedule. Near-converged
// multipliers leave sub-bit inconsistencies between the fixed powers/rates
// and the slot durations; trim the AP share to what the slots really carry
// and fold the leftover bits into the local and helper shares.
bool repair_allocation(Allocation& a, const Scenario& s) {
  const double T = s.block_length_s;
  const double L = s.task_bits;
  auto clip = [T](double v) { return std::min(std::max(v, 0.0), T); };
  a.tau1_s = clip(a.tau1_s);
  a.tau2_s = clip(a.tau2_s);
  a.tau3_s = clip(a.tau3_s);
  if (a.tau1_s + a.tau2_s > T) a.tau2_s = T - a.tau1_s;
  if (a.tau1_s + a.tau2_s + a.tau3_s > T) a.tau3_s = T - a.tau1_s - a.tau2_s;

  a.bits_local = std::min({a.bits_local, L, s.user_bit_cap()});
  const double feed = a.tau1_s == 0 ? 0.0 : a.tau1_s * rate_user_helper(s, a.p1_w);
  a.bits_helper = std::min({a.bits_helper, L - a.bits_local, feed,
                            s.helper_bit_cap(a.tau1_s)});
  a.bits_helper = std::max(a.bits_helper, 0.0);

  const double budget = L - a.bits_local - a.bits_helper;
  const double link = a.tau2_s == 0
                          ? 0.0
                          : std::min(a.tau2_s * rate_user_ap(s, a.p2_w) +
                                         (a.tau3_s == 0
                                              ? 0.0
                                              : a.tau3_s * rate_helper_ap(s, a.p3_w)),
                                     a.tau2_s * rate_user_helper(s, a.p2_w));
  const double time_cap =
      s.f_ap_max_hz * std::max(0.0, T - a.tau1_s - a.tau2_s - a.tau3_s);
  a.bits_ap = std::max(0.0, std::min({budget, link, time_cap}));

  double residual = budget - a.bits_ap;
  if (residual > 0) {
    const double grow_u = std::min(residual, std::min(s.user_bit_cap(), L) - a.bits_local);
    a.bits_local += std::max(grow_u, 0.0);
    residual -= std::max(grow_u, 0.0);
  }
  if (residual > 0) {
    const double cap_h = std::min(feed, s.helper_bit_cap(a.tau1_s));
    const double grow_h = std::min(residual, cap_h - a.bits_helper);
    a.bits_helper += std::max(grow_h, 0.0);
    residual -= std::max(grow_h, 0.0);
  }
  return residual <= 1e-10 * std::max(1.0, L);
}

}  // namespace

SolveReport solve_joint(const Scenario& s, const SolveConfig& cfg) {
  s.validate();
  SolveReport rep;

  const FeasibilityResult feas = max_supportable_bits(s);
  rep.l_max_bits = feas.l_max_bits;
  if (s.task_bits > feas.l_max_bits) {
    rep.status = SolveStatus::infeasible_task;
    return rep;
  }
  if (s.task_bits == 0) {
    rep.status = SolveStatus::optimal;
    rep.energy = total_energy(rep.allocation, s);
    return rep;
  }

  EllipsoidConfig ecfg = cfg.ellipsoid;
  for (int attempt = 0; attempt < 2; ++attempt) {
    const EllipsoidResult dual = ellipsoid_maximize(s, ecfg);
    rep.ellipsoid_iterations += dual.trace.iterations;
    rep.multipliers = dual.best_point;
    rep.dual_value_j = dual.best_value;

    const Sub1Solution s1 = solve_subproblem1(dual.best_point, s);
    const Sub2Solution s2 = solve_subproblem2(dual.best_point, s);
    const Sub3Solution s3 = solve_subproblem3(dual.best_point, s);
    PrimalRecoveryInput rin;
    rin.p1_w = s1.p1_w;
    rin.p2_w = s2.p2_w;
    rin.p3_w = s3.p3_w;
    rin.m1_bps = s1.m1_bps;
    // The cube-root rule can overshoot the task by the multiplier error;
    // more than the whole task is never useful.
    rin.bits_local = std::min(solve_subproblem4(dual.best_point, s), s.task_bits);

    // The stated LP first; escalate only if the sliver around a binding
    // optimum turned out empty at this precision: a mildly relaxed variant,
    // then the flexible-shares fallback.
    for (int rung = 0; rung < 3; ++rung) {
      PrimalRecovery rec;
      try {
        rec = rung < 2 ? recover_primal(rin, s, rung == 0 ? 0.0 : 1e-6)
                       : recover_flexible(rin, s);
      } catch (const std::logic_error&) {
        // On a knife-edge feasible set the solver may fail to certify its
        // own vertex; the next rung resolves it.
        continue;
      }
      if (!rec.feasible) continue;
      Allocation candidate = rec.allocation;
      if (!repair_allocation(candidate, s)) continue;
      const EnergyBreakdown energy = total_energy(candidate, s);
      const double gap = energy.e_total_j - rep.dual_value_j;
      const double gap_tol =
          std::max(cfg.gap_tolerance_abs_j, cfg.gap_tolerance_rel * energy.e_total_j);
      if (gap > gap_tol || gap < -gap_tol) continue;
      if (!validate_allocation(candidate, s, cfg.validation_tolerance).feasible) continue;
      rep.allocation = candidate;
      rep.energy = energy;
      rep.duality_gap_j = gap;
      rep.status = SolveStatus::optimal;
      return rep;
    }
    // Retry once with a tighter dual tolerance before giving up.
    ecfg.eps_rel *= 0.1;
    ecfg.eps_abs *= 0.1;
  }
  rep.status = SolveStatus::not_converged;
  return rep;
}

}  // namespace mecc
