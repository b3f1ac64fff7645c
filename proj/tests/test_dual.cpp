#include <array>
#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "mecc/dual.hpp"
#include "mecc/oracle.hpp"
#include "reference.hpp"
#include "support.hpp"

using namespace mecc;
using test::random_dual_point;
using test::sub1_objective;
using test::sub2_objective;
using test::sub3_objective;
using test::sub4_objective;
using test::sub5_objective;

namespace {

double sub1_value(const DualPoint& d, const Scenario& s, const Sub1Solution& r) {
  const double T = s.block_length_s;
  const double t1 = r.tau1_rule == SlotRule::full ? T : 0.0;
  return sub1_objective(d, s, r.p1_w * t1, t1, r.m1_bps * (T - t1));
}

}  // namespace

TEST_SUITE_BEGIN("dual");

TEST_CASE("slot-1 closed form") {
  const Scenario s = test::default_scenario();

  SUBCASE("zero price clamps the power to zero") {
    DualPoint d;
    const Sub1Solution r = solve_subproblem1(d, s);
    CHECK(r.p1_w == 0.0);
  }

  SUBCASE("helper rate is zero when the bit price is upside down") {
    DualPoint d;
    d.lambda1 = 1e-6;
    d.mu2 = 0.5e-6;  // mu2 < lambda1
    const Sub1Solution r = solve_subproblem1(d, s);
    CHECK(r.m1_bps == 0.0);
  }

  SUBCASE("water level reproduces a one-watt power") {
    DualPoint d;
    d.lambda1 = 8.129e-7;
    const Sub1Solution r = solve_subproblem1(d, s);
    CHECK(std::fabs(r.p1_w - 1.0) < 1e-3);
  }

  SUBCASE("power matches a golden-section reference") {
    std::mt19937_64 rng(31);
    for (int i = 0; i < 60; ++i) {
      const DualPoint d = random_dual_point(rng);
      const Sub1Solution r = solve_subproblem1(d, s);
      const double ref = test::golden_argmin(
          [&](double p) { return p + d.mu1 - d.lambda1 * rate_user_helper(s, p); }, 0,
          s.p_user_max_w);
      CHECK(std::fabs(r.p1_w - ref) < 1e-6);
    }
  }
}

TEST_CASE("slot-2 closed form") {
  const Scenario s = test::default_scenario();

  SUBCASE("free capacity prices give zero power") {
    DualPoint d;
    CHECK(solve_subproblem2(d, s).p2_w == 0.0);
  }

  SUBCASE("huge prices hit the cap") {
    DualPoint d;
    d.lambda2 = 1;
    d.lambda3 = 1;
    CHECK(solve_subproblem2(d, s).p2_w == doctest::Approx(s.p_user_max_w));
  }

  SUBCASE("matches a golden-section reference") {
    std::mt19937_64 rng(32);
    for (int i = 0; i < 100; ++i) {
      const DualPoint d = random_dual_point(rng);
      const Sub2Solution r = solve_subproblem2(d, s);
      const double ref = test::golden_argmin(
          [&](double p) {
            return p + d.mu1 - d.lambda2 * rate_user_ap(s, p) -
                   d.lambda3 * rate_user_helper(s, p);
          },
          0, s.p_user_max_w);
      CHECK(std::fabs(r.p2_w - ref) < 1e-6);
    }
  }
}

TEST_CASE("slot-3 closed form") {
  const Scenario s = test::default_scenario();

  SUBCASE("zero and capped powers") {
    DualPoint d;
    CHECK(solve_subproblem3(d, s).p3_w == 0.0);
    d.lambda2 = 1;
    CHECK(solve_subproblem3(d, s).p3_w == doctest::Approx(s.p_helper_max_w));
  }

  SUBCASE("matches a golden-section reference") {
    std::mt19937_64 rng(33);
    for (int i = 0; i < 100; ++i) {
      const DualPoint d = random_dual_point(rng);
      const Sub3Solution r = solve_subproblem3(d, s);
      const double ref = test::golden_argmin(
          [&](double p) { return p + d.mu1 - d.lambda2 * rate_helper_ap(s, p); }, 0,
          s.p_helper_max_w);
      CHECK(std::fabs(r.p3_w - ref) < 1e-6);
    }
  }
}

TEST_CASE("local-bits closed form") {
  const Scenario s = test::default_scenario();
  DualPoint d;
  CHECK(solve_subproblem4(d, s) == 0.0);
  d.mu2 = 3e-8;
  CHECK(solve_subproblem4(d, s) == doctest::Approx(1e4).epsilon(1e-9));
  d.mu2 = 1;
  CHECK(solve_subproblem4(d, s) == doctest::Approx(2e5).epsilon(1e-12));
}

TEST_CASE("ap-bits selection by price sign") {
  const Scenario s = test::default_scenario();
  DualPoint d;
  d.mu2 = -1e-3;  // slope strictly positive
  CHECK(solve_subproblem5(d, s) == 0.0);
  d.mu2 = 1e-3;   // slope strictly negative
  CHECK(solve_subproblem5(d, s) == doctest::Approx(s.task_bits));
  d.mu2 = 0;      // exact tie evaluates to zero
  CHECK(solve_subproblem5(d, s) == 0.0);
}

TEST_CASE("per-slot minimality against random feasible points") {
  const Scenario s = test::default_scenario();
  std::mt19937_64 rng(34);
  const double T = s.block_length_s;
  for (int trial = 0; trial < 10; ++trial) {
    const DualPoint d = random_dual_point(rng);
    const Sub1Solution r1 = solve_subproblem1(d, s);
    const Sub2Solution r2 = solve_subproblem2(d, s);
    const Sub3Solution r3 = solve_subproblem3(d, s);
    const double lu_star = solve_subproblem4(d, s);
    const double la_star = solve_subproblem5(d, s);

    const double v1 = sub1_value(d, s, r1);
    const double t2 = r2.tau2_rule == SlotRule::full ? T : 0.0;
    const double v2 = sub2_objective(d, s, r2.p2_w * t2, t2);
    const double t3 = r3.tau3_rule == SlotRule::full ? T : 0.0;
    const double v3 = sub3_objective(d, s, r3.p3_w * t3, t3);
    const double v4 = sub4_objective(d, s, lu_star);
    const double v5 = sub5_objective(d, s, la_star);

    for (int k = 0; k < 200; ++k) {
      const double t1r = test::uniform(rng, 0, T);
      const double e1r = test::uniform(rng, 0, t1r * s.p_user_max_w);
      const double lhr = test::uniform(rng, 0, s.helper_bit_cap(t1r));
      CHECK(v1 <= sub1_objective(d, s, e1r, t1r, lhr) + 1e-9);

      const double t2r = test::uniform(rng, 0, T);
      const double e2r = test::uniform(rng, 0, t2r * s.p_user_max_w);
      CHECK(v2 <= sub2_objective(d, s, e2r, t2r) + 1e-9);

      const double t3r = test::uniform(rng, 0, T);
      const double e3r = test::uniform(rng, 0, t3r * s.p_helper_max_w);
      CHECK(v3 <= sub3_objective(d, s, e3r, t3r) + 1e-9);

      const double lur = test::uniform(rng, 0, s.user_bit_cap());
      CHECK(v4 <= sub4_objective(d, s, lur) + 1e-9);

      const double lar = test::uniform(rng, 0, s.task_bits);
      CHECK(v5 <= sub5_objective(d, s, lar) + 1e-9);
    }
  }
}

TEST_CASE("dual value at the origin") {
  const Scenario s = test::default_scenario();
  const DualEvaluation ev = eval_dual(DualPoint{}, s);
  CHECK(ev.value == doctest::Approx(0.0));
  CHECK(ev.subgradient[0] == doctest::Approx(0.0));
  CHECK(ev.subgradient[1] == doctest::Approx(0.0));
  CHECK(ev.subgradient[2] == doctest::Approx(0.0));
  CHECK(ev.subgradient[3] == doctest::Approx(-s.block_length_s));
  CHECK(ev.subgradient[4] == doctest::Approx(s.task_bits));
}

TEST_CASE("eval_dual rejects points outside the dual domain") {
  const Scenario s = test::default_scenario();
  DualPoint d;
  d.lambda1 = -1e-9;
  CHECK_THROWS_AS(eval_dual(d, s), std::invalid_argument);
}

TEST_CASE("weak duality against the all-local schedule") {
  const Scenario s = test::default_scenario();  // task fits on the user CPU
  Allocation local;
  local.bits_local = s.task_bits;
  const double primal = total_energy(local, s).e_total_j;
  std::mt19937_64 rng(35);
  for (int i = 0; i < 100; ++i) {
    const DualPoint d = random_dual_point(rng);
    CHECK(eval_dual(d, s).value <= primal + 1e-12);
  }
}

TEST_CASE("subgradient matches central differences at smooth points") {
  const Scenario s = test::default_scenario();
  std::mt19937_64 rng(36);

  // Normalized coordinates as used by the ellipsoid.
  auto eval_norm = [&](const std::array<double, 5>& y) {
    DualPoint d;
    d.lambda1 = y[0] * 1e-9;
    d.lambda2 = y[1] * 1e-9;
    d.lambda3 = y[2] * 1e-9;
    d.mu1 = y[3] * 1e-3;
    d.mu2 = y[4] * 1e-9;
    return eval_dual(d, s);
  };
  auto saturation = [](double v, double lo, double hi) {
    return v == lo ? 0 : (v == hi ? 2 : 1);
  };
  auto branch_signature = [&](const DualEvaluation& ev) {
    return std::array<int, 9>{static_cast<int>(ev.sub.sub1.tau1_rule),
                              static_cast<int>(ev.sub.sub2.tau2_rule),
                              static_cast<int>(ev.sub.sub3.tau3_rule),
                              ev.sub.bits_ap == 0.0 ? 0 : 1,
                              saturation(ev.sub.sub1.p1_w, 0, s.p_user_max_w),
                              saturation(ev.sub.sub2.p2_w, 0, s.p_user_max_w),
                              saturation(ev.sub.sub3.p3_w, 0, s.p_helper_max_w),
                              saturation(ev.sub.bits_local, 0, s.user_bit_cap()),
                              saturation(ev.sub.sub1.m1_bps, 0, s.helper_rate_cap())};
  };

  int accepted = 0;
  for (int i = 0; i < 400 && accepted < 50; ++i) {
    std::array<double, 5> y{}, dir{};
    for (auto& v : y) v = test::uniform(rng, 0, 2000);
    y[4] = test::uniform(rng, -500, 2000);
    double norm = 0;
    for (auto& v : dir) {
      v = test::uniform(rng, -1, 1);
      norm += v * v;
    }
    norm = std::sqrt(norm);
    for (auto& v : dir) v /= norm;

    const double h = 1e-7;  // step on the normalized multiplier scale
    auto central = [&](double step, bool& usable) -> double {
      std::array<double, 5> yp = y, ym = y;
      for (int k = 0; k < 5; ++k) {
        yp[k] += step * dir[k];
        ym[k] -= step * dir[k];
      }
      for (int k = 0; k < 4; ++k) {
        if (yp[k] < 0 || ym[k] < 0) {
          usable = false;
          return 0;
        }
      }
      const DualEvaluation ep = eval_norm(yp);
      const DualEvaluation em = eval_norm(ym);
      const DualEvaluation e0 = eval_norm(y);
      usable = branch_signature(e0) == branch_signature(ep) &&
               branch_signature(e0) == branch_signature(em);
      return (ep.value - em.value) / (2 * step);
    };

    bool ok1 = true, ok2 = true;
    const double fd = central(h, ok1);
    const double fd_half = central(h / 8, ok2);
    if (!ok1 || !ok2) continue;  // kink between the samples
    // The square-root branches have unbounded curvature near their roots;
    // keep only points where the difference quotient has stabilized.
    if (std::fabs(fd - fd_half) > 1e-5 * std::max(std::fabs(fd), 1e-12)) continue;

    // Chain rule back to normalized coordinates.
    const std::array<double, 5> scale{1e-9, 1e-9, 1e-9, 1e-3, 1e-9};
    const DualEvaluation e0 = eval_norm(y);
    double dd = 0;
    for (int k = 0; k < 5; ++k) dd += e0.subgradient[k] * scale[k] * dir[k];
    if (std::fabs(dd) < 1e-12) continue;
    CHECK(std::fabs(fd - dd) <= 1e-4 * std::fabs(dd) + 1e-12);
    ++accepted;
  }
  CHECK(accepted >= 30);
}

TEST_CASE("clamps respect the box constraints exactly") {
  const Scenario s = test::default_scenario();
  std::mt19937_64 rng(37);
  for (int i = 0; i < 300; ++i) {
    const DualPoint d = random_dual_point(rng);
    const DualEvaluation ev = eval_dual(d, s);
    CHECK(ev.sub.sub1.p1_w >= 0);
    CHECK(ev.sub.sub1.p1_w <= s.p_user_max_w);
    CHECK(ev.sub.sub2.p2_w >= 0);
    CHECK(ev.sub.sub2.p2_w <= s.p_user_max_w);
    CHECK(ev.sub.sub3.p3_w >= 0);
    CHECK(ev.sub.sub3.p3_w <= s.p_helper_max_w);
    CHECK(ev.sub.sub1.m1_bps >= 0);
    CHECK(ev.sub.sub1.m1_bps <= s.helper_rate_cap());
    CHECK(ev.sub.bits_local >= 0);
    CHECK(ev.sub.bits_local <= s.user_bit_cap());
    const bool la_ok = ev.sub.bits_ap == 0.0 || ev.sub.bits_ap == s.task_bits;
    CHECK(la_ok);
  }
}

TEST_CASE("ellipsoid on an empty task") {
  Scenario s = test::default_scenario();
  s.task_bits = 0;
  const EllipsoidResult r = ellipsoid_maximize(s);
  CHECK(r.trace.converged);
  CHECK(std::fabs(r.best_value) <= 1e-9);
}

TEST_CASE("best feasible dual value never decreases") {
  // Monotonicity holds by construction of the best-iterate bookkeeping; spot
  // check that successive tighter tolerances cannot go backwards.
  const Scenario s = test::default_scenario();
  EllipsoidConfig loose;
  loose.eps_rel = 1e-3;
  EllipsoidConfig tight;
  const double g_loose = ellipsoid_maximize(s, loose).best_value;
  const double g_tight = ellipsoid_maximize(s, tight).best_value;
  CHECK(g_tight >= g_loose - 1e-12);
}

TEST_CASE("joint solve on the default setup") {
  const Scenario s = test::default_scenario();
  const SolveReport rep = solve_joint(s);
  REQUIRE(rep.status == SolveStatus::optimal);
  CHECK(validate_allocation(rep.allocation, s, 1e-7).feasible);
  const double gap_tol = std::max(1e-6, 1e-3 * rep.energy.e_total_j);
  CHECK(rep.duality_gap_j <= gap_tol);
  CHECK(rep.duality_gap_j >= -gap_tol);

  // Independent grid reference within two percent.
  const OracleResult oracle = brute_force_min_energy(s);
  REQUIRE(oracle.feasible);
  CHECK(std::fabs(rep.energy.e_total_j - oracle.energy_j) <= 0.02 * oracle.energy_j);
}

TEST_CASE("joint solve gates on the supportable task size") {
  Scenario s = test::default_scenario();
  const double lmax = max_supportable_bits(s).l_max_bits;
  s.task_bits = lmax * 1.001;
  CHECK(solve_joint(s).status == SolveStatus::infeasible_task);
  s.task_bits = lmax * 0.999;
  const SolveReport rep = solve_joint(s);
  CHECK(rep.status == SolveStatus::optimal);
}

TEST_CASE("empty task yields the zero schedule") {
  Scenario s = test::default_scenario();
  s.task_bits = 0;
  const SolveReport rep = solve_joint(s);
  REQUIRE(rep.status == SolveStatus::optimal);
  CHECK(rep.energy.e_total_j == 0.0);
  CHECK(rep.allocation.bits_local == 0.0);
  CHECK(rep.allocation.tau1_s == 0.0);
}

TEST_SUITE_END();
