#include "doctest.h"

#include <cmath>
#include <random>

#include "advrisk/dualsolve.hpp"
#include "advrisk/error.hpp"
#include "advrisk/extended_real.hpp"
#include "advrisk/primalsolve.hpp"
#include "oracle_instances.hpp"
#include "support.hpp"

using namespace advrisk;
using doctest::Approx;
using testing::line_points;

namespace {

const Loss kExp{LossKind::kExponential};
const Loss kLogistic{LossKind::kLogistic};
const Loss kHinge{LossKind::kHinge};
const Loss kZeroOne{LossKind::kZeroOne};

GroundSet twopoint_ground(double eps = 0.6) {
  return build_ground(line_points({0.0, 0.5, 1.0}), Norm::kL2, eps);
}

TwoClassMeasure twopoint_measure() { return {{0.5, 0.0, 0.0}, {0.0, 0.0, 0.5}}; }

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::kInvalidArgument;
}

void check_solution_invariants(const Loss& loss, const DualSolution& d, const GroundSet& g,
                               const TwoClassMeasure& mu) {
  CHECK(d.m0 == pushforward(d.coupling0, g.size()));
  CHECK(d.m1 == pushforward(d.coupling1, g.size()));
  CHECK(std::abs(d.objective - dual_objective(loss, d.m0, d.m1)) <= 1e-12);
  CHECK(supported_in_ball(d.coupling0, g));
  CHECK(supported_in_ball(d.coupling1, g));
  const auto s0 = source_marginal(d.coupling0, g.size());
  const auto s1 = source_marginal(d.coupling1, g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(s0[i] == Approx(mu.mass0[i]).epsilon(1e-12).scale(1.0));
    CHECK(s1[i] == Approx(mu.mass1[i]).epsilon(1e-12).scale(1.0));
  }
  CHECK(winf_feasible(g, mu.mass0, d.m0, g.epsilon()));
  CHECK(winf_feasible(g, mu.mass1, d.m1, g.epsilon()));
}

}  // namespace

TEST_CASE("dual objective examples") {
  CHECK(dual_objective(kExp, std::vector<double>{0.5}, std::vector<double>{0.5}) == 1.0);
  CHECK(dual_objective(kZeroOne, std::vector<double>{0.3}, std::vector<double>{0.5}) == 0.3);
  for (const Loss& loss : {kExp, kLogistic, kHinge, kZeroOne}) {
    CHECK(dual_objective(loss, std::vector<double>{1.0, 0.0, 2.0}, std::vector<double>{0.0, 3.0, 0.0}) == 0.0);
  }
  CHECK(code_of([] { (void)dual_objective(kExp, std::vector<double>{-0.1}, std::vector<double>{0.5}); }) ==
        Errc::kNegativeMass);
}

TEST_CASE("dual objective is jointly concave") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (const Loss& loss : {kExp, kLogistic, kHinge, kZeroOne}) {
    for (int t = 0; t < 100; ++t) {
      std::vector<double> a0(8), a1(8), b0(8), b1(8), c0(8), c1(8);
      for (std::size_t i = 0; i < 8; ++i) {
        a0[i] = u(rng), a1[i] = u(rng), b0[i] = u(rng), b1[i] = u(rng);
        c0[i] = 0.5 * (a0[i] + b0[i]);
        c1[i] = 0.5 * (a1[i] + b1[i]);
      }
      CHECK(dual_objective(loss, c0, c1) >=
            0.5 * (dual_objective(loss, a0, a1) + dual_objective(loss, b0, b1)) - 1e-12);
    }
  }
}

TEST_CASE("solve_dual on the two-point instance") {
  const GroundSet g = twopoint_ground();
  const TwoClassMeasure mu = twopoint_measure();
  for (DualMethod method : {DualMethod::kFrankWolfe, DualMethod::kFrankWolfeAway,
                            DualMethod::kAttackExtract, DualMethod::kBest}) {
    DualConfig cfg;
    cfg.method = method;
    const DualSolution d = solve_dual(kExp, g, mu, cfg);
    CHECK(d.objective == Approx(1.0).epsilon(1e-6));
    check_solution_invariants(kExp, d, g, mu);
  }
  const DualSolution z = solve_dual(kZeroOne, g, mu);
  CHECK(z.objective == Approx(0.5).epsilon(1e-9));
  const DualSolution best = solve_dual(kExp, g, mu);
  CHECK(best.m0 == std::vector<double>{0.0, 0.5, 0.0});
  CHECK(best.m1 == std::vector<double>{0.0, 0.5, 0.0});
}

TEST_CASE("radius zero keeps the identity couplings") {
  std::mt19937_64 rng(3);
  const auto pts = testing::random_points(rng, 10, 2);
  const GroundSet g = build_ground(pts, Norm::kL2, 0.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  TwoClassMeasure mu{std::vector<double>(10), std::vector<double>(10)};
  for (std::size_t i = 0; i < 10; ++i) mu.mass0[i] = u(rng), mu.mass1[i] = u(rng);
  for (const Loss& loss : {kExp, kLogistic, kHinge, kZeroOne}) {
    const DualSolution d = solve_dual(loss, g, mu);
    CHECK(d.objective == Approx(dual_objective(loss, mu.mass0, mu.mass1)).epsilon(1e-14));
  }
  const GroundSet small = build_ground(line_points({0.0, 1.0, 2.0, 3.0}), Norm::kL2, 0.0);
  const TwoClassMeasure few{{0.25, 0.5, 0.0, 0.75}, {0.5, 0.25, 1.0, 0.0}};
  for (const Loss& loss : {kExp, kLogistic, kHinge, kZeroOne}) {
    CHECK(brute_dual(loss, small, few, 7) == Approx(dual_objective(loss, few.mass0, few.mass1)).epsilon(1e-14));
  }
}

TEST_CASE("single-class instance has zero dual value") {
  const GroundSet g = twopoint_ground();
  const TwoClassMeasure mu{{0.0, 0.0, 0.0}, {0.2, 0.3, 0.5}};
  CHECK(solve_dual(kExp, g, mu).objective == 0.0);
}

TEST_CASE("brute_dual on the two-point instance") {
  const GroundSet g = twopoint_ground();
  const TwoClassMeasure mu = twopoint_measure();
  CHECK(brute_dual(kExp, g, mu, 100) == Approx(1.0).epsilon(1e-3));
  CHECK(brute_dual(kZeroOne, g, mu, 100) == Approx(0.5).epsilon(1e-12));
  CHECK(brute_dual(kHinge, g, mu, 100) == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("brute_dual refuses large instances") {
  const GroundSet wide = build_ground(line_points({0, 1, 2, 3, 4}), Norm::kL2, 10.0);
  const TwoClassMeasure mu{{1, 0, 0, 0, 0}, {0, 0, 0, 0, 1}};
  CHECK(code_of([&] { (void)brute_dual(kExp, wide, mu, 10); }) == Errc::kInstanceTooLarge);
  const GroundSet g = build_ground(line_points({0, 1, 2, 3, 4, 5}), Norm::kL2, 0.0);
  const TwoClassMeasure many{{1, 1, 1, 1, 1, 0}, {0, 0, 0, 0, 0, 1}};
  CHECK(code_of([&] { (void)brute_dual(kExp, g, many, 10); }) == Errc::kInstanceTooLarge);
  const GroundSet chain = build_ground(line_points({0, 1, 2, 3, 4, 5, 6, 7}), Norm::kL2, 1.0);
  const TwoClassMeasure dense{{1, 0, 1, 0, 1, 0, 1, 0}, {0, 1, 0, 1, 0, 1, 0, 1}};
  CHECK(code_of([&] { (void)brute_dual(kExp, chain, dense, 200); }) == Errc::kInstanceTooLarge);
}

TEST_CASE("solve_dual reaches the brute-force value on oracle-sized instances") {
  for (const auto& inst : testing::oracle_instances(21, 12, 2e6)) {
    for (const Loss& loss : {kExp, kLogistic, kHinge, kZeroOne}) {
      const double brute = brute_dual(loss, inst.ground, inst.measure, inst.grid_steps);
      const DualSolution d = solve_dual(loss, inst.ground, inst.measure);
      CHECK(d.objective >= brute - 2e-3);
      check_solution_invariants(loss, d, inst.ground, inst.measure);
    }
  }
}

TEST_CASE("weak duality against random score fields") {
  std::mt19937_64 rng(5);
  const auto pts = testing::random_points(rng, 20, 2);
  const GroundSet g = build_ground(pts, Norm::kL2, 0.25);
  const auto mu = testing::random_measure(rng, g.size());
  for (const Loss& loss : {kExp, kLogistic, kHinge}) {
    const DualSolution d = solve_dual(loss, g, mu);
    for (int t = 0; t < 100; ++t) {
      const Field f = testing::random_field(rng, g.size());
      CHECK(d.objective <= risk_adv(loss, f, g, mu) + 1e-9);
    }
  }
}

TEST_CASE("warm start from the primal optimum closes the gap") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 10; ++t) {
    const auto pts = testing::random_points(rng, 15, 1);
    const GroundSet g = build_ground(pts, Norm::kL2, 0.12);
    const auto mu = testing::random_measure(rng, g.size());
    const PrimalSolution p = solve_exp_primal(g, mu);
    const DualSolution extracted = attack_extract(kExp, g, mu, p.f);
    check_solution_invariants(kExp, extracted, g, mu);
    CHECK(extracted.objective <= p.risk + 1e-9);
    CHECK(extracted.objective >= p.risk - 1e-6 * mu.total());
    const DualSolution d = solve_dual(kExp, g, mu, DualConfig{}, &p.f);
    check_solution_invariants(kExp, d, g, mu);
    CHECK(d.objective >= extracted.objective);
    CHECK(d.objective <= p.risk + 1e-9);
    CHECK(d.objective >= p.risk - 1e-3 * mu.total());
  }
}

TEST_CASE("plain and away-step Frank-Wolfe are deterministic") {
  std::mt19937_64 rng(9);
  const auto pts = testing::random_points(rng, 12, 2);
  const GroundSet g = build_ground(pts, Norm::kL2, 0.3);
  const auto mu = testing::random_measure(rng, g.size());
  for (DualMethod method : {DualMethod::kFrankWolfe, DualMethod::kFrankWolfeAway}) {
    DualConfig cfg;
    cfg.method = method;
    cfg.max_iters = 2000;
    const DualSolution a = solve_dual(kExp, g, mu, cfg);
    const DualSolution b = solve_dual(kExp, g, mu, cfg);
    CHECK(a.coupling0 == b.coupling0);
    CHECK(a.coupling1 == b.coupling1);
    CHECK(a.objective == b.objective);
    CHECK(a.trace.front() <= a.objective);
  }
}

TEST_CASE("dual method names round-trip") {
  for (DualMethod m : {DualMethod::kFrankWolfe, DualMethod::kFrankWolfeAway,
                       DualMethod::kAttackExtract, DualMethod::kBest}) {
    CHECK(parse_dual_method(dual_method_name(m)) == m);
  }
  CHECK_THROWS_AS(parse_dual_method("simplex"), Error);
}
