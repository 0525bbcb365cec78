#include "doctest.h"

#include <random>

#include "advrisk/error.hpp"
#include "advrisk/extended_real.hpp"
#include "advrisk/measures.hpp"
#include "support.hpp"

using namespace advrisk;
using testing::line_points;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::kInvalidArgument;
}

double total(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

TEST_CASE("measure validation") {
  CHECK_NOTHROW(validate_measure({{1.0, 0.0}, {0.0, 2.0}}, 2));
  CHECK(code_of([] { validate_measure({{1.0, -0.5}, {0.0, 2.0}}, 2); }) == Errc::kNegativeMass);
  CHECK(code_of([] { validate_measure({{1.0, NAN}, {0.0, 2.0}}, 2); }) == Errc::kNegativeMass);
  CHECK(code_of([] { validate_measure({{1.0}, {0.0, 2.0}}, 2); }) == Errc::kValidationError);
  const TwoClassMeasure mu{{0.25, 0.5}, {1.0, 0.0}};
  CHECK(mu.total0() == 0.75);
  CHECK(mu.total() == 1.75);
}

TEST_CASE("pushforward examples") {
  const std::vector<double> p{0.5, 0.0, 1.5};
  CHECK(pushforward(identity_coupling(p), 3) == p);
  const Coupling split = normalize_coupling({{0, 0, 0.5}, {0, 1, 0.5}});
  CHECK(pushforward(split, 2) == std::vector<double>{0.5, 0.5});
  CHECK(source_marginal(split, 2) == std::vector<double>{1.0, 0.0});
}

TEST_CASE("normalize_coupling sorts, merges and drops zeros") {
  const Coupling c = normalize_coupling({{2, 1, 0.25}, {0, 1, 0.5}, {2, 1, 0.25}, {1, 1, 0.0}});
  REQUIRE(c.entries.size() == 2);
  CHECK(c.entries[0] == Transport{0, 1, 0.5});
  CHECK(c.entries[1] == Transport{2, 1, 0.5});
}

TEST_CASE("pushforward conserves mass on random couplings") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<std::uint32_t> idx(0, 29);
  std::vector<Transport> entries;
  for (int k = 0; k < 200; ++k) entries.push_back({idx(rng), idx(rng), u(rng)});
  const Coupling c = normalize_coupling(entries);
  CHECK(total(pushforward(c, 30)) == doctest::Approx(total(source_marginal(c, 30))).epsilon(1e-12));
}

TEST_CASE("winf_feasible on a single edge") {
  const GroundSet g = build_ground(line_points({0.0, 1.0}), Norm::kL2, 0.0);
  const std::vector<double> p{1.0, 0.0}, q{0.0, 1.0};
  CHECK(winf_feasible(g, p, q, 1.0));
  CHECK_FALSE(winf_feasible(g, p, q, 0.9));
  CHECK(winf_distance(g, p, q) == 1.0);
  CHECK(winf_distance(g, p, p) == 0.0);
  for (double eps : {0.0, 0.3, 2.0}) CHECK(winf_feasible(g, q, q, eps));
}

TEST_CASE("winf on the shifted two-atom example") {
  const GroundSet g = build_ground(line_points({0.0, 0.4, 1.0, 1.4}), Norm::kL2, 0.0);
  const std::vector<double> p{0.5, 0.0, 0.5, 0.0}, q{0.0, 0.5, 0.0, 0.5};
  CHECK(winf_feasible(g, p, q, 0.4));
  CHECK_FALSE(winf_feasible(g, p, q, 0.39));
  CHECK(winf_distance(g, p, q) == 0.4);
  CHECK(testing::hall_distance(g, p, q) == 0.4);
}

TEST_CASE("winf rejects unequal totals") {
  const GroundSet g = build_ground(line_points({0.0, 1.0}), Norm::kL2, 0.0);
  CHECK(code_of([&] { (void)winf_feasible(g, std::vector<double>{1.0, 0.0}, std::vector<double>{0.0, 0.5}, 1.0); }) ==
        Errc::kMassMismatch);
  CHECK(code_of([&] { (void)winf_distance(g, std::vector<double>{1.0, 0.0}, std::vector<double>{0.0, 0.5}); }) ==
        Errc::kMassMismatch);
}

TEST_CASE("flow-based W-infinity matches the Hall subset oracle") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> units(0, 3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + trial % 5;
    const auto pts = testing::random_points(rng, n, 1 + trial % 2);
    const GroundSet g = build_ground(pts, static_cast<Norm>(trial % 3), 0.0);
    std::vector<double> p(n), q(n);
    for (auto& v : p) v = units(rng);
    if (total(p) == 0.0) p[0] = 1.0;
    // q: the same integer total spread at random.
    std::uniform_int_distribution<std::size_t> where(0, n - 1);
    for (int k = 0; k < static_cast<int>(total(p)); ++k) q[where(rng)] += 1.0;
    CHECK(winf_distance(g, p, q) == testing::hall_distance(g, p, q));
  }
}

TEST_CASE("flow-based W-infinity matches the permutation oracle on unit atoms") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t k = 1 + trial % 3;
    const auto pts = testing::random_points(rng, 2 * k, 2);
    const GroundSet g = build_ground(pts, Norm::kL2, 0.0);
    std::vector<double> p(2 * k, 0.0), q(2 * k, 0.0);
    std::vector<std::size_t> src, dst;
    for (std::size_t i = 0; i < k; ++i) {
      p[i] = 1.0;
      q[k + i] = 1.0;
      src.push_back(i);
      dst.push_back(k + i);
    }
    CHECK(winf_distance(g, p, q) == testing::permutation_bottleneck(g, src, dst));
  }
}

TEST_CASE("winf_feasible is monotone in epsilon") {
  std::mt19937_64 rng(9);
  const auto pts = testing::random_points(rng, 6, 2);
  const GroundSet g = build_ground(pts, Norm::kL2, 0.0);
  const std::vector<double> p{1, 0, 2, 0, 1, 0}, q{0, 1, 0, 2, 0, 1};
  bool seen = false;
  for (int k = 0; k <= 150; ++k) {
    const bool ok = winf_feasible(g, p, q, k / 100.0);
    CHECK((ok || !seen));
    seen = seen || ok;
  }
}

TEST_CASE("greedy attack examples") {
  const GroundSet g = build_ground(line_points({0.0, 0.5, 1.0}), Norm::kL2, 0.6);
  const Coupling c = greedy_attack(g, Field{0.0, 1.0, 2.0}, std::vector<double>{1.0, 0.0, 0.0});
  REQUIRE(c.entries.size() == 1);
  CHECK(c.entries[0] == Transport{0, 1, 1.0});
  const GroundSet g0 = g.with_epsilon(0.0);
  const std::vector<double> p{0.2, 0.3, 0.5};
  CHECK(greedy_attack(g0, Field{5.0, 1.0, 2.0}, p) == identity_coupling(p));
  // Ties go to the lowest index.
  const Coupling tie = greedy_attack(g, Field{1.0, 1.0, 1.0}, std::vector<double>{0.0, 0.0, 1.0});
  CHECK(tie.entries[0] == Transport{2, 1, 1.0});
}

TEST_CASE("greedy attack attains the ball supremum integral") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto pts = testing::random_points(rng, 30, 2);
    const GroundSet g = build_ground(pts, Norm::kL2, 0.2);
    const Field f = testing::random_field(rng, g.size());
    const auto mu = testing::random_measure(rng, g.size());
    const Field s = sup_ball(g, f);
    double expected = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) expected += mu.mass0[i] * s[i];
    const Coupling c = greedy_attack(g, f, mu.mass0);
    CHECK(supported_in_ball(c, g));
    CHECK(transported_integral(c, f) == expected);
    CHECK(winf_feasible(g, mu.mass0, pushforward(c, g.size()), g.epsilon()));
  }
}

TEST_CASE("no coupling in the ball beats the greedy attack") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto pts = testing::random_points(rng, 12, 1);
  const GroundSet g = build_ground(pts, Norm::kL2, 0.3);
  const Field f = testing::random_field(rng, g.size());
  const std::vector<double> p(g.size(), 1.0);
  const double best = transported_integral(greedy_attack(g, f, p), f);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Transport> entries;
    for (std::uint32_t i = 0; i < g.size(); ++i) {
      const auto row = g.neighbors(i);
      std::vector<double> w(row.size());
      double s = 0.0;
      for (double& x : w) s += (x = u(rng));
      for (std::size_t k = 0; k < row.size(); ++k) entries.push_back({i, row[k], w[k] / s});
    }
    CHECK(transported_integral(normalize_coupling(entries), f) <= best + 1e-12);
  }
}

TEST_CASE("transported integral uses 0 * inf = 0") {
  const Coupling c = normalize_coupling({{0, 1, 0.5}});
  CHECK(transported_integral(c, Field{kInf, 2.0}) == 1.0);
}

TEST_CASE("soft attack weights") {
  const GroundSet g = build_ground(line_points({0.0, 0.5, 1.0}), Norm::kL2, 0.6);
  const std::vector<double> p{0.0, 1.0, 0.0};
  const Coupling even = soft_attack(g, Field{1.0, 1.0, 1.0}, p, 0.1);
  REQUIRE(even.entries.size() == 3);
  for (const Transport& t : even.entries) CHECK(t.mass == doctest::Approx(1.0 / 3.0));
  const Coupling sharp = soft_attack(g, Field{0.0, 0.0, 1.0}, p, 1e-9);
  CHECK(pushforward(sharp, 3)[2] == doctest::Approx(1.0));
  const Coupling inf = soft_attack(g, Field{kInf, 0.0, kInf}, p, 1.0);
  CHECK(pushforward(inf, 3) == std::vector<double>{0.5, 0.0, 0.5});
}
