#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "advrisk/ground.hpp"
#include "advrisk/losses.hpp"
#include "advrisk/measures.hpp"

namespace advrisk {

enum class DualMethod { kFrankWolfe, kFrankWolfeAway, kAttackExtract, kBest };

// "fw", "fw_away", "attack_extract", "best".
std::string_view dual_method_name(DualMethod method);
DualMethod parse_dual_method(std::string_view name);

struct DualConfig {
  double tol = 1e-6;  // on the Frank-Wolfe gap and on objective stagnation, relative to mass
  int max_iters = 20000;
  std::uint64_t seed = 0;
  DualMethod method = DualMethod::kBest;
};

struct DualSolution {
  Coupling coupling0;
  Coupling coupling1;
  std::vector<double> m0;
  std::vector<double> m1;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  // Objective after every iterate; kBest lists the cold run, then the warm run.
  std::vector<double> trace;
};

// sum_x (m0 + m1)(x) C*(m1 / (m0 + m1))(x). Throws NegativeMass.
double dual_objective(const Loss& loss, std::span<const double> m0, std::span<const double> m1);

// Fills pushforwards and the objective of a pair of couplings.
DualSolution make_dual_solution(const Loss& loss, std::size_t n, Coupling c0, Coupling c1);

// Couplings read off an exponential score field: each source's mass goes to
// the maximizers of its class loss over the ball, either all to the lowest
// index maximizer, split by tempered weights, or split among near-ties so that
// m1 / (m0 + m1) matches sigma(2 f) at every target. Returns the candidate with
// the largest objective under loss.
DualSolution attack_extract(const Loss& loss, const GroundSet& g, const TwoClassMeasure& mu,
                            std::span<const double> f_exp);

// Maximizes the dual objective over couplings supported in the epsilon-ball.
// exp_scores, when given, is an exponential-loss primal solution used by the
// attack_extract and best methods; otherwise they solve for one.
DualSolution solve_dual(const Loss& loss, const GroundSet& g, const TwoClassMeasure& mu,
                        const DualConfig& config = {}, const Field* exp_scores = nullptr);

// Exhaustive search over couplings whose per-source weights are multiples of
// 1/grid_steps. Needs at most 4 sources per class, at most 4 neighbors per
// source and a bounded number of combinations; throws InstanceTooLarge
// otherwise. Test oracle only.
double brute_dual(const Loss& loss, const GroundSet& g, const TwoClassMeasure& mu, int grid_steps);

// Number of coupling combinations brute_dual would enumerate.
double brute_dual_combinations(const GroundSet& g, const TwoClassMeasure& mu, int grid_steps);

}  // namespace advrisk
