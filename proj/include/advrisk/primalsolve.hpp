#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "advrisk/ground.hpp"
#include "advrisk/losses.hpp"
#include "advrisk/measures.hpp"

namespace advrisk {

// A pair (h0, h1) of nonnegative extended-real fields.
struct HPair {
  Field h0;
  Field h1;
};

// Per-point class-1 probabilities in [0, 1].
using EtaField = std::vector<double>;

// Pointwise check of eta h1 + (1 - eta) h0 >= C*(eta) - tol on a 101-point eta
// grid; for the exponential loss the equivalent h0 h1 >= 1 - tol is used.
bool in_feasible_set(const Loss& loss, const HPair& hp, double tol = 1e-9);

// Adversarial surrogate risk: sum p1 S_eps(phi o f) + sum p0 S_eps(phi o -f).
// Throws ZeroOneHasNoPhi for the zero-one loss.
double risk_adv(const Loss& loss, std::span<const double> f, const GroundSet& g,
                const TwoClassMeasure& mu);

// sum p1 S_eps(h1) + sum p0 S_eps(h0). Throws InfeasiblePair outside the
// feasible set.
double theta(const Loss& loss, const HPair& hp, const GroundSet& g, const TwoClassMeasure& mu);

// (phi o -f, phi o f).
HPair pair_from_scores(const Loss& loss, std::span<const double> f);

struct PrimalConfig {
  double tol = 1e-12;     // relative Newton decrement per smoothing stage
  int max_iters = 4000;   // total Newton (or subgradient) iterations
  double step_c = 1.0;    // subgradient step scale c / sqrt(k)
  bool smoothing = true;  // false: plain subgradient descent on the hard max
  std::uint64_t seed = 0;
  double final_temperature = 1e-9;
};

struct PrimalSolution {
  Field f;
  double risk = 0.0;
  int iterations = 0;
  bool converged = false;
  // Temperature of the last smoothing stage; 0 for the subgradient method.
  double temperature = 0.0;
  // Hard-max risk after every iteration.
  std::vector<double> risk_trace;
};

// Minimizes the exponential adversarial risk over score fields. Points reached
// by the ball of only one class get f = +/-inf; points reached by neither get 0.
PrimalSolution solve_exp_primal(const GroundSet& g, const TwoClassMeasure& mu,
                                const PrimalConfig& config = {});

// sigma(2 f): the exponential-loss conditional probability of a score field.
EtaField eta_hat(std::span<const double> f_exp);

// Pointwise smallest minimizer alpha_phi(eta). Throws ZeroOneHasNoPhi.
Field construct_f(const Loss& loss, std::span<const double> eta);

// eta - 1/2, whose sign is the Bayes-style threshold decision.
Field threshold_classifier(std::span<const double> eta);

// Adversarial zero-one risk of the sign classifier [f > 0].
double classify_risk_adv(std::span<const double> f, const GroundSet& g,
                         const TwoClassMeasure& mu);

// Exhaustive search over candidate score values per point, for grounds of at
// most 3 points. Throws InstanceTooLarge otherwise. Test oracle only.
double brute_primal(const Loss& loss, const GroundSet& g, const TwoClassMeasure& mu,
                    std::span<const double> candidates);

// -inf, a uniform grid on [-limit, limit] with the given step, and +inf.
std::vector<double> default_primal_candidates(double limit = 4.0, double step = 0.02);

}  // namespace advrisk
