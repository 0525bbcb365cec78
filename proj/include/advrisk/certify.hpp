#pragma once

#include <span>
#include <string>
#include <vector>

#include "advrisk/dualsolve.hpp"
#include "advrisk/ground.hpp"
#include "advrisk/losses.hpp"
#include "advrisk/measures.hpp"
#include "advrisk/primalsolve.hpp"

namespace advrisk {

struct Certificate {
  std::string loss;
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
  double slack_sup_r1 = 0.0;
  double slack_sup_r0 = 0.0;
  double slack_pointwise = 0.0;
  double support_violation = 0.0;
  bool winf_ok0 = false;
  bool winf_ok1 = false;
  // Zero-one certificates are reported but never gate success.
  bool diagnostic_only = false;

  bool operator==(const Certificate&) const = default;
};

struct Residuals {
  double r1 = 0.0;
  double r0 = 0.0;
  double r_pt = 0.0;

  double sum() const { return r1 + r0 + r_pt; }
};

// Throws InfeasibleDual unless both couplings have the class measures as
// source marginals, stay inside the epsilon-ball, and push forward to the
// stored m0, m1 (all within 1e-9 * max(1, total mass)).
void check_dual_feasible(const DualSolution& dual, const GroundSet& g, const TwoClassMeasure& mu);

// Primal risk of f, dual objective of (m0, m1) under loss and their gap, plus
// W-infinity feasibility flags. For the zero-one loss f is a threshold score
// and the primal is the adversarial classification risk.
Certificate duality_gap(const Loss& loss, std::span<const double> f, const DualSolution& dual,
                        const GroundSet& g, const TwoClassMeasure& mu);

// Complementary slackness residuals of (f, dual). r1 + r0 + r_pt equals the
// duality gap. For the zero-one loss the indicator pair (1{f <= 0}, 1{f > 0})
// plays the role of (phi o f, phi o -f).
Residuals slackness(const Loss& loss, std::span<const double> f, const DualSolution& dual,
                    const GroundSet& g, const TwoClassMeasure& mu);

// Coupling mass w1(i, j) with |I_eps(eta)(i) - eta(j)| > 1e-6 plus mass
// w0(i, j) with |S_eps(eta)(i) - eta(j)| > 1e-6.
double support_conditions(std::span<const double> eta, const DualSolution& dual,
                          const GroundSet& g);

// duality_gap, slackness and support_conditions in one certificate.
Certificate certify(const Loss& loss, std::span<const double> f, std::span<const double> eta,
                    const DualSolution& dual, const GroundSet& g, const TwoClassMeasure& mu);

// Score field certified for loss: alpha(eta) or, for zero-one, eta - 1/2.
Field universal_field(const Loss& loss, std::span<const double> eta);

// One certificate per loss, all against the same dual masses.
std::vector<Certificate> universality_check(std::span<const double> eta, const DualSolution& dual_exp,
                                            std::span<const LossKind> losses, const GroundSet& g,
                                            const TwoClassMeasure& mu);

// Gap and residual tolerance defaults: 1e-4 for exp, 1e-3 otherwise.
double default_tolerance(LossKind kind);

// gap and all three residuals within tol * total mass, both W-infinity flags set.
bool certified(const Certificate& c, double tol, double total_mass);

}  // namespace advrisk
