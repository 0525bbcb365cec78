#pragma once

#include <span>
#include <string_view>

#include "advrisk/ground.hpp"

namespace advrisk {

// Margin losses phi(alpha). kZeroOne only exposes C* and thresholding.
enum class LossKind { kExponential, kLogistic, kHinge, kZeroOne };

// CLI/file names: "exp", "logistic", "hinge", "zero-one".
std::string_view loss_name(LossKind kind);
LossKind parse_loss(std::string_view name);

struct Loss {
  LossKind kind = LossKind::kExponential;

  // phi(alpha) for extended-real alpha; phi(+inf) = 0.
  double phi(double alpha) const;
  // C_phi(eta, alpha) = eta phi(alpha) + (1 - eta) phi(-alpha), with 0 * inf = 0.
  double conditional_risk(double eta, double alpha) const;
  // C_phi*(eta) = inf_alpha C_phi(eta, alpha).
  double cstar(double eta) const;
  // Smallest minimizer of C_phi(eta, .), possibly +/-inf.
  double alpha_opt(double eta) const;
  // A supergradient of C* at eta in (0, 1) (left/right midpoint at kinks).
  double cstar_supergradient(double eta) const;

  // (a + b) C*(b / (a + b)), with 0 at a = b = 0.
  double perspective(double a, double b) const;
  // Partial derivatives of the perspective at (a, b) with a + b > 0.
  void perspective_gradient(double a, double b, double& d_a, double& d_b) const;
};

inline Loss make_loss(LossKind kind) { return Loss{kind}; }

// Golden-section and bisection based evaluators that only use phi. They back
// the closed forms and serve as independent checks on them.
namespace numeric {

inline constexpr double kAlphaBracket = 50.0;

double cstar(const Loss& loss, double eta);
double alpha_opt(const Loss& loss, double eta);

}  // namespace numeric

// Smallest h0 with eta h1 + (1 - eta) h0 >= C*(eta) for all eta:
// sup over eta in [0, 1) of (C*(eta) - eta h1) / (1 - eta). h1 = 0 gives +inf
// unless C* vanishes near 1 faster than linearly.
double cstar_transform(const Loss& loss, double h1);
Field transform_h(const Loss& loss, std::span<const double> h1);

// Derivative of 2 sqrt(eta (1 - eta)): sqrt((1-eta)/eta) - sqrt(eta/(1-eta)).
// Throws EtaAtBoundary outside (0, 1).
double supergrad_cstar_exp(double eta);

}  // namespace advrisk
