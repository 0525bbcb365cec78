#include "advrisk/losses.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "advrisk/error.hpp"
#include "advrisk/extended_real.hpp"

namespace advrisk {

namespace {

constexpr double kGolden = 0.6180339887498949;

void check_eta(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw Error(Errc::kEtaOutOfRange, "eta = " + std::to_string(eta));
  }
}

double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

// Maximizes a unimodal function on [lo, hi]; returns the argmax.
double golden_max(const std::function<double(double)>& fn, double lo, double hi,
                  int iterations = 200) {
  double a = lo, b = hi;
  double x1 = b - kGolden * (b - a);
  double x2 = a + kGolden * (b - a);
  double f1 = fn(x1), f2 = fn(x2);
  for (int it = 0; it < iterations && b - a > 0.0; ++it) {
    // Ties move toward the left end.
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = fn(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = fn(x2);
    }
    if (!(x1 > a && x1 < b) || !(x2 > a && x2 < b)) break;
  }
  return f1 >= f2 ? x1 : x2;
}

double logistic_phi(double alpha) {
  if (alpha == kInf) return 0.0;
  if (alpha == -kInf) return kInf;
  if (alpha > -30.0) return std::log1p(std::exp(-alpha));
  return -alpha + std::log1p(std::exp(alpha));
}

double sigmoid(double u) {
  if (u >= 0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

}  // namespace

std::string_view loss_name(LossKind kind) {
  switch (kind) {
    case LossKind::kExponential: return "exp";
    case LossKind::kLogistic: return "logistic";
    case LossKind::kHinge: return "hinge";
    case LossKind::kZeroOne: return "zero-one";
  }
  return "exp";
}

LossKind parse_loss(std::string_view name) {
  if (name == "exp" || name == "exponential") return LossKind::kExponential;
  if (name == "logistic") return LossKind::kLogistic;
  if (name == "hinge") return LossKind::kHinge;
  if (name == "zero-one" || name == "zero_one" || name == "zero_one_dual") {
    return LossKind::kZeroOne;
  }
  throw Error(Errc::kInvalidArgument, "unknown loss '" + std::string(name) + "'");
}

double Loss::phi(double alpha) const {
  switch (kind) {
    case LossKind::kExponential:
      if (alpha == kInf) return 0.0;
      return std::exp(-alpha);
    case LossKind::kLogistic:
      return logistic_phi(alpha);
    case LossKind::kHinge:
      if (alpha == -kInf) return kInf;
      return std::max(0.0, 1.0 - alpha);
    case LossKind::kZeroOne:
      throw Error(Errc::kZeroOneHasNoPhi, "the zero-one loss has no margin function");
  }
  return 0.0;
}

double Loss::conditional_risk(double eta, double alpha) const {
  check_eta(eta);
  if (kind == LossKind::kZeroOne) return alpha <= 0.0 ? eta : 1.0 - eta;
  return mass_times(eta, phi(alpha)) + mass_times(1.0 - eta, phi(-alpha));
}

double Loss::cstar(double eta) const {
  check_eta(eta);
  switch (kind) {
    case LossKind::kExponential: return 2.0 * std::sqrt(eta * (1.0 - eta));
    case LossKind::kLogistic: return -xlogx(eta) - xlogx(1.0 - eta);
    case LossKind::kHinge: return 2.0 * std::min(eta, 1.0 - eta);
    case LossKind::kZeroOne: return std::min(eta, 1.0 - eta);
  }
  return 0.0;
}

double Loss::alpha_opt(double eta) const {
  check_eta(eta);
  switch (kind) {
    case LossKind::kExponential:
      if (eta == 0.0) return -kInf;
      if (eta == 1.0) return kInf;
      return 0.5 * std::log(eta / (1.0 - eta));
    case LossKind::kLogistic:
      if (eta == 0.0) return -kInf;
      if (eta == 1.0) return kInf;
      return std::log(eta / (1.0 - eta));
    case LossKind::kHinge:
      if (eta == 0.0) return -kInf;
      return eta <= 0.5 ? -1.0 : 1.0;
    case LossKind::kZeroOne:
      throw Error(Errc::kZeroOneHasNoPhi, "alpha_opt is undefined for the zero-one loss");
  }
  return 0.0;
}

double Loss::cstar_supergradient(double eta) const {
  check_eta(eta);
  switch (kind) {
    case LossKind::kExponential:
      if (eta == 0.0) return kInf;
      if (eta == 1.0) return -kInf;
      return supergrad_cstar_exp(eta);
    case LossKind::kLogistic:
      if (eta == 0.0) return kInf;
      if (eta == 1.0) return -kInf;
      return std::log((1.0 - eta) / eta);
    case LossKind::kHinge:
      return eta < 0.5 ? 2.0 : (eta > 0.5 ? -2.0 : 0.0);
    case LossKind::kZeroOne:
      return eta < 0.5 ? 1.0 : (eta > 0.5 ? -1.0 : 0.0);
  }
  return 0.0;
}

double Loss::perspective(double a, double b) const {
  if (a < 0.0 || b < 0.0) throw Error(Errc::kNegativeMass, "perspective of negative mass");
  const double s = a + b;
  if (s == 0.0) return 0.0;
  switch (kind) {
    case LossKind::kExponential: return 2.0 * std::sqrt(a * b);
    case LossKind::kLogistic: return xlogx(s) - xlogx(a) - xlogx(b);
    case LossKind::kHinge: return 2.0 * std::min(a, b);
    case LossKind::kZeroOne: return std::min(a, b);
  }
  return 0.0;
}

void Loss::perspective_gradient(double a, double b, double& d_a, double& d_b) const {
  const double s = a + b;
  switch (kind) {
    case LossKind::kExponential:
      d_a = std::sqrt(b / a);
      d_b = std::sqrt(a / b);
      return;
    case LossKind::kLogistic:
      d_a = std::log(s / a);
      d_b = std::log(s / b);
      return;
    case LossKind::kHinge:
    case LossKind::kZeroOne: {
      const double scale = kind == LossKind::kHinge ? 2.0 : 1.0;
      d_a = a < b ? scale : (a > b ? 0.0 : 0.5 * scale);
      d_b = b < a ? scale : (b > a ? 0.0 : 0.5 * scale);
      return;
    }
  }
}

double supergrad_cstar_exp(double eta) {
  if (!(eta > 0.0 && eta < 1.0)) {
    throw Error(Errc::kEtaAtBoundary, "eta = " + std::to_string(eta));
  }
  return std::sqrt((1.0 - eta) / eta) - std::sqrt(eta / (1.0 - eta));
}

namespace numeric {

namespace {

struct Minimum {
  double alpha;
  double value;
};

Minimum golden_min_alpha(const Loss& loss, double eta) {
  auto neg = [&](double a) { return -loss.conditional_risk(eta, a); };
  const double a = golden_max(neg, -kAlphaBracket, kAlphaBracket);
  return {a, loss.conditional_risk(eta, a)};
}

}  // namespace

double cstar(const Loss& loss, double eta) {
  check_eta(eta);
  if (loss.kind == LossKind::kZeroOne) return std::min(eta, 1.0 - eta);
  const Minimum m = golden_min_alpha(loss, eta);
  return std::min({m.value, loss.conditional_risk(eta, kInf), loss.conditional_risk(eta, -kInf)});
}

double alpha_opt(const Loss& loss, double eta) {
  check_eta(eta);
  if (loss.kind == LossKind::kZeroOne) {
    throw Error(Errc::kZeroOneHasNoPhi, "alpha_opt is undefined for the zero-one loss");
  }
  const Minimum m = golden_min_alpha(loss, eta);
  const double at_neg_inf = loss.conditional_risk(eta, -kInf);
  const double at_pos_inf = loss.conditional_risk(eta, kInf);
  // Minimum only approached at an infinite score.
  if (at_neg_inf < m.value) return -kInf;
  if (at_pos_inf < m.value) return kInf;

  // C(eta, .) is convex, so its near-minimal sublevel set is an interval;
  // bisect for its left end.
  const double slack = 1e-12 * std::max(1.0, m.value);
  double lo = -kAlphaBracket, hi = m.alpha;
  if (loss.conditional_risk(eta, lo) <= m.value + slack) {
    const double h = 1e-6;
    const double slope =
        std::abs(loss.conditional_risk(eta, lo + h) - loss.conditional_risk(eta, lo)) / h;
    if (slope < 1e-12) return -kInf;
    return lo;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (loss.conditional_risk(eta, mid) <= m.value + slack) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace numeric

double cstar_transform(const Loss& loss, double h1) {
  if (std::isnan(h1) || h1 < 0.0) throw Error(Errc::kNegativeH, "h1 = " + std::to_string(h1));
  if (h1 == kInf) return 0.0;
  if (h1 == 0.0) {
    // The chord slope C*(eta) / (1 - eta) grows toward eta = 1 for concave C*.
    switch (loss.kind) {
      case LossKind::kExponential:
      case LossKind::kLogistic: return kInf;
      case LossKind::kHinge: return 2.0;
      case LossKind::kZeroOne: return 1.0;
    }
  }
  auto value_at = [&](double eta) { return (loss.cstar(eta) - eta * h1) / (1.0 - eta); };
  // Restrict to [0, k] where the objective is still positive; beyond k it
  // stays below the value 0 attained at eta = 0.
  double k = 1.0 - 0x1p-52;
  for (int m = 1; m <= 52; ++m) {
    const double eta = 1.0 - std::ldexp(1.0, -m);
    if (value_at(eta) <= 0.0) {
      k = eta;
      break;
    }
  }
  // Search in logit coordinates for uniform resolution near both ends.
  const double u_hi = std::log(k / (1.0 - k));
  auto in_logit = [&](double u) { return value_at(sigmoid(u)); };
  const double u_best = golden_max(in_logit, -745.0, u_hi, 400);
  return std::max(0.0, in_logit(u_best));
}

Field transform_h(const Loss& loss, std::span<const double> h1) {
  Field out(h1.size());
  for (std::size_t i = 0; i < h1.size(); ++i) out[i] = cstar_transform(loss, h1[i]);
  return out;
}

}  // namespace advrisk
