#include "advrisk/certify.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "advrisk/error.hpp"
#include "advrisk/extended_real.hpp"

namespace advrisk {

namespace {

HPair loss_pair(const Loss& loss, std::span<const double> f) {
  if (loss.kind != LossKind::kZeroOne) return pair_from_scores(loss, f);
  HPair hp;
  hp.h0.resize(f.size());
  hp.h1.resize(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    hp.h1[i] = f[i] > 0.0 ? 0.0 : 1.0;
    hp.h0[i] = f[i] > 0.0 ? 1.0 : 0.0;
  }
  return hp;
}

double weighted_sum(std::span<const double> weights, std::span<const double> values) {
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) acc += mass_times(weights[i], values[i]);
  return acc;
}

bool close_vectors(std::span<const double> a, std::span<const double> b, double tol) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(std::abs(a[i] - b[i]) <= tol)) return false;
  }
  return true;
}

}  // namespace

void check_dual_feasible(const DualSolution& dual, const GroundSet& g, const TwoClassMeasure& mu) {
  const std::size_t n = g.size();
  const double tol = 1e-9 * std::max(1.0, mu.total());
  const Coupling* couplings[2] = {&dual.coupling0, &dual.coupling1};
  const std::vector<double>* sources[2] = {&mu.mass0, &mu.mass1};
  const std::vector<double>* targets[2] = {&dual.m0, &dual.m1};
  for (int cls = 0; cls < 2; ++cls) {
    const std::string label = "class " + std::to_string(cls) + " coupling ";
    for (const Transport& t : couplings[cls]->entries) {
      if (t.source >= n || t.target >= n) throw Error(Errc::kInfeasibleDual, label + "index out of range");
      if (!(t.mass >= 0.0) || std::isinf(t.mass)) throw Error(Errc::kInfeasibleDual, label + "has a bad mass");
    }
    if (!supported_in_ball(*couplings[cls], g)) {
      throw Error(Errc::kInfeasibleDual, label + "leaves the epsilon-ball");
    }
    if (!close_vectors(source_marginal(*couplings[cls], n), *sources[cls], tol)) {
      throw Error(Errc::kInfeasibleDual, label + "source marginal differs from the class measure");
    }
    if (!close_vectors(pushforward(*couplings[cls], n), *targets[cls], tol)) {
      throw Error(Errc::kInfeasibleDual, label + "pushforward differs from the stored masses");
    }
  }
}

Certificate duality_gap(const Loss& loss, std::span<const double> f, const DualSolution& dual,
                        const GroundSet& g, const TwoClassMeasure& mu) {
  check_dual_feasible(dual, g, mu);
  Certificate c;
  c.loss = std::string(loss_name(loss.kind));
  c.diagnostic_only = loss.kind == LossKind::kZeroOne;
  c.primal = loss.kind == LossKind::kZeroOne ? classify_risk_adv(f, g, mu) : risk_adv(loss, f, g, mu);
  c.dual = dual_objective(loss, dual.m0, dual.m1);
  c.gap = ext_diff(c.primal, c.dual);
  c.winf_ok0 = winf_feasible(g, mu.mass0, dual.m0, g.epsilon());
  c.winf_ok1 = winf_feasible(g, mu.mass1, dual.m1, g.epsilon());
  return c;
}

Residuals slackness(const Loss& loss, std::span<const double> f, const DualSolution& dual,
                    const GroundSet& g, const TwoClassMeasure& mu) {
  check_dual_feasible(dual, g, mu);
  const HPair hp = loss_pair(loss, f);
  Residuals r;
  r.r1 = ext_diff(weighted_sum(mu.mass1, sup_ball(g, hp.h1)), weighted_sum(dual.m1, hp.h1));
  r.r0 = ext_diff(weighted_sum(mu.mass0, sup_ball(g, hp.h0)), weighted_sum(dual.m0, hp.h0));
  double transported = 0.0;
  for (std::size_t x = 0; x < g.size(); ++x) {
    transported += mass_times(dual.m1[x], hp.h1[x]) + mass_times(dual.m0[x], hp.h0[x]);
  }
  r.r_pt = ext_diff(transported, dual_objective(loss, dual.m0, dual.m1));
  return r;
}

double support_conditions(std::span<const double> eta, const DualSolution& dual,
                          const GroundSet& g) {
  constexpr double kMatch = 1e-6;
  const Field lower = inf_ball(g, eta);
  const Field upper = sup_ball(g, eta);
  double violation = 0.0;
  for (const Transport& t : dual.coupling1.entries) {
    if (std::abs(lower[t.source] - eta[t.target]) > kMatch) violation += t.mass;
  }
  for (const Transport& t : dual.coupling0.entries) {
    if (std::abs(upper[t.source] - eta[t.target]) > kMatch) violation += t.mass;
  }
  return violation;
}

Certificate certify(const Loss& loss, std::span<const double> f, std::span<const double> eta,
                    const DualSolution& dual, const GroundSet& g, const TwoClassMeasure& mu) {
  Certificate c = duality_gap(loss, f, dual, g, mu);
  const Residuals r = slackness(loss, f, dual, g, mu);
  c.slack_sup_r1 = r.r1;
  c.slack_sup_r0 = r.r0;
  c.slack_pointwise = r.r_pt;
  c.support_violation = support_conditions(eta, dual, g);
  return c;
}

Field universal_field(const Loss& loss, std::span<const double> eta) {
  return loss.kind == LossKind::kZeroOne ? threshold_classifier(eta) : construct_f(loss, eta);
}

std::vector<Certificate> universality_check(std::span<const double> eta, const DualSolution& dual_exp,
                                            std::span<const LossKind> losses, const GroundSet& g,
                                            const TwoClassMeasure& mu) {
  std::vector<Certificate> out;
  for (LossKind kind : losses) {
    const Loss loss{kind};
    out.push_back(certify(loss, universal_field(loss, eta), eta, dual_exp, g, mu));
  }
  return out;
}

double default_tolerance(LossKind kind) {
  return kind == LossKind::kExponential ? 1e-4 : 1e-3;
}

bool certified(const Certificate& c, double tol, double total_mass) {
  const double bound = tol * total_mass;
  return c.gap <= bound && c.slack_sup_r1 <= bound && c.slack_sup_r0 <= bound &&
         c.slack_pointwise <= bound && c.winf_ok0 && c.winf_ok1;
}

}  // namespace advrisk
