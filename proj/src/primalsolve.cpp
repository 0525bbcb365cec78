#include "advrisk/primalsolve.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <limits>

#include "advrisk/error.hpp"
#include "advrisk/extended_real.hpp"

namespace advrisk {

namespace {

constexpr double kScoreClamp = 50.0;
constexpr std::size_t kDenseLimit = 800;

enum class PointRole { kFree, kPlusInf, kMinusInf, kUnreached };

// One smoothed max term p * exp(tau * log sum exp(sign * f_j / tau)) per source.
struct Term {
  double mass;
  double sign;  // +1 for class 0 (max of f), -1 for class 1 (max of -f)
  std::vector<std::uint32_t> points;
};

class ExpPrimalProblem {
 public:
  ExpPrimalProblem(const GroundSet& g, const TwoClassMeasure& mu) : g_(g), mu_(mu) {
    const std::size_t n = g.size();
    std::vector<char> reach0(n, 0), reach1(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::uint32_t j : g.neighbors(i)) {
        if (mu.mass0[i] > 0.0) reach0[j] = 1;
        if (mu.mass1[i] > 0.0) reach1[j] = 1;
      }
    }
    roles_.resize(n);
    var_of_.assign(n, -1);
    for (std::size_t j = 0; j < n; ++j) {
      if (reach0[j] && reach1[j]) {
        roles_[j] = PointRole::kFree;
        var_of_[j] = static_cast<int>(vars_.size());
        vars_.push_back(static_cast<std::uint32_t>(j));
      } else if (reach1[j]) {
        roles_[j] = PointRole::kPlusInf;
      } else if (reach0[j]) {
        roles_[j] = PointRole::kMinusInf;
      } else {
        roles_[j] = PointRole::kUnreached;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (int cls = 0; cls < 2; ++cls) {
        const double mass = cls == 0 ? mu.mass0[i] : mu.mass1[i];
        if (!(mass > 0.0)) continue;
        Term t{mass, cls == 0 ? 1.0 : -1.0, {}};
        for (std::uint32_t j : g.neighbors(i)) {
          if (roles_[j] == PointRole::kFree) t.points.push_back(j);
        }
        // Balls without free points only see values whose loss is zero.
        if (!t.points.empty()) terms_.push_back(std::move(t));
      }
    }
  }

  std::size_t num_vars() const { return vars_.size(); }

  Field expand(const Eigen::VectorXd& x) const {
    Field f(g_.size(), 0.0);
    for (std::size_t j = 0; j < f.size(); ++j) {
      switch (roles_[j]) {
        case PointRole::kFree: f[j] = x[var_of_[j]]; break;
        case PointRole::kPlusInf: f[j] = kInf; break;
        case PointRole::kMinusInf: f[j] = -kInf; break;
        case PointRole::kUnreached: f[j] = 0.0; break;
      }
    }
    return f;
  }

  double hard_risk(const Eigen::VectorXd& x) const {
    return risk_adv(Loss{LossKind::kExponential}, expand(x), g_, mu_);
  }

  // Smoothed objective; fills gradient and Hessian triplets when requested.
  double smoothed(const Eigen::VectorXd& x, double tau, Eigen::VectorXd* grad,
                  std::vector<Eigen::Triplet<double>>* hess) const {
    double total = 0.0;
    if (grad) grad->setZero(static_cast<Eigen::Index>(num_vars()));
    if (hess) hess->clear();
    std::vector<double> w;
    for (const Term& t : terms_) {
      double top = -kInf;
      for (std::uint32_t j : t.points) top = std::max(top, t.sign * x[var_of_[j]]);
      w.resize(t.points.size());
      double z = 0.0;
      for (std::size_t k = 0; k < t.points.size(); ++k) {
        w[k] = std::exp((t.sign * x[var_of_[t.points[k]]] - top) / tau);
        z += w[k];
      }
      const double value = t.mass * std::exp(top + tau * std::log(z));
      total += value;
      if (!grad && !hess) continue;
      for (double& wk : w) wk /= z;
      if (grad) {
        for (std::size_t k = 0; k < t.points.size(); ++k) {
          (*grad)[var_of_[t.points[k]]] += t.sign * value * w[k];
        }
      }
      if (hess) {
        const double outer = value * (1.0 - 1.0 / tau);
        for (std::size_t a = 0; a < t.points.size(); ++a) {
          const int va = var_of_[t.points[a]];
          for (std::size_t b = 0; b < t.points.size(); ++b) {
            double h = outer * w[a] * w[b];
            if (a == b) h += value * w[a] / tau;
            hess->emplace_back(va, var_of_[t.points[b]], h);
          }
        }
      }
    }
    return total;
  }

  // Hard-max subgradient with lowest-index argmax.
  Eigen::VectorXd subgradient(const Eigen::VectorXd& x) const {
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_vars()));
    for (const Term& t : terms_) {
      std::uint32_t best = t.points.front();
      for (std::uint32_t j : t.points) {
        if (t.sign * x[var_of_[j]] > t.sign * x[var_of_[best]]) best = j;
      }
      grad[var_of_[best]] += t.sign * t.mass * std::exp(t.sign * x[var_of_[best]]);
    }
    return grad;
  }

 private:
  const GroundSet& g_;
  const TwoClassMeasure& mu_;
  std::vector<PointRole> roles_;
  std::vector<int> var_of_;
  std::vector<std::uint32_t> vars_;
  std::vector<Term> terms_;
};

Eigen::VectorXd clamp_scores(Eigen::VectorXd x) {
  return x.cwiseMax(-kScoreClamp).cwiseMin(kScoreClamp);
}

// Solves (H + mu I) d = -g, raising mu until the result is a descent direction.
bool newton_direction(const std::vector<Eigen::Triplet<double>>& triplets, std::size_t n,
                      const Eigen::VectorXd& grad, Eigen::VectorXd& dir) {
  double diag_max = 0.0;
  for (const auto& t : triplets) {
    if (t.row() == t.col()) diag_max = std::max(diag_max, std::abs(t.value()));
  }
  double reg = 1e-13 * diag_max + 1e-300;
  const auto size = static_cast<Eigen::Index>(n);
  for (int attempt = 0; attempt < 12; ++attempt, reg *= 100.0) {
    if (n <= kDenseLimit) {
      Eigen::MatrixXd h = Eigen::MatrixXd::Zero(size, size);
      for (const auto& t : triplets) h(t.row(), t.col()) += t.value();
      h.diagonal().array() += reg;
      Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
      if (ldlt.info() != Eigen::Success) continue;
      dir = ldlt.solve(-grad);
    } else {
      Eigen::SparseMatrix<double> h(size, size);
      h.setFromTriplets(triplets.begin(), triplets.end());
      for (Eigen::Index k = 0; k < size; ++k) h.coeffRef(k, k) += reg;
      Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(h);
      if (ldlt.info() != Eigen::Success) continue;
      dir = ldlt.solve(-grad);
    }
    if (dir.allFinite() && grad.dot(dir) < 0.0) return true;
  }
  return false;
}

PrimalSolution solve_smoothed(const ExpPrimalProblem& problem, const PrimalConfig& config) {
  PrimalSolution sol;
  const std::size_t n = problem.num_vars();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  Eigen::VectorXd best_x = x;
  double best = problem.hard_risk(x);
  sol.risk_trace.push_back(best);
  bool all_stages_done = true;

  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::VectorXd grad, dir;
  double tau = 1.0;
  for (;;) {
    sol.temperature = tau;
    bool stage_done = false;
    for (int it = 0; it < 200 && sol.iterations < config.max_iters; ++it) {
      const double value = problem.smoothed(x, tau, &grad, &triplets);
      if (!newton_direction(triplets, n, grad, dir)) {
        stage_done = true;
        break;
      }
      const double decrement = -grad.dot(dir);
      if (0.5 * decrement <= config.tol * value) {
        stage_done = true;
        break;
      }
      double step = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls, step *= 0.5) {
        Eigen::VectorXd trial = clamp_scores(x + step * dir);
        const double slope = grad.dot(trial - x);
        if (slope >= 0.0) continue;
        if (problem.smoothed(trial, tau, nullptr, nullptr) <= value + 1e-4 * slope) {
          x = std::move(trial);
          moved = true;
          break;
        }
      }
      ++sol.iterations;
      const double risk = problem.hard_risk(x);
      sol.risk_trace.push_back(risk);
      if (risk < best) {
        best = risk;
        best_x = x;
      }
      if (!moved) {
        // Rounding floor of the smoothed objective.
        stage_done = true;
        break;
      }
    }
    all_stages_done = all_stages_done && stage_done;
    if (tau <= config.final_temperature * (1.0 + 1e-9) || sol.iterations >= config.max_iters) {
      break;
    }
    tau = std::max(tau * 0.1, config.final_temperature);
  }
  sol.f = problem.expand(best_x);
  sol.risk = best;
  sol.converged = all_stages_done && sol.iterations < config.max_iters;
  return sol;
}

PrimalSolution solve_subgradient(const ExpPrimalProblem& problem, const PrimalConfig& config) {
  PrimalSolution sol;
  const std::size_t n = problem.num_vars();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  Eigen::VectorXd best_x = x;
  double best = problem.hard_risk(x);
  sol.risk_trace.push_back(best);
  double best_at_window_start = best;
  const int window = std::max(100, config.max_iters / 10);
  sol.converged = false;
  for (int k = 1; k <= config.max_iters && n > 0; ++k) {
    const Eigen::VectorXd g = problem.subgradient(x);
    const double norm = g.norm();
    if (norm == 0.0) {
      sol.converged = true;
      break;
    }
    x = clamp_scores(x - (config.step_c / std::sqrt(static_cast<double>(k))) * g / norm);
    ++sol.iterations;
    const double risk = problem.hard_risk(x);
    sol.risk_trace.push_back(risk);
    if (risk < best) {
      best = risk;
      best_x = x;
    }
    if (k % window == 0) {
      if (best_at_window_start - best <= config.tol * std::max(best, 1e-300)) {
        sol.converged = true;
        break;
      }
      best_at_window_start = best;
    }
  }
  if (n == 0) sol.converged = true;
  sol.f = problem.expand(best_x);
  sol.risk = best;
  return sol;
}

double loss_sup_term(std::span<const double> weights, const Field& sup) {
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) acc += mass_times(weights[i], sup[i]);
  return acc;
}

}  // namespace

bool in_feasible_set(const Loss& loss, const HPair& hp, double tol) {
  if (hp.h0.size() != hp.h1.size()) return false;
  for (std::size_t x = 0; x < hp.h0.size(); ++x) {
    const double a = hp.h0[x], b = hp.h1[x];
    if (!(a >= 0.0) || !(b >= 0.0)) return false;
    if (loss.kind == LossKind::kExponential) {
      if (std::isinf(a) || std::isinf(b)) continue;
      if (a * b < 1.0 - tol) return false;
      continue;
    }
    for (int k = 0; k <= 100; ++k) {
      const double eta = k / 100.0;
      const double lhs = mass_times(eta, b) + mass_times(1.0 - eta, a);
      if (lhs < loss.cstar(eta) - tol) return false;
    }
  }
  return true;
}

HPair pair_from_scores(const Loss& loss, std::span<const double> f) {
  HPair hp;
  hp.h0.resize(f.size());
  hp.h1.resize(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    hp.h0[i] = loss.phi(-f[i]);
    hp.h1[i] = loss.phi(f[i]);
  }
  return hp;
}

namespace {

double theta_unchecked(const HPair& hp, const GroundSet& g, const TwoClassMeasure& mu) {
  const Field s1 = sup_ball(g, hp.h1);
  const Field s0 = sup_ball(g, hp.h0);
  return loss_sup_term(mu.mass1, s1) + loss_sup_term(mu.mass0, s0);
}

}  // namespace

double theta(const Loss& loss, const HPair& hp, const GroundSet& g, const TwoClassMeasure& mu) {
  if (hp.h0.size() != g.size() || hp.h1.size() != g.size()) {
    throw Error(Errc::kInvalidArgument, "pair length differs from the ground set");
  }
  if (!in_feasible_set(loss, hp)) {
    throw Error(Errc::kInfeasiblePair, "pair violates eta h1 + (1 - eta) h0 >= C*(eta)");
  }
  return theta_unchecked(hp, g, mu);
}

double risk_adv(const Loss& loss, std::span<const double> f, const GroundSet& g,
                const TwoClassMeasure& mu) {
  if (f.size() != g.size()) throw Error(Errc::kInvalidArgument, "field length mismatch");
  return theta_unchecked(pair_from_scores(loss, f), g, mu);
}

PrimalSolution solve_exp_primal(const GroundSet& g, const TwoClassMeasure& mu,
                                const PrimalConfig& config) {
  validate_measure(mu, g.size());
  const ExpPrimalProblem problem(g, mu);
  return config.smoothing ? solve_smoothed(problem, config) : solve_subgradient(problem, config);
}

EtaField eta_hat(std::span<const double> f_exp) {
  EtaField eta(f_exp.size());
  for (std::size_t i = 0; i < f_exp.size(); ++i) {
    const double u = 2.0 * f_exp[i];
    if (u == kInf) {
      eta[i] = 1.0;
    } else if (u == -kInf) {
      eta[i] = 0.0;
    } else if (u >= 0.0) {
      eta[i] = 1.0 / (1.0 + std::exp(-u));
    } else {
      const double e = std::exp(u);
      eta[i] = e / (1.0 + e);
    }
  }
  return eta;
}

Field construct_f(const Loss& loss, std::span<const double> eta) {
  Field f(eta.size());
  for (std::size_t i = 0; i < eta.size(); ++i) f[i] = loss.alpha_opt(eta[i]);
  return f;
}

Field threshold_classifier(std::span<const double> eta) {
  Field f(eta.size());
  for (std::size_t i = 0; i < eta.size(); ++i) f[i] = eta[i] - 0.5;
  return f;
}

double classify_risk_adv(std::span<const double> f, const GroundSet& g,
                         const TwoClassMeasure& mu) {
  IndexSet nonpositive, positive;
  for (std::size_t i = 0; i < f.size(); ++i) {
    (f[i] > 0.0 ? positive : nonpositive).push_back(static_cast<std::uint32_t>(i));
  }
  const IndexSet hit1 = dilate(g, nonpositive);
  const IndexSet hit0 = dilate(g, positive);
  double acc = 0.0;
  for (std::uint32_t i : hit1) acc += mu.mass1[i];
  for (std::uint32_t i : hit0) acc += mu.mass0[i];
  return acc;
}

std::vector<double> default_primal_candidates(double limit, double step) {
  std::vector<double> out{-kInf};
  const int count = static_cast<int>(std::llround(2.0 * limit / step));
  for (int k = 0; k <= count; ++k) out.push_back(-limit + k * step);
  out.push_back(kInf);
  return out;
}

double brute_primal(const Loss& loss, const GroundSet& g, const TwoClassMeasure& mu,
                    std::span<const double> candidates) {
  const std::size_t n = g.size();
  if (n > 3) throw Error(Errc::kInstanceTooLarge, "brute primal search needs <= 3 points");
  const std::size_t c = candidates.size();
  std::vector<double> phi_pos(c), phi_neg(c);
  for (std::size_t k = 0; k < c; ++k) {
    phi_pos[k] = loss.phi(candidates[k]);
    phi_neg[k] = loss.phi(-candidates[k]);
  }
  std::size_t combos = 1;
  for (std::size_t i = 0; i < n; ++i) combos *= c;
  double best = kInf;
  std::vector<std::size_t> pick(n, 0);
  for (std::size_t code = 0; code < combos; ++code) {
    std::size_t rem = code;
    for (std::size_t i = 0; i < n; ++i) {
      pick[i] = rem % c;
      rem /= c;
    }
    double risk = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double s1 = 0.0, s0 = 0.0;
      for (std::uint32_t j : g.neighbors(i)) {
        s1 = std::max(s1, phi_pos[pick[j]]);
        s0 = std::max(s0, phi_neg[pick[j]]);
      }
      risk += mass_times(mu.mass1[i], s1) + mass_times(mu.mass0[i], s0);
    }
    best = std::min(best, risk);
  }
  return best;
}

}  // namespace advrisk
