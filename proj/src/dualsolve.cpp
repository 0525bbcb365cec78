#include "advrisk/dualsolve.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "advrisk/error.hpp"
#include "advrisk/extended_real.hpp"
#include "advrisk/kernels.hpp"
#include "advrisk/parallel.hpp"
#include "advrisk/primalsolve.hpp"

namespace advrisk {

std::string_view dual_method_name(DualMethod method) {
  switch (method) {
    case DualMethod::kFrankWolfe: return "fw";
    case DualMethod::kFrankWolfeAway: return "fw_away";
    case DualMethod::kAttackExtract: return "attack_extract";
    case DualMethod::kBest: return "best";
  }
  return "best";
}

DualMethod parse_dual_method(std::string_view name) {
  if (name == "fw") return DualMethod::kFrankWolfe;
  if (name == "fw_away") return DualMethod::kFrankWolfeAway;
  if (name == "attack_extract") return DualMethod::kAttackExtract;
  if (name == "best") return DualMethod::kBest;
  throw Error(Errc::kInvalidArgument, "unknown dual method '" + std::string(name) + "'");
}

double dual_objective(const Loss& loss, std::span<const double> m0, std::span<const double> m1) {
  if (m0.size() != m1.size()) throw Error(Errc::kInvalidArgument, "mass vectors differ in length");
  for (std::size_t x = 0; x < m0.size(); ++x) {
    if (!(m0[x] >= 0.0) || !(m1[x] >= 0.0) || std::isinf(m0[x]) || std::isinf(m1[x])) {
      throw Error(Errc::kNegativeMass, "dual mass at index " + std::to_string(x));
    }
  }
  if (loss.kind == LossKind::kExponential) {
    return 2.0 * kernels::active().sqrt_product_sum(m0.data(), m1.data(), m0.size());
  }
  double acc = 0.0;
  for (std::size_t x = 0; x < m0.size(); ++x) acc += loss.perspective(m0[x], m1[x]);
  return acc;
}

DualSolution make_dual_solution(const Loss& loss, std::size_t n, Coupling c0, Coupling c1) {
  DualSolution sol;
  sol.coupling0 = std::move(c0);
  sol.coupling1 = std::move(c1);
  sol.m0 = pushforward(sol.coupling0, n);
  sol.m1 = pushforward(sol.coupling1, n);
  sol.objective = dual_objective(loss, sol.m0, sol.m1);
  return sol;
}

namespace {

// Per-class couplings stored as weights over each source's neighbor row.
struct Block {
  std::uint32_t source;
  double mass;
  std::size_t begin;
  std::size_t end;
};

struct ClassPlan {
  std::vector<Block> blocks;
  std::vector<std::uint32_t> target;
  std::vector<double> weight;

  void masses(std::vector<double>& m) const {
    std::fill(m.begin(), m.end(), 0.0);
    for (std::size_t k = 0; k < target.size(); ++k) m[target[k]] += weight[k];
  }

  Coupling coupling() const {
    std::vector<Transport> entries;
    for (const Block& b : blocks) {
      for (std::size_t k = b.begin; k < b.end; ++k) {
        if (weight[k] > 0.0) entries.push_back({b.source, target[k], weight[k]});
      }
    }
    return normalize_coupling(std::move(entries));
  }
};

ClassPlan make_plan(const GroundSet& g, std::span<const double> p, const Coupling& start) {
  ClassPlan plan;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] > 0.0)) continue;
    const auto row = g.neighbors(i);
    plan.blocks.push_back({static_cast<std::uint32_t>(i), p[i], plan.target.size(),
                           plan.target.size() + row.size()});
    for (std::uint32_t j : row) {
      plan.target.push_back(j);
      plan.weight.push_back(0.0);
    }
  }
  std::size_t b = 0;
  for (const Transport& t : start.entries) {
    while (b < plan.blocks.size() && plan.blocks[b].source < t.source) ++b;
    if (b == plan.blocks.size() || plan.blocks[b].source != t.source) continue;
    const Block& blk = plan.blocks[b];
    const auto first = plan.target.begin() + static_cast<std::ptrdiff_t>(blk.begin);
    const auto last = plan.target.begin() + static_cast<std::ptrdiff_t>(blk.end);
    const auto it = std::lower_bound(first, last, t.target);
    if (it != last && *it == t.target) plan.weight[static_cast<std::size_t>(it - plan.target.begin())] += t.mass;
  }
  // Rescale every block to its exact source mass.
  for (const Block& blk : plan.blocks) {
    double sum = 0.0;
    for (std::size_t k = blk.begin; k < blk.end; ++k) sum += plan.weight[k];
    if (sum > 0.0) {
      for (std::size_t k = blk.begin; k < blk.end; ++k) plan.weight[k] *= blk.mass / sum;
    } else {
      for (std::size_t k = blk.begin; k < blk.end; ++k) {
        if (plan.target[k] == blk.source) plan.weight[k] = blk.mass;
      }
    }
  }
  return plan;
}

struct Direction {
  double gain = 0.0;
  std::vector<double> dm0;
  std::vector<double> dm1;
};

class FrankWolfe {
 public:
  FrankWolfe(const Loss& loss, const GroundSet& g, const TwoClassMeasure& mu, const Coupling& c0,
             const Coupling& c1)
      : loss_(loss),
        n_(g.size()),
        plan0_(make_plan(g, mu.mass0, c0)),
        plan1_(make_plan(g, mu.mass1, c1)),
        delta_(1e-12 * mu.total()),
        total_(mu.total()),
        m0_(n_),
        m1_(n_),
        g0_(n_),
        g1_(n_) {}

  DualSolution run(const DualConfig& config, bool away) {
    DualSolution sol;
    refresh_masses();
    double objective = dual_objective(loss_, m0_, m1_);
    sol.trace.push_back(objective);
    constexpr int kWindow = 200;
    for (int k = 0; k < config.max_iters; ++k) {
      compute_gradient();
      Direction fw = fw_direction();
      if (fw.gain <= config.tol * total_) {
        sol.converged = true;
        break;
      }
      Direction pw;
      if (away) pw = pairwise_direction();
      const bool use_pairwise = away && pw.gain > fw.gain;
      const Direction& dir = use_pairwise ? pw : fw;
      double step;
      if (away) {
        step = line_search(dir);
      } else {
        step = 2.0 / (k + 2.0);
      }
      if (step > 0.0) {
        if (use_pairwise) {
          apply_pairwise(step);
        } else {
          apply_fw(step);
        }
        refresh_masses();
      }
      objective = dual_objective(loss_, m0_, m1_);
      sol.trace.push_back(objective);
      ++sol.iterations;
      if (sol.iterations % kWindow == 0) {
        const double before = sol.trace[sol.trace.size() - 1 - kWindow];
        if (objective - before <= config.tol * 1e-3 * total_) {
          sol.converged = true;
          break;
        }
      }
      if (away && step == 0.0) {
        // No ascent along either direction at floating-point resolution.
        sol.converged = true;
        break;
      }
    }
    DualSolution out = make_dual_solution(loss_, n_, plan0_.coupling(), plan1_.coupling());
    out.iterations = sol.iterations;
    out.converged = sol.converged;
    out.trace = std::move(sol.trace);
    return out;
  }

 private:
  void refresh_masses() {
    plan0_.masses(m0_);
    plan1_.masses(m1_);
  }

  void compute_gradient() {
    parallel::for_chunks(n_, 4096, [&](std::size_t b, std::size_t e) {
      for (std::size_t x = b; x < e; ++x) {
        loss_.perspective_gradient(m0_[x] + delta_, m1_[x] + delta_, g0_[x], g1_[x]);
      }
    });
  }

  // Per block: best target (lowest index on ties) and worst target with
  // positive weight. Returns the Frank-Wolfe gap contribution.
  double lmo(const ClassPlan& plan, const std::vector<double>& grad,
             std::vector<std::size_t>& fw_vertex, std::vector<std::size_t>& away_vertex,
             double* pairwise_gain) const {
    double gap = 0.0, pw = 0.0;
    for (const Block& blk : plan.blocks) {
      std::size_t best = blk.begin, worst = blk.end;
      double current = 0.0;
      for (std::size_t k = blk.begin; k < blk.end; ++k) {
        const double gk = grad[plan.target[k]];
        if (gk > grad[plan.target[best]]) best = k;
        if (plan.weight[k] > 0.0 && (worst == blk.end || gk < grad[plan.target[worst]])) worst = k;
        current += plan.weight[k] * gk;
      }
      if (worst == blk.end) worst = best;
      fw_vertex.push_back(best);
      away_vertex.push_back(worst);
      gap += blk.mass * grad[plan.target[best]] - current;
      pw += plan.weight[worst] * (grad[plan.target[best]] - grad[plan.target[worst]]);
    }
    if (pairwise_gain) *pairwise_gain = pw;
    return std::max(gap, 0.0);
  }

  Direction fw_direction() {
    Direction d;
    d.dm0.assign(n_, 0.0);
    d.dm1.assign(n_, 0.0);
    fw0_.clear();
    away0_.clear();
    fw1_.clear();
    away1_.clear();
    double pw0 = 0.0, pw1 = 0.0;
    d.gain = lmo(plan0_, g0_, fw0_, away0_, &pw0) + lmo(plan1_, g1_, fw1_, away1_, &pw1);
    pairwise_gain_ = pw0 + pw1;
    fill_fw(plan0_, fw0_, d.dm0, m0_);
    fill_fw(plan1_, fw1_, d.dm1, m1_);
    return d;
  }

  static void fill_fw(const ClassPlan& plan, const std::vector<std::size_t>& fw,
                      std::vector<double>& dm, const std::vector<double>& m) {
    for (std::size_t b = 0; b < plan.blocks.size(); ++b) dm[plan.target[fw[b]]] += plan.blocks[b].mass;
    for (std::size_t x = 0; x < dm.size(); ++x) dm[x] -= m[x];
  }

  Direction pairwise_direction() const {
    Direction d;
    d.dm0.assign(n_, 0.0);
    d.dm1.assign(n_, 0.0);
    d.gain = pairwise_gain_;
    fill_pairwise(plan0_, fw0_, away0_, d.dm0);
    fill_pairwise(plan1_, fw1_, away1_, d.dm1);
    return d;
  }

  static void fill_pairwise(const ClassPlan& plan, const std::vector<std::size_t>& fw,
                            const std::vector<std::size_t>& away, std::vector<double>& dm) {
    for (std::size_t b = 0; b < plan.blocks.size(); ++b) {
      if (fw[b] == away[b]) continue;
      const double w = plan.weight[away[b]];
      dm[plan.target[fw[b]]] += w;
      dm[plan.target[away[b]]] -= w;
    }
  }

  // Golden-section maximization of the concave objective on [0, 1] over the
  // targets the direction touches. Returns 0 when no step improves.
  double line_search(const Direction& d) const {
    std::vector<std::size_t> touched;
    for (std::size_t x = 0; x < n_; ++x) {
      if (d.dm0[x] != 0.0 || d.dm1[x] != 0.0) touched.push_back(x);
    }
    auto value = [&](double t) {
      double acc = 0.0;
      for (std::size_t x : touched) {
        const double a = std::max(0.0, m0_[x] + t * d.dm0[x]);
        const double b = std::max(0.0, m1_[x] + t * d.dm1[x]);
        acc += loss_.perspective(a, b);
      }
      return acc;
    };
    const double f0 = value(0.0);
    const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = 0.0, hi = 1.0;
    double x1 = hi - ratio * (hi - lo), x2 = lo + ratio * (hi - lo);
    double f1 = value(x1), f2 = value(x2);
    for (int it = 0; it < 80; ++it) {
      if (f1 >= f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - ratio * (hi - lo);
        f1 = value(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + ratio * (hi - lo);
        f2 = value(x2);
      }
    }
    double best_t = 0.5 * (lo + hi), best = value(best_t);
    const double f_one = value(1.0);
    if (f_one >= best) {
      best_t = 1.0;
      best = f_one;
    }
    return best > f0 ? best_t : 0.0;
  }

  void apply_fw(double step) {
    apply_fw_plan(plan0_, fw0_, step);
    apply_fw_plan(plan1_, fw1_, step);
  }

  static void apply_fw_plan(ClassPlan& plan, const std::vector<std::size_t>& fw, double step) {
    for (std::size_t b = 0; b < plan.blocks.size(); ++b) {
      const Block& blk = plan.blocks[b];
      for (std::size_t k = blk.begin; k < blk.end; ++k) plan.weight[k] *= 1.0 - step;
      plan.weight[fw[b]] += step * blk.mass;
    }
  }

  void apply_pairwise(double step) {
    apply_pairwise_plan(plan0_, fw0_, away0_, step);
    apply_pairwise_plan(plan1_, fw1_, away1_, step);
  }

  static void apply_pairwise_plan(ClassPlan& plan, const std::vector<std::size_t>& fw,
                                  const std::vector<std::size_t>& away, double step) {
    for (std::size_t b = 0; b < plan.blocks.size(); ++b) {
      if (fw[b] == away[b]) continue;
      const double moved = step == 1.0 ? plan.weight[away[b]] : step * plan.weight[away[b]];
      plan.weight[away[b]] = step == 1.0 ? 0.0 : std::max(0.0, plan.weight[away[b]] - moved);
      plan.weight[fw[b]] += moved;
    }
  }

  const Loss& loss_;
  std::size_t n_;
  ClassPlan plan0_;
  ClassPlan plan1_;
  double delta_;
  double total_;
  std::vector<double> m0_, m1_, g0_, g1_;
  std::vector<std::size_t> fw0_, away0_, fw1_, away1_;
  double pairwise_gain_ = 0.0;
};

DualSolution run_fw(const Loss& loss, const GroundSet& g, const TwoClassMeasure& mu,
                    const DualConfig& config, const Coupling& c0, const Coupling& c1, bool away) {
  FrankWolfe fw(loss, g, mu, c0, c1);
  return fw.run(config, away);
}

Field negated(std::span<const double> f) {
  Field out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = -f[i];
  return out;
}

// Couplings restricted to each source's near-optimal targets (argmax of f for
// class 0, argmin for class 1 within tie_tol), rebalanced so that every target
// satisfies (1 - eta) m1 = eta m0 with eta = sigma(2 f). Pairwise mass moves
// inside one source block at a time minimize the squared imbalance exactly.
class Balancer {
 public:
  Balancer(const GroundSet& g, const TwoClassMeasure& mu, std::span<const double> f, double tie_tol)
      : n_(g.size()), eta_(eta_hat(f)), r_(n_, 0.0) {
    const Field upper = sup_ball(g, f);
    const Field lower = inf_ball(g, f);
    add_blocks(g, mu.mass0, f, upper, tie_tol, +1.0, 0);
    add_blocks(g, mu.mass1, f, lower, tie_tol, -1.0, 1);
    for (std::size_t k = 0; k < target_.size(); ++k) r_[target_[k]] += coef(k) * weight_[k];
  }

  void run(int sweeps, double tol) {
    for (int s = 0; s < sweeps; ++s) {
      double moved = 0.0;
      for (const Span& b : blocks_) moved = std::max(moved, balance_block(b));
      if (moved <= tol) break;
    }
  }

  Coupling coupling(int cls) const {
    std::vector<Transport> entries;
    for (const Span& b : blocks_) {
      if (b.cls != cls) continue;
      for (std::size_t k = b.begin; k < b.end; ++k) {
        if (weight_[k] > 0.0) entries.push_back({b.source, target_[k], weight_[k]});
      }
    }
    return normalize_coupling(std::move(entries));
  }

 private:
  struct Span {
    std::uint32_t source;
    int cls;
    std::size_t begin;
    std::size_t end;
  };

  // d r_j / d weight for one edge.
  double coef(std::size_t k) const {
    const double eta = eta_[target_[k]];
    return cls_[k] == 0 ? -eta : 1.0 - eta;
  }

  void add_blocks(const GroundSet& g, std::span<const double> p, std::span<const double> f,
                  std::span<const double> extreme, double tie_tol, double sign, int cls) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (!(p[i] > 0.0)) continue;
      const double e = extreme[i];
      Span b{static_cast<std::uint32_t>(i), cls, target_.size(), 0};
      for (std::uint32_t j : g.neighbors(i)) {
        const bool tied = std::isinf(e) ? f[j] == e : sign * (e - f[j]) <= tie_tol * (1.0 + std::abs(e));
        if (tied) target_.push_back(j);
      }
      b.end = target_.size();
      const double share = p[i] / static_cast<double>(b.end - b.begin);
      for (std::size_t k = b.begin; k < b.end; ++k) {
        weight_.push_back(share);
        cls_.push_back(cls);
      }
      blocks_.push_back(b);
    }
  }

  // One exact pairwise step from the steepest-ascent to the steepest-descent
  // target of the block. Returns the mass moved.
  double balance_block(const Span& b) {
    if (b.end - b.begin < 2) return 0.0;
    std::size_t best = b.end, worst = b.end;
    for (std::size_t k = b.begin; k < b.end; ++k) {
      const double gk = r_[target_[k]] * coef(k);
      if (best == b.end || gk < r_[target_[best]] * coef(best)) best = k;
      if (weight_[k] > 0.0 && (worst == b.end || gk > r_[target_[worst]] * coef(worst))) worst = k;
    }
    if (worst == b.end || best == worst) return 0.0;
    const double slope = r_[target_[worst]] * coef(worst) - r_[target_[best]] * coef(best);
    const double curvature = coef(best) * coef(best) + coef(worst) * coef(worst);
    if (!(slope > 0.0) || !(curvature > 0.0)) return 0.0;
    const double step = std::min(weight_[worst], slope / curvature);
    weight_[worst] -= step;
    weight_[best] += step;
    r_[target_[worst]] -= coef(worst) * step;
    r_[target_[best]] += coef(best) * step;
    return step;
  }

  std::size_t n_;
  EtaField eta_;
  std::vector<double> r_;
  std::vector<Span> blocks_;
  std::vector<std::uint32_t> target_;
  std::vector<double> weight_;
  std::vector<int> cls_;
};

}  // namespace

DualSolution attack_extract(const Loss& loss, const GroundSet& g, const TwoClassMeasure& mu,
                            std::span<const double> f_exp) {
  const Field neg = negated(f_exp);
  DualSolution best = make_dual_solution(loss, g.size(), greedy_attack(g, f_exp, mu.mass0),
                                         greedy_attack(g, neg, mu.mass1));
  for (double tau = 1e-10; tau <= 1.5e-2; tau *= 10.0) {
    DualSolution cand = make_dual_solution(loss, g.size(), soft_attack(g, f_exp, mu.mass0, tau),
                                           soft_attack(g, neg, mu.mass1, tau));
    if (cand.objective > best.objective) best = std::move(cand);
  }
  for (double tie_tol : {1e-10, 1e-8, 1e-6, 1e-4}) {
    Balancer balancer(g, mu, f_exp, tie_tol);
    balancer.run(5000, 1e-15 * mu.total());
    DualSolution cand = make_dual_solution(loss, g.size(), balancer.coupling(0), balancer.coupling(1));
    if (cand.objective > best.objective) best = std::move(cand);
  }
  best.converged = true;
  best.trace = {best.objective};
  return best;
}

DualSolution solve_dual(const Loss& loss, const GroundSet& g, const TwoClassMeasure& mu,
                        const DualConfig& config, const Field* exp_scores) {
  validate_measure(mu, g.size());
  const Coupling id0 = identity_coupling(mu.mass0);
  const Coupling id1 = identity_coupling(mu.mass1);
  auto extracted = [&]() {
    if (exp_scores) return attack_extract(loss, g, mu, *exp_scores);
    return attack_extract(loss, g, mu, solve_exp_primal(g, mu).f);
  };
  switch (config.method) {
    case DualMethod::kFrankWolfe: return run_fw(loss, g, mu, config, id0, id1, false);
    case DualMethod::kFrankWolfeAway: return run_fw(loss, g, mu, config, id0, id1, true);
    case DualMethod::kAttackExtract: return extracted();
    case DualMethod::kBest: break;
  }
  DualSolution cold = run_fw(loss, g, mu, config, id0, id1, true);
  const DualSolution seed = extracted();
  DualSolution warm = run_fw(loss, g, mu, config, seed.coupling0, seed.coupling1, true);
  const int iterations = cold.iterations + warm.iterations;
  const bool converged = cold.converged || warm.converged;
  std::vector<double> trace = cold.trace;
  trace.insert(trace.end(), warm.trace.begin(), warm.trace.end());
  DualSolution best = warm.objective >= cold.objective ? std::move(warm) : std::move(cold);
  best.iterations = iterations;
  best.converged = converged;
  best.trace = std::move(trace);
  return best;
}

namespace {

struct BruteSource {
  int cls;
  double mass;
  std::vector<std::uint32_t> targets;
};

std::vector<BruteSource> brute_sources(const GroundSet& g, const TwoClassMeasure& mu) {
  std::vector<BruteSource> out;
  int count[2] = {0, 0};
  for (int cls = 0; cls < 2; ++cls) {
    const auto& p = cls == 0 ? mu.mass0 : mu.mass1;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (!(p[i] > 0.0)) continue;
      const auto row = g.neighbors(i);
      if (row.size() > 4) {
        throw Error(Errc::kInstanceTooLarge, "source " + std::to_string(i) + " has " +
                                                 std::to_string(row.size()) + " neighbors");
      }
      out.push_back({cls, p[i], {row.begin(), row.end()}});
      ++count[cls];
    }
  }
  if (count[0] > 4 || count[1] > 4) {
    throw Error(Errc::kInstanceTooLarge, "more than 4 sources in a class");
  }
  return out;
}

double compositions(int steps, std::size_t parts) {
  double c = 1.0;
  for (std::size_t k = 1; k < parts; ++k) c = c * static_cast<double>(steps + k) / static_cast<double>(k);
  return std::round(c);
}

constexpr double kBruteCap = 5e7;

}  // namespace

double brute_dual_combinations(const GroundSet& g, const TwoClassMeasure& mu, int grid_steps) {
  double combos = 1.0;
  for (const BruteSource& s : brute_sources(g, mu)) combos *= compositions(grid_steps, s.targets.size());
  return combos;
}

double brute_dual(const Loss& loss, const GroundSet& g, const TwoClassMeasure& mu, int grid_steps) {
  validate_measure(mu, g.size());
  if (grid_steps < 1) throw Error(Errc::kInvalidArgument, "grid_steps must be positive");
  const std::vector<BruteSource> sources = brute_sources(g, mu);
  const double combos = brute_dual_combinations(g, mu, grid_steps);
  if (combos > kBruteCap) {
    throw Error(Errc::kInstanceTooLarge, std::to_string(combos) + " coupling combinations");
  }
  const std::size_t n = g.size();
  // counts[s][k]: grid units source s sends to its k-th neighbor.
  std::vector<std::vector<int>> counts(sources.size());
  for (std::size_t s = 0; s < sources.size(); ++s) counts[s].assign(sources[s].targets.size(), 0);
  std::vector<double> m0(n), m1(n);
  double best = -kInf;
  const double steps = grid_steps;

  auto leaf = [&]() {
    std::fill(m0.begin(), m0.end(), 0.0);
    std::fill(m1.begin(), m1.end(), 0.0);
    for (std::size_t s = 0; s < sources.size(); ++s) {
      auto& m = sources[s].cls == 0 ? m0 : m1;
      for (std::size_t k = 0; k < counts[s].size(); ++k) {
        if (counts[s][k] == grid_steps) {
          m[sources[s].targets[k]] += sources[s].mass;
        } else if (counts[s][k] > 0) {
          m[sources[s].targets[k]] += sources[s].mass * (counts[s][k] / steps);
        }
      }
    }
    best = std::max(best, dual_objective(loss, m0, m1));
  };

  std::function<void(std::size_t, std::size_t, int)> recurse = [&](std::size_t s, std::size_t k,
                                                                  int left) {
    if (s == sources.size()) {
      leaf();
      return;
    }
    const std::size_t parts = counts[s].size();
    if (k + 1 == parts) {
      counts[s][k] = left;
      recurse(s + 1, 0, grid_steps);
      return;
    }
    for (int c = 0; c <= left; ++c) {
      counts[s][k] = c;
      recurse(s, k + 1, left - c);
    }
  };
  recurse(0, 0, grid_steps);
  return sources.empty() ? 0.0 : best;
}

}  // namespace advrisk
