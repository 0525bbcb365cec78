#include "advrisk/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "advrisk/error.hpp"
#include "advrisk/extended_real.hpp"
#include "maxflow.hpp"

namespace advrisk {

namespace {

double sum(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0); }

void check_equal_totals(std::span<const double> p, std::span<const double> q) {
  const double tp = sum(p), tq = sum(q);
  if (std::abs(tp - tq) > 1e-9 * std::max(1.0, std::max(tp, tq))) {
    throw Error(Errc::kMassMismatch,
                "totals " + std::to_string(tp) + " and " + std::to_string(tq) + " differ");
  }
}

std::vector<std::uint32_t> support(std::span<const double> v) {
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] > 0.0) out.push_back(static_cast<std::uint32_t>(i));
  }
  return out;
}

}  // namespace

double TwoClassMeasure::total0() const { return sum(mass0); }
double TwoClassMeasure::total1() const { return sum(mass1); }

void validate_measure(const TwoClassMeasure& measure, std::size_t n) {
  if (measure.mass0.size() != n || measure.mass1.size() != n) {
    throw Error(Errc::kValidationError, "mass arrays must have one entry per ground point");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(measure.mass0[i] >= 0.0) || !std::isfinite(measure.mass0[i])) {
      throw Error(Errc::kNegativeMass, "mass0[" + std::to_string(i) + "]");
    }
    if (!(measure.mass1[i] >= 0.0) || !std::isfinite(measure.mass1[i])) {
      throw Error(Errc::kNegativeMass, "mass1[" + std::to_string(i) + "]");
    }
  }
}

Coupling normalize_coupling(std::vector<Transport> entries) {
  std::sort(entries.begin(), entries.end(), [](const Transport& a, const Transport& b) {
    return a.source != b.source ? a.source < b.source : a.target < b.target;
  });
  Coupling out;
  for (const Transport& t : entries) {
    if (t.mass < 0.0) throw Error(Errc::kNegativeMass, "negative transported mass");
    if (t.mass == 0.0) continue;
    if (!out.entries.empty() && out.entries.back().source == t.source &&
        out.entries.back().target == t.target) {
      out.entries.back().mass += t.mass;
    } else {
      out.entries.push_back(t);
    }
  }
  return out;
}

Coupling identity_coupling(std::span<const double> p) {
  Coupling c;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) {
      c.entries.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i), p[i]});
    }
  }
  return c;
}

std::vector<double> pushforward(const Coupling& c, std::size_t n) {
  std::vector<double> m(n, 0.0);
  for (const Transport& t : c.entries) m.at(t.target) += t.mass;
  return m;
}

std::vector<double> source_marginal(const Coupling& c, std::size_t n) {
  std::vector<double> m(n, 0.0);
  for (const Transport& t : c.entries) m.at(t.source) += t.mass;
  return m;
}

bool supported_in_ball(const Coupling& c, const GroundSet& g) {
  for (const Transport& t : c.entries) {
    if (t.source >= g.size() || t.target >= g.size()) return false;
    auto row = g.neighbors(t.source);
    if (!std::binary_search(row.begin(), row.end(), t.target)) return false;
  }
  return true;
}

double transported_integral(const Coupling& c, std::span<const double> field) {
  double acc = 0.0;
  for (const Transport& t : c.entries) acc += mass_times(t.mass, field[t.target]);
  return acc;
}

bool winf_feasible(const GroundSet& g, std::span<const double> p, std::span<const double> q,
                   double epsilon) {
  if (p.size() != g.size() || q.size() != g.size()) {
    throw Error(Errc::kInvalidArgument, "mass vectors must match the ground set");
  }
  if (epsilon < 0.0) throw Error(Errc::kNegativeEpsilon, "epsilon = " + std::to_string(epsilon));
  check_equal_totals(p, q);
  const double total = std::max(sum(p), sum(q));
  if (total == 0.0) return true;

  const auto left = support(p);
  const auto right = support(q);
  const std::size_t source = 0;
  const std::size_t sink = 1 + left.size() + right.size();
  detail::MaxFlow flow(sink + 1);
  const double unbounded = 2.0 * total + 1.0;
  for (std::size_t a = 0; a < left.size(); ++a) flow.add_edge(source, 1 + a, p[left[a]]);
  for (std::size_t b = 0; b < right.size(); ++b) {
    flow.add_edge(1 + left.size() + b, sink, q[right[b]]);
  }
  for (std::size_t a = 0; a < left.size(); ++a) {
    for (std::size_t b = 0; b < right.size(); ++b) {
      if (g.distance(left[a], right[b]) <= epsilon) {
        flow.add_edge(1 + a, 1 + left.size() + b, unbounded);
      }
    }
  }
  const double moved = flow.solve(source, sink, 1e-15 * total);
  return moved >= std::min(sum(p), sum(q)) - 1e-10 * total;
}

double winf_distance(const GroundSet& g, std::span<const double> p, std::span<const double> q) {
  check_equal_totals(p, q);
  const auto left = support(p);
  const auto right = support(q);
  if (left.empty() || right.empty()) return 0.0;
  std::vector<double> thresholds;
  thresholds.reserve(left.size() * right.size() + 1);
  thresholds.push_back(0.0);
  for (std::uint32_t i : left) {
    for (std::uint32_t j : right) thresholds.push_back(g.distance(i, j));
  }
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  // The largest threshold joins every pair, so it is always feasible.
  std::size_t lo = 0, hi = thresholds.size() - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (winf_feasible(g, p, q, thresholds[mid])) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return thresholds[lo];
}

Coupling greedy_attack(const GroundSet& g, std::span<const double> field,
                       std::span<const double> p) {
  Coupling c;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(p[i] > 0.0)) continue;
    auto row = g.neighbors(i);
    std::uint32_t best = row.front();
    for (std::uint32_t j : row) {
      if (field[j] > field[best]) best = j;
    }
    c.entries.push_back({static_cast<std::uint32_t>(i), best, p[i]});
  }
  return c;
}

Coupling soft_attack(const GroundSet& g, std::span<const double> scores,
                     std::span<const double> p, double temperature) {
  if (!(temperature > 0.0)) throw Error(Errc::kInvalidArgument, "temperature must be positive");
  Coupling c;
  std::vector<double> weights;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(p[i] > 0.0)) continue;
    auto row = g.neighbors(i);
    double top = -kInf;
    for (std::uint32_t j : row) top = std::max(top, scores[j]);
    weights.assign(row.size(), 0.0);
    double norm = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k) {
      const double s = scores[row[k]];
      if (std::isinf(top)) {
        weights[k] = s == top ? 1.0 : 0.0;
      } else {
        weights[k] = std::exp((s - top) / temperature);
      }
      norm += weights[k];
    }
    for (std::size_t k = 0; k < row.size(); ++k) {
      const double w = p[i] * weights[k] / norm;
      if (w > 0.0) c.entries.push_back({static_cast<std::uint32_t>(i), row[k], w});
    }
  }
  return c;
}

}  // namespace advrisk
