#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "advrisk/ground.hpp"
#include "advrisk/measures.hpp"

namespace testing {

using Points = std::vector<std::vector<double>>;

inline Points line_points(std::initializer_list<double> xs) {
  Points out;
  for (double x : xs) out.push_back({x});
  return out;
}

inline Points random_points(std::mt19937_64& rng, std::size_t n, std::size_t dim) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Points pts(n, std::vector<double>(dim));
  for (auto& p : pts) {
    for (double& c : p) c = u(rng);
  }
  return pts;
}

// Each point carries mass of one class only, in quarter units.
inline advrisk::TwoClassMeasure random_measure(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<int> units(1, 4);
  std::bernoulli_distribution coin(0.5);
  advrisk::TwoClassMeasure mu{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  for (std::size_t i = 0; i < n; ++i) {
    (coin(rng) ? mu.mass1 : mu.mass0)[i] = units(rng) / 4.0;
  }
  return mu;
}

inline std::vector<double> random_field(std::mt19937_64& rng, std::size_t n, double lo = -3.0,
                                        double hi = 3.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> f(n);
  for (double& v : f) v = u(rng);
  return f;
}

// Naive max over all j within epsilon, straight from the point coordinates.
inline std::vector<double> naive_sup(const Points& pts, advrisk::Norm norm, double eps,
                                     const std::vector<double>& f) {
  std::vector<double> out(pts.size(), -INFINITY);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (advrisk::distance(pts[i], pts[j], norm) <= eps) out[i] = std::max(out[i], f[j]);
    }
  }
  return out;
}

// Hall/Strassen condition checked over every subset A of the target support:
// q(A) <= p(A^t), where A^t is every source within t of A. Integer masses keep
// the sums exact.
inline bool hall_feasible(const advrisk::GroundSet& g, const std::vector<double>& p,
                          const std::vector<double>& q, double t) {
  std::vector<std::size_t> targets;
  for (std::size_t j = 0; j < q.size(); ++j) {
    if (q[j] > 0) targets.push_back(j);
  }
  const std::size_t k = targets.size();
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << k); ++mask) {
    double qa = 0.0, pa = 0.0;
    std::vector<char> hit(p.size(), 0);
    for (std::size_t b = 0; b < k; ++b) {
      if (!(mask >> b & 1)) continue;
      qa += q[targets[b]];
      for (std::size_t i = 0; i < p.size(); ++i) {
        if (g.distance(i, targets[b]) <= t) hit[i] = 1;
      }
    }
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (hit[i]) pa += p[i];
    }
    if (qa > pa) return false;
  }
  return true;
}

// Smallest candidate distance (0 and all source-target distances) passing the
// Hall check.
inline double hall_distance(const advrisk::GroundSet& g, const std::vector<double>& p,
                            const std::vector<double>& q) {
  std::vector<double> cands{0.0};
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < q.size(); ++j) {
      if (p[i] > 0 && q[j] > 0) cands.push_back(g.distance(i, j));
    }
  }
  std::sort(cands.begin(), cands.end());
  for (double t : cands) {
    if (hall_feasible(g, p, q, t)) return t;
  }
  return INFINITY;
}

// Unit masses on both sides: bottleneck assignment by trying every permutation.
inline double permutation_bottleneck(const advrisk::GroundSet& g, const std::vector<std::size_t>& src,
                                     const std::vector<std::size_t>& dst) {
  std::vector<std::size_t> perm(dst.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = INFINITY;
  do {
    double worst = 0.0;
    for (std::size_t k = 0; k < src.size(); ++k) worst = std::max(worst, g.distance(src[k], dst[perm[k]]));
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

inline std::filesystem::path temp_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "advrisk_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace testing
