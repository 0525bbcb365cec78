#include "advrisk/ground.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>

#include "advrisk/error.hpp"
#include "advrisk/kernels.hpp"
#include "advrisk/parallel.hpp"

namespace advrisk {

namespace {

constexpr std::size_t kParallelChunk = 1 << 14;

struct CellKey {
  std::array<std::int64_t, 3> c{};
  bool operator==(const CellKey& o) const { return c == o.c; }
};

struct CellHash {
  std::size_t operator()(const CellKey& k) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (std::int64_t v : k.c) {
      h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

}  // namespace

std::string_view norm_name(Norm norm) {
  switch (norm) {
    case Norm::kL1: return "l1";
    case Norm::kL2: return "l2";
    case Norm::kLinf: return "linf";
  }
  return "l2";
}

Norm parse_norm(std::string_view name) {
  if (name == "l1") return Norm::kL1;
  if (name == "l2") return Norm::kL2;
  if (name == "linf") return Norm::kLinf;
  throw Error(Errc::kInvalidArgument, "unknown norm '" + std::string(name) + "'");
}

double distance(std::span<const double> a, std::span<const double> b, Norm norm) {
  double acc = 0.0;
  switch (norm) {
    case Norm::kL1:
      for (std::size_t k = 0; k < a.size(); ++k) acc += std::abs(a[k] - b[k]);
      return acc;
    case Norm::kL2:
      for (std::size_t k = 0; k < a.size(); ++k) acc += (a[k] - b[k]) * (a[k] - b[k]);
      return std::sqrt(acc);
    case Norm::kLinf:
      for (std::size_t k = 0; k < a.size(); ++k) acc = std::max(acc, std::abs(a[k] - b[k]));
      return acc;
  }
  return acc;
}

double GroundSet::distance(std::size_t i, std::size_t j) const {
  return advrisk::distance(point(i), point(j), norm_);
}

GroundSet build_ground(const std::vector<std::vector<double>>& points, Norm norm,
                       double epsilon, NeighborIndex method) {
  if (points.empty()) throw Error(Errc::kInvalidArgument, "ground set needs at least one point");
  if (points.size() >= std::numeric_limits<std::uint32_t>::max()) {
    throw Error(Errc::kInvalidArgument, "too many points");
  }
  if (std::isnan(epsilon) || std::isinf(epsilon)) {
    throw Error(Errc::kInvalidArgument, "epsilon must be finite");
  }
  if (epsilon < 0.0) throw Error(Errc::kNegativeEpsilon, "epsilon = " + std::to_string(epsilon));

  GroundSet g;
  g.dim_ = points.front().size();
  if (g.dim_ == 0) throw Error(Errc::kInvalidArgument, "points must have dimension >= 1");
  g.norm_ = norm;
  g.epsilon_ = epsilon;
  g.coords_.reserve(points.size() * g.dim_);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != g.dim_) {
      throw Error(Errc::kInvalidArgument, "point " + std::to_string(i) + " has wrong dimension");
    }
    for (double c : points[i]) {
      if (!std::isfinite(c)) {
        throw Error(Errc::kNonFiniteCoordinate, "point " + std::to_string(i));
      }
      g.coords_.push_back(c);
    }
  }
  g.index_neighbors(method);
  return g;
}

GroundSet GroundSet::with_epsilon(double epsilon, NeighborIndex method) const {
  if (std::isnan(epsilon) || std::isinf(epsilon)) {
    throw Error(Errc::kInvalidArgument, "epsilon must be finite");
  }
  if (epsilon < 0.0) throw Error(Errc::kNegativeEpsilon, "epsilon = " + std::to_string(epsilon));
  GroundSet g;
  g.dim_ = dim_;
  g.norm_ = norm_;
  g.epsilon_ = epsilon;
  g.coords_ = coords_;
  g.index_neighbors(method);
  return g;
}

void GroundSet::index_neighbors(NeighborIndex method) {
  const std::size_t n = coords_.size() / dim_;
  std::vector<std::vector<std::uint32_t>> rows(n);

  if (method == NeighborIndex::kAuto) {
    method = (dim_ <= 3 && epsilon_ > 0.0) ? NeighborIndex::kGrid : NeighborIndex::kBrute;
  }
  if (method == NeighborIndex::kGrid && !(epsilon_ > 0.0 && dim_ <= 3)) {
    method = NeighborIndex::kBrute;
  }
  if (method == NeighborIndex::kGrid) {
    // Cell coordinates must fit comfortably in int64.
    for (double c : coords_) {
      if (std::abs(c / epsilon_) > 1e15) {
        method = NeighborIndex::kBrute;
        break;
      }
    }
  }

  if (method == NeighborIndex::kGrid) {
    auto key_of = [&](std::size_t i) {
      CellKey key;
      for (std::size_t k = 0; k < dim_; ++k) {
        key.c[k] = static_cast<std::int64_t>(std::floor(coords_[i * dim_ + k] / epsilon_));
      }
      return key;
    };
    std::unordered_map<CellKey, std::vector<std::uint32_t>, CellHash> cells;
    for (std::size_t i = 0; i < n; ++i) cells[key_of(i)].push_back(static_cast<std::uint32_t>(i));

    std::size_t stencil = 1;
    for (std::size_t k = 0; k < dim_; ++k) stencil *= 3;
    for (std::size_t i = 0; i < n; ++i) {
      const CellKey base = key_of(i);
      for (std::size_t s = 0; s < stencil; ++s) {
        CellKey probe = base;
        std::size_t rem = s;
        for (std::size_t k = 0; k < dim_; ++k) {
          probe.c[k] += static_cast<std::int64_t>(rem % 3) - 1;
          rem /= 3;
        }
        auto it = cells.find(probe);
        if (it == cells.end()) continue;
        for (std::uint32_t j : it->second) {
          if (advrisk::distance(point(i), point(j), norm_) <= epsilon_) rows[i].push_back(j);
        }
      }
      std::sort(rows[i].begin(), rows[i].end());
    }
  } else if (epsilon_ == 0.0) {
    // Only coincident points are neighbors.
    std::map<std::vector<double>, std::vector<std::uint32_t>> groups;
    for (std::size_t i = 0; i < n; ++i) {
      auto p = point(i);
      groups[std::vector<double>(p.begin(), p.end())].push_back(static_cast<std::uint32_t>(i));
    }
    for (const auto& [_, members] : groups) {
      for (std::uint32_t i : members) rows[i] = members;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (advrisk::distance(point(i), point(j), norm_) <= epsilon_) {
          rows[i].push_back(static_cast<std::uint32_t>(j));
        }
      }
    }
  }

  offsets_.assign(1, 0);
  indices_.clear();
  for (const auto& row : rows) {
    indices_.insert(indices_.end(), row.begin(), row.end());
    offsets_.push_back(static_cast<std::uint32_t>(indices_.size()));
  }
  detect_window();
}

void GroundSet::detect_window() {
  window_halfwidth_.reset();
  const std::size_t n = size();
  if (dim_ != 1) return;
  for (std::size_t i = 1; i < n; ++i) {
    if (!(coords_[i] > coords_[i - 1])) return;
  }
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    auto row = neighbors(i);
    k = std::max<std::size_t>(k, row.back() - i);
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto row = neighbors(i);
    const std::size_t lo = i >= k ? i - k : 0;
    const std::size_t hi = std::min(n - 1, i + k);
    if (row.front() != lo || row.back() != hi || row.size() != hi - lo + 1) return;
  }
  window_halfwidth_ = k;
}

Field sup_ball(const GroundSet& g, std::span<const double> f) {
  if (auto k = g.window_halfwidth(); k && g.size() > 64) return sliding_max_1d(f, *k);
  Field out(g.size());
  const auto& table = kernels::active();
  parallel::for_chunks(g.size(), kParallelChunk, [&](std::size_t b, std::size_t e) {
    table.csr_max(g.offsets().data(), g.indices().data(), f.data(), out.data(), b, e);
  });
  return out;
}

Field inf_ball(const GroundSet& g, std::span<const double> f) {
  if (auto k = g.window_halfwidth(); k && g.size() > 64) return sliding_min_1d(f, *k);
  Field out(g.size());
  const auto& table = kernels::active();
  parallel::for_chunks(g.size(), kParallelChunk, [&](std::size_t b, std::size_t e) {
    table.csr_min(g.offsets().data(), g.indices().data(), f.data(), out.data(), b, e);
  });
  return out;
}

IndexSet dilate(const GroundSet& g, std::span<const std::uint32_t> a) {
  std::vector<char> hit(g.size(), 0);
  for (std::uint32_t i : a) {
    if (i >= g.size()) throw Error(Errc::kInvalidArgument, "index out of range in dilate");
    for (std::uint32_t j : g.neighbors(i)) hit[j] = 1;
  }
  IndexSet out;
  for (std::size_t j = 0; j < hit.size(); ++j) {
    if (hit[j]) out.push_back(static_cast<std::uint32_t>(j));
  }
  return out;
}

Field indicator(std::size_t n, std::span<const std::uint32_t> a) {
  Field out(n, 0.0);
  for (std::uint32_t i : a) out.at(i) = 1.0;
  return out;
}

IndexSet upper_level_set(std::span<const double> f, double threshold) {
  IndexSet out;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] > threshold) out.push_back(static_cast<std::uint32_t>(i));
  }
  return out;
}

Field sliding_max_1d(std::span<const double> values, std::size_t k, std::size_t* max_ops) {
  const std::size_t n = values.size();
  Field out(values.begin(), values.end());
  std::size_t ops = 0;
  if (k == 0 || n <= 1) {
    if (max_ops) *max_ops = 0;
    return out;
  }
  const std::size_t w = 2 * k + 1;
  // prefix[i]: max from the start of i's block to i; suffix[i]: max from i to
  // the end of its block (clipped to n-1).
  Field prefix(n), suffix(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (i % w == 0) {
      prefix[i] = values[i];
    } else {
      prefix[i] = values[i] > prefix[i - 1] ? values[i] : prefix[i - 1];
      ++ops;
    }
  }
  for (std::size_t r = n; r-- > 0;) {
    if (r == n - 1 || (r + 1) % w == 0) {
      suffix[r] = values[r];
    } else {
      suffix[r] = values[r] > suffix[r + 1] ? values[r] : suffix[r + 1];
      ++ops;
    }
  }
  auto combine = [&](std::size_t i) {
    const std::size_t lo = i >= k ? i - k : 0;
    const std::size_t hi = std::min(n - 1, i + k);
    if (lo / w == hi / w) {
      out[i] = (lo % w == 0) ? prefix[hi] : suffix[lo];
    } else {
      out[i] = suffix[lo] > prefix[hi] ? suffix[lo] : prefix[hi];
      ++ops;
    }
  };
  if (n > 2 * k) {
    // Full windows [i-k, i+k] for i in [k, n-k-1]: a two-block split, or one
    // whole block where suffix and prefix both hold the block max.
    const std::size_t first = k;
    const std::size_t count = n - 2 * k;
    for (std::size_t i = 0; i < first; ++i) combine(i);
    kernels::active().elementwise_max(suffix.data(), prefix.data() + 2 * k, out.data() + first,
                                      count);
    ops += count;
    for (std::size_t i = first + count; i < n; ++i) combine(i);
  } else {
    for (std::size_t i = 0; i < n; ++i) combine(i);
  }
  if (max_ops) *max_ops = ops;
  return out;
}

Field sliding_min_1d(std::span<const double> values, std::size_t k) {
  Field neg(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) neg[i] = -values[i];
  Field out = sliding_max_1d(neg, k);
  for (double& v : out) v = -v;
  return out;
}

Field sliding_max_on_grid(std::span<const double> coords, std::span<const double> values,
                          double epsilon) {
  if (coords.size() != values.size()) {
    throw Error(Errc::kInvalidArgument, "coords and values differ in length");
  }
  if (epsilon < 0.0) throw Error(Errc::kNegativeEpsilon, "epsilon = " + std::to_string(epsilon));
  const std::size_t n = coords.size();
  if (n <= 1) return Field(values.begin(), values.end());
  const double h = coords[1] - coords[0];
  if (!(h > 0.0)) throw Error(Errc::kNonUniformGrid, "grid must be strictly increasing");
  for (std::size_t i = 1; i < n; ++i) {
    const double step = coords[i] - coords[i - 1];
    if (std::abs(step - h) > 1e-9 * h) {
      throw Error(Errc::kNonUniformGrid, "spacing changes at index " + std::to_string(i));
    }
  }
  std::size_t k = 0;
  while (k + 1 < n && coords[k + 1] - coords[0] <= epsilon) ++k;
  return sliding_max_1d(values, k);
}

}  // namespace advrisk
