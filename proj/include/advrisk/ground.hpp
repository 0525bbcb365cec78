#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace advrisk {

enum class Norm { kL1, kL2, kLinf };

std::string_view norm_name(Norm norm);
// Accepts "l1", "l2", "linf". Throws Error(kInvalidArgument) otherwise.
Norm parse_norm(std::string_view name);

double distance(std::span<const double> a, std::span<const double> b, Norm norm);

// Extended-real values, one per ground point.
using Field = std::vector<double>;
// Sorted, duplicate-free point indices.
using IndexSet = std::vector<std::uint32_t>;

enum class NeighborIndex { kAuto, kBrute, kGrid };

// A finite point cloud with a closed epsilon-neighbor index stored as CSR rows.
// Immutable after construction.
class GroundSet {
 public:
  std::size_t size() const { return offsets_.size() - 1; }
  std::size_t dim() const { return dim_; }
  Norm norm() const { return norm_; }
  double epsilon() const { return epsilon_; }

  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  const std::vector<double>& coords() const { return coords_; }

  // Sorted indices j with ||x_i - x_j|| <= epsilon; always contains i.
  std::span<const std::uint32_t> neighbors(std::size_t i) const {
    return {indices_.data() + offsets_[i], indices_.data() + offsets_[i + 1]};
  }
  const std::vector<std::uint32_t>& offsets() const { return offsets_; }
  const std::vector<std::uint32_t>& indices() const { return indices_; }
  std::size_t edge_count() const { return indices_.size(); }

  double distance(std::size_t i, std::size_t j) const;

  // Set when the points are a strictly increasing 1-D sequence and every
  // neighbor row is the index window [i-k, i+k] clipped to the range.
  std::optional<std::size_t> window_halfwidth() const { return window_halfwidth_; }

  // Same points and norm, neighbor index rebuilt for a new radius.
  GroundSet with_epsilon(double epsilon, NeighborIndex method = NeighborIndex::kAuto) const;

  friend GroundSet build_ground(const std::vector<std::vector<double>>& points, Norm norm,
                                double epsilon, NeighborIndex method);

 private:
  GroundSet() = default;
  void index_neighbors(NeighborIndex method);
  void detect_window();

  std::size_t dim_ = 0;
  Norm norm_ = Norm::kL2;
  double epsilon_ = 0.0;
  std::vector<double> coords_;
  std::vector<std::uint32_t> offsets_{0};
  std::vector<std::uint32_t> indices_;
  std::optional<std::size_t> window_halfwidth_;
};

// Throws NonFiniteCoordinate, NegativeEpsilon, InvalidArgument (empty or ragged input).
// kAuto uses uniform-grid buckets of side epsilon for d <= 3, brute force otherwise.
GroundSet build_ground(const std::vector<std::vector<double>>& points, Norm norm,
                       double epsilon, NeighborIndex method = NeighborIndex::kAuto);

// S_eps(f)(i) = max over neighbors(i) of f.
Field sup_ball(const GroundSet& g, std::span<const double> f);
// I_eps(f)(i) = min over neighbors(i) of f.
Field inf_ball(const GroundSet& g, std::span<const double> f);

// A^eps: every point within epsilon of some member of a.
IndexSet dilate(const GroundSet& g, std::span<const std::uint32_t> a);

Field indicator(std::size_t n, std::span<const std::uint32_t> a);
IndexSet upper_level_set(std::span<const double> f, double threshold);

// Windowed max over [i-k, i+k] (clipped) with block prefix/suffix maxima.
// When max_ops is given it receives the number of pairwise max operations
// performed, which never exceeds 3n.
Field sliding_max_1d(std::span<const double> values, std::size_t k,
                     std::size_t* max_ops = nullptr);
Field sliding_min_1d(std::span<const double> values, std::size_t k);

// Windowed max for a uniformly spaced 1-D grid and radius epsilon.
// Throws NonUniformGrid when spacing is not uniform (relative tolerance 1e-9).
Field sliding_max_on_grid(std::span<const double> coords, std::span<const double> values,
                          double epsilon);

}  // namespace advrisk
