#pragma once

#include <cstddef>
#include <vector>

namespace advrisk::detail {

// Dinic max-flow on real capacities.
class MaxFlow {
 public:
  explicit MaxFlow(std::size_t nodes) : adj_(nodes) {}

  void add_edge(std::size_t from, std::size_t to, double capacity);
  // residual_floor: residual capacities at or below it count as saturated.
  double solve(std::size_t source, std::size_t sink, double residual_floor);

 private:
  struct Edge {
    std::size_t to;
    std::size_t rev;
    double cap;
  };

  bool build_levels(std::size_t source, std::size_t sink, double floor);
  double push(std::size_t v, std::size_t sink, double limit, double floor);

  std::vector<std::vector<Edge>> adj_;
  std::vector<int> level_;
  std::vector<std::size_t> next_;
};

}  // namespace advrisk::detail
