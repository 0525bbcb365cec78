#include "maxflow.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace advrisk::detail {

void MaxFlow::add_edge(std::size_t from, std::size_t to, double capacity) {
  adj_[from].push_back({to, adj_[to].size(), capacity});
  adj_[to].push_back({from, adj_[from].size() - 1, 0.0});
}

bool MaxFlow::build_levels(std::size_t source, std::size_t sink, double floor) {
  level_.assign(adj_.size(), -1);
  std::queue<std::size_t> queue;
  level_[source] = 0;
  queue.push(source);
  while (!queue.empty()) {
    const std::size_t v = queue.front();
    queue.pop();
    for (const Edge& e : adj_[v]) {
      if (e.cap > floor && level_[e.to] < 0) {
        level_[e.to] = level_[v] + 1;
        queue.push(e.to);
      }
    }
  }
  return level_[sink] >= 0;
}

double MaxFlow::push(std::size_t v, std::size_t sink, double limit, double floor) {
  if (v == sink) return limit;
  for (std::size_t& k = next_[v]; k < adj_[v].size(); ++k) {
    Edge& e = adj_[v][k];
    if (e.cap <= floor || level_[e.to] != level_[v] + 1) continue;
    const double pushed = push(e.to, sink, std::min(limit, e.cap), floor);
    if (pushed > 0.0) {
      e.cap -= pushed;
      adj_[e.to][e.rev].cap += pushed;
      return pushed;
    }
  }
  return 0.0;
}

double MaxFlow::solve(std::size_t source, std::size_t sink, double residual_floor) {
  double flow = 0.0;
  while (build_levels(source, sink, residual_floor)) {
    next_.assign(adj_.size(), 0);
    while (true) {
      const double pushed =
          push(source, sink, std::numeric_limits<double>::infinity(), residual_floor);
      if (pushed <= 0.0) break;
      flow += pushed;
    }
  }
  return flow;
}

}  // namespace advrisk::detail
