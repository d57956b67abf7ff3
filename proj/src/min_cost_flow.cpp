#include "evsim/min_cost_flow.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <stdexcept>

namespace evsim {

namespace {
constexpr double kUnreachable = std::numeric_limits<double>::infinity();
}

MinCostFlow::MinCostFlow(int node_count)
    : adjacent_(node_count), node_count_(node_count) {}

int MinCostFlow::add_edge(int from, int to, long long capacity, double cost) {
  if (from < 0 || from >= node_count_ || to < 0 || to >= node_count_) {
    throw std::out_of_range("edge endpoint outside node range");
  }
  if (capacity < 0) {
    throw std::invalid_argument("capacity must be nonnegative");
  }
  const int id = static_cast<int>(arcs_.size());
  arcs_.push_back({to, capacity, cost});
  arcs_.push_back({from, 0, -cost});
  adjacent_[from].push_back(id);
  adjacent_[to].push_back(id + 1);
  return id;
}

long long MinCostFlow::flow_on(int edge_id) const {
  // Flow pushed along a forward edge equals the residual on its twin.
  return arcs_[edge_id ^ 1].cap;
}

std::pair<long long, double> MinCostFlow::solve(int source, int sink,
                                                long long flow_limit) {
  std::vector<double> potential(node_count_, 0.0);

  bool has_negative = false;
  for (std::size_t e = 0; e < arcs_.size(); e += 2) {
    if (arcs_[e].cap > 0 && arcs_[e].cost < 0.0) {
      has_negative = true;
      break;
    }
  }
  if (has_negative) {
    std::vector<double> dist(node_count_, kUnreachable);
    dist[source] = 0.0;
    for (int round = 0; round < node_count_; ++round) {
      bool changed = false;
      for (int u = 0; u < node_count_; ++u) {
        if (dist[u] == kUnreachable) continue;
        for (int e : adjacent_[u]) {
          const Arc& arc = arcs_[e];
          if (arc.cap <= 0) continue;
          if (dist[u] + arc.cost < dist[arc.to]) {
            dist[arc.to] = dist[u] + arc.cost;
            changed = true;
          }
        }
      }
      if (!changed) break;
    }
    for (int u = 0; u < node_count_; ++u) {
      potential[u] = dist[u] == kUnreachable ? 0.0 : dist[u];
    }
  }

  long long flow = 0;
  double cost = 0.0;
  std::vector<double> dist(node_count_);
  std::vector<int> parent_edge(node_count_);

  while (flow < flow_limit) {
    std::fill(dist.begin(), dist.end(), kUnreachable);
    std::fill(parent_edge.begin(), parent_edge.end(), -1);
    dist[source] = 0.0;
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    heap.emplace(0.0, source);
    while (!heap.empty()) {
      auto [d, u] = heap.top();
      heap.pop();
      if (d > dist[u]) continue;
      for (int e : adjacent_[u]) {
        const Arc& arc = arcs_[e];
        if (arc.cap <= 0) continue;
        const double reduced =
            std::max(0.0, arc.cost + potential[u] - potential[arc.to]);
        if (dist[u] + reduced < dist[arc.to]) {
          dist[arc.to] = dist[u] + reduced;
          parent_edge[arc.to] = e;
          heap.emplace(dist[arc.to], arc.to);
        }
      }
    }
    if (dist[sink] == kUnreachable) break;
    for (int u = 0; u < node_count_; ++u) {
      if (dist[u] != kUnreachable) potential[u] += dist[u];
    }
    long long push = flow_limit - flow;
    for (int v = sink; v != source;) {
      const Arc& arc = arcs_[parent_edge[v]];
      push = std::min(push, arc.cap);
      v = arcs_[parent_edge[v] ^ 1].to;
    }
    for (int v = sink; v != source;) {
      Arc& arc = arcs_[parent_edge[v]];
      Arc& twin = arcs_[parent_edge[v] ^ 1];
      arc.cap -= push;
      twin.cap += push;
      cost += arc.cost * push;
      v = twin.to;
    }
    flow += push;
  }
  return {flow, cost};
}

}  // namespace evsim
