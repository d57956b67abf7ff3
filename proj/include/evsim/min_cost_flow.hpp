#pragma once

#include <utility>
#include <vector>

namespace evsim {

// Successive-shortest-path min-cost flow with node potentials and
// real-valued arc costs. Bellman-Ford bootstraps the potentials (arcs may
// carry negative costs), Dijkstra finds each augmenting path. Exact on
// integral capacities; deterministic for a fixed arc insertion order.
class MinCostFlow {
 public:
  explicit MinCostFlow(int node_count);

  // Returns the forward edge id; the reverse edge is id ^ 1.
  int add_edge(int from, int to, long long capacity, double cost);

  // Sends up to flow_limit units from source to sink; returns the flow
  // actually sent and its total cost.
  std::pair<long long, double> solve(int source, int sink, long long flow_limit);

  long long flow_on(int edge_id) const;

 private:
  struct Arc {
    int to = 0;
    long long cap = 0;
    double cost = 0.0;
  };

  std::vector<Arc> arcs_;
  std::vector<std::vector<int>> adjacent_;
  int node_count_ = 0;
};

}  // namespace evsim
