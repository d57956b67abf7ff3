#include "evsim/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "evsim/errors.hpp"
#include "evsim/min_cost_flow.hpp"

namespace evsim {

namespace {

double resolved_penalty(const AssignmentProblem& problem) {
  const double penalty = problem.overflow_penalty > 0.0
                             ? problem.overflow_penalty
                             : default_overflow_penalty(problem.utilities);
  return penalty;
}

void check_problem(const AssignmentProblem& problem) {
  const int stations = problem.utilities.station_count();
  if (static_cast<int>(problem.quotas.size()) != stations) {
    throw std::invalid_argument("one quota required per station");
  }
  for (long long q : problem.quotas) {
    if (q < 0) throw std::invalid_argument("quotas must be nonnegative");
  }
}

// Marks the EVs that exceeded their station's quota (lowest pair utility
// first, ties to the higher index) and merges in the fallback EVs.
void collect_overflow(const AssignmentProblem& problem, Assignment* result) {
  const UtilityMatrix& matrix = problem.utilities;
  const int stations = matrix.station_count();
  std::vector<std::vector<int>> assigned(stations);
  for (std::size_t n = 0; n < result->station_of.size(); ++n) {
    assigned[result->station_of[n]].push_back(static_cast<int>(n));
  }
  std::vector<int> overflow;
  for (int i = 0; i < stations; ++i) {
    const long long excess =
        static_cast<long long>(assigned[i].size()) - problem.quotas[i];
    if (excess <= 0) continue;
    std::stable_sort(assigned[i].begin(), assigned[i].end(), [&](int a, int b) {
      const double ua = matrix.entries[a][i].utility;
      const double ub = matrix.entries[b][i].utility;
      if (ua != ub) return ua < ub;
      return a > b;
    });
    overflow.insert(overflow.end(), assigned[i].begin(),
                    assigned[i].begin() + excess);
  }
  overflow.insert(overflow.end(), matrix.fallback_evs.begin(),
                  matrix.fallback_evs.end());
  std::sort(overflow.begin(), overflow.end());
  overflow.erase(std::unique(overflow.begin(), overflow.end()), overflow.end());
  result->overflow_evs = std::move(overflow);
}

}  // namespace

double default_overflow_penalty(const UtilityMatrix& matrix) {
  double max_abs = 0.0;
  for (const auto& row : matrix.entries) {
    for (const auto& entry : row) {
      if (entry.feasible) max_abs = std::max(max_abs, std::abs(entry.utility));
    }
  }
  return 10.0 * max_abs + 1.0;
}

Assignment solve_assignment(const AssignmentProblem& problem) {
  check_problem(problem);
  const UtilityMatrix& matrix = problem.utilities;
  const int evs = matrix.ev_count();
  const int stations = matrix.station_count();
  const double penalty = resolved_penalty(problem);

  Assignment result;
  result.station_of.assign(evs, -1);
  result.charge_of.assign(evs, 0.0);
  if (evs == 0) return result;

  // Node layout: source, EVs, stations, sink.
  const int source = 0;
  const int sink = 1 + evs + stations;
  MinCostFlow graph(sink + 1);
  for (int n = 0; n < evs; ++n) {
    graph.add_edge(source, 1 + n, 1, 0.0);
  }
  std::vector<std::vector<int>> pair_edges(evs, std::vector<int>(stations, -1));
  for (int n = 0; n < evs; ++n) {
    for (int i = 0; i < stations; ++i) {
      const PairEntry& entry = matrix.entries[n][i];
      if (!entry.feasible) continue;
      pair_edges[n][i] =
          graph.add_edge(1 + n, 1 + evs + i, 1, -entry.utility);
    }
  }
  for (int i = 0; i < stations; ++i) {
    graph.add_edge(1 + evs + i, sink, problem.quotas[i], 0.0);
    graph.add_edge(1 + evs + i, sink, evs, penalty);
  }

  const auto [flow, cost] = graph.solve(source, sink, evs);
  (void)cost;
  if (flow < evs) {
    for (int n = 0; n < evs; ++n) {
      bool has_option = false;
      for (int i = 0; i < stations; ++i) {
        has_option = has_option || pair_edges[n][i] >= 0;
      }
      if (!has_option) {
        throw InfeasibleEvError("EV " + std::to_string(n) +
                                " has no feasible station");
      }
    }
    throw InfeasibleEvError("assignment flow short of EV count");
  }

  for (int n = 0; n < evs; ++n) {
    for (int i = 0; i < stations; ++i) {
      const int edge = pair_edges[n][i];
      if (edge >= 0 && graph.flow_on(edge) > 0) {
        result.station_of[n] = i;
        result.charge_of[n] = matrix.entries[n][i].charge;
        result.objective += matrix.entries[n][i].utility;
        break;
      }
    }
  }
  collect_overflow(problem, &result);
  return result;
}

Assignment brute_force_assignment(const AssignmentProblem& problem) {
  check_problem(problem);
  const UtilityMatrix& matrix = problem.utilities;
  const int evs = matrix.ev_count();
  const int stations = matrix.station_count();
  if (evs > 8 || stations > 4) {
    throw SizeLimitError("brute force limited to 8 EVs and 4 stations");
  }
  const double penalty = resolved_penalty(problem);

  Assignment best;
  best.station_of.assign(evs, -1);
  best.charge_of.assign(evs, 0.0);
  if (evs == 0) return best;

  std::vector<std::vector<int>> options(evs);
  for (int n = 0; n < evs; ++n) {
    for (int i = 0; i < stations; ++i) {
      if (matrix.entries[n][i].feasible) options[n].push_back(i);
    }
    if (options[n].empty()) {
      throw InfeasibleEvError("EV " + std::to_string(n) +
                              " has no feasible station");
    }
  }

  std::vector<int> choice(evs, 0);
  double best_score = -std::numeric_limits<double>::infinity();
  std::vector<long long> counts(stations, 0);
  while (true) {
    double utility = 0.0;
    std::fill(counts.begin(), counts.end(), 0);
    for (int n = 0; n < evs; ++n) {
      const int station = options[n][choice[n]];
      utility += matrix.entries[n][station].utility;
      ++counts[station];
    }
    double score = utility;
    for (int i = 0; i < stations; ++i) {
      if (counts[i] > problem.quotas[i]) {
        score -= penalty * (counts[i] - problem.quotas[i]);
      }
    }
    if (score > best_score) {
      best_score = score;
      best.objective = utility;
      for (int n = 0; n < evs; ++n) {
        best.station_of[n] = options[n][choice[n]];
        best.charge_of[n] = matrix.entries[n][best.station_of[n]].charge;
      }
    }
    int pos = evs - 1;
    while (pos >= 0) {
      if (++choice[pos] < static_cast<int>(options[pos].size())) break;
      choice[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  collect_overflow(problem, &best);
  return best;
}

}  // namespace evsim
