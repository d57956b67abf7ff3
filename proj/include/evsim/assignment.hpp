#pragma once

#include <vector>

#include "evsim/economics.hpp"

namespace evsim {

// Capacitated assignment instance: Stage-2 utilities, the integer station
// quotas, and the penalty charged per EV placed beyond quota. A penalty
// of zero (the default) resolves to 10 * max|utility| + 1, which keeps
// overflow arcs strictly dominated by any in-quota option.
struct AssignmentProblem {
  UtilityMatrix utilities;
  std::vector<long long> quotas;
  double overflow_penalty = 0.0;
};

struct Assignment {
  std::vector<int> station_of;
  std::vector<double> charge_of;
  double objective = 0.0;         // sum of true pair utilities, no penalties
  std::vector<int> overflow_evs;  // beyond quota, or placed by the fallback rule
};

double default_overflow_penalty(const UtilityMatrix& matrix);

// Exact utility-maximizing assignment under quotas, solved as min-cost
// flow on negated utilities with per-station overflow arcs.
Assignment solve_assignment(const AssignmentProblem& problem);

// Exhaustive oracle over all station choices; identical overflow costs.
// Enumeration bound: at most 8 EVs and 4 stations.
Assignment brute_force_assignment(const AssignmentProblem& problem);

}  // namespace evsim
