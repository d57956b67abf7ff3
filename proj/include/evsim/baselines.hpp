#pragma once

#include <vector>

#include "evsim/assignment.hpp"

namespace evsim {

// Free-choice baseline: every EV takes its nearest reachable station
// (ties to the lower station index), no quotas. The objective is scored
// on the same utility matrix as the optimizing policies.
Assignment nearest_feasible(const UtilityMatrix& matrix);

// How stations rank proposers in the matching baseline.
enum class StationRanking {
  kRevenue,        // charge amount times station price
  kWtpNetOfPrice,  // proposer's willingness-to-pay cap minus price
};

// Capacity-constrained EV-proposing deferred acceptance. Generic
// stand-in for matching-based allocation: EVs propose down their utility
// order, stations hold up to `capacities[i]` proposals ranked by the
// chosen criterion. EVs rejected everywhere fall back to the reachable
// station with the shortest queue (current stock plus this epoch's
// intake) and are listed as overflow.
Assignment deferred_acceptance(const std::vector<EvRequest>& evs,
                               const std::vector<Station>& stations,
                               const std::vector<long long>& capacities,
                               const UtilityMatrix& matrix,
                               const std::vector<double>& queue_levels,
                               StationRanking ranking = StationRanking::kRevenue);

}  // namespace evsim
