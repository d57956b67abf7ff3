#include "evsim/baselines.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace evsim {

Assignment nearest_feasible(const UtilityMatrix& matrix) {
  const int evs = matrix.ev_count();
  const int stations = matrix.station_count();
  Assignment result;
  result.station_of.assign(evs, -1);
  result.charge_of.assign(evs, 0.0);
  for (int n = 0; n < evs; ++n) {
    int pick = -1;
    for (int i = 0; i < stations; ++i) {
      const PairEntry& entry = matrix.entries[n][i];
      if (!entry.feasible) continue;
      if (pick < 0 || entry.distance < matrix.entries[n][pick].distance) {
        pick = i;
      }
    }
    result.station_of[n] = pick;
    result.charge_of[n] = matrix.entries[n][pick].charge;
    result.objective += matrix.entries[n][pick].utility;
  }
  result.overflow_evs = matrix.fallback_evs;
  return result;
}

Assignment deferred_acceptance(const std::vector<EvRequest>& evs,
                               const std::vector<Station>& stations,
                               const std::vector<long long>& capacities,
                               const UtilityMatrix& matrix,
                               const std::vector<double>& queue_levels,
                               StationRanking ranking) {
  const int ev_count = matrix.ev_count();
  const int station_count = matrix.station_count();
  if (static_cast<int>(capacities.size()) != station_count ||
      static_cast<int>(queue_levels.size()) != station_count ||
      static_cast<int>(evs.size()) != ev_count ||
      static_cast<int>(stations.size()) != station_count) {
    throw std::invalid_argument("deferred_acceptance: size mismatch");
  }

  auto rank_value = [&](int n, int i) {
    if (ranking == StationRanking::kRevenue) {
      return matrix.entries[n][i].charge * stations[i].price;
    }
    return evs[n].wtp_cap - stations[i].price;
  };

  // Preference lists: feasible stations by utility, ties to lower index.
  std::vector<std::vector<int>> prefs(ev_count);
  for (int n = 0; n < ev_count; ++n) {
    for (int i = 0; i < station_count; ++i) {
      if (matrix.entries[n][i].feasible) prefs[n].push_back(i);
    }
    std::stable_sort(prefs[n].begin(), prefs[n].end(), [&](int a, int b) {
      return matrix.entries[n][a].utility > matrix.entries[n][b].utility;
    });
  }

  std::vector<int> next_choice(ev_count, 0);
  std::vector<std::vector<int>> held(station_count);
  std::deque<int> unmatched;
  for (int n = 0; n < ev_count; ++n) unmatched.push_back(n);
  std::vector<int> exhausted;

  long long proposals = 0;
  const long long proposal_limit =
      static_cast<long long>(ev_count) * station_count + 1;
  while (!unmatched.empty()) {
    const int n = unmatched.front();
    unmatched.pop_front();
    if (next_choice[n] >= static_cast<int>(prefs[n].size())) {
      exhausted.push_back(n);
      continue;
    }
    const int i = prefs[n][next_choice[n]++];
    ++proposals;
    if (proposals > proposal_limit) {
      throw std::logic_error("deferred acceptance exceeded proposal bound");
    }
    if (static_cast<long long>(held[i].size()) < capacities[i]) {
      held[i].push_back(n);
      continue;
    }
    if (capacities[i] == 0) {
      unmatched.push_back(n);
      continue;
    }
    // Station at capacity: keep the proposer only if it outranks the
    // worst currently held EV (ties keep the incumbent).
    int worst_pos = 0;
    for (std::size_t k = 1; k < held[i].size(); ++k) {
      if (rank_value(held[i][k], i) < rank_value(held[i][worst_pos], i)) {
        worst_pos = static_cast<int>(k);
      }
    }
    if (rank_value(n, i) > rank_value(held[i][worst_pos], i)) {
      unmatched.push_back(held[i][worst_pos]);
      held[i][worst_pos] = n;
    } else {
      unmatched.push_back(n);
    }
  }

  Assignment result;
  result.station_of.assign(ev_count, -1);
  result.charge_of.assign(ev_count, 0.0);
  std::vector<long long> intake(station_count, 0);
  for (int i = 0; i < station_count; ++i) {
    for (int n : held[i]) {
      result.station_of[n] = i;
      ++intake[i];
    }
  }
  std::sort(exhausted.begin(), exhausted.end());
  for (int n : exhausted) {
    int pick = -1;
    double best_load = 0.0;
    for (int i = 0; i < station_count; ++i) {
      if (!matrix.entries[n][i].feasible) continue;
      const double load = queue_levels[i] + static_cast<double>(intake[i]);
      if (pick < 0 || load < best_load) {
        pick = i;
        best_load = load;
      }
    }
    result.station_of[n] = pick;
    ++intake[pick];
  }
  for (int n = 0; n < ev_count; ++n) {
    const int i = result.station_of[n];
    result.charge_of[n] = matrix.entries[n][i].charge;
    result.objective += matrix.entries[n][i].utility;
  }
  result.overflow_evs = exhausted;
  result.overflow_evs.insert(result.overflow_evs.end(),
                             matrix.fallback_evs.begin(),
                             matrix.fallback_evs.end());
  std::sort(result.overflow_evs.begin(), result.overflow_evs.end());
  result.overflow_evs.erase(
      std::unique(result.overflow_evs.begin(), result.overflow_evs.end()),
      result.overflow_evs.end());
  return result;
}

}  // namespace evsim
