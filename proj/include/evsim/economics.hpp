#pragma once

#include <vector>

namespace evsim {

// One arriving EV: battery state, willingness-to-pay cap, entry position,
// and the curvature/anxiety pair shaping its charging benefit.
struct EvRequest {
  double soc = 0.5;
  double wtp_cap = 100.0;
  double position = 0.0;
  double base_curvature = 50.0;
  double anxiety = 0.0;
};

struct Station {
  int index = 0;
  int chargers = 1;
  double service_rate = 1.0;
  double price = 0.0;
  double location = 0.0;
};

// Utility weights: tau prices distance, eta prices sojourn time, kappa
// converts state of charge into reachable distance.
struct Weights {
  double tau = 1.0;
  double eta = 0.0;
  double kappa = 25.0;
};

// State-dependent benefit curvature s * (1 + anxiety * (1 - SoC)).
double effective_curvature(const EvRequest& ev);

struct ChargeDecision {
  double amount = 0.0;   // energy fraction, within [0, 1 - SoC]
  double benefit = 0.0;  // concave benefit at that amount, always >= 0
};

// Closed-form maximizer of -S/2 E^2 + (wtp_cap - price) E over the
// battery headroom [0, 1 - SoC].
ChargeDecision optimal_charge(const EvRequest& ev, const Station& station);

struct PairEntry {
  double utility = 0.0;
  double charge = 0.0;
  double distance = 0.0;
  bool feasible = false;
};

// Per-(EV, station) utilities, charge amounts, and reachability flags.
// EVs whose reachable set is empty are pinned to their nearest station
// (fallback rule) and listed in fallback_evs.
struct UtilityMatrix {
  std::vector<std::vector<PairEntry>> entries;  // [ev][station]
  Weights weights;
  std::vector<int> fallback_evs;
  int num_stations = 0;  // meaningful even for an empty EV batch

  int ev_count() const { return static_cast<int>(entries.size()); }
  int station_count() const {
    return entries.empty() ? num_stations
                           : static_cast<int>(entries.front().size());
  }
};

// Builds the Stage-2 utility matrix. `sojourns` holds the per-station
// delay signal W_i entering the utility with weight eta; pass zeros when
// congestion is handled by quotas alone.
UtilityMatrix build_utility_matrix(const std::vector<EvRequest>& evs,
                                   const std::vector<Station>& stations,
                                   const std::vector<double>& sojourns,
                                   const Weights& weights);

}  // namespace evsim
