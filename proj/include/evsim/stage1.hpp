#pragma once

#include <vector>

#include "evsim/queueing.hpp"

namespace evsim {

// Rolling per-station admission state: the current stock x and the H-1
// most recent inflows (newest first), zero-padded at the start of a run.
struct StationFlowState {
  double in_station = 0.0;
  std::vector<double> inflow_history;
  StationQueueParams params;
};

// Output of one quota solve. `flows` are the continuous admissions per
// interval, `integer_quotas` their largest-remainder rounding (sum equals
// the rounded demand exactly), `z_star` the achieved worst-station
// sojourn bound. `stability_relaxed` marks epochs whose demand exceeded
// total stable capacity; flows then fall back to capacity shares.
struct QuotaPlan {
  std::vector<double> flows;
  std::vector<long long> integer_quotas;
  double z_star = 0.0;
  bool stability_relaxed = false;
};

// Moving-average arrival rate (new_inflow + sum of history) / window.
double smoothed_rate(const StationFlowState& state, double new_inflow,
                     int window);

// Minimal inflow making the station's Little-law sojourn <= z:
// max(0, H*x/z - sum(history)).
double flow_lower_bound(const StationFlowState& state, double z, int window);

// Largest inflow keeping the smoothed rate within the stability margin:
// max(0, (1-safety)*H*c*mu - sum(history)).
double flow_upper_bound(const StationFlowState& state, int window,
                        double safety);

// Feasibility of sojourn bound z: every station's (rate-floored) minimal
// inflow fits under its stability cap and the caps bracket the demand.
// Monotone nonincreasing in z.
bool quota_feasible(const std::vector<StationFlowState>& states, double demand,
                    int window, double safety, double rate_floor, double z);

// Min-max sojourn quota solve: bisection on the epigraph bound z, then a
// water-filling bisection that equalizes station sojourns below z*, with
// residual demand spread proportionally to remaining headroom.
QuotaPlan solve_quota(const std::vector<StationFlowState>& states,
                      double demand, int window, double safety,
                      double rate_floor, double tol = 1e-9);

// One interval of queue dynamics: x' = max(0, x + inflow - g(x)) with the
// saturating outflow map; history shifts with the inflow prepended.
StationFlowState advance_state(const StationFlowState& state, double inflow);

// Largest-remainder (Hamilton) rounding of nonnegative values to a fixed
// integer total; ties broken toward lower index.
std::vector<long long> largest_remainder_round(const std::vector<double>& values,
                                               long long total);

}  // namespace evsim
