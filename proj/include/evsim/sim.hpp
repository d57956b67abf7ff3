#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "evsim/assignment.hpp"
#include "evsim/baselines.hpp"
#include "evsim/economics.hpp"
#include "evsim/rng.hpp"
#include "evsim/stage1.hpp"

namespace evsim {

enum class Policy { kTwoStage, kNearest, kMatching };
enum class StateUpdate { kQuota, kAssigned };

// Sampling ranges for the per-epoch EV population. Anxiety is a discrete
// type mix; the rest are uniform ranges.
struct EvDistributions {
  std::array<double, 2> wtp_cap{80.0, 120.0};
  std::array<double, 2> position{0.0, 20.0};
  std::array<double, 2> soc{0.1, 0.9};
  std::array<double, 2> curvature{30.0, 45.0};
  std::vector<double> anxiety_values{0.0, 1.0};
};

struct ScenarioConfig {
  std::vector<Station> stations;
  double arrival_intensity = 30.0;  // Poisson mean per epoch
  int epochs = 100;
  int window = 4;  // moving-average length H
  Weights weights;
  double safety = 0.05;      // stability margin epsilon
  double rate_floor = 1e-6;  // Little's-law denominator floor
  double solver_tol = 1e-9;
  std::uint64_t seed = 42;
  EvDistributions ev;
  StateUpdate state_update = StateUpdate::kQuota;
  Policy policy = Policy::kTwoStage;
};

// Three-station line-segment network used throughout: a mid-size station
// near the demand center, a single fast charger, and a large but slow and
// remote station.
std::vector<Station> default_stations();

ScenarioConfig default_config();

struct EpochReport {
  int epoch = 0;
  int demand = 0;
  double max_queue = 0.0;    // max station stock after the update
  double max_sojourn = 0.0;  // realized worst-station sojourn bound
  double mean_utility = 0.0;
  std::vector<long long> quotas;  // realized intake under baseline policies
  int overflow_count = 0;
  int fallback_count = 0;
  bool stability_relaxed = false;
};

struct NetworkState {
  std::vector<StationFlowState> stations;
};

NetworkState initial_state(const ScenarioConfig& config);

// Draws the epoch's Poisson demand from `arrivals` and each EV's
// attributes from `attributes` (order per EV: wtp cap, position, SoC,
// curvature, anxiety type).
std::vector<EvRequest> generate_epoch_evs(const ScenarioConfig& config,
                                          SplitRng& arrivals,
                                          SplitRng& attributes);

struct EpochOutcome {
  NetworkState state;
  EpochReport report;
  Assignment assignment;
};

// One epoch under the configured policy. Epoch 1 is the cold start:
// quotas proportional to service capacity, no min-max solve.
EpochOutcome run_epoch(const NetworkState& state,
                       const std::vector<EvRequest>& evs,
                       const ScenarioConfig& config, int epoch_index);

std::vector<EpochReport> run_scenario(const ScenarioConfig& config);

struct ScalingRow {
  int station_count = 0;
  Policy policy = Policy::kTwoStage;
  std::uint64_t seed = 0;
  double mean_utility = 0.0;    // per assigned EV, across all epochs
  double avg_max_sojourn = 0.0;
  double avg_max_queue = 0.0;
};

// Station-count sweep: draws `max(station_counts)` random stations per
// seed and reuses prefixes, so larger networks strictly extend smaller
// ones and every policy sees identical scenario randomness.
std::vector<ScalingRow> run_scaling_experiment(
    const ScenarioConfig& base, const std::vector<int>& station_counts,
    int seed_count);

// Aggregates used by reports and the comparison command.
double mean_utility_per_ev(const std::vector<EpochReport>& reports);
double average_max_queue(const std::vector<EpochReport>& reports);
double average_max_sojourn(const std::vector<EpochReport>& reports);

}  // namespace evsim
