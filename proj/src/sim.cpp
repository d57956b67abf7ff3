#include "evsim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace evsim {

namespace {

std::vector<double> capacity_shares(const std::vector<Station>& stations,
                                    double total) {
  double capacity = 0.0;
  for (const auto& s : stations) capacity += s.chargers * s.service_rate;
  std::vector<double> shares(stations.size());
  for (std::size_t i = 0; i < stations.size(); ++i) {
    shares[i] = total * stations[i].chargers * stations[i].service_rate / capacity;
  }
  return shares;
}

std::vector<double> pre_assignment_sojourns(const NetworkState& state,
                                            const ScenarioConfig& config) {
  std::vector<double> sojourns(state.stations.size());
  for (std::size_t i = 0; i < state.stations.size(); ++i) {
    const double rate = smoothed_rate(state.stations[i], 0.0, config.window);
    sojourns[i] = sojourn_time(state.stations[i].in_station, rate,
                               config.rate_floor);
  }
  return sojourns;
}

std::vector<long long> intake_counts(const Assignment& assignment,
                                     std::size_t station_count) {
  std::vector<long long> counts(station_count, 0);
  for (int station : assignment.station_of) ++counts[station];
  return counts;
}

NetworkState advance_all(const NetworkState& state,
                         const std::vector<double>& inflows) {
  NetworkState next;
  next.stations.reserve(state.stations.size());
  for (std::size_t i = 0; i < state.stations.size(); ++i) {
    next.stations.push_back(advance_state(state.stations[i], inflows[i]));
  }
  return next;
}

bool margin_exceeded(const NetworkState& state,
                     const std::vector<double>& inflows,
                     const ScenarioConfig& config) {
  for (std::size_t i = 0; i < state.stations.size(); ++i) {
    const double rate =
        smoothed_rate(state.stations[i], inflows[i], config.window);
    const auto& p = state.stations[i].params;
    if (rate > (1.0 - config.safety) * p.servers * p.service_rate + 1e-12) {
      return true;
    }
  }
  return false;
}

double worst_sojourn(const NetworkState& state,
                     const std::vector<double>& inflows,
                     const ScenarioConfig& config) {
  double worst = 0.0;
  for (std::size_t i = 0; i < state.stations.size(); ++i) {
    const double rate =
        smoothed_rate(state.stations[i], inflows[i], config.window);
    worst = std::max(worst, sojourn_time(state.stations[i].in_station, rate,
                                         config.rate_floor));
  }
  return worst;
}

}  // namespace

std::vector<Station> default_stations() {
  return {
      {1, 2, 10.0, 62.0, 8.0},
      {2, 1, 6.0, 60.0, 12.0},
      {3, 3, 3.0, 58.0, 20.0},
  };
}

ScenarioConfig default_config() {
  ScenarioConfig config;
  config.stations = default_stations();
  return config;
}

NetworkState initial_state(const ScenarioConfig& config) {
  if (config.window < 1) {
    throw std::invalid_argument("window must be at least 1");
  }
  NetworkState state;
  state.stations.reserve(config.stations.size());
  for (const auto& station : config.stations) {
    StationFlowState flow;
    flow.in_station = 0.0;
    flow.inflow_history.assign(config.window - 1, 0.0);
    flow.params = {station.chargers, station.service_rate};
    state.stations.push_back(std::move(flow));
  }
  return state;
}

std::vector<EvRequest> generate_epoch_evs(const ScenarioConfig& config,
                                          SplitRng& arrivals,
                                          SplitRng& attributes) {
  const int demand = arrivals.poisson(config.arrival_intensity);
  std::vector<EvRequest> evs;
  evs.reserve(demand);
  const EvDistributions& dist = config.ev;
  for (int n = 0; n < demand; ++n) {
    EvRequest ev;
    ev.wtp_cap = attributes.uniform(dist.wtp_cap[0], dist.wtp_cap[1]);
    ev.position = attributes.uniform(dist.position[0], dist.position[1]);
    ev.soc = attributes.uniform(dist.soc[0], dist.soc[1]);
    ev.base_curvature = attributes.uniform(dist.curvature[0], dist.curvature[1]);
    ev.anxiety = dist.anxiety_values[attributes.uniform_index(
        static_cast<int>(dist.anxiety_values.size()))];
    evs.push_back(ev);
  }
  return evs;
}

EpochOutcome run_epoch(const NetworkState& state,
                       const std::vector<EvRequest>& evs,
                       const ScenarioConfig& config, int epoch_index) {
  const std::size_t station_count = config.stations.size();
  if (state.stations.size() != station_count) {
    throw std::invalid_argument("state does not match configured stations");
  }
  const double demand = static_cast<double>(evs.size());

  EpochOutcome outcome;
  outcome.report.epoch = epoch_index;
  outcome.report.demand = static_cast<int>(evs.size());

  if (config.policy == Policy::kTwoStage) {
    QuotaPlan plan;
    if (epoch_index <= 1) {
      // Cold start: no inflow history yet, so quotas follow capacity.
      plan.flows = capacity_shares(config.stations, demand);
      plan.integer_quotas =
          largest_remainder_round(plan.flows, std::llround(demand));
      plan.z_star = worst_sojourn(state, plan.flows, config);
      plan.stability_relaxed = false;
    } else {
      plan = solve_quota(state.stations, demand, config.window, config.safety,
                         config.rate_floor, config.solver_tol);
    }

    std::vector<double> sojourns(station_count);
    for (std::size_t i = 0; i < station_count; ++i) {
      const double rate =
          smoothed_rate(state.stations[i], plan.flows[i], config.window);
      sojourns[i] = sojourn_time(state.stations[i].in_station, rate,
                                 config.rate_floor);
    }

    UtilityMatrix matrix =
        build_utility_matrix(evs, config.stations, sojourns, config.weights);
    AssignmentProblem problem;
    problem.quotas = plan.integer_quotas;
    problem.utilities = std::move(matrix);
    try {
      outcome.assignment = solve_assignment(problem);
    } catch (const std::exception& e) {
      throw std::runtime_error("epoch " + std::to_string(epoch_index) + ": " +
                               e.what());
    }

    const std::vector<long long> counts =
        intake_counts(outcome.assignment, station_count);
    std::vector<double> inflows = plan.flows;
    if (config.state_update == StateUpdate::kAssigned) {
      inflows.assign(counts.begin(), counts.end());
    }
    outcome.state = advance_all(state, inflows);

    outcome.report.max_sojourn = plan.z_star;
    outcome.report.quotas = plan.integer_quotas;
    outcome.report.stability_relaxed =
        plan.stability_relaxed || margin_exceeded(state, inflows, config);
    long long overflow = 0;
    for (std::size_t i = 0; i < station_count; ++i) {
      overflow += std::max<long long>(0, counts[i] - plan.integer_quotas[i]);
    }
    outcome.report.overflow_count = static_cast<int>(overflow);
    outcome.report.fallback_count =
        static_cast<int>(problem.utilities.fallback_evs.size());
  } else {
    // Baseline policies replace both stages; dynamics and metrics are the
    // same. Utilities see the pre-assignment congestion signal.
    const std::vector<double> sojourns = pre_assignment_sojourns(state, config);
    UtilityMatrix matrix =
        build_utility_matrix(evs, config.stations, sojourns, config.weights);
    if (config.policy == Policy::kNearest) {
      outcome.assignment = nearest_feasible(matrix);
      outcome.report.overflow_count = 0;
    } else {
      std::vector<long long> capacities;
      std::vector<double> queue_levels;
      for (std::size_t i = 0; i < station_count; ++i) {
        capacities.push_back(config.stations[i].chargers);
        queue_levels.push_back(state.stations[i].in_station);
      }
      outcome.assignment = deferred_acceptance(evs, config.stations, capacities,
                                               matrix, queue_levels);
      // Overflow here means matched beyond charger capacity.
      long long beyond = 0;
      const auto counts = intake_counts(outcome.assignment, station_count);
      for (std::size_t i = 0; i < station_count; ++i) {
        beyond += std::max<long long>(0, counts[i] - capacities[i]);
      }
      outcome.report.overflow_count = static_cast<int>(beyond);
    }
    const std::vector<long long> counts =
        intake_counts(outcome.assignment, station_count);
    const std::vector<double> inflows(counts.begin(), counts.end());
    outcome.report.max_sojourn = worst_sojourn(state, inflows, config);
    outcome.state = advance_all(state, inflows);
    outcome.report.quotas = counts;
    outcome.report.stability_relaxed = margin_exceeded(state, inflows, config);
    outcome.report.fallback_count =
        static_cast<int>(matrix.fallback_evs.size());
  }

  outcome.report.mean_utility =
      evs.empty() ? 0.0 : outcome.assignment.objective / demand;
  double max_queue = 0.0;
  for (const auto& station : outcome.state.stations) {
    max_queue = std::max(max_queue, station.in_station);
  }
  outcome.report.max_queue = max_queue;
  return outcome;
}

std::vector<EpochReport> run_scenario(const ScenarioConfig& config) {
  if (config.epochs < 1) {
    throw std::invalid_argument("epochs must be at least 1");
  }
  if (!(config.arrival_intensity > 0.0)) {
    throw std::invalid_argument("arrival intensity must be positive");
  }
  SplitRng arrivals(config.seed, "arrivals");
  SplitRng attributes(config.seed, "ev_attrs");
  NetworkState state = initial_state(config);
  std::vector<EpochReport> reports;
  reports.reserve(config.epochs);
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const std::vector<EvRequest> evs =
        generate_epoch_evs(config, arrivals, attributes);
    EpochOutcome outcome = run_epoch(state, evs, config, epoch);
    state = std::move(outcome.state);
    reports.push_back(std::move(outcome.report));
  }
  return reports;
}

std::vector<ScalingRow> run_scaling_experiment(
    const ScenarioConfig& base, const std::vector<int>& station_counts,
    int seed_count) {
  if (station_counts.empty()) {
    throw std::invalid_argument("at least one station count required");
  }
  if (seed_count < 1) {
    throw std::invalid_argument("at least one seed required");
  }
  const int max_count =
      *std::max_element(station_counts.begin(), station_counts.end());
  if (max_count < 1) {
    throw std::invalid_argument("station counts must be positive");
  }

  const Policy policies[] = {Policy::kTwoStage, Policy::kNearest,
                             Policy::kMatching};
  std::vector<ScalingRow> rows;
  for (int s = 0; s < seed_count; ++s) {
    const std::uint64_t seed = base.seed + static_cast<std::uint64_t>(s);
    // One station pool per seed; prefixes give nested networks so larger
    // S strictly widens the feasible set.
    SplitRng station_rng(seed, "stations");
    std::vector<Station> pool;
    pool.reserve(max_count);
    for (int i = 0; i < max_count; ++i) {
      Station st;
      st.index = i + 1;
      st.location = station_rng.uniform(0.0, 20.0);
      st.chargers = 1 + station_rng.uniform_index(3);
      st.price = station_rng.uniform(55.0, 65.0);
      st.service_rate = station_rng.uniform(3.0, 10.0);
      pool.push_back(st);
    }
    for (int count : station_counts) {
      for (Policy policy : policies) {
        ScenarioConfig config = base;
        config.seed = seed;
        config.policy = policy;
        config.stations.assign(pool.begin(), pool.begin() + count);
        const std::vector<EpochReport> reports = run_scenario(config);
        ScalingRow row;
        row.station_count = count;
        row.policy = policy;
        row.seed = seed;
        row.mean_utility = mean_utility_per_ev(reports);
        row.avg_max_sojourn = average_max_sojourn(reports);
        row.avg_max_queue = average_max_queue(reports);
        rows.push_back(row);
      }
    }
  }
  return rows;
}

double mean_utility_per_ev(const std::vector<EpochReport>& reports) {
  double utility = 0.0;
  long long evs = 0;
  for (const auto& r : reports) {
    utility += r.mean_utility * r.demand;
    evs += r.demand;
  }
  return evs > 0 ? utility / evs : 0.0;
}

double average_max_queue(const std::vector<EpochReport>& reports) {
  double total = 0.0;
  for (const auto& r : reports) total += r.max_queue;
  return reports.empty() ? 0.0 : total / reports.size();
}

double average_max_sojourn(const std::vector<EpochReport>& reports) {
  double total = 0.0;
  for (const auto& r : reports) total += r.max_sojourn;
  return reports.empty() ? 0.0 : total / reports.size();
}

}  // namespace evsim
