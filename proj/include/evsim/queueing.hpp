#pragma once

#include <cstdint>

namespace evsim {

// Static queueing parameters of one station: c parallel chargers, each
// serving at rate mu (vehicles per interval).
struct StationQueueParams {
  int servers = 1;
  double service_rate = 1.0;
};

// Load descriptors at a given arrival rate: offered load rho = lambda/mu
// and utilization rho/c.
struct LoadPoint {
  double arrival_rate = 0.0;
  double offered_load = 0.0;
  double utilization = 0.0;
};

LoadPoint make_load_point(const StationQueueParams& params, double arrival_rate);

// Steady-state probability that an M/M/c station is empty. Computed with
// a running-product recurrence over the partial sums (no explicit
// factorials), accumulated in extended precision; exact to ~1e-12
// relative error for c <= 64.
double erlang_p0(const StationQueueParams& params, double arrival_rate);

// Expected number in system (waiting + in service) of an M/M/c station:
// Erlang-C queue term plus the offered load.
double expected_in_system(const StationQueueParams& params, double arrival_rate);

// Saturating departure map c*mu*x/(1+x): strictly increasing in x,
// bounded by the service capacity c*mu.
double saturating_outflow(const StationQueueParams& params, double in_station);

// Little's-law sojourn x / max(lambda, rate_floor). The floor keeps the
// ratio finite as lambda -> 0 while preserving congestion ordering.
double sojourn_time(double in_station, double arrival_rate, double rate_floor);

struct MmcSimResult {
  double mean_in_system = 0.0;
  double mean_sojourn = 0.0;
};

// Event-driven M/M/c reference simulation: exponential interarrivals and
// services, c parallel servers, FIFO queue. Returns the time-averaged
// in-system count and the mean sojourn of customers arriving after
// warm-up (the first 10% of the horizon is discarded). Deterministic
// given the seed.
MmcSimResult simulate_mmc_queue(const StationQueueParams& params,
                                double arrival_rate, double horizon,
                                std::uint64_t seed);

}  // namespace evsim
