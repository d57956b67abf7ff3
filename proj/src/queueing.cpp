#include "evsim/queueing.hpp"

#include <cmath>
#include <queue>
#include <string>
#include <vector>

#include "evsim/errors.hpp"
#include "evsim/rng.hpp"

namespace evsim {

namespace {

void check_params(const StationQueueParams& params) {
  if (params.servers < 1) {
    throw std::invalid_argument("station must have at least one server");
  }
  if (!(params.service_rate > 0.0)) {
    throw std::invalid_argument("service rate must be positive");
  }
}

void check_stable(const StationQueueParams& params, double arrival_rate) {
  check_params(params);
  if (arrival_rate < 0.0) {
    throw std::invalid_argument("arrival rate must be nonnegative");
  }
  const double capacity = params.servers * params.service_rate;
  if (arrival_rate >= capacity) {
    throw UnstableLoadError("arrival rate " + std::to_string(arrival_rate) +
                            " at or beyond capacity " + std::to_string(capacity));
  }
}

// Partial sums of rho^n/n! for n < c, plus the last term rho^c/c!,
// via t_{n+1} = t_n * rho/(n+1).
struct ErlangTerms {
  long double head_sum;   // sum_{n=0}^{c-1} rho^n/n!
  long double last_term;  // rho^c/c!
};

ErlangTerms erlang_terms(int servers, long double rho) {
  long double term = 1.0L;
  long double sum = 1.0L;
  for (int n = 1; n < servers; ++n) {
    term *= rho / n;
    sum += term;
  }
  term *= rho / servers;
  return {sum, term};
}

}  // namespace

LoadPoint make_load_point(const StationQueueParams& params, double arrival_rate) {
  check_params(params);
  if (arrival_rate < 0.0) {
    throw std::invalid_argument("arrival rate must be nonnegative");
  }
  LoadPoint point;
  point.arrival_rate = arrival_rate;
  point.offered_load = arrival_rate / params.service_rate;
  point.utilization = point.offered_load / params.servers;
  return point;
}

double erlang_p0(const StationQueueParams& params, double arrival_rate) {
  check_stable(params, arrival_rate);
  const long double rho =
      static_cast<long double>(arrival_rate) / params.service_rate;
  const long double util = rho / params.servers;
  const ErlangTerms terms = erlang_terms(params.servers, rho);
  const long double total = terms.head_sum + terms.last_term / (1.0L - util);
  return static_cast<double>(1.0L / total);
}

double expected_in_system(const StationQueueParams& params, double arrival_rate) {
  check_stable(params, arrival_rate);
  const long double rho =
      static_cast<long double>(arrival_rate) / params.service_rate;
  const long double util = rho / params.servers;
  const ErlangTerms terms = erlang_terms(params.servers, rho);
  const long double p0 =
      1.0L / (terms.head_sum + terms.last_term / (1.0L - util));
  // Queue term rho^{c+1} / (c * c! * (1-util)^2) * P0 = (rho^c/c!) * util
  // / (1-util)^2 * P0.
  const long double queued =
      terms.last_term * util / ((1.0L - util) * (1.0L - util)) * p0;
  return static_cast<double>(queued + rho);
}

double saturating_outflow(const StationQueueParams& params, double in_station) {
  check_params(params);
  if (in_station < 0.0) {
    throw std::invalid_argument("in-station count must be nonnegative");
  }
  return params.servers * params.service_rate * in_station / (1.0 + in_station);
}

double sojourn_time(double in_station, double arrival_rate, double rate_floor) {
  if (in_station < 0.0) {
    throw std::invalid_argument("in-station count must be nonnegative");
  }
  if (!(rate_floor > 0.0)) {
    throw std::invalid_argument("rate floor must be positive");
  }
  if (in_station == 0.0) return 0.0;
  return in_station / std::max(arrival_rate, rate_floor);
}

MmcSimResult simulate_mmc_queue(const StationQueueParams& params,
                                double arrival_rate, double horizon,
                                std::uint64_t seed) {
  check_stable(params, arrival_rate);
  if (!(horizon > 0.0)) {
    throw std::invalid_argument("horizon must be positive");
  }
  if (arrival_rate == 0.0) return {0.0, 0.0};

  SplitRng rng(seed, "mmc_oracle");
  const double warmup = 0.1 * horizon;
  const double mu = params.service_rate;
  const int c = params.servers;

  // Busy servers as a min-heap of (departure time, customer arrival time).
  using Departure = std::pair<double, double>;
  std::priority_queue<Departure, std::vector<Departure>, std::greater<>> busy;
  std::queue<double> waiting;  // arrival times, FIFO

  double now = 0.0;
  double next_arrival = rng.exponential(arrival_rate);
  int in_system = 0;
  double area = 0.0;
  double sojourn_sum = 0.0;
  long long sojourn_count = 0;

  auto integrate_to = [&](double t) {
    const double lo = std::max(now, warmup);
    if (t > lo) area += in_system * (t - lo);
    now = t;
  };

  while (true) {
    const bool departure_next =
        !busy.empty() && busy.top().first <= next_arrival;
    const double t_next = departure_next ? busy.top().first : next_arrival;
    if (t_next > horizon) {
      integrate_to(horizon);
      break;
    }
    integrate_to(t_next);
    if (departure_next) {
      const double arrived_at = busy.top().second;
      busy.pop();
      --in_system;
      if (arrived_at >= warmup) {
        sojourn_sum += now - arrived_at;
        ++sojourn_count;
      }
      if (!waiting.empty()) {
        const double head = waiting.front();
        waiting.pop();
        busy.emplace(now + rng.exponential(mu), head);
      }
    } else {
      ++in_system;
      if (static_cast<int>(busy.size()) < c) {
        busy.emplace(now + rng.exponential(mu), now);
      } else {
        waiting.push(now);
      }
      next_arrival = now + rng.exponential(arrival_rate);
    }
  }

  MmcSimResult result;
  result.mean_in_system = area / (horizon - warmup);
  result.mean_sojourn =
      sojourn_count > 0 ? sojourn_sum / sojourn_count : 0.0;
  return result;
}

}  // namespace evsim
