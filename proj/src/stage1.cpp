#include "evsim/stage1.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "evsim/errors.hpp"

namespace evsim {

namespace {

void check_window(const StationFlowState& state, int window) {
  if (window < 1) {
    throw std::invalid_argument("window must be at least 1");
  }
  if (static_cast<int>(state.inflow_history.size()) != window - 1) {
    throw std::invalid_argument("inflow history must hold window-1 entries");
  }
}

double history_sum(const StationFlowState& state) {
  return std::accumulate(state.inflow_history.begin(),
                         state.inflow_history.end(), 0.0);
}

struct QuotaWorkspace {
  std::vector<double> stock;     // x_i
  std::vector<double> past;      // sum of inflow history
  std::vector<double> upper;     // stability cap on inflow
  std::vector<double> capacity;  // c_i * mu_i
  int window = 1;
  double rate_floor = 0.0;

  // Minimal inflow for W_i <= z, consistent with the rate floor: once the
  // floored rate alone satisfies the bound, no inflow is required.
  double lower(int i, double z) const {
    if (stock[i] <= z * rate_floor) return 0.0;
    return std::max(0.0, window * stock[i] / z - past[i]);
  }

  bool feasible(double demand, double z) const {
    double total_lower = 0.0;
    for (std::size_t i = 0; i < stock.size(); ++i) {
      const double li = lower(static_cast<int>(i), z);
      if (li > upper[i]) return false;
      total_lower += li;
    }
    return total_lower <= demand;
  }
};

QuotaWorkspace build_workspace(const std::vector<StationFlowState>& states,
                               int window, double safety, double rate_floor) {
  QuotaWorkspace ws;
  ws.window = window;
  ws.rate_floor = rate_floor;
  for (const auto& state : states) {
    check_window(state, window);
    if (state.in_station < 0.0) {
      throw std::invalid_argument("in-station stock must be nonnegative");
    }
    ws.stock.push_back(state.in_station);
    ws.past.push_back(history_sum(state));
    ws.upper.push_back(flow_upper_bound(state, window, safety));
    ws.capacity.push_back(state.params.servers * state.params.service_rate);
  }
  return ws;
}

// Rounds `values` to integers summing to `total`, never exceeding
// `caps[i]` while any capped headroom remains. If the caps cannot absorb
// the total, the excess goes to the stations with the most fractional
// headroom left.
std::vector<long long> capped_largest_remainder(
    const std::vector<double>& values, const std::vector<double>& caps,
    long long total) {
  const std::size_t n = values.size();
  std::vector<long long> cap_int(n);
  std::vector<long long> out(n);
  std::vector<double> remainder(n);
  long long assigned = 0;
  for (std::size_t i = 0; i < n; ++i) {
    cap_int[i] = static_cast<long long>(std::floor(caps[i] + 1e-9));
    const double base = std::floor(values[i]);
    out[i] = std::min(static_cast<long long>(base), cap_int[i]);
    out[i] = std::max<long long>(out[i], 0);
    remainder[i] = values[i] - base;
    assigned += out[i];
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return remainder[a] > remainder[b];
  });
  long long deficit = total - assigned;
  // First pass respects the integer caps.
  while (deficit > 0) {
    bool progressed = false;
    for (std::size_t idx : order) {
      if (deficit == 0) break;
      if (out[idx] < cap_int[idx]) {
        ++out[idx];
        --deficit;
        progressed = true;
      }
    }
    if (!progressed) break;
  }
  // Caps exhausted: place the rest by remaining real-valued headroom so
  // the plan still conserves the demand.
  while (deficit > 0) {
    std::size_t best = 0;
    double best_headroom = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double headroom = caps[i] - static_cast<double>(out[i]);
      if (headroom > best_headroom) {
        best_headroom = headroom;
        best = i;
      }
    }
    ++out[best];
    --deficit;
  }
  return out;
}

}  // namespace

double smoothed_rate(const StationFlowState& state, double new_inflow,
                     int window) {
  check_window(state, window);
  if (new_inflow < 0.0) {
    throw std::invalid_argument("inflow must be nonnegative");
  }
  return (new_inflow + history_sum(state)) / window;
}

double flow_lower_bound(const StationFlowState& state, double z, int window) {
  check_window(state, window);
  if (!(z > 0.0)) {
    throw std::invalid_argument("sojourn bound z must be positive");
  }
  return std::max(0.0, window * state.in_station / z - history_sum(state));
}

double flow_upper_bound(const StationFlowState& state, int window,
                        double safety) {
  check_window(state, window);
  if (safety < 0.0 || safety >= 1.0) {
    throw std::invalid_argument("safety margin must lie in [0, 1)");
  }
  const double capacity = state.params.servers * state.params.service_rate;
  return std::max(0.0, (1.0 - safety) * window * capacity - history_sum(state));
}

bool quota_feasible(const std::vector<StationFlowState>& states, double demand,
                    int window, double safety, double rate_floor, double z) {
  if (states.empty()) {
    throw std::invalid_argument("at least one station required");
  }
  if (!(z > 0.0)) {
    throw std::invalid_argument("sojourn bound z must be positive");
  }
  const QuotaWorkspace ws = build_workspace(states, window, safety, rate_floor);
  const double total_upper =
      std::accumulate(ws.upper.begin(), ws.upper.end(), 0.0);
  return demand <= total_upper && ws.feasible(demand, z);
}

QuotaPlan solve_quota(const std::vector<StationFlowState>& states,
                      double demand, int window, double safety,
                      double rate_floor, double tol) {
  if (states.empty()) {
    throw std::invalid_argument("at least one station required");
  }
  if (demand < 0.0) {
    throw std::invalid_argument("demand must be nonnegative");
  }
  if (!(rate_floor > 0.0)) {
    throw std::invalid_argument("rate floor must be positive");
  }
  if (!(tol > 0.0)) {
    throw std::invalid_argument("tolerance must be positive");
  }

  const QuotaWorkspace ws = build_workspace(states, window, safety, rate_floor);
  const std::size_t n = states.size();
  const double total_upper =
      std::accumulate(ws.upper.begin(), ws.upper.end(), 0.0);

  QuotaPlan plan;
  plan.flows.assign(n, 0.0);

  if (total_upper < demand) {
    // Demand exceeds stable capacity: conserve flow, flag the epoch, and
    // share the load by service capacity.
    plan.stability_relaxed = true;
    const double total_capacity =
        std::accumulate(ws.capacity.begin(), ws.capacity.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      plan.flows[i] = demand * ws.capacity[i] / total_capacity;
    }
    plan.integer_quotas =
        largest_remainder_round(plan.flows, std::llround(demand));
  } else {
    // Bisection on the epigraph bound z. The upper bracket clears every
    // floored lower bound by construction.
    const double max_stock = *std::max_element(ws.stock.begin(), ws.stock.end());
    const double z_max = max_stock / rate_floor + 1.0;
    const double z_min = tol;
    double z_star = z_max;
    if (ws.feasible(demand, z_min)) {
      z_star = z_min;
    } else {
      double lo = z_min;
      double hi = z_max;
      for (int iter = 0; iter < 200 && hi - lo > tol * hi; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (ws.feasible(demand, mid)) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      z_star = hi;
    }

    // Water-filling below z*: find the level w whose lower bounds absorb
    // the demand, then top up plateaus by remaining headroom.
    auto filled = [&](double w) {
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        total += std::min(ws.upper[i], ws.lower(static_cast<int>(i), w));
      }
      return total;
    };
    const double w_min = std::min(tol, 1e-12);
    double w_star = z_star;
    if (filled(w_min) > demand) {
      double lo = w_min;   // filled(lo) >= demand
      double hi = z_star;  // filled(hi) <= demand
      for (int iter = 0; iter < 200 && hi - lo > tol * hi; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (filled(mid) > demand) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      w_star = hi;
    } else {
      w_star = w_min;
    }
    double allocated = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      plan.flows[i] = std::min(ws.upper[i], ws.lower(static_cast<int>(i), w_star));
      allocated += plan.flows[i];
    }
    const double residual = demand - allocated;
    if (residual > 0.0) {
      double headroom = 0.0;
      for (std::size_t i = 0; i < n; ++i) headroom += ws.upper[i] - plan.flows[i];
      for (std::size_t i = 0; i < n; ++i) {
        plan.flows[i] += residual * (ws.upper[i] - plan.flows[i]) / headroom;
      }
    }
    plan.integer_quotas =
        capped_largest_remainder(plan.flows, ws.upper, std::llround(demand));
  }

  double achieved = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double rate = (plan.flows[i] + ws.past[i]) / window;
    achieved = std::max(achieved, sojourn_time(ws.stock[i], rate, rate_floor));
  }
  plan.z_star = achieved;
  return plan;
}

StationFlowState advance_state(const StationFlowState& state, double inflow) {
  if (inflow < 0.0) {
    throw std::invalid_argument("inflow must be nonnegative");
  }
  if (state.in_station < 0.0) {
    throw std::invalid_argument("in-station stock must be nonnegative");
  }
  StationFlowState next = state;
  const double outflow = saturating_outflow(state.params, state.in_station);
  next.in_station = std::max(0.0, state.in_station + inflow - outflow);
  if (!next.inflow_history.empty()) {
    next.inflow_history.pop_back();
    next.inflow_history.insert(next.inflow_history.begin(), inflow);
  }
  return next;
}

std::vector<long long> largest_remainder_round(const std::vector<double>& values,
                                               long long total) {
  const std::size_t n = values.size();
  std::vector<long long> out(n);
  std::vector<double> remainder(n);
  long long assigned = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (values[i] < 0.0) {
      throw std::invalid_argument("values must be nonnegative");
    }
    const double base = std::floor(values[i]);
    out[i] = static_cast<long long>(base);
    remainder[i] = values[i] - base;
    assigned += out[i];
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return remainder[a] > remainder[b];
  });
  long long deficit = total - assigned;
  for (std::size_t pass = 0; deficit > 0; pass = (pass + 1) % n) {
    ++out[order[pass]];
    --deficit;
  }
  return out;
}

}  // namespace evsim
