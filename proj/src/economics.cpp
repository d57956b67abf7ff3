#include "evsim/economics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace evsim {

namespace {

void check_ev(const EvRequest& ev) {
  if (ev.soc < 0.0 || ev.soc > 1.0) {
    throw std::invalid_argument("state of charge must lie in [0, 1]");
  }
  if (!(ev.base_curvature > 0.0)) {
    throw std::invalid_argument("base curvature must be positive");
  }
  if (ev.anxiety < 0.0) {
    throw std::invalid_argument("anxiety must be nonnegative");
  }
}

}  // namespace

double effective_curvature(const EvRequest& ev) {
  check_ev(ev);
  return ev.base_curvature * (1.0 + ev.anxiety * (1.0 - ev.soc));
}

ChargeDecision optimal_charge(const EvRequest& ev, const Station& station) {
  const double curvature = effective_curvature(ev);
  const double margin = ev.wtp_cap - station.price;
  const double headroom = 1.0 - ev.soc;
  const double amount = std::clamp(margin / curvature, 0.0, headroom);
  ChargeDecision decision;
  decision.amount = amount;
  decision.benefit = -0.5 * curvature * amount * amount + margin * amount;
  return decision;
}

UtilityMatrix build_utility_matrix(const std::vector<EvRequest>& evs,
                                   const std::vector<Station>& stations,
                                   const std::vector<double>& sojourns,
                                   const Weights& weights) {
  if (stations.empty()) {
    throw std::invalid_argument("at least one station required");
  }
  if (sojourns.size() != stations.size()) {
    throw std::invalid_argument("one sojourn value required per station");
  }
  UtilityMatrix matrix;
  matrix.weights = weights;
  matrix.num_stations = static_cast<int>(stations.size());
  matrix.entries.reserve(evs.size());
  for (std::size_t n = 0; n < evs.size(); ++n) {
    const EvRequest& ev = evs[n];
    const double range = weights.kappa * ev.soc;
    std::vector<PairEntry> row(stations.size());
    bool any_feasible = false;
    int nearest = 0;
    for (std::size_t i = 0; i < stations.size(); ++i) {
      const Station& station = stations[i];
      PairEntry& entry = row[i];
      entry.distance = std::abs(ev.position - station.location);
      const ChargeDecision decision = optimal_charge(ev, station);
      entry.charge = decision.amount;
      entry.utility = decision.benefit - weights.tau * entry.distance -
                      weights.eta * sojourns[i];
      entry.feasible = entry.distance <= range;
      any_feasible = any_feasible || entry.feasible;
      if (entry.distance < row[nearest].distance) nearest = static_cast<int>(i);
    }
    if (!any_feasible) {
      // Out-of-range EV: pin it to the nearest station and surface the
      // violation instead of dropping the request.
      row[nearest].feasible = true;
      matrix.fallback_evs.push_back(static_cast<int>(n));
    }
    matrix.entries.push_back(std::move(row));
  }
  return matrix;
}

}  // namespace evsim
