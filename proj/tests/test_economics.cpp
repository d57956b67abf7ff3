#include "doctest.h"

#include <cmath>

#include "evsim/economics.hpp"
#include "evsim/rng.hpp"
#include "oracles.hpp"

using namespace evsim;

namespace {

EvRequest make_ev(double soc, double wtp, double pos, double curvature,
                  double anxiety) {
  EvRequest ev;
  ev.soc = soc;
  ev.wtp_cap = wtp;
  ev.position = pos;
  ev.base_curvature = curvature;
  ev.anxiety = anxiety;
  return ev;
}

Station make_station(int index, double price, double location) {
  Station s;
  s.index = index;
  s.price = price;
  s.location = location;
  return s;
}

EvRequest random_ev(SplitRng& rng) {
  return make_ev(rng.uniform(0.0, 1.0), rng.uniform(80.0, 120.0),
                 rng.uniform(0.0, 20.0), rng.uniform(20.0, 120.0),
                 rng.uniform(0.0, 2.0));
}

}  // namespace

TEST_CASE("effective curvature scales with anxiety and empties of charge") {
  CHECK(effective_curvature(make_ev(0.3, 100, 0, 50, 0)) == doctest::Approx(50));
  CHECK(effective_curvature(make_ev(0.5, 100, 0, 50, 1)) == doctest::Approx(75));
  CHECK(effective_curvature(make_ev(1.0, 100, 0, 50, 2)) == doctest::Approx(50));
}

TEST_CASE("optimal charge clamps to the price margin and battery headroom") {
  SUBCASE("price above the cap yields nothing") {
    const ChargeDecision d =
        optimal_charge(make_ev(0.5, 50, 0, 50, 0), make_station(1, 60, 0));
    CHECK(d.amount == 0.0);
    CHECK(d.benefit == 0.0);
  }
  SUBCASE("battery headroom binds") {
    const ChargeDecision d =
        optimal_charge(make_ev(0.5, 100, 0, 50, 0), make_station(1, 60, 0));
    CHECK(d.amount == doctest::Approx(0.5));
    CHECK(d.benefit == doctest::Approx(13.75));
  }
  SUBCASE("interior optimum") {
    const ChargeDecision d =
        optimal_charge(make_ev(0.1, 100, 0, 100, 0), make_station(1, 60, 0));
    CHECK(d.amount == doctest::Approx(0.4));
    CHECK(d.benefit == doctest::Approx(8.0));
  }
}

TEST_CASE("closed form is never beaten by grid search") {
  SplitRng rng(21, "charge_grid");
  for (int trial = 0; trial < 300; ++trial) {
    const EvRequest ev = random_ev(rng);
    const Station station = make_station(1, rng.uniform(40.0, 80.0), 0.0);
    const ChargeDecision d = optimal_charge(ev, station);
    CHECK(d.amount >= 0.0);
    CHECK(d.amount <= 1.0 - ev.soc + 1e-15);
    CHECK(d.benefit >= 0.0);
    const double grid = oracle::best_grid_benefit(ev, station, 1e-4);
    CHECK(grid <= d.benefit + 1e-6);
  }
}

TEST_CASE("benefit is locally concave at an interior optimum") {
  const EvRequest ev = make_ev(0.1, 100, 0, 100, 0);
  const Station station = make_station(1, 60, 0);
  const ChargeDecision d = optimal_charge(ev, station);
  const double curvature = effective_curvature(ev);
  const double margin = ev.wtp_cap - station.price;
  auto phi = [&](double e) { return -0.5 * curvature * e * e + margin * e; };
  for (double delta : {1e-4, -1e-4}) {
    CHECK(phi(d.amount + delta) <= d.benefit + 1e-9);
  }
}

TEST_CASE("charge amount is monotone in prices and caps") {
  SplitRng rng(22, "charge_monotone");
  for (int trial = 0; trial < 200; ++trial) {
    const EvRequest ev = random_ev(rng);
    const double price = rng.uniform(40.0, 80.0);
    const double bump = rng.uniform(0.1, 20.0);
    const double base = optimal_charge(ev, make_station(1, price, 0)).amount;
    CHECK(optimal_charge(ev, make_station(1, price + bump, 0)).amount <= base);
    EvRequest richer = ev;
    richer.wtp_cap += bump;
    CHECK(optimal_charge(richer, make_station(1, price, 0)).amount >= base);
  }
}

TEST_CASE("utility matrix applies distance, reachability, and delay") {
  const std::vector<Station> stations = {make_station(1, 60, 5.0),
                                         make_station(2, 55, 17.0)};
  SUBCASE("at a station the distance term vanishes") {
    const std::vector<EvRequest> evs = {make_ev(0.5, 100, 5.0, 50, 0)};
    const UtilityMatrix m =
        build_utility_matrix(evs, stations, {2.0, 0.0}, {1.0, 3.0, 25.0});
    const ChargeDecision d = optimal_charge(evs[0], stations[0]);
    CHECK(m.entries[0][0].utility == doctest::Approx(d.benefit - 3.0 * 2.0));
    CHECK(m.entries[0][0].feasible);
  }
  SUBCASE("reachability boundary follows range = kappa * soc") {
    // Range 2.5 but the nearest station is 3 away: nothing reachable, so
    // the fallback pins the EV to that nearest station.
    const std::vector<EvRequest> evs = {make_ev(0.1, 100, 8.0, 50, 0)};
    const UtilityMatrix m =
        build_utility_matrix(evs, stations, {0.0, 0.0}, {1.0, 0.0, 25.0});
    CHECK(m.entries[0][0].feasible);
    CHECK_FALSE(m.entries[0][1].feasible);
    CHECK(m.fallback_evs == std::vector<int>{0});
  }
  SUBCASE("reachable pairs carry no fallback") {
    const std::vector<EvRequest> evs = {make_ev(0.5, 100, 8.0, 50, 0)};
    const UtilityMatrix m =
        build_utility_matrix(evs, stations, {0.0, 0.0}, {1.0, 0.0, 25.0});
    CHECK(m.entries[0][0].feasible);
    CHECK(m.fallback_evs.empty());
  }
  SUBCASE("zero delay weight ignores sojourns") {
    const std::vector<EvRequest> evs = {make_ev(0.5, 100, 10.0, 50, 0)};
    const UtilityMatrix a =
        build_utility_matrix(evs, stations, {0.0, 0.0}, {1.0, 0.0, 25.0});
    const UtilityMatrix b =
        build_utility_matrix(evs, stations, {9.0, 4.0}, {1.0, 0.0, 25.0});
    CHECK(a.entries[0][0].utility == b.entries[0][0].utility);
    CHECK(a.entries[0][1].utility == b.entries[0][1].utility);
  }
  SUBCASE("utility falls with distance and sojourn when weighted") {
    const std::vector<EvRequest> evs = {make_ev(0.9, 100, 6.0, 50, 0)};
    const UtilityMatrix m =
        build_utility_matrix(evs, stations, {1.0, 1.0}, {2.0, 1.5, 25.0});
    const ChargeDecision d0 = optimal_charge(evs[0], stations[0]);
    CHECK(m.entries[0][0].utility ==
          doctest::Approx(d0.benefit - 2.0 * 1.0 - 1.5 * 1.0));
  }
}
