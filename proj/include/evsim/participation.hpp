#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace evsim {

// Reduced-form adoption parameters: network benefit A, nonparticipant
// spillover G in [0, A), convex overhead B, and per-user join cost c.
struct ParticipationParams {
  double network_benefit = 1.0;  // A
  double spillover = 0.0;        // G
  double overhead = 1.0;         // B
  double join_cost = 0.0;        // c
};

// (join, not-join) payoffs at participation rate m:
// (A m - B m^2 - c, G m).
std::pair<double, double> participation_payoffs(const ParticipationParams& params,
                                                double m);

struct ParticipationOutcome {
  double discriminant = 0.0;
  std::optional<std::pair<double, double>> roots;        // m1 <= m2
  std::optional<std::pair<double, double>> sustainable;  // within [0, 1]
};

// Roots of (A-G)m - Bm^2 - c = 0 and the participation interval where
// joining is individually rational, clipped to [0, 1]. A negative
// discriminant yields no roots and an empty interval.
ParticipationOutcome sustainable_interval(const ParticipationParams& params);

struct AdoptionFixedPoint {
  double participation = 0.0;
  bool stable = false;  // best-response map slope < 1 at the point
};

// Fixed points of m = F_C((A-G)m - Bm^2) for a heterogeneous join-cost
// CDF F_C: uniform grid scan for sign changes, bisection refinement to
// 1e-10. The CDF must be nondecreasing, map into [0, 1], and vanish on
// negatives; spot-check failures raise InvalidCdfError.
std::vector<AdoptionFixedPoint> heterogeneous_fixed_points(
    double network_benefit, double spillover, double overhead,
    const std::function<double(double)>& cost_cdf, int grid_points = 10000);

}  // namespace evsim
