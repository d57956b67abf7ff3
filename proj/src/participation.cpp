#include "evsim/participation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "evsim/errors.hpp"

namespace evsim {

namespace {

void check_params(const ParticipationParams& p) {
  if (!(p.network_benefit > 0.0)) {
    throw std::invalid_argument("network benefit A must be positive");
  }
  if (!(p.overhead > 0.0)) {
    throw std::invalid_argument("overhead B must be positive");
  }
  if (p.spillover < 0.0 || p.spillover >= p.network_benefit) {
    throw std::invalid_argument("spillover G must lie in [0, A)");
  }
  if (p.join_cost < 0.0) {
    throw std::invalid_argument("join cost c must be nonnegative");
  }
}

void check_benefit_params(double a, double g, double b) {
  ParticipationParams p;
  p.network_benefit = a;
  p.spillover = g;
  p.overhead = b;
  p.join_cost = 0.0;
  check_params(p);
}

void spot_check_cdf(const std::function<double(double)>& cdf, double v_lo,
                    double v_hi) {
  double prev = -1.0;
  const int samples = 64;
  for (int k = 0; k <= samples; ++k) {
    const double v = v_lo + (v_hi - v_lo) * k / samples;
    const double f = cdf(v);
    if (!(f >= 0.0 && f <= 1.0)) {
      throw InvalidCdfError("cost CDF must map into [0, 1]");
    }
    if (f < prev - 1e-12) {
      throw InvalidCdfError("cost CDF must be nondecreasing");
    }
    prev = f;
  }
  for (double v : {-1e-9, -0.5, -2.0}) {
    if (cdf(v) != 0.0) {
      throw InvalidCdfError("cost CDF must vanish on negative costs");
    }
  }
}

}  // namespace

std::pair<double, double> participation_payoffs(const ParticipationParams& params,
                                                double m) {
  check_params(params);
  if (m < 0.0 || m > 1.0) {
    throw std::invalid_argument("participation rate must lie in [0, 1]");
  }
  const double join = params.network_benefit * m -
                      params.overhead * m * m - params.join_cost;
  const double not_join = params.spillover * m;
  return {join, not_join};
}

ParticipationOutcome sustainable_interval(const ParticipationParams& params) {
  check_params(params);
  const double gap = params.network_benefit - params.spillover;  // A - G > 0
  const double b = params.overhead;
  const double c = params.join_cost;
  ParticipationOutcome outcome;
  outcome.discriminant = gap * gap - 4.0 * b * c;
  if (outcome.discriminant < 0.0) return outcome;

  // Stable quadratic roots: the larger root by the plus form, the smaller
  // via Vieta to avoid cancellation when c is tiny.
  const double sqrt_disc = std::sqrt(outcome.discriminant);
  const double m2 = (gap + sqrt_disc) / (2.0 * b);
  const double m1 = m2 > 0.0 ? c / (b * m2) : 0.0;
  outcome.roots = {m1, m2};

  const double lo = std::max(m1, 0.0);
  const double hi = std::min(m2, 1.0);
  if (lo <= hi) outcome.sustainable = {lo, hi};
  return outcome;
}

std::vector<AdoptionFixedPoint> heterogeneous_fixed_points(
    double network_benefit, double spillover, double overhead,
    const std::function<double(double)>& cost_cdf, int grid_points) {
  check_benefit_params(network_benefit, spillover, overhead);
  if (grid_points < 2) {
    throw std::invalid_argument("grid must have at least 2 points");
  }
  const double gap = network_benefit - spillover;
  auto benefit = [&](double m) { return gap * m - overhead * m * m; };

  // Spot-check the CDF over the benefit range seen on [0, 1].
  double v_lo = 0.0, v_hi = 0.0;
  for (int k = 0; k <= 32; ++k) {
    const double v = benefit(k / 32.0);
    v_lo = std::min(v_lo, v);
    v_hi = std::max(v_hi, v);
  }
  spot_check_cdf(cost_cdf, v_lo, v_hi + 1.0);

  auto gap_fn = [&](double m) { return m - cost_cdf(benefit(m)); };

  std::vector<double> found;
  double prev_m = 0.0;
  double prev_h = gap_fn(0.0);
  if (std::abs(prev_h) < 1e-12) found.push_back(0.0);
  for (int j = 1; j <= grid_points; ++j) {
    const double m = static_cast<double>(j) / grid_points;
    const double h = gap_fn(m);
    if (std::abs(h) < 1e-12) {
      found.push_back(m);
    } else if (prev_h * h < 0.0) {
      // Bisection also converges onto jump points of discontinuous CDFs,
      // which is exactly the threshold location wanted there.
      double lo = prev_m, hi = m;
      double h_lo = prev_h;
      for (int iter = 0; iter < 100 && hi - lo > 1e-10; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double h_mid = gap_fn(mid);
        if (h_mid == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((h_lo < 0.0) == (h_mid < 0.0)) {
          lo = mid;
          h_lo = h_mid;
        } else {
          hi = mid;
        }
      }
      found.push_back(0.5 * (lo + hi));
    }
    prev_m = m;
    prev_h = h;
  }

  std::sort(found.begin(), found.end());
  found.erase(std::unique(found.begin(), found.end(),
                          [](double a, double b) { return b - a < 1e-9; }),
              found.end());

  std::vector<AdoptionFixedPoint> out;
  const double step = 1e-5;
  for (double m : found) {
    const double slope =
        (cost_cdf(benefit(m + step)) - cost_cdf(benefit(m - step))) /
        (2.0 * step);
    out.push_back({m, slope < 1.0});
  }
  return out;
}

}  // namespace evsim
