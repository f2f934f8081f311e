#include "edgecache/curve.h"

#include <algorithm>
#include <cmath>

#include "edgecache/error.h"

namespace edgecache {
namespace {

constexpr double kPointTol = 1e-12;
constexpr int kMaxBisection = 200;

}  // namespace

OccupancyCurve OccupancyCurve::time_driven(const DemandProfile& profile, double lambda,
                                           PolicyFamily family) {
  if (!profile.recurrent()) throw ModelError("occupancy curve needs a finite OFF period");
  if (!(lambda >= 0.0)) throw ModelError("overhearing rate must be nonnegative");
  OccupancyCurve c;
  c.mode_ = OverhearingMode::kTimeDriven;
  c.family_ = family;
  c.profile_ = profile;
  c.lambda_ = lambda;
  c.slope_ = profile.overhear_slope();
  if (family != PolicyFamily::kCachingOnly && lambda >= kMinOverhearRate) {
    c.r_linear_ = occupancy_co(profile, lambda, PolicyParams{0.0, profile.s});
    const HitOccupancy top = evaluate_co(profile, lambda, PolicyParams{0.0, 0.0});
    c.r_break_ = top.occupancy;
    c.h_break_ = top.hit;
  }
  return c;
}

OccupancyCurve OccupancyCurve::event_driven(const DemandProfile& profile, double breakpoint,
                                            PolicyFamily family) {
  if (!profile.recurrent()) throw ModelError("occupancy curve needs a finite OFF period");
  if (!(breakpoint >= 0.0)) throw ModelError("event-driven breakpoint must be nonnegative");
  OccupancyCurve c;
  c.mode_ = OverhearingMode::kEventDriven;
  c.family_ = family;
  c.profile_ = profile;
  c.slope_ = profile.overhear_slope();
  if (family != PolicyFamily::kCachingOnly) {
    c.r_break_ = std::min(breakpoint, 1.0 / c.slope_);
    c.r_linear_ = c.r_break_;
    c.h_break_ = std::min(1.0, c.slope_ * c.r_break_);
  }
  return c;
}

OccupancyCurve OccupancyCurve::event_driven(const DemandProfile& profile) {
  return event_driven(profile, 1.0 / profile.overhear_slope());
}

double OccupancyCurve::chord_slope() const {
  if (r_break_ >= 1.0) return 0.0;
  return std::max(0.0, (1.0 - h_break_) / (1.0 - r_break_));
}

double OccupancyCurve::max_useful_occupancy() const {
  return family_ == PolicyFamily::kOverhearingOnly ? r_break_ : 1.0;
}

double OccupancyCurve::hit(double r) const {
  r = std::clamp(r, 0.0, 1.0);
  if (r <= r_linear_) return slope_ * r;
  if (r <= r_break_) {
    return hit_ratio_co(profile_, lambda_, PolicyParams{0.0, invert_overhearing(r)});
  }
  if (family_ == PolicyFamily::kOverhearingOnly) return h_break_;
  return std::min(1.0, h_break_ + (r - r_break_) * chord_slope());
}

double OccupancyCurve::occupancy_at_slope(double slope) const {
  if (slope <= 0.0) return max_useful_occupancy();
  if (family_ != PolicyFamily::kOverhearingOnly && r_break_ < 1.0 && slope <= chord_slope()) return 1.0;
  if (r_break_ <= 0.0 || slope > slope_) return 0.0;
  if (r_linear_ >= r_break_) return r_break_;
  // Strictly concave part (time-driven, omega in [0, s)). With
  // u = exp(-lambda (s - omega)) the marginal gain is
  // E[X] lambda beta u / (lambda + beta - beta u); solve it for u.
  const double lambda = lambda_;
  const double beta = profile_.beta;
  const double mean = profile_.mean_gap();
  const double u_min = std::exp(-lambda * profile_.s);
  const double slope_at_break = mean * lambda * beta * u_min / (lambda + beta - beta * u_min);
  if (slope <= slope_at_break) return r_break_;
  const double u = slope * (lambda + beta) / (beta * (mean * lambda + slope));
  if (u >= 1.0) return r_linear_;
  const double omega = std::clamp(profile_.s + std::log(u) / lambda, 0.0, profile_.s);
  return std::clamp(occupancy_co(profile_, lambda, PolicyParams{0.0, omega}), r_linear_, r_break_);
}

double OccupancyCurve::invert_overhearing(double r) const {
  if (mode_ != OverhearingMode::kTimeDriven) {
    throw ModelError("event-driven overhearing occupancy has no closed-form inverse");
  }
  if (r <= 0.0) return kInfinity;
  if (r >= r_break_) return 0.0;
  // omega >= s: r = r_linear * exp(-beta (omega - s)).
  if (r <= r_linear_) return profile_.s + std::log(r_linear_ / r) / profile_.beta;
  double lo = 0.0;           // occupancy(lo) >= r
  double hi = profile_.s;    // occupancy(hi) <= r
  for (int it = 0; it < kMaxBisection && hi - lo > 1e-15 * std::max(1.0, profile_.s); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (occupancy_co(profile_, lambda_, PolicyParams{0.0, mid}) >= r) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

ItemPolicy OccupancyCurve::policy_for(double r) const {
  if (r <= kPointTol) return never_cache();
  if (family_ == PolicyFamily::kCachingOnly) {
    if (r >= 1.0 - kPointTol) return always_cache();
    return mixture(r, PolicyParams{kInfinity, kInfinity}, PolicyParams{0.0, kInfinity});
  }
  const double omega_break = mode_ == OverhearingMode::kTimeDriven ? 0.0 : profile_.s;
  if (r <= r_break_ + kPointTol) {
    if (mode_ == OverhearingMode::kTimeDriven) return overhear_only(invert_overhearing(r));
    if (r >= r_break_ - kPointTol) return overhear_only(profile_.s);
    // pi^o(omega > s) is not tractable here; an equal-occupancy mixture of
    // pi^o(s) and "never cache" lies on the same linear segment.
    return mixture(r / r_break_, PolicyParams{0.0, profile_.s}, PolicyParams{0.0, kInfinity});
  }
  const PolicyParams at_break =
      r_break_ > 0.0 ? PolicyParams{0.0, omega_break} : PolicyParams{0.0, kInfinity};
  if (family_ == PolicyFamily::kOverhearingOnly) return CoPolicy{at_break};
  if (r >= 1.0 - kPointTol) return always_cache();
  const double q = (r - r_break_) / (1.0 - r_break_);
  return mixture(q, PolicyParams{kInfinity, kInfinity}, at_break);
}

}  // namespace edgecache
