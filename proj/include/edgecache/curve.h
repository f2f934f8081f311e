#ifndef EDGECACHE_CURVE_H_
#define EDGECACHE_CURVE_H_

#include "edgecache/analytics.h"
#include "edgecache/demand.h"
#include "edgecache/policy.h"

namespace edgecache {

enum class OverhearingMode { kTimeDriven, kEventDriven };

// Which item policies a curve may draw from.
enum class PolicyFamily {
  kCachingAndOverhearing,  // overhearing curve, then randomization toward pi^c(inf)
  kCachingOnly,            // randomization of pi^c(inf) and "never cache": h = r
  kOverhearingOnly,        // overhearing curve, flat once overhearing is saturated
};

// Best achievable hit ratio of one item as a function of its occupancy r,
// together with the policy that realizes each point. Concave and
// nondecreasing on [0, 1] with h(0) = 0.
//
// Time-driven: the pi^o(omega) curve (linear with slope beta*s+1 while
// omega >= s, then strictly concave down to omega = 0 at the breakpoint
// r^co(0,0)), followed by the chord to (1, 1).
// Event-driven: slope beta*s+1 up to the breakpoint (the occupancy of
// pi^o(s), usually estimated by simulation), then the chord to (1, 1).
class OccupancyCurve {
 public:
  // lambda = 0 gives a curve without an overhearing segment.
  static OccupancyCurve time_driven(const DemandProfile& profile, double lambda,
                                    PolicyFamily family = PolicyFamily::kCachingAndOverhearing);
  // `breakpoint` is clipped to [0, 1/(beta*s+1)].
  static OccupancyCurve event_driven(const DemandProfile& profile, double breakpoint,
                                     PolicyFamily family = PolicyFamily::kCachingAndOverhearing);
  // Event-driven curve at the idealized breakpoint 1/(beta*s+1).
  static OccupancyCurve event_driven(const DemandProfile& profile);

  OverhearingMode mode() const { return mode_; }
  PolicyFamily family() const { return family_; }
  const DemandProfile& profile() const { return profile_; }
  double lambda() const { return lambda_; }

  // End of the overhearing segment and its hit ratio.
  double breakpoint() const { return r_break_; }
  double hit_at_breakpoint() const { return h_break_; }
  // Largest occupancy with positive marginal gain (r_b for overhearing-only).
  double max_useful_occupancy() const;

  double hit(double r) const;

  // Measure of {r : marginal hit gain at r >= slope}; the occupancy a
  // water-filling level `slope` would grant this item. Nonincreasing.
  double occupancy_at_slope(double slope) const;

  // Item policy whose (occupancy, hit) lands on this curve at r.
  ItemPolicy policy_for(double r) const;

  // Time-driven only: deaf TTL of pi^o(omega) with occupancy r, for r in
  // (0, breakpoint]. Bisection on [0, s] (tolerance 1e-9 on r), closed form
  // on the omega >= s tail.
  double invert_overhearing(double r) const;

 private:
  OccupancyCurve() = default;

  double chord_slope() const;

  OverhearingMode mode_ = OverhearingMode::kTimeDriven;
  PolicyFamily family_ = PolicyFamily::kCachingAndOverhearing;
  DemandProfile profile_;
  double lambda_ = 0.0;
  double slope_ = 1.0;    // beta*s + 1
  double r_linear_ = 0.0; // end of the linear part (r^co(0, s) for time-driven)
  double r_break_ = 0.0;
  double h_break_ = 0.0;
};

}  // namespace edgecache

#endif  // EDGECACHE_CURVE_H_
