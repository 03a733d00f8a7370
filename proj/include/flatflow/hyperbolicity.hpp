#pragma once

// The turning-based hyperbolicity meter along geodesics and the orbit
// decomposition it induces: segments whose running averages stay above a
// threshold are "good", the rest form the prefix/suffix class.

#include <optional>
#include <vector>

#include "flatflow/saddle.hpp"
#include "flatflow/tracer.hpp"

namespace flatflow {

struct HyperbolicityConfig {
  double scale = 0.0;      // s; requires 2*scale < shortest saddle connection
  double threshold = 0.0;  // eta

  static HyperbolicityConfig defaults(double shortestSaddle, double maxExcess) {
    HyperbolicityConfig c;
    c.scale = 0.49 * shortestSaddle;
    c.threshold = 0.05 * maxExcess / (2.0 * c.scale);
    return c;
  }
};

struct TurnEvent {
  double t = 0.0;
  double theta = 0.0;

  double excess() const;  // |theta| - pi, clamped at 0
};

// Cone-event timeline of a geodesic: either a finite traced window or a
// periodic orbit. Only strictly excess turns matter for the meter.
class TurnTimeline {
 public:
  static TurnTimeline window(double a, double b, std::vector<TurnEvent> events);
  static TurnTimeline periodic(double period, std::vector<TurnEvent> events);

  static TurnTimeline fromPath(const GeodesicPath& p);
  static TurnTimeline fromClosedGeodesic(const ConcatGraph& g, const ClosedGeodesicRecord& rec);

  bool isPeriodic() const { return periodic_; }
  double period() const { return period_; }
  double windowStart() const { return a_; }
  double windowEnd() const { return b_; }

  // Excess events only (|theta| > pi + tol), sorted by time.
  const std::vector<TurnEvent>& excessEvents() const { return excess_; }

  // First excess event at time >= t; unbounded via periodicity. Throws
  // HorizonError on a window whose future is not certified. nullopt when the
  // timeline certifies that no excess event ever occurs.
  std::optional<TurnEvent> nextExcess(double t) const;
  // Most recent excess event at time <= t (mirror).
  std::optional<TurnEvent> prevExcess(double t) const;

 private:
  bool periodic_ = false;
  double period_ = 0.0;
  double a_ = 0.0, b_ = 0.0;
  std::vector<TurnEvent> excess_;
  double tolAngle_ = 1e-9;
};

// Forward meter: (|theta(c)| - pi) / max(scale, c - t) at the first excess
// turn c >= t; 0 when the timeline certifies none.
double hyperbolicityForward(const TurnTimeline& tl, double t, const HyperbolicityConfig& cfg);
// Backward mirror.
double hyperbolicityBackward(const TurnTimeline& tl, double t, const HyperbolicityConfig& cfg);
// Case split: the backward value within `scale` after an excess turn, the
// forward value within `scale` before one, else the minimum of the two.
double hyperbolicity(const TurnTimeline& tl, double t, const HyperbolicityConfig& cfg);

// Exact integral of the meter over [from, to] (piecewise-analytic profile).
double hyperbolicityIntegral(const TurnTimeline& tl, double from, double to,
                             const HyperbolicityConfig& cfg);

// True iff every initial and terminal average of the meter over [t0, t0+len]
// is at least cfg.threshold. Certified on the exact profile, not sampled.
bool isGoodSegment(const TurnTimeline& tl, double t0, double len, const HyperbolicityConfig& cfg);

// Average over the whole segment below threshold (the prefix/suffix class).
bool isBadSegment(const TurnTimeline& tl, double t0, double len, const HyperbolicityConfig& cfg);

struct OrbitDecomposition {
  double prefixEnd = 0.0;    // p: [t0, t0+p] is the maximal prefix in the bad class
  double suffixStart = 0.0;  // q: [t0+q, t0+len] symmetric from the right
  double length = 0.0;
};

// (bad, good, bad) decomposition of [t0, t0+len].
OrbitDecomposition decompose(const TurnTimeline& tl, double t0, double len,
                             const HyperbolicityConfig& cfg);

// Membership in the regular sub-level family: hyperbolicity(t) >= threshold.
bool meetsThreshold(const TurnTimeline& tl, double t, const HyperbolicityConfig& cfg);

// Emits a warning string when the threshold exceeds the regime the shadowing
// propositions ask for (minExcess / (2 * scale)); empty when fine.
std::string thresholdRegimeWarning(const Surface& s, const HyperbolicityConfig& cfg);

}  // namespace flatflow
