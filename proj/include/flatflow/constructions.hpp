#pragma once

// Constructive shadowing machinery: endpoint normalization of good segments to
// saddle-connection paths, connectors with tunable length, gluing of segments
// into one closed geodesic, and periodic approximation.

#include <optional>
#include <string>
#include <vector>

#include "flatflow/hyperbolicity.hpp"
#include "flatflow/saddle.hpp"

namespace flatflow {

// floor(4*pi / minExcess) + 3: size of a direction fan at a cone point that
// always contains an admissible continuation.
int fanBound(const Surface& s);

struct DeltaDenseResult {
  long long m1 = 0;
  long long m2 = 0;
  long long C = 0;   // smallest integer > y/(x-y) + 2
  double minTau = 0; // max(C*y, 1)
};

// Positive integers with tau + n*d <= m1*x + m2*y <= tau + (n+1)*d for
// d = x - y. Throws InvalidArgumentError("TauTooSmall ...") when tau < max(Cy, 1).
DeltaDenseResult deltaDenseCoeffs(double x, double y, double tau, long long n);

// Exact integer-scaled variant: x = px/q, y = py/q, tau = ptau/q.
DeltaDenseResult deltaDenseCoeffsExact(long long px, long long py, long long ptau, long long q,
                                       long long n);

// Two closed-geodesic classes with period gap in (0, delta), scanning the
// enumeration up to maxPeriod. Throws NotFoundError when the budget is too
// small.
std::pair<ClosedGeodesicRecord, ClosedGeodesicRecord> similarLengthPair(const ConcatGraph& g,
                                                                        double delta,
                                                                        double maxPeriod);

struct TunedPath {
  std::vector<int> word;
  double length = 0.0;
  double baseLength = 0.0;
  long long loopsA = 0;  // times around the longer of the two loop classes
  long long loopsB = 0;
};

// Admissible path from `from` to `to` (inclusive) with total length in
// [targetLen, targetLen + window], built from a base connector through both
// loop classes plus loop insertions. Throws NotFoundError("Infeasible ...")
// with the certified threshold when targetLen is too small, or when window is
// below the pair's period gap.
TunedPath tuneConnector(const ConcatGraph& g, int from, int to, double targetLen, double window,
                        const ClosedGeodesicRecord& loopA, const ClosedGeodesicRecord& loopB,
                        double connectorBudget = 64.0);

// A good orbit segment specified on a closed geodesic: window [a, a + len].
struct GoodSegment {
  ClosedGeodesicRecord record;
  double a = 0.0;
  double len = 0.0;
};

struct SaddleExtension {
  std::vector<int> word;   // saddle-connection path containing the window
  double e1 = 0.0;         // word start time on the record's clock
  double e2 = 0.0;         // word end time
  double s0 = 0.0;         // a - e1: the window starts this far into the word
  double supEstimate = 0.0;  // exp(-2 * margin) end-decay bound
};

// Trim/extend the segment to excess-turn cone events at least
// max(0, -ln(delta)/2) before and after the window, so any geodesic containing
// the word delta-shadows the segment. Throws InvalidArgumentError("NotInG...")
// when the segment fails the good-segment test.
SaddleExtension extendToSaddlePath(const ConcatGraph& g, const GoodSegment& seg, double delta,
                                   const HyperbolicityConfig& cfg);

enum class SpecificationMode { Weak, Strong };

struct ShadowedWindow {
  double start = 0.0;        // segment window start on the produced clock
  double copyStart = 0.0;    // exactly-copied interval on the produced clock
  double copyEnd = 0.0;
  double supEstimate = 0.0;  // end-decay shadowing bound for this segment
  double transition = 0.0;   // gap to the next segment's window
};

struct ShadowingReport {
  ClosedGeodesicRecord produced;
  std::vector<ShadowedWindow> segments;
  double deltaAchieved = 0.0;
  double commonTransition = 0.0;  // strong mode: all transitions in
                                  // [commonTransition, commonTransition + delta/4]
  SpecificationMode mode = SpecificationMode::Weak;
};

// One closed geodesic visiting saddle-path versions of all segments in order.
// Strong mode equalizes transition times within delta/4 via tuned connectors;
// weak mode uses shortest connectors.
ShadowingReport glueSegments(const ConcatGraph& g, const std::vector<GoodSegment>& segments,
                             double delta, SpecificationMode mode,
                             const HyperbolicityConfig& cfg);

struct PeriodicApproximation {
  ClosedGeodesicRecord closed;
  double periodWindowLo = 0.0;  // period certified inside [lo, hi]
  double periodWindowHi = 0.0;
  double tPrime = 0.0;          // empirically achieved T': window is
                                // [len + tPrime - delta, len + tPrime]
  ShadowingReport report;
};

// Regular closed geodesic containing the segment's middle interval verbatim,
// with period in [len + T' - delta, len + T'] for the reported T'.
PeriodicApproximation periodicApproximation(const ConcatGraph& g, const GoodSegment& seg,
                                            double delta, const HyperbolicityConfig& cfg);

}  // namespace flatflow
