#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "flatflow/surface.hpp"

namespace flatflow {

// What to do when a trace runs into a cone point.
struct ConePolicy {
  enum class Kind { Stop, TurnPlusPi, TurnMinusPi, Bisect, Explicit };
  Kind kind = Kind::Stop;
  std::vector<double> angles;  // consumed in order under Explicit

  static ConePolicy stop() { return {Kind::Stop, {}}; }
  static ConePolicy turnPlusPi() { return {Kind::TurnPlusPi, {}}; }
  static ConePolicy turnMinusPi() { return {Kind::TurnMinusPi, {}}; }
  static ConePolicy bisect() { return {Kind::Bisect, {}}; }
  static ConePolicy explicitAngles(std::vector<double> a) { return {Kind::Explicit, std::move(a)}; }
};

struct SubSegment {
  int face = -1;
  Isometry chart;  // polygon frame -> trace plane
  Vec2 planeA, planeB;
  double tA = 0.0, tB = 0.0;
};

struct ConeEvent {
  double t = 0.0;
  int coneIdx = -1;        // index into Surface::coneClassIds
  double left = 0.0;       // side angle on the counterclockwise side of travel
  double right = 0.0;
  double theta = 0.0;      // +left if left <= right else -right
  double phiBwd = 0.0;     // global angle of the incoming-reverse ray
  double phiOut = 0.0;     // global angle of the outgoing ray
};

struct EdgeCrossing {
  double t = 0.0;
  int polygonEdge = -1;  // original edge index crossed (gluing crossings only)
};

struct TraceStart {
  std::string polygon;
  Vec2 point;
  double direction = 0.0;  // angle in the polygon's local frame
};

class GeodesicPath {
 public:
  const Surface* surface = nullptr;
  double t0 = 0.0, t1 = 0.0;
  std::vector<SubSegment> segments;
  std::vector<ConeEvent> events;
  std::vector<EdgeCrossing> crossings;
  bool truncated = false;                 // stopped early at a cone point
  std::optional<double> coneHitTime;
  int coneHitCone = -1;                   // cone index of the terminal hit
  double coneHitPhiBwd = 0.0;             // incoming-reverse global angle there

  double length() const { return t1 - t0; }

  struct PointOnPath {
    int face = -1;
    Isometry chart;
    Vec2 plane;
  };
  // Position at parameter t (must lie in [t0, t1]).
  PointOnPath pointAt(double t) const;
  // All chart representations of the position at t (two at chart boundaries).
  std::vector<PointOnPath> chartsAt(double t, double eps = 1e-9) const;
  int polygonAt(double t) const;
  // Unit direction in the trace plane at parameter t.
  Vec2 planeDirectionAt(double t) const;
};

struct TraceResult {
  GeodesicPath path;
};

// Unit-speed geodesic trace. Throws InvalidArgumentError (DegenerateStart,
// InvalidTurn) and BudgetError. Under Stop the returned path is truncated at
// the first cone hit with coneHitTime set.
TraceResult trace(const Surface& s, const TraceStart& start, double length,
                  const ConePolicy& policy, std::size_t stepBudget = 1u << 22);

// Trace leaving a cone point in the direction with global angle phi on the
// cone class's direction circle. Used to realize saddle connections and to
// extend singular segments.
TraceResult traceFromCone(const Surface& s, int coneIdx, double phi, double length,
                          const ConePolicy& policy, std::size_t stepBudget = 1u << 22);

// Projection of the cone events: (time, signed turning angle) pairs.
std::vector<std::pair<double, double>> turningSignature(const GeodesicPath& p);

struct WindowClass {
  bool regular = false;
  double witnessTime = 0.0;  // first event with |theta| > pi + tol, if regular
};
WindowClass classifyWindow(const GeodesicPath& p, double tolAngle = 1e-9);

// Reparametrize: result(u) = p(u + s).
GeodesicPath flowShift(const GeodesicPath& p, double s);

struct GsDistanceBound {
  double bound = 0.0;  // quadrature of planar distance * exp(-2|t|) over [-T, T]
  double tail = 0.0;   // diameter * exp(-2T)
  double total() const { return bound + tail; }
};

// Upper bound for the exponentially weighted geodesic-space distance, using a
// single pair of lifts in a shared developing corridor. Throws
// NotComparableError when the corridor estimate does not apply.
GsDistanceBound gsDistanceUpper(const GeodesicPath& p1, const GeodesicPath& p2, double T,
                                double quadratureTol = 1e-6);

}  // namespace flatflow
