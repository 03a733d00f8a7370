#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "flatflow/surface.hpp"
#include "flatflow/tracer.hpp"

namespace flatflow {

// Directed geodesic segment between cone points with no cone point inside.
struct SaddleConnection {
  int id = -1;
  int startCone = -1;
  int endCone = -1;
  double phiOut = 0.0;   // outgoing direction on the start class's circle
  double phiBwd = 0.0;   // incoming-reverse direction on the end class's circle
  double length = 0.0;
  Vec2 holonomy;         // vector in the start corner's frame (first ray at angle 0)
  int reverseId = -1;
  std::vector<double> polygonOccupancy;  // length inside each original polygon
};

struct EnumerationOptions {
  std::size_t chartBudget = 4000000;
  int threads = 1;  // shards the per-corner searches; output is schedule-independent
};

// All directed saddle connections of length <= maxLen, deduplicated and sorted
// by (length, startCone, phiOut). Throws BudgetError on WorkLimitExceeded.
std::vector<SaddleConnection> enumerateSaddleConnections(const Surface& s, double maxLen,
                                                         const EnumerationOptions& opts = {});

// Shortest saddle connection length, found by doubling the search radius.
double shortestSaddleConnection(const Surface& s, const EnumerationOptions& opts = {});

struct JointAngles {
  double left = 0.0;
  double right = 0.0;
  double theta = 0.0;
  bool singular = false;  // |theta| <= pi + tol
};

// Joint angles when sc1 is followed by sc2 (sc1.endCone == sc2.startCone).
// Present iff both side angles are at least pi (inclusive). Throws
// InvalidArgumentError on a cone-class mismatch.
std::optional<JointAngles> admissibleConcatenation(const Surface& s, const SaddleConnection& sc1,
                                                   const SaddleConnection& sc2);

struct ConcatGraph {
  const Surface* surface = nullptr;
  double maxLen = 0.0;
  std::vector<SaddleConnection> nodes;
  // adjacency[i] = admissible successors of node i.
  struct Edge {
    int to = -1;
    JointAngles joint;
  };
  std::vector<std::vector<Edge>> adjacency;

  std::optional<JointAngles> jointBetween(int from, int to) const;
};

ConcatGraph buildConcatGraph(const Surface& s, double maxLen, const EnumerationOptions& opts = {});

enum class GeodesicClassFilter { All, Regular, Singular };

// Closed geodesic as a cyclic admissible word of saddle connections.
struct ClosedGeodesicRecord {
  std::vector<int> word;     // node ids, lexicographically minimal rotation
  double period = 0.0;
  bool singular = false;
  std::vector<double> jointThetas;    // theta at the joint entering word[i]
  std::vector<double> eventTimes;     // time of the cone event entering word[i]
  std::vector<double> polygonOccupancy;

  std::string canonicalKey() const;
};

struct CycleEnumerationOptions {
  std::size_t maxSteps = 400000000;   // DFS step guard
  std::size_t maxClasses = 100000000; // emitted class guard
};

// Allocation-free view of one closed-geodesic class during streaming.
struct WalkView {
  const int* word = nullptr;        // node ids (rotation starting at the minimal id)
  std::size_t length = 0;
  const double* eventTimes = nullptr;   // time of the cone event entering word[i]
  const double* jointThetas = nullptr;  // theta at that event
  double period = 0.0;
  bool singular = false;
  const double* occupancy = nullptr;    // per original polygon
  std::size_t polygonCount = 0;
};

// Streams every closed-walk class of period <= maxPeriod (one representative
// per time-shift equivalence class, oriented), deterministically. The view is
// only valid inside the callback. Throws BudgetError on WorkLimitExceeded.
void enumerateClosedWalks(const ConcatGraph& g, double maxPeriod,
                          const std::function<void(const WalkView&)>& visit,
                          const CycleEnumerationOptions& opts = {});

// Record-building variant with a class filter.
void enumerateClosedGeodesics(const ConcatGraph& g, double maxPeriod, GeodesicClassFilter filter,
                              const std::function<void(const ClosedGeodesicRecord&)>& emit,
                              const CycleEnumerationOptions& opts = {});

// Convenience collector.
std::vector<ClosedGeodesicRecord> collectClosedGeodesics(const ConcatGraph& g, double maxPeriod,
                                                         GeodesicClassFilter filter,
                                                         const CycleEnumerationOptions& opts = {});

// Shortest admissible path in g from node `from` to node `to` (inclusive of
// both), with total length <= maxLen. std::nullopt if none within the bound.
std::optional<std::vector<int>> connect(const ConcatGraph& g, int from, int to, double maxLen);

double pathLength(const ConcatGraph& g, const std::vector<int>& word);

// Materialize the closed geodesic as a traced path covering [t0, t1] (in the
// record's own clock: the event entering word[0] happens at time 0).
GeodesicPath materializeClosedGeodesic(const ConcatGraph& g, const ClosedGeodesicRecord& rec,
                                       double t0, double t1);

// Locate a record by canonical key (re-enumerates up to maxPeriod).
std::optional<ClosedGeodesicRecord> findClosedGeodesic(const ConcatGraph& g,
                                                       const std::string& canonicalKey,
                                                       double maxPeriod);

}  // namespace flatflow
