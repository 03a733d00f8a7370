#pragma once

// Internal angular-window BFS over unfolded faces. Enumerates straight visible
// segments from a cone corner or a surface point, the primitive behind saddle
// connection enumeration and the bounded-radius distance query.

#include <cstddef>
#include <vector>

#include "flatflow/surface.hpp"

namespace flatflow {
namespace internal {

struct VisibleConeHit {
  int endCone = -1;      // index into Surface::coneClassIds
  double angle = 0.0;    // plane angle from the source (global angle for cone sources)
  double length = 0.0;
  Vec2 planePos;
  int endFace = -1;
  int endVertex = -1;
  double phiBwd = 0.0;   // incoming-reverse global angle at the hit cone
};

struct VisiblePointHit {
  double angle = 0.0;
  double length = 0.0;
};

struct UnfoldBudget {
  std::size_t maxStates = 2000000;
  std::size_t used = 0;
};

// Straight visible segments from one corner of a cone class to cone-class
// vertex copies within maxLen. The search frame places the corner's first ray
// at plane angle equal to the corner's offset, so hit angles are global
// direction-circle angles. Collinear occlusion is filtered (no cone points in
// the interior of a reported segment).
std::vector<VisibleConeHit> coneCornerVisibility(const Surface& s, int coneIdx,
                                                 std::size_t cornerPos, double maxLen,
                                                 UnfoldBudget& budget);

// All corners of a cone class, occlusion-filtered jointly.
std::vector<VisibleConeHit> coneVisibility(const Surface& s, int coneIdx, double maxLen,
                                           UnfoldBudget& budget);

struct PointVisibilityResult {
  std::vector<VisibleConeHit> coneHits;
  std::vector<VisiblePointHit> targetHits;  // straight segments to the target point
};

// Straight visible segments from a surface point, optionally collecting
// segments to a designated target point.
PointVisibilityResult pointVisibility(const Surface& s, const SurfacePoint& source,
                                      double maxLen, const SurfacePoint* target,
                                      UnfoldBudget& budget);

// True if p and q name the same surface point (directly, across an edge
// gluing, or as copies of one vertex class).
bool samePoint(const Surface& s, const SurfacePoint& p, const SurfacePoint& q);

}  // namespace internal
}  // namespace flatflow
