#pragma once

// Internal face-marching primitives shared by the tracer and the metric
// corridor validator.

#include "flatflow/surface.hpp"

namespace flatflow {
namespace internal {

struct MarchState {
  int face = -1;
  Isometry chart;  // polygon frame -> working plane
  Vec2 pos;        // plane coords
  Vec2 dir;        // plane coords, unit
  int entryEdge = -1;
};

struct FaceStep {
  enum class Kind { Exit, Vertex, Finish };
  Kind kind = Kind::Finish;
  double t = 0.0;   // distance along the ray
  int edge = -1;    // Exit
  int vertex = -1;  // Vertex
  Vec2 hit;         // plane point of the boundary hit
};

// Advance within the (convex) current face: first cone/flat vertex hit within
// tolGeom of the ray wins over the edge exit; a remaining length smaller than
// both finishes inside the face.
FaceStep stepInFace(const Surface& s, const MarchState& st, double remaining, double tolGeom);

// Cross a face edge in place (position and direction unchanged).
void crossEdge(const Surface& s, MarchState& st, int edge);

// Helpers on a vertex class's direction circle (works for flat classes too).
double classGlobalAngle(const Surface& s, const VertexClass& cls, const CornerRef& corner,
                        double u);
void classResolveDirection(const Surface& s, const VertexClass& cls, double phi,
                           CornerRef& corner, double& u);

// Continue a march through a vertex hit with turning angle theta. Computes the
// continuation chart so the drawn bend in the plane is pi - theta.
// `vertexPlane` is the developed hit point and `incomingDir` the unit incoming
// direction; (face, vertex, chart) identify the arrival corner. Reports the
// angular bookkeeping via phiBwd/phiOut. Returned state has entryEdge = -1.
MarchState continueThroughVertex(const Surface& s, int classIdx, int face, int vertex,
                                 const Isometry& chart, const Vec2& vertexPlane,
                                 const Vec2& incomingDir, double theta, double& phiBwd,
                                 double& phiOut);

// Incoming-reverse global angle at a vertex hit.
double incomingGlobalAngle(const Surface& s, int classIdx, int face, int vertex,
                           const Isometry& chart, const Vec2& incomingDir);

// Lenient variant: false when the reverse ray does not point into this
// corner's wedge (grazing arrivals along an edge line belong to the face on
// the other side).
bool tryIncomingGlobalAngle(const Surface& s, int classIdx, int face, int vertex,
                            const Isometry& chart, const Vec2& incomingDir, double& phiBwd);

// Chart placing the face of `corner` so that the corner's vertex sits at
// `apex` and a ray leaving at local wedge angle u points at plane angle
// `planeAngle`.
Isometry placeCornerChart(const Surface& s, const CornerRef& corner, const Vec2& apex,
                          double u, double planeAngle);

}  // namespace internal
}  // namespace flatflow
