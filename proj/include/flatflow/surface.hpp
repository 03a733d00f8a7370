#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flatflow/errors.hpp"
#include "flatflow/geometry.hpp"

namespace flatflow {

struct Tolerances {
  double geom = 1e-9;   // coordinate / length comparisons
  double angle = 1e-9;  // angle comparisons
};

struct EdgeRef {
  std::string polygon;
  int edge = 0;
};

struct PolygonDescriptor {
  std::string id;
  std::vector<Vec2> vertices;  // counterclockwise
};

struct GluingDescriptor {
  EdgeRef from;
  EdgeRef to;
};

// Raw input: glued Euclidean polygons. Edge i runs from vertex i to vertex i+1.
struct SurfaceDescriptor {
  std::string name;
  std::vector<PolygonDescriptor> polygons;
  std::vector<GluingDescriptor> gluings;
};

// A corner of a face (face index + vertex index within the face).
struct CornerRef {
  int face = -1;
  int vertex = -1;
  bool operator==(const CornerRef& o) const { return face == o.face && vertex == o.vertex; }
};

struct FaceEdge {
  int partnerFace = -1;
  int partnerEdge = -1;
  bool internal = false;          // triangulation edge, not a descriptor gluing
  int originalEdge = -1;          // original polygon edge index (gluing edges only)
  Isometry neighborToSelf;        // maps partner-face coordinates into this face's frame
};

// Convex cell of the internal decomposition. Faces of the same original
// polygon share that polygon's coordinate frame, so internal transitions are
// the identity.
struct Face {
  int originalPolygon = -1;
  std::vector<Vec2> verts;
  std::vector<FaceEdge> edges;    // edge i: verts[i] -> verts[i+1]
  std::vector<int> cornerClass;   // vertex class index per corner
  std::vector<double> cornerOffset;  // angular offset of the corner within its class
  std::vector<double> cornerAngle;   // interior angle at the corner
};

// Identified vertex class. Classes with excess > tol are cone points.
struct VertexClass {
  double totalAngle = 0.0;
  double excess = 0.0;
  bool cone = false;
  std::vector<CornerRef> corners;   // cyclic, counterclockwise order
  std::vector<double> offsets;      // cumulative angle at the start of each corner
};

struct Chart {
  int polygon = -1;       // original polygon index
  Isometry place;         // polygon local coords -> developing plane
  std::vector<int> crossings;  // original-edge crossing sequence that produced it
};

struct SurfacePoint {
  int face = -1;
  Vec2 local;  // coordinates in the face's (= polygon's) frame
};

class Surface {
 public:
  std::string name;
  Tolerances tol;

  std::vector<PolygonDescriptor> polygons;          // original data, validated
  std::vector<std::vector<int>> polygonEdgePartner; // [poly][edge] -> gluing index
  std::vector<GluingDescriptor> gluings;
  std::vector<Isometry> gluingForward;   // maps `to` polygon coords into `from` polygon coords
  std::vector<Isometry> gluingBackward;

  std::vector<Face> faces;
  std::vector<std::vector<int>> polygonFaces;  // faces per original polygon
  std::vector<VertexClass> vertexClasses;
  std::vector<int> coneClassIds;  // indices into vertexClasses with excess > tol

  int genus = 0;
  double gaussBonnetResidual = 0.0;
  double maxGluingRoundTrip = 0.0;  // worst deviation of cross-and-return from identity
  double diameterUpperBound = 0.0;

  int polygonIndex(const std::string& id) const;
  const VertexClass& coneClass(int coneIdx) const { return vertexClasses[coneClassIds[coneIdx]]; }
  int coneCount() const { return static_cast<int>(coneClassIds.size()); }

  // min excess / max excess over cone classes.
  double minExcess() const;
  double maxExcess() const;

  // Corner lookup: which cone-table entry (if any) a face corner belongs to.
  // Returns -1 for flat vertex classes.
  int coneIndexOfCorner(int face, int vertex) const;

  // Locate a point given in an original polygon's coordinates.
  SurfacePoint locate(const std::string& polygonId, const Vec2& p) const;

  // Direction circle bookkeeping at a cone class: global angle of a direction
  // leaving corner (face,vertex) at local CCW angle u from the corner's first ray.
  double globalAngle(int coneIdx, const CornerRef& corner, double u) const;
  // Inverse: which corner and local angle realize global angle phi.
  void resolveDirection(int coneIdx, double phi, CornerRef& corner, double& u) const;
};

// Validates the descriptor and builds the surface. Throws ValidationError.
Surface buildSurface(const SurfaceDescriptor& desc, const Tolerances& tol = {});

// Develops charts along a walk of original-edge crossings. Each crossing is a
// gluing-table lookup from the current polygon; crossing edge e of the current
// polygon yields the neighbor polygon placed across that edge.
// Returns one chart per prefix of the walk (including the seed).
std::vector<Chart> develop(const Surface& s, int seedPolygon, const Isometry& seedPlace,
                           const std::vector<int>& crossings);

struct DistanceQueryStats {
  std::size_t chartsExpanded = 0;
};

// Exact intrinsic distance if it is <= cutoff, std::nullopt otherwise.
// Throws BudgetError if the chart budget is exhausted before certification.
std::optional<double> surfaceDistance(const Surface& s, const SurfacePoint& p,
                                      const SurfacePoint& q, double cutoff,
                                      std::size_t chartBudget = 200000,
                                      DistanceQueryStats* stats = nullptr);

}  // namespace flatflow
