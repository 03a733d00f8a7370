#include "march.hpp"

#include <algorithm>
#include <cmath>

#include "flatflow/errors.hpp"

namespace flatflow {
namespace internal {

FaceStep stepInFace(const Surface& s, const MarchState& st, double remaining, double tolGeom) {
  const Face& face = s.faces[st.face];
  std::size_t n = face.verts.size();

  // Earliest vertex within tolGeom of the ray.
  double bestVertexT = std::numeric_limits<double>::infinity();
  int bestVertex = -1;
  Vec2 bestVertexPos;
  for (std::size_t v = 0; v < n; ++v) {
    Vec2 w = st.chart.apply(face.verts[v]);
    Vec2 rel = w - st.pos;
    double tv = dot(rel, st.dir);
    if (tv <= tolGeom) continue;
    double perp = std::abs(cross(st.dir, rel));
    if (perp <= tolGeom && tv < bestVertexT) {
      bestVertexT = tv;
      bestVertex = static_cast<int>(v);
      bestVertexPos = w;
    }
  }

  // Edge exit.
  double bestEdgeT = std::numeric_limits<double>::infinity();
  int bestEdge = -1;
  for (std::size_t e = 0; e < n; ++e) {
    if (static_cast<int>(e) == st.entryEdge) continue;
    Vec2 A = st.chart.apply(face.verts[e]);
    Vec2 B = st.chart.apply(face.verts[(e + 1) % n]);
    Vec2 ab = B - A;
    double denom = cross(st.dir, ab);
    if (std::abs(denom) < 1e-14) continue;
    double t = cross(A - st.pos, ab) / denom;
    double u = cross(A - st.pos, st.dir) / denom;
    double uTol = tolGeom / norm(ab);
    if (t > 1e-12 && u >= -uTol && u <= 1.0 + uTol && t < bestEdgeT) {
      bestEdgeT = t;
      bestEdge = static_cast<int>(e);
    }
  }

  double boundary = std::min(bestVertexT, bestEdgeT);
  if (remaining <= boundary - 1e-12) {
    FaceStep fs;
    fs.kind = FaceStep::Kind::Finish;
    fs.t = remaining;
    fs.hit = st.pos + st.dir * remaining;
    return fs;
  }
  if (bestVertex >= 0 && bestVertexT <= bestEdgeT + tolGeom) {
    FaceStep fs;
    fs.kind = FaceStep::Kind::Vertex;
    fs.t = bestVertexT;
    fs.vertex = bestVertex;
    fs.hit = bestVertexPos;
    return fs;
  }
  if (bestEdge < 0) {
    throw Error(ErrorCode::Internal, "march lost containment in face");
  }
  FaceStep fs;
  fs.kind = FaceStep::Kind::Exit;
  fs.t = bestEdgeT;
  fs.edge = bestEdge;
  fs.hit = st.pos + st.dir * bestEdgeT;
  return fs;
}

void crossEdge(const Surface& s, MarchState& st, int edge) {
  const FaceEdge& fe = s.faces[st.face].edges[edge];
  st.chart = st.chart.compose(fe.neighborToSelf);
  st.face = fe.partnerFace;
  st.entryEdge = fe.partnerEdge;
}

double classGlobalAngle(const Surface& s, const VertexClass& cls, const CornerRef& corner,
                        double u) {
  return positiveMod(s.faces[corner.face].cornerOffset[corner.vertex] + u, cls.totalAngle);
}

void classResolveDirection(const Surface& s, const VertexClass& cls, double phi,
                           CornerRef& corner, double& u) {
  (void)s;
  phi = positiveMod(phi, cls.totalAngle);
  std::size_t idx = cls.corners.size() - 1;
  for (std::size_t i = 0; i + 1 < cls.corners.size(); ++i) {
    if (phi < cls.offsets[i + 1]) { idx = i; break; }
  }
  corner = cls.corners[idx];
  u = phi - cls.offsets[idx];
}

bool tryIncomingGlobalAngle(const Surface& s, int classIdx, int face, int vertex,
                            const Isometry& chart, const Vec2& incomingDir, double& phiBwd) {
  const Face& f = s.faces[face];
  std::size_t n = f.verts.size();
  Vec2 rayA = chart.applyVector(f.verts[(vertex + 1) % n] - f.verts[vertex]);
  double u = ccwAngle(normalize(rayA), -incomingDir);
  double cornerAngle = f.cornerAngle[vertex];
  if (u > cornerAngle + 1e-6 && u < 2.0 * M_PI - 1e-6) return false;
  if (u > cornerAngle) u = (u > M_PI) ? 0.0 : cornerAngle;
  const VertexClass& cls = s.vertexClasses[classIdx];
  phiBwd = classGlobalAngle(s, cls, {face, vertex}, u);
  return true;
}

double incomingGlobalAngle(const Surface& s, int classIdx, int face, int vertex,
                           const Isometry& chart, const Vec2& incomingDir) {
  const Face& f = s.faces[face];
  std::size_t n = f.verts.size();
  Vec2 rayA = chart.applyVector(f.verts[(vertex + 1) % n] - f.verts[vertex]);
  double u = ccwAngle(normalize(rayA), -incomingDir);
  double cornerAngle = f.cornerAngle[vertex];
  // The reverse ray points into this corner's wedge; clamp float noise.
  if (u > cornerAngle) {
    if (u > cornerAngle + 1e-6 && u < 2.0 * M_PI - 1e-6) {
      throw Error(ErrorCode::Internal, "arrival direction outside corner wedge: u=" +
                                           std::to_string(u) + " corner=" +
                                           std::to_string(cornerAngle) + " face=" +
                                           std::to_string(face) + " vertex=" +
                                           std::to_string(vertex));
    }
    u = (u > M_PI) ? 0.0 : cornerAngle;
  }
  const VertexClass& cls = s.vertexClasses[classIdx];
  return classGlobalAngle(s, cls, {face, vertex}, u);
}

Isometry placeCornerChart(const Surface& s, const CornerRef& corner, const Vec2& apex,
                          double u, double planeAngle) {
  const Face& df = s.faces[corner.face];
  std::size_t n = df.verts.size();
  Vec2 rayALocal = df.verts[(corner.vertex + 1) % n] - df.verts[corner.vertex];
  double rot = planeAngle - u - angleOf(rayALocal);
  Isometry chart;
  chart.c = std::cos(rot);
  chart.s = std::sin(rot);
  Vec2 mapped = chart.applyVector(df.verts[corner.vertex]);
  chart.tx = apex.x - mapped.x;
  chart.ty = apex.y - mapped.y;
  return chart;
}

MarchState continueThroughVertex(const Surface& s, int classIdx, int face, int vertex,
                                 const Isometry& chart, const Vec2& vertexPlane,
                                 const Vec2& incomingDir, double theta, double& phiBwd,
                                 double& phiOut) {
  const VertexClass& cls = s.vertexClasses[classIdx];
  phiBwd = incomingGlobalAngle(s, classIdx, face, vertex, chart, incomingDir);
  phiOut = positiveMod(phiBwd - theta, cls.totalAngle);

  CornerRef depart;
  double u = 0.0;
  classResolveDirection(s, cls, phiOut, depart, u);

  double alphaOut = angleOf(incomingDir) + M_PI - theta;
  MarchState st;
  st.face = depart.face;
  st.chart = placeCornerChart(s, depart, vertexPlane, u, alphaOut);
  st.pos = vertexPlane;
  st.dir = dirOf(alphaOut);
  st.entryEdge = -1;
  return st;
}

}  // namespace internal
}  // namespace flatflow
