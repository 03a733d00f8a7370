#include "flatflow/surface.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <set>
#include <sstream>

namespace flatflow {

namespace {

double signedArea(const std::vector<Vec2>& poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % poly.size()];
    a += cross(p, q);
  }
  return 0.5 * a;
}

bool segmentsIntersectProperly(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  auto side = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    return cross(q - p, r - p);
  };
  double d1 = side(a, b, c), d2 = side(a, b, d);
  double d3 = side(c, d, a), d4 = side(c, d, b);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

void validatePolygon(const PolygonDescriptor& poly, double tolGeom) {
  std::size_t n = poly.vertices.size();
  if (n < 3) {
    throw ValidationError("non-simple polygon: '" + poly.id + "' has fewer than 3 vertices");
  }
  for (std::size_t i = 0; i < n; ++i) {
    double len = dist(poly.vertices[i], poly.vertices[(i + 1) % n]);
    if (len <= tolGeom) {
      throw ValidationError("non-simple polygon: '" + poly.id + "' has a degenerate edge");
    }
  }
  if (signedArea(poly.vertices) <= 0.0) {
    throw ValidationError("non-simple polygon: '" + poly.id + "' is not counterclockwise");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      // Skip edges sharing a vertex.
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
      if (segmentsIntersectProperly(poly.vertices[i], poly.vertices[(i + 1) % n],
                                    poly.vertices[j], poly.vertices[(j + 1) % n])) {
        throw ValidationError("non-simple polygon: '" + poly.id + "' self-intersects");
      }
    }
  }
}

bool pointInTriangle(const Vec2& p, const Vec2& a, const Vec2& b, const Vec2& c, double tol) {
  double d1 = cross(b - a, p - a);
  double d2 = cross(c - b, p - b);
  double d3 = cross(a - c, p - c);
  return d1 >= -tol && d2 >= -tol && d3 >= -tol;
}

// Ear-clipping into triangles; returns triples of vertex indices (CCW).
// Adds no new vertices, so vertex classes are unaffected.
std::vector<std::array<int, 3>> earClip(const std::vector<Vec2>& verts, double tol) {
  std::vector<int> idx(verts.size());
  for (std::size_t i = 0; i < verts.size(); ++i) idx[i] = static_cast<int>(i);
  std::vector<std::array<int, 3>> tris;
  int guard = static_cast<int>(verts.size()) * static_cast<int>(verts.size()) + 16;
  while (idx.size() > 3 && guard-- > 0) {
    bool clipped = false;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      int ip = idx[(k + idx.size() - 1) % idx.size()];
      int ic = idx[k];
      int in = idx[(k + 1) % idx.size()];
      const Vec2 &a = verts[ip], &b = verts[ic], &c = verts[in];
      if (cross(b - a, c - b) <= tol) continue;  // reflex or flat corner
      bool empty = true;
      for (int other : idx) {
        if (other == ip || other == ic || other == in) continue;
        if (pointInTriangle(verts[other], a, b, c, -tol)) { empty = false; break; }
      }
      if (!empty) continue;
      tris.push_back({ip, ic, in});
      idx.erase(idx.begin() + static_cast<long>(k));
      clipped = true;
      break;
    }
    if (!clipped) throw ValidationError("non-simple polygon: triangulation failed");
  }
  if (idx.size() == 3) tris.push_back({idx[0], idx[1], idx[2]});
  return tris;
}

bool isConvex(const std::vector<Vec2>& verts, double tol) {
  std::size_t n = verts.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = verts[i];
    const Vec2& b = verts[(i + 1) % n];
    const Vec2& c = verts[(i + 2) % n];
    if (cross(b - a, c - b) < -tol) return false;
  }
  return true;
}

}  // namespace

int Surface::polygonIndex(const std::string& id) const {
  for (std::size_t i = 0; i < polygons.size(); ++i) {
    if (polygons[i].id == id) return static_cast<int>(i);
  }
  throw InvalidArgumentError("unknown polygon id '" + id + "'");
}

double Surface::minExcess() const {
  double m = std::numeric_limits<double>::infinity();
  for (int c : coneClassIds) m = std::min(m, vertexClasses[c].excess);
  return m;
}

double Surface::maxExcess() const {
  double m = 0.0;
  for (int c : coneClassIds) m = std::max(m, vertexClasses[c].excess);
  return m;
}

int Surface::coneIndexOfCorner(int face, int vertex) const {
  int cls = faces[face].cornerClass[vertex];
  for (std::size_t i = 0; i < coneClassIds.size(); ++i) {
    if (coneClassIds[i] == cls) return static_cast<int>(i);
  }
  return -1;
}

SurfacePoint Surface::locate(const std::string& polygonId, const Vec2& p) const {
  int poly = polygonIndex(polygonId);
  for (int f : polygonFaces[poly]) {
    const Face& face = faces[f];
    bool inside = true;
    std::size_t n = face.verts.size();
    for (std::size_t i = 0; i < n && inside; ++i) {
      if (cross(face.verts[(i + 1) % n] - face.verts[i], p - face.verts[i]) < -tol.geom) {
        inside = false;
      }
    }
    if (inside) return {f, p};
  }
  throw InvalidArgumentError("point is not inside polygon '" + polygonId + "'");
}

double Surface::globalAngle(int coneIdx, const CornerRef& corner, double u) const {
  const VertexClass& cls = coneClass(coneIdx);
  return positiveMod(faces[corner.face].cornerOffset[corner.vertex] + u, cls.totalAngle);
}

void Surface::resolveDirection(int coneIdx, double phi, CornerRef& corner, double& u) const {
  const VertexClass& cls = coneClass(coneIdx);
  phi = positiveMod(phi, cls.totalAngle);
  // offsets are increasing with offsets[0] == 0.
  std::size_t lo = 0;
  for (std::size_t i = 0; i < cls.corners.size(); ++i) {
    double hi = (i + 1 < cls.corners.size()) ? cls.offsets[i + 1] : cls.totalAngle;
    if (phi < hi || i + 1 == cls.corners.size()) { lo = i; if (phi < hi) break; }
  }
  corner = cls.corners[lo];
  u = phi - cls.offsets[lo];
}

Surface buildSurface(const SurfaceDescriptor& desc, const Tolerances& tol) {
  if (tol.geom < 1e-15 || tol.geom > 1e-3 || tol.angle < 1e-15 || tol.angle > 1e-3) {
    throw ValidationError("tolerances must lie in [1e-15, 1e-3]");
  }
  Surface s;
  s.name = desc.name;
  s.tol = tol;
  s.polygons = desc.polygons;
  s.gluings = desc.gluings;

  if (desc.polygons.empty()) throw ValidationError("no polygons");
  {
    std::set<std::string> ids;
    for (const auto& p : desc.polygons) {
      if (!ids.insert(p.id).second) throw ValidationError("duplicate polygon id '" + p.id + "'");
    }
  }
  for (const auto& p : desc.polygons) validatePolygon(p, tol.geom);

  // Gluing table: every edge in exactly one pair, matched lengths.
  s.polygonEdgePartner.resize(desc.polygons.size());
  for (std::size_t i = 0; i < desc.polygons.size(); ++i) {
    s.polygonEdgePartner[i].assign(desc.polygons[i].vertices.size(), -1);
  }
  auto edgeEndpoints = [&](const EdgeRef& e, int& poly, Vec2& a, Vec2& b) {
    poly = s.polygonIndex(e.polygon);
    const auto& verts = desc.polygons[poly].vertices;
    int n = static_cast<int>(verts.size());
    if (e.edge < 0 || e.edge >= n) {
      throw ValidationError("gluing references edge " + std::to_string(e.edge) +
                            " of polygon '" + e.polygon + "' which has only " +
                            std::to_string(n) + " edges");
    }
    a = verts[e.edge];
    b = verts[(e.edge + 1) % n];
  };
  for (std::size_t g = 0; g < desc.gluings.size(); ++g) {
    int pa, pb;
    Vec2 a1, a2, b1, b2;
    edgeEndpoints(desc.gluings[g].from, pa, a1, a2);
    edgeEndpoints(desc.gluings[g].to, pb, b1, b2);
    if (pa == pb && desc.gluings[g].from.edge == desc.gluings[g].to.edge) {
      throw ValidationError("edge glued to itself");
    }
    if (s.polygonEdgePartner[pa][desc.gluings[g].from.edge] != -1 ||
        s.polygonEdgePartner[pb][desc.gluings[g].to.edge] != -1) {
      throw ValidationError("edge appears in more than one gluing");
    }
    double la = dist(a1, a2), lb = dist(b1, b2);
    if (std::abs(la - lb) > tol.geom) {
      std::ostringstream os;
      os << "edge length mismatch in gluing " << g << ": " << la << " vs " << lb;
      throw ValidationError(os.str());
    }
    s.polygonEdgePartner[pa][desc.gluings[g].from.edge] = static_cast<int>(g);
    s.polygonEdgePartner[pb][desc.gluings[g].to.edge] = static_cast<int>(g);
    // Forward isometry maps `to`-polygon coords into `from`-polygon coords:
    // directed edge (b1->b2) onto the reverse (a2->a1) of the from-edge.
    s.gluingForward.push_back(edgeToEdge(b1, b2, a2, a1));
    s.gluingBackward.push_back(edgeToEdge(a1, a2, b2, b1));
  }
  for (std::size_t p = 0; p < desc.polygons.size(); ++p) {
    for (std::size_t e = 0; e < desc.polygons[p].vertices.size(); ++e) {
      if (s.polygonEdgePartner[p][e] == -1) {
        throw ValidationError("unglued edge: polygon '" + desc.polygons[p].id + "' edge " +
                              std::to_string(e));
      }
    }
  }

  // Round-trip: crossing a gluing and immediately crossing back is the identity.
  for (std::size_t g = 0; g < desc.gluings.size(); ++g) {
    Isometry rt = s.gluingForward[g].compose(s.gluingBackward[g]);
    Isometry id = Isometry::identity();
    double dev = std::max({std::abs(rt.c - id.c), std::abs(rt.s - id.s),
                           std::abs(rt.tx - id.tx), std::abs(rt.ty - id.ty)});
    s.maxGluingRoundTrip = std::max(s.maxGluingRoundTrip, dev);
    if (dev > 1e-12) throw ValidationError("gluing round trip deviates from identity");
  }

  // Internal decomposition into convex faces, sharing the polygon frame.
  s.polygonFaces.resize(desc.polygons.size());
  // Map (poly, origVertexFrom, origVertexTo) -> (face, edge) for wiring.
  std::map<std::tuple<int, int, int>, std::pair<int, int>> directedEdgeOwner;
  for (std::size_t p = 0; p < desc.polygons.size(); ++p) {
    const auto& verts = desc.polygons[p].vertices;
    std::vector<std::array<int, 3>> cells;
    if (isConvex(verts, tol.geom)) {
      // keep as a single face
      Face f;
      f.originalPolygon = static_cast<int>(p);
      f.verts = verts;
      f.edges.resize(verts.size());
      int faceIdx = static_cast<int>(s.faces.size());
      for (std::size_t v = 0; v < verts.size(); ++v) {
        directedEdgeOwner[{static_cast<int>(p), static_cast<int>(v),
                           static_cast<int>((v + 1) % verts.size())}] = {faceIdx,
                                                                         static_cast<int>(v)};
      }
      s.faces.push_back(std::move(f));
      s.polygonFaces[p].push_back(faceIdx);
    } else {
      cells = earClip(verts, tol.geom);
      for (const auto& t : cells) {
        Face f;
        f.originalPolygon = static_cast<int>(p);
        f.verts = {verts[t[0]], verts[t[1]], verts[t[2]]};
        f.edges.resize(3);
        int faceIdx = static_cast<int>(s.faces.size());
        for (int k = 0; k < 3; ++k) {
          directedEdgeOwner[{static_cast<int>(p), t[k], t[(k + 1) % 3]}] = {faceIdx, k};
        }
        s.faces.push_back(std::move(f));
        s.polygonFaces[p].push_back(faceIdx);
      }
    }
  }

  // Wire face edges: internal edges pair up inside the polygon (identity
  // transition); boundary edges follow the descriptor gluings.
  for (auto& [key, fe] : directedEdgeOwner) {
    auto [poly, vFrom, vTo] = key;
    auto rev = directedEdgeOwner.find({poly, vTo, vFrom});
    Face& face = s.faces[fe.first];
    if (rev != directedEdgeOwner.end()) {
      face.edges[fe.second].partnerFace = rev->second.first;
      face.edges[fe.second].partnerEdge = rev->second.second;
      face.edges[fe.second].internal = true;
      face.edges[fe.second].neighborToSelf = Isometry::identity();
    } else {
      // boundary edge: must be a full original edge (vTo == vFrom + 1)
      int n = static_cast<int>(desc.polygons[poly].vertices.size());
      if ((vFrom + 1) % n != vTo) throw ValidationError("triangulation produced a dangling edge");
      int g = s.polygonEdgePartner[poly][vFrom];
      const GluingDescriptor& glue = desc.gluings[g];
      bool isFrom = (s.polygonIndex(glue.from.polygon) == poly && glue.from.edge == vFrom);
      const EdgeRef& other = isFrom ? glue.to : glue.from;
      int otherPoly = s.polygonIndex(other.polygon);
      int on = static_cast<int>(desc.polygons[otherPoly].vertices.size());
      auto partner = directedEdgeOwner.find({otherPoly, other.edge, (other.edge + 1) % on});
      face.edges[fe.second].partnerFace = partner->second.first;
      face.edges[fe.second].partnerEdge = partner->second.second;
      face.edges[fe.second].internal = false;
      face.edges[fe.second].originalEdge = vFrom;
      face.edges[fe.second].neighborToSelf = isFrom ? s.gluingForward[g] : s.gluingBackward[g];
    }
  }

  // Connectivity of the face graph.
  {
    std::vector<char> seen(s.faces.size(), 0);
    std::deque<int> q{0};
    seen[0] = 1;
    while (!q.empty()) {
      int f = q.front();
      q.pop_front();
      for (const auto& e : s.faces[f].edges) {
        if (!seen[e.partnerFace]) { seen[e.partnerFace] = 1; q.push_back(e.partnerFace); }
      }
    }
    for (char c : seen) {
      if (!c) throw ValidationError("surface is not connected");
    }
  }

  // Vertex classes via corner walk (cross the incoming edge to rotate CCW
  // around the vertex).
  for (auto& f : s.faces) {
    f.cornerClass.assign(f.verts.size(), -1);
    f.cornerOffset.assign(f.verts.size(), 0.0);
    f.cornerAngle.assign(f.verts.size(), 0.0);
    for (std::size_t v = 0; v < f.verts.size(); ++v) {
      std::size_t n = f.verts.size();
      Vec2 rayA = f.verts[(v + 1) % n] - f.verts[v];
      Vec2 rayB = f.verts[(v + n - 1) % n] - f.verts[v];
      f.cornerAngle[v] = ccwAngle(rayA, rayB);
    }
  }
  for (std::size_t f0 = 0; f0 < s.faces.size(); ++f0) {
    for (std::size_t v0 = 0; v0 < s.faces[f0].verts.size(); ++v0) {
      if (s.faces[f0].cornerClass[v0] != -1) continue;
      VertexClass cls;
      int clsIdx = static_cast<int>(s.vertexClasses.size());
      CornerRef cur{static_cast<int>(f0), static_cast<int>(v0)};
      double acc = 0.0;
      std::size_t guard = 0;
      do {
        Face& face = s.faces[cur.face];
        if (face.cornerClass[cur.vertex] != -1) {
          throw ValidationError("inconsistent vertex identifications");
        }
        face.cornerClass[cur.vertex] = clsIdx;
        face.cornerOffset[cur.vertex] = acc;
        cls.corners.push_back(cur);
        cls.offsets.push_back(acc);
        acc += face.cornerAngle[cur.vertex];
        int n = static_cast<int>(face.verts.size());
        int incoming = (cur.vertex + n - 1) % n;
        const FaceEdge& e = face.edges[incoming];
        cur = {e.partnerFace, e.partnerEdge};
        if (++guard > s.faces.size() * 16 + 64) {
          throw ValidationError("vertex corner walk does not close");
        }
      } while (!(cur.face == static_cast<int>(f0) && cur.vertex == static_cast<int>(v0)));
      cls.totalAngle = acc;
      cls.excess = acc - 2.0 * M_PI;
      cls.cone = cls.excess > tol.angle;
      s.vertexClasses.push_back(std::move(cls));
    }
  }

  for (std::size_t i = 0; i < s.vertexClasses.size(); ++i) {
    const VertexClass& cls = s.vertexClasses[i];
    if (cls.totalAngle < 2.0 * M_PI - tol.geom) {
      std::ostringstream os;
      os << "angle < 2*pi: vertex class " << i << " has total angle " << cls.totalAngle;
      throw ValidationError(os.str());
    }
    if (cls.cone) s.coneClassIds.push_back(static_cast<int>(i));
  }
  if (s.coneClassIds.empty()) {
    throw ValidationError("no cone points: every vertex class has angle 2*pi");
  }

  // Genus from the Euler characteristic of the original complex; Gauss-Bonnet
  // is then a genuine residual check.
  {
    long V = static_cast<long>(s.vertexClasses.size());
    long E = static_cast<long>(desc.gluings.size());
    long F = static_cast<long>(desc.polygons.size());
    long chi = V - E + F;
    if (chi % 2 != 0 || chi > 0) {
      throw ValidationError("inconsistent complex: Euler characteristic " + std::to_string(chi));
    }
    s.genus = static_cast<int>((2 - chi) / 2);
    double excessSum = 0.0;
    for (const auto& cls : s.vertexClasses) excessSum += cls.excess;
    s.gaussBonnetResidual = std::abs(excessSum - 2.0 * M_PI * (2.0 * s.genus - 2.0));
    if (s.gaussBonnetResidual > 1e-9) {
      throw ValidationError("Gauss-Bonnet residual too large");
    }
  }

  // Coarse diameter upper bound for metric tail estimates.
  {
    double sum = 0.0;
    for (const auto& p : desc.polygons) {
      double d = 0.0;
      for (std::size_t i = 0; i < p.vertices.size(); ++i) {
        for (std::size_t j = i + 1; j < p.vertices.size(); ++j) {
          d = std::max(d, dist(p.vertices[i], p.vertices[j]));
        }
      }
      sum += d;
    }
    s.diameterUpperBound = sum;
  }

  return s;
}

std::vector<Chart> develop(const Surface& s, int seedPolygon, const Isometry& seedPlace,
                           const std::vector<int>& crossings) {
  if (seedPolygon < 0 || seedPolygon >= static_cast<int>(s.polygons.size())) {
    throw InvalidArgumentError("develop: bad seed polygon");
  }
  std::vector<Chart> charts;
  Chart cur;
  cur.polygon = seedPolygon;
  cur.place = seedPlace;
  charts.push_back(cur);
  for (int e : crossings) {
    int n = static_cast<int>(s.polygons[cur.polygon].vertices.size());
    if (e < 0 || e >= n) {
      throw InvalidArgumentError("InvalidCrossing: edge " + std::to_string(e) +
                                 " not on polygon '" + s.polygons[cur.polygon].id + "'");
    }
    int g = s.polygonEdgePartner[cur.polygon][e];
    const GluingDescriptor& glue = s.gluings[g];
    bool isFrom = (s.polygonIndex(glue.from.polygon) == cur.polygon && glue.from.edge == e);
    const EdgeRef& other = isFrom ? glue.to : glue.from;
    Isometry transition = isFrom ? s.gluingForward[g] : s.gluingBackward[g];
    cur.polygon = s.polygonIndex(other.polygon);
    cur.place = cur.place.compose(transition);
    cur.crossings.push_back(e);
    charts.push_back(cur);
  }
  return charts;
}

}  // namespace flatflow
