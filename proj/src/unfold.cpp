#include "unfold.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "flatflow/errors.hpp"
#include "flatflow/tracer.hpp"
#include "march.hpp"

namespace flatflow {
namespace internal {

namespace {

constexpr double kAngTol = 1e-13;

struct Window {
  Vec2 lo, hi;  // unit vectors; the window sweeps CCW from lo to hi, width < pi
};

bool windowContains(const Window& w, const Vec2& d, double tol) {
  return cross(w.lo, d) >= -tol && cross(d, w.hi) >= -tol;
}

// Clip the window by the CCW direction interval [da, db] of an edge. The edge
// may subtend directions anywhere on the circle, so work in angles relative to
// the window's low boundary (window widths stay below pi).
bool clipWindowByEdge(const Window& w, const Vec2& da, const Vec2& db, Window& out) {
  double tHi = ccwAngle(w.lo, w.hi);
  double ta = ccwAngle(w.lo, da);
  double tb = ccwAngle(w.lo, db);
  if (ta <= tb) {
    if (ta > tHi + kAngTol) return false;
    out.lo = (ta <= 0.0) ? w.lo : ((ta <= tHi) ? da : w.hi);
    out.hi = (tb < tHi) ? db : w.hi;
  } else {
    // Interval wraps past the window's low boundary: the overlap is
    // [0, min(tb, tHi)] (a second piece would need the edge to subtend more
    // than pi).
    out.lo = w.lo;
    out.hi = (tb < tHi) ? db : w.hi;
  }
  // Degenerate windows are dropped: boundary-direction segments run along
  // edge chains and are enumerated by a dedicated walk.
  return cross(out.lo, out.hi) > kAngTol;
}

double distancePointSegment(const Vec2& p, const Vec2& a, const Vec2& b) {
  Vec2 ab = b - a;
  double len2 = dot(ab, ab);
  if (len2 <= 0.0) return dist(p, a);
  double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return dist(p, a + ab * t);
}

// Nearest distance from the origin to the part of segment [A, B] inside the
// window's cone; rays in the window hit the edge on that portion, so this
// lower-bounds the crossing parameter.
double reachWithinWindow(const Vec2& A, const Vec2& B, const Window& w) {
  double t0 = 0.0, t1 = 1.0;
  auto clipHalfPlane = [&](double g0, double g1) {
    if (g0 < -1e-12 && g1 < -1e-12) { t0 = 1.0; t1 = 0.0; return; }
    if (g0 < 0.0 && g1 > g0) t0 = std::max(t0, g0 / (g0 - g1));
    if (g1 < 0.0 && g0 > g1) t1 = std::min(t1, g0 / (g0 - g1));
  };
  clipHalfPlane(cross(w.lo, A), cross(w.lo, B));
  clipHalfPlane(cross(A, w.hi), cross(B, w.hi));
  if (t0 > t1) return std::numeric_limits<double>::infinity();
  Vec2 P = A + (B - A) * t0;
  Vec2 Q = A + (B - A) * t1;
  return distancePointSegment({0.0, 0.0}, P, Q);
}

struct SearchState {
  int face = -1;
  Isometry chart;
  Window window;
  int entryEdge = -1;
};

// Angle of `d` measured CCW from `ref`, added to refAngle. All windows stay
// within a half-plane of the initial wedge, so this is wrap-free.
double unwrapAngle(const Vec2& ref, double refAngle, const Vec2& d) {
  double a = std::atan2(cross(ref, d), dot(ref, d));  // (-pi, pi]
  return refAngle + a;
}

class VisibilitySearch {
 public:
  VisibilitySearch(const Surface& s, double maxLen, UnfoldBudget& budget)
      : s_(s), maxLen_(maxLen), budget_(budget) {}

  std::vector<VisibleConeHit> coneHits;
  const SurfacePoint* target = nullptr;
  std::vector<VisiblePointHit> targetHits;

  // refDir/refAngle provide the unwrapped angle frame for reporting hits.
  void run(std::deque<SearchState> frontier, const Vec2& refDir, double refAngle) {
    while (!frontier.empty()) {
      if (++budget_.used > budget_.maxStates) {
        throw BudgetError("WorkLimitExceeded: unfolding chart budget exhausted");
      }
      SearchState st = frontier.front();
      frontier.pop_front();
      const Face& face = s_.faces[st.face];
      std::size_t n = face.verts.size();

      // Vertex hits in this face. Entry-edge endpoints are reached through the
      // previous face and are reported there.
      for (std::size_t v = 0; v < n; ++v) {
        if (st.entryEdge >= 0) {
          std::size_t entry = static_cast<std::size_t>(st.entryEdge);
          if (v == entry || v == (entry + 1) % n) continue;
        }
        Vec2 w = st.chart.apply(face.verts[v]);
        double r = norm(w);
        if (r <= s_.tol.geom || r > maxLen_ + s_.tol.geom) continue;
        Vec2 d = w * (1.0 / r);
        if (!windowContains(st.window, d, 1e-12)) continue;
        int cls = face.cornerClass[v];
        if (!s_.vertexClasses[cls].cone) continue;
        double phiBwd = 0.0;
        if (!tryIncomingGlobalAngle(s_, cls, st.face, static_cast<int>(v), st.chart, d,
                                    phiBwd)) {
          continue;  // grazing arrival; the proper face reports it
        }
        VisibleConeHit hit;
        hit.endCone = coneIndexOfClass(cls);
        hit.angle = unwrapAngle(refDir, refAngle, d);
        hit.length = r;
        hit.planePos = w;
        hit.endFace = st.face;
        hit.endVertex = static_cast<int>(v);
        hit.phiBwd = phiBwd;
        coneHits.push_back(hit);
      }

      // Target point hits.
      if (target && face.originalPolygon == s_.faces[target->face].originalPolygon) {
        for (int tf : s_.polygonFaces[face.originalPolygon]) {
          if (tf != st.face) continue;  // same chart frame either way; hit per face
          Vec2 w = st.chart.apply(target->local);
          double r = norm(w);
          if (r <= maxLen_ + s_.tol.geom && r > s_.tol.geom) {
            Vec2 d = w * (1.0 / r);
            if (windowContains(st.window, d, 1e-12) && radialInside(st, d, r)) {
              targetHits.push_back({unwrapAngle(refDir, refAngle, d), r});
            }
          }
        }
      }

      // Expand across edges.
      for (std::size_t e = 0; e < n; ++e) {
        if (static_cast<int>(e) == st.entryEdge) continue;
        Vec2 A = st.chart.apply(face.verts[e]);
        Vec2 B = st.chart.apply(face.verts[(e + 1) % n]);
        double ra = norm(A), rb = norm(B);
        if (ra <= s_.tol.geom || rb <= s_.tol.geom) continue;  // edge at the source vertex
        Vec2 da = A * (1.0 / ra), db = B * (1.0 / rb);
        double orient = cross(da, db);
        if (std::abs(orient) < kAngTol) continue;  // radially collinear edge
        if (orient < 0.0) std::swap(da, db);
        Window next;
        if (!clipWindowByEdge(st.window, da, db, next)) continue;
        if (reachWithinWindow(A, B, next) > maxLen_ + s_.tol.geom) continue;
        SearchState ns;
        crossIntoState(st, static_cast<int>(e), next, ns);
        frontier.push_back(ns);
      }
    }
  }

  // Drop hits whose segment passes through a nearer cone copy (collinear);
  // call after all hit sources have been appended.
  void finalize() { filterOcclusion(); }

 private:
  const Surface& s_;
  double maxLen_;
  UnfoldBudget& budget_;

  int coneIndexOfClass(int cls) const {
    for (std::size_t i = 0; i < s_.coneClassIds.size(); ++i) {
      if (s_.coneClassIds[i] == cls) return static_cast<int>(i);
    }
    return -1;
  }

  void crossIntoState(const SearchState& st, int edge, const Window& w, SearchState& ns) const {
    const FaceEdge& fe = s_.faces[st.face].edges[edge];
    ns.face = fe.partnerFace;
    ns.chart = st.chart.compose(fe.neighborToSelf);
    ns.entryEdge = fe.partnerEdge;
    ns.window = w;
  }

  // For interior target points: the hit radius must lie within the ray's chord
  // through this face.
  bool radialInside(const SearchState& st, const Vec2& d, double r) const {
    const Face& face = s_.faces[st.face];
    std::size_t n = face.verts.size();
    double rin = 0.0, rout = std::numeric_limits<double>::infinity();
    bool found = false;
    for (std::size_t e = 0; e < n; ++e) {
      Vec2 A = st.chart.apply(face.verts[e]);
      Vec2 B = st.chart.apply(face.verts[(e + 1) % n]);
      Vec2 ab = B - A;
      double denom = cross(d, ab);
      if (std::abs(denom) < 1e-14) continue;
      double t = cross(A, ab) / denom;  // ray origin is the search origin
      double u = cross(A, d) / denom;
      double uTol = s_.tol.geom / norm(ab);
      if (u >= -uTol && u <= 1.0 + uTol && t > 0.0) {
        found = true;
        if (st.entryEdge >= 0 && static_cast<int>(e) == static_cast<std::size_t>(st.entryEdge)) {
          rin = t;
        } else {
          rout = std::min(rout, t);
        }
      }
    }
    if (!found) return st.entryEdge < 0;  // source face, no chord constraint
    if (st.entryEdge < 0) rin = 0.0;
    return r >= rin - s_.tol.geom && r <= rout + s_.tol.geom;
  }

  // Drop hits whose segment passes within tol of a nearer cone copy, the
  // same capture rule the tracer applies.
  void filterOcclusion() {
    std::sort(coneHits.begin(), coneHits.end(), [](const VisibleConeHit& a,
                                                   const VisibleConeHit& b) {
      if (a.angle != b.angle) return a.angle < b.angle;
      return a.length < b.length;
    });
    std::vector<VisibleConeHit> kept;
    for (const auto& h : coneHits) {
      bool occluded = false;
      for (auto it = kept.rbegin(); it != kept.rend(); ++it) {
        double dAng = h.angle - it->angle;
        if (dAng > 1e-6) break;
        if (it->length < h.length - s_.tol.geom && dAng * it->length <= s_.tol.geom) {
          occluded = true;
          break;
        }
      }
      if (!occluded) kept.push_back(h);
    }
    coneHits = std::move(kept);
  }
};

}  // namespace

std::vector<VisibleConeHit> coneCornerVisibility(const Surface& s, int coneIdx,
                                                 std::size_t cornerPos, double maxLen,
                                                 UnfoldBudget& budget) {
  const VertexClass& cls = s.coneClass(coneIdx);
  const CornerRef& corner = cls.corners[cornerPos];
  double offset = cls.offsets[cornerPos];
  const Face& face = s.faces[corner.face];
  double cornerAngle = face.cornerAngle[corner.vertex];

  SearchState init;
  init.face = corner.face;
  init.chart = placeCornerChart(s, corner, {0.0, 0.0}, 0.0, offset);
  init.entryEdge = -1;
  init.window.lo = dirOf(offset);
  init.window.hi = dirOf(offset + cornerAngle);

  VisibilitySearch search(s, maxLen, budget);
  // Report angles as offset + ccw-from-lo so they live on the class circle.
  search.run({init}, init.window.lo, offset);

  // Segments along the wedge's first ray run on edge chains, which the
  // window search cannot keep alive; the tracer walks them directly.
  {
    TraceResult tr = traceFromCone(s, coneIdx, offset, maxLen + 1e-9, ConePolicy::stop());
    if (tr.path.coneHitTime && *tr.path.coneHitTime <= maxLen + s.tol.geom) {
      VisibleConeHit hit;
      hit.endCone = tr.path.coneHitCone;
      hit.angle = offset;
      hit.length = *tr.path.coneHitTime;
      hit.planePos = dirOf(offset) * hit.length;
      hit.phiBwd = tr.path.coneHitPhiBwd;
      const auto& lastSeg = tr.path.segments.back();
      hit.endFace = lastSeg.face;
      hit.endVertex = -1;
      search.coneHits.push_back(hit);
    }
  }
  search.finalize();


  // Keep the half-open wedge [offset, offset + angle): drop hits at the upper
  // boundary, they belong to the next corner.
  std::vector<VisibleConeHit> out;
  for (auto& h : search.coneHits) {
    double rel = h.angle - offset;
    if (rel < -1e-12 || rel >= cornerAngle - 1e-12) continue;
    out.push_back(h);
  }
  return out;
}

std::vector<VisibleConeHit> coneVisibility(const Surface& s, int coneIdx, double maxLen,
                                           UnfoldBudget& budget) {
  const VertexClass& cls = s.coneClass(coneIdx);
  std::vector<VisibleConeHit> all;
  for (std::size_t c = 0; c < cls.corners.size(); ++c) {
    auto hits = coneCornerVisibility(s, coneIdx, c, maxLen, budget);
    all.insert(all.end(), hits.begin(), hits.end());
  }
  return all;
}

PointVisibilityResult pointVisibility(const Surface& s, const SurfacePoint& source,
                                      double maxLen, const SurfacePoint* target,
                                      UnfoldBudget& budget) {
  VisibilitySearch search(s, maxLen, budget);
  search.target = target;

  std::deque<SearchState> frontier;
  const Face& face = s.faces[source.face];
  std::size_t n = face.verts.size();
  // The source face itself covers all directions: one state per edge window,
  // to keep every window under pi.
  for (std::size_t e = 0; e < n; ++e) {
    Vec2 A = face.verts[e] - source.local;
    Vec2 B = face.verts[(e + 1) % n] - source.local;
    double ra = norm(A), rb = norm(B);
    if (ra <= s.tol.geom || rb <= s.tol.geom) {
      // Source at a face vertex: that wedge is the corner itself.
      continue;
    }
    Vec2 da = A * (1.0 / ra), db = B * (1.0 / rb);
    double orient = cross(da, db);
    if (std::abs(orient) < kAngTol) continue;
    SearchState st;
    st.face = source.face;
    // Chart translating the source to the origin.
    st.chart = Isometry::rotationTranslation(1.0, 0.0, {-source.local.x, -source.local.y});
    st.entryEdge = -1;
    st.window = orient > 0.0 ? Window{da, db} : Window{db, da};
    frontier.push_back(st);
  }
  search.run(std::move(frontier), {1.0, 0.0}, 0.0);
  search.finalize();

  PointVisibilityResult out;
  out.coneHits = std::move(search.coneHits);
  out.targetHits = std::move(search.targetHits);
  return out;
}

bool samePoint(const Surface& s, const SurfacePoint& p, const SurfacePoint& q) {
  auto closeTo = [&](const SurfacePoint& a, const SurfacePoint& b) {
    return s.faces[a.face].originalPolygon == s.faces[b.face].originalPolygon &&
           dist(a.local, b.local) <= s.tol.geom;
  };
  if (closeTo(p, q)) return true;

  // Vertex copies.
  const Face& fp = s.faces[p.face];
  for (std::size_t v = 0; v < fp.verts.size(); ++v) {
    if (dist(fp.verts[v], p.local) > s.tol.geom) continue;
    int cls = fp.cornerClass[v];
    const Face& fq = s.faces[q.face];
    for (std::size_t w = 0; w < fq.verts.size(); ++w) {
      if (dist(fq.verts[w], q.local) <= s.tol.geom && fq.cornerClass[w] == cls) return true;
    }
  }

  // Copies across one edge gluing.
  const Face& f = s.faces[p.face];
  for (std::size_t e = 0; e < f.verts.size(); ++e) {
    Vec2 A = f.verts[e], B = f.verts[(e + 1) % f.verts.size()];
    if (distancePointSegment(p.local, A, B) > s.tol.geom) continue;
    const FaceEdge& fe = f.edges[e];
    SurfacePoint mirrored;
    mirrored.face = fe.partnerFace;
    mirrored.local = fe.neighborToSelf.inverse().apply(p.local);
    if (closeTo(mirrored, q)) return true;
  }
  return false;
}

}  // namespace internal
}  // namespace flatflow
