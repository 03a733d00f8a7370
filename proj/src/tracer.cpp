#include "flatflow/tracer.hpp"

#include <algorithm>
#include <cmath>

#include "march.hpp"

namespace flatflow {

using internal::FaceStep;
using internal::MarchState;

namespace {

struct PendingTurn {
  bool stop = false;
  double theta = 0.0;
};

PendingTurn pickTurn(const ConePolicy& policy, std::size_t& explicitIdx, double totalAngle,
                     double tolAngle) {
  PendingTurn turn;
  switch (policy.kind) {
    case ConePolicy::Kind::Stop:
      turn.stop = true;
      return turn;
    case ConePolicy::Kind::TurnPlusPi:
      turn.theta = M_PI;
      return turn;
    case ConePolicy::Kind::TurnMinusPi:
      turn.theta = -M_PI;
      return turn;
    case ConePolicy::Kind::Bisect:
      turn.theta = 0.5 * totalAngle;
      return turn;
    case ConePolicy::Kind::Explicit: {
      if (explicitIdx >= policy.angles.size()) {
        throw InvalidArgumentError("InvalidTurn: explicit angle list exhausted at a cone event");
      }
      double theta = policy.angles[explicitIdx++];
      double a = std::abs(theta);
      if (a < M_PI - tolAngle || a > 0.5 * totalAngle + tolAngle) {
        throw InvalidArgumentError("InvalidTurn: |theta| outside [pi, L/2]");
      }
      turn.theta = theta;
      return turn;
    }
  }
  throw Error(ErrorCode::Internal, "unreachable");
}

TraceResult traceCore(const Surface& s, MarchState st, double length, const ConePolicy& policy,
                      std::size_t stepBudget) {
  GeodesicPath path;
  path.surface = &s;
  path.t0 = 0.0;
  path.t1 = length;

  double t = 0.0;
  Vec2 segStart = st.pos;
  double segT = 0.0;
  std::size_t explicitIdx = 0;
  std::size_t steps = 0;

  auto pushSegment = [&](const Vec2& end, double tEnd) {
    if (tEnd - segT > 0.0) {
      path.segments.push_back({st.face, st.chart, segStart, end, segT, tEnd});
    }
  };

  while (true) {
    if (++steps > stepBudget) throw BudgetError("trace step budget exceeded");
    FaceStep fs = internal::stepInFace(s, st, length - t, s.tol.geom);
    switch (fs.kind) {
      case FaceStep::Kind::Finish: {
        pushSegment(fs.hit, length);
        return {std::move(path)};
      }
      case FaceStep::Kind::Exit: {
        double tHit = t + fs.t;
        pushSegment(fs.hit, tHit);
        const FaceEdge& fe = s.faces[st.face].edges[fs.edge];
        if (!fe.internal) path.crossings.push_back({tHit, fe.originalEdge});
        st.pos = fs.hit;
        internal::crossEdge(s, st, fs.edge);
        segStart = st.pos;
        segT = tHit;
        t = tHit;
        break;
      }
      case FaceStep::Kind::Vertex: {
        double tHit = t + fs.t;
        pushSegment(fs.hit, tHit);
        int classIdx = s.faces[st.face].cornerClass[fs.vertex];
        const VertexClass& cls = s.vertexClasses[classIdx];
        double theta = M_PI;
        if (cls.cone) {
          PendingTurn turn = pickTurn(policy, explicitIdx, cls.totalAngle, s.tol.angle);
          if (turn.stop) {
            path.t1 = tHit;
            path.truncated = true;
            path.coneHitTime = tHit;
            path.coneHitCone = s.coneIndexOfCorner(st.face, fs.vertex);
            path.coneHitPhiBwd = internal::incomingGlobalAngle(s, classIdx, st.face, fs.vertex,
                                                               st.chart, st.dir);
            return {std::move(path)};
          }
          theta = turn.theta;
        }
        double phiBwd = 0.0, phiOut = 0.0;
        MarchState next = internal::continueThroughVertex(
            s, classIdx, st.face, fs.vertex, st.chart, fs.hit, st.dir, theta, phiBwd, phiOut);
        if (cls.cone) {
          ConeEvent ev;
          ev.t = tHit;
          ev.coneIdx = s.coneIndexOfCorner(st.face, fs.vertex);
          ev.left = positiveMod(phiBwd - phiOut, cls.totalAngle);
          ev.right = cls.totalAngle - ev.left;
          ev.theta = theta;
          ev.phiBwd = phiBwd;
          ev.phiOut = phiOut;
          path.events.push_back(ev);
        }
        st = next;
        segStart = st.pos;
        segT = tHit;
        t = tHit;
        break;
      }
    }
  }
}

}  // namespace

TraceResult trace(const Surface& s, const TraceStart& start, double length,
                  const ConePolicy& policy, std::size_t stepBudget) {
  if (length <= 0.0) throw InvalidArgumentError("trace length must be positive");
  SurfacePoint sp = s.locate(start.polygon, start.point);

  // Starting at a cone point needs an outgoing wedge, which we only accept
  // under Explicit (the direction then selects the wedge).
  const Face& face = s.faces[sp.face];
  for (std::size_t v = 0; v < face.verts.size(); ++v) {
    if (dist(face.verts[v], sp.local) <= s.tol.geom &&
        s.vertexClasses[face.cornerClass[v]].cone) {
      if (policy.kind != ConePolicy::Kind::Explicit) {
        throw InvalidArgumentError("DegenerateStart: start lies at a cone point");
      }
      int coneIdx = s.coneIndexOfCorner(sp.face, static_cast<int>(v));
      // Find the corner copy at this location whose wedge holds the direction.
      const VertexClass& cls = s.coneClass(coneIdx);
      Vec2 d = dirOf(start.direction);
      for (std::size_t ci = 0; ci < cls.corners.size(); ++ci) {
        const CornerRef& c = cls.corners[ci];
        const Face& cf = s.faces[c.face];
        if (cf.originalPolygon != face.originalPolygon) continue;
        if (dist(cf.verts[c.vertex], sp.local) > s.tol.geom) continue;
        std::size_t n = cf.verts.size();
        Vec2 rayA = normalize(cf.verts[(c.vertex + 1) % n] - cf.verts[c.vertex]);
        double u = ccwAngle(rayA, d);
        if (u <= cf.cornerAngle[c.vertex] + s.tol.angle) {
          double phi = internal::classGlobalAngle(s, cls, c, std::min(u, cf.cornerAngle[c.vertex]));
          return traceFromCone(s, coneIdx, phi, length, policy, stepBudget);
        }
      }
      throw InvalidArgumentError("DegenerateStart: no wedge at the cone point fits the direction");
    }
  }

  MarchState st;
  st.face = sp.face;
  st.chart = Isometry::identity();
  st.pos = sp.local;
  st.dir = dirOf(start.direction);
  st.entryEdge = -1;
  return traceCore(s, st, length, policy, stepBudget);
}

TraceResult traceFromCone(const Surface& s, int coneIdx, double phi, double length,
                          const ConePolicy& policy, std::size_t stepBudget) {
  if (length <= 0.0) throw InvalidArgumentError("trace length must be positive");
  if (coneIdx < 0 || coneIdx >= s.coneCount()) {
    throw InvalidArgumentError("traceFromCone: bad cone index");
  }
  const VertexClass& cls = s.coneClass(coneIdx);
  CornerRef corner;
  double u = 0.0;
  internal::classResolveDirection(s, cls, phi, corner, u);
  const Face& f = s.faces[corner.face];
  std::size_t n = f.verts.size();
  Vec2 rayA = f.verts[(corner.vertex + 1) % n] - f.verts[corner.vertex];

  MarchState st;
  st.face = corner.face;
  st.chart = Isometry::identity();
  st.pos = f.verts[corner.vertex];
  st.dir = dirOf(angleOf(rayA) + u);
  st.entryEdge = -1;
  return traceCore(s, st, length, policy, stepBudget);
}

GeodesicPath::PointOnPath GeodesicPath::pointAt(double t) const {
  if (segments.empty() || t < t0 - 1e-9 || t > t1 + 1e-9) {
    throw InvalidArgumentError("pointAt: parameter outside the traced window");
  }
  t = std::clamp(t, t0, t1);
  std::size_t lo = 0, hi = segments.size();
  while (lo + 1 < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (segments[mid].tA <= t) lo = mid; else hi = mid;
  }
  const SubSegment& seg = segments[lo];
  double span = seg.tB - seg.tA;
  double w = span > 0.0 ? (t - seg.tA) / span : 0.0;
  PointOnPath p;
  p.face = seg.face;
  p.chart = seg.chart;
  p.plane = seg.planeA + (seg.planeB - seg.planeA) * w;
  return p;
}

std::vector<GeodesicPath::PointOnPath> GeodesicPath::chartsAt(double t, double eps) const {
  std::vector<PointOnPath> out;
  t = std::clamp(t, t0, t1);
  for (const auto& seg : segments) {
    if (seg.tA > t + eps || seg.tB < t - eps) continue;
    double span = seg.tB - seg.tA;
    double w = span > 0.0 ? std::clamp((t - seg.tA) / span, 0.0, 1.0) : 0.0;
    PointOnPath p;
    p.face = seg.face;
    p.chart = seg.chart;
    p.plane = seg.planeA + (seg.planeB - seg.planeA) * w;
    out.push_back(p);
  }
  return out;
}

int GeodesicPath::polygonAt(double t) const {
  return surface->faces[pointAt(t).face].originalPolygon;
}

Vec2 GeodesicPath::planeDirectionAt(double t) const {
  if (segments.empty()) throw InvalidArgumentError("empty path");
  t = std::clamp(t, t0, t1);
  std::size_t lo = 0, hi = segments.size();
  while (lo + 1 < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (segments[mid].tA <= t) lo = mid; else hi = mid;
  }
  return normalize(segments[lo].planeB - segments[lo].planeA);
}

std::vector<std::pair<double, double>> turningSignature(const GeodesicPath& p) {
  std::vector<std::pair<double, double>> sig;
  sig.reserve(p.events.size());
  for (const auto& e : p.events) sig.emplace_back(e.t, e.theta);
  return sig;
}

WindowClass classifyWindow(const GeodesicPath& p, double tolAngle) {
  for (const auto& e : p.events) {
    if (std::abs(e.theta) > M_PI + tolAngle) return {true, e.t};
  }
  return {false, 0.0};
}

GeodesicPath flowShift(const GeodesicPath& p, double s) {
  GeodesicPath r = p;
  r.t0 -= s;
  r.t1 -= s;
  for (auto& seg : r.segments) { seg.tA -= s; seg.tB -= s; }
  for (auto& e : r.events) e.t -= s;
  for (auto& c : r.crossings) c.t -= s;
  if (r.coneHitTime) r.coneHitTime = *r.coneHitTime - s;
  return r;
}

namespace {

// Plane-straight continuations through a cone point: theta = pi - 2*pi*k with
// |theta| <= L/2. Used only to validate corridor segments.
std::vector<double> straightContinuations(double totalAngle) {
  std::vector<double> out;
  double half = 0.5 * totalAngle;
  for (int k = -8; k <= 8; ++k) {
    double theta = M_PI - 2.0 * M_PI * k;
    if (std::abs(theta) >= M_PI - 1e-12 && std::abs(theta) <= half + 1e-12) out.push_back(theta);
  }
  return out;
}

// Check that the straight plane segment from `from` (in chart/face `st`) of
// length `len` is realized by a surface path arriving at one of the accepted
// (polygon, chart) targets. Branches at cone hits.
struct LiftTarget {
  int polygon = -1;
  Isometry chart;
};

bool validateStraight(const Surface& s, MarchState st, double len,
                      const std::vector<LiftTarget>& targets, int depth) {
  if (depth > 12) return false;
  auto accepted = [&]() {
    for (const auto& t : targets) {
      if (s.faces[st.face].originalPolygon == t.polygon && st.chart.approxEquals(t.chart, 1e-6)) {
        return true;
      }
    }
    return false;
  };
  std::size_t guard = 0;
  while (true) {
    if (++guard > 4096) return false;
    FaceStep fs = internal::stepInFace(s, st, len, s.tol.geom);
    if (fs.kind == FaceStep::Kind::Finish) return accepted();
    if (fs.kind == FaceStep::Kind::Exit) {
      double step = fs.t;
      st.pos = fs.hit;
      internal::crossEdge(s, st, fs.edge);
      len -= step;
      continue;
    }
    // Vertex hit: branch over straight continuations.
    int classIdx = s.faces[st.face].cornerClass[fs.vertex];
    const VertexClass& cls = s.vertexClasses[classIdx];
    double remaining = len - fs.t;
    if (remaining <= s.tol.geom) return accepted();  // target at the cone point
    if (!cls.cone) {
      double phiBwd = 0.0, phiOut = 0.0;
      st = internal::continueThroughVertex(s, classIdx, st.face, fs.vertex, st.chart, fs.hit,
                                           st.dir, M_PI, phiBwd, phiOut);
      len = remaining;
      continue;
    }
    for (double theta : straightContinuations(cls.totalAngle)) {
      double phiBwd = 0.0, phiOut = 0.0;
      MarchState branch = internal::continueThroughVertex(
          s, classIdx, st.face, fs.vertex, st.chart, fs.hit, st.dir, theta, phiBwd, phiOut);
      if (validateStraight(s, branch, remaining, targets, depth + 1)) return true;
    }
    return false;
  }
}

struct CorridorIntegrand {
  const Surface* s;
  const GeodesicPath* p1;
  const GeodesicPath* p2;
  Isometry align;  // p2 plane -> p1 plane

  double operator()(double t) const {
    auto a = p1->pointAt(t);
    auto b = p2->pointAt(t);
    Vec2 y = align.apply(b.plane);
    double d = dist(a.plane, y);
    if (d > s->tol.geom) {
      bool ok = false;
      std::vector<LiftTarget> targets;
      for (const auto& rep : p2->chartsAt(t)) {
        targets.push_back({s->faces[rep.face].originalPolygon, align.compose(rep.chart)});
      }
      for (const auto& rep : p1->chartsAt(t)) {
        MarchState st;
        st.face = rep.face;
        st.chart = rep.chart;
        st.pos = rep.plane;
        st.dir = normalize(y - rep.plane);
        st.entryEdge = -1;
        if (validateStraight(*s, st, d, targets, 0)) { ok = true; break; }
      }
      if (!ok) throw NotComparableError("paths leave the shared developing corridor");
    }
    return d * std::exp(-2.0 * std::abs(t));
  }
};

template <typename F>
double adaptiveSimpson(const F& f, double a, double b, double fa, double fm, double fb, double tol,
                       int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return adaptiveSimpson(f, a, m, fa, flm, fm, 0.5 * tol, depth - 1) +
         adaptiveSimpson(f, m, b, fm, frm, fb, 0.5 * tol, depth - 1);
}

template <typename F>
double integrate(const F& f, double a, double b, double tol) {
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return adaptiveSimpson(f, a, b, fa, fm, fb, tol, 28);
}

}  // namespace

GsDistanceBound gsDistanceUpper(const GeodesicPath& p1, const GeodesicPath& p2, double T,
                                double quadratureTol) {
  if (T <= 0.0) throw InvalidArgumentError("gsDistanceUpper: T must be positive");
  const double slack = 1e-9;
  if (p1.t0 > -T + slack || p1.t1 < T - slack || p2.t0 > -T + slack || p2.t1 < T - slack) {
    throw InvalidArgumentError("gsDistanceUpper: both paths must cover [-T, T]");
  }
  const Surface& s = *p1.surface;

  // Candidate lift alignments: anchor at grid times where the polygons agree,
  // then keep the candidate with the smallest coarse sup of planar distance
  // (an anchor straddling a chart crossing can name a poor deck element).
  std::vector<Isometry> candidates;
  const int steps = 64;
  for (int k = 0; k <= steps; ++k) {
    double t = (k % 2 == 0 ? 1.0 : -1.0) * T * (k / 2) / (steps / 2);
    auto a = p1.pointAt(t);
    auto b = p2.pointAt(t);
    if (s.faces[a.face].originalPolygon != s.faces[b.face].originalPolygon) continue;
    Isometry m = a.chart.compose(b.chart.inverse());
    bool dup = false;
    for (const auto& c : candidates) {
      if (c.approxEquals(m, 1e-9)) { dup = true; break; }
    }
    if (!dup) candidates.push_back(m);
  }
  if (candidates.empty()) {
    throw NotComparableError("no shared chart found to anchor the lift pair");
  }
  Isometry align = candidates.front();
  if (candidates.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& m : candidates) {
      double sup = 0.0;
      for (int k = 0; k <= steps; ++k) {
        double t = -T + 2.0 * T * k / steps;
        sup = std::max(sup, dist(p1.pointAt(t).plane, m.apply(p2.pointAt(t).plane)));
      }
      if (sup < best) { best = sup; align = m; }
    }
  }

  CorridorIntegrand f{&s, &p1, &p2, align};
  GsDistanceBound out;
  out.bound = integrate(f, -T, 0.0, 0.5 * quadratureTol) + integrate(f, 0.0, T, 0.5 * quadratureTol);
  out.tail = s.diameterUpperBound * std::exp(-2.0 * T);
  return out;
}

}  // namespace flatflow
