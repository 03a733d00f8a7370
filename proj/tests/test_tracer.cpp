#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "flatflow/json_io.hpp"
#include "flatflow/saddle.hpp"
#include "flatflow/surface.hpp"
#include "flatflow/tracer.hpp"
#include "test_surfaces.hpp"

using namespace flatflow;

static Surface octagon() { return buildSurface(loadSurfaceDescriptor(testfile("octagon.surf"))); }

// Random interior point of the first polygon.
static Vec2 randomInterior(const Surface& s, std::mt19937_64& rng) {
  const auto& verts = s.polygons[0].vertices;
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int tries = 0; tries < 10000; ++tries) {
    Vec2 p{u(rng), u(rng)};
    bool inside = true;
    for (std::size_t i = 0; i < verts.size() && inside; ++i) {
      if (cross(verts[(i + 1) % verts.size()] - verts[i], p - verts[i]) < 0.05) inside = false;
    }
    if (inside) return p;
  }
  return {0.0, 0.0};
}

// Max perpendicular deviation of the re-developed path from a straight line.
static double straightnessDeviation(const Surface& s, const GeodesicPath& p) {
  std::vector<int> crossings;
  for (const auto& c : p.crossings) crossings.push_back(c.polygonEdge);
  int seedPoly = s.faces[p.segments.front().face].originalPolygon;
  auto charts = develop(s, seedPoly, Isometry::identity(), crossings);

  // Collect breakpoints: each subsegment's endpoints mapped through the
  // independently re-developed charts.
  std::vector<Vec2> pts;
  std::size_t chartIdx = 0;
  Isometry traceChart = p.segments.front().chart;
  for (const auto& seg : p.segments) {
    if (!seg.chart.approxEquals(traceChart, 1e-12)) {
      ++chartIdx;
      traceChart = seg.chart;
    }
    REQUIRE(chartIdx < charts.size());
    Isometry local = traceChart.inverse();
    pts.push_back(charts[chartIdx].place.apply(local.apply(seg.planeA)));
    pts.push_back(charts[chartIdx].place.apply(local.apply(seg.planeB)));
  }
  Vec2 a = pts.front(), b = pts.back();
  Vec2 d = normalize(b - a);
  double worst = 0.0;
  for (const auto& q : pts) worst = std::max(worst, std::abs(cross(d, q - a)));
  return worst;
}

TEST_CASE("straightness: random octagon traces unfold to straight lines") {
  Surface s = octagon();
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI);
  for (int i = 0; i < 100; ++i) {
    TraceStart st{"oct", randomInterior(s, rng), ang(rng)};
    TraceResult tr = trace(s, st, 20.0, ConePolicy::stop());
    if (tr.path.length() < 1.0) continue;  // early cone hit, nothing to check
    CHECK(straightnessDeviation(s, tr.path) <= 1e-6);
  }
}

TEST_CASE("unit speed: subsegment lengths sum to the parameter length") {
  Surface s = octagon();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI);
  for (int i = 0; i < 50; ++i) {
    TraceStart st{"oct", randomInterior(s, rng), ang(rng)};
    TraceResult tr = trace(s, st, 15.0, ConePolicy::bisect());
    double sum = 0.0;
    for (const auto& seg : tr.path.segments) {
      sum += dist(seg.planeA, seg.planeB);
      CHECK(dist(seg.planeA, seg.planeB) == doctest::Approx(seg.tB - seg.tA).epsilon(1e-9));
    }
    CHECK(sum == doctest::Approx(tr.path.length()).epsilon(1e-9));
  }
}

TEST_CASE("geodesic condition at every cone event") {
  Surface s = octagon();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI);
  ConePolicy policies[3] = {ConePolicy::bisect(), ConePolicy::turnPlusPi(),
                            ConePolicy::turnMinusPi()};
  for (int i = 0; i < 30; ++i) {
    TraceStart st{"oct", randomInterior(s, rng), ang(rng)};
    TraceResult tr = trace(s, st, 25.0, policies[i % 3]);
    for (const auto& ev : tr.path.events) {
      CHECK(std::min(ev.left, ev.right) >= M_PI - 1e-9);
      CHECK(ev.left + ev.right == doctest::Approx(6.0 * M_PI).epsilon(1e-9));
      double expectTheta = (ev.left <= ev.right) ? ev.left : -ev.right;
      CHECK(ev.theta == doctest::Approx(expectTheta).epsilon(1e-12));
    }
  }
}

TEST_CASE("horizontal cylinder trace has no cone events") {
  // The octagon's horizontal direction has a cylinder through the center.
  Surface s = octagon();
  TraceStart st{"oct", {0.0, 0.1}, 0.0};
  TraceResult tr = trace(s, st, 10.0, ConePolicy::stop());
  CHECK(tr.path.length() == doctest::Approx(10.0));
  CHECK(tr.path.events.empty());
  CHECK(!tr.path.coneHitTime.has_value());
  CHECK(straightnessDeviation(s, tr.path) <= 1e-9);
}

TEST_CASE("aiming exactly at the cone point: Stop truncates, Explicit continues") {
  Surface s = octagon();
  const auto& v = s.polygons[0].vertices;
  // Start at the center aimed at vertex 0.
  double angle = angleOf(v[0]);
  TraceStart st{"oct", {0.0, 0.0}, angle};
  double r = norm(v[0]);

  TraceResult stopped = trace(s, st, 5.0, ConePolicy::stop());
  REQUIRE(stopped.path.coneHitTime.has_value());
  CHECK(*stopped.path.coneHitTime == doctest::Approx(r).epsilon(1e-9));
  CHECK(stopped.path.truncated);

  TraceResult cont = trace(s, st, 5.0, ConePolicy::explicitAngles({M_PI + 1.0}));
  REQUIRE(cont.path.events.size() == 1);
  CHECK(cont.path.events[0].theta == doctest::Approx(M_PI + 1.0).epsilon(1e-12));
  CHECK(cont.path.events[0].left == doctest::Approx(M_PI + 1.0).epsilon(1e-12));
  CHECK(cont.path.events[0].right == doctest::Approx(6.0 * M_PI - (M_PI + 1.0)).epsilon(1e-9));
  CHECK(cont.path.length() == doctest::Approx(5.0));

  CHECK_THROWS_AS(trace(s, st, 5.0, ConePolicy::explicitAngles({0.5})), InvalidArgumentError);
  CHECK_THROWS_AS(trace(s, st, 5.0, ConePolicy::explicitAngles({3.5 * M_PI})),
                  InvalidArgumentError);
}

TEST_CASE("turning signature and window classification") {
  Surface s = octagon();
  const auto& v = s.polygons[0].vertices;
  TraceStart st{"oct", {0.0, 0.0}, angleOf(v[0])};

  TraceResult straightish = trace(s, st, 1.0, ConePolicy::stop());
  CHECK(turningSignature(straightish.path).empty());
  CHECK(!classifyWindow(straightish.path).regular);

  TraceResult biz = trace(s, st, 9.0, ConePolicy::bisect());
  auto sig = turningSignature(biz.path);
  REQUIRE(!sig.empty());
  CHECK(sig[0].second == doctest::Approx(3.0 * M_PI).epsilon(1e-12));
  CHECK(classifyWindow(biz.path).regular);
  CHECK(classifyWindow(biz.path).witnessTime == doctest::Approx(sig[0].first));

  TraceResult sing = trace(s, st, 9.0, ConePolicy::turnPlusPi());
  for (auto& [t, th] : turningSignature(sing.path)) CHECK(std::abs(th) == doctest::Approx(M_PI));
  CHECK(!classifyWindow(sing.path).regular);

  // Deterministic two-event path: chain saddle connections from the graph and
  // echo explicit angles at the joints.
  auto g = buildConcatGraph(s, 2.0);
  bool checked = false;
  for (std::size_t i = 0; i < g.nodes.size() && !checked; ++i) {
    for (const auto& e : g.adjacency[i]) {
      for (const auto& e2 : g.adjacency[e.to]) {
        const auto& sc1 = g.nodes[i];
        const auto& sc2 = g.nodes[e.to];
        TraceResult expl = traceFromCone(
            s, sc1.startCone, sc1.phiOut, sc1.length + sc2.length + g.nodes[e2.to].length * 0.5,
            ConePolicy::explicitAngles({e.joint.theta, e2.joint.theta}));
        auto sig2 = turningSignature(expl.path);
        REQUIRE(sig2.size() == 2);
        CHECK(sig2[0].second == doctest::Approx(e.joint.theta));
        CHECK(sig2[1].second == doctest::Approx(e2.joint.theta));
        checked = true;
        break;
      }
      if (checked) break;
    }
  }
  CHECK(checked);
}

TEST_CASE("flow shift identities") {
  Surface s = octagon();
  TraceStart st{"oct", {0.1, 0.2}, 0.3};
  TraceResult tr = trace(s, st, 12.0, ConePolicy::bisect());
  GeodesicPath p = flowShift(tr.path, 3.0);
  CHECK(p.t0 == doctest::Approx(-3.0));
  CHECK(p.t1 == doctest::Approx(9.0));
  GeodesicPath back = flowShift(p, -3.0);
  CHECK(back.t0 == doctest::Approx(0.0).epsilon(1e-12));
  auto a = tr.path.pointAt(5.0);
  auto b = p.pointAt(2.0);
  CHECK(dist(a.plane, b.plane) <= 1e-12);
}

TEST_CASE("gs distance: identical paths give only the tail") {
  Surface s = octagon();
  TraceStart st{"oct", {0.0, 0.1}, 0.0};
  TraceResult tr = trace(s, st, 44.0, ConePolicy::bisect());
  GeodesicPath centered = flowShift(tr.path, 22.0);
  auto b = gsDistanceUpper(centered, centered, 10.0);
  CHECK(b.bound <= 1e-9);
  CHECK(b.tail == doctest::Approx(s.diameterUpperBound * std::exp(-20.0)));
}

TEST_CASE("gs distance: flow shift has distance about s (unit-speed flow)") {
  Surface s = octagon();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI);
  int done = 0;
  for (int i = 0; i < 12 && done < 8; ++i) {
    TraceStart st{"oct", randomInterior(s, rng), ang(rng)};
    TraceResult tr = trace(s, st, 44.4, ConePolicy::bisect());
    GeodesicPath p1 = flowShift(tr.path, 22.0);
    for (double shift : {0.05, 0.1}) {
      GeodesicPath p2 = flowShift(p1, shift);
      auto b = gsDistanceUpper(p1, p2, 10.0);
      CHECK(std::abs(b.total() - shift) <=
            (shift + s.diameterUpperBound) * std::exp(-20.0) + 2e-6);
    }
    ++done;
  }
  CHECK(done > 0);
}

TEST_CASE("gs distance: parallel cylinder geodesics at transverse distance w") {
  Surface s = octagon();
  double w = 0.05;
  TraceStart a{"oct", {0.0, 0.0}, 0.0};
  TraceStart b{"oct", {0.0, w}, 0.0};
  GeodesicPath pa = flowShift(trace(s, a, 30.0, ConePolicy::stop()).path, 15.0);
  GeodesicPath pb = flowShift(trace(s, b, 30.0, ConePolicy::stop()).path, 15.0);
  auto bound = gsDistanceUpper(pa, pb, 10.0);
  // closed form: integral of w * exp(-2|t|) over [-10,10] = w(1 - exp(-20))
  CHECK(bound.bound == doctest::Approx(w * (1.0 - std::exp(-20.0))).epsilon(1e-4));
}

TEST_CASE("gs distance transfer properties (closeness, Lipschitz, decay)") {
  Surface s = octagon();
  TraceStart a{"oct", {0.0, 0.0}, 0.0};
  TraceStart b{"oct", {0.0, 0.07}, 0.0};
  GeodesicPath pa = flowShift(trace(s, a, 60.0, ConePolicy::stop()).path, 30.0);
  GeodesicPath pb = flowShift(trace(s, b, 60.0, ConePolicy::stop()).path, 30.0);
  double T = 10.0;
  auto base = gsDistanceUpper(pa, pb, T);

  // Closeness transfer: d_S(p1(0), p2(0)) <= 2 d_GS.
  CHECK(0.07 <= 2.0 * base.total() + 1e-6);

  // Lipschitz transfer for t in [0, 3].
  for (double t : {1.0, 2.0, 3.0}) {
    auto shifted = gsDistanceUpper(flowShift(pa, t), flowShift(pb, t), T);
    CHECK(shifted.total() <= std::exp(2.0 * t) * base.total() + 1e-6);
  }
}

TEST_CASE("agreement decay: paths equal on [a,b] are exponentially close inside") {
  Surface s = octagon();
  // Two geodesics that agree on a long initial window and then branch at a
  // cone point: follow the same saddle-connection word, end with +pi vs -pi.
  auto g = buildConcatGraph(s, 2.0);
  auto classes = collectClosedGeodesics(g, 5.0, GeodesicClassFilter::All);
  REQUIRE(!classes.empty());
  const auto* rec = &classes.front();
  for (const auto& r : classes) {
    if (r.period > rec->period) rec = &r;
  }
  // Unroll the word far enough to cover agreement length 25.
  std::vector<double> common;
  const auto& w = rec->word;
  double covered = 0.0;
  std::size_t j = 0;
  while (covered < 26.0) {
    covered += g.nodes[w[j % w.size()]].length;
    common.push_back(rec->jointThetas[(j + 1) % w.size()]);
    ++j;
  }
  double branchTime = covered;
  std::vector<double> w1 = common, w2 = common;
  w1.back() = M_PI;
  w2.back() = -M_PI;
  for (int k = 0; k < 40; ++k) { w1.push_back(M_PI); w2.push_back(-M_PI); }
  const auto& first = g.nodes[w[0]];
  GeodesicPath a = traceFromCone(s, first.startCone, first.phiOut, branchTime + 25.0,
                                 ConePolicy::explicitAngles(w1)).path;
  GeodesicPath b = traceFromCone(s, first.startCone, first.phiOut, branchTime + 25.0,
                                 ConePolicy::explicitAngles(w2)).path;
  // The two paths agree exactly on [0, branchTime]; centered inside, the
  // distance decays like exp(-2 min(|t-a|, |t-b|)).
  for (double back : {3.0, 5.0, 8.0}) {
    double tc = branchTime - back;
    auto bnd = gsDistanceUpper(flowShift(a, tc), flowShift(b, tc), 8.0);
    CHECK(bnd.total() <= std::exp(-2.0 * std::min(tc, back)) + 1e-5);
  }
}
