#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "flatflow/json_io.hpp"
#include "flatflow/saddle.hpp"
#include "flatflow/surface.hpp"
#include "oracle_unfold.hpp"
#include "test_surfaces.hpp"

using namespace flatflow;

static Surface octagon() { return buildSurface(loadSurfaceDescriptor(testfile("octagon.surf"))); }
static Surface lshape() { return buildSurface(loadSurfaceDescriptor(testfile("lshape.surf"))); }

TEST_CASE("octagon: no saddle connections below length 1") {
  Surface s = octagon();
  CHECK(enumerateSaddleConnections(s, 0.5).empty());
  CHECK(enumerateSaddleConnections(s, 0.999).empty());
}

TEST_CASE("octagon: exactly 8 directed saddle connections at length 1") {
  Surface s = octagon();
  auto scs = enumerateSaddleConnections(s, 1.0);
  CHECK(scs.size() == 8);
  for (const auto& sc : scs) {
    CHECK(sc.length == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sc.startCone == 0);
    CHECK(sc.endCone == 0);
  }
}

TEST_CASE("shortest saddle connection: octagon 1, scaled octagon 2, lshape 1") {
  Surface s = octagon();
  CHECK(shortestSaddleConnection(s) == doctest::Approx(1.0).epsilon(1e-12));

  SurfaceDescriptor d = loadSurfaceDescriptor(testfile("octagon.surf"));
  for (auto& p : d.polygons) {
    for (auto& v : p.vertices) { v.x *= 2.0; v.y *= 2.0; }
  }
  Surface s2 = buildSurface(d);
  CHECK(shortestSaddleConnection(s2) == doctest::Approx(2.0).epsilon(1e-12));

  Surface l = lshape();
  CHECK(shortestSaddleConnection(l) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("enumeration matches the brute-force tracing oracle at small radii") {
  for (const char* file : {"octagon.surf", "lshape.surf"}) {
    Surface s = buildSurface(loadSurfaceDescriptor(testfile(file)));
    for (double maxLen : {1.0, 2.0, 3.0}) {
      auto scs = enumerateSaddleConnections(s, maxLen);
      auto ora = oracle::enumerateByTracing(s, maxLen);
      INFO(file, " maxLen=", maxLen, " got ", scs.size(), " oracle ", ora.size());
      CHECK(oracle::matches(s, ora, scs));
    }
  }
}

TEST_CASE("counting monotonicity and perturbation stability") {
  Surface s = octagon();
  std::size_t prev = 0;
  for (double L : {1.0, 1.5, 2.0, 2.5, 3.0}) {
    auto scs = enumerateSaddleConnections(s, L);
    CHECK(scs.size() >= prev);
    prev = scs.size();
    auto up = enumerateSaddleConnections(s, L + 1e-7);
    auto dn = enumerateSaddleConnections(s, L - 1e-7);
    // L = attained length 1,2,... handled: only compare the two perturbed
    // counts when L itself is not attained.
    bool attained = false;
    for (const auto& sc : scs) {
      if (std::abs(sc.length - L) <= 1e-6) attained = true;
    }
    if (!attained) {
      CHECK(up.size() == scs.size());
      CHECK(dn.size() == scs.size());
    }
  }
}

TEST_CASE("reversal is a fixed-point-free involution") {
  Surface s = octagon();
  auto scs = enumerateSaddleConnections(s, 3.0);
  for (const auto& sc : scs) {
    REQUIRE(sc.reverseId >= 0);
    const auto& rev = scs[sc.reverseId];
    CHECK(rev.reverseId == sc.id);
    CHECK(sc.reverseId != sc.id);
    CHECK(rev.length == doctest::Approx(sc.length).epsilon(1e-12));
    CHECK(rev.startCone == sc.endCone);
  }
}

TEST_CASE("every enumerated saddle connection re-traces to its endpoint") {
  // retraceOccupancy inside the enumeration already throws on mismatch; here
  // we double-check the occupancy sums to the length.
  Surface s = lshape();
  auto scs = enumerateSaddleConnections(s, 3.0);
  for (const auto& sc : scs) {
    double tot = 0.0;
    for (double o : sc.polygonOccupancy) tot += o;
    CHECK(tot == doctest::Approx(sc.length).epsilon(1e-9));
  }
}

TEST_CASE("saddle connection followed by its reversal is never admissible") {
  Surface s = octagon();
  auto g = buildConcatGraph(s, 2.0);
  for (const auto& sc : g.nodes) {
    CHECK(!admissibleConcatenation(s, sc, g.nodes[sc.reverseId]).has_value());
  }
}

TEST_CASE("joint angles satisfy the band pi <= |theta| <= L/2") {
  Surface s = octagon();
  auto g = buildConcatGraph(s, 2.0);
  double L = s.coneClass(0).totalAngle;
  std::size_t edges = 0;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    for (const auto& e : g.adjacency[i]) {
      ++edges;
      CHECK(std::abs(e.joint.theta) >= M_PI - 1e-9);
      CHECK(std::abs(e.joint.theta) <= 0.5 * L + 1e-9);
      CHECK(e.joint.left + e.joint.right == doctest::Approx(L).epsilon(1e-12));
    }
  }
  CHECK(edges > 0);
}

TEST_CASE("admissible joints reproduce under tracing through the cone") {
  Surface s = octagon();
  auto g = buildConcatGraph(s, 1.5);
  // For each admissible pair, trace sc1 then turn by theta and confirm the
  // continuation realizes sc2.
  std::size_t checked = 0;
  for (std::size_t i = 0; i < g.nodes.size() && checked < 64; ++i) {
    for (const auto& e : g.adjacency[i]) {
      const auto& sc1 = g.nodes[i];
      const auto& sc2 = g.nodes[e.to];
      TraceResult tr = traceFromCone(s, sc1.startCone, sc1.phiOut,
                                     sc1.length + sc2.length + 1e-6,
                                     ConePolicy::explicitAngles({e.joint.theta, M_PI}));
      REQUIRE(tr.path.events.size() >= 1);
      CHECK(tr.path.events[0].t == doctest::Approx(sc1.length).epsilon(1e-9));
      CHECK(tr.path.events[0].theta == doctest::Approx(e.joint.theta).epsilon(1e-9));
      // The next cone hit must occur exactly at sc1.length + sc2.length.
      REQUIRE(tr.path.events.size() >= 2);
      CHECK(tr.path.events[1].t == doctest::Approx(sc1.length + sc2.length).epsilon(1e-9));
      ++checked;
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("graph edge count matches all-pairs admissibility") {
  Surface s = octagon();
  auto g = buildConcatGraph(s, 2.0);
  std::size_t edges = 0, brute = 0;
  for (const auto& a : g.adjacency) edges += a.size();
  for (const auto& n1 : g.nodes) {
    for (const auto& n2 : g.nodes) {
      if (n1.endCone == n2.startCone && admissibleConcatenation(s, n1, n2)) ++brute;
    }
  }
  CHECK(edges == brute);
}

TEST_CASE("empty graph below the shortest saddle connection") {
  Surface s = octagon();
  auto g = buildConcatGraph(s, 0.5);
  CHECK(g.nodes.empty());
  CHECK(collectClosedGeodesics(g, 4.0, GeodesicClassFilter::All).empty());
}
