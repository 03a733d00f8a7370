#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "flatflow/json_io.hpp"
#include "flatflow/surface.hpp"
#include "test_surfaces.hpp"

using namespace flatflow;

TEST_CASE("octagon builds with genus 2 and one 6*pi cone class") {
  Surface s = buildSurface(loadSurfaceDescriptor(testfile("octagon.surf")));
  CHECK(s.genus == 2);
  CHECK(s.coneCount() == 1);
  CHECK(s.vertexClasses.size() == 1);
  CHECK(s.coneClass(0).totalAngle == doctest::Approx(6.0 * M_PI).epsilon(1e-12));
  CHECK(std::abs(s.coneClass(0).totalAngle - 6.0 * M_PI) <= 1e-9);
  CHECK(s.gaussBonnetResidual <= 1e-9);
  CHECK(s.maxGluingRoundTrip <= 1e-12);
  CHECK(s.minExcess() == doctest::Approx(4.0 * M_PI));
  CHECK(s.maxExcess() == doctest::Approx(4.0 * M_PI));
}

TEST_CASE("lshape builds with genus 2 and one 6*pi cone class") {
  Surface s = buildSurface(loadSurfaceDescriptor(testfile("lshape.surf")));
  CHECK(s.genus == 2);
  CHECK(s.vertexClasses.size() == 1);
  CHECK(std::abs(s.coneClass(0).totalAngle - 6.0 * M_PI) <= 1e-9);
  CHECK(s.gaussBonnetResidual <= 1e-9);
}

TEST_CASE("square torus is rejected: no cone points") {
  SurfaceDescriptor d;
  d.name = "torus";
  d.polygons.push_back({"sq", {{0, 0}, {1, 0}, {1, 1}, {0, 1}}});
  d.gluings.push_back({{"sq", 0}, {"sq", 2}});
  d.gluings.push_back({{"sq", 1}, {"sq", 3}});
  CHECK_THROWS_WITH_AS(buildSurface(d), doctest::Contains("no cone points"), ValidationError);
}

TEST_CASE("octagon with a gluing removed is rejected: unglued edge") {
  SurfaceDescriptor d = loadSurfaceDescriptor(testfile("octagon.surf"));
  d.gluings.pop_back();
  CHECK_THROWS_WITH_AS(buildSurface(d), doctest::Contains("unglued edge"), ValidationError);
}

TEST_CASE("mismatched edge lengths are rejected") {
  SurfaceDescriptor d;
  d.polygons.push_back({"a", {{0, 0}, {2, 0}, {2, 1}, {0, 1}}});
  d.gluings.push_back({{"a", 0}, {"a", 1}});
  d.gluings.push_back({{"a", 2}, {"a", 3}});
  CHECK_THROWS_WITH_AS(buildSurface(d), doctest::Contains("length mismatch"), ValidationError);
}

TEST_CASE("positive curvature is rejected: angle < 2*pi") {
  // Two equilateral triangles glued along all three edges (a pillow).
  double h = std::sqrt(3.0) / 2.0;
  SurfaceDescriptor d;
  d.polygons.push_back({"up", {{0, 0}, {1, 0}, {0.5, h}}});
  d.polygons.push_back({"dn", {{0, 0}, {1, 0}, {0.5, h}}});
  d.gluings.push_back({{"up", 0}, {"dn", 0}});
  d.gluings.push_back({{"up", 1}, {"dn", 2}});
  d.gluings.push_back({{"up", 2}, {"dn", 1}});
  CHECK_THROWS_WITH_AS(buildSurface(d), doctest::Contains("angle < 2*pi"), ValidationError);
}

TEST_CASE("clockwise polygon is rejected") {
  SurfaceDescriptor d;
  d.polygons.push_back({"a", {{0, 1}, {1, 1}, {1, 0}, {0, 0}}});
  d.gluings.push_back({{"a", 0}, {"a", 2}});
  d.gluings.push_back({{"a", 1}, {"a", 3}});
  CHECK_THROWS_AS(buildSurface(d), ValidationError);
}

TEST_CASE("develop: identity, involution, and octagon translation holonomy") {
  Surface s = buildSurface(loadSurfaceDescriptor(testfile("octagon.surf")));

  auto charts = develop(s, 0, Isometry::identity(), {});
  REQUIRE(charts.size() == 1);
  CHECK(charts[0].place.approxEquals(Isometry::identity(), 0.0));

  for (int e = 0; e < 8; ++e) {
    auto rt = develop(s, 0, Isometry::identity(), {e, (e + 4) % 8});
    REQUIRE(rt.size() == 3);
    CHECK(rt[2].place.approxEquals(Isometry::identity(), 1e-12));
  }

  // Crossing edge 5: pure translation. The neighbor copy is placed so its
  // edge 1 (v1 -> v2) coincides with edge 5 reversed (v6 -> v5), so the
  // translation is v[6] - v[1].
  const auto& v = s.polygons[0].vertices;
  auto ch = develop(s, 0, Isometry::identity(), {5});
  REQUIRE(ch.size() == 2);
  const Isometry& g = ch[1].place;
  CHECK(std::abs(g.c - 1.0) <= 1e-12);
  CHECK(std::abs(g.s) <= 1e-12);
  CHECK(g.tx == doctest::Approx(v[6].x - v[1].x).epsilon(1e-12));
  CHECK(g.ty == doctest::Approx(v[6].y - v[1].y).epsilon(1e-12));
}

TEST_CASE("develop is chart-associative along random walks") {
  Surface s = buildSurface(loadSurfaceDescriptor(testfile("lshape.surf")));
  std::vector<int> w1{0, 1, 2}, w2{3, 0, 1};
  auto full = develop(s, 0, Isometry::identity(), {0, 1, 2, 3, 0, 1});
  auto firstHalf = develop(s, 0, Isometry::identity(), w1);
  auto secondHalf = develop(s, firstHalf.back().polygon, firstHalf.back().place, w2);
  CHECK(full.back().place.approxEquals(secondHalf.back().place, 1e-12));
  CHECK(full.back().polygon == secondHalf.back().polygon);
}

TEST_CASE("cone direction circle bookkeeping is consistent") {
  Surface s = buildSurface(loadSurfaceDescriptor(testfile("octagon.surf")));
  const VertexClass& cls = s.coneClass(0);
  REQUIRE(cls.corners.size() == 8);
  for (std::size_t i = 0; i < cls.corners.size(); ++i) {
    CHECK(cls.offsets[i] == doctest::Approx(i * 0.75 * M_PI).epsilon(1e-12));
  }
  CornerRef c;
  double u = 0.0;
  s.resolveDirection(0, 5.0, c, u);
  CHECK(s.globalAngle(0, c, u) == doctest::Approx(5.0).epsilon(1e-12));
}
