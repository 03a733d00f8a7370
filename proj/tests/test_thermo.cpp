#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "flatflow/json_io.hpp"
#include "flatflow/surface.hpp"
#include "flatflow/thermo.hpp"
#include "test_surfaces.hpp"

using namespace flatflow;

static Surface octagon() { return buildSurface(loadSurfaceDescriptor(testfile("octagon.surf"))); }
static Surface lshape() { return buildSurface(loadSurfaceDescriptor(testfile("lshape.surf"))); }

TEST_CASE("birkhoff integral: zero, constant, and two-polygon decomposition") {
  Surface s = lshape();
  auto g = buildConcatGraph(s, 3.0);
  auto classes = collectClosedGeodesics(g, 3.0, GeodesicClassFilter::All);
  REQUIRE(!classes.empty());
  const auto& rec = classes.front();

  CHECK(birkhoffIntegral(Potential::zero(s), rec) == 0.0);
  CHECK(birkhoffIntegral(Potential::constant(s, 3.5), rec) ==
        doctest::Approx(3.5 * rec.period).epsilon(1e-12));

  Potential phi = Potential::zero(s);
  phi.perPolygon[0] = 2.0;
  phi.perPolygon[1] = -1.0;
  phi.perPolygon[2] = 0.5;
  double byHand = 2.0 * rec.polygonOccupancy[0] - 1.0 * rec.polygonOccupancy[1] +
                  0.5 * rec.polygonOccupancy[2];
  CHECK(birkhoffIntegral(phi, rec) == doctest::Approx(byHand).epsilon(1e-12));
}

TEST_CASE("partition sum: zero potential counts classes; empty window is -inf") {
  Surface s = octagon();
  auto g = buildConcatGraph(s, 6.0);
  Potential zero = Potential::zero(s);
  auto ps = regularPartitionSum(g, zero, 6.0, 0.5);
  auto table = collectClosedGeodesics(g, 6.0, GeodesicClassFilter::Regular);
  long long expect = 0;
  for (const auto& r : table) {
    if (r.period > 5.5 && r.period <= 6.0) ++expect;
  }
  CHECK(ps.count == expect);
  CHECK(ps.logValue == doctest::Approx(std::log(double(expect))).epsilon(1e-12));

  auto empty = regularPartitionSum(g, zero, 1.2, 0.1);
  CHECK(empty.count == 0);
  CHECK(std::isinf(empty.logValue));
}

TEST_CASE("partition sums add exactly over disjoint windows") {
  Surface s = octagon();
  auto g = buildConcatGraph(s, 6.0);
  Potential phi = Potential::zero(s);
  phi.perPolygon[0] = 0.3;
  phi.offset = -0.1;
  double d1 = 0.7, d2 = 0.9;
  auto whole = regularPartitionSum(g, phi, 6.0, d1 + d2);
  auto right = regularPartitionSum(g, phi, 6.0, d1);
  auto left = regularPartitionSum(g, phi, 6.0 - d1, d2);
  CHECK(whole.count == right.count + left.count);
  double sumOfParts = std::log(std::exp(right.logValue) + std::exp(left.logValue));
  CHECK(whole.logValue == doctest::Approx(sumOfParts).epsilon(1e-12));
}

TEST_CASE("pressure estimate: constant-shift covariance of the slope") {
  Surface s = octagon();
  auto g = buildConcatGraph(s, 8.0);
  std::vector<double> grid{6.0, 7.0, 8.0};
  double delta = 0.5;
  Potential zero = Potential::zero(s);
  auto base = pressureEstimate(g, zero, grid, delta);
  double c = 0.8;
  auto shifted = pressureEstimate(g, Potential::constant(s, c), grid, delta);
  CHECK(std::abs(shifted.slope - base.slope - c) <= c * delta / grid.front() + 1e-9);
}

TEST_CASE("pressure estimate: positive regular slope, singular far below") {
  Surface s = octagon();
  auto g = buildConcatGraph(s, 8.0);
  std::vector<double> grid{6.0, 7.0, 8.0};
  Potential zero = Potential::zero(s);
  auto reg = pressureEstimate(g, zero, grid, 2.0, GeodesicClassFilter::Regular);
  CHECK(reg.slope > 0.05);
  auto sing = pressureEstimate(g, zero, grid, 2.0, GeodesicClassFilter::Singular);
  CHECK(sing.slope <= 0.5 * reg.slope);
  MESSAGE("octagon regular slope ", reg.slope, ", singular slope ", sing.slope);

  // Envelope check with fitted intercepts: log-sum minus Q*slope stays within
  // [-log Q + c1, delta*|phi| + c2] for constants read off the data.
  double c1 = std::numeric_limits<double>::infinity();
  double c2 = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double dev = reg.logSums[i] - grid[i] * reg.slope;
    c1 = std::min(c1, dev + std::log(grid[i]));
    c2 = std::max(c2, dev);
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double dev = reg.logSums[i] - grid[i] * reg.slope;
    CHECK(dev >= -std::log(grid[i]) + c1 - 1e-9);
    CHECK(dev <= 0.0 + c2 + 1e-9);
  }
}

TEST_CASE("pressure gap report bookkeeping") {
  Surface s = octagon();
  auto g = buildConcatGraph(s, 8.0);
  std::vector<double> grid{6.0, 7.0, 8.0};
  Potential zero = Potential::zero(s);
  auto rep0 = pressureGapReport(g, zero, grid, 2.0);
  CHECK(rep0.gap > 0.0);
  CHECK(rep0.nearlyConstantBound == doctest::Approx(0.5 * rep0.gap));
  CHECK(rep0.boundSatisfied);  // zero variation

  // Constant potentials shift both slopes equally within the window
  // distortion.
  auto rep5 = pressureGapReport(g, Potential::constant(s, 5.0), grid, 2.0);
  CHECK(std::abs(rep5.gap - rep0.gap) <= 2.0 * 5.0 * 2.0 / grid.front() + 1e-9);

  Potential big = Potential::zero(s);
  big.perPolygon[0] = rep0.nearlyConstantBound + 1.0;
  auto repBig = pressureGapReport(g, big, grid, 2.0);
  CHECK(!repBig.boundSatisfied);
  CHECK(std::isfinite(repBig.gap));
}

TEST_CASE("weighted orbit average: normalization and linearity") {
  Surface s = lshape();
  auto g = buildConcatGraph(s, 6.0);
  Potential phi = Potential::zero(s);
  phi.perPolygon[1] = 0.2;

  CHECK(weightedOrbitAverage(g, phi, 6.0, 0.5, Potential::constant(s, 1.0)) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(weightedOrbitAverage(g, phi, 6.0, 0.5, Potential::constant(s, -2.5)) ==
        doctest::Approx(-2.5).epsilon(1e-12));

  Potential fA = Potential::zero(s);
  fA.perPolygon[0] = 1.0;
  Potential fB = Potential::zero(s);
  fB.perPolygon[2] = 1.0;
  Potential fAB = Potential::zero(s);
  fAB.perPolygon[0] = 1.0;
  fAB.perPolygon[2] = 1.0;
  double a = weightedOrbitAverage(g, phi, 6.0, 0.5, fA);
  double b = weightedOrbitAverage(g, phi, 6.0, 0.5, fB);
  double ab = weightedOrbitAverage(g, phi, 6.0, 0.5, fAB);
  CHECK(ab == doctest::Approx(a + b).epsilon(1e-12));
  CHECK(a >= 0.0);
  CHECK(a <= 1.0);

  CHECK_THROWS_WITH_AS(weightedOrbitAverage(g, phi, 1.2, 0.1, fA),
                       doctest::Contains("EmptyWindow"), NotFoundError);
}

TEST_CASE("orbit means are reparametrization invariant") {
  // The occupancy-based orbit mean does not depend on the representative's
  // start point: recompute occupancy from a rotated word.
  Surface s = lshape();
  auto g = buildConcatGraph(s, 4.0);
  auto classes = collectClosedGeodesics(g, 4.0, GeodesicClassFilter::Regular);
  REQUIRE(!classes.empty());
  Potential f = Potential::zero(s);
  f.perPolygon[0] = 1.0;
  int tested = 0;
  for (const auto& rec : classes) {
    if (rec.word.size() < 2 || tested++ > 20) continue;
    double base = birkhoffIntegral(f, rec) / rec.period;
    for (std::size_t r = 1; r < rec.word.size(); ++r) {
      double occ = 0.0;
      for (std::size_t i = 0; i < rec.word.size(); ++i) {
        occ += g.nodes[rec.word[(r + i) % rec.word.size()]].polygonOccupancy[0];
      }
      CHECK(occ / rec.period == doctest::Approx(base).epsilon(1e-12));
    }
  }
}

TEST_CASE("equidistribution series: constant observable, diffs, nesting") {
  Surface s = lshape();
  auto g = buildConcatGraph(s, 6.0);
  Potential zero = Potential::zero(s);
  std::vector<double> grid{4.0, 5.0, 6.0};

  auto ones = equidistributionSeries(g, zero, grid, 0.5, Potential::constant(s, 1.0));
  for (const auto& pt : ones.points) CHECK(pt.value == doctest::Approx(1.0).epsilon(1e-12));
  for (double d : ones.successiveDiffs) CHECK(d <= 1e-12);

  Potential f = Potential::zero(s);
  f.perPolygon[0] = 1.0;
  auto series = equidistributionSeries(g, zero, grid, 0.5, f);
  CHECK(series.points.size() == 3);
  CHECK(series.successiveDiffs.size() == 2);
  for (const auto& pt : series.points) {
    CHECK(pt.value > 0.0);
    CHECK(pt.value < 1.0);
    CHECK(pt.count > 0);
  }
}

TEST_CASE("separated-set estimator: single seed and duplicate collapse") {
  Surface s = octagon();
  Potential phi = Potential::zero(s);
  phi.perPolygon[0] = 0.25;

  TraceStart st{"oct", {0.05, 0.12}, 0.4};
  GeodesicPath seed = trace(s, st, 9.0, ConePolicy::bisect()).path;
  double single = separatedSetPressureLower(s, phi, {seed}, 8.0, 0.1);
  double expect = birkhoffPathIntegral(seed, phi, 0.0, 8.0) / 8.0;
  CHECK(single == doctest::Approx(expect).epsilon(1e-9));

  double dup = separatedSetPressureLower(s, phi, {seed, seed, seed}, 8.0, 0.1);
  CHECK(dup == doctest::Approx(single).epsilon(1e-9));
}

TEST_CASE("separated-set estimator lies near or below the orbit-growth slope") {
  Surface s = octagon();
  auto g = buildConcatGraph(s, 8.0);
  Potential zero = Potential::zero(s);
  auto reg = pressureEstimate(g, zero, {6.0, 7.0, 8.0}, 2.0);

  // Seeds from distinct closed geodesics.
  auto classes = collectClosedGeodesics(g, 6.0, GeodesicClassFilter::Regular);
  std::vector<GeodesicPath> seeds;
  for (std::size_t i = 0; i < classes.size() && seeds.size() < 60; i += 37) {
    seeds.push_back(materializeClosedGeodesic(g, classes[i], 0.0, 8.5));
  }
  double est = separatedSetPressureLower(s, zero, seeds, 8.0, 0.1);
  CHECK(est <= reg.slope + 0.2);
  MESSAGE("separated-set estimate ", est, " vs slope ", reg.slope);
}
