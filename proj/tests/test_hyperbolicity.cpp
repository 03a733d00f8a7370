#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "flatflow/hyperbolicity.hpp"
#include "flatflow/json_io.hpp"
#include "flatflow/saddle.hpp"
#include "flatflow/surface.hpp"
#include "oracle_lambda.hpp"
#include "test_surfaces.hpp"

using namespace flatflow;

static Surface octagon() { return buildSurface(loadSurfaceDescriptor(testfile("octagon.surf"))); }

static HyperbolicityConfig octagonDefaults(const Surface& s) {
  return HyperbolicityConfig::defaults(1.0, s.maxExcess());
}

TEST_CASE("single-event formulas") {
  HyperbolicityConfig cfg;
  cfg.scale = 0.49;
  cfg.threshold = 0.1;
  double beta = 0.7;
  // Periodic with one excess turn (period long enough to isolate cases).
  auto tl = TurnTimeline::periodic(100.0, {{0.0, M_PI + beta}});

  // At the event: both branches agree, value beta/scale.
  CHECK(hyperbolicity(tl, 0.0, cfg) == doctest::Approx(beta / cfg.scale).epsilon(1e-12));
  // Event at distance 0 forward.
  CHECK(hyperbolicityForward(tl, 0.0, cfg) == doctest::Approx(beta / cfg.scale));
  // Event at distance 2s forward.
  CHECK(hyperbolicityForward(tl, -2.0 * cfg.scale, cfg) ==
        doctest::Approx(beta / (2.0 * cfg.scale)));
  // Mirror.
  CHECK(hyperbolicityBackward(tl, 2.0 * cfg.scale, cfg) ==
        doctest::Approx(beta / (2.0 * cfg.scale)));
}

TEST_CASE("no excess turns: meter vanishes (cylinder core)") {
  HyperbolicityConfig cfg;
  cfg.scale = 0.49;
  cfg.threshold = 0.1;
  auto tl = TurnTimeline::periodic(3.0, {{0.5, M_PI}, {1.7, -M_PI}});
  CHECK(hyperbolicity(tl, 0.0, cfg) == 0.0);
  CHECK(hyperbolicityIntegral(tl, 0.0, 30.0, cfg) == 0.0);
  CHECK(!meetsThreshold(tl, 1.0, cfg));
  CHECK(!isGoodSegment(tl, 0.0, 5.0, cfg));
  auto d = decompose(tl, 0.0, 5.0, cfg);
  CHECK(d.prefixEnd == doctest::Approx(5.0));  // prefix swallows everything
}

TEST_CASE("two-event min case (spec example 3)") {
  HyperbolicityConfig cfg;
  cfg.scale = 0.49;
  cfg.threshold = 0.1;
  double s = cfg.scale;
  double b1 = 0.6, b2 = 0.9;
  // Turns at -s and +2s, evaluated at 0: the event at exactly -s is outside
  // (-s, 0], so the min branch applies.
  auto tl = TurnTimeline::window(-10.0, 10.0, {{-s, M_PI + b1}, {2.0 * s, M_PI + b2}});
  double expect = std::min(b1 / s, b2 / (2.0 * s));
  CHECK(hyperbolicity(tl, 0.0, cfg) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("windows throw HorizonError when uncertified") {
  HyperbolicityConfig cfg;
  cfg.scale = 0.49;
  cfg.threshold = 0.1;
  auto tl = TurnTimeline::window(0.0, 10.0, {{5.0, M_PI + 1.0}});
  CHECK_THROWS_AS(hyperbolicity(tl, 6.0, cfg), HorizonError);   // no future event
  CHECK_THROWS_AS(hyperbolicity(tl, 4.0, cfg), HorizonError);   // no past event
  CHECK(hyperbolicityForward(tl, 4.0, cfg) == doctest::Approx(1.0 / 1.0));
}

TEST_CASE("meter agrees with the literal-transcription oracle on closed geodesics") {
  Surface s = octagon();
  auto g = buildConcatGraph(s, 4.0);
  auto classes = collectClosedGeodesics(g, 5.0, GeodesicClassFilter::Regular);
  REQUIRE(classes.size() >= 10);
  HyperbolicityConfig cfg = octagonDefaults(s);
  std::mt19937_64 rng(3);
  int tested = 0;
  for (const auto& rec : classes) {
    if (tested++ >= 20) break;
    auto tl = TurnTimeline::fromClosedGeodesic(g, rec);
    auto oracle = oracle::LambdaOracle::fromRecord(rec, cfg.scale, -3.0 * rec.period,
                                                   3.0 * rec.period);
    std::uniform_real_distribution<double> ts(0.0, rec.period);
    for (int k = 0; k < 200; ++k) {
      double t = ts(rng);
      INFO("class ", rec.canonicalKey(), " t=", t);
      CHECK(hyperbolicity(tl, t, cfg) == doctest::Approx(oracle.value(t)).epsilon(1e-12));
      CHECK(hyperbolicityForward(tl, t, cfg) == doctest::Approx(oracle.forward(t)).epsilon(1e-12));
      CHECK(hyperbolicityBackward(tl, t, cfg) ==
            doctest::Approx(oracle.backward(t)).epsilon(1e-12));
    }
  }
}

TEST_CASE("range bound: meter at most maxExcess/(2*scale)") {
  Surface s = octagon();
  auto g = buildConcatGraph(s, 4.0);
  auto classes = collectClosedGeodesics(g, 4.5, GeodesicClassFilter::All);
  HyperbolicityConfig cfg = octagonDefaults(s);
  double bound = s.maxExcess() / (2.0 * cfg.scale);
  std::mt19937_64 rng(9);
  for (const auto& rec : classes) {
    auto tl = TurnTimeline::fromClosedGeodesic(g, rec);
    std::uniform_real_distribution<double> ts(0.0, rec.period);
    for (int k = 0; k < 20; ++k) {
      double v = hyperbolicity(tl, ts(rng), cfg);
      CHECK(v >= 0.0);
      CHECK(v <= bound + 1e-12);
    }
  }
}

TEST_CASE("one-sided vanishing on closed geodesics (Sing characterization)") {
  Surface s = octagon();
  auto g = buildConcatGraph(s, 4.0);
  auto classes = collectClosedGeodesics(g, 5.0, GeodesicClassFilter::All);
  HyperbolicityConfig cfg = octagonDefaults(s);
  std::mt19937_64 rng(13);
  for (const auto& rec : classes) {
    auto tl = TurnTimeline::fromClosedGeodesic(g, rec);
    bool anyExcess = false;
    for (double th : rec.jointThetas) {
      if (std::abs(th) > M_PI + 1e-9) anyExcess = true;
    }
    std::uniform_real_distribution<double> ts(0.0, rec.period);
    double t = ts(rng);
    double v = hyperbolicity(tl, t, cfg);
    if (rec.singular) {
      CHECK(!anyExcess);
      CHECK(v == 0.0);
    } else {
      CHECK(anyExcess);
      // On a periodic regular orbit the meter never vanishes: both the next
      // and previous excess turns exist at bounded distance.
      CHECK(v > 0.0);
    }
  }
}

TEST_CASE("integral matches quadrature of the pointwise meter") {
  Surface s = octagon();
  auto g = buildConcatGraph(s, 4.0);
  auto classes = collectClosedGeodesics(g, 5.0, GeodesicClassFilter::Regular);
  REQUIRE(!classes.empty());
  HyperbolicityConfig cfg = octagonDefaults(s);
  const auto& rec = classes.front();
  auto tl = TurnTimeline::fromClosedGeodesic(g, rec);
  double a = 0.37, b = a + 2.0 * rec.period;
  double exact = hyperbolicityIntegral(tl, a, b, cfg);
  // Simpson quadrature of the pointwise values.
  int n = 20000;
  double h = (b - a) / n;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * hyperbolicity(tl, a + i * h, cfg);
  }
  acc *= h / 3.0;
  CHECK(exact == doctest::Approx(acc).epsilon(1e-5));
}

TEST_CASE("good-segment test on synthetic dense strong turns") {
  HyperbolicityConfig cfg;
  cfg.scale = 0.49;
  cfg.threshold = 0.5;
  // All gaps below scale and every excess at least 2*scale*threshold: the
  // meter is at least 2*threshold everywhere.
  double beta = 2.0 * cfg.scale * cfg.threshold + 0.05;
  std::vector<TurnEvent> events;
  for (int k = 0; k < 25; ++k) events.push_back({0.4 * k, M_PI + beta});
  auto tl = TurnTimeline::periodic(0.4 * 25, events);
  CHECK(isGoodSegment(tl, 0.0, 8.0, cfg));
  CHECK(isGoodSegment(tl, 1.3, 5.0, cfg));
  CHECK(!isBadSegment(tl, 0.0, 8.0, cfg));

  // Vacuous at length zero.
  CHECK(isGoodSegment(tl, 0.0, 0.0, cfg));
}

TEST_CASE("decompose: already-good, all-zero, and constructed crossing") {
  HyperbolicityConfig cfg;
  cfg.scale = 0.49;
  cfg.threshold = 0.3;

  // Already good: p = 0, q = len.
  double beta = 2.0 * cfg.scale * cfg.threshold + 0.05;
  std::vector<TurnEvent> events;
  for (int k = 0; k < 25; ++k) events.push_back({0.4 * k, M_PI + beta});
  auto good = TurnTimeline::periodic(10.0, events);
  auto d1 = decompose(good, 0.0, 6.0, cfg);
  CHECK(d1.prefixEnd == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(d1.suffixStart == doctest::Approx(6.0).epsilon(1e-9));

  // Meter-zero: prefix swallows the segment.
  auto zero = TurnTimeline::periodic(5.0, {});
  auto d2 = decompose(zero, 0.0, 4.0, cfg);
  CHECK(d2.prefixEnd == doctest::Approx(4.0));

  // Quiet start, then strong turns from time 1: the prefix boundary lands
  // within 1e-6 of the predicted average crossing point.
  double strong = 1000.0 * cfg.scale * cfg.threshold;
  std::vector<TurnEvent> lateEvents;
  for (int k = 0; k < 40; ++k) lateEvents.push_back({1.0 + cfg.scale + 0.3 * k, M_PI + strong});
  auto late = TurnTimeline::window(-50.0, 50.0,
                                   [&] {
                                     auto v = lateEvents;
                                     v.push_back({-40.0, M_PI + 0.0001});
                                     return v;
                                   }());
  auto d3 = decompose(late, 0.0, 2.0, cfg);
  // The meter turns on at 1.0 (scale-proximity of the event at 1 + scale);
  // before that it is essentially zero, so the average first reaches the
  // threshold just after 1.0.
  CHECK(d3.prefixEnd >= 1.0 - 1e-6);
  CHECK(d3.prefixEnd <= 1.0 + cfg.scale);
  CHECK(d3.suffixStart >= d3.prefixEnd);
}

TEST_CASE("good segments certify the distance-to-cone witness") {
  // For lambda > eta at time t there is an excess turn within maxExcess/(2 eta)
  // of t with excess at least scale*eta.
  Surface s = octagon();
  auto g = buildConcatGraph(s, 4.0);
  auto classes = collectClosedGeodesics(g, 6.0, GeodesicClassFilter::Regular);
  HyperbolicityConfig cfg = octagonDefaults(s);
  double radius = s.maxExcess() / (2.0 * cfg.threshold);
  std::mt19937_64 rng(21);
  int checked = 0;
  for (const auto& rec : classes) {
    if (checked > 4000) break;
    auto tl = TurnTimeline::fromClosedGeodesic(g, rec);
    std::uniform_real_distribution<double> ts(0.0, rec.period);
    for (int k = 0; k < 25; ++k) {
      double t = ts(rng);
      if (hyperbolicity(tl, t, cfg) <= cfg.threshold) continue;
      ++checked;
      bool witness = false;
      auto scan = [&](double c, double th) {
        if (std::abs(c - t) <= radius && std::abs(th) - M_PI >= cfg.scale * cfg.threshold) {
          witness = true;
        }
      };
      for (long rep = -3; rep <= 3; ++rep) {
        for (std::size_t i = 0; i < rec.word.size(); ++i) {
          scan(rec.eventTimes[i] + rep * rec.period, rec.jointThetas[i]);
        }
      }
      CHECK(witness);
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("threshold regime warning") {
  Surface s = octagon();
  HyperbolicityConfig cfg = octagonDefaults(s);
  CHECK(thresholdRegimeWarning(s, cfg).empty());
  cfg.threshold = s.minExcess() / (2.0 * cfg.scale) + 1.0;
  CHECK(!thresholdRegimeWarning(s, cfg).empty());
}

TEST_CASE("good windows exist on strongly turning octagon closed geodesics") {
  Surface s = octagon();
  auto g = buildConcatGraph(s, 4.0);
  auto classes = collectClosedGeodesics(g, 8.0, GeodesicClassFilter::Regular);
  HyperbolicityConfig cfg = octagonDefaults(s);
  int good = 0;
  for (const auto& rec : classes) {
    auto tl = TurnTimeline::fromClosedGeodesic(g, rec);
    if (isGoodSegment(tl, 0.0, rec.period, cfg)) ++good;
  }
  MESSAGE("good full-period classes: ", good, " of ", classes.size());
  CHECK(good > 0);
}
