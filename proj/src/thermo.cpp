#include "flatflow/thermo.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "flatflow/json_io.hpp"

namespace flatflow {

using nlohmann::json;

Potential parsePotential(const Surface& s, const std::string& jsonText) {
  json j;
  try {
    j = json::parse(jsonText);
  } catch (const std::exception& e) {
    throw ValidationError(std::string("potential file is not valid JSON: ") + e.what());
  }
  Potential phi = Potential::zero(s);
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() == "offset") {
      phi.offset = it.value().get<double>();
    } else {
      phi.perPolygon[s.polygonIndex(it.key())] = it.value().get<double>();
    }
  }
  return phi;
}

Potential loadPotential(const Surface& s, const std::string& path) {
  return parsePotential(s, readTextFile(path));
}

double birkhoffIntegral(const Potential& phi, const ClosedGeodesicRecord& rec) {
  double v = phi.offset * rec.period;
  for (std::size_t p = 0; p < rec.polygonOccupancy.size(); ++p) {
    v += phi.perPolygon[p] * rec.polygonOccupancy[p];
  }
  return v;
}

double birkhoffPathIntegral(const GeodesicPath& p, const Potential& phi, double from, double to) {
  double v = phi.offset * (to - from);
  for (const auto& seg : p.segments) {
    double a = std::max(seg.tA, from), b = std::min(seg.tB, to);
    if (b > a) v += phi.perPolygon[p.surface->faces[seg.face].originalPolygon] * (b - a);
  }
  return v;
}

double birkhoffIntervalIntegral(const ConcatGraph& g, const ClosedGeodesicRecord& rec,
                                double from, double to, const Potential& phi) {
  GeodesicPath path = materializeClosedGeodesic(g, rec, from, to);
  return birkhoffPathIntegral(path, phi, from, to);
}

namespace {

struct LogSumExp {
  double maxTerm = -std::numeric_limits<double>::infinity();
  double sum = 0.0;  // sum of exp(term - maxTerm)

  void add(double term) {
    if (term <= maxTerm) {
      sum += std::exp(term - maxTerm);
    } else {
      sum = sum * std::exp(maxTerm - term) + 1.0;
      maxTerm = term;
    }
  }
  double log() const {
    if (sum <= 0.0) return -std::numeric_limits<double>::infinity();
    return maxTerm + std::log(sum);
  }
};

PartitionSum partitionSumImpl(const ConcatGraph& g, const Potential& phi, double Q, double delta,
                              bool wantSingular, const CycleEnumerationOptions& opts) {
  if (!(Q > delta && delta > 0.0)) {
    throw InvalidArgumentError("partition sum needs Q > delta > 0");
  }
  if (g.maxLen < Q - 1e-9) {
    throw InvalidArgumentError("partition sum needs the graph radius to reach Q");
  }
  LogSumExp acc;
  long long count = 0;
  const double lo = Q - delta, hi = Q;
  const std::size_t nPoly = g.surface->polygons.size();
  enumerateClosedWalks(g, hi, [&](const WalkView& w) {
    if (w.singular != wantSingular) return;
    if (!(w.period > lo && w.period <= hi)) return;
    double phiVal = phi.offset * w.period;
    for (std::size_t p = 0; p < nPoly; ++p) phiVal += phi.perPolygon[p] * w.occupancy[p];
    acc.add(phiVal);
    ++count;
  }, opts);
  return {acc.log(), count};
}

}  // namespace

PartitionSum regularPartitionSum(const ConcatGraph& g, const Potential& phi, double Q,
                                 double delta, const CycleEnumerationOptions& opts) {
  return partitionSumImpl(g, phi, Q, delta, false, opts);
}

PartitionSum singularPartitionSum(const ConcatGraph& g, const Potential& phi, double Q,
                                  double delta, const CycleEnumerationOptions& opts) {
  return partitionSumImpl(g, phi, Q, delta, true, opts);
}

PressureReport pressureEstimate(const ConcatGraph& g, const Potential& phi,
                                const std::vector<double>& grid, double delta,
                                GeodesicClassFilter cls, const CycleEnumerationOptions& opts) {
  if (grid.size() < 3) throw InvalidArgumentError("pressure estimate needs at least 3 grid points");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (grid[i] <= grid[i - 1]) throw InvalidArgumentError("grid must be increasing");
  }
  if (cls == GeodesicClassFilter::All) {
    throw InvalidArgumentError("pressure estimate wants Regular or Singular");
  }

  // One streaming pass over the largest radius accumulates every window.
  double top = grid.back();
  if (g.maxLen < top - 1e-9) {
    throw InvalidArgumentError("pressure estimate needs the graph radius to reach the grid top");
  }
  bool wantSingular = cls == GeodesicClassFilter::Singular;
  const std::size_t nPoly = g.surface->polygons.size();
  std::vector<LogSumExp> acc(grid.size());
  std::vector<long long> counts(grid.size(), 0);
  enumerateClosedWalks(g, top, [&](const WalkView& w) {
    if (w.singular != wantSingular) return;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (w.period > grid[i] - delta && w.period <= grid[i]) {
        double phiVal = phi.offset * w.period;
        for (std::size_t p = 0; p < nPoly; ++p) phiVal += phi.perPolygon[p] * w.occupancy[p];
        acc[i].add(phiVal);
        ++counts[i];
      }
    }
  }, opts);

  PressureReport rep;
  rep.grid = grid;
  rep.counts = counts;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (counts[i] == 0) {
      throw NotFoundError("InsufficientData: empty window at Q = " + std::to_string(grid[i]));
    }
    rep.logSums.push_back(acc[i].log());
  }

  // Least squares.
  double n = static_cast<double>(grid.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    sx += grid[i];
    sy += rep.logSums[i];
    sxx += grid[i] * grid[i];
    sxy += grid[i] * rep.logSums[i];
  }
  rep.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  rep.intercept = (sy - rep.slope * sx) / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double r = rep.logSums[i] - (rep.slope * grid[i] + rep.intercept);
    ss += r * r;
  }
  rep.residual = std::sqrt(ss / n);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    rep.successiveSlopes.push_back((rep.logSums[i] - rep.logSums[i - 1]) /
                                   (grid[i] - grid[i - 1]));
  }
  for (std::size_t i = 1; i < rep.successiveSlopes.size(); ++i) {
    rep.slopeDiagnostics.push_back(
        std::abs(rep.successiveSlopes[i] - rep.successiveSlopes[i - 1]));
  }
  return rep;
}

PressureGapReport pressureGapReport(const ConcatGraph& g, const Potential& phi,
                                    const std::vector<double>& grid, double delta,
                                    const CycleEnumerationOptions& opts) {
  PressureGapReport out;
  out.regularDetail = pressureEstimate(g, phi, grid, delta, GeodesicClassFilter::Regular, opts);
  out.singularDetail = pressureEstimate(g, phi, grid, delta, GeodesicClassFilter::Singular, opts);
  out.regularPressure = out.regularDetail.slope;
  out.singularPressure = out.singularDetail.slope;
  out.gap = out.regularPressure - out.singularPressure;

  Potential zero = Potential::zero(*g.surface);
  auto reg0 = pressureEstimate(g, zero, grid, delta, GeodesicClassFilter::Regular, opts);
  auto sing0 = pressureEstimate(g, zero, grid, delta, GeodesicClassFilter::Singular, opts);
  out.nearlyConstantBound = 0.5 * (reg0.slope - sing0.slope);
  out.boundSatisfied = phi.variationNorm() < out.nearlyConstantBound;
  return out;
}

double weightedOrbitAverage(const ConcatGraph& g, const Potential& phi, double Q, double delta,
                            const Potential& f, const CycleEnumerationOptions& opts) {
  if (!(Q > delta && delta > 0.0)) {
    throw InvalidArgumentError("weighted average needs Q > delta > 0");
  }
  // Stable weighted mean: track max weight exponent and scale on the fly.
  double maxTerm = -std::numeric_limits<double>::infinity();
  double wSum = 0.0;    // sum of exp(Phi - maxTerm)
  double fwSum = 0.0;   // sum of exp(Phi - maxTerm) * orbitMean(f)
  long long count = 0;
  const double lo = Q - delta, hi = Q;
  const std::size_t nPoly = g.surface->polygons.size();
  enumerateClosedWalks(g, hi, [&](const WalkView& w) {
    if (w.singular) return;
    if (!(w.period > lo && w.period <= hi)) return;
    double phiVal = phi.offset * w.period;
    double fPoly = 0.0;
    for (std::size_t p = 0; p < nPoly; ++p) {
      phiVal += phi.perPolygon[p] * w.occupancy[p];
      fPoly += f.perPolygon[p] * w.occupancy[p];
    }
    // The constant part is added after averaging so it passes through
    // exactly; only the polygon part is weighted.
    double mean = fPoly / w.period;
    if (phiVal <= maxTerm) {
      double e = std::exp(phiVal - maxTerm);
      wSum += e;
      fwSum += e * mean;
    } else {
      double scale = std::exp(maxTerm - phiVal);
      wSum = wSum * scale + 1.0;
      fwSum = fwSum * scale + mean;
      maxTerm = phiVal;
    }
    ++count;
  }, opts);
  if (count == 0) throw NotFoundError("EmptyWindow: no regular classes in (Q - delta, Q]");
  return f.offset + fwSum / wSum;
}

EquidistributionSeries equidistributionSeries(const ConcatGraph& g, const Potential& phi,
                                              const std::vector<double>& grid, double delta,
                                              const Potential& f,
                                              const CycleEnumerationOptions& opts) {
  EquidistributionSeries out;
  for (double Q : grid) {
    EquidistributionPoint pt;
    pt.Q = Q;
    pt.value = weightedOrbitAverage(g, phi, Q, delta, f, opts);
    pt.count = regularPartitionSum(g, Potential::zero(*g.surface), Q, delta, opts).count;
    out.points.push_back(pt);
  }
  for (std::size_t i = 1; i < out.points.size(); ++i) {
    out.successiveDiffs.push_back(std::abs(out.points[i].value - out.points[i - 1].value));
  }
  return out;
}

double separatedSetPressureLower(const Surface& s, const Potential& phi,
                                 const std::vector<GeodesicPath>& seeds, double t, double eps) {
  if (t <= 0.0 || eps <= 0.0) throw InvalidArgumentError("need t > 0 and eps > 0");
  std::vector<const GeodesicPath*> kept;
  for (const auto& seed : seeds) {
    if (seed.t1 - seed.t0 < t - 1e-9) {
      throw InvalidArgumentError("seed shorter than the window");
    }
    bool separated = true;
    for (const auto* other : kept) {
      // Certified separation: surface distance above 2*eps at some sample
      // time implies the flow distance exceeds eps there.
      bool pairSeparated = false;
      for (double u = 0.0; u <= t + 1e-9 && !pairSeparated; u += std::max(0.1, t / 64.0)) {
        auto a = seed.pointAt(seed.t0 + u);
        auto b = other->pointAt(other->t0 + u);
        SurfacePoint pa{a.face, a.chart.inverse().apply(a.plane)};
        SurfacePoint pb{b.face, b.chart.inverse().apply(b.plane)};
        try {
          auto d = surfaceDistance(s, pa, pb, 2.0 * eps);
          if (!d) pairSeparated = true;  // distance above the cutoff
        } catch (const BudgetError&) {
          pairSeparated = true;  // conservatively treated as separated
        }
      }
      if (!pairSeparated) { separated = false; break; }
    }
    if (separated) kept.push_back(&seed);
  }
  LogSumExp acc;
  for (const auto* p : kept) {
    acc.add(birkhoffPathIntegral(*p, phi, p->t0, p->t0 + t));
  }
  return acc.log() / t;
}

}  // namespace flatflow
