#pragma once

// Potentials, weighted partition sums over closed-geodesic classes, pressure
// and entropy-gap estimation, and the weighted-orbit equidistribution
// experiment.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flatflow/saddle.hpp"
#include "flatflow/tracer.hpp"

namespace flatflow {

// Piecewise-constant-per-polygon scalar rate plus a constant offset.
struct Potential {
  std::vector<double> perPolygon;  // indexed by original polygon
  double offset = 0.0;

  static Potential zero(const Surface& s) {
    return {std::vector<double>(s.polygons.size(), 0.0), 0.0};
  }
  static Potential constant(const Surface& s, double c) {
    return {std::vector<double>(s.polygons.size(), 0.0), c};
  }

  double norm() const {
    double m = 0.0;
    for (double v : perPolygon) m = std::max(m, std::abs(v + offset));
    return perPolygon.empty() ? std::abs(offset) : m;
  }
  // Max norm of the non-constant part (the per-polygon field alone).
  double variationNorm() const {
    double m = 0.0;
    for (double v : perPolygon) m = std::max(m, std::abs(v));
    return m;
  }
};

Potential parsePotential(const Surface& s, const std::string& jsonText);
Potential loadPotential(const Surface& s, const std::string& path);

// Exact Birkhoff integral over one period of a closed class.
double birkhoffIntegral(const Potential& phi, const ClosedGeodesicRecord& rec);
// Exact integral over an arbitrary interval of the orbit (via tracing).
double birkhoffIntervalIntegral(const ConcatGraph& g, const ClosedGeodesicRecord& rec,
                                double from, double to, const Potential& phi);
// Integral along a traced path window.
double birkhoffPathIntegral(const GeodesicPath& p, const Potential& phi, double from, double to);

struct PartitionSum {
  double logValue = -std::numeric_limits<double>::infinity();
  long long count = 0;
};

// Weighted sum over regular classes with period in (Q - delta, Q]; half-open
// so that disjoint windows add exactly.
PartitionSum regularPartitionSum(const ConcatGraph& g, const Potential& phi, double Q,
                                 double delta, const CycleEnumerationOptions& opts = {});
// Singular-class variant.
PartitionSum singularPartitionSum(const ConcatGraph& g, const Potential& phi, double Q,
                                  double delta, const CycleEnumerationOptions& opts = {});

struct PressureReport {
  std::vector<double> grid;
  std::vector<double> logSums;
  std::vector<long long> counts;
  double slope = 0.0;       // least-squares slope of logSums vs grid
  double intercept = 0.0;
  double residual = 0.0;    // rms residual of the fit
  std::vector<double> successiveSlopes;
  std::vector<double> slopeDiagnostics;  // |slope_i - slope_{i-1}|
  bool truncated = false;
};

// Least-squares growth-rate estimate of the top partition sums (this is an
// estimator, not a certified value). Throws NotFoundError("InsufficientData")
// when a window is empty, BudgetError on WorkLimitExceeded.
PressureReport pressureEstimate(const ConcatGraph& g, const Potential& phi,
                                const std::vector<double>& grid, double delta,
                                GeodesicClassFilter cls = GeodesicClassFilter::Regular,
                                const CycleEnumerationOptions& opts = {});

struct PressureGapReport {
  double regularPressure = 0.0;
  double singularPressure = 0.0;
  double gap = 0.0;
  double nearlyConstantBound = 0.0;  // half the zero-potential gap
  bool boundSatisfied = false;       // variation norm below the bound?
  PressureReport regularDetail;
  PressureReport singularDetail;
};

PressureGapReport pressureGapReport(const ConcatGraph& g, const Potential& phi,
                                    const std::vector<double>& grid, double delta,
                                    const CycleEnumerationOptions& opts = {});

// mu_{Q,delta}(f): e^{Phi}-weighted average of the orbit means of f over
// regular classes in the window. Throws NotFoundError("EmptyWindow") when the
// window holds no classes.
double weightedOrbitAverage(const ConcatGraph& g, const Potential& phi, double Q, double delta,
                            const Potential& f, const CycleEnumerationOptions& opts = {});

struct EquidistributionPoint {
  double Q = 0.0;
  double value = 0.0;
  long long count = 0;
};

struct EquidistributionSeries {
  std::vector<EquidistributionPoint> points;
  std::vector<double> successiveDiffs;  // |mu_{Q_{i+1}} - mu_{Q_i}|
};

EquidistributionSeries equidistributionSeries(const ConcatGraph& g, const Potential& phi,
                                              const std::vector<double>& grid, double delta,
                                              const Potential& f,
                                              const CycleEnumerationOptions& opts = {});

// Greedy (t, eps)-separated subset of the seeds (certified by bounded-radius
// surface distance at sampled times; incomparable pairs count as separated),
// then (1/t) log sum of e^{Birkhoff integral}. A heuristic cross-check of the
// closed-geodesic pressure estimate.
double separatedSetPressureLower(const Surface& s, const Potential& phi,
                                 const std::vector<GeodesicPath>& seeds, double t, double eps);

}  // namespace flatflow
