#include "flatflow/flatflow_c.h"

#include <cstring>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "flatflow/constructions.hpp"
#include "flatflow/hyperbolicity.hpp"
#include "flatflow/json_io.hpp"
#include "flatflow/saddle.hpp"
#include "flatflow/surface.hpp"
#include "flatflow/thermo.hpp"
#include "flatflow/tracer.hpp"

using nlohmann::json;
using namespace flatflow;

struct ff_surface {
  Surface s;
};

struct ff_graph {
  Surface s;  // own copy so the handle is self-contained
  ConcatGraph g;
};

namespace {

thread_local std::string lastError;

ff_status statusOf(const Error& e) {
  switch (e.code()) {
    case ErrorCode::Validation: return FF_ERR_VALIDATION;
    case ErrorCode::Budget: return FF_ERR_BUDGET;
    case ErrorCode::Horizon: return FF_ERR_HORIZON;
    case ErrorCode::NotFound: return FF_ERR_NOT_FOUND;
    case ErrorCode::NotComparable: return FF_ERR_NOT_COMPARABLE;
    case ErrorCode::InvalidArgument: return FF_ERR_INVALID_ARGUMENT;
    case ErrorCode::Usage: return FF_ERR_USAGE;
    default: return FF_ERR_INTERNAL;
  }
}

template <typename F>
ff_status guarded(F&& fn) {
  try {
    fn();
    return FF_OK;
  } catch (const Error& e) {
    lastError = e.what();
    return statusOf(e);
  } catch (const std::exception& e) {
    lastError = e.what();
    return FF_ERR_INTERNAL;
  }
}

char* toCString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

json coneTableJson(const Surface& s) {
  json cones = json::array();
  for (int c = 0; c < s.coneCount(); ++c) {
    const VertexClass& cls = s.coneClass(c);
    cones.push_back({{"id", c},
                     {"angle", cls.totalAngle},
                     {"excess", cls.excess},
                     {"corners", cls.corners.size()}});
  }
  return cones;
}

json validationJson(const Surface& s) {
  json j;
  j["schema"] = 1;
  j["name"] = s.name;
  j["genus"] = s.genus;
  j["coneClasses"] = coneTableJson(s);
  j["gaussBonnetResidual"] = s.gaussBonnetResidual;
  j["gluingRoundTripMax"] = s.maxGluingRoundTrip;
  j["polygons"] = s.polygons.size();
  j["vertexClasses"] = s.vertexClasses.size();
  return j;
}

ConePolicy parsePolicy(const std::string& text) {
  if (text == "stop") return ConePolicy::stop();
  if (text == "+pi") return ConePolicy::turnPlusPi();
  if (text == "-pi") return ConePolicy::turnMinusPi();
  if (text == "bisect") return ConePolicy::bisect();
  if (text.rfind("angles:", 0) == 0) {
    std::vector<double> angles;
    std::istringstream is(text.substr(7));
    std::string tok;
    while (std::getline(is, tok, ',')) angles.push_back(std::stod(tok));
    return ConePolicy::explicitAngles(angles);
  }
  throw UsageError("unknown cone policy '" + text + "'");
}

json pathJson(const Surface& s, const GeodesicPath& p) {
  json j;
  j["schema"] = 1;
  j["t0"] = p.t0;
  j["t1"] = p.t1;
  j["truncated"] = p.truncated;
  if (p.coneHitTime) j["coneHit"] = *p.coneHitTime;
  json segs = json::array();
  for (const auto& seg : p.segments) {
    segs.push_back({{"polygon", s.polygons[s.faces[seg.face].originalPolygon].id},
                    {"t", {seg.tA, seg.tB}},
                    {"a", {seg.planeA.x, seg.planeA.y}},
                    {"b", {seg.planeB.x, seg.planeB.y}}});
  }
  j["segments"] = segs;
  json events = json::array();
  for (const auto& e : p.events) {
    events.push_back({{"t", e.t},
                      {"cone", e.coneIdx},
                      {"left", e.left},
                      {"right", e.right},
                      {"theta", e.theta}});
  }
  j["events"] = events;
  json sig = json::array();
  for (auto& [t, th] : turningSignature(p)) sig.push_back({t, th});
  j["signature"] = sig;
  auto cls = classifyWindow(p);
  j["windowClass"] = cls.regular ? "regular" : "singular-so-far";
  if (cls.regular) j["witnessTime"] = cls.witnessTime;
  return j;
}

GeodesicPath traceFromSpec(const Surface& s, const std::string& spec) {
  std::vector<std::string> parts;
  std::istringstream is(spec);
  std::string tok;
  while (std::getline(is, tok, ':')) parts.push_back(tok);
  if (parts.size() < 5) {
    throw UsageError("trace spec must be poly:x:y:dir:len[:policy]");
  }
  TraceStart st{parts[0], {std::stod(parts[1]), std::stod(parts[2])}, std::stod(parts[3])};
  double len = std::stod(parts[4]);
  ConePolicy policy =
      parts.size() > 5 ? parsePolicy(parts[5]) : ConePolicy::bisect();
  return trace(s, st, len, policy).path;
}

std::vector<double> parseGrid(const std::string& text) {
  double lo = 0, hi = 0, step = 1;
  char c1 = 0, c2 = 0;
  std::istringstream is(text);
  is >> lo >> c1 >> hi >> c2 >> step;
  if (is.fail() || c1 != ':' || (c2 != ':' && c2 != 0)) {
    throw UsageError("grid must be lo:hi:step");
  }
  if (step <= 0 || hi < lo) throw UsageError("bad grid bounds");
  std::vector<double> grid;
  for (double q = lo; q <= hi + 1e-9; q += step) grid.push_back(q);
  return grid;
}

GeodesicClassFilter parseClass(const std::string& text) {
  if (text == "all") return GeodesicClassFilter::All;
  if (text == "regular") return GeodesicClassFilter::Regular;
  if (text == "singular") return GeodesicClassFilter::Singular;
  throw UsageError("class must be all|regular|singular");
}

HyperbolicityConfig configFor(const Surface& s, const ConcatGraph& g, double scale, double eta) {
  double ell0 = g.nodes.empty() ? shortestSaddleConnection(s) : g.nodes.front().length;
  HyperbolicityConfig cfg = HyperbolicityConfig::defaults(ell0, s.maxExcess());
  if (scale > 0.0) cfg.scale = scale;
  if (eta > 0.0) cfg.threshold = eta;
  return cfg;
}

GoodSegment segmentFromJson(const ConcatGraph& g, const json& j) {
  auto rec = findClosedGeodesic(g, j.at("closed").get<std::string>(), 0.0);
  if (!rec) throw NotFoundError("closed geodesic key not found in the graph");
  return {*rec, j.at("offset").get<double>(), j.at("len").get<double>()};
}

json shadowingReportJson(const ShadowingReport& rep) {
  json j;
  j["schema"] = 1;
  j["mode"] = rep.mode == SpecificationMode::Strong ? "strong" : "weak";
  j["produced"] = {{"key", rep.produced.canonicalKey()},
                   {"period", rep.produced.period},
                   {"class", rep.produced.singular ? "singular" : "regular"}};
  j["deltaAchieved"] = rep.deltaAchieved;
  if (rep.mode == SpecificationMode::Strong) j["commonTransition"] = rep.commonTransition;
  json segs = json::array();
  for (const auto& w : rep.segments) {
    segs.push_back({{"start", w.start},
                    {"copyStart", w.copyStart},
                    {"copyEnd", w.copyEnd},
                    {"supEstimate", w.supEstimate},
                    {"transition", w.transition}});
  }
  j["segments"] = segs;
  return j;
}

json pressureJson(const PressureReport& rep, const std::string& cls) {
  json j;
  j["schema"] = 1;
  j["class"] = cls;
  j["semantics"] = {{"logSum", "exact"}, {"count", "exact"}, {"slope", "estimate"}};
  j["grid"] = rep.grid;
  j["logSums"] = rep.logSums;
  j["counts"] = rep.counts;
  j["slope"] = rep.slope;
  j["intercept"] = rep.intercept;
  j["residual"] = rep.residual;
  j["successiveSlopes"] = rep.successiveSlopes;
  j["slopeDiagnostics"] = rep.slopeDiagnostics;
  j["truncated"] = rep.truncated;
  return j;
}

std::string doubleCsv(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

extern "C" {

const char* ff_last_error(void) { return lastError.c_str(); }

void ff_string_free(char* s) { std::free(s); }

ff_status ff_surface_load(const char* path, ff_surface** out) {
  return guarded([&] {
    auto desc = loadSurfaceDescriptor(path);
    *out = new ff_surface{buildSurface(desc)};
  });
}

ff_status ff_surface_parse(const char* json_text, ff_surface** out) {
  return guarded([&] {
    auto desc = parseSurfaceDescriptor(json_text);
    *out = new ff_surface{buildSurface(desc)};
  });
}

void ff_surface_free(ff_surface* s) { delete s; }

ff_status ff_surface_validate_json(const ff_surface* s, char** json_out) {
  return guarded([&] { *json_out = toCString(validationJson(s->s).dump(2)); });
}

ff_status ff_surface_invariants_json(const ff_surface* s, size_t chart_budget, char** json_out) {
  return guarded([&] {
    json j = validationJson(s->s);
    EnumerationOptions opts;
    if (chart_budget) opts.chartBudget = chart_budget;
    double ell0 = shortestSaddleConnection(s->s, opts);
    j["minExcess"] = s->s.minExcess();
    j["maxExcess"] = s->s.maxExcess();
    j["shortestSaddleConnection"] = ell0;
    j["fanBound"] = fanBound(s->s);
    *json_out = toCString(j.dump(2));
  });
}

ff_status ff_trace_json(const ff_surface* s, const char* polygon, double x, double y,
                        double direction, double length, const char* policy, char** json_out) {
  return guarded([&] {
    TraceStart st{polygon, {x, y}, direction};
    TraceResult tr = trace(s->s, st, length, parsePolicy(policy));
    *json_out = toCString(pathJson(s->s, tr.path).dump(2));
  });
}

ff_status ff_gsdist_json(const ff_surface* s, const char* trace_a, const char* trace_b, double T,
                         char** json_out) {
  return guarded([&] {
    GeodesicPath a = traceFromSpec(s->s, trace_a);
    GeodesicPath b = traceFromSpec(s->s, trace_b);
    // Center both windows so [-T, T] is covered.
    a = flowShift(a, 0.5 * (a.t0 + a.t1));
    b = flowShift(b, 0.5 * (b.t0 + b.t1));
    auto bound = gsDistanceUpper(a, b, T);
    json j;
    j["schema"] = 1;
    j["semantics"] = {{"bound", "upper bound (single lift pair)"}};
    j["T"] = T;
    j["bound"] = bound.bound;
    j["tail"] = bound.tail;
    j["total"] = bound.total();
    *json_out = toCString(j.dump(2));
  });
}

ff_status ff_graph_build(const ff_surface* s, double max_len, size_t chart_budget, int threads,
                         ff_graph** out) {
  return guarded([&] {
    auto* h = new ff_graph{s->s, {}};
    EnumerationOptions opts;
    if (chart_budget) opts.chartBudget = chart_budget;
    if (threads > 0) opts.threads = threads;
    try {
      h->g = buildConcatGraph(h->s, max_len, opts);
    } catch (...) {
      delete h;
      throw;
    }
    h->g.surface = &h->s;
    *out = h;
  });
}

void ff_graph_free(ff_graph* g) { delete g; }

ff_status ff_saddles_csv(const ff_graph* g, char** csv_out) {
  return guarded([&] {
    std::ostringstream os;
    os << "id,startClass,endClass,holonomy_x,holonomy_y,length\n";
    os << "# semantics: all columns exact\n";
    for (const auto& sc : g->g.nodes) {
      os << sc.id << ',' << sc.startCone << ',' << sc.endCone << ',' << doubleCsv(sc.holonomy.x)
         << ',' << doubleCsv(sc.holonomy.y) << ',' << doubleCsv(sc.length) << '\n';
    }
    *csv_out = toCString(os.str());
  });
}

ff_status ff_closed_csv(const ff_graph* g, double max_period, const char* cls,
                        size_t max_classes, char** csv_out) {
  return guarded([&] {
    GeodesicClassFilter filter = parseClass(cls);
    std::ostringstream os;
    os << "canonicalKey,period,class,word\n";
    os << "# semantics: all columns exact\n";
    CycleEnumerationOptions opts;
    if (max_classes) opts.maxClasses = max_classes;
    auto records = collectClosedGeodesics(g->g, max_period, filter, opts);
    for (const auto& r : records) {
      os << r.canonicalKey() << ',' << doubleCsv(r.period) << ','
         << (r.singular ? "singular" : "regular") << ',';
      for (std::size_t i = 0; i < r.word.size(); ++i) {
        if (i) os << ' ';
        os << r.word[i];
      }
      os << '\n';
    }
    *csv_out = toCString(os.str());
  });
}

ff_status ff_lambda_profile_csv(const ff_graph* g, const char* canonical_key, double scale,
                                int samples_per_period, char** csv_out) {
  return guarded([&] {
    auto rec = findClosedGeodesic(g->g, canonical_key, 0.0);
    if (!rec) throw NotFoundError("closed geodesic key not found in the graph");
    HyperbolicityConfig cfg = configFor(g->s, g->g, scale, 0.0);
    auto tl = TurnTimeline::fromClosedGeodesic(g->g, *rec);
    int n = samples_per_period > 0 ? samples_per_period : 256;
    std::ostringstream os;
    os << "t,lambda,lambdaForward,lambdaBackward\n";
    os << "# semantics: all columns exact (piecewise-analytic meter)\n";
    for (int i = 0; i <= n; ++i) {
      double t = rec->period * i / n;
      os << doubleCsv(t) << ',' << doubleCsv(hyperbolicity(tl, t, cfg)) << ','
         << doubleCsv(hyperbolicityForward(tl, t, cfg)) << ','
         << doubleCsv(hyperbolicityBackward(tl, t, cfg)) << '\n';
    }
    *csv_out = toCString(os.str());
  });
}

ff_status ff_decompose_json(const ff_graph* g, const char* canonical_key, double window_a,
                            double window_b, double scale, double eta, char** json_out) {
  return guarded([&] {
    auto rec = findClosedGeodesic(g->g, canonical_key, 0.0);
    if (!rec) throw NotFoundError("closed geodesic key not found in the graph");
    if (window_b <= window_a) throw UsageError("window must satisfy a < b");
    HyperbolicityConfig cfg = configFor(g->s, g->g, scale, eta);
    auto tl = TurnTimeline::fromClosedGeodesic(g->g, *rec);
    auto d = decompose(tl, window_a, window_b - window_a, cfg);
    json j;
    j["schema"] = 1;
    j["key"] = canonical_key;
    j["window"] = {window_a, window_b};
    j["scale"] = cfg.scale;
    j["eta"] = cfg.threshold;
    j["prefixEnd"] = window_a + d.prefixEnd;
    j["suffixStart"] = window_a + d.suffixStart;
    j["goodLength"] = std::max(0.0, d.suffixStart - d.prefixEnd);
    j["goodWindowPasses"] =
        d.suffixStart > d.prefixEnd
            ? isGoodSegment(tl, window_a + d.prefixEnd, d.suffixStart - d.prefixEnd, cfg)
            : false;
    std::string warn = thresholdRegimeWarning(g->s, cfg);
    if (!warn.empty()) j["warning"] = warn;
    *json_out = toCString(j.dump(2));
  });
}

ff_status ff_spec_glue_json(const ff_graph* g, const char* segments_json, double delta,
                            const char* mode, double scale, double eta, char** json_out) {
  return guarded([&] {
    json spec = json::parse(segments_json);
    std::vector<GoodSegment> segments;
    for (const auto& item : spec) segments.push_back(segmentFromJson(g->g, item));
    SpecificationMode m = std::string(mode) == "strong" ? SpecificationMode::Strong
                                                        : SpecificationMode::Weak;
    HyperbolicityConfig cfg = configFor(g->s, g->g, scale, eta);
    auto rep = glueSegments(g->g, segments, delta, m, cfg);
    *json_out = toCString(shadowingReportJson(rep).dump(2));
  });
}

ff_status ff_spec_periodic_json(const ff_graph* g, const char* segment_json, double delta,
                                double scale, double eta, char** json_out) {
  return guarded([&] {
    json spec = json::parse(segment_json);
    GoodSegment seg = segmentFromJson(g->g, spec.is_array() ? spec.at(0) : spec);
    HyperbolicityConfig cfg = configFor(g->s, g->g, scale, eta);
    auto pa = periodicApproximation(g->g, seg, delta, cfg);
    json j = shadowingReportJson(pa.report);
    j["periodWindow"] = {pa.periodWindowLo, pa.periodWindowHi};
    j["tPrime"] = pa.tPrime;
    j["period"] = pa.closed.period;
    *json_out = toCString(j.dump(2));
  });
}

ff_status ff_pressure_json(const ff_graph* g, const char* phi_json, const char* grid,
                           double delta, const char* cls, size_t max_steps, char** json_out) {
  return guarded([&] {
    Potential phi = parsePotential(g->s, phi_json);
    CycleEnumerationOptions opts;
    if (max_steps) opts.maxSteps = max_steps;
    auto rep = pressureEstimate(g->g, phi, parseGrid(grid), delta, parseClass(cls), opts);
    json j = pressureJson(rep, cls);
    j["delta"] = delta;
    *json_out = toCString(j.dump(2));
  });
}

ff_status ff_gap_json(const ff_graph* g, const char* phi_json, const char* grid, double delta,
                      size_t max_steps, char** json_out) {
  return guarded([&] {
    Potential phi = parsePotential(g->s, phi_json);
    CycleEnumerationOptions opts;
    if (max_steps) opts.maxSteps = max_steps;
    auto rep = pressureGapReport(g->g, phi, parseGrid(grid), delta, opts);
    json j;
    j["schema"] = 1;
    j["semantics"] = {{"pressures", "estimate"}, {"gap", "estimate"}, {"bound", "estimate"}};
    j["delta"] = delta;
    j["regularPressure"] = rep.regularPressure;
    j["singularPressure"] = rep.singularPressure;
    j["gap"] = rep.gap;
    j["nearlyConstantBound"] = rep.nearlyConstantBound;
    j["boundSatisfied"] = rep.boundSatisfied;
    j["regular"] = pressureJson(rep.regularDetail, "regular");
    j["singular"] = pressureJson(rep.singularDetail, "singular");
    *json_out = toCString(j.dump(2));
  });
}

ff_status ff_equidist_csv(const ff_graph* g, const char* phi_json, const char* f_json,
                          const char* grid, double delta, size_t max_steps, char** csv_out) {
  return guarded([&] {
    Potential phi = parsePotential(g->s, phi_json);
    Potential f = parsePotential(g->s, f_json);
    CycleEnumerationOptions opts;
    if (max_steps) opts.maxSteps = max_steps;
    auto series = equidistributionSeries(g->g, phi, parseGrid(grid), delta, f, opts);
    std::ostringstream os;
    os << "Q,mu,count,diffFromPrev\n";
    os << "# semantics: mu estimate, count exact\n";
    for (std::size_t i = 0; i < series.points.size(); ++i) {
      os << doubleCsv(series.points[i].Q) << ',' << doubleCsv(series.points[i].value) << ','
         << series.points[i].count << ',';
      if (i > 0) os << doubleCsv(series.successiveDiffs[i - 1]);
      os << '\n';
    }
    *csv_out = toCString(os.str());
  });
}

ff_status ff_report_bundle(const ff_surface* s, const char* out_dir, const char* config_json) {
  return guarded([&] {
    json cfg = json::object();
    if (config_json && std::strlen(config_json) > 0) cfg = json::parse(config_json);
    double maxLen = cfg.value("maxLen", 8.0);
    std::string gridSpec = cfg.value("Qgrid", std::string("5:8:1"));
    double delta = cfg.value("delta", 0.5);
    int threads = cfg.value("threads", 1);
    std::size_t maxSteps = cfg.value("maxSteps", std::size_t(2000000000));

    std::filesystem::create_directories(out_dir);
    auto path = [&](const char* name) { return std::string(out_dir) + "/" + name; };

    EnumerationOptions eopts;
    eopts.threads = threads;
    CycleEnumerationOptions copts;
    copts.maxSteps = maxSteps;

    // invariants
    {
      json j = validationJson(s->s);
      j["minExcess"] = s->s.minExcess();
      j["maxExcess"] = s->s.maxExcess();
      j["shortestSaddleConnection"] = shortestSaddleConnection(s->s, eopts);
      j["fanBound"] = fanBound(s->s);
      writeTextFile(path("invariants.json"), j.dump(2) + "\n");
    }

    ConcatGraph g = buildConcatGraph(s->s, maxLen, eopts);
    auto grid = parseGrid(gridSpec);

    // saddle counts curve
    {
      std::ostringstream os;
      os << "maxLen,count\n";
      os << "# semantics: count exact\n";
      for (double L = 1.0; L <= maxLen + 1e-9; L += 1.0) {
        long long n = 0;
        for (const auto& sc : g.nodes) {
          if (sc.length <= L + 1e-9) ++n;
        }
        os << doubleCsv(L) << ',' << n << '\n';
      }
      writeTextFile(path("saddle_counts.csv"), os.str());
    }

    // closed class counts per grid window
    {
      std::ostringstream os;
      os << "Q,delta,regular,singular\n";
      os << "# semantics: counts exact\n";
      std::vector<long long> reg(grid.size(), 0), sing(grid.size(), 0);
      enumerateClosedWalks(g, grid.back(), [&](const WalkView& w) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
          if (w.period > grid[i] - delta && w.period <= grid[i]) {
            (w.singular ? sing[i] : reg[i])++;
          }
        }
      }, copts);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        os << doubleCsv(grid[i]) << ',' << doubleCsv(delta) << ',' << reg[i] << ',' << sing[i]
           << '\n';
      }
      writeTextFile(path("closed_counts.csv"), os.str());
    }

    // entropy / pressure gap at phi = 0
    {
      auto rep = pressureGapReport(g, Potential::zero(s->s), grid, delta, copts);
      json j;
      j["schema"] = 1;
      j["semantics"] = {{"slopes", "estimate"}, {"counts", "exact"}};
      j["regularPressure"] = rep.regularPressure;
      j["singularPressure"] = rep.singularPressure;
      j["gap"] = rep.gap;
      j["nearlyConstantBound"] = rep.nearlyConstantBound;
      j["regular"] = pressureJson(rep.regularDetail, "regular");
      j["singular"] = pressureJson(rep.singularDetail, "singular");
      writeTextFile(path("pressure_gap.json"), j.dump(2) + "\n");
    }

    // equidistribution series for the first polygon's indicator
    {
      Potential f = Potential::zero(s->s);
      f.perPolygon[0] = 1.0;
      auto series = equidistributionSeries(g, Potential::zero(s->s), grid, delta, f, copts);
      std::ostringstream os;
      os << "Q,mu,count,diffFromPrev\n";
      os << "# semantics: mu estimate, count exact\n";
      for (std::size_t i = 0; i < series.points.size(); ++i) {
        os << doubleCsv(series.points[i].Q) << ',' << doubleCsv(series.points[i].value) << ','
           << series.points[i].count << ',';
        if (i > 0) os << doubleCsv(series.successiveDiffs[i - 1]);
        os << '\n';
      }
      writeTextFile(path("equidist.csv"), os.str());
    }

    // config echo
    {
      json j;
      j["schema"] = 1;
      j["surface"] = s->s.name;
      j["maxLen"] = maxLen;
      j["Qgrid"] = gridSpec;
      j["delta"] = delta;
      // thread count deliberately not echoed: it only shards the saddle
      // search and the bundle is byte-identical across it
      j["maxSteps"] = maxSteps;
      writeTextFile(path("config.json"), j.dump(2) + "\n");
    }
  });
}

}  // extern "C"
