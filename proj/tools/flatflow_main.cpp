// flatflow: flat cone surfaces, geodesics, and pressure experiments.
// The CLI speaks only to the shared library's C interface.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "flatflow/flatflow_c.h"

namespace {

int exitCodeFor(ff_status st) {
  switch (st) {
    case FF_OK: return 0;
    case FF_ERR_BUDGET: return 3;
    case FF_ERR_USAGE: return 64;
    default: return 2;
  }
}

int fail(ff_status st) {
  std::cerr << "error: " << ff_last_error() << "\n";
  return exitCodeFor(st);
}

void emit(const char* text, const std::string& outputPath) {
  if (outputPath.empty()) {
    std::cout << text;
    if (*text && text[std::string(text).size() - 1] != '\n') std::cout << "\n";
  } else {
    std::ofstream out(outputPath, std::ios::binary);
    out << text;
  }
}

struct SurfaceHandle {
  ff_surface* s = nullptr;
  ~SurfaceHandle() { ff_surface_free(s); }
};

struct GraphHandle {
  ff_graph* g = nullptr;
  ~GraphHandle() { ff_graph_free(g); }
};

struct StringHandle {
  char* text = nullptr;
  ~StringHandle() { ff_string_free(text); }
};

int defaultThreads() {
  const char* env = std::getenv("FLATFLOW_THREADS");
  if (!env) return 1;
  int n = std::atoi(env);
  return n > 0 ? n : 1;
}

std::string readPotentialArg(const std::string& arg) {
  // Inline JSON or a file path.
  if (!arg.empty() && (arg[0] == '{' || arg[0] == '[')) return arg;
  std::ifstream in(arg, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot open potential file '" << arg << "'\n";
    std::exit(2);
  }
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flat cone surfaces: geodesics, saddle connections, pressure"};
  app.require_subcommand(1);
  unsigned long long seed = 0;
  app.add_option("--seed", seed, "seed for randomized sampling (reserved; runs are deterministic)");

  std::string surfacePath;
  std::string output;
  double maxLen = 8.0;
  double delta = 0.5;
  std::string gridSpec = "5:8:1";
  std::size_t chartBudget = 0;
  std::size_t maxSteps = 0;
  std::size_t maxClasses = 0;

  // validate
  auto* cmdValidate = app.add_subcommand("validate", "validate a surface file");
  cmdValidate->add_option("surface", surfacePath)->required();
  cmdValidate->add_option("--output", output);

  // invariants
  auto* cmdInv = app.add_subcommand("invariants", "genus, cone table, cone constants");
  cmdInv->add_option("surface", surfacePath)->required();
  cmdInv->add_option("--chart-budget", chartBudget);
  cmdInv->add_option("--output", output);

  // trace
  std::string startSpec, policy = "stop";
  double dir = 0.0, length = 10.0;
  auto* cmdTrace = app.add_subcommand("trace", "trace a geodesic");
  cmdTrace->add_option("surface", surfacePath)->required();
  cmdTrace->add_option("--start", startSpec, "poly:x:y")->required();
  cmdTrace->add_option("--dir", dir, "direction in radians")->required();
  cmdTrace->add_option("--len", length)->required();
  cmdTrace->add_option("--at-cone", policy, "stop|+pi|-pi|bisect|angles:<csv>");
  cmdTrace->add_option("--output", output);

  // gsdist
  std::string traceA, traceB;
  double horizon = 10.0;
  auto* cmdGs = app.add_subcommand("gsdist", "geodesic-space distance upper bound");
  cmdGs->add_option("surface", surfacePath)->required();
  cmdGs->add_option("--trace-a", traceA, "poly:x:y:dir:len[:policy]")->required();
  cmdGs->add_option("--trace-b", traceB)->required();
  cmdGs->add_option("--T", horizon);
  cmdGs->add_option("--output", output);

  // saddles
  auto* cmdSaddles = app.add_subcommand("saddles", "enumerate saddle connections (CSV)");
  cmdSaddles->add_option("surface", surfacePath)->required();
  cmdSaddles->add_option("--max-len", maxLen)->required();
  cmdSaddles->add_option("--chart-budget", chartBudget);
  cmdSaddles->add_option("--output", output);

  // closed
  std::string clsFilter = "all";
  double maxPeriod = 6.0;
  auto* cmdClosed = app.add_subcommand("closed", "enumerate closed geodesic classes (CSV)");
  cmdClosed->add_option("surface", surfacePath)->required();
  cmdClosed->add_option("--max-len", maxPeriod)->required();
  cmdClosed->add_option("--class", clsFilter, "all|regular|singular");
  cmdClosed->add_option("--max-classes", maxClasses);
  cmdClosed->add_option("--output", output);

  // lambda
  std::string closedKey;
  double scale = 0.0, eta = 0.0;
  int samples = 256;
  auto* cmdLambda = app.add_subcommand("lambda", "hyperbolicity meter profile (CSV)");
  cmdLambda->add_option("surface", surfacePath)->required();
  cmdLambda->add_option("--closed", closedKey, "canonical key")->required();
  cmdLambda->add_option("--max-len", maxLen, "graph radius the key refers to");
  cmdLambda->add_option("--s", scale);
  cmdLambda->add_option("--samples", samples);
  cmdLambda->add_option("--profile-out", output);

  // decompose
  std::string windowSpec;
  auto* cmdDecomp = app.add_subcommand("decompose", "orbit decomposition of a window");
  cmdDecomp->add_option("surface", surfacePath)->required();
  cmdDecomp->add_option("--closed", closedKey)->required();
  cmdDecomp->add_option("--window", windowSpec, "a:b")->required();
  cmdDecomp->add_option("--max-len", maxLen);
  cmdDecomp->add_option("--s", scale);
  cmdDecomp->add_option("--eta", eta);
  cmdDecomp->add_option("--output", output);

  // spec glue / periodic
  auto* cmdSpec = app.add_subcommand("spec", "specification constructions");
  cmdSpec->require_subcommand(1);
  std::string segmentsArg, mode = "strong";
  auto* cmdGlue = cmdSpec->add_subcommand("glue", "glue good segments into one closed geodesic");
  cmdGlue->add_option("surface", surfacePath)->required();
  cmdGlue->add_option("--segments", segmentsArg, "JSON file or inline JSON")->required();
  cmdGlue->add_option("--delta", delta);
  cmdGlue->add_option("--mode", mode, "weak|strong");
  cmdGlue->add_option("--max-len", maxLen);
  cmdGlue->add_option("--s", scale);
  cmdGlue->add_option("--eta", eta);
  cmdGlue->add_option("--report", output);
  auto* cmdPeriodic = cmdSpec->add_subcommand("periodic", "periodic approximation of a segment");
  cmdPeriodic->add_option("surface", surfacePath)->required();
  cmdPeriodic->add_option("--segment", segmentsArg, "JSON file or inline JSON")->required();
  cmdPeriodic->add_option("--delta", delta);
  cmdPeriodic->add_option("--max-len", maxLen);
  cmdPeriodic->add_option("--s", scale);
  cmdPeriodic->add_option("--eta", eta);
  cmdPeriodic->add_option("--output", output);

  // pressure / gap / equidist
  std::string phiArg = "{}", fArg = "{}";
  auto* cmdPressure = app.add_subcommand("pressure", "partition-sum growth estimate");
  cmdPressure->add_option("surface", surfacePath)->required();
  cmdPressure->add_option("--phi", phiArg, "potential JSON file or inline");
  cmdPressure->add_option("--Q", gridSpec, "lo:hi:step");
  cmdPressure->add_option("--delta", delta);
  cmdPressure->add_option("--class", clsFilter, "regular|singular");
  cmdPressure->add_option("--max-len", maxLen, "graph radius (default: grid top)");
  cmdPressure->add_option("--max-steps", maxSteps);
  cmdPressure->add_option("--output", output);

  auto* cmdGap = app.add_subcommand("gap", "pressure gap report");
  cmdGap->add_option("surface", surfacePath)->required();
  cmdGap->add_option("--phi", phiArg);
  cmdGap->add_option("--Q", gridSpec);
  cmdGap->add_option("--delta", delta);
  cmdGap->add_option("--max-len", maxLen);
  cmdGap->add_option("--max-steps", maxSteps);
  cmdGap->add_option("--output", output);

  auto* cmdEqui = app.add_subcommand("equidist", "weighted orbit averages (CSV)");
  cmdEqui->add_option("surface", surfacePath)->required();
  cmdEqui->add_option("--phi", phiArg);
  cmdEqui->add_option("--f", fArg, "observable JSON file or inline")->required();
  cmdEqui->add_option("--Q", gridSpec);
  cmdEqui->add_option("--delta", delta);
  cmdEqui->add_option("--max-len", maxLen);
  cmdEqui->add_option("--max-steps", maxSteps);
  cmdEqui->add_option("--output", output);

  // report
  std::string outDir = "flatflow-report";
  std::string reportConfig = "";
  auto* cmdReport = app.add_subcommand("report", "one-shot experiment bundle");
  cmdReport->add_option("surface", surfacePath)->required();
  cmdReport->add_option("--out-dir", outDir);
  cmdReport->add_option("--config", reportConfig, "JSON config overrides");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 64;
  }

  SurfaceHandle surface;
  ff_status st = ff_surface_load(surfacePath.c_str(), &surface.s);
  if (st != FF_OK) return fail(st);

  int threads = defaultThreads();

  if (cmdValidate->parsed()) {
    StringHandle out;
    st = ff_surface_validate_json(surface.s, &out.text);
    if (st != FF_OK) return fail(st);
    emit(out.text, output);
    return 0;
  }

  if (cmdInv->parsed()) {
    StringHandle out;
    st = ff_surface_invariants_json(surface.s, chartBudget, &out.text);
    if (st != FF_OK) return fail(st);
    emit(out.text, output);
    return 0;
  }

  if (cmdTrace->parsed()) {
    // --start poly:x:y
    auto p1 = startSpec.find(':');
    auto p2 = startSpec.find(':', p1 + 1);
    if (p1 == std::string::npos || p2 == std::string::npos) {
      std::cerr << "error: --start must be poly:x:y\n";
      return 64;
    }
    std::string poly = startSpec.substr(0, p1);
    double x = std::atof(startSpec.substr(p1 + 1, p2 - p1 - 1).c_str());
    double y = std::atof(startSpec.substr(p2 + 1).c_str());
    StringHandle out;
    st = ff_trace_json(surface.s, poly.c_str(), x, y, dir, length, policy.c_str(), &out.text);
    if (st != FF_OK) return fail(st);
    emit(out.text, output);
    return 0;
  }

  if (cmdGs->parsed()) {
    StringHandle out;
    st = ff_gsdist_json(surface.s, traceA.c_str(), traceB.c_str(), horizon, &out.text);
    if (st != FF_OK) return fail(st);
    emit(out.text, output);
    return 0;
  }

  if (cmdSaddles->parsed()) {
    GraphHandle graph;
    st = ff_graph_build(surface.s, maxLen, chartBudget, threads, &graph.g);
    if (st != FF_OK) return fail(st);
    StringHandle out;
    st = ff_saddles_csv(graph.g, &out.text);
    if (st != FF_OK) return fail(st);
    emit(out.text, output);
    return 0;
  }

  if (cmdClosed->parsed()) {
    GraphHandle graph;
    st = ff_graph_build(surface.s, maxPeriod, chartBudget, threads, &graph.g);
    if (st != FF_OK) return fail(st);
    StringHandle out;
    st = ff_closed_csv(graph.g, maxPeriod, clsFilter.c_str(), maxClasses, &out.text);
    if (st != FF_OK) return fail(st);
    emit(out.text, output);
    return 0;
  }

  auto buildGraph = [&](double radius, GraphHandle& graph) -> ff_status {
    return ff_graph_build(surface.s, radius, chartBudget, threads, &graph.g);
  };

  if (cmdLambda->parsed()) {
    GraphHandle graph;
    st = buildGraph(maxLen, graph);
    if (st != FF_OK) return fail(st);
    StringHandle out;
    st = ff_lambda_profile_csv(graph.g, closedKey.c_str(), scale, samples, &out.text);
    if (st != FF_OK) return fail(st);
    emit(out.text, output);
    return 0;
  }

  if (cmdDecomp->parsed()) {
    auto c = windowSpec.find(':');
    if (c == std::string::npos) {
      std::cerr << "error: --window must be a:b\n";
      return 64;
    }
    double a = std::atof(windowSpec.substr(0, c).c_str());
    double b = std::atof(windowSpec.substr(c + 1).c_str());
    GraphHandle graph;
    st = buildGraph(maxLen, graph);
    if (st != FF_OK) return fail(st);
    StringHandle out;
    st = ff_decompose_json(graph.g, closedKey.c_str(), a, b, scale, eta, &out.text);
    if (st != FF_OK) return fail(st);
    emit(out.text, output);
    return 0;
  }

  if (cmdGlue->parsed() || cmdPeriodic->parsed()) {
    GraphHandle graph;
    st = buildGraph(maxLen, graph);
    if (st != FF_OK) return fail(st);
    std::string segJson = readPotentialArg(segmentsArg);
    StringHandle out;
    if (cmdGlue->parsed()) {
      st = ff_spec_glue_json(graph.g, segJson.c_str(), delta, mode.c_str(), scale, eta,
                             &out.text);
    } else {
      st = ff_spec_periodic_json(graph.g, segJson.c_str(), delta, scale, eta, &out.text);
    }
    if (st != FF_OK) return fail(st);
    emit(out.text, output);
    return 0;
  }

  if (cmdPressure->parsed() || cmdGap->parsed() || cmdEqui->parsed()) {
    double top = maxLen;
    {
      // graph radius must reach the grid top
      auto c1 = gridSpec.find(':');
      auto c2 = gridSpec.find(':', c1 + 1);
      double hi = std::atof(gridSpec.substr(c1 + 1, c2 - c1 - 1).c_str());
      top = std::max(top, hi);
    }
    GraphHandle graph;
    st = buildGraph(top, graph);
    if (st != FF_OK) return fail(st);
    std::string phiJson = readPotentialArg(phiArg);
    StringHandle out;
    if (cmdPressure->parsed()) {
      if (clsFilter == "all") clsFilter = "regular";
      st = ff_pressure_json(graph.g, phiJson.c_str(), gridSpec.c_str(), delta,
                            clsFilter.c_str(), maxSteps, &out.text);
    } else if (cmdGap->parsed()) {
      st = ff_gap_json(graph.g, phiJson.c_str(), gridSpec.c_str(), delta, maxSteps, &out.text);
    } else {
      std::string fJson = readPotentialArg(fArg);
      st = ff_equidist_csv(graph.g, phiJson.c_str(), fJson.c_str(), gridSpec.c_str(), delta,
                           maxSteps, &out.text);
    }
    if (st != FF_OK) return fail(st);
    emit(out.text, output);
    return 0;
  }

  if (cmdReport->parsed()) {
    std::string cfg = reportConfig;
    if (!cfg.empty() && cfg[0] != '{') cfg = readPotentialArg(reportConfig);
    if (cfg.empty()) {
      cfg = std::string("{\"threads\": ") + std::to_string(threads) + "}";
    }
    st = ff_report_bundle(surface.s, outDir.c_str(), cfg.c_str());
    if (st != FF_OK) return fail(st);
    std::cout << "report written to " << outDir << "\n";
    return 0;
  }

  return 64;
}
