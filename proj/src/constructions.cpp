#include "flatflow/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

namespace flatflow {

int fanBound(const Surface& s) {
  return static_cast<int>(std::floor(4.0 * M_PI / s.minExcess())) + 3;
}

DeltaDenseResult deltaDenseCoeffsExact(long long px, long long py, long long ptau, long long q,
                                       long long n) {
  if (q <= 0 || py <= 0 || px <= py) {
    throw InvalidArgumentError("deltaDenseCoeffs: need x > y > 0");
  }
  long long d = px - py;
  DeltaDenseResult r;
  r.C = py / d + 3;  // smallest integer strictly above py/d + 2
  if (py % d != 0) r.C = py / d + 2 + 1;  // same value; kept for clarity
  // minTau = max(C*y, 1) as a rational over q.
  double Cy = static_cast<double>(r.C) * static_cast<double>(py) / static_cast<double>(q);
  r.minTau = std::max(Cy, 1.0);
  bool tauOk = (ptau * 1.0 >= static_cast<double>(r.C) * static_cast<double>(py)) &&
               (ptau >= q);
  if (!tauOk) {
    std::ostringstream os;
    os << "TauTooSmall: need tau >= " << r.minTau;
    throw InvalidArgumentError(os.str());
  }
  long long target = ptau + n * d;  // (tau + n*delta) * q
  long long k1 = target / py;       // largest with k1*py <= target (target > 0)
  long long rem = target - k1 * py;
  long long k2 = (rem + d - 1) / d;  // smallest with k2*d >= rem
  if (k2 < 1) k2 = 1;
  r.m1 = k2;
  r.m2 = k1 - k2;
  if (r.m2 <= 0) throw Error(ErrorCode::Internal, "delta-dense construction lost positivity");
  long long value = r.m1 * px + r.m2 * py;
  if (value < target || value > target + d) {
    throw Error(ErrorCode::Internal, "delta-dense sandwich violated");
  }
  return r;
}

DeltaDenseResult deltaDenseCoeffs(double x, double y, double tau, long long n) {
  if (!(x > y && y > 0.0)) throw InvalidArgumentError("deltaDenseCoeffs: need x > y > 0");
  double d = x - y;
  DeltaDenseResult r;
  r.C = static_cast<long long>(std::floor(y / d + 2.0)) + 1;
  r.minTau = std::max(static_cast<double>(r.C) * y, 1.0);
  if (tau < r.minTau - 1e-12) {
    std::ostringstream os;
    os << "TauTooSmall: need tau >= " << r.minTau;
    throw InvalidArgumentError(os.str());
  }
  double target = tau + n * d;
  long long k1 = static_cast<long long>(std::floor(target / y + 1e-12));
  double rem = target - k1 * y;
  long long k2 = static_cast<long long>(std::ceil(rem / d - 1e-12));
  if (k2 < 1) k2 = 1;
  r.m1 = k2;
  r.m2 = k1 - k2;
  if (r.m2 <= 0) throw Error(ErrorCode::Internal, "delta-dense construction lost positivity");
  double value = r.m1 * x + r.m2 * y;
  if (value < target - 1e-9 || value > target + d + 1e-9) {
    throw Error(ErrorCode::Internal, "delta-dense sandwich violated");
  }
  return r;
}

std::pair<ClosedGeodesicRecord, ClosedGeodesicRecord> similarLengthPair(const ConcatGraph& g,
                                                                        double delta,
                                                                        double maxPeriod) {
  if (delta <= 0.0) throw InvalidArgumentError("similarLengthPair: delta must be positive");
  // Grow the search radius until a pair shows up; the class table explodes
  // exponentially, so start small.
  std::vector<double> budgets;
  for (double b = std::min(5.0, maxPeriod); b < maxPeriod; b += 1.0) budgets.push_back(b);
  budgets.push_back(maxPeriod);
  for (double budget : budgets) {
    std::vector<std::pair<double, std::vector<int>>> table;
    CycleEnumerationOptions opts;
    opts.maxClasses = 20000000;
    enumerateClosedWalks(g, budget, [&](const WalkView& w) {
      table.emplace_back(w.period, std::vector<int>(w.word, w.word + w.length));
    }, opts);
    std::sort(table.begin(), table.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    // Among qualifying adjacent pairs prefer the one with the smallest
    // delta-dense threshold max(C*y, 1), C ~ y/gap: tiny gaps make the
    // length-tuning arithmetic brutally expensive.
    std::size_t bestIdx = table.size();
    double bestScore = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < table.size(); ++i) {
      double gap = table[i + 1].first - table[i].first;
      if (gap <= 1e-9 || gap >= delta) continue;
      double y = table[i].first;
      double C = std::floor(y / gap + 2.0) + 1.0;
      double score = std::max(C * y, 1.0);
      if (score < bestScore) { bestScore = score; bestIdx = i; }
    }
    if (bestIdx < table.size()) {
      auto key = [&](const std::vector<int>& w) {
        std::ostringstream os;
        for (std::size_t j = 0; j < w.size(); ++j) {
          if (j) os << '-';
          os << w[j];
        }
        return os.str();
      };
      auto recA = findClosedGeodesic(g, key(table[bestIdx].second), 0.0);
      auto recB = findClosedGeodesic(g, key(table[bestIdx + 1].second), 0.0);
      if (recA && recB) return {*recA, *recB};
    }
  }
  throw NotFoundError("NotFoundWithinBudget: no period pair with gap below " +
                      std::to_string(delta) + " up to period " + std::to_string(maxPeriod));
}

namespace {

// Shortest admissible path from `from` to `to` that passes through a node of
// wordA and later a node of wordB (three-stage Dijkstra on (node, stage)).
struct StagedPath {
  std::vector<int> word;
  int hitA = -1;  // index in word where the stage-A node sits
  int hitB = -1;
};

std::optional<StagedPath> stagedConnect(const ConcatGraph& g, int from, int to,
                                        const std::vector<int>& wordA,
                                        const std::vector<int>& wordB, double maxLen) {
  std::size_t n = g.nodes.size();
  std::vector<char> inA(n, 0), inB(n, 0);
  for (int v : wordA) inA[v] = 1;
  for (int v : wordB) inB[v] = 1;

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(3 * n, inf);
  std::vector<int> parent(3 * n, -1);
  auto id = [&](int v, int stage) { return stage * static_cast<int>(n) + v; };
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;

  auto relax = [&](int state, double d, int par) {
    if (d < dist[state]) {
      dist[state] = d;
      parent[state] = par;
      pq.push({d, state});
    }
  };
  relax(id(from, 0), g.nodes[from].length, -1);
  while (!pq.empty()) {
    auto [d, state] = pq.top();
    pq.pop();
    if (d > dist[state]) continue;
    int v = state % n;
    int stage = state / static_cast<int>(n);
    // Epsilon transitions: entering the loop-stage at the same node.
    if (stage == 0 && inA[v]) relax(id(v, 1), d, state);
    if (stage == 1 && inB[v]) relax(id(v, 2), d, state);
    for (const auto& e : g.adjacency[v]) {
      double nd = d + g.nodes[e.to].length;
      if (nd <= maxLen + 1e-9) relax(id(e.to, stage), nd, state);
    }
  }
  int goal = id(to, 2);
  if (dist[goal] == inf) return std::nullopt;
  StagedPath out;
  std::vector<int> states;
  for (int st = goal; st != -1; st = parent[st]) states.push_back(st);
  std::reverse(states.begin(), states.end());
  for (std::size_t i = 0; i < states.size(); ++i) {
    int v = states[i] % static_cast<int>(n);
    int stage = states[i] / static_cast<int>(n);
    int prevStage = (i == 0) ? 0 : states[i - 1] / static_cast<int>(n);
    bool epsilon = i > 0 && v == states[i - 1] % static_cast<int>(n) && stage != prevStage;
    if (!epsilon) out.word.push_back(v);
    if (stage == 1 && prevStage == 0 && out.hitA < 0) {
      out.hitA = static_cast<int>(out.word.size()) - 1;
    }
    if (stage == 2 && prevStage == 1 && out.hitB < 0) {
      out.hitB = static_cast<int>(out.word.size()) - 1;
    }
  }
  if (out.hitA < 0 || out.hitB < 0) return std::nullopt;
  return out;
}

std::vector<int> rotationStartingAt(const std::vector<int>& cyc, int node) {
  for (std::size_t i = 0; i < cyc.size(); ++i) {
    if (cyc[i] == node) {
      std::vector<int> rot;
      for (std::size_t k = 1; k <= cyc.size(); ++k) rot.push_back(cyc[(i + k) % cyc.size()]);
      return rot;  // the elements after `node`, ending with `node`
    }
  }
  throw Error(ErrorCode::Internal, "loop class does not contain the splice node");
}

}  // namespace

TunedPath tuneConnector(const ConcatGraph& g, int from, int to, double targetLen, double window,
                        const ClosedGeodesicRecord& loopA, const ClosedGeodesicRecord& loopB,
                        double connectorBudget) {
  double la = loopA.period, lb = loopB.period;
  double gap = std::abs(la - lb);
  if (gap <= 1e-9) throw InvalidArgumentError("tuneConnector: loop classes have equal periods");
  if (window < gap - 1e-12) {
    throw InvalidArgumentError("tuneConnector: window below the loop period gap");
  }

  // Degenerate fast path: a plain shortest connector already lands in the
  // window.
  if (auto base = connect(g, from, to, targetLen + window)) {
    double len = pathLength(g, *base);
    if (len >= targetLen - 1e-9 && len <= targetLen + window + 1e-9) {
      TunedPath out;
      out.word = *base;
      out.length = len;
      out.baseLength = len;
      return out;
    }
  }

  auto staged = stagedConnect(g, from, to, loopA.word, loopB.word, connectorBudget);
  if (!staged) {
    throw NotFoundError("ConnectorNotFound: no path through both loop classes within budget");
  }
  double baseLen = pathLength(g, staged->word);
  // Loops add multiples of the two periods; delta-dense arithmetic picks the
  // counts. x is the larger period.
  double x = std::max(la, lb), y = std::min(la, lb);
  double tau = targetLen - baseLen;
  DeltaDenseResult dd;
  try {
    dd = deltaDenseCoeffs(x, y, tau, 0);
  } catch (const InvalidArgumentError&) {
    double C = std::floor(y / (x - y) + 2.0) + 1.0;
    double threshold = baseLen + std::max(C * y, 1.0);
    throw NotFoundError("Infeasible: targetLen below certified threshold " +
                        std::to_string(threshold));
  }
  // dd.m1 counts the longer period, dd.m2 the shorter; the staged path hits
  // loopA's word at hitA and loopB's word at hitB.
  long long countA = (la >= lb) ? dd.m1 : dd.m2;
  long long countB = (la >= lb) ? dd.m2 : dd.m1;

  TunedPath out;
  out.baseLength = baseLen;
  out.loopsA = countA;
  out.loopsB = countB;
  const auto& w = staged->word;
  auto rotA = rotationStartingAt(loopA.word, w[staged->hitA]);
  auto rotB = rotationStartingAt(loopB.word, w[staged->hitB]);
  for (int i = 0; i <= staged->hitA; ++i) out.word.push_back(w[i]);
  for (long long k = 0; k < countA; ++k) out.word.insert(out.word.end(), rotA.begin(), rotA.end());
  for (int i = staged->hitA + 1; i <= staged->hitB; ++i) out.word.push_back(w[i]);
  for (long long k = 0; k < countB; ++k) out.word.insert(out.word.end(), rotB.begin(), rotB.end());
  for (std::size_t i = staged->hitB + 1; i < w.size(); ++i) out.word.push_back(w[i]);

  out.length = pathLength(g, out.word);
  // Joint-by-joint admissibility (interior joints of an open path).
  for (std::size_t i = 0; i + 1 < out.word.size(); ++i) {
    if (!g.jointBetween(out.word[i], out.word[i + 1])) {
      throw Error(ErrorCode::Internal, "tuned connector has an inadmissible joint");
    }
  }
  if (out.length < targetLen - 1e-9 || out.length > targetLen + window + 1e-9) {
    throw Error(ErrorCode::Internal, "tuned connector missed the length window");
  }
  return out;
}

SaddleExtension extendToSaddlePath(const ConcatGraph& g, const GoodSegment& seg, double delta,
                                   const HyperbolicityConfig& cfg) {
  if (delta <= 0.0) throw InvalidArgumentError("extendToSaddlePath: delta must be positive");
  auto tl = TurnTimeline::fromClosedGeodesic(g, seg.record);
  if (!isGoodSegment(tl, seg.a, seg.len, cfg)) {
    throw InvalidArgumentError("NotInG: segment fails the good-segment averages");
  }
  double margin = std::max(0.0, -0.5 * std::log(delta)) + 1e-6;
  auto first = tl.prevExcess(seg.a - margin);
  auto last = tl.nextExcess(seg.a + seg.len + margin);
  if (!first || !last) {
    throw InvalidArgumentError("NotInG: segment has no excess turns to trim to");
  }

  SaddleExtension out;
  out.e1 = first->t;
  out.e2 = last->t;
  out.s0 = seg.a - out.e1;
  out.supEstimate = std::max(std::exp(-2.0 * (seg.a - out.e1)),
                             std::exp(-2.0 * (out.e2 - (seg.a + seg.len))));

  // Unroll the record's word from the event at e1 to the event at e2.
  const auto& rec = seg.record;
  std::size_t k = rec.word.size();
  double base = std::floor(out.e1 / rec.period + 0.5) * rec.period;
  std::size_t idx = 0;
  bool found = false;
  for (std::size_t i = 0; i < k && !found; ++i) {
    for (double shift : {base - rec.period, base, base + rec.period}) {
      if (std::abs(rec.eventTimes[i] + shift - out.e1) <= 1e-9) {
        idx = i;
        found = true;
        break;
      }
    }
  }
  if (!found) throw Error(ErrorCode::Internal, "trim event does not align with the record");
  double t = out.e1;
  while (t < out.e2 - 1e-9) {
    out.word.push_back(rec.word[idx]);
    t += g.nodes[rec.word[idx]].length;
    idx = (idx + 1) % k;
  }
  if (std::abs(t - out.e2) > 1e-6) {
    throw Error(ErrorCode::Internal, "saddle path length does not meet the trim event");
  }
  return out;
}

ShadowingReport glueSegments(const ConcatGraph& g, const std::vector<GoodSegment>& segments,
                             double delta, SpecificationMode mode,
                             const HyperbolicityConfig& cfg) {
  if (segments.empty()) throw InvalidArgumentError("glueSegments: no segments");
  if (delta <= 0.0) throw InvalidArgumentError("glueSegments: delta must be positive");
  std::size_t k = segments.size();

  std::vector<SaddleExtension> ext;
  for (std::size_t i = 0; i < k; ++i) {
    try {
      ext.push_back(extendToSaddlePath(g, segments[i], delta, cfg));
    } catch (const InvalidArgumentError& e) {
      throw InvalidArgumentError(std::string(e.what()) + " (segment " + std::to_string(i) + ")");
    }
  }

  // Connectors between consecutive extensions (cyclically).
  std::vector<std::vector<int>> conns(k);
  std::vector<double> connLen(k);
  double commonTransition = 0.0;

  auto tailOf = [&](std::size_t i) { return ext[i].e2 - (segments[i].a + segments[i].len); };
  auto headOf = [&](std::size_t i) { return segments[i].a - ext[i].e1; };

  if (mode == SpecificationMode::Weak) {
    for (std::size_t i = 0; i < k; ++i) {
      std::size_t j = (i + 1) % k;
      int from = ext[i].word.back();
      int to = ext[j].word.front();
      std::optional<std::vector<int>> c;
      for (double budget : {8.0, 16.0, 32.0, 64.0}) {
        c = connect(g, from, to, budget);
        if (c) break;
      }
      if (!c) throw NotFoundError("ConnectorNotFound: segments " + std::to_string(i) + " -> " +
                                  std::to_string(j));
      conns[i] = *c;
      connLen[i] = pathLength(g, conns[i]);
    }
  } else {
    // Strong form: equalize transitions within delta/4 using tuned connectors.
    auto pair = similarLengthPair(g, 0.25 * delta, 7.0);
    double x = std::max(pair.first.period, pair.second.period);
    double y = std::min(pair.first.period, pair.second.period);
    double C = std::floor(y / (x - y) + 2.0) + 1.0;
    double ddThreshold = std::max(C * y, 1.0);

    // Feasible common transition: every connector's target must be above its
    // certified threshold.
    double tauHat = 0.0;
    std::vector<double> baseLens(k);
    for (std::size_t i = 0; i < k; ++i) {
      std::size_t j = (i + 1) % k;
      int from = ext[i].word.back();
      int to = ext[j].word.front();
      auto staged = stagedConnect(g, from, to, pair.first.word, pair.second.word, 64.0);
      if (!staged) throw NotFoundError("ConnectorNotFound: no staged connector");
      baseLens[i] = pathLength(g, staged->word);
      double exitLen = g.nodes[from].length;
      double entryLen = g.nodes[to].length;
      double minTau = (baseLens[i] + ddThreshold) - exitLen - entryLen + tailOf(i) + headOf(j);
      tauHat = std::max(tauHat, minTau);
    }
    tauHat += 0.01;
    commonTransition = tauHat;

    for (std::size_t i = 0; i < k; ++i) {
      std::size_t j = (i + 1) % k;
      int from = ext[i].word.back();
      int to = ext[j].word.front();
      double exitLen = g.nodes[from].length;
      double entryLen = g.nodes[to].length;
      double target = tauHat - tailOf(i) - headOf(j) + exitLen + entryLen;
      TunedPath tuned =
          tuneConnector(g, from, to, target, 0.25 * delta, pair.first, pair.second, 64.0);
      conns[i] = tuned.word;
      connLen[i] = tuned.length;
    }
  }

  // Glue: W_0, then per boundary the connector interior followed by the next
  // extension (the connector's first and last nodes are the neighboring
  // extensions' endpoint traversals).
  std::vector<int> glued;
  std::vector<double> windowStart(k);
  double clock = 0.0;
  auto pushNode = [&](int v) {
    glued.push_back(v);
    clock += g.nodes[v].length;
  };
  for (int v : ext[0].word) pushNode(v);
  windowStart[0] = segments[0].a - ext[0].e1;
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = (i + 1) % k;
    const auto& c = conns[i];
    for (std::size_t t = 1; t + 1 < c.size(); ++t) pushNode(c[t]);
    if (j == 0) {
      // Wrap: the connector's last node is glued[0].
      if (c.size() == 1) {
        // The final extension's exit and glued[0] are one traversal.
        clock -= g.nodes[glued.back()].length;
        glued.pop_back();
      }
      break;
    }
    if (c.size() == 1) {
      // exit == entry as one traversal: the next word starts at the tail.
      double startW = clock - g.nodes[glued.back()].length;
      windowStart[j] = startW + (segments[j].a - ext[j].e1);
      for (std::size_t w = 1; w < ext[j].word.size(); ++w) pushNode(ext[j].word[w]);
    } else {
      double startW = clock;
      windowStart[j] = startW + (segments[j].a - ext[j].e1);
      for (int v : ext[j].word) pushNode(v);
    }
  }

  double period = pathLength(g, glued);
  // Validate every joint including the wrap.
  for (std::size_t i = 0; i < glued.size(); ++i) {
    int a = glued[i], b = glued[(i + 1) % glued.size()];
    if (!g.jointBetween(a, b)) {
      throw Error(ErrorCode::Internal, "glued word has an inadmissible joint");
    }
  }

  ShadowingReport report;
  report.mode = mode;
  report.commonTransition = commonTransition;

  // Canonical record: rotate to the lexicographically minimal rotation.
  std::size_t best = 0;
  for (std::size_t r = 1; r < glued.size(); ++r) {
    for (std::size_t t = 0; t < glued.size(); ++t) {
      int a = glued[(r + t) % glued.size()];
      int b = glued[(best + t) % glued.size()];
      if (a < b) { best = r; break; }
      if (a > b) break;
    }
  }
  std::vector<int> canonical;
  for (std::size_t t = 0; t < glued.size(); ++t) canonical.push_back(glued[(best + t) % glued.size()]);
  double rotationShift = 0.0;
  for (std::size_t t = 0; t < best; ++t) rotationShift += g.nodes[glued[t]].length;
  auto rec = findClosedGeodesic(g, [&] {
    std::ostringstream os;
    for (std::size_t i = 0; i < canonical.size(); ++i) {
      if (i) os << '-';
      os << canonical[i];
    }
    return os.str();
  }(), 0.0);
  if (!rec) throw Error(ErrorCode::Internal, "glued word failed record reconstruction");
  report.produced = *rec;

  for (std::size_t i = 0; i < k; ++i) {
    ShadowedWindow w;
    // Positions on the produced record's clock (canonical rotation at 0),
    // normalized into [0, period).
    w.start = positiveMod(windowStart[i] - rotationShift, period);
    w.copyStart = w.start - (segments[i].a - ext[i].e1);
    w.copyEnd = w.copyStart + (ext[i].e2 - ext[i].e1);
    w.supEstimate = ext[i].supEstimate;
    double nextStart = (i + 1 < k) ? windowStart[i + 1] : windowStart[0] + period;
    w.transition = nextStart - (windowStart[i] + segments[i].len);
    report.segments.push_back(w);
    report.deltaAchieved = std::max(report.deltaAchieved, w.supEstimate);
  }

  if (mode == SpecificationMode::Strong) {
    for (const auto& w : report.segments) {
      if (w.transition < commonTransition - 1e-6 ||
          w.transition > commonTransition + 0.25 * delta + 1e-6) {
        throw Error(ErrorCode::Internal, "strong transitions escaped the advertised window");
      }
    }
  }
  return report;
}

PeriodicApproximation periodicApproximation(const ConcatGraph& g, const GoodSegment& seg,
                                            double delta, const HyperbolicityConfig& cfg) {
  ShadowingReport rep = glueSegments(g, {seg}, delta, SpecificationMode::Strong, cfg);
  PeriodicApproximation out;
  out.closed = rep.produced;
  out.report = rep;

  bool regular = !rep.produced.singular;
  if (!regular) throw Error(ErrorCode::Internal, "periodic approximation produced a singular class");

  // Period window bookkeeping: period = len + transition by construction.
  double period = rep.produced.period;
  double transition = rep.segments.front().transition;
  out.tPrime = transition + 0.25 * delta;
  out.periodWindowLo = seg.len + out.tPrime - delta;
  out.periodWindowHi = seg.len + out.tPrime;
  if (period < out.periodWindowLo - 1e-9 || period > out.periodWindowHi + 1e-9) {
    throw Error(ErrorCode::Internal, "periodic approximation period escaped its window");
  }
  return out;
}

}  // namespace flatflow
