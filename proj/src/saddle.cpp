#include "flatflow/saddle.hpp"

#include <algorithm>
#include <cmath>
#include <atomic>
#include <map>
#include <mutex>
#include <queue>
#include <sstream>
#include <thread>

#include "march.hpp"
#include "unfold.hpp"

namespace flatflow {

namespace {

// Re-trace an enumerated segment: verifies it terminates at a cone point at
// the enumerated length and supplies the authoritative arrival data (the
// unfolding can report a sheet-ambiguous incoming angle for grazing arrivals)
// plus the per-polygon occupancy.
struct RetraceData {
  int endCone = -1;
  double phiBwd = 0.0;
  bool capturedEarly = false;  // the trace stopped at a nearer cone copy
  std::vector<double> occupancy;
};

RetraceData retraceSaddle(const Surface& s, int startCone, double phiOut, double length) {
  TraceResult tr = traceFromCone(s, startCone, phiOut, length + 1e-6, ConePolicy::stop());
  if (!tr.path.coneHitTime) {
    throw Error(ErrorCode::Internal, "saddle connection re-trace missed its endpoint");
  }
  if (*tr.path.coneHitTime < length - 1e-9) {
    RetraceData out;
    out.capturedEarly = true;
    return out;
  }
  if (std::abs(*tr.path.coneHitTime - length) > 1e-9) {
    throw Error(ErrorCode::Internal, "saddle connection re-trace overshot its endpoint");
  }
  RetraceData out;
  out.endCone = tr.path.coneHitCone;
  out.phiBwd = tr.path.coneHitPhiBwd;
  out.occupancy.assign(s.polygons.size(), 0.0);
  for (const auto& seg : tr.path.segments) {
    out.occupancy[s.faces[seg.face].originalPolygon] += seg.tB - seg.tA;
  }
  return out;
}

}  // namespace

std::vector<SaddleConnection> enumerateSaddleConnections(const Surface& s, double maxLen,
                                                         const EnumerationOptions& opts) {
  if (maxLen <= 0.0) return {};

  struct Shard {
    int cone = 0;
    std::size_t corner = 0;
  };
  std::vector<Shard> shards;
  for (int c = 0; c < s.coneCount(); ++c) {
    for (std::size_t k = 0; k < s.coneClass(c).corners.size(); ++k) shards.push_back({c, k});
  }
  std::vector<std::vector<internal::VisibleConeHit>> hits(shards.size());
  std::size_t perShardBudget = std::max<std::size_t>(1, opts.chartBudget / shards.size());

  int threads = std::max(1, opts.threads);
  std::atomic<std::size_t> nextShard{0};
  std::atomic<bool> failed{false};
  std::string failMessage;
  std::mutex failMutex;
  auto worker = [&]() {
    while (true) {
      std::size_t i = nextShard.fetch_add(1);
      if (i >= shards.size() || failed.load()) return;
      internal::UnfoldBudget budget;
      budget.maxStates = perShardBudget;
      try {
        hits[i] = internal::coneCornerVisibility(s, shards[i].cone, shards[i].corner, maxLen,
                                                 budget);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(failMutex);
        failed.store(true);
        failMessage = e.what();
        return;
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failed.load()) throw BudgetError(failMessage);

  std::vector<SaddleConnection> out;
  for (std::size_t i = 0; i < shards.size(); ++i) {
    int cone = shards[i].cone;
    const VertexClass& cls = s.coneClass(cone);
    double offset = cls.offsets[shards[i].corner];
    for (const auto& h : hits[i]) {
      SaddleConnection sc;
      sc.startCone = cone;
      sc.endCone = h.endCone;
      sc.phiOut = positiveMod(h.angle, cls.totalAngle);
      sc.phiBwd = h.phiBwd;
      sc.length = h.length;
      double local = h.angle - offset;
      sc.holonomy = {h.length * std::cos(local), h.length * std::sin(local)};
      out.push_back(sc);
    }
  }

  // Deduplicate by (startCone, phiOut, length); boundary hits can be reported
  // by two adjacent faces.
  std::sort(out.begin(), out.end(), [](const SaddleConnection& a, const SaddleConnection& b) {
    if (a.startCone != b.startCone) return a.startCone < b.startCone;
    if (a.phiOut != b.phiOut) return a.phiOut < b.phiOut;
    return a.length < b.length;
  });
  std::vector<SaddleConnection> dedup;
  for (const auto& sc : out) {
    bool dup = false;
    for (auto it = dedup.rbegin(); it != dedup.rend(); ++it) {
      if (it->startCone != sc.startCone) break;
      if (std::abs(it->phiOut - sc.phiOut) > 1e-9 * std::max(1.0, sc.length)) break;
      if (std::abs(it->length - sc.length) <= 1e-9) { dup = true; break; }
    }
    if (!dup) dedup.push_back(sc);
  }
  // Circular wrap: phi near 0 vs near L.
  {
    std::vector<SaddleConnection> filtered;
    for (const auto& sc : dedup) {
      double L = s.coneClass(sc.startCone).totalAngle;
      bool dup = false;
      if (sc.phiOut > L - 1e-9) {
        for (const auto& other : dedup) {
          if (other.startCone == sc.startCone && other.phiOut < 1e-9 &&
              std::abs(other.length - sc.length) <= 1e-9) {
            dup = true;
            break;
          }
        }
      }
      if (!dup) filtered.push_back(sc);
    }
    dedup = std::move(filtered);
  }

  std::sort(dedup.begin(), dedup.end(), [](const SaddleConnection& a, const SaddleConnection& b) {
    if (a.length != b.length) return a.length < b.length;
    if (a.startCone != b.startCone) return a.startCone < b.startCone;
    return a.phiOut < b.phiOut;
  });
  for (std::size_t i = 0; i < dedup.size(); ++i) dedup[i].id = static_cast<int>(i);

  // The retrace is the final arbiter: it fixes sheet-ambiguous arrival data
  // and drops segments that pass within tol of a nearer cone copy.
  {
    std::vector<SaddleConnection> confirmed;
    for (auto& sc : dedup) {
      RetraceData rd = retraceSaddle(s, sc.startCone, sc.phiOut, sc.length);
      if (rd.capturedEarly) continue;
      sc.endCone = rd.endCone;
      sc.phiBwd = rd.phiBwd;
      sc.polygonOccupancy = std::move(rd.occupancy);
      confirmed.push_back(std::move(sc));
    }
    dedup = std::move(confirmed);
    for (std::size_t i = 0; i < dedup.size(); ++i) dedup[i].id = static_cast<int>(i);
  }

  // Reversal pairing.
  for (auto& sc : dedup) {
    if (sc.reverseId >= 0) continue;
    double L = s.coneClass(sc.endCone).totalAngle;
    for (auto& other : dedup) {
      if (other.startCone != sc.endCone || other.endCone != sc.startCone) continue;
      if (std::abs(other.length - sc.length) > 1e-9) continue;
      double dPhi = std::abs(positiveMod(other.phiOut - sc.phiBwd + 0.5 * L, L) - 0.5 * L);
      double Ls = s.coneClass(sc.startCone).totalAngle;
      double dBwd = std::abs(positiveMod(other.phiBwd - sc.phiOut + 0.5 * Ls, Ls) - 0.5 * Ls);
      if (dPhi <= 1e-8 && dBwd <= 1e-8) {
        sc.reverseId = other.id;
        other.reverseId = sc.id;
        break;
      }
    }
    if (sc.reverseId < 0) {
      throw Error(ErrorCode::Internal, "saddle connection reversal not found in batch");
    }
  }

  return dedup;
}

double shortestSaddleConnection(const Surface& s, const EnumerationOptions& opts) {
  double L = std::numeric_limits<double>::infinity();
  for (const auto& p : s.polygons) {
    for (std::size_t i = 0; i < p.vertices.size(); ++i) {
      L = std::min(L, dist(p.vertices[i], p.vertices[(i + 1) % p.vertices.size()]));
    }
  }
  for (int iter = 0; iter < 24; ++iter) {
    auto batch = enumerateSaddleConnections(s, L, opts);
    if (!batch.empty()) return batch.front().length;
    L *= 2.0;
  }
  throw BudgetError("WorkLimitExceeded: no saddle connection found");
}

std::optional<JointAngles> admissibleConcatenation(const Surface& s, const SaddleConnection& sc1,
                                                   const SaddleConnection& sc2) {
  if (sc1.endCone != sc2.startCone) {
    throw InvalidArgumentError("ClassMismatch: saddle connections do not share a cone class");
  }
  double L = s.coneClass(sc1.endCone).totalAngle;
  double left = positiveMod(sc1.phiBwd - sc2.phiOut, L);
  double right = L - left;
  if (std::min(left, right) < M_PI - s.tol.angle) return std::nullopt;
  JointAngles j;
  j.left = left;
  j.right = right;
  j.theta = (left <= right) ? left : -right;
  j.singular = std::abs(j.theta) <= M_PI + s.tol.angle;
  return j;
}

std::optional<JointAngles> ConcatGraph::jointBetween(int from, int to) const {
  for (const auto& e : adjacency[from]) {
    if (e.to == to) return e.joint;
  }
  return std::nullopt;
}

ConcatGraph buildConcatGraph(const Surface& s, double maxLen, const EnumerationOptions& opts) {
  ConcatGraph g;
  g.surface = &s;
  g.maxLen = maxLen;
  g.nodes = enumerateSaddleConnections(s, maxLen, opts);
  g.adjacency.resize(g.nodes.size());
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    for (std::size_t j = 0; j < g.nodes.size(); ++j) {
      if (g.nodes[i].endCone != g.nodes[j].startCone) continue;
      auto joint = admissibleConcatenation(s, g.nodes[i], g.nodes[j]);
      if (joint) g.adjacency[i].push_back({static_cast<int>(j), *joint});
    }
  }
  return g;
}

std::string ClosedGeodesicRecord::canonicalKey() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (i) os << '-';
    os << word[i];
  }
  return os.str();
}

namespace {

ClosedGeodesicRecord buildRecord(const ConcatGraph& g, const std::vector<int>& word) {
  ClosedGeodesicRecord rec;
  rec.word = word;
  rec.jointThetas.resize(word.size());
  rec.eventTimes.resize(word.size());
  rec.polygonOccupancy.assign(g.surface->polygons.size(), 0.0);
  double t = 0.0;
  rec.singular = true;
  for (std::size_t i = 0; i < word.size(); ++i) {
    int prev = word[(i + word.size() - 1) % word.size()];
    auto joint = g.jointBetween(prev, word[i]);
    if (!joint) throw Error(ErrorCode::Internal, "closed word has an inadmissible joint");
    rec.jointThetas[i] = joint->theta;
    if (!joint->singular) rec.singular = false;
    rec.eventTimes[i] = t;
    t += g.nodes[word[i]].length;
    for (std::size_t p = 0; p < rec.polygonOccupancy.size(); ++p) {
      rec.polygonOccupancy[p] += g.nodes[word[i]].polygonOccupancy[p];
    }
  }
  rec.period = t;
  return rec;
}

// Minimal additional length needed to close a walk from v back to n0 using
// nodes >= n0 (sum of strictly-intermediate node lengths).
std::vector<double> closingCosts(const ConcatGraph& g, int n0) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> D(g.nodes.size(), inf);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  // Reverse relaxation: D(v) = 0 if edge v->n0; else min over edges v->w of
  // len(w) + D(w).
  std::vector<std::vector<int>> reverseAdj(g.nodes.size());
  for (std::size_t v = 0; v < g.nodes.size(); ++v) {
    if (static_cast<int>(v) < n0) continue;
    for (const auto& e : g.adjacency[v]) {
      if (e.to == n0) {
        if (D[v] > 0.0) { D[v] = 0.0; pq.push({0.0, static_cast<int>(v)}); }
      } else if (e.to > n0) {
        reverseAdj[e.to].push_back(static_cast<int>(v));
      }
    }
  }
  while (!pq.empty()) {
    auto [d, v] = pq.top();
    pq.pop();
    if (d > D[v]) continue;
    double viaV = d + g.nodes[v].length;
    for (int u : reverseAdj[v]) {
      if (viaV < D[u]) { D[u] = viaV; pq.push({viaV, u}); }
    }
  }
  return D;
}

bool isLexMinRotation(const std::vector<int>& w) {
  // w[0] is the minimal letter; compare against rotations starting at later
  // occurrences of it.
  for (std::size_t p = 1; p < w.size(); ++p) {
    if (w[p] != w[0]) continue;
    for (std::size_t k = 0; k < w.size(); ++k) {
      int a = w[(p + k) % w.size()];
      int b = w[k];
      if (a < b) return false;
      if (a > b) break;
    }
  }
  return true;
}

}  // namespace

void enumerateClosedWalks(const ConcatGraph& g, double maxPeriod,
                          const std::function<void(const WalkView&)>& visit,
                          const CycleEnumerationOptions& opts) {
  if (g.nodes.empty() || maxPeriod <= 0.0) return;
  const double lenTol = 1e-9;
  const std::size_t nPoly = g.surface->polygons.size();
  const std::size_t nNodes = g.nodes.size();

  std::vector<double> nodeLen(nNodes);
  double minLen = std::numeric_limits<double>::infinity();
  for (std::size_t v = 0; v < nNodes; ++v) {
    nodeLen[v] = g.nodes[v].length;
    minLen = std::min(minLen, nodeLen[v]);
  }
  const std::size_t maxDepth = static_cast<std::size_t>(maxPeriod / minLen) + 4;

  // Fixed-depth DFS arrays.
  std::vector<int> word(maxDepth);
  std::vector<std::size_t> cursor(maxDepth);
  std::vector<double> eventTimes(maxDepth);
  std::vector<double> thetas(maxDepth);
  std::vector<int> nonSingular(maxDepth);
  std::vector<double> occupancyStack(maxDepth * nPoly);

  struct FlatEdge {
    int to;
    int singular;
    double theta;
    double cost;  // len[to] + D[to], the cheapest completion through `to`
  };
  std::vector<FlatEdge> flat;
  std::vector<std::size_t> offs(nNodes + 1);
  std::vector<double> closeTheta(nNodes);
  std::vector<int> closeSingular(nNodes);
  std::vector<char> closeExists(nNodes);

  std::size_t steps = 0;
  std::size_t emitted = 0;
  std::vector<int> lexWord;

  for (int n0 = 0; n0 < static_cast<int>(nNodes); ++n0) {
    if (nodeLen[n0] > maxPeriod + lenTol) continue;
    std::vector<double> D = closingCosts(g, n0);
    if (nodeLen[n0] + D[n0] > maxPeriod + lenTol && !g.jointBetween(n0, n0)) continue;

    // Per-start flattened adjacency restricted to nodes >= n0, sorted by
    // completion cost so the horizon prune can break the scan.
    flat.clear();
    for (std::size_t v = 0; v < nNodes; ++v) {
      offs[v] = flat.size();
      closeExists[v] = 0;
      if (static_cast<int>(v) < n0) continue;
      for (const auto& e : g.adjacency[v]) {
        if (e.to == n0) {
          closeExists[v] = 1;
          closeTheta[v] = e.joint.theta;
          closeSingular[v] = e.joint.singular ? 1 : 0;
        }
        if (e.to < n0) continue;
        if (D[e.to] == std::numeric_limits<double>::infinity()) continue;
        flat.push_back({e.to, e.joint.singular ? 1 : 0, e.joint.theta,
                        nodeLen[e.to] + D[e.to]});
      }
      std::sort(flat.begin() + static_cast<long>(offs[v]), flat.end(),
                [](const FlatEdge& a, const FlatEdge& b) {
                  if (a.cost != b.cost) return a.cost < b.cost;
                  return a.to < b.to;
                });
    }
    offs[nNodes] = flat.size();

    std::size_t depth = 0;
    word[0] = n0;
    cursor[0] = offs[n0];
    eventTimes[0] = 0.0;
    thetas[0] = 0.0;
    nonSingular[0] = 0;
    for (std::size_t p = 0; p < nPoly; ++p) {
      occupancyStack[p] = g.nodes[n0].polygonOccupancy[p];
    }
    double accum = nodeLen[n0];
    int rootCount = 1;

    // Emission happens when the stack top can close back to n0.
    auto tryEmit = [&](std::size_t d, double period) {
      int v = word[d];
      if (!closeExists[v] || period > maxPeriod + lenTol) return;
      bool accept = true;
      if (rootCount > 1) {
        lexWord.assign(word.begin(), word.begin() + static_cast<long>(d) + 1);
        accept = isLexMinRotation(lexWord);
      }
      if (!accept) return;
      if (++emitted > opts.maxClasses) {
        throw BudgetError("WorkLimitExceeded: closed-geodesic class budget");
      }
      thetas[0] = closeTheta[v];
      WalkView view;
      view.word = word.data();
      view.length = d + 1;
      view.eventTimes = eventTimes.data();
      view.jointThetas = thetas.data();
      view.period = period;
      view.singular = (nonSingular[d] == 0) && closeSingular[v] == 1;
      view.occupancy = occupancyStack.data() + d * nPoly;
      view.polygonCount = nPoly;
      visit(view);
    };

    tryEmit(0, accum);

    while (true) {
      int v = word[depth];
      std::size_t cur = cursor[depth];
      if (cur >= offs[v + 1] ||
          accum + flat[cur].cost > maxPeriod + lenTol) {
        // List exhausted or every remaining completion overshoots.
        if (depth == 0) break;
        if (v == n0) --rootCount;
        --depth;
        accum = eventTimes[depth] + nodeLen[word[depth]];
        continue;
      }
      cursor[depth] = cur + 1;
      if (++steps > opts.maxSteps) {
        throw BudgetError("WorkLimitExceeded: closed-geodesic enumeration step budget");
      }
      const FlatEdge& edge = flat[cur];
      int next = edge.to;
      ++depth;
      if (depth >= maxDepth) throw Error(ErrorCode::Internal, "walk depth overflow");
      eventTimes[depth] = accum;
      thetas[depth] = edge.theta;
      nonSingular[depth] = nonSingular[depth - 1] + (edge.singular ? 0 : 1);
      const double* prevOcc = occupancyStack.data() + (depth - 1) * nPoly;
      double* curOcc = occupancyStack.data() + depth * nPoly;
      for (std::size_t p = 0; p < nPoly; ++p) {
        curOcc[p] = prevOcc[p] + g.nodes[next].polygonOccupancy[p];
      }
      word[depth] = next;
      cursor[depth] = offs[next];
      if (next == n0) ++rootCount;
      accum = eventTimes[depth] + nodeLen[next];
      tryEmit(depth, accum);
    }
  }
}

void enumerateClosedGeodesics(const ConcatGraph& g, double maxPeriod, GeodesicClassFilter filter,
                              const std::function<void(const ClosedGeodesicRecord&)>& emit,
                              const CycleEnumerationOptions& opts) {
  enumerateClosedWalks(
      g, maxPeriod,
      [&](const WalkView& w) {
        bool pass = filter == GeodesicClassFilter::All ||
                    (filter == GeodesicClassFilter::Regular && !w.singular) ||
                    (filter == GeodesicClassFilter::Singular && w.singular);
        if (!pass) return;
        ClosedGeodesicRecord rec;
        rec.word.assign(w.word, w.word + w.length);
        rec.period = w.period;
        rec.singular = w.singular;
        rec.jointThetas.assign(w.jointThetas, w.jointThetas + w.length);
        rec.eventTimes.assign(w.eventTimes, w.eventTimes + w.length);
        rec.polygonOccupancy.assign(w.occupancy, w.occupancy + w.polygonCount);
        emit(rec);
      },
      opts);
}

std::vector<ClosedGeodesicRecord> collectClosedGeodesics(const ConcatGraph& g, double maxPeriod,
                                                         GeodesicClassFilter filter,
                                                         const CycleEnumerationOptions& opts) {
  std::vector<ClosedGeodesicRecord> out;
  enumerateClosedGeodesics(g, maxPeriod, filter,
                           [&](const ClosedGeodesicRecord& r) { out.push_back(r); }, opts);
  std::sort(out.begin(), out.end(),
            [](const ClosedGeodesicRecord& a, const ClosedGeodesicRecord& b) {
              if (a.period != b.period) return a.period < b.period;
              return a.word < b.word;
            });
  return out;
}

std::optional<std::vector<int>> connect(const ConcatGraph& g, int from, int to, double maxLen) {
  if (from < 0 || to < 0 || from >= static_cast<int>(g.nodes.size()) ||
      to >= static_cast<int>(g.nodes.size())) {
    throw InvalidArgumentError("connect: node id out of range");
  }
  if (g.nodes[from].length > maxLen + 1e-9) return std::nullopt;
  if (from == to) return std::vector<int>{from};

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(g.nodes.size(), inf);
  std::vector<int> parent(g.nodes.size(), -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[from] = g.nodes[from].length;
  pq.push({dist[from], from});
  while (!pq.empty()) {
    auto [d, v] = pq.top();
    pq.pop();
    if (d > dist[v]) continue;
    if (v == to) break;
    for (const auto& e : g.adjacency[v]) {
      double nd = d + g.nodes[e.to].length;
      if (nd < dist[e.to] && nd <= maxLen + 1e-9) {
        dist[e.to] = nd;
        parent[e.to] = v;
        pq.push({nd, e.to});
      }
    }
  }
  if (dist[to] == inf) return std::nullopt;
  std::vector<int> word;
  for (int v = to; v != -1; v = parent[v]) word.push_back(v);
  std::reverse(word.begin(), word.end());
  return word;
}

double pathLength(const ConcatGraph& g, const std::vector<int>& word) {
  double t = 0.0;
  for (int id : word) t += g.nodes[id].length;
  return t;
}

GeodesicPath materializeClosedGeodesic(const ConcatGraph& g, const ClosedGeodesicRecord& rec,
                                       double t0, double t1) {
  if (t1 <= t0) throw InvalidArgumentError("materialize: empty window");
  const Surface& s = *g.surface;
  // Latest event time <= t0, unrolled periodically.
  double base = std::floor(t0 / rec.period) * rec.period;
  std::size_t k = rec.word.size();
  std::size_t idx = 0;
  double eventT = base;
  for (std::size_t i = 0; i < k; ++i) {
    double t = base + rec.eventTimes[i];
    if (t <= t0 + 1e-12) { idx = i; eventT = t; }
  }
  double length = (t1 - eventT) + 1e-7;
  // One explicit turning angle per event the trace will cross, plus a spare.
  std::vector<double> thetas;
  double covered = 0.0;
  std::size_t j = idx;
  while (covered < length + 1e-6) {
    covered += g.nodes[rec.word[j]].length;
    j = (j + 1) % k;
    thetas.push_back(rec.jointThetas[j]);
  }
  thetas.push_back(rec.jointThetas[(j + 1) % k]);
  const SaddleConnection& first = g.nodes[rec.word[idx]];
  TraceResult tr = traceFromCone(s, first.startCone, first.phiOut, length,
                                 ConePolicy::explicitAngles(thetas));
  return flowShift(tr.path, -eventT);
}

std::optional<ClosedGeodesicRecord> findClosedGeodesic(const ConcatGraph& g,
                                                       const std::string& canonicalKey,
                                                       double maxPeriod) {
  std::vector<int> word;
  std::istringstream is(canonicalKey);
  std::string tok;
  while (std::getline(is, tok, '-')) {
    try {
      word.push_back(std::stoi(tok));
    } catch (const std::exception&) {
      throw InvalidArgumentError("bad canonical key '" + canonicalKey + "'");
    }
  }
  if (word.empty()) throw InvalidArgumentError("empty canonical key");
  for (int id : word) {
    if (id < 0 || id >= static_cast<int>(g.nodes.size())) {
      throw InvalidArgumentError("canonical key references a node outside the graph");
    }
  }
  for (std::size_t i = 0; i < word.size(); ++i) {
    int prev = word[(i + word.size() - 1) % word.size()];
    if (!g.jointBetween(prev, word[i])) return std::nullopt;
  }
  ClosedGeodesicRecord rec = buildRecord(g, word);
  if (maxPeriod > 0.0 && rec.period > maxPeriod + 1e-9) return std::nullopt;
  return rec;
}

}  // namespace flatflow
