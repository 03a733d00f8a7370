#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "flatflow/surface.hpp"
#include "unfold.hpp"

namespace flatflow {

// Exact bounded-radius intrinsic distance. A shortest path decomposes at its
// cone-point visits into straight visible segments, so Dijkstra over
// {p, q, cone classes} with straight-visibility edge weights gives the
// distance once every visibility search is exhaustive within the cutoff.
std::optional<double> surfaceDistance(const Surface& s, const SurfacePoint& p,
                                      const SurfacePoint& q, double cutoff,
                                      std::size_t chartBudget, DistanceQueryStats* stats) {
  if (cutoff <= 0.0) throw InvalidArgumentError("surfaceDistance: cutoff must be positive");
  if (internal::samePoint(s, p, q)) return 0.0;

  internal::UnfoldBudget budget;
  budget.maxStates = chartBudget;

  const double inf = std::numeric_limits<double>::infinity();
  int nCones = s.coneCount();
  // Node ids: 0 = p, 1 = q, 2 + i = cone class i.
  std::vector<std::vector<std::pair<int, double>>> adj(2 + nCones);
  auto addEdge = [&](int a, int b, double w) {
    adj[a].push_back({b, w});
    adj[b].push_back({a, w});
  };

  bool pAtCone[2] = {false, false};
  const SurfacePoint* pts[2] = {&p, &q};
  for (int k = 0; k < 2; ++k) {
    const Face& f = s.faces[pts[k]->face];
    for (std::size_t v = 0; v < f.verts.size(); ++v) {
      if (dist(f.verts[v], pts[k]->local) <= s.tol.geom &&
          s.vertexClasses[f.cornerClass[v]].cone) {
        int cone = s.coneIndexOfCorner(pts[k]->face, static_cast<int>(v));
        addEdge(k, 2 + cone, 0.0);
        pAtCone[k] = true;
      }
    }
  }

  try {
    if (!pAtCone[0]) {
      auto vis = internal::pointVisibility(s, p, cutoff, &q, budget);
      for (const auto& h : vis.coneHits) addEdge(0, 2 + h.endCone, h.length);
      for (const auto& h : vis.targetHits) addEdge(0, 1, h.length);
    }
    if (!pAtCone[1]) {
      auto vis = internal::pointVisibility(s, q, cutoff, nullptr, budget);
      for (const auto& h : vis.coneHits) addEdge(1, 2 + h.endCone, h.length);
    }
    for (int c = 0; c < nCones; ++c) {
      auto hits = internal::coneVisibility(s, c, cutoff, budget);
      for (const auto& h : hits) addEdge(2 + c, 2 + h.endCone, h.length);
    }
  } catch (const BudgetError&) {
    throw BudgetError("CutoffTooLarge: chart budget exhausted before certification");
  }
  if (stats) stats->chartsExpanded = budget.used;

  std::vector<double> dist(adj.size(), inf);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[0] = 0.0;
  pq.push({0.0, 0});
  while (!pq.empty()) {
    auto [d, v] = pq.top();
    pq.pop();
    if (d > dist[v]) continue;
    for (auto [w, len] : adj[v]) {
      double nd = d + len;
      if (nd < dist[w] && nd <= cutoff + s.tol.geom) {
        dist[w] = nd;
        pq.push({nd, w});
      }
    }
  }
  if (dist[1] <= cutoff + s.tol.geom) return dist[1];
  return std::nullopt;
}

}  // namespace flatflow
