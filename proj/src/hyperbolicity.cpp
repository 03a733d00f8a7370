#include "flatflow/hyperbolicity.hpp"

#include <algorithm>
#include <cmath>

#include "flatflow/errors.hpp"

namespace flatflow {

double TurnEvent::excess() const { return std::max(0.0, std::abs(theta) - M_PI); }

namespace {

std::vector<TurnEvent> keepExcess(std::vector<TurnEvent> events, double tolAngle) {
  std::vector<TurnEvent> out;
  for (const auto& e : events) {
    if (std::abs(e.theta) > M_PI + tolAngle) out.push_back(e);
  }
  std::sort(out.begin(), out.end(), [](const TurnEvent& a, const TurnEvent& b) {
    return a.t < b.t;
  });
  return out;
}

}  // namespace

TurnTimeline TurnTimeline::window(double a, double b, std::vector<TurnEvent> events) {
  TurnTimeline tl;
  tl.periodic_ = false;
  tl.a_ = a;
  tl.b_ = b;
  tl.excess_ = keepExcess(std::move(events), tl.tolAngle_);
  return tl;
}

TurnTimeline TurnTimeline::periodic(double period, std::vector<TurnEvent> events) {
  TurnTimeline tl;
  tl.periodic_ = true;
  tl.period_ = period;
  for (auto& e : events) e.t = positiveMod(e.t, period);
  tl.excess_ = keepExcess(std::move(events), tl.tolAngle_);
  return tl;
}

TurnTimeline TurnTimeline::fromPath(const GeodesicPath& p) {
  std::vector<TurnEvent> events;
  for (const auto& e : p.events) events.push_back({e.t, e.theta});
  return window(p.t0, p.t1, std::move(events));
}

TurnTimeline TurnTimeline::fromClosedGeodesic(const ConcatGraph& g,
                                              const ClosedGeodesicRecord& rec) {
  (void)g;
  std::vector<TurnEvent> events;
  for (std::size_t i = 0; i < rec.word.size(); ++i) {
    events.push_back({rec.eventTimes[i], rec.jointThetas[i]});
  }
  return periodic(rec.period, std::move(events));
}

std::optional<TurnEvent> TurnTimeline::nextExcess(double t) const {
  const double eps = 1e-12;
  if (periodic_) {
    if (excess_.empty()) return std::nullopt;
    double tau = positiveMod(t, period_);
    for (const auto& e : excess_) {
      if (e.t >= tau - eps) return TurnEvent{t + (e.t - tau), e.theta};
    }
    return TurnEvent{t + (excess_.front().t + period_ - tau), excess_.front().theta};
  }
  for (const auto& e : excess_) {
    if (e.t >= t - eps) return e;
  }
  throw HorizonError("forward window ends before the next excess turn is certified");
}

std::optional<TurnEvent> TurnTimeline::prevExcess(double t) const {
  const double eps = 1e-12;
  if (periodic_) {
    if (excess_.empty()) return std::nullopt;
    double tau = positiveMod(t, period_);
    for (auto it = excess_.rbegin(); it != excess_.rend(); ++it) {
      if (it->t <= tau + eps) return TurnEvent{t - (tau - it->t), it->theta};
    }
    return TurnEvent{t - (tau + period_ - excess_.back().t), excess_.back().theta};
  }
  for (auto it = excess_.rbegin(); it != excess_.rend(); ++it) {
    if (it->t <= t + eps) return *it;
  }
  throw HorizonError("backward window ends before the last excess turn is certified");
}

double hyperbolicityForward(const TurnTimeline& tl, double t, const HyperbolicityConfig& cfg) {
  auto ev = tl.nextExcess(t);
  if (!ev) return 0.0;
  return ev->excess() / std::max(cfg.scale, ev->t - t);
}

double hyperbolicityBackward(const TurnTimeline& tl, double t, const HyperbolicityConfig& cfg) {
  auto ev = tl.prevExcess(t);
  if (!ev) return 0.0;
  return ev->excess() / std::max(cfg.scale, t - ev->t);
}

double hyperbolicity(const TurnTimeline& tl, double t, const HyperbolicityConfig& cfg) {
  auto prev = tl.prevExcess(t);
  if (prev && t - prev->t < cfg.scale) {
    return hyperbolicityBackward(tl, t, cfg);
  }
  auto next = tl.nextExcess(t);
  if (next && next->t - t < cfg.scale) {
    return hyperbolicityForward(tl, t, cfg);
  }
  double bwd = prev ? prev->excess() / std::max(cfg.scale, t - prev->t) : 0.0;
  double fwd = next ? next->excess() / std::max(cfg.scale, next->t - t) : 0.0;
  return std::min(bwd, fwd);
}

namespace {

// One analytic piece of the meter profile on [a, b].
struct ProfilePiece {
  double a = 0.0, b = 0.0;
  enum class Kind { Const, Backward, Forward } kind = Kind::Const;
  // Const: value. Backward: beta / (u - c) decreasing. Forward: beta / (c - u)
  // increasing.
  double value = 0.0;
  double beta = 0.0;
  double c = 0.0;

  double at(double u) const {
    switch (kind) {
      case Kind::Const: return value;
      case Kind::Backward: return beta / (u - c);
      case Kind::Forward: return beta / (c - u);
    }
    return 0.0;
  }

  double integral(double x, double y) const {
    switch (kind) {
      case Kind::Const: return value * (y - x);
      case Kind::Backward: return beta * std::log((y - c) / (x - c));
      case Kind::Forward: return beta * std::log((c - x) / (c - y));
    }
    return 0.0;
  }
};

// Pieces of the profile between two consecutive excess events.
void gapPieces(const TurnEvent& prev, const TurnEvent& next, double s,
               std::vector<ProfilePiece>& out) {
  double bp = prev.excess(), bn = next.excess();
  double A = prev.t + s, B = next.t - s;
  if (A >= B) {
    // Proximity zones cover the gap; the backward case takes precedence.
    double split = std::min(A, next.t);
    if (split > prev.t) out.push_back({prev.t, split, ProfilePiece::Kind::Const, bp / s, 0, 0});
    if (split < next.t) out.push_back({split, next.t, ProfilePiece::Kind::Const, bn / s, 0, 0});
    return;
  }
  out.push_back({prev.t, A, ProfilePiece::Kind::Const, bp / s, 0, 0});
  // Middle: min of the decreasing backward branch and the increasing forward
  // branch; they cross at ustar.
  double ustar = (bp * next.t + bn * prev.t) / (bp + bn);
  ustar = std::clamp(ustar, A, B);
  if (ustar > A) out.push_back({A, ustar, ProfilePiece::Kind::Forward, 0, bn, next.t});
  if (B > ustar) out.push_back({ustar, B, ProfilePiece::Kind::Backward, 0, bp, prev.t});
  out.push_back({B, next.t, ProfilePiece::Kind::Const, bn / s, 0, 0});
}

// Exact profile over [from, to]; throws HorizonError when the timeline cannot
// certify it. Empty when the meter vanishes identically.
std::vector<ProfilePiece> buildProfile(const TurnTimeline& tl, double from, double to,
                                       const HyperbolicityConfig& cfg) {
  std::vector<ProfilePiece> pieces;
  auto first = tl.prevExcess(from);
  if (!first) {
    // Certified event-free (periodic with no excess turns): meter is zero.
    return pieces;
  }
  TurnEvent cur = *first;
  std::size_t guard = 0;
  while (cur.t < to) {
    auto next = tl.nextExcess(cur.t + 1e-9);
    if (!next) break;
    std::vector<ProfilePiece> gap;
    gapPieces(cur, *next, cfg.scale, gap);
    for (auto& p : gap) {
      if (p.b <= from || p.a >= to) continue;
      p.a = std::max(p.a, from);
      p.b = std::min(p.b, to);
      if (p.b > p.a) pieces.push_back(p);
    }
    cur = *next;
    if (++guard > 1000000) throw Error(ErrorCode::Internal, "profile build runaway");
  }
  return pieces;
}

}  // namespace

double hyperbolicityIntegral(const TurnTimeline& tl, double from, double to,
                             const HyperbolicityConfig& cfg) {
  if (to <= from) return 0.0;
  double total = 0.0;
  for (const auto& p : buildProfile(tl, from, to, cfg)) total += p.integral(p.a, p.b);
  return total;
}

namespace {

// Minimum of F(rho) = integral_{t0}^{t0+rho} meter - eta*rho over [0, len],
// evaluated at piece boundaries plus interior critical points of convex
// stretches (where the meter crosses eta from below).
double minForwardAverageGap(const std::vector<ProfilePiece>& pieces, double t0, double len,
                            double eta) {
  double minVal = 0.0;  // F(0) = 0
  double acc = 0.0;
  for (const auto& p : pieces) {
    std::vector<double> cands{p.b};
    if (p.kind == ProfilePiece::Kind::Forward) {
      // F' = meter - eta increasing: interior minimum where meter == eta.
      double u = p.c - p.beta / eta;
      if (u > p.a && u < p.b) cands.push_back(u);
    }
    for (double u : cands) {
      double F = acc + p.integral(p.a, u) - eta * (u - t0);
      minVal = std::min(minVal, F);
    }
    acc += p.integral(p.a, p.b);
  }
  // Vanishing meter outside any pieces: F decreases at rate eta there.
  if (pieces.empty()) return -eta * len;
  double coveredEnd = pieces.back().b;
  if (coveredEnd < t0 + len - 1e-12) {
    minVal = std::min(minVal, acc - eta * len);
  }
  return minVal;
}

std::vector<ProfilePiece> reversedPieces(const std::vector<ProfilePiece>& pieces, double t0,
                                         double len) {
  // Mirror u -> t0 + len - u turns Backward pieces into Forward ones.
  std::vector<ProfilePiece> out;
  double T = 2.0 * t0 + len;  // mirror of u is T - u
  for (auto it = pieces.rbegin(); it != pieces.rend(); ++it) {
    ProfilePiece p;
    p.a = T - it->b;
    p.b = T - it->a;
    switch (it->kind) {
      case ProfilePiece::Kind::Const:
        p.kind = ProfilePiece::Kind::Const;
        p.value = it->value;
        break;
      case ProfilePiece::Kind::Backward:
        p.kind = ProfilePiece::Kind::Forward;
        p.beta = it->beta;
        p.c = T - it->c;
        break;
      case ProfilePiece::Kind::Forward:
        p.kind = ProfilePiece::Kind::Backward;
        p.beta = it->beta;
        p.c = T - it->c;
        break;
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace

bool isGoodSegment(const TurnTimeline& tl, double t0, double len,
                   const HyperbolicityConfig& cfg) {
  if (len < 0.0) throw InvalidArgumentError("segment length must be nonnegative");
  if (len == 0.0) return true;
  auto pieces = buildProfile(tl, t0, t0 + len, cfg);
  if (pieces.empty()) return false;  // meter vanishes, averages are zero
  const double tol = 1e-12;
  if (minForwardAverageGap(pieces, t0, len, cfg.threshold) < -tol) return false;
  auto rev = reversedPieces(pieces, t0, len);
  return minForwardAverageGap(rev, t0, len, cfg.threshold) >= -tol;
}

bool isBadSegment(const TurnTimeline& tl, double t0, double len,
                  const HyperbolicityConfig& cfg) {
  if (len <= 0.0) return false;
  return hyperbolicityIntegral(tl, t0, t0 + len, cfg) < cfg.threshold * len;
}

namespace {

// Largest rho in [0, len] with F(rho) < 0, where F(rho) = integral - eta*rho.
double lastNegative(const std::vector<ProfilePiece>& pieces, double t0, double len, double eta) {
  auto F = [&](double rho) {
    double acc = 0.0;
    double u = t0 + rho;
    for (const auto& p : pieces) {
      if (p.b <= u) {
        acc += p.integral(p.a, p.b);
      } else if (p.a < u) {
        acc += p.integral(p.a, u);
      }
    }
    return acc - eta * rho;
  };
  // Candidate rho values: piece boundaries and interior critical points.
  std::vector<double> cands{0.0, len};
  for (const auto& p : pieces) {
    cands.push_back(p.a - t0);
    cands.push_back(p.b - t0);
    if (p.kind == ProfilePiece::Kind::Forward) {
      double u = p.c - p.beta / eta;
      if (u > p.a && u < p.b) cands.push_back(u - t0);
    }
    if (p.kind == ProfilePiece::Kind::Backward) {
      double u = p.c + p.beta / eta;
      if (u > p.a && u < p.b) cands.push_back(u - t0);
    }
  }
  std::sort(cands.begin(), cands.end());
  cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
  while (!cands.empty() && cands.front() < 0.0) cands.erase(cands.begin());
  while (!cands.empty() && cands.back() > len + 1e-12) cands.pop_back();

  if (F(len) < 0.0) return len;
  double lastNeg = -1.0;
  for (double r : cands) {
    if (F(r) < 0.0) lastNeg = std::max(lastNeg, r);
  }
  if (lastNeg < 0.0) return 0.0;
  // Refine the crossing after lastNeg by bisection against the next
  // candidate with F >= 0.
  double hi = len;
  for (double r : cands) {
    if (r > lastNeg && F(r) >= 0.0) { hi = r; break; }
  }
  double lo = lastNeg;
  for (int it = 0; it < 100 && hi - lo > 1e-12; ++it) {
    double mid = 0.5 * (lo + hi);
    if (F(mid) < 0.0) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

OrbitDecomposition decompose(const TurnTimeline& tl, double t0, double len,
                             const HyperbolicityConfig& cfg) {
  if (len < 0.0) throw InvalidArgumentError("segment length must be nonnegative");
  OrbitDecomposition d;
  d.length = len;
  if (len == 0.0) return d;
  auto pieces = buildProfile(tl, t0, t0 + len, cfg);
  if (pieces.empty()) {
    d.prefixEnd = len;
    d.suffixStart = len;
    return d;
  }
  double p = lastNegative(pieces, t0, len, cfg.threshold);
  auto rev = reversedPieces(pieces, t0, len);
  double q = len - lastNegative(rev, t0, len, cfg.threshold);
  if (p >= q) {
    // Whole segment averages below threshold: empty good window.
    d.prefixEnd = len;
    d.suffixStart = len;
    return d;
  }
  d.prefixEnd = p;
  d.suffixStart = q;
  return d;
}

bool meetsThreshold(const TurnTimeline& tl, double t, const HyperbolicityConfig& cfg) {
  return hyperbolicity(tl, t, cfg) >= cfg.threshold;
}

std::string thresholdRegimeWarning(const Surface& s, const HyperbolicityConfig& cfg) {
  double bound = s.minExcess() / (2.0 * cfg.scale);
  if (cfg.threshold >= bound) {
    return "threshold " + std::to_string(cfg.threshold) +
           " is at or above minExcess/(2*scale) = " + std::to_string(bound) +
           "; the shadowing constructions assume a smaller threshold";
  }
  return "";
}

}  // namespace flatflow
