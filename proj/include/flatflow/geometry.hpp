#pragma once

#include <cmath>
#include <limits>

#ifndef M_PI
#define M_PI 3.14159265358979323846
#endif

namespace flatflow {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double k) const { return {x * k, y * k}; }
  Vec2 operator-() const { return {-x, -y}; }
  Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& a) { return std::sqrt(a.x * a.x + a.y * a.y); }
inline double dist(const Vec2& a, const Vec2& b) { return norm(a - b); }

inline Vec2 normalize(const Vec2& v) {
  double n = norm(v);
  return n > 0.0 ? Vec2{v.x / n, v.y / n} : Vec2{1.0, 0.0};
}

inline double angleOf(const Vec2& v) { return std::atan2(v.y, v.x); }

// CCW angle from a to b, in [0, 2*pi).
inline double ccwAngle(const Vec2& a, const Vec2& b) {
  double ang = std::atan2(cross(a, b), dot(a, b));
  if (ang < 0.0) ang += 2.0 * M_PI;
  return ang;
}

inline Vec2 dirOf(double angle) { return {std::cos(angle), std::sin(angle)}; }

// x mod m, result in [0, m).
inline double positiveMod(double x, double m) {
  double r = std::fmod(x, m);
  if (r < 0.0) r += m;
  return r;
}

// Orientation-preserving planar isometry p -> R*p + t with R a rotation.
struct Isometry {
  double c = 1.0;  // cos of rotation
  double s = 0.0;  // sin of rotation
  double tx = 0.0;
  double ty = 0.0;

  static Isometry identity() { return {}; }

  static Isometry rotationTranslation(double cosA, double sinA, const Vec2& t) {
    return {cosA, sinA, t.x, t.y};
  }

  Vec2 apply(const Vec2& p) const {
    return {c * p.x - s * p.y + tx, s * p.x + c * p.y + ty};
  }

  Vec2 applyVector(const Vec2& v) const {
    return {c * v.x - s * v.y, s * v.x + c * v.y};
  }

  // this o other (apply other first).
  Isometry compose(const Isometry& o) const {
    Isometry r;
    r.c = c * o.c - s * o.s;
    r.s = s * o.c + c * o.s;
    double n = std::sqrt(r.c * r.c + r.s * r.s);
    if (n > 0.0) { r.c /= n; r.s /= n; }  // keep the rotation on the unit circle
    Vec2 t = apply({o.tx, o.ty});
    r.tx = t.x;
    r.ty = t.y;
    return r;
  }

  Isometry inverse() const {
    Isometry r;
    r.c = c;
    r.s = -s;
    Vec2 t = r.applyVector({-tx, -ty});
    r.tx = t.x;
    r.ty = t.y;
    return r;
  }

  double rotationAngle() const { return std::atan2(s, c); }

  bool approxEquals(const Isometry& o, double tol) const {
    return std::abs(c - o.c) <= tol && std::abs(s - o.s) <= tol &&
           std::abs(tx - o.tx) <= tol && std::abs(ty - o.ty) <= tol;
  }
};

// Isometry mapping the directed edge (fromA -> fromB) onto (toA -> toB).
// Edges must have equal length for this to be a rigid motion.
inline Isometry edgeToEdge(const Vec2& fromA, const Vec2& fromB,
                           const Vec2& toA, const Vec2& toB) {
  Vec2 u = fromB - fromA;
  Vec2 v = toB - toA;
  double lu = norm(u), lv = norm(v);
  u = {u.x / lu, u.y / lu};
  v = {v.x / lv, v.y / lv};
  double cosA = dot(u, v);
  double sinA = cross(u, v);
  Isometry r;
  r.c = cosA;
  r.s = sinA;
  Vec2 rFromA = r.applyVector(fromA);
  r.tx = toA.x - rFromA.x;
  r.ty = toA.y - rFromA.y;
  return r;
}

}  // namespace flatflow
