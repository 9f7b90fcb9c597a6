#include "qrtan/core_maps.hpp"

#include <algorithm>
#include <cmath>

namespace qrtan {

namespace {

struct Fold1 {
  double value;
  long long tile;
};

// Reflection group of the lines c = (2k + 1) * half_width, acting on one
// coordinate. Tiles are half-open, [(2k - 1) hw, (2k + 1) hw).
Fold1 fold_coordinate(double c, double half_width) {
  const double period = 2.0 * half_width;
  const double k = std::floor((c + half_width) / period);
  double t = c - k * period;
  t = std::clamp(t, -half_width, half_width);
  const auto tile = static_cast<long long>(k);
  const bool odd = (tile % 2) != 0;
  return {odd ? -t : t, tile};
}

double unfold_coordinate(double folded, long long tile, double half_width) {
  const double t = (tile % 2 != 0) ? -folded : folded;
  return static_cast<double>(tile) * 2.0 * half_width + t;
}

Parity parity_of(long long a, long long b) {
  return ((a + b) % 2 != 0) ? Parity::Odd : Parity::Even;
}

// (x, y) -> (x, y) * s / max(|x|, |y|) with the common scale removed first.
Vec3 scaled(const Vec3& v, double factor) { return {v.x * factor, v.y * factor, v.z * factor}; }

}  // namespace

FoldResult fold_to_beam(double x, double y) { return fold_to_beam(Vec3{x, y, 0.0}); }

FoldResult fold_to_beam(const Vec3& v) {
  const Fold1 fx = fold_coordinate(v.x, kQuarterPi);
  const Fold1 fy = fold_coordinate(v.y, kQuarterPi);
  return {Vec3{fx.value, fy.value, v.z}, parity_of(fx.tile, fy.tile), fx.tile, fy.tile};
}

Vec3 unfold(const FoldResult& f) {
  return {unfold_coordinate(f.folded.x, f.tile_x, kQuarterPi),
          unfold_coordinate(f.folded.y, f.tile_y, kQuarterPi), f.folded.z};
}

Vec3 h_map(double x, double y) {
  constexpr double kSlack = 1e-12;
  if (!(std::fabs(x) <= kHalfPi + kSlack) || !(std::fabs(y) <= kHalfPi + kSlack)) {
    throw InputError("h_map: argument outside [-pi/2, pi/2]^2");
  }
  const double m = max_abs(x, y);
  if (m == 0.0) {
    return {0.0, 0.0, 1.0};
  }
  const double r = std::hypot(x, y);
  const double k = std::sin(m) / r;
  return {x * k, y * k, std::cos(m)};
}

std::pair<double, double> h_inverse(const Vec3& u) {
  constexpr double kTol = 1e-9;
  if (!(std::fabs(u.norm() - 1.0) <= kTol)) {
    throw InputError("h_inverse: argument is not a unit vector");
  }
  if (u.z < -kTol) {
    throw InputError("h_inverse: argument lies below the equator");
  }
  const double s = max_abs(u.x, u.y);
  if (s == 0.0) {
    return {0.0, 0.0};
  }
  // Same angle as arccos(u.z), without the loss of accuracy near the pole.
  const double m = std::atan2(std::hypot(u.x, u.y), std::max(u.z, 0.0));
  return {u.x * m / s, u.y * m / s};
}

Vec3 zorich(const Vec3& v) {
  const double e = std::exp(v.z);
  if (!std::isfinite(e) || e == 0.0) {
    throw OverflowError("zorich: e^z is not representable in double precision");
  }
  const Fold1 fx = fold_coordinate(v.x, kHalfPi);
  const Fold1 fy = fold_coordinate(v.y, kHalfPi);
  Vec3 w = h_map(fx.value, fy.value) * e;
  if (parity_of(fx.tile, fy.tile) == Parity::Odd) {
    w.z = -w.z;
  }
  return w;
}

ExtendedPoint mobius_A(const ExtendedPoint& p) {
  if (p.is_infinite()) {
    return Vec3{0.0, 0.0, 1.0};
  }
  const Vec3& v = p.finite();
  const Vec3 w{v.x, v.y, v.z + 1.0};
  const double s = std::max({std::fabs(w.x), std::fabs(w.y), std::fabs(w.z)});
  if (s == 0.0) {
    return ExtendedPoint::infinity();
  }
  const Vec3 u = scaled(w, 1.0 / s);
  const double k = 2.0 / (s * u.norm_sq());
  return Vec3{u.x * k, u.y * k, 1.0 - u.z * k};
}

ExtendedPoint mobius_A_inverse(const ExtendedPoint& p) {
  if (p.is_infinite()) {
    return Vec3{0.0, 0.0, -1.0};
  }
  const Vec3& q = p.finite();
  const Vec3 w{q.x, q.y, q.z - 1.0};
  const double s = std::max({std::fabs(w.x), std::fabs(w.y), std::fabs(w.z)});
  if (s == 0.0) {
    return ExtendedPoint::infinity();
  }
  const Vec3 u = scaled(w, 1.0 / s);
  const double k = 2.0 / (s * u.norm_sq());
  return Vec3{u.x * k, u.y * k, -u.z * k - 1.0};
}

Vec3 invert_sphere(const Vec3& v) {
  const double s = std::max({std::fabs(v.x), std::fabs(v.y), std::fabs(v.z)});
  if (s == 0.0) {
    throw InputError("invert_sphere: the origin has no image");
  }
  const Vec3 u = scaled(v, 1.0 / s);
  return scaled(u, 1.0 / (s * u.norm_sq()));
}

Vec3 beam_formula(const Vec3& folded) {
  const double m = max_abs(folded.x, folded.y);
  const double r = std::hypot(folded.x, folded.y);
  const double c = std::cos(m);
  const double sech = 1.0 / std::cosh(folded.z);
  const double sech2 = sech * sech;
  const double th = std::tanh(folded.z);
  // Numerator and denominator of the closed form both divided by cosh^2 z.
  const double denom = c * c * sech2 + th * th;
  const double horizontal = (r > 0.0) ? (std::sin(m) / r) * c * sech2 / denom : 0.0;
  return {folded.x * horizontal, folded.y * horizontal, th / denom};
}

ExtendedPoint T_eval(const Vec3& v, const MapParams& params) {
  const FoldResult f = fold_to_beam(v);
  const Vec3& b = f.folded;
  if (b.x == 0.0 && b.y == 0.0 && b.z == 0.0) {
    if (f.parity == Parity::Odd) {
      return ExtendedPoint::infinity();
    }
    return Vec3{0.0, 0.0, 0.0};
  }
  Vec3 image = beam_formula(b);
  if (f.parity == Parity::Odd) {
    image = invert_sphere(image);
  }
  return image * params.lambda;
}

ExtendedPoint T_eval_composed(const Vec3& v, const MapParams& params) {
  const ExtendedPoint a = mobius_A(zorich(v * 2.0));
  if (a.is_infinite()) {
    return a;
  }
  return a.finite() * params.lambda;
}

Orbit iterate(const Vec3& v, const MapParams& params, std::size_t n) {
  if (n == 0) {
    throw InputError("iterate: n must be at least 1");
  }
  Orbit orbit;
  orbit.points.reserve(n);
  Vec3 current = v;
  for (std::size_t i = 0; i < n; ++i) {
    const ExtendedPoint next = T_eval(current, params);
    orbit.points.push_back(next);
    if (next.is_infinite()) {
      orbit.hit_pole = true;
      break;
    }
    current = next.finite();
  }
  return orbit;
}

}  // namespace qrtan
