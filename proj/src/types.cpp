#include "qrtan/types.hpp"

#include <array>
#include <sstream>

namespace qrtan {

namespace {

// Image under inverse stereographic projection onto the unit sphere of R^4.
std::array<double, 4> to_sphere(const ExtendedPoint& p) {
  if (p.is_infinite()) {
    return {0.0, 0.0, 0.0, 1.0};
  }
  const Vec3& v = p.finite();
  const double n = v.norm();
  if (n <= 1.0) {
    const double d = 1.0 + n * n;
    return {2.0 * v.x / d, 2.0 * v.y / d, 2.0 * v.z / d, (n * n - 1.0) / d};
  }
  // Written in terms of s = 1/n so large norms neither overflow nor cancel.
  const double s = 1.0 / n;
  const double d = 1.0 + s * s;
  const double k = 2.0 * s * s / d;
  return {v.x * k, v.y * k, v.z * k, (1.0 - s * s) / d};
}

}  // namespace

double chordal_distance(const ExtendedPoint& p, const ExtendedPoint& q) {
  if (p.is_infinite() && q.is_infinite()) {
    return 0.0;
  }
  constexpr double kDirectLimit = 1e100;
  if (p.is_finite() && q.is_finite()) {
    const Vec3& a = p.finite();
    const Vec3& b = q.finite();
    const double na = a.norm();
    const double nb = b.norm();
    if (na < kDirectLimit && nb < kDirectLimit) {
      return 2.0 * (a - b).norm() / std::sqrt((1.0 + na * na) * (1.0 + nb * nb));
    }
  } else {
    const Vec3& a = p.is_finite() ? p.finite() : q.finite();
    const double na = a.norm();
    if (na < kDirectLimit) {
      return 2.0 / std::sqrt(1.0 + na * na);
    }
  }
  const auto sp = to_sphere(p);
  const auto sq = to_sphere(q);
  double acc = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    const double d = sp[i] - sq[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

std::string to_string(const ExtendedPoint& p) {
  if (p.is_infinite()) {
    return "inf";
  }
  std::ostringstream os;
  os.precision(17);
  const Vec3& v = p.finite();
  os << '(' << v.x << ", " << v.y << ", " << v.z << ')';
  return os.str();
}

}  // namespace qrtan
