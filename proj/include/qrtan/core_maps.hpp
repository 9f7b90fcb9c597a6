#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "qrtan/types.hpp"

namespace qrtan {

enum class Parity { Even, Odd };

[[nodiscard]] inline Parity flip(Parity p) { return p == Parity::Even ? Parity::Odd : Parity::Even; }

/// Representative of (x, y) in the square [-pi/4, pi/4]^2 of the reflection group
/// generated by the lines x = pi/2 (k + 1/2) and y = pi/2 (l + 1/2).
///
/// `tile_x`, `tile_y` index the half-open tiles [pi/2 k - pi/4, pi/2 k + pi/4)
/// that contained the input; the input is recovered by `unfold`. `parity` is
/// (|tile_x| + |tile_y|) mod 2, the number of reflections used.
struct FoldResult {
  Vec3 folded;
  Parity parity = Parity::Even;
  long long tile_x = 0;
  long long tile_y = 0;
};

/// Folds (x, y) into the beam; the z coordinate of the result is always 0.
[[nodiscard]] FoldResult fold_to_beam(double x, double y);

/// Folds v, keeping v.z untouched.
[[nodiscard]] FoldResult fold_to_beam(const Vec3& v);

/// Inverse of `fold_to_beam`: applies the recorded reflections to `folded`.
[[nodiscard]] Vec3 unfold(const FoldResult& f);

/// The bi-Lipschitz chart h of the closed square [-pi/2, pi/2]^2 onto the closed
/// upper unit hemisphere. Throws InputError outside the square.
[[nodiscard]] Vec3 h_map(double x, double y);

/// Inverse of `h_map` on the closed upper hemisphere. Throws InputError when u is
/// not a unit vector (tolerance 1e-9) or lies strictly below the equator.
[[nodiscard]] std::pair<double, double> h_inverse(const Vec3& u);

/// Zorich map: e^z h(x, y) on [-pi/2, pi/2]^2 x R, extended to R^3 by reflections
/// with period 2 pi in x and y. Throws OverflowError when e^z is not representable.
[[nodiscard]] Vec3 zorich(const Vec3& v);

/// Moebius map A(x, y, z) = (2rx, 2ry, 1 - 2r(z + 1)), r = 1 / (x^2 + y^2 + (z + 1)^2).
/// A(0, 0, -1) = infinity and A(infinity) = (0, 0, 1).
[[nodiscard]] ExtendedPoint mobius_A(const ExtendedPoint& p);

[[nodiscard]] ExtendedPoint mobius_A_inverse(const ExtendedPoint& p);

/// Inversion in the unit sphere, v / |v|^2. Throws InputError on the origin.
[[nodiscard]] Vec3 invert_sphere(const Vec3& v);

/// The explicit beam formula for T on [-pi/4, pi/4]^2 x R, evaluated in a form that
/// neither overflows nor loses the third component for large |z|. No lambda factor.
[[nodiscard]] Vec3 beam_formula(const Vec3& folded);

/// T_lambda(v) = lambda * T(v). Infinity exactly on the pole set.
[[nodiscard]] ExtendedPoint T_eval(const Vec3& v, const MapParams& params);

/// T_lambda through the composed definition lambda * A(Z(2v)). Loses accuracy and
/// overflows for large |z|; kept as a cross-check of `T_eval`.
[[nodiscard]] ExtendedPoint T_eval_composed(const Vec3& v, const MapParams& params);

struct Orbit {
  std::vector<ExtendedPoint> points;  // T(v), T^2(v), ...
  bool hit_pole = false;              // true when the last entry is infinity
};

/// Orbit of v of length at most n, truncated at the first pole hit.
[[nodiscard]] Orbit iterate(const Vec3& v, const MapParams& params, std::size_t n);

}  // namespace qrtan
