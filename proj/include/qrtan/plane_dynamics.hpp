#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "qrtan/core_maps.hpp"
#include "qrtan/types.hpp"

namespace qrtan {

/// Integer label (m, n) of the pole ((n + m) pi/2, (n - m + 1) pi/2).
struct PoleIndex {
  std::int64_t m = 0;
  std::int64_t n = 0;
  constexpr bool operator==(const PoleIndex&) const = default;
};

/// Open L1 ball of radius pi/2 around a pole: the points nearer to that pole
/// than to any other.
struct Diamond {
  PlanePoint center;
  static constexpr double kRadius = kHalfPi;

  [[nodiscard]] double l1_distance(const PlanePoint& p) const {
    return std::fabs(p.x - center.x) + std::fabs(p.y - center.y);
  }
  [[nodiscard]] bool contains(const PlanePoint& p) const { return l1_distance(p) < kRadius; }
};

[[nodiscard]] PlanePoint pole_location(PoleIndex idx);
[[nodiscard]] Diamond diamond_of(PoleIndex idx);

/// Index of the open diamond containing p, or nothing when p lies on the
/// boundary lattice {(x, +-x + k pi)}.
[[nodiscard]] std::optional<PoleIndex> containing_diamond(const PlanePoint& p);

/// Planar restriction F_lambda(x, y) = T_lambda(x, y, 0). The result has third
/// coordinate 0 or is infinity.
[[nodiscard]] ExtendedPoint F_lambda_eval(const PlanePoint& p, const MapParams& params);

/// Same, with the third coordinate dropped; nullopt at a pole.
[[nodiscard]] std::optional<PlanePoint> F_lambda_plane(const PlanePoint& p, const MapParams& params);

using Matrix2 = std::array<std::array<double, 2>, 2>;

struct SingularValues {
  double min = 0.0;
  double max = 0.0;
};

[[nodiscard]] SingularValues singular_values(const Matrix2& a);

/// Real eigenvalues in ascending order, or nothing when the pair is complex.
[[nodiscard]] std::optional<std::pair<double, double>> real_eigenvalues(const Matrix2& a);

struct JacobianSample {
  PlanePoint point;
  Matrix2 matrix{};
  double min_singular_value = 0.0;
  double max_singular_value = 0.0;
  std::optional<std::pair<double, double>> eigenvalues;
  bool used_richardson = false;
  /// Set when the point folds into the open sector 0 < y < x < pi/4: the largest
  /// relative deviation between the eigenvalues of the reflected difference
  /// matrix and the closed forms.
  std::optional<double> closed_form_rel_error;
};

/// Distance below which a point counts as lying on the non-smooth set (fold
/// lines and folded diagonals).
inline constexpr double kSmoothMargin = 1e-6;

/// True when p folds to within `margin` of a fold line or of a diagonal |x| = |y|.
[[nodiscard]] bool near_non_smooth_set(const PlanePoint& p, double margin = kSmoothMargin);

/// Closed-form eigenvalues of DF_lambda at a folded point 0 < y < x < pi/4:
/// lambda * (tan x / r, x sec^2 x / r) for even parity, lambda * (cot x / r,
/// -x csc^2 x / r) for odd parity. Returned ascending.
[[nodiscard]] std::pair<double, double> closed_form_eigenvalues(const PlanePoint& folded, Parity parity,
                                                               const MapParams& params);

/// Central-difference Jacobian of F_lambda (step 1e-6, Richardson fallback at
/// 1e-4). Throws DomainError when p is on or near the non-smooth set or at a pole.
[[nodiscard]] JacobianSample jacobian_F(const PlanePoint& p, const MapParams& params);

/// Branch of the inverse of F_lambda with values in W(q). Defined on the plane
/// with infinity minus the segments {(x, +-x) : |x| <= lambda / sqrt 2}; throws
/// DomainError there. S_q(infinity) is the pole q itself.
[[nodiscard]] PlanePoint inverse_branch(PoleIndex q, const ExtendedPoint& w, const MapParams& params);
[[nodiscard]] PlanePoint inverse_branch(PoleIndex q, const PlanePoint& w, const MapParams& params);

/// True when w lies in the domain of every inverse branch.
[[nodiscard]] bool in_branch_domain(const PlanePoint& w, const MapParams& params);

using PointPair = std::pair<PlanePoint, PlanePoint>;

/// max |S_q(w1) - S_q(w2)| / |w1 - w2| over pairs in W(p); coincident pairs are skipped.
[[nodiscard]] double branch_contraction(PoleIndex q, PoleIndex p, std::span<const PointPair> pairs,
                                        const MapParams& params);

/// min |F(a) - F(b)| / |a - b| over pairs in B(pole(p), eps). A pair with one end
/// on the pole counts as infinitely expanded.
[[nodiscard]] double pole_neighborhood_expansion(PoleIndex p, double eps, std::span<const PointPair> pairs,
                                                 const MapParams& params);

struct ExpansionCalibration {
  double delta = 0.0;  // min singular value of DF >= 2 sampled on B(pole, delta)
  double eps = 0.0;    // |F| > 2 R1 sampled on B(pole, eps)
  double r1 = 0.0;     // S_pole maps the circle |y| = R1 into B(pole, delta)
};

/// Deterministic sampled calibration of the constants behind the local expansion
/// near poles. Results are cached per lambda; safe to call concurrently.
[[nodiscard]] ExpansionCalibration calibrate_expansion_radius(const MapParams& params);

/// Smallest radius rho > lambda (on a quarter-octave grid) such that S_q maps the
/// circle |w| = rho into B(q, target) for the reference pole. Larger |w| map closer.
[[nodiscard]] double branch_capture_radius(const MapParams& params, double target);

/// Pole norm beyond which S_q(closure W(p)) lies in B(q, eps) for every q and the
/// closed diamond avoids the excluded segments; eps from the calibration.
[[nodiscard]] double calibrated_far_radius(const MapParams& params);

/// Uniform random points of the open disk B(center, radius), rejecting points
/// near the non-smooth set. Deterministic for a given seed.
[[nodiscard]] std::vector<PlanePoint> sample_disk(const PlanePoint& center, double radius, std::size_t count,
                                                  std::uint64_t seed, bool avoid_non_smooth);

/// Uniform random points of the open diamond W(p).
[[nodiscard]] std::vector<PlanePoint> sample_diamond(PoleIndex p, std::size_t count, std::uint64_t seed);

}  // namespace qrtan
