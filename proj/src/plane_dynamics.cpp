#include "qrtan/plane_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <random>
#include <string>

namespace qrtan {

namespace {

constexpr PoleIndex kReferencePole{0, 0};

// Quarter-octave radius grid below pi/4 used by the calibration scans.
constexpr int kRadiusGridSize = 64;
constexpr std::size_t kCalibrationSamples = 1000;
constexpr std::uint64_t kCalibrationSeed = 0x5eed'ca1bULL;

double radius_grid(int i) { return kQuarterPi * std::exp2(-0.25 * i); }

double rel_diff(const Matrix2& a, const Matrix2& b) {
  double num = 0.0;
  double den = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      num = std::max(num, std::fabs(a[i][j] - b[i][j]));
      den = std::max(den, std::fabs(b[i][j]));
    }
  }
  return den > 0.0 ? num / den : num;
}

Matrix2 central_difference(const PlanePoint& p, const MapParams& params, double h) {
  auto eval = [&](double dx, double dy) {
    const auto v = F_lambda_plane({p.x + dx, p.y + dy}, params);
    if (!v) {
      throw DomainError("jacobian_F: difference stencil touches a pole");
    }
    return *v;
  };
  const PlanePoint fxp = eval(h, 0.0);
  const PlanePoint fxm = eval(-h, 0.0);
  const PlanePoint fyp = eval(0.0, h);
  const PlanePoint fym = eval(0.0, -h);
  const double inv = 1.0 / (2.0 * h);
  return {{{(fxp.x - fxm.x) * inv, (fyp.x - fym.x) * inv},
           {(fxp.y - fxm.y) * inv, (fyp.y - fym.y) * inv}}};
}

Matrix2 combine(const Matrix2& fine, const Matrix2& coarse) {
  Matrix2 out{};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      out[i][j] = (4.0 * fine[i][j] - coarse[i][j]) / 3.0;
    }
  }
  return out;
}

std::mt19937_64 make_rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

PlanePoint pole_location(PoleIndex idx) {
  return {static_cast<double>(idx.n + idx.m) * kHalfPi, static_cast<double>(idx.n - idx.m + 1) * kHalfPi};
}

Diamond diamond_of(PoleIndex idx) { return Diamond{pole_location(idx)}; }

std::optional<PoleIndex> containing_diamond(const PlanePoint& p) {
  // In the rotated coordinates u = x + y, v = x - y the diamonds are the open
  // squares (n pi, (n + 1) pi) x ((m - 1) pi, m pi).
  const double u = (p.x + p.y) / kPi;
  const double v = (p.x - p.y) / kPi;
  const double fu = std::floor(u);
  const double fv = std::floor(v);
  if (fu == u || fv == v || !std::isfinite(u) || !std::isfinite(v)) {
    return std::nullopt;
  }
  const PoleIndex idx{static_cast<std::int64_t>(fv) + 1, static_cast<std::int64_t>(fu)};
  // Guard against the rotated test disagreeing with the defining inequality
  // by a rounding error right at the boundary.
  if (!diamond_of(idx).contains(p)) {
    return std::nullopt;
  }
  return idx;
}

ExtendedPoint F_lambda_eval(const PlanePoint& p, const MapParams& params) {
  return T_eval(p.lift(), params);
}

std::optional<PlanePoint> F_lambda_plane(const PlanePoint& p, const MapParams& params) {
  const ExtendedPoint w = F_lambda_eval(p, params);
  if (w.is_infinite()) {
    return std::nullopt;
  }
  return PlanePoint{w.finite().x, w.finite().y};
}

SingularValues singular_values(const Matrix2& a) {
  const double e = (a[0][0] + a[1][1]) / 2.0;
  const double f = (a[0][0] - a[1][1]) / 2.0;
  const double g = (a[1][0] + a[0][1]) / 2.0;
  const double h = (a[1][0] - a[0][1]) / 2.0;
  const double q = std::hypot(e, h);
  const double r = std::hypot(f, g);
  return {std::fabs(q - r), q + r};
}

std::optional<std::pair<double, double>> real_eigenvalues(const Matrix2& a) {
  const double half_trace = (a[0][0] + a[1][1]) / 2.0;
  const double half_diff = (a[0][0] - a[1][1]) / 2.0;
  const double disc = half_diff * half_diff + a[0][1] * a[1][0];
  if (disc < 0.0) {
    return std::nullopt;
  }
  const double s = std::sqrt(disc);
  return std::pair{half_trace - s, half_trace + s};
}

bool near_non_smooth_set(const PlanePoint& p, double margin) {
  const FoldResult f = fold_to_beam(p.x, p.y);
  const double ax = std::fabs(f.folded.x);
  const double ay = std::fabs(f.folded.y);
  if (kQuarterPi - ax < margin || kQuarterPi - ay < margin) {
    return true;
  }
  return std::fabs(ax - ay) / std::numbers::sqrt2 < margin;
}

std::pair<double, double> closed_form_eigenvalues(const PlanePoint& folded, Parity parity,
                                                  const MapParams& params) {
  const double x = folded.x;
  const double r = std::hypot(folded.x, folded.y);
  const double t = std::tan(x);
  double a = 0.0;
  double b = 0.0;
  if (parity == Parity::Even) {
    a = t / r;
    b = x * (1.0 + t * t) / r;
  } else {
    const double s = std::sin(x);
    a = 1.0 / (t * r);
    b = -x / (s * s * r);
  }
  a *= params.lambda;
  b *= params.lambda;
  return a <= b ? std::pair{a, b} : std::pair{b, a};
}

JacobianSample jacobian_F(const PlanePoint& p, const MapParams& params) {
  if (near_non_smooth_set(p)) {
    throw DomainError("jacobian_F: point lies within the margin of the non-smooth set");
  }
  constexpr double kFine = 1e-6;
  constexpr double kCoarse = 1e-4;
  constexpr double kAgreement = 1e-3;

  JacobianSample out;
  out.point = p;
  const Matrix2 fine = central_difference(p, params, kFine);
  const Matrix2 coarse = central_difference(p, params, kCoarse);
  out.matrix = fine;
  if (rel_diff(fine, coarse) > kAgreement) {
    const Matrix2 half = central_difference(p, params, kCoarse / 2.0);
    out.matrix = combine(half, coarse);
    out.used_richardson = true;
  }
  const SingularValues sv = singular_values(out.matrix);
  out.min_singular_value = sv.min;
  out.max_singular_value = sv.max;
  out.eigenvalues = real_eigenvalues(out.matrix);

  const FoldResult f = fold_to_beam(p.x, p.y);
  const double fx = f.folded.x;
  const double fy = f.folded.y;
  if (0.0 < fy && fy < fx && fx < kQuarterPi) {
    // Undo the reflections so the matrix is the derivative at the folded point.
    const double sx = (f.tile_x % 2 != 0) ? -1.0 : 1.0;
    const double sy = (f.tile_y % 2 != 0) ? -1.0 : 1.0;
    Matrix2 local = out.matrix;
    local[0][0] *= sx;
    local[1][0] *= sx;
    local[0][1] *= sy;
    local[1][1] *= sy;
    const auto eig = real_eigenvalues(local);
    const auto expected = closed_form_eigenvalues({fx, fy}, f.parity, params);
    if (eig) {
      out.closed_form_rel_error = std::max(std::fabs(eig->first - expected.first) / std::fabs(expected.first),
                                           std::fabs(eig->second - expected.second) / std::fabs(expected.second));
    } else {
      out.closed_form_rel_error = std::numeric_limits<double>::infinity();
    }
  }
  return out;
}

bool in_branch_domain(const PlanePoint& w, const MapParams& params) {
  const double ax = std::fabs(w.x);
  return !(ax == std::fabs(w.y) && ax <= params.lambda / std::numbers::sqrt2);
}

PlanePoint inverse_branch(PoleIndex q, const ExtendedPoint& w, const MapParams& params) {
  if (w.is_infinite()) {
    return pole_location(q);
  }
  const Vec3& v = w.finite();
  if (v.z != 0.0) {
    throw InputError("inverse_branch: target is not in the plane z = 0");
  }
  return inverse_branch(q, PlanePoint{v.x, v.y}, params);
}

PlanePoint inverse_branch(PoleIndex q, const PlanePoint& w, const MapParams& params) {
  if (!std::isfinite(w.x) || !std::isfinite(w.y)) {
    throw InputError("inverse_branch: non-finite target");
  }
  if (!in_branch_domain(w, params)) {
    throw DomainError("inverse_branch: target lies on an excluded diagonal segment");
  }
  // Undo A, then the chart h, then the doubling in T(v) = A(Z(2v)).
  const ExtendedPoint a = mobius_A_inverse(Vec3{w.x / params.lambda, w.y / params.lambda, 0.0});
  const Vec3 u = a.finite();
  const bool lower = u.z < 0.0;
  const bool equator = u.z == 0.0;
  const auto [hx, hy] = h_inverse(Vec3{u.x, u.y, std::fabs(u.z)});
  const double bx = hx / 2.0;
  const double by = hy / 2.0;

  const PlanePoint center = pole_location(q);
  const std::int64_t tx = q.n + q.m;
  const std::int64_t ty = q.n - q.m + 1;
  const ExtendedPoint target = w.lift();

  std::optional<PlanePoint> best;
  double best_l1 = std::numeric_limits<double>::infinity();
  for (std::int64_t kx = tx - 2; kx <= tx + 2; ++kx) {
    for (std::int64_t ky = ty - 2; ky <= ty + 2; ++ky) {
      const bool odd = ((kx + ky) % 2) != 0;
      if (!equator && odd != lower) {
        continue;
      }
      FoldResult f;
      f.folded = {bx, by, 0.0};
      f.tile_x = kx;
      f.tile_y = ky;
      const Vec3 c = unfold(f);
      const PlanePoint cand{c.x, c.y};
      const double l1 = std::fabs(cand.x - center.x) + std::fabs(cand.y - center.y);
      if (l1 > kHalfPi + 1e-12 || l1 >= best_l1) {
        continue;
      }
      if (chordal_distance(F_lambda_eval(cand, params), target) < 1e-9) {
        best = cand;
        best_l1 = l1;
      }
    }
  }
  if (!best) {
    throw InternalError("inverse_branch: no candidate in W(q) reproduces the target");
  }
  return *best;
}

double branch_contraction(PoleIndex q, PoleIndex p, std::span<const PointPair> pairs, const MapParams& params) {
  const Diamond wp = diamond_of(p);
  double worst = 0.0;
  for (const auto& [a, b] : pairs) {
    if (!wp.contains(a) || !wp.contains(b)) {
      throw InputError("branch_contraction: pair not inside W(p)");
    }
    const double d = (a - b).norm();
    if (d == 0.0) {
      continue;
    }
    const double image = (inverse_branch(q, a, params) - inverse_branch(q, b, params)).norm();
    worst = std::max(worst, image / d);
  }
  return worst;
}

double pole_neighborhood_expansion(PoleIndex p, double eps, std::span<const PointPair> pairs,
                                   const MapParams& params) {
  const PlanePoint pole = pole_location(p);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [a, b] : pairs) {
    if ((a - pole).norm() >= eps || (b - pole).norm() >= eps) {
      throw InputError("pole_neighborhood_expansion: pair not inside B(pole, eps)");
    }
    const double d = (a - b).norm();
    if (d == 0.0) {
      continue;
    }
    const auto fa = F_lambda_plane(a, params);
    const auto fb = F_lambda_plane(b, params);
    if (!fa || !fb) {
      continue;
    }
    best = std::min(best, (*fa - *fb).norm() / d);
  }
  return best;
}

std::vector<PlanePoint> sample_disk(const PlanePoint& center, double radius, std::size_t count, std::uint64_t seed,
                                    bool avoid_non_smooth) {
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<PlanePoint> out;
  out.reserve(count);
  while (out.size() < count) {
    const double r = radius * std::sqrt(unit(rng));
    const double t = 2.0 * kPi * unit(rng);
    const PlanePoint p{center.x + r * std::cos(t), center.y + r * std::sin(t)};
    if ((p - center).norm() >= radius || p == center) {
      continue;
    }
    if (avoid_non_smooth && near_non_smooth_set(p)) {
      continue;
    }
    out.push_back(p);
  }
  return out;
}

std::vector<PlanePoint> sample_diamond(PoleIndex p, std::size_t count, std::uint64_t seed) {
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  const PlanePoint c = pole_location(p);
  const Diamond d{c};
  std::vector<PlanePoint> out;
  out.reserve(count);
  while (out.size() < count) {
    const double a = sym(rng);
    const double b = sym(rng);
    const PlanePoint pt{c.x + (a + b) * kQuarterPi, c.y + (a - b) * kQuarterPi};
    if (d.contains(pt)) {
      out.push_back(pt);
    }
  }
  return out;
}

double branch_capture_radius(const MapParams& params, double target) {
  if (!(target > 0.0)) {
    throw InputError("branch_capture_radius: target radius must be positive");
  }
  const PlanePoint pole = pole_location(kReferencePole);
  for (int k = 1; k < 400; ++k) {
    const double rho = params.lambda * std::exp2(0.25 * k);
    double worst = 0.0;
    for (std::size_t i = 0; i < kCalibrationSamples; ++i) {
      const double t = 2.0 * kPi * (static_cast<double>(i) + 0.5) / static_cast<double>(kCalibrationSamples);
      const PlanePoint w{rho * std::cos(t), rho * std::sin(t)};
      worst = std::max(worst, (inverse_branch(kReferencePole, w, params) - pole).norm());
    }
    if (worst < target) {
      return rho;
    }
  }
  throw InternalError("branch_capture_radius: no radius on the grid is large enough");
}

ExpansionCalibration calibrate_expansion_radius(const MapParams& params) {
  static std::mutex mutex;
  static std::map<double, ExpansionCalibration> cache;
  {
    const std::lock_guard lock(mutex);
    if (const auto it = cache.find(params.lambda); it != cache.end()) {
      return it->second;
    }
  }

  const PlanePoint pole = pole_location(kReferencePole);
  ExpansionCalibration cal;

  for (int i = 0; i < kRadiusGridSize && cal.delta == 0.0; ++i) {
    const double r = radius_grid(i);
    const auto pts = sample_disk(pole, r, kCalibrationSamples, kCalibrationSeed + static_cast<std::uint64_t>(i), true);
    const bool ok = std::all_of(pts.begin(), pts.end(), [&](const PlanePoint& p) {
      return jacobian_F(p, params).min_singular_value >= 2.0;
    });
    if (ok) {
      cal.delta = r;
    }
  }
  if (cal.delta == 0.0) {
    throw InternalError("calibrate_expansion_radius: no radius gives expansion factor 2");
  }

  cal.r1 = branch_capture_radius(params, cal.delta);

  for (int i = 1; i < kRadiusGridSize && cal.eps == 0.0; ++i) {
    const double r = radius_grid(i);
    auto pts = sample_disk(pole, r, kCalibrationSamples, kCalibrationSeed ^ static_cast<std::uint64_t>(i), false);
    for (std::size_t j = 0; j < kCalibrationSamples; ++j) {
      const double t = 2.0 * kPi * (static_cast<double>(j) + 0.5) / static_cast<double>(kCalibrationSamples);
      pts.push_back({pole.x + r * std::cos(t), pole.y + r * std::sin(t)});
    }
    const bool ok = std::all_of(pts.begin(), pts.end(), [&](const PlanePoint& p) {
      const auto img = F_lambda_plane(p, params);
      return !img || img->norm() > 2.0 * cal.r1;
    });
    if (ok) {
      cal.eps = r;
    }
  }
  if (cal.eps == 0.0) {
    throw InternalError("calibrate_expansion_radius: no radius maps beyond 2 R1");
  }

  const std::lock_guard lock(mutex);
  cache.emplace(params.lambda, cal);
  return cal;
}

double calibrated_far_radius(const MapParams& params) {
  static std::mutex mutex;
  static std::map<double, double> cache;
  {
    const std::lock_guard lock(mutex);
    if (const auto it = cache.find(params.lambda); it != cache.end()) {
      return it->second;
    }
  }
  const ExpansionCalibration cal = calibrate_expansion_radius(params);
  const double radius = branch_capture_radius(params, cal.eps) + kHalfPi;
  const std::lock_guard lock(mutex);
  cache.emplace(params.lambda, radius);
  return radius;
}

}  // namespace qrtan
