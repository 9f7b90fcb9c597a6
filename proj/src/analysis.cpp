#include "qrtan/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace qrtan {

namespace {

// Bisection on a bracket where f(lo) has sign `lo_sign` (the endpoint itself may
// be a root), followed by a few guarded Newton steps.
template <typename F, typename DF>
double bracketed_root(F f, DF df, double lo, double hi, bool lo_positive) {
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) {
      break;
    }
    const double fm = f(mid);
    if ((fm > 0.0) == lo_positive && fm != 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double x = 0.5 * (lo + hi);
  for (int i = 0; i < 4; ++i) {
    const double d = df(x);
    if (d == 0.0 || !std::isfinite(d)) {
      break;
    }
    const double next = x - f(x) / d;
    if (!(next > lo - (hi - lo)) || !(next < hi + (hi - lo)) || !std::isfinite(next)) {
      break;
    }
    if (std::fabs(f(next)) > std::fabs(f(x))) {
      break;
    }
    x = next;
  }
  return x;
}

std::mt19937_64 make_rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x9e37u};
  return std::mt19937_64(seq);
}

bool sector_member(double along, double across, double lambda) {
  // Point (along, alpha * along) of the sector family with |alpha| <= 1.
  if (along == 0.0) {
    return false;
  }
  const double alpha = across / along;
  if (!(std::fabs(alpha) <= 1.0)) {
    return false;
  }
  if (!(alpha * alpha > lambda * lambda - 1.0)) {
    return false;
  }
  return std::fabs(along) < petal_bound(alpha, lambda);
}

}  // namespace

double solve_xi0(double lambda) {
  if (!(lambda > 1.0) || !std::isfinite(lambda)) {
    throw DomainError("solve_xi0: lambda must exceed 1");
  }
  auto g = [lambda](double xi) { return lambda * std::tanh(xi) - xi; };
  auto dg = [lambda](double xi) {
    const double s = 1.0 / std::cosh(xi);
    return lambda * s * s - 1.0;
  };
  // g > 0 on (0, xi0) and g < 0 beyond; g(lambda) <= 0.
  return bracketed_root(g, dg, 0.0, lambda, true);
}

double solve_phi(double mu) {
  if (!(mu > 0.0 && mu < 1.0)) {
    throw DomainError("solve_phi: mu must lie in (0, 1)");
  }
  auto g = [mu](double x) { return mu * std::tan(x) - x; };
  auto dg = [mu](double x) {
    const double c = std::cos(x);
    return mu / (c * c) - 1.0;
  };
  // g < 0 on (0, phi) and g > 0 on (phi, pi/2); mu tan(hi) = pi/2 > hi.
  const double hi = std::atan(kHalfPi / mu);
  return bracketed_root(g, dg, 0.0, hi, false);
}

double rho(const Vec3& v) {
  if (!(v.z > 0.0)) {
    throw DomainError("rho: defined only for z > 0");
  }
  return max_abs(v.x, v.y) / v.z;
}

double petal_bound(double alpha, double lambda) {
  const double mu = lambda / std::sqrt(1.0 + alpha * alpha);
  return std::min(kQuarterPi, solve_phi(mu));
}

bool q_contains(const PlanePoint& p, double lambda) {
  if (!(lambda > 0.0 && lambda < std::numbers::sqrt2)) {
    throw DomainError("q_contains: lambda must lie in (0, sqrt 2)");
  }
  if (p.x == 0.0 && p.y == 0.0) {
    return true;
  }
  return sector_member(p.x, p.y, lambda) || sector_member(p.y, p.x, lambda);
}

std::string_view to_string(Fate f) {
  switch (f) {
    case Fate::ToUpperFixed:
      return "ToUpperFixed";
    case Fate::ToLowerFixed:
      return "ToLowerFixed";
    case Fate::ToOrigin:
      return "ToOrigin";
    case Fate::Escaping:
      return "Escaping";
    case Fate::PoleHit:
      return "PoleHit";
    case Fate::Undecided:
      return "Undecided";
  }
  return "Undecided";
}

FateRecord classify_orbit(const Vec3& v, const MapParams& params, const ClassifyOptions& opts) {
  if (!v.is_finite()) {
    throw InputError("classify_orbit: start point must be finite");
  }
  if (opts.max_iter == 0) {
    throw InputError("classify_orbit: max_iter must be at least 1");
  }
  struct Target {
    Vec3 point;
    Fate fate;
  };
  std::vector<Target> targets{{Vec3{0.0, 0.0, 0.0}, Fate::ToOrigin}};
  if (params.lambda > 1.0) {
    const double xi0 = solve_xi0(params.lambda);
    targets.push_back({Vec3{0.0, 0.0, xi0}, Fate::ToUpperFixed});
    targets.push_back({Vec3{0.0, 0.0, -xi0}, Fate::ToLowerFixed});
  }

  FateRecord rec;
  rec.witness = v;
  std::size_t streak_target = targets.size();
  std::size_t streak = 0;
  double prev_pole_norm = -1.0;
  std::size_t growth = 0;

  Vec3 cur = v;
  for (std::size_t i = 1; i <= opts.max_iter; ++i) {
    const ExtendedPoint next = T_eval(cur, params);
    rec.iterations = i;
    rec.witness = next;
    if (next.is_infinite()) {
      rec.fate = Fate::PoleHit;
      rec.residual = 0.0;
      return rec;
    }
    const Vec3& n = next.finite();

    std::size_t hit = targets.size();
    double hit_dist = 0.0;
    for (std::size_t t = 0; t < targets.size(); ++t) {
      const double d = (n - targets[t].point).norm();
      if (d < opts.tol) {
        hit = t;
        hit_dist = d;
        break;
      }
    }
    if (hit < targets.size()) {
      streak = (hit == streak_target) ? streak + 1 : 1;
      streak_target = hit;
      if (streak >= opts.capture_steps) {
        rec.fate = targets[hit].fate;
        rec.residual = hit_dist;
        return rec;
      }
    } else {
      streak = 0;
      streak_target = targets.size();
    }

    if (n.z == 0.0) {
      const auto idx = containing_diamond({n.x, n.y});
      if (!idx) {
        growth = 0;
        prev_pole_norm = -1.0;
      } else {
        const double pn = pole_location(*idx).norm();
        growth = (prev_pole_norm >= 0.0 && pn > prev_pole_norm) ? growth + 1 : 0;
        prev_pole_norm = pn;
        if (growth >= opts.escape_steps && n.norm() > opts.escape_radius) {
          rec.fate = Fate::Escaping;
          rec.residual = 0.0;
          return rec;
        }
      }
    }
    cur = n;
  }
  rec.fate = Fate::Undecided;
  rec.residual = 0.0;
  return rec;
}

CheckSummary petal_fixed_boundary_check(double lambda, std::size_t samples) {
  if (!(lambda > 0.0 && lambda < std::numbers::sqrt2)) {
    throw DomainError("petal_fixed_boundary_check: lambda must lie in (0, sqrt 2)");
  }
  CheckSummary out;
  if (lambda <= kQuarterPi || samples == 0) {
    return out;
  }
  const MapParams params(lambda);
  const double alpha_min = std::sqrt(std::max(0.0, lambda * lambda - 1.0));
  for (std::size_t i = 0; i < samples; ++i) {
    // Last sample is alpha = 1 exactly, the diagonal of the square.
    const double frac = static_cast<double>(i + 1) / static_cast<double>(samples);
    const double alpha = alpha_min + (1.0 - alpha_min) * frac;
    if (!(alpha * alpha > lambda * lambda - 1.0)) {
      continue;
    }
    const double x = solve_phi(lambda / std::sqrt(1.0 + alpha * alpha));
    if (!(x < kQuarterPi)) {
      continue;
    }
    for (const Vec3 p : {Vec3{x, alpha * x, 0.0}, Vec3{alpha * x, x, 0.0}, Vec3{-x, alpha * x, 0.0},
                         Vec3{alpha * x, -x, 0.0}}) {
      const ExtendedPoint img = T_eval(p, params);
      const double res = img.is_infinite() ? std::numeric_limits<double>::infinity() : (img.finite() - p).norm();
      ++out.samples;
      out.worst = std::max(out.worst, res);
      if (!(res < 1e-9)) {
        ++out.violations;
      }
    }
  }
  return out;
}

bool parabolic_decrease_holds(const Vec3& v, double eps) {
  if (!(v.z > 0.0 && v.z < 2.0 * eps) || !(max_abs(v.x, v.y) < v.z / 2.0)) {
    throw DomainError("parabolic_decrease_holds: point is outside V");
  }
  const ExtendedPoint img = T_eval(v, MapParams(1.0));
  return img.finite().z <= v.z - v.z * v.z * v.z / 24.0;
}

CheckSummary parabolic_decrease_check(double eps, std::size_t samples, std::uint64_t seed) {
  if (!(eps > 0.0)) {
    throw InputError("parabolic_decrease_check: eps must be positive");
  }
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  CheckSummary out;
  while (out.samples < samples) {
    const double z = 2.0 * eps * unit(rng);
    const double x = (unit(rng) - 0.5) * z;
    const double y = (unit(rng) - 0.5) * z;
    const Vec3 v{x, y, z};
    if (!(z > 0.0) || !(max_abs(x, y) < z / 2.0)) {
      continue;
    }
    ++out.samples;
    const double t3 = T_eval(v, MapParams(1.0)).finite().z;
    const double excess = t3 - (z - z * z * z / 24.0);
    if (excess > 0.0) {
      ++out.violations;
      out.worst = std::max(out.worst, excess);
    }
  }
  return out;
}

CheckSummary third_component_bound_check(std::size_t samples, const MapParams& params, std::uint64_t seed,
                                         double z_max) {
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> horiz(-4.0, 4.0);
  std::uniform_real_distribution<double> height(0.0, z_max);
  const double xi0 = params.lambda > 1.0 ? solve_xi0(params.lambda) : 0.0;
  constexpr double kSlack = 1e-12;
  CheckSummary out;
  while (out.samples < samples) {
    const Vec3 v{horiz(rng), horiz(rng), height(rng)};
    if (!(v.z > 0.0)) {
      continue;
    }
    ++out.samples;
    const double t3 = T_eval(v, params).finite().z;
    const double lower = params.lambda * std::tanh(v.z);
    double gap = lower - kSlack - t3;
    if (params.lambda > 1.0) {
      gap = std::max(gap, std::min(v.z, xi0) - kSlack - lower);
    }
    if (gap > 0.0) {
      ++out.violations;
      out.worst = std::max(out.worst, gap);
    }
  }
  return out;
}

CheckSummary rho_decrease_check(std::size_t samples, const MapParams& params, std::uint64_t seed) {
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> horiz(-5.0, 5.0);
  std::uniform_real_distribution<double> height(0.0, 5.0);
  CheckSummary out;
  while (out.samples < samples) {
    const Vec3 v{horiz(rng), horiz(rng), height(rng)};
    if (!(v.z > 0.0) || max_abs(v.x, v.y) == 0.0) {
      continue;
    }
    ++out.samples;
    const double before = rho(v);
    const double after = rho(T_eval(v, params).finite());
    out.worst = std::max(out.worst, after / before);
    if (!(after < before)) {
      ++out.violations;
    }
  }
  return out;
}

namespace {

// Distance from the m-th image of v to the target; infinity when the orbit
// meets a pole before step m (unless the target is infinity).
double probe_distance(const Vec3& v, std::size_t m, const ExtendedPoint& target, const MapParams& params) {
  ExtendedPoint w = v;
  for (std::size_t i = 0; i < m; ++i) {
    w = T_eval(w.finite(), params);
    if (w.is_infinite()) {
      return target.is_infinite() ? 0.0 : std::numeric_limits<double>::infinity();
    }
  }
  if (target.is_infinite()) {
    return chordal_distance(w, target);
  }
  return (w.finite() - target.finite()).norm();
}

}  // namespace

BlowupReport blowup_probe(const PlanePoint& center, double radius, const MapParams& params,
                          std::span<const ExtendedPoint> targets, const BlowupOptions& opts) {
  if (!(radius > 0.0)) {
    throw InputError("blowup_probe: radius must be positive");
  }
  if (opts.grid < 2 || opts.max_steps == 0) {
    throw InputError("blowup_probe: grid must be >= 2 and max_steps >= 1");
  }
  const Vec3 c{center.x, center.y, 0.0};
  BlowupReport report;
  for (const ExtendedPoint& t : targets) {
    ProbeTarget pt;
    pt.target = t;
    pt.distance = std::numeric_limits<double>::infinity();
    if (t.is_finite()) {
      const Vec3& v = t.finite();
      if (v.x == 0.0 && v.y == 0.0 && std::fabs(std::fabs(v.z) - params.lambda) <= 1e-12 * params.lambda) {
        pt.status = ProbeStatus::Omitted;
      }
    }
    report.targets.push_back(pt);
  }

  std::vector<Vec3> cloud;
  const double step = 2.0 * radius / static_cast<double>(opts.grid - 1);
  for (std::size_t i = 0; i < opts.grid; ++i) {
    for (std::size_t j = 0; j < opts.grid; ++j) {
      for (std::size_t k = 0; k < opts.grid; ++k) {
        const Vec3 d{-radius + step * static_cast<double>(i), -radius + step * static_cast<double>(j),
                     -radius + step * static_cast<double>(k)};
        if (d.norm() < radius) {
          cloud.push_back(c + d);
        }
      }
    }
  }
  report.samples = cloud.size();

  for (ProbeTarget& pt : report.targets) {
    if (pt.status == ProbeStatus::Omitted) {
      continue;
    }
    for (std::size_t m = 1; m <= opts.max_steps && pt.status == ProbeStatus::NotCovered; ++m) {
      std::vector<std::pair<double, Vec3>> scored;
      scored.reserve(cloud.size());
      for (const Vec3& v : cloud) {
        scored.emplace_back(probe_distance(v, m, pt.target, params), v);
      }
      const std::size_t keep = std::min(opts.seeds, scored.size());
      std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(),
                        [](const auto& a, const auto& b) { return a.first < b.first; });
      for (std::size_t s = 0; s < keep && pt.status == ProbeStatus::NotCovered; ++s) {
        auto [best, at] = scored[s];
        double h = step;
        for (std::size_t level = 0; level <= opts.refine_levels; ++level) {
          report.samples += level == 0 ? 0 : 343;
          pt.distance = std::min(pt.distance, best);
          if (best < opts.hit_radius) {
            pt.status = ProbeStatus::Covered;
            pt.steps = m;
            break;
          }
          if (level == opts.refine_levels) {
            break;
          }
          const Vec3 base = at;
          for (int i = -3; i <= 3; ++i) {
            for (int j = -3; j <= 3; ++j) {
              for (int k = -3; k <= 3; ++k) {
                const Vec3 v = base + Vec3{h * i / 3.0, h * j / 3.0, h * k / 3.0};
                if ((v - c).norm() >= radius) {
                  continue;
                }
                const double d = probe_distance(v, m, pt.target, params);
                if (d < best) {
                  best = d;
                  at = v;
                }
              }
            }
          }
          h *= 0.5;
        }
      }
    }
  }
  return report;
}

}  // namespace qrtan
