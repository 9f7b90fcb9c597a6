#include "qrtan/verify.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>

#include "qrtan/core_maps.hpp"

namespace qrtan {

namespace {

std::mt19937_64 make_rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x5eedu};
  return std::mt19937_64(seq);
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

std::vector<PoleIndex> block_poles() {
  std::vector<PoleIndex> out;
  for (std::int64_t m = -1; m <= 1; ++m) {
    for (std::int64_t n = -1; n <= 1; ++n) {
      out.push_back({m, n});
    }
  }
  return out;
}

FateTally tally_plane(const MapParams& params, const std::vector<PlanePoint>& pts, Fate expected) {
  FateTally t;
  for (const PlanePoint& p : pts) {
    const FateRecord r = classify_orbit(p.lift(), params);
    ++t.samples;
    if (r.fate == expected) {
      ++t.matched;
      t.max_iterations = std::max(t.max_iterations, r.iterations);
    }
  }
  return t;
}

void add(std::vector<CheckLine>& out, std::string name, bool ok, std::string detail) {
  out.push_back({std::move(name), ok, std::move(detail)});
}

void core_suite(std::vector<CheckLine>& out, const MapParams& params, std::uint64_t seed) {
  const double tan_err = tangent_embedding_error(100000, seed);
  add(out, "core.tangent-embedding", tan_err < 1e-10, fmt("max chordal error %.3e (lambda = 1)", tan_err));
  const SymmetryErrors sym = symmetry_errors(10000, seed + 1, params);
  add(out, "core.periodicity", sym.periodicity < 1e-10, fmt("max chordal error %.3e", sym.periodicity));
  add(out, "core.reflection", sym.reflection < 1e-10, fmt("max chordal error %.3e", sym.reflection));
}

void analysis_suite(std::vector<CheckLine>& out, const MapParams& params, std::uint64_t seed) {
  const double lam = params.lambda;
  if (lam > 1.0) {
    const double xi0 = solve_xi0(lam);
    const double eq = std::fabs(xi0 - lam * std::tanh(xi0));
    const double map = (T_eval({0.0, 0.0, xi0}, params).finite() - Vec3{0.0, 0.0, xi0}).norm();
    add(out, "analysis.xi0", eq < 1e-12 && map < 1e-10,
        fmt("xi0 = %.15f, |xi0 - lambda tanh xi0| = %.2e, map residual %.2e", xi0, eq, map));
  }
  if (lam != 1.0) {
    const FateTally t = half_space_fates(params, 1000, seed);
    add(out, "analysis.half-space-fates", t.all(),
        fmt("%zu / %zu orbits reach the predicted attractor, max %zu iterations", t.matched, t.samples,
            t.max_iterations));
  }
  const CheckSummary rho = rho_decrease_check(10000, params, seed + 2);
  add(out, "analysis.rho-decrease", rho.passed(),
      fmt("%zu violations in %zu samples, worst ratio %.6f", rho.violations, rho.samples, rho.worst));
  const CheckSummary third = third_component_bound_check(10000, params, seed + 3);
  add(out, "analysis.third-component", third.passed(),
      fmt("%zu violations in %zu samples", third.violations, third.samples));
  const CheckSummary para = parabolic_decrease_check(0.05, 10000, seed + 4);
  add(out, "analysis.parabolic (lambda = 1)", para.passed(),
      fmt("%zu violations in %zu samples", para.violations, para.samples));
  if (lam < std::numbers::sqrt2) {
    if (lam > kQuarterPi) {
      const CheckSummary petal = petal_fixed_boundary_check(lam, 100);
      add(out, "analysis.petal-boundary-fixed", petal.passed(),
          fmt("max |T(p) - p| = %.3e over %zu boundary points", petal.worst, petal.samples));
    }
    const FateTally q = petal_fates(params, 1000, seed + 5);
    add(out, "analysis.petal-basin", q.all(), fmt("%zu / %zu Q samples reach the origin", q.matched, q.samples));
  }
}

void plane_suite(std::vector<CheckLine>& out, const MapParams& params, std::uint64_t seed) {
  const double lam = params.lambda;
  const SingularValueScan sv = singular_value_scan(params, 10000, seed, lam / std::numbers::sqrt2 - 0.01);
  add(out, "plane.min-singular-value", sv.below == 0,
      fmt("min sigma %.4f at (%.4f, %.4f), bound %.4f, %zu / %zu below", sv.min_sigma, sv.argmin.x, sv.argmin.y,
          lam / std::numbers::sqrt2 - 0.01, sv.below, sv.samples));
  const ContractionScan cs = contraction_scan(params, 200, seed + 1);
  const double cbound = std::numbers::sqrt2 / lam + 0.01;
  add(out, "plane.branch-contraction", cs.worst <= cbound,
      fmt("worst ratio %.4f (q = (%lld, %lld), p = (%lld, %lld)), bound %.4f", cs.worst,
          static_cast<long long>(cs.worst_q.m), static_cast<long long>(cs.worst_q.n),
          static_cast<long long>(cs.worst_p.m), static_cast<long long>(cs.worst_p.n), cbound));
  const double ex = expansion_scan(params, 1000, seed + 2);
  add(out, "plane.pole-expansion", ex >= 2.0 - 0.01,
      fmt("min ratio %.4f on eps = %.5f balls", ex, calibrate_expansion_radius(params).eps));
  const RoundTripScan rt = inverse_round_trip_scan(params, 1000, seed + 3);
  add(out, "plane.inverse-round-trip", rt.max_error < 1e-9 && rt.infinity_exact,
      fmt("max chordal error %.3e over %zu targets, S_q(inf) exact: %s", rt.max_error, rt.samples,
          rt.infinity_exact ? "yes" : "no"));
}

void itinerary_suite(std::vector<CheckLine>& out, const MapParams& params, std::uint64_t seed) {
  const Itinerary s = split_at_far_radius(diagonal_itinerary(), params);
  const ForwardCheck fc = forward_check(s, params, 20, 25);
  add(out, "itineraries.forward-check", fc.passed(),
      fmt("%zu / %zu pseudo-orbit steps verified, max step residual %.2e, plain forward iteration %zu symbols",
          fc.verified, fc.requested, fc.max_step_residual, fc.naive_depth));
  const CauchyReport c = cauchy_increments(s, params, 1, 29);
  add(out, "itineraries.cauchy", c.bound_ok && c.ratios_ok,
      fmt("2^(1-n) pi bound %s, worst ratio %.4f", c.bound_ok ? "holds" : "violated", c.worst_ratio));
  const double far = calibrated_far_radius(params);
  std::size_t ok = 0;
  for (std::size_t t = 0; t < 100; ++t) {
    ok += forward_check(random_itinerary(seed + t, far + kPi), params, 15, 25).passed() ? 1 : 0;
  }
  add(out, "itineraries.round-trip", ok == 100, fmt("%zu / 100 random tails read back 15 symbols", ok));
  for (const std::size_t k : {1u, 3u, 7u}) {
    const PeriodicOrbit po = periodic_point_from_cycle({far_cycle(k)}, params);
    add(out, fmt("itineraries.periodic-%zu", k), po.stepwise_residual < 1e-9,
        fmt("stepwise residual %.2e, plain |F^%zu(y0) - y0| = %.2e", po.stepwise_residual, k, po.naive_residual));
  }
  try {
    const PlanePoint v = point_from_itinerary(s, params, 30);
    const NearEscapingResult ne = periodic_near_escaping(v, 1e-3, params);
    add(out, "itineraries.periodic-near-escaping", ne.distance < 1e-3 && ne.orbit.stepwise_residual < 1e-9,
        fmt("distance %.2e with period %zu (N = %zu, M = %zu)", ne.distance, ne.orbit.cycle.size(), ne.n_far,
            ne.m_extra));
  } catch (const DomainError& e) {
    add(out, "itineraries.periodic-near-escaping", false, e.what());
  }
}

void render_suite(std::vector<CheckLine>& out, const MapParams& params, std::uint64_t) {
  RenderConfig cfg;
  cfg.lambda = params.lambda;
  cfg.width = cfg.height = 64;
  const DeterminismReport d = basin_determinism(cfg, 1, 4);
  add(out, "render.determinism", d.identical, fmt("64x64 basin, fnv1a %016llx", static_cast<unsigned long long>(d.hash)));
}

}  // namespace

double tangent_embedding_error(std::size_t samples, std::uint64_t seed, double range) {
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> u(-range, range);
  const MapParams unit(1.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double a = u(rng);
    const double b = u(rng);
    const std::complex<double> t = std::tan(std::complex<double>(a, b));
    const double e1 = chordal_distance(T_eval({a, 0.0, b}, unit), Vec3{t.real(), 0.0, t.imag()});
    const double e2 = chordal_distance(T_eval({0.0, a, b}, unit), Vec3{0.0, t.real(), t.imag()});
    worst = std::max({worst, e1, e2});
  }
  return worst;
}

SymmetryErrors symmetry_errors(std::size_t samples, std::uint64_t seed, const MapParams& params) {
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> h(-10.0, 10.0);
  std::uniform_real_distribution<double> v(-3.0, 3.0);
  SymmetryErrors e;
  auto reflect = [](const ExtendedPoint& p, int axis) -> ExtendedPoint {
    if (p.is_infinite()) {
      return p;
    }
    Vec3 q = p.finite();
    (axis == 0 ? q.x : axis == 1 ? q.y : q.z) *= -1.0;
    return q;
  };
  for (std::size_t i = 0; i < samples; ++i) {
    const Vec3 p{h(rng), h(rng), v(rng)};
    const ExtendedPoint tp = T_eval(p, params);
    e.periodicity = std::max({e.periodicity, chordal_distance(T_eval(p + Vec3{kPi, 0.0, 0.0}, params), tp),
                              chordal_distance(T_eval(p + Vec3{0.0, kPi, 0.0}, params), tp)});
    for (int axis = 0; axis < 3; ++axis) {
      const Vec3 rp = reflect(p, axis).finite();
      e.reflection = std::max(e.reflection, chordal_distance(T_eval(rp, params), reflect(tp, axis)));
    }
  }
  return e;
}

FateTally half_space_fates(const MapParams& params, std::size_t samples, std::uint64_t seed, std::size_t max_iter) {
  if (params.lambda == 1.0) {
    throw InputError("half_space_fates: lambda = 1 has no hyperbolic attractor");
  }
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> h(-5.0, 5.0);
  std::uniform_real_distribution<double> v(0.01, 5.0);
  std::bernoulli_distribution sign(0.5);
  const bool upper = params.lambda > 1.0;
  ClassifyOptions opts;
  opts.max_iter = max_iter;
  FateTally t;
  for (std::size_t i = 0; i < samples; ++i) {
    double z = v(rng);
    if (!upper && sign(rng)) {
      z = -z;
    }
    const FateRecord r = classify_orbit({h(rng), h(rng), z}, params, opts);
    ++t.samples;
    if (r.fate == (upper ? Fate::ToUpperFixed : Fate::ToOrigin)) {
      ++t.matched;
      t.max_iterations = std::max(t.max_iterations, r.iterations);
    }
  }
  return t;
}

FateTally petal_fates(const MapParams& params, std::size_t samples, std::uint64_t seed) {
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> u(-kQuarterPi, kQuarterPi);
  std::vector<PlanePoint> pts;
  while (pts.size() < samples) {
    const PlanePoint p{u(rng), u(rng)};
    if (q_contains(p, params.lambda)) {
      pts.push_back(p);
    }
  }
  return tally_plane(params, pts, Fate::ToOrigin);
}

FateTally lattice_line_fates(const MapParams& params, std::size_t samples, std::uint64_t seed) {
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> u(-2.0 * kPi, 2.0 * kPi);
  std::uniform_int_distribution<int> k(-3, 3);
  std::bernoulli_distribution sign(0.5);
  std::vector<PlanePoint> pts;
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = u(rng);
    pts.push_back({x, (sign(rng) ? x : -x) + k(rng) * kPi});
  }
  return tally_plane(params, pts, Fate::ToOrigin);
}

SingularValueScan singular_value_scan(const MapParams& params, std::size_t samples, std::uint64_t seed,
                                      double threshold) {
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  SingularValueScan s;
  s.min_sigma = std::numeric_limits<double>::infinity();
  while (s.samples < samples) {
    const PlanePoint p{u(rng), u(rng)};
    if (near_non_smooth_set(p)) {
      continue;
    }
    JacobianSample j;
    try {
      j = jacobian_F(p, params);
    } catch (const DomainError&) {
      continue;
    }
    ++s.samples;
    if (j.min_singular_value < s.min_sigma) {
      s.min_sigma = j.min_singular_value;
      s.argmin = p;
    }
    if (j.min_singular_value < threshold) {
      ++s.below;
    }
  }
  return s;
}

ContractionScan contraction_scan(const MapParams& params, std::size_t pairs, std::uint64_t seed) {
  ContractionScan out;
  std::uint64_t salt = 0;
  for (const PoleIndex p : block_poles()) {
    const std::vector<PlanePoint> a = sample_diamond(p, pairs, seed + 2 * salt);
    const std::vector<PlanePoint> b = sample_diamond(p, pairs, seed + 2 * salt + 1);
    ++salt;
    std::vector<PointPair> pp;
    for (std::size_t i = 0; i < pairs; ++i) {
      pp.emplace_back(a[i], b[i]);
    }
    for (const PoleIndex q : block_poles()) {
      const double r = branch_contraction(q, p, pp, params);
      if (r > out.worst) {
        out = {r, q, p};
      }
    }
  }
  return out;
}

double expansion_scan(const MapParams& params, std::size_t pairs, std::uint64_t seed) {
  const double eps = calibrate_expansion_radius(params).eps;
  double worst = std::numeric_limits<double>::infinity();
  std::uint64_t salt = 0;
  for (const PoleIndex p : block_poles()) {
    const PlanePoint c = pole_location(p);
    const std::vector<PlanePoint> a = sample_disk(c, eps, pairs, seed + 2 * salt, false);
    const std::vector<PlanePoint> b = sample_disk(c, eps, pairs, seed + 2 * salt + 1, false);
    ++salt;
    std::vector<PointPair> pp;
    for (std::size_t i = 0; i < pairs; ++i) {
      pp.emplace_back(a[i], b[i]);
    }
    worst = std::min(worst, pole_neighborhood_expansion(p, eps, pp, params));
  }
  return worst;
}

RoundTripScan inverse_round_trip_scan(const MapParams& params, std::size_t per_pole, std::uint64_t seed) {
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> u(-30.0, 30.0);
  RoundTripScan out;
  for (const PoleIndex q : block_poles()) {
    const PlanePoint at_inf = inverse_branch(q, ExtendedPoint::infinity(), params);
    out.infinity_exact = out.infinity_exact && at_inf == pole_location(q);
    std::size_t done = 0;
    while (done < per_pole) {
      const PlanePoint w{u(rng), u(rng)};
      if (!in_branch_domain(w, params)) {
        continue;
      }
      const PlanePoint s = inverse_branch(q, w, params);
      out.max_error = std::max(out.max_error, chordal_distance(F_lambda_eval(s, params), w.lift()));
      ++done;
      ++out.samples;
    }
  }
  return out;
}

std::vector<PoleIndex> far_cycle(std::size_t length) {
  static const std::vector<PoleIndex> kPool{{6, 6}, {-5, 7}, {3, -9}, {8, 2}, {-7, -7}, {0, 10}, {9, -3},
                                            {-10, 1}, {4, 11}, {-2, -12}};
  if (length == 0 || length > kPool.size()) {
    throw InputError("far_cycle: length must be between 1 and 10");
  }
  return {kPool.begin(), kPool.begin() + static_cast<std::ptrdiff_t>(length)};
}

std::uint64_t fnv1a(const std::vector<std::uint8_t>& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return h;
}

DeterminismReport basin_determinism(RenderConfig cfg, unsigned threads_a, unsigned threads_b) {
  cfg.threads = threads_a;
  const ImageBuffer a = render_basin(cfg);
  cfg.threads = threads_b;
  const ImageBuffer b = render_basin(cfg);
  return {a.rgb == b.rgb && encode_ppm(a) == encode_ppm(b), fnv1a(a.rgb)};
}

std::vector<std::string> suite_names() { return {"core", "analysis", "plane", "itineraries", "render", "all"}; }

std::vector<CheckLine> run_suite(const std::string& suite, const MapParams& params, std::uint64_t seed) {
  const auto names = suite_names();
  if (std::find(names.begin(), names.end(), suite) == names.end()) {
    throw InputError("unknown suite: " + suite);
  }
  std::vector<CheckLine> out;
  const bool all = suite == "all";
  if (all || suite == "core") {
    core_suite(out, params, seed);
  }
  if (all || suite == "analysis") {
    analysis_suite(out, params, seed);
  }
  if (all || suite == "plane") {
    plane_suite(out, params, seed);
  }
  if (all || suite == "itineraries") {
    itinerary_suite(out, params, seed);
  }
  if (all || suite == "render") {
    render_suite(out, params, seed);
  }
  return out;
}

}  // namespace qrtan
