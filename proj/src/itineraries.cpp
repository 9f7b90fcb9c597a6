#include "qrtan/itineraries.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace qrtan {

namespace {

constexpr std::size_t kMaxContractionSteps = 200;
constexpr std::size_t kStallLimit = 5;
constexpr double kStepTol = 1e-12;

double dist(const PlanePoint& a, const PlanePoint& b) { return std::hypot(a.x - b.x, a.y - b.y); }

PoleIndex nearest_pole(PlanePoint p) {
  for (int attempt = 0; attempt < 4; ++attempt) {
    if (const auto idx = containing_diamond(p)) {
      return *idx;
    }
    p.x += 1e-9;
  }
  throw InternalError("nearest_pole: point stuck on the diamond boundary");
}

// Applies S_{c_0} o ... o S_{c_{k-1}} to w.
PlanePoint compose_branches(std::span<const PoleIndex> cycle, PlanePoint w, const MapParams& params) {
  for (std::size_t j = cycle.size(); j-- > 0;) {
    w = inverse_branch(cycle[j], w, params);
  }
  return w;
}

PeriodicOrbit contract_to_cycle(const std::vector<PoleIndex>& cycle, const MapParams& params) {
  PeriodicOrbit out;
  out.cycle = cycle;
  PlanePoint y = pole_location(cycle.front());
  double prev_step = std::numeric_limits<double>::infinity();
  std::size_t stalled = 0;
  bool converged = false;
  for (std::size_t it = 1; it <= kMaxContractionSteps; ++it) {
    const PlanePoint next = compose_branches(cycle, y, params);
    const double step = dist(next, y);
    y = next;
    out.iterations = it;
    if (step < kStepTol) {
      converged = true;
      break;
    }
    stalled = (step >= prev_step) ? stalled + 1 : 0;
    if (stalled >= kStallLimit) {
      throw DomainError("periodic point: composed branch map is not contracting");
    }
    prev_step = step;
  }
  if (!converged) {
    throw DomainError("periodic point: contraction iteration did not converge");
  }

  const std::size_t k = cycle.size();
  out.points.assign(k, y);
  PlanePoint w = y;
  for (std::size_t j = k; j-- > 1;) {
    w = inverse_branch(cycle[j], w, params);
    out.points[j] = w;
  }

  for (std::size_t j = 0; j < k; ++j) {
    const auto img = F_lambda_plane(out.points[j], params);
    const double r = img ? dist(*img, out.points[(j + 1) % k]) : std::numeric_limits<double>::infinity();
    out.stepwise_residual = std::max(out.stepwise_residual, r);
  }
  PlanePoint cur = out.points.front();
  out.naive_residual = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const auto img = F_lambda_plane(cur, params);
    if (!img) {
      out.naive_residual = std::numeric_limits<double>::infinity();
      break;
    }
    cur = *img;
  }
  if (std::isfinite(out.naive_residual)) {
    out.naive_residual = dist(cur, out.points.front());
  }
  return out;
}

}  // namespace

PoleIndex Itinerary::at(std::size_t j) const {
  if (j < prefix.size()) {
    return prefix[j];
  }
  if (!tail) {
    throw InputError("Itinerary::at: index beyond the prefix of a finite itinerary");
  }
  return tail(j);
}

std::vector<PoleIndex> Itinerary::take(std::size_t n) const {
  std::vector<PoleIndex> out;
  out.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    out.push_back(at(j));
  }
  return out;
}

Itinerary diagonal_itinerary(std::int64_t m, std::int64_t n0) {
  Itinerary s;
  s.tail = [m, n0](std::size_t j) { return PoleIndex{m, n0 + static_cast<std::int64_t>(j)}; };
  return s;
}

Itinerary random_itinerary(std::uint64_t seed, double start_radius) {
  Itinerary s;
  s.tail = [seed, start_radius](std::size_t j) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(j >> 32)};
    std::mt19937_64 rng(seq);
    const double angle = std::uniform_real_distribution<double>(-kPi, kPi)(rng);
    const double r = start_radius + 2.0 * kPi * static_cast<double>(j);
    return nearest_pole({r * std::cos(angle), r * std::sin(angle)});
  };
  return s;
}

Itinerary geometric_itinerary(double start_radius, double growth, double angle) {
  if (!(start_radius > 0.0) || !(growth > 1.0)) {
    throw InputError("geometric_itinerary: need start_radius > 0 and growth > 1");
  }
  Itinerary s;
  s.tail = [start_radius, growth, angle](std::size_t j) {
    const double r = start_radius * std::pow(growth, static_cast<double>(j));
    return nearest_pole({r * std::cos(angle), r * std::sin(angle)});
  };
  return s;
}

Itinerary split_at_far_radius(Itinerary s, const MapParams& params) {
  if (!s.has_tail()) {
    return s;
  }
  const double far = calibrated_far_radius(params);
  for (std::size_t guard = 0; guard < 4096; ++guard) {
    const PoleIndex next = s.at(s.prefix.size());
    if (pole_location(next).norm() > far) {
      return s;
    }
    s.prefix.push_back(next);
  }
  throw DomainError("split_at_far_radius: tail never leaves the far radius");
}

std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::Complete:
      return "complete";
    case StopReason::LeftDiamonds:
      return "left-diamonds";
    case StopReason::PoleHit:
      return "pole-hit";
  }
  return "complete";
}

ItineraryReadout itinerary_of(const PlanePoint& v, const MapParams& params, std::size_t n_terms) {
  ItineraryReadout out;
  PlanePoint cur = v;
  while (out.symbols.size() < n_terms) {
    const auto idx = containing_diamond(cur);
    if (!idx) {
      out.reason = StopReason::LeftDiamonds;
      return out;
    }
    out.symbols.push_back(*idx);
    if (out.symbols.size() == n_terms) {
      break;
    }
    const auto next = F_lambda_plane(cur, params);
    if (!next) {
      out.reason = StopReason::PoleHit;
      return out;
    }
    cur = *next;
  }
  out.reason = StopReason::Complete;
  return out;
}

std::vector<PlanePoint> pseudo_orbit(const Itinerary& s, const MapParams& params, std::size_t n_compose) {
  if (n_compose == 0) {
    throw InputError("pseudo_orbit: n_compose must be at least 1");
  }
  const double far = calibrated_far_radius(params);
  std::vector<PoleIndex> poles = s.take(n_compose + 1);
  for (std::size_t j = s.prefix.size(); j < poles.size(); ++j) {
    if (!(pole_location(poles[j]).norm() > far)) {
      throw DomainError("point_from_itinerary: tail pole " + std::to_string(j) + " lies within the far radius " +
                        std::to_string(far));
    }
  }
  std::vector<PlanePoint> y(n_compose + 1);
  y[n_compose] = pole_location(poles[n_compose]);
  for (std::size_t j = n_compose; j-- > 0;) {
    y[j] = inverse_branch(poles[j], y[j + 1], params);
  }
  return y;
}

PlanePoint point_from_itinerary(const Itinerary& s, const MapParams& params, std::size_t n_compose) {
  return pseudo_orbit(s, params, n_compose).front();
}

ForwardCheck forward_check(const Itinerary& s, const MapParams& params, std::size_t depth, std::size_t n_compose) {
  if (depth > n_compose) {
    throw InputError("forward_check: depth exceeds n_compose");
  }
  ForwardCheck out;
  out.requested = depth;
  const std::vector<PlanePoint> y = pseudo_orbit(s, params, n_compose);
  for (std::size_t j = 0; j < depth; ++j) {
    const auto idx = containing_diamond(y[j]);
    if (!idx || !(*idx == s.at(j))) {
      break;
    }
    const auto img = F_lambda_plane(y[j], params);
    if (!img) {
      break;
    }
    const double r = dist(*img, y[j + 1]) / std::max(1.0, y[j + 1].norm());
    if (!(r < 1e-9)) {
      break;
    }
    out.max_step_residual = std::max(out.max_step_residual, r);
    out.verified = j + 1;
  }

  const ItineraryReadout naive = itinerary_of(y.front(), params, depth);
  while (out.naive_depth < naive.symbols.size() && naive.symbols[out.naive_depth] == s.at(out.naive_depth)) {
    ++out.naive_depth;
  }
  return out;
}

CauchyReport cauchy_increments(const Itinerary& s, const MapParams& params, std::size_t first, std::size_t last,
                               double max_ratio, double noise_floor) {
  if (first == 0 || last <= first) {
    throw InputError("cauchy_increments: need 1 <= first < last");
  }
  CauchyReport out;
  out.first = first;
  PlanePoint prev = point_from_itinerary(s, params, first);
  for (std::size_t n = first; n < last; ++n) {
    const PlanePoint cur = point_from_itinerary(s, params, n + 1);
    const double d = dist(cur, prev);
    if (!(d < std::ldexp(kPi, 1 - static_cast<int>(n)))) {
      out.bound_ok = false;
    }
    if (!out.increments.empty() && out.increments.back() > noise_floor) {
      out.worst_ratio = std::max(out.worst_ratio, d / out.increments.back());
    }
    out.increments.push_back(d);
    prev = cur;
  }
  out.ratios_ok = out.worst_ratio <= max_ratio;
  return out;
}

PeriodicOrbit periodic_point_from_cycle(const PeriodicCycleSpec& c, const MapParams& params) {
  if (c.cycle.empty()) {
    throw InputError("periodic_point_from_cycle: empty cycle");
  }
  const double far = calibrated_far_radius(params);
  for (const PoleIndex& p : c.cycle) {
    if (!(pole_location(p).norm() > far)) {
      throw DomainError("periodic_point_from_cycle: cycle pole within the far radius " + std::to_string(far));
    }
  }
  return contract_to_cycle(c.cycle, params);
}

NearEscapingResult periodic_near_escaping(const PlanePoint& v, double eta, const MapParams& params) {
  if (!(eta > 0.0)) {
    throw InputError("periodic_near_escaping: eta must be positive");
  }
  constexpr std::size_t kMaxSymbols = 64;
  const ItineraryReadout read = itinerary_of(v, params, kMaxSymbols);
  const double far = calibrated_far_radius(params);

  std::size_t n_far = 0;
  while (n_far < read.symbols.size() && !(n_far > 0 && pole_location(read.symbols[n_far]).norm() > far)) {
    ++n_far;
  }
  if (n_far >= read.symbols.size()) {
    throw DomainError("periodic_near_escaping: itinerary never reaches the far radius");
  }

  // The point v and the periodic point are both images under the same composed
  // branch map G; the spread of G over W(p_0) and W(p_L) bounds their distance.
  for (std::size_t len = n_far + 1; len < read.symbols.size(); ++len) {
    const std::vector<PoleIndex> cycle(read.symbols.begin(), read.symbols.begin() + static_cast<std::ptrdiff_t>(len));
    std::vector<PlanePoint> probes;
    for (const PoleIndex idx : {cycle.front(), read.symbols[len]}) {
      const PlanePoint c = pole_location(idx);
      const double r = 0.999 * Diamond::kRadius;
      for (const PlanePoint d : {PlanePoint{r, 0.0}, PlanePoint{-r, 0.0}, PlanePoint{0.0, r}, PlanePoint{0.0, -r},
                                 PlanePoint{0.0, 0.0}}) {
        probes.push_back(compose_branches(cycle, c + d, params));
      }
    }
    double spread = 0.0;
    for (std::size_t a = 0; a < probes.size(); ++a) {
      for (std::size_t b = a + 1; b < probes.size(); ++b) {
        spread = std::max(spread, dist(probes[a], probes[b]));
      }
    }
    if (!(spread < 0.5 * eta)) {
      continue;
    }
    NearEscapingResult out;
    out.orbit = contract_to_cycle(cycle, params);
    out.n_far = n_far;
    out.m_extra = len - n_far;
    out.distance = dist(out.orbit.point(), v);
    if (!(out.distance < eta)) {
      throw DomainError("periodic_near_escaping: periodic point misses the eta ball");
    }
    return out;
  }
  throw DomainError("periodic_near_escaping: itinerary too short for the requested eta");
}

}  // namespace qrtan
