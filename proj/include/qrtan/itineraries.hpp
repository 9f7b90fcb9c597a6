#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "qrtan/plane_dynamics.hpp"
#include "qrtan/types.hpp"

namespace qrtan {

/// A sequence of poles: an explicit prefix followed by an optional generator
/// for the remaining symbols.
struct Itinerary {
  std::vector<PoleIndex> prefix;
  std::function<PoleIndex(std::size_t)> tail;  // symbol j for j >= prefix.size()

  [[nodiscard]] bool has_tail() const { return static_cast<bool>(tail); }
  /// Symbol j; throws InputError past the prefix when there is no tail.
  [[nodiscard]] PoleIndex at(std::size_t j) const;
  [[nodiscard]] std::vector<PoleIndex> take(std::size_t n) const;
};

/// p_j = (m, n0 + j): the poles ((n0 + j + m) pi/2, (n0 + j - m + 1) pi/2).
[[nodiscard]] Itinerary diagonal_itinerary(std::int64_t m = 0, std::int64_t n0 = 0);

/// Random tail whose j-th pole is the one nearest to a point of norm
/// start_radius + 2 pi j at a seeded random angle. Pole norms are nondecreasing.
[[nodiscard]] Itinerary random_itinerary(std::uint64_t seed, double start_radius);

/// Poles nearest to the points start_radius * growth^j (cos angle, sin angle).
[[nodiscard]] Itinerary geometric_itinerary(double start_radius, double growth, double angle);

/// Moves tail symbols into the prefix until the next tail pole lies beyond the
/// calibrated far radius, so the result satisfies the construction precondition.
[[nodiscard]] Itinerary split_at_far_radius(Itinerary s, const MapParams& params);

enum class StopReason { Complete, LeftDiamonds, PoleHit };

[[nodiscard]] std::string_view to_string(StopReason r);

struct ItineraryReadout {
  std::vector<PoleIndex> symbols;
  StopReason reason = StopReason::Complete;
};

/// Phi read off by forward iteration of F_lambda: the diamond of v, F(v), ...
/// Stops early when an iterate lies outside every open diamond or hits a pole
/// (the pole's own index is emitted first).
[[nodiscard]] ItineraryReadout itinerary_of(const PlanePoint& v, const MapParams& params, std::size_t n_terms);

/// y_n = pole(p_n), y_j = S_{p_j}(y_{j+1}) for j = n-1, ..., 0. Entry 0 is the
/// constructed point; entry j approximates its j-th iterate.
[[nodiscard]] std::vector<PlanePoint> pseudo_orbit(const Itinerary& s, const MapParams& params,
                                                   std::size_t n_compose);

/// S_{p_0} o ... o S_{p_{n-1}}(pole(p_n)). Throws DomainError when a tail pole
/// (index >= prefix size) up to n_compose has norm <= the calibrated far radius.
[[nodiscard]] PlanePoint point_from_itinerary(const Itinerary& s, const MapParams& params,
                                              std::size_t n_compose = 30);

struct ForwardCheck {
  std::size_t requested = 0;
  std::size_t verified = 0;        // leading steps j with y_j in W(p_j) and F(y_j) = y_{j+1}
  double max_step_residual = 0.0;  // over verified steps, relative to max(1, |y_{j+1}|)
  std::size_t naive_depth = 0;     // leading symbols reproduced by plain forward iteration of y_0
  [[nodiscard]] bool passed() const { return verified >= requested; }
};

/// Verifies the first `depth` symbols of the pseudo-orbit built with n_compose
/// branches: each y_j lies in W(p_j) and F_lambda(y_j) matches y_{j+1} to 1e-9
/// relative. Plain forward iteration is reported separately as naive_depth.
[[nodiscard]] ForwardCheck forward_check(const Itinerary& s, const MapParams& params, std::size_t depth,
                                         std::size_t n_compose = 30);

struct CauchyReport {
  std::vector<double> increments;  // entry n: |x(n + 1) - x(n)|, starting at n = first
  std::size_t first = 1;
  bool bound_ok = true;            // increment n below 2^(1 - n) pi
  double worst_ratio = 0.0;        // successive increment ratio, above the noise floor
  bool ratios_ok = true;           // worst_ratio <= max_ratio
};

/// Increments of point_from_itinerary as n_compose runs from `first` to `last`.
/// Ratios are only judged while the earlier increment exceeds `noise_floor`.
[[nodiscard]] CauchyReport cauchy_increments(const Itinerary& s, const MapParams& params, std::size_t first,
                                             std::size_t last, double max_ratio = 0.6,
                                             double noise_floor = 1e-13);

struct PeriodicCycleSpec {
  std::vector<PoleIndex> cycle;
};

struct PeriodicOrbit {
  std::vector<PoleIndex> cycle;
  std::vector<PlanePoint> points;  // y_j in W(p_j), j < k
  std::size_t iterations = 0;
  double stepwise_residual = 0.0;  // max_j |F(y_j) - y_{j+1 mod k}|
  double naive_residual = 0.0;     // |F^k(y_0) - y_0|; infinite when the orbit hits a pole
  [[nodiscard]] const PlanePoint& point() const { return points.front(); }
};

/// Fixed point of S_{p_0} o ... o S_{p_{k-1}} by contraction iteration from
/// pole(p_0). Throws DomainError when a cycle pole lies within the calibrated
/// far radius or when the steps fail to shrink for 5 consecutive iterations.
[[nodiscard]] PeriodicOrbit periodic_point_from_cycle(const PeriodicCycleSpec& c, const MapParams& params);

struct NearEscapingResult {
  PeriodicOrbit orbit;
  std::size_t n_far = 0;  // N: first index whose pole lies beyond the far radius
  std::size_t m_extra = 0;  // M: further symbols needed for the target accuracy
  double distance = 0.0;  // |y_0 - v|
};

/// Periodic point within eta of v, built from the first N + M symbols of v's
/// itinerary (read by forward iteration). Throws DomainError when the readable
/// itinerary is too short or never reaches the far radius.
[[nodiscard]] NearEscapingResult periodic_near_escaping(const PlanePoint& v, double eta, const MapParams& params);

}  // namespace qrtan
