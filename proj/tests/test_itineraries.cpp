#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qrtan/itineraries.hpp"
#include "qrtan/verify.hpp"
#include "test_support.hpp"

using namespace qrtan;
using test::dist;

TEST_CASE("itinerary containers") {
  const Itinerary d = diagonal_itinerary(2, 5);
  CHECK(d.at(0) == PoleIndex{2, 5});
  CHECK(d.at(7) == PoleIndex{2, 12});
  CHECK(d.take(3).size() == 3);

  Itinerary finite;
  finite.prefix = {{0, 0}, {1, 1}};
  CHECK_FALSE(finite.has_tail());
  CHECK(finite.at(1) == PoleIndex{1, 1});
  CHECK_THROWS_AS((void)finite.at(2), InputError);

  const Itinerary r1 = random_itinerary(7, 20.0);
  const Itinerary r2 = random_itinerary(7, 20.0);
  CHECK(r1.take(30) == r2.take(30));
  double last = 0.0;
  for (const PoleIndex& p : r1.take(30)) {
    const double norm = pole_location(p).norm();
    CHECK(norm >= last - kPi);
    last = norm;
  }
}

TEST_CASE("split_at_far_radius") {
  const MapParams p(2.0);
  const double far = calibrated_far_radius(p);
  const Itinerary s = split_at_far_radius(geometric_itinerary(1.6, 1.5, 0.3), p);
  CHECK_FALSE(s.prefix.empty());
  CHECK(pole_location(s.at(s.prefix.size())).norm() > far);
  CHECK_THROWS_AS((void)point_from_itinerary(geometric_itinerary(1.6, 1.5, 0.3), p), DomainError);
  CHECK_NOTHROW((void)point_from_itinerary(s, p));
}

TEST_CASE("itinerary_of examples") {
  const MapParams p(2.0);
  const ItineraryReadout edge = itinerary_of({1.0, 1.0}, p, 10);
  CHECK(edge.symbols.empty());
  CHECK(edge.reason == StopReason::LeftDiamonds);

  const ItineraryReadout pole = itinerary_of(pole_location({3, -2}), p, 10);
  REQUIRE(pole.symbols.size() == 1);
  CHECK(pole.symbols[0] == PoleIndex{3, -2});
  CHECK(pole.reason == StopReason::PoleHit);

  CHECK(itinerary_of({0.1, 1.5}, p, 0).symbols.empty());
  CHECK(to_string(StopReason::Complete) == "complete");
  CHECK(to_string(StopReason::LeftDiamonds) == "left-diamonds");
  CHECK(to_string(StopReason::PoleHit) == "pole-hit");
}

TEST_CASE("pseudo-orbit forward check, 20 symbols") {
  for (const double lam : {1.0, 2.0}) {
    const MapParams p(lam);
    const double far = calibrated_far_radius(p);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const Itinerary s = random_itinerary(seed, far + kPi);
      const ForwardCheck f = forward_check(s, p, 20);
      CHECK(f.passed());
      CHECK(f.verified >= 20);
      CHECK(f.max_step_residual < 1e-9);
    }
  }
}

TEST_CASE("pseudo-orbit layout") {
  const MapParams p(2.0);
  const Itinerary s = random_itinerary(3, calibrated_far_radius(p) + kPi);
  const auto ys = pseudo_orbit(s, p, 12);
  REQUIRE(ys.size() == 13);
  CHECK(ys.back() == pole_location(s.at(12)));
  CHECK(ys.front() == point_from_itinerary(s, p, 12));
  for (std::size_t j = 0; j < 12; ++j) {
    const auto idx = containing_diamond(ys[j]);
    REQUIRE(idx);
    CHECK(*idx == s.at(j));
  }
}

TEST_CASE("Cauchy increments") {
  const MapParams p(2.0);
  const Itinerary s = random_itinerary(11, calibrated_far_radius(p) + kPi);
  const CauchyReport c = cauchy_increments(s, p, 1, 25);
  CHECK(c.bound_ok);
  CHECK(c.ratios_ok);
  CHECK(c.worst_ratio <= 0.6);
  REQUIRE(c.increments.size() == 24);
  // |x(25) - x(24)| under 2^(-23) pi.
  CHECK(c.increments.back() < std::ldexp(kPi, -23));
  for (std::size_t i = 0; i < c.increments.size(); ++i) {
    CHECK(c.increments[i] <= std::ldexp(kPi, 1 - static_cast<int>(c.first + i)));
  }
}

TEST_CASE("itinerary round trip on random tails") {
  const MapParams p(2.0);
  const double far = calibrated_far_radius(p);
  std::size_t naive_best = 0;
  for (std::uint64_t seed = 100; seed < 200; ++seed) {
    const ForwardCheck f = forward_check(random_itinerary(seed, far + kPi), p, 15);
    CHECK(f.passed());
    naive_best = std::max(naive_best, f.naive_depth);
  }
  CHECK(naive_best >= 3);
}

TEST_CASE("distinct itineraries give distinct points") {
  const MapParams p(2.0);
  const double far = calibrated_far_radius(p);
  std::vector<PlanePoint> pts;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    pts.push_back(point_from_itinerary(random_itinerary(seed, far + kPi), p));
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      CHECK(dist(pts[i], pts[j]) > 0.0);
    }
  }
  Itinerary a = random_itinerary(5, far + kPi);
  Itinerary b = a;
  b.prefix = {PoleIndex{1, 0}};
  a.prefix = {PoleIndex{0, 0}};
  CHECK(dist(point_from_itinerary(a, p), point_from_itinerary(b, p)) > 0.5);
}

TEST_CASE("periodic points on far cycles, lambda = 2") {
  const MapParams p(2.0);
  for (const std::size_t k : {1u, 3u, 7u}) {
    const PeriodicOrbit o = periodic_point_from_cycle({far_cycle(k)}, p);
    REQUIRE(o.points.size() == k);
    CHECK(o.stepwise_residual < 1e-9);
    for (std::size_t j = 0; j < k; ++j) {
      const auto idx = containing_diamond(o.points[j]);
      REQUIRE(idx);
      CHECK(*idx == o.cycle[j]);
    }
    if (k <= 3) {
      CHECK(o.naive_residual < 1e-6);
    }
  }
  // A single far pole: S_p has a fixed point in W(p), also a fixed point of F.
  const PeriodicOrbit one = periodic_point_from_cycle({far_cycle(1)}, p);
  CHECK(dist(*F_lambda_plane(one.point(), p), one.point()) < 1e-9);
}

TEST_CASE("periodic_point_from_cycle rejects near poles") {
  const MapParams p(2.0);
  CHECK_THROWS_AS((void)periodic_point_from_cycle({{{0, 0}}}, p), DomainError);
  CHECK_THROWS_AS((void)periodic_point_from_cycle({{{6, 6}, {1, 0}}}, p), DomainError);
  CHECK_THROWS((void)periodic_point_from_cycle({{}}, p));
}

TEST_CASE("periodic point near an escaping point") {
  const MapParams p(2.0);
  const PlanePoint v = point_from_itinerary(split_at_far_radius(geometric_itinerary(1.6, 1.5, 0.3), p), p);
  const NearEscapingResult r = periodic_near_escaping(v, 1e-3, p);
  CHECK(r.distance < 1e-3);
  CHECK(r.n_far >= 1);
  CHECK(r.orbit.cycle.size() == r.n_far + r.m_extra);
  CHECK(r.orbit.stepwise_residual < 1e-9);
}
