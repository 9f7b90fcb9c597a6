#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <complex>
#include <numbers>

#include "qrtan/core_maps.hpp"
#include "test_support.hpp"

using namespace qrtan;
using test::dist;
using test::uniform;

namespace {
// Reference values from tests/oracles/derive.py (mpmath, 40 digits).
constexpr double kTanh1 = 0.76159415595576489;
constexpr double kTanPiOver8 = 0.41421356237309505;
constexpr double kXi0Lambda2 = 1.9150080481545375;

const MapParams kUnit(1.0);
}  // namespace

TEST_CASE("h_map examples") {
  CHECK(h_map(0.0, 0.0) == Vec3{0.0, 0.0, 1.0});
  CHECK(dist(h_map(kHalfPi, 0.0), Vec3{1.0, 0.0, 0.0}) < 1e-15);
  CHECK(dist(h_map(kQuarterPi, kQuarterPi), Vec3{0.5, 0.5, std::numbers::sqrt2 / 2.0}) < 1e-15);
  CHECK_THROWS_AS((void)h_map(2.0, 0.0), InputError);
}

TEST_CASE("h_map is a unit vector in the upper hemisphere") {
  auto g = test::rng(11);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 u = h_map(uniform(g, -kHalfPi, kHalfPi), uniform(g, -kHalfPi, kHalfPi));
    CHECK(std::fabs(u.norm() - 1.0) < 1e-12);
    CHECK(u.z >= 0.0);
  }
}

TEST_CASE("h_inverse examples and round trip") {
  const auto [x0, y0] = h_inverse({0.0, 0.0, 1.0});
  CHECK(x0 == 0.0);
  CHECK(y0 == 0.0);
  const auto [x1, y1] = h_inverse({1.0, 0.0, 0.0});
  CHECK(x1 == doctest::Approx(kHalfPi).epsilon(1e-15));
  CHECK(y1 == 0.0);
  CHECK_THROWS_AS((void)h_inverse({2.0, 0.0, 0.0}), InputError);
  CHECK_THROWS_AS((void)h_inverse({0.0, 0.0, -1.0}), InputError);

  auto g = test::rng(12);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    Vec3 u{uniform(g, -1, 1), uniform(g, -1, 1), uniform(g, 0, 1)};
    u = u * (1.0 / u.norm());
    const auto [x, y] = h_inverse(u);
    worst = std::max(worst, dist(h_map(x, y), u));
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("zorich examples") {
  CHECK(dist(zorich({0, 0, 0}), {0, 0, 1}) < 1e-15);
  CHECK(dist(zorich({0, 0, std::log(2.0)}), {0, 0, 2}) < 1e-15);
  CHECK(dist(zorich({kPi, 0, 0}), {0, 0, -1}) < 1e-15);
  CHECK_THROWS_AS((void)zorich({0, 0, 800}), OverflowError);
  auto g = test::rng(13);
  for (int i = 0; i < 200; ++i) {
    const Vec3 v{uniform(g, -10, 10), uniform(g, -10, 10), uniform(g, -5, 5)};
    CHECK(zorich(v).norm() == doctest::Approx(std::exp(v.z)).epsilon(1e-12));
  }
}

TEST_CASE("mobius_A and its inverse") {
  CHECK(mobius_A(Vec3{0, 0, 0}) == ExtendedPoint(Vec3{0, 0, -1}));
  CHECK(mobius_A(Vec3{0, 0, -1}).is_infinite());
  CHECK(dist(mobius_A(Vec3{1, 0, 0}).finite(), {1, 0, 0}) < 1e-15);
  CHECK(mobius_A(ExtendedPoint::infinity()) == ExtendedPoint(Vec3{0, 0, 1}));
  CHECK(mobius_A_inverse(Vec3{0, 0, 1}).is_infinite());
  CHECK(dist(mobius_A_inverse(Vec3{0, 0, -1}).finite(), {0, 0, 0}) < 1e-15);

  auto g = test::rng(14);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 p{uniform(g, -50, 50), uniform(g, -50, 50), uniform(g, -50, 50)};
    worst = std::max(worst, chordal_distance(mobius_A(mobius_A_inverse(p)), p));
  }
  CHECK(worst < 1e-10);

  // The plane goes to the unit sphere.
  for (int i = 0; i < 100; ++i) {
    const Vec3 p{uniform(g, -20, 20), uniform(g, -20, 20), 0.0};
    CHECK(std::fabs(mobius_A(p).finite().norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("invert_sphere") {
  CHECK(dist(invert_sphere({2, 0, 0}), {0.5, 0, 0}) < 1e-16);
  CHECK(dist(invert_sphere({0, 1, 0}), {0, 1, 0}) < 1e-16);
  CHECK(dist(invert_sphere({1, 1, 0}), {0.5, 0.5, 0}) < 1e-16);
  CHECK_THROWS_AS((void)invert_sphere({0, 0, 0}), InputError);
  const Vec3 v{1e200, -3e199, 2e200};
  CHECK(invert_sphere(v).norm() * v.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fold_to_beam examples") {
  const FoldResult a = fold_to_beam(0.1, -0.2);
  CHECK(a.folded == Vec3{0.1, -0.2, 0.0});
  CHECK(a.parity == Parity::Even);

  const FoldResult b = fold_to_beam(kHalfPi, 0.0);
  CHECK(std::fabs(b.folded.x) < 1e-15);
  CHECK(b.folded.y == 0.0);
  CHECK(b.parity == Parity::Odd);

  const FoldResult c = fold_to_beam(kHalfPi, kHalfPi);
  CHECK(std::fabs(c.folded.x) + std::fabs(c.folded.y) < 1e-15);
  CHECK(c.parity == Parity::Even);

  // Reflection plane x = pi/4: half-open tiles put it in the next tile, folded to pi/4.
  const FoldResult d = fold_to_beam(kQuarterPi, 0.0);
  CHECK(std::fabs(d.folded.x) == doctest::Approx(kQuarterPi));
  CHECK(d.parity == Parity::Odd);
}

TEST_CASE("fold_to_beam unfolds back and keeps z") {
  auto g = test::rng(15);
  for (int i = 0; i < 2000; ++i) {
    const Vec3 v{uniform(g, -100, 100), uniform(g, -100, 100), uniform(g, -5, 5)};
    const FoldResult f = fold_to_beam(v);
    CHECK(std::fabs(f.folded.x) <= kQuarterPi + 1e-12);
    CHECK(std::fabs(f.folded.y) <= kQuarterPi + 1e-12);
    CHECK(f.folded.z == v.z);
    CHECK(dist(unfold(f), v) < 1e-12);
  }
}

TEST_CASE("T_eval examples") {
  CHECK(dist(T_eval({0, 0, 1}, kUnit).finite(), {0, 0, kTanh1}) < 1e-15);
  CHECK(T_eval({0, kHalfPi, 0}, kUnit).is_infinite());
  CHECK(T_eval({kHalfPi, kHalfPi, 0}, kUnit).finite().norm() < 1e-15);
  CHECK(dist(T_eval({kPi / 8, 0, 0}, kUnit).finite(), {kTanPiOver8, 0, 0}) < 1e-15);
}

TEST_CASE("T_eval against frozen complex tangent values") {
  struct Case {
    double a, b, re, im;
  };
  // tan(a + ib) from tests/oracles/derive.py.
  const Case cases[] = {{0.3, 0.7, 0.18971709151908692, 0.63983593026318},
                        {-1.2, 0.4, -1.1256946121711862, 1.4800749292801748},
                        {2.5, -1.1, -0.19765234202503365, -0.91869326795150616},
                        {0.1, 3.0, 0.00098013587929296531, 0.99515260897528407}};
  for (const Case& c : cases) {
    CHECK(dist(T_eval({c.a, 0, c.b}, kUnit).finite(), {c.re, 0, c.im}) < 1e-14);
    CHECK(dist(T_eval({0, c.a, c.b}, kUnit).finite(), {0, c.re, c.im}) < 1e-14);
  }
}

TEST_CASE("tangent embedding against std::complex on random points") {
  auto g = test::rng(16);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double a = uniform(g, -10, 10);
    const double b = uniform(g, -10, 10);
    const auto t = std::tan(std::complex<double>(a, b));
    worst = std::max(worst, chordal_distance(T_eval({a, 0, b}, kUnit), Vec3{t.real(), 0, t.imag()}));
    worst = std::max(worst, chordal_distance(T_eval({0, a, b}, kUnit), Vec3{0, t.real(), t.imag()}));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("periodicity and reflection equivariance") {
  auto g = test::rng(17);
  const MapParams p(1.7);
  for (int i = 0; i < 10000; ++i) {
    const Vec3 v{uniform(g, -10, 10), uniform(g, -10, 10), uniform(g, -3, 3)};
    const ExtendedPoint t = T_eval(v, p);
    CHECK(chordal_distance(T_eval(v + Vec3{kPi, 0, 0}, p), t) < 1e-10);
    CHECK(chordal_distance(T_eval(v + Vec3{0, kPi, 0}, p), t) < 1e-10);
    if (t.is_finite()) {
      const Vec3 w = t.finite();
      CHECK(chordal_distance(T_eval({-v.x, v.y, v.z}, p), Vec3{-w.x, w.y, w.z}) < 1e-10);
      CHECK(chordal_distance(T_eval({v.x, -v.y, v.z}, p), Vec3{w.x, -w.y, w.z}) < 1e-10);
      CHECK(chordal_distance(T_eval({v.x, v.y, -v.z}, p), Vec3{w.x, w.y, -w.z}) < 1e-10);
    }
  }
}

TEST_CASE("folded beam formula agrees with lambda A(Z(2v))") {
  auto g = test::rng(18);
  const MapParams p(2.0);
  int checked = 0;
  while (checked < 10000) {
    const Vec3 v{uniform(g, -6, 6), uniform(g, -6, 6), uniform(g, -4, 4)};
    const FoldResult f = fold_to_beam(v);
    if (kQuarterPi - std::fabs(f.folded.x) < 1e-6 || kQuarterPi - std::fabs(f.folded.y) < 1e-6) {
      continue;
    }
    ++checked;
    CHECK(chordal_distance(T_eval(v, p), T_eval_composed(v, p)) < 1e-9);
  }
}

TEST_CASE("asymptotic values, half-space invariance, z-axis action") {
  auto g = test::rng(19);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 v{uniform(g, -5, 5), uniform(g, -5, 5), uniform(g, -8, 8)};
    const ExtendedPoint t = T_eval(v, kUnit);
    if (t.is_finite()) {
      CHECK(dist(t.finite(), {0, 0, 1}) > 0.0);
      CHECK(dist(t.finite(), {0, 0, -1}) > 0.0);
      if (v.z != 0.0) {
        CHECK(std::signbit(t.finite().z) == std::signbit(v.z));
      }
    }
    const double x = v.x;
    const double y = v.y;
    CHECK(dist(T_eval({x, y, 20}, kUnit).finite(), {0, 0, 1}) < 1e-8);
    CHECK(dist(T_eval({x, y, -20}, kUnit).finite(), {0, 0, -1}) < 1e-8);
  }
  for (const double lam : {0.5, 1.0, 2.0}) {
    for (double z = -6.0; z <= 6.0; z += 0.25) {
      CHECK(dist(T_eval({0, 0, z}, MapParams(lam)).finite(), {0, 0, lam * std::tanh(z)}) < 1e-12);
    }
  }
  // Deep in a half-space the horizontal part underflows rather than overflowing.
  const Vec3 far = T_eval({0.3, 0.2, 800}, kUnit).finite();
  CHECK(far.is_finite());
  CHECK(far.z == doctest::Approx(1.0));
}

TEST_CASE("iterate examples") {
  const Orbit a = iterate({0, 0, 0}, kUnit, 5);
  CHECK(a.points.size() == 5);
  CHECK_FALSE(a.hit_pole);
  for (const auto& p : a.points) {
    CHECK(p == ExtendedPoint(Vec3{0, 0, 0}));
  }
  const Orbit b = iterate({0, kHalfPi, 0}, kUnit, 3);
  CHECK(b.points.size() == 1);
  CHECK(b.hit_pole);
  CHECK(b.points.front().is_infinite());

  const Orbit c = iterate({0, 0, 0.5}, MapParams(2.0), 50);
  CHECK(c.points.size() == 50);
  CHECK(dist(c.points.back().finite(), {0, 0, kXi0Lambda2}) < 1e-9);

  CHECK_THROWS_AS((void)iterate({0, 0, 0}, kUnit, 0), InputError);
}

TEST_CASE("chordal distance") {
  CHECK(chordal_distance(ExtendedPoint::infinity(), ExtendedPoint::infinity()) == 0.0);
  CHECK(chordal_distance(Vec3{0, 0, 0}, ExtendedPoint::infinity()) == doctest::Approx(2.0));
  CHECK(chordal_distance(Vec3{1e300, 0, 0}, ExtendedPoint::infinity()) < 1e-299);
  CHECK(chordal_distance(Vec3{1, 0, 0}, Vec3{-1, 0, 0}) == doctest::Approx(2.0));
}

TEST_CASE("MapParams validation") {
  CHECK_THROWS_AS(MapParams(0.0), InputError);
  CHECK_THROWS_AS(MapParams(-1.0), InputError);
  CHECK_THROWS_AS(MapParams(std::nan("")), InputError);
}
