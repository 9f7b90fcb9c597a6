#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <variant>

namespace qrtan {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kHalfPi = kPi / 2.0;
inline constexpr double kQuarterPi = kPi / 4.0;

// Error taxonomy. Input and domain errors are caller mistakes; overflow and
// internal errors are raised by the library itself.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

class InternalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  constexpr bool operator==(const Vec3&) const = default;

  [[nodiscard]] constexpr double norm_sq() const { return x * x + y * y + z * z; }
  [[nodiscard]] double norm() const { return std::hypot(x, y, z); }
  [[nodiscard]] bool is_finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }
};

inline constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

/// Point of the plane z = 0, identified with (x, y, 0).
struct PlanePoint {
  double x = 0.0;
  double y = 0.0;

  constexpr PlanePoint operator+(const PlanePoint& o) const { return {x + o.x, y + o.y}; }
  constexpr PlanePoint operator-(const PlanePoint& o) const { return {x - o.x, y - o.y}; }
  constexpr PlanePoint operator*(double s) const { return {x * s, y * s}; }
  constexpr bool operator==(const PlanePoint&) const = default;

  [[nodiscard]] double norm() const { return std::hypot(x, y); }
  [[nodiscard]] constexpr Vec3 lift() const { return {x, y, 0.0}; }
};

struct Infinity {
  constexpr bool operator==(const Infinity&) const = default;
};

/// A point of R^3 together with the point at infinity.
class ExtendedPoint {
 public:
  constexpr ExtendedPoint() : value_(Vec3{}) {}
  constexpr ExtendedPoint(const Vec3& v) : value_(v) {}  // NOLINT(google-explicit-constructor)
  constexpr ExtendedPoint(Infinity) : value_(Infinity{}) {}  // NOLINT(google-explicit-constructor)

  static constexpr ExtendedPoint infinity() { return ExtendedPoint(Infinity{}); }

  [[nodiscard]] constexpr bool is_infinite() const {
    return std::holds_alternative<Infinity>(value_);
  }
  [[nodiscard]] constexpr bool is_finite() const { return !is_infinite(); }

  /// Finite payload; throws InputError on the point at infinity.
  [[nodiscard]] const Vec3& finite() const {
    if (is_infinite()) {
      throw InputError("ExtendedPoint: point at infinity has no finite coordinates");
    }
    return std::get<Vec3>(value_);
  }

  constexpr bool operator==(const ExtendedPoint&) const = default;

 private:
  std::variant<Vec3, Infinity> value_;
};

/// Chordal distance on R^3 with infinity (stereographic chord length, at most 2).
[[nodiscard]] double chordal_distance(const ExtendedPoint& p, const ExtendedPoint& q);

struct MapParams {
  double lambda = 1.0;

  explicit MapParams(double lambda_ = 1.0) : lambda(lambda_) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
      throw InputError("MapParams: lambda must be a positive finite number");
    }
  }
};

/// Max-norm of the horizontal part, max{|x|, |y|}.
[[nodiscard]] inline double max_abs(double x, double y) { return std::fmax(std::fabs(x), std::fabs(y)); }

std::string to_string(const ExtendedPoint& p);

}  // namespace qrtan
