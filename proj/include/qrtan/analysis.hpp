#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "qrtan/core_maps.hpp"
#include "qrtan/plane_dynamics.hpp"
#include "qrtan/types.hpp"

namespace qrtan {

/// Unique positive solution of xi = lambda tanh xi. Requires lambda > 1.
[[nodiscard]] double solve_xi0(double lambda);

/// Smallest positive fixed point of x -> mu tan x, for 0 < mu < 1. Lies in (0, pi/2).
[[nodiscard]] double solve_phi(double mu);

/// rho(x, y, z) = max{|x|, |y|} / z for z > 0.
[[nodiscard]] double rho(const Vec3& v);

/// Radial bound of the petal sector of slope alpha (|alpha| <= 1):
/// min{pi/4, phi(lambda / sqrt(1 + alpha^2))}.
[[nodiscard]] double petal_bound(double alpha, double lambda);

/// Membership in the petal set Q = Q1 u Q2 for 0 < lambda < sqrt 2.
[[nodiscard]] bool q_contains(const PlanePoint& p, double lambda);

enum class Fate { ToUpperFixed, ToLowerFixed, ToOrigin, Escaping, PoleHit, Undecided };

[[nodiscard]] std::string_view to_string(Fate f);

struct FateRecord {
  Fate fate = Fate::Undecided;
  std::size_t iterations = 0;
  double residual = 0.0;  // distance to the target at capture, 0 otherwise
  ExtendedPoint witness;  // last iterate examined
};

struct ClassifyOptions {
  std::size_t max_iter = 500;
  double tol = 1e-6;
  std::size_t capture_steps = 3;   // consecutive steps within tol of a target
  std::size_t escape_steps = 8;    // K: consecutive growths of the diamond centre norm
  double escape_radius = 50.0;     // R_esc
};

/// Iterates T_lambda from v and classifies the orbit. Convergence to (0, 0, +-xi0)
/// or the origin needs `capture_steps` consecutive iterates within `tol`; escape
/// needs `escape_steps` consecutive strict increases of the visited pole norm on
/// the plane z = 0, ending with |orbit| > `escape_radius`.
[[nodiscard]] FateRecord classify_orbit(const Vec3& v, const MapParams& params, const ClassifyOptions& opts = {});

struct CheckSummary {
  std::size_t samples = 0;
  std::size_t violations = 0;
  double worst = 0.0;  // largest violation margin or residual, check dependent
  [[nodiscard]] bool passed() const { return samples > 0 && violations == 0; }
};

/// Boundary points of Q inside the open square, (x, alpha x) and (alpha y, y) with
/// |x| = phi(lambda / sqrt(1 + alpha^2)) < pi/4. `worst` is the largest
/// |T(p) - p|. Vacuous (zero samples) for lambda <= pi/4.
[[nodiscard]] CheckSummary petal_fixed_boundary_check(double lambda, std::size_t samples);

/// (T)_3 <= z - z^3/24 at lambda = 1 on uniform samples of
/// V = {max{|x|, |y|} < z/2 < eps}.
[[nodiscard]] CheckSummary parabolic_decrease_check(double eps, std::size_t samples, std::uint64_t seed);

/// Single-point form; throws DomainError when the point is not in V.
[[nodiscard]] bool parabolic_decrease_holds(const Vec3& v, double eps);

/// (T_lambda)_3 >= lambda tanh z - 1e-12 (and >= min{z, xi0} when lambda > 1) on
/// random points with 0 < z < z_max, covering even and odd tiles.
[[nodiscard]] CheckSummary third_component_bound_check(std::size_t samples, const MapParams& params,
                                                       std::uint64_t seed, double z_max = 5.0);

/// rho(T(v)) < rho(v) on random points of the upper half-space with M(x, y) != 0.
[[nodiscard]] CheckSummary rho_decrease_check(std::size_t samples, const MapParams& params, std::uint64_t seed);

enum class ProbeStatus { Covered, Omitted, NotCovered };

struct ProbeTarget {
  ExtendedPoint target;
  ProbeStatus status = ProbeStatus::NotCovered;
  std::size_t steps = 0;  // m with T^m(sample) within the hit radius
  double distance = 0.0;  // best distance reached
};

struct BlowupReport {
  std::size_t samples = 0;
  std::vector<ProbeTarget> targets;
};

struct BlowupOptions {
  std::size_t grid = 24;          // samples per axis of the cube enclosing the ball
  std::size_t max_steps = 6;
  double hit_radius = 0.05;
  std::size_t seeds = 12;         // best coarse samples refined per target and step
  std::size_t refine_levels = 40;  // zoom levels of the local 7^3 grid, halving each time
};

/// Forward sampling of a ball B(center, radius) in R^3 until the images pass
/// within `hit_radius` of each target: a coarse grid, then local grids zoomed
/// around the samples whose m-th image came closest. Targets at the omitted
/// values (0, 0, +-lambda) are reported as Omitted without being searched for.
[[nodiscard]] BlowupReport blowup_probe(const PlanePoint& center, double radius, const MapParams& params,
                                        std::span<const ExtendedPoint> targets, const BlowupOptions& opts = {});

}  // namespace qrtan
