#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "qrtan/analysis.hpp"
#include "qrtan/itineraries.hpp"
#include "qrtan/plane_dynamics.hpp"
#include "qrtan/render.hpp"
#include "qrtan/types.hpp"

namespace qrtan {

struct CheckLine {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Max chordal error of T(a, 0, b) and T(0, a, b) against std::tan(a + ib),
/// lambda = 1, (a, b) uniform in [-range, range]^2.
[[nodiscard]] double tangent_embedding_error(std::size_t samples, std::uint64_t seed, double range = 10.0);

struct SymmetryErrors {
  double periodicity = 0.0;  // T(v + pi e_x), T(v + pi e_y) against T(v)
  double reflection = 0.0;   // T(R v) against R T(v) for the three coordinate reflections
};

[[nodiscard]] SymmetryErrors symmetry_errors(std::size_t samples, std::uint64_t seed, const MapParams& params);

struct FateTally {
  std::size_t samples = 0;
  std::size_t matched = 0;
  std::size_t max_iterations = 0;
  [[nodiscard]] bool all() const { return samples > 0 && matched == samples; }
};

/// Orbits of random points with |z| > 0.01 (z > 0.01 when lambda > 1) against the
/// fate predicted for their half-space: ToUpperFixed for lambda > 1, ToOrigin
/// for lambda < 1.
[[nodiscard]] FateTally half_space_fates(const MapParams& params, std::size_t samples, std::uint64_t seed,
                                         std::size_t max_iter = 500);

/// Random points of the square (-pi/4, pi/4)^2 inside Q, classified as plane orbits.
[[nodiscard]] FateTally petal_fates(const MapParams& params, std::size_t samples, std::uint64_t seed);

/// Random points of L = {(x, +-x + k pi)}, classified as plane orbits.
[[nodiscard]] FateTally lattice_line_fates(const MapParams& params, std::size_t samples, std::uint64_t seed);

struct SingularValueScan {
  std::size_t samples = 0;
  double min_sigma = 0.0;
  PlanePoint argmin;
  std::size_t below = 0;  // samples under the threshold
};

/// Singular values of DF_lambda at random points of [-pi, pi]^2 off the non-smooth set.
[[nodiscard]] SingularValueScan singular_value_scan(const MapParams& params, std::size_t samples,
                                                    std::uint64_t seed, double threshold);

struct ContractionScan {
  double worst = 0.0;
  PoleIndex worst_q;
  PoleIndex worst_p;
};

/// Largest branch_contraction ratio over q, p in the 3 x 3 block of poles around
/// (m, n) = (0, 0), with `pairs` random pairs of W(p) each.
[[nodiscard]] ContractionScan contraction_scan(const MapParams& params, std::size_t pairs, std::uint64_t seed);

/// Smallest pole_neighborhood_expansion ratio on the calibrated eps balls of the
/// same 9 poles.
[[nodiscard]] double expansion_scan(const MapParams& params, std::size_t pairs, std::uint64_t seed);

struct RoundTripScan {
  std::size_t samples = 0;
  double max_error = 0.0;     // chordal |F(S_q(w)) - w|
  bool infinity_exact = true;  // S_q(inf) == pole(q) bit for bit
};

/// F_lambda o S_q on random targets of [-30, 30]^2 inside the branch domain, for
/// each of the 9 poles.
[[nodiscard]] RoundTripScan inverse_round_trip_scan(const MapParams& params, std::size_t per_pole,
                                                    std::uint64_t seed);

/// Far poles used for the periodic-point checks: a cycle of `length` distinct poles.
[[nodiscard]] std::vector<PoleIndex> far_cycle(std::size_t length);

/// Byte comparison of two basin renders of the same configuration with
/// different thread counts; returns the FNV-1a hash of the first.
struct DeterminismReport {
  bool identical = false;
  std::uint64_t hash = 0;
};

[[nodiscard]] DeterminismReport basin_determinism(RenderConfig cfg, unsigned threads_a, unsigned threads_b);

[[nodiscard]] std::uint64_t fnv1a(const std::vector<std::uint8_t>& bytes);

[[nodiscard]] std::vector<std::string> suite_names();

/// Runs the named suite ("core", "analysis", "plane", "itineraries", "render" or
/// "all") at the given lambda. Throws InputError for an unknown suite.
[[nodiscard]] std::vector<CheckLine> run_suite(const std::string& suite, const MapParams& params, std::uint64_t seed);

}  // namespace qrtan
