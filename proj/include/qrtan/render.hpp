#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "qrtan/analysis.hpp"
#include "qrtan/types.hpp"

namespace qrtan {

struct Window {
  double x0 = -kQuarterPi;
  double y0 = -kQuarterPi;
  double x1 = 3.0 * kQuarterPi;
  double y1 = 3.0 * kQuarterPi;
};

struct RenderConfig {
  double lambda = 0.9;
  Window window;
  std::size_t width = 256;
  std::size_t height = 256;
  std::size_t max_iter = 500;
  double tol = 1e-6;
  double escape_radius = 50.0;
  std::size_t escape_steps = 8;
  unsigned threads = 0;  // 0: hardware concurrency

  /// Throws InputError for a non-positive resolution, degenerate window or bad lambda.
  void validate() const;
  [[nodiscard]] ClassifyOptions classify_options() const;
};

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  constexpr bool operator==(const Rgb&) const = default;
};

struct ImageBuffer {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> rgb;  // row-major, top row first

  ImageBuffer() = default;
  ImageBuffer(std::size_t w, std::size_t h) : width(w), height(h), rgb(w * h * 3, 0) {}

  [[nodiscard]] Rgb at(std::size_t col, std::size_t row) const;
  void set(std::size_t col, std::size_t row, Rgb c);
};

/// Centre of pixel (col, row); row 0 is the top edge, y grows upward.
[[nodiscard]] PlanePoint pixel_center(const RenderConfig& cfg, std::size_t col, std::size_t row);

/// Range of capture times used for shading.
struct CaptureRange {
  std::size_t lo = 0;
  std::size_t hi = 1;
};

/// Colour of a classified plane orbit: the origin's basin shades from dark blue
/// (fast capture) through yellow to red on a log scale of the capture time
/// within `range`.
[[nodiscard]] Rgb basin_color(const FateRecord& rec, CaptureRange range);

[[nodiscard]] ImageBuffer render_basin(const RenderConfig& cfg);

/// Per-pixel escape depth: the first n >= 0 with |F^n(p)| > escape_radius while
/// F^n(p) lies in a pole diamond, or with F^n(p) = infinity; -1 when none is
/// found within max_iter.
[[nodiscard]] std::vector<std::int32_t> escape_depth_map(const RenderConfig& cfg);

[[nodiscard]] std::int32_t escape_depth(const PlanePoint& p, const MapParams& params, std::size_t max_iter,
                                        double escape_radius);

[[nodiscard]] Rgb depth_color(std::int32_t depth, std::size_t max_iter);

[[nodiscard]] ImageBuffer render_escape_depth(const RenderConfig& cfg);

/// Fraction of entries with a finite depth.
[[nodiscard]] double finite_depth_fraction(const std::vector<std::int32_t>& depths);

/// "P6\n<w> <h>\n255\n" followed by the RGB bytes.
[[nodiscard]] std::string encode_ppm(const ImageBuffer& img);

/// Throws std::runtime_error when the file cannot be written.
void write_ppm(const std::string& path, const ImageBuffer& img);

}  // namespace qrtan
