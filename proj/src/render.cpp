#include "qrtan/render.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "qrtan/plane_dynamics.hpp"

namespace qrtan {

namespace {

struct Stop {
  double t;
  Rgb c;
};

Rgb ramp(double t, std::initializer_list<Stop> stops) {
  t = std::clamp(t, 0.0, 1.0);
  const Stop* prev = stops.begin();
  for (const Stop* s = stops.begin() + 1; s != stops.end(); ++s) {
    if (t <= s->t) {
      const double u = (s->t > prev->t) ? (t - prev->t) / (s->t - prev->t) : 0.0;
      auto mix = [u](std::uint8_t a, std::uint8_t b) {
        return static_cast<std::uint8_t>(std::lround(a + u * (static_cast<double>(b) - a)));
      };
      return {mix(prev->c.r, s->c.r), mix(prev->c.g, s->c.g), mix(prev->c.b, s->c.b)};
    }
    prev = s;
  }
  return prev->c;
}

double log_scale(std::size_t n, std::size_t max_iter) {
  return std::log1p(static_cast<double>(n)) / std::log1p(static_cast<double>(std::max<std::size_t>(max_iter, 1)));
}

double log_scale(std::size_t n, CaptureRange range) {
  const std::size_t span = range.hi > range.lo ? range.hi - range.lo : 1;
  return log_scale(n > range.lo ? n - range.lo : 0, span);
}

unsigned thread_count(unsigned requested, std::size_t rows) {
  unsigned n = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(rows, 1)));
}

// Runs body(row) for every row; rows are claimed from a shared counter and each
// row writes only its own output, so the schedule cannot change the result.
template <typename Body>
void for_each_row(std::size_t rows, unsigned threads, Body body) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t row = next.fetch_add(1); row < rows; row = next.fetch_add(1)) {
      body(row);
    }
  };
  if (threads <= 1) {
    worker();
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back(worker);
  }
  for (auto& th : pool) {
    th.join();
  }
}

}  // namespace

void RenderConfig::validate() const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InputError("render: lambda must be positive");
  }
  if (width == 0 || height == 0) {
    throw InputError("render: resolution must be positive");
  }
  if (!(window.x1 > window.x0) || !(window.y1 > window.y0) || !std::isfinite(window.x1 - window.x0) ||
      !std::isfinite(window.y1 - window.y0)) {
    throw InputError("render: window must be non-degenerate");
  }
  if (max_iter == 0) {
    throw InputError("render: max_iter must be at least 1");
  }
  if (!(tol > 0.0)) {
    throw InputError("render: tol must be positive");
  }
}

ClassifyOptions RenderConfig::classify_options() const {
  ClassifyOptions o;
  o.max_iter = max_iter;
  o.tol = tol;
  o.escape_radius = escape_radius;
  o.escape_steps = escape_steps;
  return o;
}

Rgb ImageBuffer::at(std::size_t col, std::size_t row) const {
  const std::size_t i = (row * width + col) * 3;
  return {rgb.at(i), rgb.at(i + 1), rgb.at(i + 2)};
}

void ImageBuffer::set(std::size_t col, std::size_t row, Rgb c) {
  const std::size_t i = (row * width + col) * 3;
  rgb.at(i) = c.r;
  rgb.at(i + 1) = c.g;
  rgb.at(i + 2) = c.b;
}

PlanePoint pixel_center(const RenderConfig& cfg, std::size_t col, std::size_t row) {
  const Window& w = cfg.window;
  const double fx = (static_cast<double>(col) + 0.5) / static_cast<double>(cfg.width);
  const double fy = (static_cast<double>(row) + 0.5) / static_cast<double>(cfg.height);
  return {w.x0 + fx * (w.x1 - w.x0), w.y1 - fy * (w.y1 - w.y0)};
}

Rgb basin_color(const FateRecord& rec, CaptureRange range) {
  switch (rec.fate) {
    case Fate::ToOrigin:
      return ramp(log_scale(rec.iterations, range),
                  {{0.0, {8, 16, 96}}, {0.35, {40, 110, 220}}, {0.7, {250, 220, 70}}, {1.0, {200, 30, 30}}});
    case Fate::ToUpperFixed:
      return ramp(log_scale(rec.iterations, range), {{0.0, {10, 80, 20}}, {1.0, {160, 240, 160}}});
    case Fate::ToLowerFixed:
      return ramp(log_scale(rec.iterations, range), {{0.0, {80, 10, 80}}, {1.0, {240, 160, 240}}});
    case Fate::Escaping:
      return {235, 235, 235};
    case Fate::PoleHit:
      return {255, 255, 255};
    case Fate::Undecided:
      return {0, 0, 0};
  }
  return {0, 0, 0};
}

ImageBuffer render_basin(const RenderConfig& cfg) {
  cfg.validate();
  const MapParams params(cfg.lambda);
  const ClassifyOptions opts = cfg.classify_options();
  std::vector<FateRecord> fates(cfg.width * cfg.height);
  for_each_row(cfg.height, thread_count(cfg.threads, cfg.height), [&](std::size_t row) {
    for (std::size_t col = 0; col < cfg.width; ++col) {
      fates[row * cfg.width + col] = classify_orbit(pixel_center(cfg, col, row).lift(), params, opts);
    }
  });
  CaptureRange range{cfg.max_iter, 0};
  for (const FateRecord& f : fates) {
    if (f.fate == Fate::ToOrigin || f.fate == Fate::ToUpperFixed || f.fate == Fate::ToLowerFixed) {
      range.lo = std::min(range.lo, f.iterations);
      range.hi = std::max(range.hi, f.iterations);
    }
  }
  ImageBuffer img(cfg.width, cfg.height);
  for (std::size_t i = 0; i < fates.size(); ++i) {
    img.set(i % cfg.width, i / cfg.width, basin_color(fates[i], range));
  }
  return img;
}

std::int32_t escape_depth(const PlanePoint& p, const MapParams& params, std::size_t max_iter, double escape_radius) {
  PlanePoint cur = p;
  for (std::size_t n = 0; n <= max_iter; ++n) {
    if (cur.norm() > escape_radius && containing_diamond(cur)) {
      return static_cast<std::int32_t>(n);
    }
    if (n == max_iter) {
      break;
    }
    const auto next = F_lambda_plane(cur, params);
    if (!next) {
      return static_cast<std::int32_t>(n + 1);
    }
    cur = *next;
  }
  return -1;
}

std::vector<std::int32_t> escape_depth_map(const RenderConfig& cfg) {
  cfg.validate();
  const MapParams params(cfg.lambda);
  std::vector<std::int32_t> depths(cfg.width * cfg.height, -1);
  for_each_row(cfg.height, thread_count(cfg.threads, cfg.height), [&](std::size_t row) {
    for (std::size_t col = 0; col < cfg.width; ++col) {
      depths[row * cfg.width + col] = escape_depth(pixel_center(cfg, col, row), params, cfg.max_iter, cfg.escape_radius);
    }
  });
  return depths;
}

Rgb depth_color(std::int32_t depth, std::size_t max_iter) {
  if (depth < 0) {
    return {0, 0, 0};
  }
  return ramp(log_scale(static_cast<std::size_t>(depth), max_iter),
              {{0.0, {255, 250, 220}}, {0.3, {250, 170, 40}}, {0.6, {190, 40, 60}}, {1.0, {40, 10, 70}}});
}

ImageBuffer render_escape_depth(const RenderConfig& cfg) {
  const std::vector<std::int32_t> depths = escape_depth_map(cfg);
  ImageBuffer img(cfg.width, cfg.height);
  for (std::size_t row = 0; row < cfg.height; ++row) {
    for (std::size_t col = 0; col < cfg.width; ++col) {
      img.set(col, row, depth_color(depths[row * cfg.width + col], cfg.max_iter));
    }
  }
  return img;
}

double finite_depth_fraction(const std::vector<std::int32_t>& depths) {
  if (depths.empty()) {
    return 0.0;
  }
  const auto finite = std::count_if(depths.begin(), depths.end(), [](std::int32_t d) { return d >= 0; });
  return static_cast<double>(finite) / static_cast<double>(depths.size());
}

std::string encode_ppm(const ImageBuffer& img) {
  if (img.rgb.size() != img.width * img.height * 3) {
    throw InputError("encode_ppm: buffer size does not match the dimensions");
  }
  std::string out = "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(img.rgb.data()), img.rgb.size());
  return out;
}

void write_ppm(const std::string& path, const ImageBuffer& img) {
  const std::string bytes = encode_ppm(img);
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    throw std::runtime_error("write_ppm: cannot open " + path);
  }
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) {
    throw std::runtime_error("write_ppm: write failed for " + path);
  }
}

}  // namespace qrtan
