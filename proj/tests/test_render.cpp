#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qrtan/render.hpp"
#include "qrtan/verify.hpp"
#include "test_support.hpp"

using namespace qrtan;
using test::dist;

namespace {
constexpr Rgb kEscapingGrey{235, 235, 235};
constexpr Rgb kWhite{255, 255, 255};
constexpr Rgb kBlack{0, 0, 0};

RenderConfig small(double lambda, unsigned threads) {
  RenderConfig cfg;
  cfg.lambda = lambda;
  cfg.width = 48;
  cfg.height = 40;
  cfg.threads = threads;
  return cfg;
}
}  // namespace

TEST_CASE("pixel_center") {
  RenderConfig cfg;
  cfg.window = {0.0, 0.0, 4.0, 2.0};
  cfg.width = 4;
  cfg.height = 2;
  CHECK(dist(pixel_center(cfg, 0, 0), {0.5, 1.5}) < 1e-15);
  CHECK(dist(pixel_center(cfg, 3, 1), {3.5, 0.5}) < 1e-15);
  CHECK(dist(pixel_center(cfg, 3, 0), {3.5, 1.5}) < 1e-15);
}

TEST_CASE("config validation") {
  RenderConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.width = 0;
  CHECK_THROWS_AS(cfg.validate(), InputError);
  cfg = RenderConfig{};
  cfg.window = {1.0, 0.0, 1.0, 2.0};
  CHECK_THROWS_AS(cfg.validate(), InputError);
  cfg = RenderConfig{};
  cfg.window = {0.0, 2.0, 1.0, 1.0};
  CHECK_THROWS_AS(cfg.validate(), InputError);
  cfg = RenderConfig{};
  cfg.lambda = -1.0;
  CHECK_THROWS_AS(cfg.validate(), InputError);
  cfg = RenderConfig{};
  cfg.max_iter = 0;
  CHECK_THROWS_AS(cfg.validate(), InputError);
  cfg = RenderConfig{};
  CHECK_THROWS_AS((void)render_basin([&] {
                    RenderConfig c;
                    c.height = 0;
                    return c;
                  }()),
                  InputError);
}

TEST_CASE("basin colours") {
  FateRecord r;
  r.fate = Fate::Escaping;
  CHECK(basin_color(r, {}) == kEscapingGrey);
  r.fate = Fate::PoleHit;
  CHECK(basin_color(r, {}) == kWhite);
  r.fate = Fate::Undecided;
  CHECK(basin_color(r, {}) == kBlack);
  r.fate = Fate::ToOrigin;
  r.iterations = 10;
  const Rgb fast = basin_color(r, {10, 1000});
  r.iterations = 1000;
  const Rgb slow = basin_color(r, {10, 1000});
  CHECK_FALSE(fast == slow);
  CHECK(fast.b > fast.r);
  CHECK(slow.r > slow.b);
}

TEST_CASE("PPM encoding") {
  ImageBuffer img(3, 2);
  img.set(0, 0, {1, 2, 3});
  img.set(2, 1, {250, 251, 252});
  CHECK(img.at(0, 0) == Rgb{1, 2, 3});
  const std::string ppm = encode_ppm(img);
  const std::string header = "P6\n3 2\n255\n";
  REQUIRE(ppm.size() == header.size() + 18);
  CHECK(ppm.substr(0, header.size()) == header);
  CHECK(static_cast<unsigned char>(ppm[header.size()]) == 1);
  CHECK(static_cast<unsigned char>(ppm.back()) == 252);

  const auto path = std::filesystem::temp_directory_path() / "qrtan_test_render.ppm";
  write_ppm(path.string(), img);
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == ppm);
  std::filesystem::remove(path);
  CHECK_THROWS(write_ppm("/nonexistent-dir/x.ppm", img));
}

TEST_CASE("basin render is deterministic across thread counts") {
  for (const double lam : {0.9, 1.1107}) {
    const ImageBuffer a = render_basin(small(lam, 1));
    const ImageBuffer b = render_basin(small(lam, 3));
    const ImageBuffer c = render_basin(small(lam, 1));
    CHECK(a.rgb == b.rgb);
    CHECK(a.rgb == c.rgb);
    CHECK(a.width == 48);
    CHECK(a.height == 40);
  }
  CHECK(basin_determinism(small(0.9, 0), 1, 4).identical);
}

TEST_CASE("petal pixels are coloured as the origin's basin, lambda = 0.9") {
  RenderConfig cfg = small(0.9, 1);
  const ImageBuffer img = render_basin(cfg);
  std::size_t checked = 0;
  for (std::size_t row = 0; row < cfg.height; ++row) {
    for (std::size_t col = 0; col < cfg.width; ++col) {
      if (!q_contains(pixel_center(cfg, col, row), 0.9)) {
        continue;
      }
      ++checked;
      const Rgb c = img.at(col, row);
      CHECK_FALSE(c == kEscapingGrey);
      CHECK_FALSE(c == kWhite);
      CHECK_FALSE(c == kBlack);
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("escape depth") {
  const MapParams p(2.0);
  CHECK(escape_depth(pole_location({0, 0}), p, 10, 50.0) == 1);
  CHECK(escape_depth({100.0, 0.1}, p, 10, 50.0) == 0);
  CHECK(escape_depth({0.1, 0.05}, MapParams(0.5), 50, 50.0) == -1);
  CHECK(finite_depth_fraction({-1, 0, 3, -1}) == 0.5);
  CHECK(finite_depth_fraction({}) == 0.0);

  RenderConfig cfg = small(2.0, 2);
  cfg.max_iter = 30;
  const auto d1 = escape_depth_map(cfg);
  cfg.threads = 1;
  CHECK(escape_depth_map(cfg) == d1);
  CHECK(d1.size() == cfg.width * cfg.height);
  const ImageBuffer img = render_escape_depth(cfg);
  CHECK(img.rgb.size() == cfg.width * cfg.height * 3);
  CHECK_FALSE(depth_color(-1, 30) == depth_color(0, 30));
}
