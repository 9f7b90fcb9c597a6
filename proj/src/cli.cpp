#include "qrtan/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qrtan/analysis.hpp"
#include "qrtan/core_maps.hpp"
#include "qrtan/itineraries.hpp"
#include "qrtan/render.hpp"
#include "qrtan/verify.hpp"

namespace qrtan {

namespace {

using json = nlohmann::json;

std::vector<double> parse_reals(const std::string& text, std::size_t expected, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || !std::isfinite(v)) {
      throw InputError(flag + ": cannot parse '" + item + "' as a real number");
    }
    out.push_back(v);
  }
  if (out.size() != expected) {
    throw InputError(flag + ": expected " + std::to_string(expected) + " comma-separated values");
  }
  return out;
}

std::pair<std::size_t, std::size_t> parse_resolution(const std::string& text) {
  const auto x = text.find('x');
  try {
    if (x != std::string::npos) {
      std::size_t a = 0;
      std::size_t b = 0;
      const long w = std::stol(text.substr(0, x), &a);
      const long h = std::stol(text.substr(x + 1), &b);
      if (a == x && b == text.size() - x - 1 && w > 0 && h > 0) {
        return {static_cast<std::size_t>(w), static_cast<std::size_t>(h)};
      }
    }
  } catch (const std::exception&) {
  }
  throw InputError("--res: expected WxH with positive integers, got '" + text + "'");
}

std::vector<PoleIndex> parse_cycle(const std::string& text) {
  std::vector<PoleIndex> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    try {
      if (colon != std::string::npos) {
        std::size_t a = 0;
        std::size_t b = 0;
        const long long m = std::stoll(item.substr(0, colon), &a);
        const long long n = std::stoll(item.substr(colon + 1), &b);
        if (a == colon && b == item.size() - colon - 1) {
          out.push_back({m, n});
          continue;
        }
      }
    } catch (const std::exception&) {
    }
    throw InputError("--cycle: expected m:n entries separated by commas, got '" + item + "'");
  }
  if (out.empty()) {
    throw InputError("--cycle: empty cycle");
  }
  return out;
}

// Writes to --out when given, otherwise to the command's standard output.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) {
        throw std::runtime_error("cannot open " + path + " for writing");
      }
      stream_ = file_.get();
    }
  }
  void line(const json& j) { *stream_ << j.dump() << '\n'; }
  std::ostream& stream() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

json pole_json(PoleIndex p) { return {{"m", p.m}, {"n", p.n}}; }

struct RenderFlags {
  double lambda = 0.9;
  std::string window = "-0.78539816339744828,-0.78539816339744828,2.3561944901923448,2.3561944901923448";
  std::string res = "256x256";
  std::size_t max_iter = 500;
  double tol = 1e-6;
  std::string out;
  unsigned threads = 0;
};

void add_render_flags(CLI::App* cmd, RenderFlags& f) {
  cmd->add_option("--lambda", f.lambda, "Map parameter lambda > 0")->capture_default_str();
  cmd->add_option("--window", f.window,
                  "Plane window x0,y0,x1,y1; pixel centres are sampled and y increases upward")
      ->capture_default_str();
  cmd->add_option("--res", f.res, "Resolution WxH")->capture_default_str();
  cmd->add_option("--max-iter", f.max_iter, "Iteration cap per pixel")->capture_default_str();
  cmd->add_option("--tol", f.tol, "Capture tolerance")->capture_default_str();
  cmd->add_option("--out", f.out, "Output PPM (P6) file")->required();
  cmd->add_option("--threads", f.threads, "Worker threads, 0 for all cores")->capture_default_str();
}

RenderConfig to_config(const RenderFlags& f) {
  RenderConfig cfg;
  cfg.lambda = f.lambda;
  const auto w = parse_reals(f.window, 4, "--window");
  cfg.window = {w[0], w[1], w[2], w[3]};
  std::tie(cfg.width, cfg.height) = parse_resolution(f.res);
  cfg.max_iter = f.max_iter;
  cfg.tol = f.tol;
  cfg.threads = f.threads;
  cfg.validate();
  return cfg;
}

json config_json(const std::string& command, const RenderConfig& cfg) {
  return {{"type", "config"},
          {"command", command},
          {"lambda", cfg.lambda},
          {"window", {cfg.window.x0, cfg.window.y0, cfg.window.x1, cfg.window.y1}},
          {"res", {cfg.width, cfg.height}},
          {"max_iter", cfg.max_iter},
          {"tol", cfg.tol}};
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dynamics of the quasiregular tangent map T_lambda"};
  app.name("qrtan");
  app.require_subcommand(1);

  RenderFlags basin_flags;
  auto* basin = app.add_subcommand("render-basin", "Colour plane points by orbit fate");
  add_render_flags(basin, basin_flags);

  RenderFlags escape_flags;
  escape_flags.lambda = 2.0;
  escape_flags.max_iter = 200;
  auto* escape = app.add_subcommand("render-escape", "Colour plane points by escape depth");
  add_render_flags(escape, escape_flags);

  double orbit_lambda = 2.0;
  std::string orbit_start;
  std::size_t orbit_n = 100;
  std::string orbit_out;
  auto* orbit = app.add_subcommand("orbit", "Print an orbit of T_lambda as NDJSON");
  orbit->add_option("--lambda", orbit_lambda, "Map parameter lambda > 0")->capture_default_str();
  orbit->add_option("--start", orbit_start, "Start point x,y,z")->required();
  orbit->add_option("--n", orbit_n, "Number of steps")->capture_default_str();
  orbit->add_option("--out", orbit_out, "NDJSON output file (default stdout)");

  double itin_lambda = 2.0;
  std::string itin_start;
  std::size_t itin_n = 20;
  std::string itin_out;
  auto* itin = app.add_subcommand("itinerary", "Read off the pole itinerary of a plane point");
  itin->add_option("--lambda", itin_lambda, "Map parameter lambda > 0")->capture_default_str();
  itin->add_option("--start", itin_start, "Plane point x,y")->required();
  itin->add_option("--n", itin_n, "Maximum number of symbols")->capture_default_str();
  itin->add_option("--out", itin_out, "NDJSON output file (default stdout)");

  double per_lambda = 2.0;
  std::string per_cycle = "6:6";
  std::string per_near;
  double per_eta = 1e-3;
  std::string per_out;
  auto* periodic = app.add_subcommand("periodic", "Periodic point for a pole cycle, or near an escaping point");
  periodic->add_option("--lambda", per_lambda, "Map parameter lambda > 0")->capture_default_str();
  periodic->add_option("--cycle", per_cycle, "Pole cycle m:n,m:n,...")->capture_default_str();
  periodic->add_option("--near", per_near, "Escaping plane point x,y; overrides --cycle");
  periodic->add_option("--eta", per_eta, "Target distance for --near")->capture_default_str();
  periodic->add_option("--out", per_out, "NDJSON output file (default stdout)");

  double xi_lambda = 2.0;
  auto* xi = app.add_subcommand("solve-xi0", "Positive solution of xi = lambda tanh xi");
  xi->add_option("--lambda", xi_lambda, "Map parameter lambda > 1")->capture_default_str();

  double ver_lambda = 2.0;
  std::string ver_suite = "all";
  std::uint64_t ver_seed = 1;
  auto* verify = app.add_subcommand("verify", "Run the property checks");
  verify->add_option("--lambda", ver_lambda, "Map parameter lambda > 0")->capture_default_str();
  verify->add_option("--suite", ver_suite, "core, analysis, plane, itineraries, render or all")
      ->capture_default_str();
  verify->add_option("--seed", ver_seed, "Sampling seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (basin->parsed() || escape->parsed()) {
      const bool is_basin = basin->parsed();
      const RenderConfig cfg = to_config(is_basin ? basin_flags : escape_flags);
      json summary = config_json(is_basin ? "render-basin" : "render-escape", cfg);
      if (is_basin) {
        write_ppm(basin_flags.out, render_basin(cfg));
      } else {
        const std::vector<std::int32_t> depths = escape_depth_map(cfg);
        ImageBuffer img(cfg.width, cfg.height);
        for (std::size_t i = 0; i < depths.size(); ++i) {
          img.set(i % cfg.width, i / cfg.width, depth_color(depths[i], cfg.max_iter));
        }
        write_ppm(escape_flags.out, img);
        summary["finite_fraction"] = finite_depth_fraction(depths);
      }
      summary["out"] = is_basin ? basin_flags.out : escape_flags.out;
      out << summary.dump() << '\n';
      return kExitOk;
    }

    if (orbit->parsed()) {
      const MapParams params(orbit_lambda);
      const auto s = parse_reals(orbit_start, 3, "--start");
      if (orbit_n == 0) {
        throw InputError("--n: must be at least 1");
      }
      Sink sink(orbit_out, out);
      sink.line({{"type", "config"}, {"command", "orbit"}, {"lambda", orbit_lambda}, {"start", s}, {"n", orbit_n}});
      const Vec3 start{s[0], s[1], s[2]};
      sink.line({{"n", 0}, {"x", start.x}, {"y", start.y}, {"z", start.z}});
      const Orbit o = iterate(start, params, orbit_n);
      for (std::size_t i = 0; i < o.points.size(); ++i) {
        const ExtendedPoint& p = o.points[i];
        if (p.is_infinite()) {
          sink.line({{"n", i + 1}, {"inf", true}});
        } else {
          const Vec3& v = p.finite();
          sink.line({{"n", i + 1}, {"x", v.x}, {"y", v.y}, {"z", v.z}});
        }
      }
      return kExitOk;
    }

    if (itin->parsed()) {
      const MapParams params(itin_lambda);
      const auto s = parse_reals(itin_start, 2, "--start");
      Sink sink(itin_out, out);
      sink.line({{"type", "config"}, {"command", "itinerary"}, {"lambda", itin_lambda}, {"start", s}, {"n", itin_n}});
      const ItineraryReadout r = itinerary_of({s[0], s[1]}, params, itin_n);
      for (std::size_t j = 0; j < r.symbols.size(); ++j) {
        const PlanePoint c = pole_location(r.symbols[j]);
        sink.line({{"step", j}, {"pole", pole_json(r.symbols[j])}, {"center", {c.x, c.y}}});
      }
      sink.line({{"stop", std::string(to_string(r.reason))}, {"terms", r.symbols.size()}});
      return kExitOk;
    }

    if (periodic->parsed()) {
      const MapParams params(per_lambda);
      Sink sink(per_out, out);
      PeriodicOrbit po;
      json header{{"type", "config"}, {"command", "periodic"}, {"lambda", per_lambda}};
      json extra;
      if (!per_near.empty()) {
        const auto v = parse_reals(per_near, 2, "--near");
        header["near"] = v;
        header["eta"] = per_eta;
        const NearEscapingResult ne = periodic_near_escaping({v[0], v[1]}, per_eta, params);
        po = ne.orbit;
        extra = {{"distance", ne.distance}, {"N", ne.n_far}, {"M", ne.m_extra}};
      } else {
        header["cycle"] = per_cycle;
        po = periodic_point_from_cycle({parse_cycle(per_cycle)}, params);
      }
      sink.line(header);
      for (std::size_t j = 0; j < po.points.size(); ++j) {
        sink.line({{"step", j}, {"pole", pole_json(po.cycle[j])}, {"x", po.points[j].x}, {"y", po.points[j].y}});
      }
      json summary{{"period", po.cycle.size()},
                   {"iterations", po.iterations},
                   {"stepwise_residual", po.stepwise_residual},
                   {"naive_residual", std::isfinite(po.naive_residual) ? json(po.naive_residual) : json("inf")}};
      if (!extra.is_null()) {
        summary.update(extra);
      }
      sink.line(summary);
      return kExitOk;
    }

    if (xi->parsed()) {
      out << std::setprecision(12) << solve_xi0(xi_lambda) << '\n';
      return kExitOk;
    }

    if (verify->parsed()) {
      const std::vector<CheckLine> lines = run_suite(ver_suite, MapParams(ver_lambda), ver_seed);
      std::size_t passed = 0;
      for (const CheckLine& l : lines) {
        out << (l.passed ? "PASS " : "FAIL ") << l.name << ": " << l.detail << '\n';
        passed += l.passed ? 1 : 0;
      }
      out << "summary: " << passed << " / " << lines.size() << " checks passed (lambda = " << ver_lambda << ")\n";
      return passed == lines.size() ? kExitOk : kExitFailure;
    }
  } catch (const InputError& e) {
    err << "qrtan: " << e.what() << '\n' << "Run with --help for usage.\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "qrtan: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "qrtan: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace qrtan
