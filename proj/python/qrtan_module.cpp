#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <tuple>

#include "qrtan/analysis.hpp"
#include "qrtan/itineraries.hpp"
#include "qrtan/render.hpp"
#include "qrtan/verify.hpp"

namespace py = pybind11;
using namespace qrtan;

namespace {

using Point3 = std::tuple<double, double, double>;

std::optional<Point3> to_py(const ExtendedPoint& p) {
  if (p.is_infinite()) {
    return std::nullopt;
  }
  const Vec3& v = p.finite();
  return Point3{v.x, v.y, v.z};
}

std::vector<PoleIndex> to_poles(const std::vector<std::pair<std::int64_t, std::int64_t>>& in) {
  std::vector<PoleIndex> out;
  for (const auto& [m, n] : in) {
    out.push_back({m, n});
  }
  return out;
}

RenderConfig make_config(double lambda, std::tuple<double, double, double, double> window, std::size_t width,
                         std::size_t height, std::size_t max_iter, double tol, unsigned threads) {
  RenderConfig cfg;
  cfg.lambda = lambda;
  cfg.window = {std::get<0>(window), std::get<1>(window), std::get<2>(window), std::get<3>(window)};
  cfg.width = width;
  cfg.height = height;
  cfg.max_iter = max_iter;
  cfg.tol = tol;
  cfg.threads = threads;
  return cfg;
}

py::array_t<std::uint8_t> to_array(const ImageBuffer& img) {
  py::array_t<std::uint8_t> out({img.height, img.width, std::size_t{3}});
  std::copy(img.rgb.begin(), img.rgb.end(), out.mutable_data());
  return out;
}

const auto kDefaultWindow = std::make_tuple(-kQuarterPi, -kQuarterPi, 3.0 * kQuarterPi, 3.0 * kQuarterPi);

}  // namespace

PYBIND11_MODULE(qrtan, m) {
  m.doc() = "Dynamics of the quasiregular tangent map T_lambda";

  m.def(
      "T", [](double x, double y, double z, double lambda) { return to_py(T_eval({x, y, z}, MapParams(lambda))); },
      py::arg("x"), py::arg("y"), py::arg("z"), py::arg("lam") = 1.0,
      "T_lambda(x, y, z); None stands for the point at infinity.");

  m.def(
      "orbit",
      [](Point3 start, double lambda, std::size_t n) {
        const Orbit o = iterate({std::get<0>(start), std::get<1>(start), std::get<2>(start)}, MapParams(lambda), n);
        std::vector<std::optional<Point3>> out;
        for (const ExtendedPoint& p : o.points) {
          out.push_back(to_py(p));
        }
        return out;
      },
      py::arg("start"), py::arg("lam"), py::arg("n"));

  m.def(
      "F", [](double x, double y, double lambda) { return to_py(F_lambda_eval({x, y}, MapParams(lambda))); },
      py::arg("x"), py::arg("y"), py::arg("lam"));

  m.def("solve_xi0", &solve_xi0, py::arg("lam"));
  m.def("solve_phi", &solve_phi, py::arg("mu"));
  m.def(
      "rho", [](double x, double y, double z) { return rho({x, y, z}); }, py::arg("x"), py::arg("y"), py::arg("z"));
  m.def(
      "q_contains", [](double x, double y, double lambda) { return q_contains({x, y}, lambda); }, py::arg("x"),
      py::arg("y"), py::arg("lam"));

  m.def(
      "classify",
      [](Point3 v, double lambda, std::size_t max_iter, double tol) {
        ClassifyOptions opts;
        opts.max_iter = max_iter;
        opts.tol = tol;
        const FateRecord r =
            classify_orbit({std::get<0>(v), std::get<1>(v), std::get<2>(v)}, MapParams(lambda), opts);
        return std::make_tuple(std::string(to_string(r.fate)), r.iterations);
      },
      py::arg("v"), py::arg("lam"), py::arg("max_iter") = 500, py::arg("tol") = 1e-6,
      "Orbit fate name and the iteration at which it was decided.");

  m.def(
      "pole_location",
      [](std::int64_t pm, std::int64_t pn) {
        const PlanePoint p = pole_location({pm, pn});
        return std::make_tuple(p.x, p.y);
      },
      py::arg("m"), py::arg("n"));
  m.def(
      "containing_diamond",
      [](double x, double y) -> std::optional<std::pair<std::int64_t, std::int64_t>> {
        if (const auto idx = containing_diamond({x, y})) {
          return std::make_pair(idx->m, idx->n);
        }
        return std::nullopt;
      },
      py::arg("x"), py::arg("y"));
  m.def(
      "inverse_branch",
      [](std::pair<std::int64_t, std::int64_t> q, std::optional<std::pair<double, double>> w, double lambda) {
        const MapParams params(lambda);
        const PoleIndex idx{q.first, q.second};
        const PlanePoint s = w ? inverse_branch(idx, PlanePoint{w->first, w->second}, params)
                               : inverse_branch(idx, ExtendedPoint::infinity(), params);
        return std::make_tuple(s.x, s.y);
      },
      py::arg("q"), py::arg("w"), py::arg("lam"), "S_q(w); pass w = None for infinity.");

  m.def(
      "itinerary",
      [](double x, double y, double lambda, std::size_t n) {
        const ItineraryReadout r = itinerary_of({x, y}, MapParams(lambda), n);
        std::vector<std::pair<std::int64_t, std::int64_t>> syms;
        for (const PoleIndex& p : r.symbols) {
          syms.emplace_back(p.m, p.n);
        }
        return std::make_tuple(syms, std::string(to_string(r.reason)));
      },
      py::arg("x"), py::arg("y"), py::arg("lam"), py::arg("n"));

  m.def(
      "periodic_point",
      [](const std::vector<std::pair<std::int64_t, std::int64_t>>& cycle, double lambda) {
        const PeriodicOrbit o = periodic_point_from_cycle({to_poles(cycle)}, MapParams(lambda));
        py::dict d;
        std::vector<std::pair<double, double>> pts;
        for (const PlanePoint& p : o.points) {
          pts.emplace_back(p.x, p.y);
        }
        d["points"] = pts;
        d["stepwise_residual"] = o.stepwise_residual;
        d["naive_residual"] = o.naive_residual;
        d["iterations"] = o.iterations;
        return d;
      },
      py::arg("cycle"), py::arg("lam"));

  m.def(
      "render_basin",
      [](double lambda, std::tuple<double, double, double, double> window, std::size_t width, std::size_t height,
         std::size_t max_iter, double tol, unsigned threads) {
        const RenderConfig cfg = make_config(lambda, window, width, height, max_iter, tol, threads);
        ImageBuffer img;
        {
          py::gil_scoped_release release;
          img = render_basin(cfg);
        }
        return to_array(img);
      },
      py::arg("lam") = 0.9, py::arg("window") = kDefaultWindow, py::arg("width") = 256, py::arg("height") = 256,
      py::arg("max_iter") = 500, py::arg("tol") = 1e-6, py::arg("threads") = 0,
      "Basin image as a (height, width, 3) uint8 array, top row first.");

  m.def(
      "escape_depths",
      [](double lambda, std::tuple<double, double, double, double> window, std::size_t width, std::size_t height,
         std::size_t max_iter, unsigned threads) {
        const RenderConfig cfg = make_config(lambda, window, width, height, max_iter, 1e-6, threads);
        std::vector<std::int32_t> d;
        {
          py::gil_scoped_release release;
          d = escape_depth_map(cfg);
        }
        py::array_t<std::int32_t> out({height, width});
        std::copy(d.begin(), d.end(), out.mutable_data());
        return out;
      },
      py::arg("lam") = 2.0, py::arg("window") = kDefaultWindow, py::arg("width") = 256, py::arg("height") = 256,
      py::arg("max_iter") = 200, py::arg("threads") = 0, "Escape depth per pixel, -1 when none was found.");

  m.def(
      "encode_ppm",
      [](py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast> rgb) {
        if (rgb.ndim() != 3 || rgb.shape(2) != 3) {
          throw InputError("encode_ppm: expected a (height, width, 3) array");
        }
        ImageBuffer img(static_cast<std::size_t>(rgb.shape(1)), static_cast<std::size_t>(rgb.shape(0)));
        std::copy(rgb.data(), rgb.data() + img.rgb.size(), img.rgb.begin());
        return py::bytes(encode_ppm(img));
      },
      py::arg("rgb"));

  m.def(
      "verify",
      [](const std::string& suite, double lambda, std::uint64_t seed) {
        std::vector<std::tuple<std::string, bool, std::string>> out;
        for (const CheckLine& l : run_suite(suite, MapParams(lambda), seed)) {
          out.emplace_back(l.name, l.passed, l.detail);
        }
        return out;
      },
      py::arg("suite") = "all", py::arg("lam") = 2.0, py::arg("seed") = 1,
      "Property checks as (name, passed, detail) tuples.");
}
