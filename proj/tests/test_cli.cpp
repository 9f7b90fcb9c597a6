#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "qrtan/cli.hpp"

using namespace qrtan;
using nlohmann::json;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::initializer_list<const char*> args) {
  std::vector<const char*> argv{"qrtan"};
  argv.insert(argv.end(), args.begin(), args.end());
  std::ostringstream out;
  std::ostringstream err;
  Run r;
  r.code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<json> ndjson(const std::string& text) {
  std::vector<json> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    out.push_back(json::parse(line));
  }
  return out;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("usage errors exit 2") {
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"bogus"}).code == kExitUsage);
  CHECK(run({"orbit"}).code == kExitUsage);  // --start missing
  CHECK(run({"orbit", "--start", "1,2"}).code == kExitUsage);
  CHECK(run({"orbit", "--start", "a,b,c"}).code == kExitUsage);
  CHECK(run({"orbit", "--start", "1,2,3", "--lambda", "-1"}).code == kExitUsage);
  CHECK(run({"render-basin", "--out", "x.ppm", "--res", "12"}).code == kExitUsage);
  CHECK(run({"render-basin", "--out", "x.ppm", "--window", "0,0,0,1"}).code == kExitUsage);
  CHECK(run({"render-basin"}).code == kExitUsage);  // --out missing
  CHECK(run({"solve-xi0", "--lambda", "0.5"}).code == kExitUsage);
  CHECK(run({"verify", "--suite", "nope"}).code == kExitUsage);
  CHECK(run({"periodic", "--cycle", "6-6"}).code == kExitUsage);
  CHECK_FALSE(run({"bogus"}).err.empty());
}

TEST_CASE("help exits 0") {
  const Run r = run({"--help"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("render-basin") != std::string::npos);
}

TEST_CASE("solve-xi0") {
  const Run r = run({"solve-xi0", "--lambda", "2"});
  CHECK(r.code == kExitOk);
  CHECK(r.out == "1.91500804815\n");
}

TEST_CASE("orbit NDJSON") {
  const Run r = run({"orbit", "--lambda", "2", "--start", "0.3,0.2,0.1", "--n", "4"});
  REQUIRE(r.code == kExitOk);
  const auto lines = ndjson(r.out);
  REQUIRE(lines.size() == 6);
  CHECK(lines[0]["type"] == "config");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    CHECK(lines[i]["n"] == i - 1);
    CHECK(lines[i].contains("x"));
    CHECK(lines[i].contains("z"));
  }
  CHECK(lines[1]["x"] == 0.3);

  const Run pole = run({"orbit", "--lambda", "2", "--start", "0,1.5707963267948966,0", "--n", "3"});
  const auto pl = ndjson(pole.out);
  REQUIRE(pl.size() >= 3);
  CHECK(pl[2]["inf"] == true);
  CHECK(pl[2]["n"] == 1);
}

TEST_CASE("orbit to a file") {
  const auto path = std::filesystem::temp_directory_path() / "qrtan_test_orbit.ndjson";
  const std::string s = path.string();
  const Run r = run({"orbit", "--start", "0.1,0.1,0.1", "--n", "2", "--out", s.c_str()});
  CHECK(r.code == kExitOk);
  CHECK(ndjson(slurp(path)).size() == 4);
  std::filesystem::remove(path);
}

TEST_CASE("itinerary") {
  const Run r = run({"itinerary", "--lambda", "2", "--start", "0.1,1.5", "--n", "5"});
  REQUIRE(r.code == kExitOk);
  const auto lines = ndjson(r.out);
  REQUIRE(lines.size() >= 3);
  CHECK(lines[1]["pole"]["m"] == 0);
  CHECK(lines[1]["pole"]["n"] == 0);
  CHECK(lines.back().contains("stop"));
}

TEST_CASE("periodic") {
  const Run r = run({"periodic", "--lambda", "2", "--cycle", "6:6,-5:7,3:-9"});
  REQUIRE(r.code == kExitOk);
  const auto lines = ndjson(r.out);
  CHECK(lines.back()["period"] == 3);
  CHECK(lines.back()["stepwise_residual"].get<double>() < 1e-9);
  CHECK(run({"periodic", "--lambda", "2", "--cycle", "0:0"}).code == kExitUsage);
}

TEST_CASE("render-basin writes a P6 file") {
  const auto path = std::filesystem::temp_directory_path() / "qrtan_test_basin.ppm";
  const std::string s = path.string();
  const Run r = run({"render-basin", "--lambda", "0.9", "--res", "16x8", "--threads", "2", "--out", s.c_str()});
  REQUIRE(r.code == kExitOk);
  const std::string bytes = slurp(path);
  const std::string header = "P6\n16 8\n255\n";
  CHECK(bytes.substr(0, header.size()) == header);
  CHECK(bytes.size() == header.size() + 16 * 8 * 3);
  CHECK(json::parse(r.out)["res"][0] == 16);
  std::filesystem::remove(path);
}

TEST_CASE("render-escape") {
  const auto path = std::filesystem::temp_directory_path() / "qrtan_test_escape.ppm";
  const std::string s = path.string();
  const Run r = run({"render-escape", "--res", "8x8", "--max-iter", "20", "--out", s.c_str()});
  REQUIRE(r.code == kExitOk);
  CHECK(json::parse(r.out).contains("finite_fraction"));
  std::filesystem::remove(path);
  CHECK(run({"render-escape", "--res", "8x8", "--out", "/nonexistent-dir/x.ppm"}).code == kExitFailure);
}

TEST_CASE("verify") {
  const Run ok = run({"verify", "--lambda", "2", "--suite", "core"});
  CHECK(ok.code == kExitOk);
  CHECK(ok.out.find("PASS core.tangent-embedding") != std::string::npos);
  // The branch-contraction bound does not hold at lambda = 2.
  const Run plane = run({"verify", "--lambda", "2", "--suite", "plane"});
  CHECK(plane.code == kExitFailure);
  CHECK(plane.out.find("FAIL plane.branch-contraction") != std::string::npos);
}
