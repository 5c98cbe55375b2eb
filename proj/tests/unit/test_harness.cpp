#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gsc/errors.hpp"
#include "gsc/harness.hpp"
#include "gsc/util.hpp"

using namespace gsc;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("gsclab_test_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ExperimentConfig config_for(const TempDir& dir, const GscPattern& p) {
  std::ofstream(dir.path / "pattern.cfg") << format_pattern(p);
  ExperimentConfig c;
  c.pattern_path = dir.path / "pattern.cfg";
  c.output = dir.path / "out";
  c.resist.nmax = 2;
  c.resist.extra = 1;
  return c;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto c = parse_config(json::parse(R"({"seed": 7, "resist": {"nmax": 4, "mode": "cell"},
                                              "trace": {"m": [2, 3], "rho": 1.25}})"));
  CHECK(c.seed == 7);
  CHECK(c.resist.nmax == 4);
  CHECK(c.resist.mode == "cell");
  CHECK(c.trace.m == std::vector<int>{2, 3});
  CHECK(*c.trace.rho == 1.25);
  CHECK_FALSE(c.exit.rho.has_value());

  CHECK_THROWS_AS(parse_config(json::parse(R"({"bogus": 1})")), InputError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"resist": {"nmx": 4}})")), InputError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"resist": {"nmax": 40}})")), InputError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"resist": {"mode": "edge"}})")), InputError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"resist": {"nmax": "four"}})")), InputError);
  CHECK_THROWS_AS(parse_config(json::parse(R"({"extend": {"n": 1, "m": 1, "m_prime": 1}})")), InputError);

  // Round trip through the manifest form.
  const auto again = parse_config(c.to_json());
  CHECK(again.to_json() == c.to_json());
}

TEST_CASE("csv header and seeds") {
  CHECK(csv_header("resist") == std::string("# gsclab ") + GSC_VERSION + " resist\n");
  CHECK(extend_seed(1) != extend_seed(2));
  CHECK(trace_seed(1, 0) != trace_seed(1, 1));
  CHECK(trace_seed(1, 0) != extend_seed(1));
}

TEST_CASE("stage outputs") {
  const auto sc = GscPattern::standard_carpet();
  const auto v = stage_validate(sc);
  CHECK(v.csv.starts_with("# gsclab"));
  CHECK(v.summary["valid"].get<bool>());

  FacesParams fp;
  fp.list = true;
  const auto f = stage_faces(sc, fp);
  std::istringstream lines(f.csv);
  std::string line;
  int rows = -2;  // header + column names
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == 72);
  CHECK(f.csv.find("face_id,level,axis,plane,x0,x1\n") != std::string::npos);

  const auto d = stage_dims(sc, 1.25);
  CHECK(d.summary["m_I"] == 3);
  CHECK(d.summary["d_I_minus_d_f_plus_d_w"].get<double>() > 0.5);

  ResistParams rp;
  rp.nmax = 2;
  rp.extra = 1;
  const auto r = stage_resist(sc, rp, true);
  CHECK(r.csv.find(",0\n") != std::string::npos);  // zeroed seconds column
  CHECK(r.summary["complete"].get<bool>());
}

TEST_CASE("run: validation failure names the axiom") {
  TempDir dir("corners");
  const auto corners = GscPattern::from_removed(2, 3, {{0, 1}, {1, 0}, {1, 1}, {1, 2}, {2, 1}});
  auto c = config_for(dir, corners);
  CHECK(run("resist", c) == exit_code::validation);
  const auto m = json::parse(slurp(c.output / "resist.manifest.json"));
  CHECK_FALSE(m["complete"].get<bool>());
  CHECK(m["error"].get<std::string>().find("Connectedness") != std::string::npos);
  CHECK_FALSE(fs::exists(c.output / "resist.csv"));
}

TEST_CASE("run: bad inputs") {
  TempDir dir("bad");
  auto c = config_for(dir, GscPattern::standard_carpet());
  CHECK(run("nonsense", c) == exit_code::input);
  c.pattern_path = dir.path / "missing.cfg";
  CHECK(run("validate", c) == exit_code::input);
}

TEST_CASE("run: resist, manifest and cache replay") {
  TempDir dir("resist");
  auto c = config_for(dir, GscPattern::standard_carpet());
  c.cache = dir.path / "cache";
  REQUIRE(run("resist", c) == exit_code::ok);
  const auto csv = slurp(c.output / "resist.csv");
  const auto manifest = json::parse(slurp(c.output / "resist.manifest.json"));
  CHECK(manifest["complete"].get<bool>());
  CHECK(manifest["version"] == GSC_VERSION);
  CHECK(manifest["pattern"]["hash"] == GscPattern::standard_carpet().hash());
  const auto& stages = manifest["stages"];
  REQUIRE(stages.size() == 2);
  CHECK(stages[1]["name"] == "resist");
  CHECK(stages[1]["sha256"] == sha256_hex(csv));
  CHECK(manifest["estimates"]["rho_hat"] == stages[1]["summary"]["rho_hat"]);

  // Second run replays the cache byte for byte.
  fs::remove_all(c.output);
  REQUIRE(run("resist", c) == exit_code::ok);
  CHECK(slurp(c.output / "resist.csv") == csv);
  std::size_t cached = 0;
  for (const auto& e : fs::directory_iterator(c.cache)) cached += e.path().extension() == ".csv";
  CHECK(cached == 2);  // validate + resist
}

TEST_CASE("run: downstream stages use the recorded rho") {
  TempDir dir("exit");
  auto c = config_for(dir, GscPattern::standard_carpet());
  c.exit.nmax = 2;
  c.exit.extra = 1;
  REQUIRE(run("exit", c) == exit_code::ok);
  const auto m = json::parse(slurp(c.output / "exit.manifest.json"));
  double rho_exit = 0;
  for (const auto& s : m["stages"])
    if (s["name"] == "exit") rho_exit = s["summary"]["rho_used"].get<double>();
  CHECK(rho_exit == m["estimates"]["rho_hat"].get<double>());

  c.exit.rho = 1.5;
  REQUIRE(run("exit", c) == exit_code::ok);
  const auto m2 = json::parse(slurp(c.output / "exit.manifest.json"));
  CHECK(m2["stages"].back()["summary"]["rho_used"].get<double>() == 1.5);
  CHECK(m2["stages"].size() == 2);  // no resist stage when overridden
}

TEST_CASE("run: size limit maps to its exit code") {
  TempDir dir("size");
  auto c = config_for(dir, GscPattern::standard_carpet());
  c.decay.m = 8;
  c.decay.m_prime = 8;
  CHECK(run("decay", c) == exit_code::resources);
}
