#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "tickvol/cli.hpp"
#include "tickvol/io.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = tickvol::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void put(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path operator/(const std::string& s) const { return path / s; }
};

// Rows of a curve CSV keyed by column name.
std::vector<std::map<std::string, std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  std::vector<std::string> cols;
  std::stringstream hs(line);
  for (std::string c; std::getline(hs, c, ',');) cols.push_back(c);
  std::vector<std::map<std::string, std::string>> rows;
  while (std::getline(in, line)) {
    std::map<std::string, std::string> row;
    std::size_t start = 0;
    for (const auto& c : cols) {
      const auto end = line.find(',', start);
      row[c] = line.substr(start, end == std::string::npos ? std::string::npos : end - start);
      start = end == std::string::npos ? line.size() : end + 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

const char* kConstantSim = R"({"simulation": {
  "sigma2": {"kind": "constant", "value": 1.0},
  "intensity": {"kind": "constant", "value": 1.3},
  "horizon": 20000, "seed": 5}})";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("simulate is deterministic and writes a manifest") {
  TempDir d("tickvol_cli_sim");
  put(d / "cfg.json", kConstantSim);
  for (const char* name : {"a.csv", "b.csv"}) {
    const auto r = cli({"simulate", "--config", (d / "cfg.json").string(), "--out",
                        (d / name).string()});
    REQUIRE(r.code == tickvol::exit_ok);
  }
  CHECK(slurp(d / "a.csv") == slurp(d / "b.csv"));
  CHECK(fs::exists(d / "a.csv.manifest.json"));
  CHECK(slurp(d / "a.csv.manifest.json").find("\"seed\": 5") != std::string::npos);

  const auto other = cli({"simulate", "--config", (d / "cfg.json").string(), "--out",
                          (d / "c.csv").string(), "--seed", "6"});
  REQUIRE(other.code == 0);
  CHECK(slurp(d / "a.csv") != slurp(d / "c.csv"));
}

TEST_CASE("simulate on arrivals from a file keeps the arrival count") {
  TempDir d("tickvol_cli_arrivals");
  put(d / "arr.json", R"({"simulation": {
    "intensity": {"kind": "cosine_log", "a": 0, "k": 10}, "horizon": 23400, "seed": 3}})");
  REQUIRE(cli({"simulate", "--config", (d / "arr.json").string(), "--out",
               (d / "arrivals.csv").string()})
              .code == 0);
  const auto arrivals = tickvol::read_series_file(d / "arrivals.csv");

  put(d / "flat_vol.json", R"({"simulation": {
    "sigma2": {"kind": "constant", "value": 1.522997974471263e-08},
    "noise": {"omega": 0.001, "rounding": true}, "rescaled": false, "x0": 3.1, "seed": 8}})");
  put(d / "cosine_vol.json", R"({"simulation": {
    "sigma2": {"kind": "cosine_log", "a": -18, "k": 10},
    "noise": {"omega": 0.001, "rounding": true}, "rescaled": false, "x0": 3.1, "seed": 8}})");
  for (const char* cfg : {"flat_vol.json", "cosine_vol.json"}) {
    CAPTURE(cfg);
    const auto out = d / (std::string(cfg) + ".csv");
    const auto r = cli({"simulate", "--config", (d / cfg).string(), "--arrivals",
                        (d / "arrivals.csv").string(), "--out", out.string()});
    REQUIRE(r.code == 0);
    const auto s = tickvol::read_series_file(out);
    CHECK(s.size() == arrivals.size());
    CHECK(s.horizon() == arrivals.horizon());
    CHECK(std::equal(s.times().begin(), s.times().end(), arrivals.times().begin()));
  }
}

TEST_CASE("estimate on constant data: curves agree and logs add up") {
  TempDir d("tickvol_cli_est");
  put(d / "cfg.json", kConstantSim);
  REQUIRE(cli({"simulate", "--config", (d / "cfg.json").string(), "--out",
               (d / "ticks.csv").string()})
              .code == 0);
  put(d / "est.json", R"({"estimator": {"clock_bandwidth": 0.1, "intensity_bandwidth": 0.1,
    "block_size": 40, "convention": "rescaled"}})");
  const auto r = cli({"estimate", "--data", (d / "ticks.csv").string(), "--config",
                      (d / "est.json").string(), "--out", (d / "curves").string(),
                      "--grid-points", "9"});
  REQUIRE(r.code == 0);
  for (const char* f : {"intensity", "clock_pavg", "tick_pavg", "decomposed", "noise_var"}) {
    CHECK(fs::exists(d / "curves" / (std::string(f) + ".csv")));
  }
  CHECK(fs::exists(d / "curves" / "manifest.json"));

  const auto clock = read_csv(d / "curves" / "clock_pavg.csv");
  const auto dec = read_csv(d / "curves" / "decomposed.csv");
  const auto tick = read_csv(d / "curves" / "tick_pavg.csv");
  const auto lam = read_csv(d / "curves" / "intensity.csv");
  REQUIRE(clock.size() == 9);
  REQUIRE(dec.size() == 9);
  for (std::size_t i = 0; i < clock.size(); ++i) {
    CAPTURE(i);
    REQUIRE(clock[i].at("reason_code") == "ok");
    REQUIRE(dec[i].at("reason_code") == "ok");
    const double c = std::stod(clock[i].at("value"));
    const double v = std::stod(dec[i].at("value"));
    // Single path: both target 1.3 with roughly 15% relative noise at this bandwidth.
    CHECK(std::abs(c - 1.3) < 0.5);
    CHECK(std::abs(v - 1.3) < 0.5);
    CHECK(std::abs(c - v) < 0.4);
    const double lhs = std::stod(dec[i].at("log_value"));
    const double rhs = std::stod(tick[i].at("log_value")) + std::stod(lam[i].at("log_value"));
    CHECK(std::abs(lhs - rhs) <= 1e-12);
  }
}

TEST_CASE("estimate: flags override the config file") {
  TempDir d("tickvol_cli_flags");
  put(d / "cfg.json", kConstantSim);
  REQUIRE(cli({"simulate", "--config", (d / "cfg.json").string(), "--out",
               (d / "ticks.csv").string()})
              .code == 0);
  put(d / "est.json", R"({"estimator": {"block_size": 40, "clock_bandwidth": 0.1}})");
  REQUIRE(cli({"estimate", "--data", (d / "ticks.csv").string(), "--config",
               (d / "est.json").string(), "--out", (d / "c").string(), "--block-size", "20",
               "--estimators", "clock_pavg"})
              .code == 0);
  const auto m = slurp(d / "c" / "manifest.json");
  CHECK(m.find("\"block_size\": 20") != std::string::npos);
  CHECK(!fs::exists(d / "c" / "intensity.csv"));
}

TEST_CASE("input errors exit with status 2") {
  TempDir d("tickvol_cli_err");
  put(d / "empty.csv", "# tickvol-series horizon=100 clean=1\ntime,log_price\n");
  const auto r = cli({"estimate", "--data", (d / "empty.csv").string(), "--out",
                      (d / "o").string()});
  CHECK(r.code == tickvol::exit_input_error);
  CHECK(r.err.find("no ticks") != std::string::npos);

  put(d / "bad.json", R"({"simulation": {"horizn": 10}})");
  const auto b = cli({"simulate", "--config", (d / "bad.json").string(), "--out",
                      (d / "x.csv").string()});
  CHECK(b.code == 2);
  CHECK(b.err.find("horizn") != std::string::npos);
  CHECK(cli({"no-such-command"}).code == 2);
  CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("clean writes a series and a report") {
  TempDir d("tickvol_cli_clean");
  put(d / "raw.csv",
      "timestamp,price,condition\n34200,39.40,\n34210,39.41,\n34210,39.42,\n34210,39.40,\n"
      "34211,39.43,\n57600,39.40,\n57700,39.50,\n");
  const auto r = cli({"clean", "--input", (d / "raw.csv").string(), "--out",
                      (d / "clean.csv").string()});
  REQUIRE(r.code == 0);
  const auto s = tickvol::read_series_file(d / "clean.csv");
  CHECK(s.horizon() == 23400.0);
  CHECK(s.size() == 6);
  CHECK(s.times()[2] == 10.33);
  CHECK(slurp(d / "clean.csv.report.json").find("after_market") != std::string::npos);
}

TEST_CASE("validate: pass, falsified band, unknown name, empty selection") {
  const auto shipped = fs::path(TICKVOL_SOURCE_DIR) / "scenarios" / "registry.json";
  const auto pass = cli({"validate", "--registry", shipped.string(), "intensity_clt_constant"});
  CHECK(pass.code == tickvol::exit_ok);
  CHECK(pass.out.find("PASS intensity_clt_constant") != std::string::npos);

  TempDir d("tickvol_cli_validate");
  put(d / "reg.json", R"({"scenarios": [{"name": "zero_band", "estimator": "intensity",
    "simulation": {"intensity": {"kind": "constant", "value": 1.3}, "horizon": 2000},
    "estimator_config": {"intensity_bandwidth": 0.1}, "replications": 50,
    "check": {"kind": "variance_ratio", "lo": 0, "hi": 0}}]})");
  const auto fail = cli({"validate", "--registry", (d / "reg.json").string(), "zero_band",
                         "--report", (d / "rep.json").string()});
  CHECK(fail.code == tickvol::exit_validation_failed);
  CHECK(fail.out.find("FAIL zero_band") != std::string::npos);
  CHECK(fs::exists(d / "rep.json"));

  const auto unknown = cli({"validate", "--registry", (d / "reg.json").string(), "nope"});
  CHECK(unknown.code == tickvol::exit_input_error);
  CHECK(unknown.err.find("zero_band") != std::string::npos);

  const auto none = cli({"validate", "--registry", (d / "reg.json").string()});
  CHECK(none.code == 0);
  CHECK(!none.err.empty());
}

}  // TEST_SUITE
