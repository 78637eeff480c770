#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "anosov/diagnostics.hpp"
#include "anosov/pipeline.hpp"

using namespace anosov;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs(ANOSOV_CONFIG_DIR);
const fs::path kOut(ANOSOV_TEST_OUT);

int exit_status(int raw) {
#ifdef WEXITSTATUS
  return WEXITSTATUS(raw);
#else
  return raw;
#endif
}

int lab(const std::string& args) {
  fs::create_directories(kOut);
  std::string cmd = std::string("\"") + ANOSOV_LAB_BIN + "\" " + args + " > \"" + (kOut / "last.log").string() + "\" 2>&1";
  return exit_status(std::system(cmd.c_str()));
}

int run(const std::string& cmd, const fs::path& config, const fs::path& out, const std::string& extra = "") {
  return lab(cmd + " --config \"" + config.string() + "\" --out \"" + out.string() + "\" -q " + extra);
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

fs::path write_config(const std::string& name, const json& j) {
  fs::create_directories(kOut);
  fs::path p = kOut / name;
  std::ofstream(p) << j.dump(2);
  return p;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  FAIL("missing column " << name);
  return 0;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("exit codes") {
    CHECK(run("certify", kConfigs / "tau3_punctured_sphere.json", kOut / "tau3") == kExitPass);
    CHECK(run("certify", kConfigs / "rho_t_counterexample.json", kOut / "rho_t") == kExitFail);

    json big = read_json(kConfigs / "rho_0_anosov.json");
    big["diagnostics"]["L"] = 30;
    CHECK(run("gaps", write_config("rho0_L30.json", big), kOut / "big") == kExitInput);

    json bad = read_json(kConfigs / "tau3_punctured_sphere.json");
    bad["group"]["generators"][0] = {2, 0, 0, 2};
    CHECK(run("gaps", write_config("invalid.json", bad), kOut / "bad") == kExitInput);
    CHECK(run("gaps", kOut / "no-such-file.json", kOut / "bad") == kExitInput);
    CHECK(lab("frobnicate") == kExitInput);
    CHECK(lab("gaps --config") == kExitInput);
  }

  TEST_CASE("reports are deterministic") {
    const fs::path cfg = kConfigs / "tau3_punctured_sphere.json";
    REQUIRE(run("gaps", cfg, kOut / "det1") == kExitPass);
    REQUIRE(run("gaps", cfg, kOut / "det2", "--jobs 4") == kExitPass);
    json a = read_json(kOut / "det1" / "report.json");
    json b = read_json(kOut / "det2" / "report.json");
    CHECK(a.at("payload_hash") == b.at("payload_hash"));
    CHECK(payload_hash(a) == a.at("payload_hash").get<std::string>());
    a.erase("run");
    b.erase("run");
    CHECK(a == b);
  }

  TEST_CASE("gap table reproduces the reported fit") {
    const fs::path out = kOut / "csv";
    REQUIRE(run("gaps", kConfigs / "tau3_punctured_sphere.json", out) == kExitPass);
    auto rows = read_csv(out / "tables" / "gaps.csv");
    REQUIRE(rows.size() > 10);
    std::size_t cx = column(rows[0], "displacement"), cy = column(rows[0], "singular_gap_1");
    std::vector<double> x, y;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      x.push_back(std::stod(rows[i][cx]));
      y.push_back(std::stod(rows[i][cy]));
    }
    FitResult f = fit_bounds(x, y);
    json reported = read_json(out / "report.json").at("gaps").at("per_k").at(0).at("singular").at("fit");
    CHECK(reported.at("n").get<std::size_t>() == f.n);
    for (const auto& [key, v] : {std::pair{"lower_slope", f.lower_slope}, std::pair{"lower_intercept", f.lower_intercept},
                                 std::pair{"upper_slope", f.upper_slope}, std::pair{"upper_intercept", f.upper_intercept},
                                 std::pair{"ls_slope", f.ls_slope}}) {
      CAPTURE(key);
      CHECK(std::abs(reported.at(key).get<double>() - v) <= 1e-12);
    }
  }

  TEST_CASE("second run hits the sample cache") {
    const fs::path out = kOut / "cache";
    fs::remove_all(out);
    const fs::path cfg = kConfigs / "tau3_punctured_sphere.json";
    REQUIRE(run("gaps", cfg, out) == kExitPass);
    json first = read_json(out / "report.json");
    CHECK(first.at("run").at("cache") == "miss");
    REQUIRE(run("gaps", cfg, out) == kExitPass);
    json second = read_json(out / "report.json");
    CHECK(second.at("run").at("cache") == "hit");
    CHECK(first.at("payload_hash") == second.at("payload_hash"));
  }
}
