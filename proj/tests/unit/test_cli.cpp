#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <omp.h>

#include "doctest.h"
#include "json.hpp"
#include "potts/cli.hpp"
#include "potts/error.hpp"

using namespace potts;
using namespace potts::cli;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("potts_cli_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "potts");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return dispatch(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("sha256 of a known file") {
  const fs::path d = fresh_dir("sha");
  std::ofstream(d / "abc.txt", std::ios::binary) << "abc";
  CHECK(sha256_file((d / "abc.txt").string()) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK_THROWS(sha256_file((d / "missing").string()));
}

TEST_CASE("format_number") {
  CHECK(format_number(0.125, 10) == "0.125");
  CHECK(format_number(1.0 / 3.0, 4) == "0.3333");
}

TEST_CASE("verify suites") {
  const auto names = suite_names();
  CHECK(names.size() == 5);
  CHECK_THROWS_AS(verify_suite("nope"), ParameterError);
  const VerifyReport r = verify_suite("duality");
  CHECK(r.passed);
  CHECK(r.checks.size() == 3);
  const json j = to_json(r);
  CHECK(j["suite"] == "duality");
  CHECK(j["passed"] == true);
  for (const auto& c : j["checks"]) {
    CHECK(c.contains("name"));
    CHECK(c["measured"].get<double>() <= c["tolerance"].get<double>());
  }
}

TEST_CASE("usage errors exit 2") {
  const fs::path d = fresh_dir("usage");
  CHECK(run({"--out-dir", d.string(), "simulate", "--n", "4", "--beta", "1"}) == kExitUsage);
  CHECK(run({"--out-dir", d.string(), "phase", "--q", "2", "--beta", "1"}) == kExitUsage);
  CHECK(run({"--out-dir", d.string(), "verify", "--suite", "nope"}) == kExitUsage);
  CHECK(run({"--out-dir", d.string()}) == kExitUsage);
}

TEST_CASE("verify writes a manifest with matching digests") {
  const fs::path d = fresh_dir("verify");
  CHECK(run({"--out-dir", d.string(), "verify", "--suite", "stationarity"}) == kExitOk);
  const json m = json::parse(slurp(d / "verify.manifest.json"));
  CHECK(m["command"] == "verify");
  CHECK(m["exit_code"] == 0);
  REQUIRE(!m["outputs"].empty());
  for (const auto& o : m["outputs"]) {
    const fs::path f = d / o["file"].get<std::string>();
    CHECK(o["sha256"] == sha256_file(f.string()));
    CHECK(o["bytes"].get<std::uintmax_t>() == fs::file_size(f));
  }
  const json v = json::parse(slurp(d / "verify.json"));
  CHECK(v["passed"] == true);
}

TEST_CASE("config file values sit between flags and defaults") {
  const fs::path d = fresh_dir("config");
  std::ofstream(d / "cfg.json") << R"({"seed": 7, "simulate": {"q": 3, "n": 5, "beta": 1.25, "steps": 40}})";
  REQUIRE(run({"--out-dir", d.string(), "--config", (d / "cfg.json").string(), "simulate", "--steps", "60",
               "--record-every", "20"}) == kExitOk);
  const json m = json::parse(slurp(d / "simulate.manifest.json"));
  CHECK(m["seed"] == 7);
  CHECK(m["parameters"]["steps"] == 60);
  CHECK(m["parameters"]["n"] == 5);
  CHECK(m["parameters"]["beta"] == doctest::Approx(1.25));

  std::ofstream(d / "bad.json") << R"({"simulate": {"q": 3, "n": 5, "beta": 1.0, "colour": 2}})";
  CHECK(run({"--out-dir", d.string(), "--config", (d / "bad.json").string(), "simulate"}) == kExitUsage);
}

TEST_CASE("output directory from the environment") {
  const fs::path d = fresh_dir("env");
  ::setenv("POTTS_OUT_DIR", d.string().c_str(), 1);
  const int code = run({"phase", "--q", "3", "--beta", "2"});
  ::unsetenv("POTTS_OUT_DIR");
  CHECK(code == kExitOk);
  CHECK(fs::exists(d / "phase.json"));
  CHECK(fs::exists(d / "phase.manifest.json"));
}

TEST_CASE("data outputs are byte-identical across runs and thread counts") {
  const fs::path a = fresh_dir("det_a");
  const fs::path b = fresh_dir("det_b");
  const int saved = omp_get_max_threads();
  const std::vector<std::string> tail = {"couple", "--q", "3", "--n", "12", "--beta", "1", "--replicas", "6", "--trace-stride", "5"};
  auto args_for = [&](const fs::path& d, const char* threads) {
    std::vector<std::string> v = {"--out-dir", d.string(), "--threads", threads, "--seed", "5"};
    v.insert(v.end(), tail.begin(), tail.end());
    return v;
  };
  REQUIRE(run(args_for(a, "1")) == kExitOk);
  REQUIRE(run(args_for(b, "4")) == kExitOk);
  omp_set_num_threads(saved);
  for (const char* f : {"couple.json", "couple_traces.csv"}) {
    REQUIRE(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
}
