#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "loewner/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "loewner");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = loewner::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("loewner_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

const std::string data = LOEWNER_TEST_DATA;

}  // namespace

TEST_CASE("malformed driver files are input errors with a location") {
  const auto r = run({"trace", "--driver", data + "/bad.json", "--out", scratch("bad").string()});
  CHECK(r.code == loewner::cli::input_error);
  CHECK(r.err.find("line 4") != std::string::npos);
  CHECK(r.err.find("offset") != std::string::npos);
  CHECK(run({"trace", "--driver", data + "/missing.json"}).code == loewner::cli::input_error);
}

TEST_CASE("usage errors") {
  CHECK(run({"trace"}).code == loewner::cli::input_error);
  CHECK(run({"trace", "--gallery", "zero", "--driver", data + "/good.json"}).code == loewner::cli::input_error);
  CHECK(run({"trace", "--gallery", "nope"}).code == loewner::cli::input_error);
  CHECK(run({"trace", "--gallery", "zero", "--n", "1"}).code == loewner::cli::input_error);
  CHECK(run({"trace", "--gallery", "zero", "--param", "oops"}).code == loewner::cli::input_error);
  CHECK(run({"validate", "--only", "nothing"}).code == loewner::cli::input_error);
  CHECK(run({"--help"}).code == loewner::cli::ok);
}

TEST_CASE("trace writes its artifacts and a manifest") {
  const auto dir = scratch("trace");
  const auto r = run({"trace", "--gallery", "zero", "--n", "17", "--format", "csv,json,svg", "--out", dir.string()});
  REQUIRE(r.code == loewner::cli::ok);
  for (const char* f : {"trace.csv", "trace.json", "trace.svg", "manifest.json"}) CHECK(fs::exists(dir / f));
  const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["subcommand"] == "trace");
  CHECK(manifest.contains("version"));
  const auto trace = nlohmann::json::parse(slurp(dir / "trace.json"));
  CHECK(trace.dump().find("gamma") != std::string::npos);
  CHECK(slurp(dir / "trace.svg").find("<svg") != std::string::npos);
  // 17 points plus the header.
  std::istringstream csv(slurp(dir / "trace.csv"));
  std::string line;
  int lines = 0;
  while (std::getline(csv, line)) ++lines;
  CHECK(lines == 18);
}

TEST_CASE("repeated runs are byte-identical") {
  const auto a = scratch("det_a"), b = scratch("det_b");
  for (const auto& dir : {a, b})
    REQUIRE(run({"trace", "--driver", data + "/good.json", "--n", "33", "--method", "incremental", "--format",
                 "csv,json,svg", "--out", dir.string()})
                .code == loewner::cli::ok);
  for (const char* f : {"trace.csv", "trace.json", "trace.svg"}) CHECK(slurp(a / f) == slurp(b / f));
  CHECK(run({"trace", "--driver", data + "/good.json", "--n", "33", "--method", "incremental", "--threads", "1",
             "--out", b.string()}).code ==
        loewner::cli::ok);
  CHECK(slurp(a / "trace.csv") == slurp(b / "trace.csv"));
}

TEST_CASE("check exit codes follow the verdicts") {
  const auto dir = scratch("check");
  CHECK(run({"check", "--gallery", "zero", "--out", dir.string()}).code == loewner::cli::ok);
  CHECK(fs::exists(dir / "check.json"));
  const auto spiral = run({"check", "--gallery", "spiral", "--out", dir.string()});
  CHECK(spiral.code == loewner::cli::check_fail);
  CHECK(spiral.out.find("divergent") != std::string::npos);
  CHECK(run({"check", "--gallery", "ramp", "--condition", "c1", "--out", dir.string()}).code ==
        loewner::cli::check_fail);
  // A failed precheck stops the trace unless forced.
  CHECK(run({"trace", "--gallery", "ramp", "--n", "33", "--out", dir.string()}).code == loewner::cli::check_fail);
  CHECK(run({"trace", "--gallery", "ramp", "--n", "33", "--force", "--out", dir.string()}).code ==
        loewner::cli::ok);
}

TEST_CASE("validate subsets and sabotage") {
  const auto dir = scratch("validate");
  const auto good = run({"validate", "--only", "hcap", "--out", dir.string()});
  CHECK(good.code == loewner::cli::ok);
  CHECK(good.out.find("PASS") != std::string::npos);
  CHECK(fs::exists(dir / "validation.json"));
  // A coarse fixed step cannot reproduce the driver through the forward flow.
  const auto bad = run({"validate", "--only", "roundtrip", "--base-step", "0.1", "--out", dir.string()});
  CHECK(bad.code == loewner::cli::check_fail);
  CHECK(bad.out.find("FAIL") != std::string::npos);
}

TEST_CASE("derivative and sweep subcommands") {
  const auto dir = scratch("misc");
  CHECK(run({"derivative", "--gallery", "logsqrt", "--t0", "0.25,0.5", "--out", dir.string()}).code ==
        loewner::cli::ok);
  CHECK(fs::exists(dir / "derivative.csv"));
  CHECK(run({"sweep", "--gallery", "sqrt", "--perturbation", "bump", "--magnitudes", "0.1,0.01,0.001", "--n", "32",
             "--out", dir.string()})
            .code == loewner::cli::ok);
  CHECK(fs::exists(dir / "sweep.csv"));
  CHECK(run({"sweep", "--gallery", "sqrt", "--magnitudes", "0.01,0.1", "--out", dir.string()}).code ==
        loewner::cli::input_error);
  const auto list = run({"gallery-list", "--out", dir.string()});
  CHECK(list.code == loewner::cli::ok);
  CHECK(list.out.find("monotone_bvlr") != std::string::npos);
}
