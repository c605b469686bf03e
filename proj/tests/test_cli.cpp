#include <doctest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("indiff_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Run run(const std::string& args) {
  const auto out = scratch() / "stdout.txt";
  const auto err = scratch() / "stderr.txt";
  const std::string cmd = std::string("\"") + INDIFF_CLI + "\" " + args + " >\"" + out.string() +
                          "\" 2>\"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

std::string config(const std::string& name) {
  return (fs::path(INDIFF_CONFIGS) / name).string();
}

// Copy of a shipped config with an edited document, written to scratch.
std::string variant(const std::string& name, const std::string& tag,
                    const std::function<void(json&)>& edit) {
  json doc = json::parse(slurp(config(name)));
  edit(doc);
  const auto path = scratch() / (tag + ".json");
  std::ofstream(path) << doc.dump(2);
  return path.string();
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("validate reports sigma positivity with exit 2") {
    const auto r = run("validate " + config("sigma_zero.json"));
    CHECK(r.code == 2);
    CHECK(r.err.find("sigma must be positive") != std::string::npos);
    CHECK(json::parse(r.out).at("valid") == false);
    CHECK(run("validate " + config("bond.json")).code == 0);
  }

  TEST_CASE("price on the constant claim") {
    const auto r = run("price " + config("constant.json"));
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(std::abs(j.at("buy_price").get<double>() - 0.75) <= 1e-10);
    CHECK(std::abs(j.at("sell_price").get<double>() - 0.75) <= 1e-10);
    CHECK(j.at("per_k").is_array());
  }

  TEST_CASE("converge on Merton writes the sweep") {
    const auto sweep = (scratch() / "sweep.csv").string();
    const auto cfg = variant("merton.json", "merton_sweep", [&](json& d) { d["output"]["sweep"] = sweep; });
    const auto r = run("converge " + cfg);
    REQUIRE(r.code == 0);
    std::istringstream csv(slurp(sweep));
    std::string line, last;
    std::getline(csv, line);
    CHECK(line == "k,J0,runtime_ms");
    while (std::getline(csv, line)) last = line;
    const auto c1 = last.find(',');
    const double J0 = std::stod(last.substr(c1 + 1, last.find(',', c1 + 1) - c1 - 1));
    CHECK(std::abs(J0 - 0.6065) <= 1e-3);
    CHECK(json::parse(r.out).at("converged") == true);
  }

  TEST_CASE("price output is byte-identical across runs and thread counts") {
    for (const char* name : {"put.json", "regimes.json"}) {
      const auto a = run(std::string("--threads 1 price ") + config(name));
      const auto b = run(std::string("--threads 8 price ") + config(name));
      const auto c = run(std::string("--threads 8 price ") + config(name));
      REQUIRE(a.code == 0);
      CHECK(a.out == b.out);
      CHECK(b.out == c.out);
    }
  }

  TEST_CASE("solve, oracle and sweep files are byte-identical across thread counts") {
    std::string prev_surface, prev_drift, prev_paths, prev_sweep;
    for (int threads : {1, 8}) {
      const auto tag = std::to_string(threads);
      const auto surface = scratch() / ("surface" + tag + ".csv");
      const auto drift = scratch() / ("drift" + tag + ".csv");
      const auto paths = scratch() / ("paths" + tag + ".csv");
      const auto sweep = scratch() / ("sweep" + tag + ".csv");
      const auto cfg = variant("put.json", "put_" + tag, [&](json& d) {
        d["output"] = {{"surface", surface.string()}, {"drift", drift.string()},
                       {"paths", paths.string()}, {"sweep", sweep.string()}};
        d["oracle"]["n_paths"] = 2000;
      });
      const std::string t = "--threads " + tag + " ";
      REQUIRE(run(t + "solve " + cfg).code == 0);
      REQUIRE(run(t + "oracle " + cfg).code == 0);
      REQUIRE(run(t + "--no-timing converge " + cfg).code == 0);
      if (threads == 8) {
        CHECK(slurp(surface) == prev_surface);
        CHECK(slurp(drift) == prev_drift);
        CHECK(slurp(paths) == prev_paths);
        CHECK(slurp(sweep) == prev_sweep);
      }
      prev_surface = slurp(surface);
      prev_drift = slurp(drift);
      prev_paths = slurp(paths);
      prev_sweep = slurp(sweep);
    }
    CHECK_FALSE(prev_surface.empty());
  }

  TEST_CASE("seed override changes only the Monte Carlo part") {
    const auto a = json::parse(run("oracle " + config("bond.json")).out);
    const auto b = json::parse(run("--seed 43 oracle " + config("bond.json")).out);
    CHECK(a.at("seed") == 42);
    CHECK(b.at("seed") == 43);
    CHECK(a.at("J0_solver") == b.at("J0_solver"));
    CHECK(a.at("J0_dp") == b.at("J0_dp"));
  }

  TEST_CASE("exit codes") {
    CHECK(run("price " + (scratch() / "nope.json").string()).code == 4);
    const auto unwritable = variant("constant.json", "unwritable", [](json& d) {
      d["output"]["report"] = "/nonexistent-dir/report.json";
    });
    CHECK(run("price " + unwritable).code == 4);
    const auto unknown = variant("constant.json", "unknown", [](json& d) { d["numerics"]["Mx"] = 3; });
    const auto r = run("price " + unknown);
    CHECK(r.code == 2);
    CHECK(r.err.find("Mx") != std::string::npos);
    const auto garbage = scratch() / "garbage.json";
    std::ofstream(garbage) << "{not json";
    CHECK(run("price " + garbage.string()).code == 2);
    CHECK(run("frobnicate " + config("bond.json")).code == 2);
    CHECK(run("").code == 2);
    CHECK(run("--help").code == 0);
    const auto blowup = variant("merton.json", "blowup", [](json& d) {
      d["model"]["N"] = 1;
      d["model"]["gamma"] = 5.0;
      d["model"]["pre_default"] = {{"mu", 3.0}, {"sigma", 0.2}};
      d["numerics"]["k"] = 50.0;
    });
    const auto n = run("solve " + blowup);
    CHECK(n.code == 3);
    CHECK(n.err.find("step 0") != std::string::npos);
  }
}
