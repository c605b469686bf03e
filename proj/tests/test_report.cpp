#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "indiff/errors.hpp"
#include "indiff/report.hpp"

using namespace indiff;

namespace {

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

}  // namespace

TEST_SUITE("report") {
  TEST_CASE("twelve significant digits") {
    CHECK(format_sig12(0.1) == "0.1");
    CHECK(format_sig12(1.0 / 3.0) == "0.333333333333");
    CHECK(format_sig12(123456789.123456) == "123456789.123");
    CHECK(format_sig12(0.0) == "0");
    CHECK(format_sig12(-2.5e-20) == "-2.5e-20");
  }

  TEST_CASE("surface CSV layout") {
    MarketModel m;
    m.grid = {1.0, 3};
    m.coeffs = RegimeCoefficients::constant(0.1, 0.2, -0.3, 0.4);
    m.gamma = 1.0;
    const SpaceGrid grid(4, 1.0);
    const auto s = solve_bsde(m, Claim::default_indicator(1.0, 0.0), StrategySet::symmetric(1.0), grid,
                              Quadrature::gauss_hermite(5));
    std::ostringstream os;
    write_surface_csv(s, os);
    const std::string csv = os.str();
    CHECK(count_lines(csv) == 1 + 4 * 2 * 5);
    std::istringstream is(csv);
    std::string line;
    std::getline(is, line);
    CHECK(line == "i,t,j,x,s,n,Y,Z,U,pi_hat");
    int rows = 0;
    std::string last;
    while (std::getline(is, line)) {
      last = line;
      const auto cells = split(line);
      REQUIRE(cells.size() == 10);
      if (cells[5] == "1") CHECK(cells[8].empty());
      else CHECK_FALSE(cells[8].empty());
      ++rows;
    }
    CHECK(rows == 40);
    // the last row is the terminal post-default slice at the top node
    CHECK(last.rfind("3,1,4,1,", 0) == 0);
  }

  TEST_CASE("sweep CSV with and without timing") {
    KSweepResult r;
    r.ks = {0.5, 1.0};
    r.J0s = {0.7, 0.6};
    r.runtime_ms = {12.5, 3.25};
    std::ostringstream a, b;
    write_sweep_csv(r, a);
    write_sweep_csv(r, b, false);
    CHECK(a.str() == "k,J0,runtime_ms\n0.5,0.7,12.5\n1,0.6,3.25\n");
    CHECK(b.str() == "k,J0,runtime_ms\n0.5,0.7,0\n1,0.6,0\n");
  }

  TEST_CASE("drift and path CSVs") {
    DriftReport d;
    d.t = {0.0, 0.5};
    d.mean = {1e-3, -2e-3};
    d.stderr_ = {0.01, 0.02};
    std::ostringstream os;
    write_drift_csv(d, os);
    CHECK(os.str() == "step,t,mean_increment,stderr\n0,0,0.001,0.01\n1,0.5,-0.002,0.02\n");

    MarketModel m;
    m.grid = {1.0, 4};
    m.coeffs = RegimeCoefficients::constant(0.1, 0.2, -0.3, 0.4);
    m.gamma = 1.0;
    const auto ens = simulate_paths(m, [](double, double, int) { return 1.0; }, 3, 5);
    std::ostringstream ps;
    write_paths_csv(ens, ps);
    CHECK(count_lines(ps.str()) == 1 + 3 * 5);
    CHECK(ps.str().rfind("path,step,t,W,N,S,X\n0,0,0,0,0,1,0\n", 0) == 0);
  }

  TEST_CASE("price report JSON has a fixed field order") {
    PriceReport r;
    r.gamma = 1.0;
    r.J0_zero = 1.0;
    r.J0_claim = 0.5;
    r.buy_price = 0.6931471805599453;
    r.sell_price = 0.75;
    r.settings = {100, 200, 7, 1e-6, 0.25};
    const std::string empty = price_report_json(r).dump();
    CHECK(empty ==
          "{\"gamma\":1.0,\"J0_zero\":1.0,\"J0_claim\":0.5,\"buy_price\":0.6931471805599453,"
          "\"sell_price\":0.75,\"per_k\":[],\"settings\":{\"N\":100,\"M\":200,\"quad_nodes\":7,"
          "\"tol_rel\":1e-06}}");
    CHECK(nlohmann::json::parse(empty).at("per_k").is_array());
    r.per_k = {{0.25, 0.5}, {0.5, 0.6}};
    const auto j = price_report_json(r);
    CHECK(j.at("per_k").size() == 2);
    CHECK(j.at("per_k")[1].dump() == "{\"k\":0.5,\"p\":0.6}");
  }

  TEST_CASE("emit_report writes files and reports I/O failures") {
    const auto dir = std::filesystem::temp_directory_path() / "indiff_report_test";
    std::filesystem::create_directories(dir);
    const auto file = (dir / "out.txt").string();
    emit_report("abc\n", file);
    emit_report("xyz\n", file);
    std::ifstream in(file);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(text == "xyz\n");
    CHECK_THROWS_AS(emit_report("x", (dir / "missing" / "out.txt").string()), IoError);
    std::filesystem::remove_all(dir);
  }
}
