#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "indiff/model.hpp"
#include <json.hpp>

namespace indiff {

struct NumericsConfig {
  int M = 200;
  double L_mult = 6.0;
  int quad_nodes = 7;
  double k0 = 0.25;
  double tol_rel = 1e-6;
  std::vector<double> ks;  // explicit sweep for `converge`; empty means k-doubling
  double k = 2.0;          // bound for `solve` and the oracle comparison
  bool fixed_point = false;
};

struct OracleConfig {
  int N_small = 8;
  int q = 7;
  int G = 81;
  int n_paths = 10000;
  std::uint64_t seed = 42;
  std::string strategy = "optimal";  // "optimal" or "zero"
  int dump_paths = 100;
};

struct OutputConfig {
  std::string surface;
  std::string sweep;
  std::string report;
  std::string drift;
  std::string paths;
};

struct RunConfig {
  MarketModel model;
  Claim claim;
  NumericsConfig numerics;
  OracleConfig oracle;
  OutputConfig output;
};

/// Parses and schema-checks a configuration. Throws ValidationError naming
/// the offending field. Stock payoffs given as "call"/"put" are tabulated
/// on the solver's space grid.
RunConfig parse_config(const nlohmann::json& doc);

/// Reads a JSON file; IoError if unreadable, ValidationError if malformed.
RunConfig load_config(const std::string& path);

/// The resolved numerics block as embedded in reports.
nlohmann::ordered_json numerics_json(const RunConfig& cfg);

}  // namespace indiff
