#include "indiff/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "indiff/errors.hpp"
#include "indiff/solver.hpp"

namespace indiff {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ValidationError("cli: config " + where + ": " + what);
}

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) fail(where, "must be an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, _] : obj.items()) {
    if (!allowed.count(k)) fail(where, "unknown field '" + k + "'");
  }
}

double number(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) fail(where, std::string("missing field '") + key + "'");
  const json& v = obj.at(key);
  if (!v.is_number()) fail(where, std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

double number_or(const json& obj, const std::string& where, const char* key, double fallback) {
  return obj.contains(key) ? number(obj, where, key) : fallback;
}

int integer(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) fail(where, std::string("missing field '") + key + "'");
  const json& v = obj.at(key);
  if (!v.is_number_integer()) fail(where, std::string("field '") + key + "' must be an integer");
  return v.get<int>();
}

int integer_or(const json& obj, const std::string& where, const char* key, int fallback) {
  return obj.contains(key) ? integer(obj, where, key) : fallback;
}

std::string string_or(const json& obj, const std::string& where, const char* key,
                      std::string fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_string()) fail(where, std::string("field '") + key + "' must be a string");
  return obj.at(key).get<std::string>();
}

std::vector<double> numbers(const json& obj, const std::string& where, const char* key) {
  const json& v = obj.at(key);
  if (!v.is_array()) fail(where, std::string("field '") + key + "' must be an array");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) fail(where, std::string("field '") + key + "' must hold numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<CoeffSegment> parse_schedule(const json& v, const std::string& where, bool pre) {
  std::vector<CoeffSegment> segs;
  auto one = [&](const json& s, const std::string& at) {
    if (pre) {
      only_keys(s, at, {"start", "mu", "sigma", "beta", "lambda"});
    } else {
      only_keys(s, at, {"start", "mu", "sigma"});
    }
    CoeffSegment seg;
    seg.start = number_or(s, at, "start", 0.0);
    seg.mu = number(s, at, "mu");
    seg.sigma = number(s, at, "sigma");
    if (pre) {
      seg.beta = number_or(s, at, "beta", 0.0);
      seg.lambda = number_or(s, at, "lambda", 0.0);
    }
    segs.push_back(seg);
  };
  if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) one(v[i], where + "[" + std::to_string(i) + "]");
  } else {
    one(v, where);
  }
  return segs;
}

MarketModel parse_model(const json& m) {
  const std::string where = "model";
  only_keys(m, where, {"T", "N", "gamma", "s0", "pre_default", "post_default"});
  MarketModel model;
  model.grid.horizon = number(m, where, "T");
  model.grid.steps = integer(m, where, "N");
  model.gamma = number(m, where, "gamma");
  model.s0 = number_or(m, where, "s0", 1.0);
  if (!m.contains("pre_default")) fail(where, "missing field 'pre_default'");
  model.coeffs.pre_default = parse_schedule(m.at("pre_default"), "model.pre_default", true);
  if (m.contains("post_default")) {
    model.coeffs.post_default = parse_schedule(m.at("post_default"), "model.post_default", false);
  } else {
    for (const auto& s : model.coeffs.pre_default) {
      model.coeffs.post_default.push_back({s.start, s.mu, s.sigma, 0.0, 0.0});
    }
  }
  return model;
}

Claim parse_claim(const json& c, const MarketModel& model, const NumericsConfig& num) {
  const std::string where = "claim";
  if (!c.is_object() || !c.contains("type") || !c.at("type").is_string()) {
    fail(where, "needs a string field 'type'");
  }
  const std::string type = c.at("type").get<std::string>();
  if (type == "constant") {
    only_keys(c, where, {"type", "value"});
    return Claim::constant(number(c, where, "value"));
  }
  if (type == "default_indicator") {
    only_keys(c, where, {"type", "survive", "default"});
    return Claim::default_indicator(number(c, where, "survive"), number(c, where, "default"));
  }
  if (type == "stock_payoff") {
    only_keys(c, where, {"type", "s", "survive", "default"});
    for (const char* k : {"s", "survive", "default"}) {
      if (!c.contains(k)) fail(where, std::string("missing field '") + k + "'");
    }
    StockPayoffClaim t;
    t.s_nodes = numbers(c, where, "s");
    t.values[0] = numbers(c, where, "survive");
    t.values[1] = numbers(c, where, "default");
    return Claim(std::move(t));
  }
  if (type == "call" || type == "put") {
    only_keys(c, where, {"type", "strike", "default_factor"});
    const double strike = number(c, where, "strike");
    const double factor = number_or(c, where, "default_factor", 1.0);
    const bool call = type == "call";
    if (!(model.coeffs.sigma_max() > 0.0) || !(model.grid.horizon > 0.0) || !(model.s0 > 0.0)) {
      fail(where, "call/put payoffs need a valid model to build the space grid");
    }
    const SpaceGrid grid = SpaceGrid::for_model(model, num.M, num.L_mult);
    std::vector<double> s;
    for (double x : grid.nodes()) s.push_back(model.s0 * std::exp(x));
    return Claim::tabulate(s, [&](double sv, int n) {
      const double payoff = call ? std::max(sv - strike, 0.0) : std::max(strike - sv, 0.0);
      return n == 0 ? payoff : factor * payoff;
    });
  }
  fail(where, "unknown claim type '" + type + "'");
}

NumericsConfig parse_numerics(const json& n) {
  const std::string where = "numerics";
  only_keys(n, where, {"M", "L_mult", "quad_nodes", "k0", "tol_rel", "ks", "k", "fixed_point"});
  NumericsConfig num;
  num.M = integer_or(n, where, "M", num.M);
  num.L_mult = number_or(n, where, "L_mult", num.L_mult);
  num.quad_nodes = integer_or(n, where, "quad_nodes", num.quad_nodes);
  num.k0 = number_or(n, where, "k0", num.k0);
  num.tol_rel = number_or(n, where, "tol_rel", num.tol_rel);
  num.k = number_or(n, where, "k", num.k);
  if (n.contains("ks")) num.ks = numbers(n, where, "ks");
  if (n.contains("fixed_point")) {
    if (!n.at("fixed_point").is_boolean()) fail(where, "field 'fixed_point' must be a boolean");
    num.fixed_point = n.at("fixed_point").get<bool>();
  }
  if (num.M < 2) fail(where, "M must be at least 2");
  if (!(num.L_mult > 0.0)) fail(where, "L_mult must be positive");
  if (num.quad_nodes < 1 || num.quad_nodes > 64) fail(where, "quad_nodes must lie in [1, 64]");
  if (!(num.k0 > 0.0)) fail(where, "k0 must be positive");
  if (!(num.tol_rel > 0.0)) fail(where, "tol_rel must be positive");
  if (!(num.k > 0.0)) fail(where, "k must be positive");
  for (std::size_t i = 0; i < num.ks.size(); ++i) {
    if (!(num.ks[i] > 0.0) || (i > 0 && !(num.ks[i] > num.ks[i - 1]))) {
      fail(where, "ks must be positive and strictly increasing");
    }
  }
  return num;
}

OracleConfig parse_oracle(const json& o) {
  const std::string where = "oracle";
  only_keys(o, where, {"N_small", "q", "G", "n_paths", "seed", "strategy", "dump_paths"});
  OracleConfig oc;
  oc.N_small = integer_or(o, where, "N_small", oc.N_small);
  oc.q = integer_or(o, where, "q", oc.q);
  oc.G = integer_or(o, where, "G", oc.G);
  oc.n_paths = integer_or(o, where, "n_paths", oc.n_paths);
  oc.dump_paths = integer_or(o, where, "dump_paths", oc.dump_paths);
  if (o.contains("seed")) {
    if (!o.at("seed").is_number_unsigned()) fail(where, "seed must be a nonnegative integer");
    oc.seed = o.at("seed").get<std::uint64_t>();
  }
  oc.strategy = string_or(o, where, "strategy", oc.strategy);
  if (oc.strategy != "optimal" && oc.strategy != "zero") {
    fail(where, "strategy must be \"optimal\" or \"zero\"");
  }
  if (oc.N_small < 1 || oc.N_small > 16) fail(where, "N_small must lie in [1, 16]");
  if (oc.q < 2 || oc.q > 9) fail(where, "q must lie in [2, 9]");
  if (oc.G < 1 || oc.G > 401) fail(where, "G must lie in [1, 401]");
  if (oc.n_paths < 1000) fail(where, "n_paths must be at least 1000");
  if (oc.dump_paths < 0) fail(where, "dump_paths must be nonnegative");
  return oc;
}

OutputConfig parse_output(const json& o) {
  const std::string where = "output";
  only_keys(o, where, {"surface", "sweep", "report", "drift", "paths"});
  OutputConfig out;
  out.surface = string_or(o, where, "surface", "");
  out.sweep = string_or(o, where, "sweep", "");
  out.report = string_or(o, where, "report", "");
  out.drift = string_or(o, where, "drift", "");
  out.paths = string_or(o, where, "paths", "");
  return out;
}

}  // namespace

RunConfig parse_config(const json& doc) {
  only_keys(doc, "root", {"model", "claim", "numerics", "oracle", "output"});
  if (!doc.contains("model")) fail("root", "missing block 'model'");
  if (!doc.contains("claim")) fail("root", "missing block 'claim'");
  RunConfig cfg;
  cfg.model = parse_model(doc.at("model"));
  if (doc.contains("numerics")) cfg.numerics = parse_numerics(doc.at("numerics"));
  if (doc.contains("oracle")) cfg.oracle = parse_oracle(doc.at("oracle"));
  if (doc.contains("output")) cfg.output = parse_output(doc.at("output"));
  cfg.claim = parse_claim(doc.at("claim"), cfg.model, cfg.numerics);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cli: cannot read config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("cli: config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

nlohmann::ordered_json numerics_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  const auto& n = cfg.numerics;
  j["N"] = cfg.model.grid.steps;
  j["M"] = n.M;
  j["quad_nodes"] = n.quad_nodes;
  j["tol_rel"] = n.tol_rel;
  j["L_mult"] = n.L_mult;
  j["k0"] = n.k0;
  j["k"] = n.k;
  j["ks"] = n.ks;
  j["fixed_point"] = n.fixed_point;
  return j;
}

}  // namespace indiff
