#include "indiff/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "indiff/errors.hpp"

namespace indiff {

std::string format_sig12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_surface_csv(const ValueSurface& surface, std::ostream& os) {
  const auto& model = surface.model();
  const auto& space = surface.space();
  os << "i,t,j,x,s,n,Y,Z,U,pi_hat\n";
  for (int i = 0; i <= surface.steps(); ++i) {
    const std::string t = format_sig12(model.grid.time(i));
    for (int n = 0; n < 2; ++n) {
      for (int j = 0; j < space.size(); ++j) {
        const double x = space.node(j);
        os << i << ',' << t << ',' << j << ',' << format_sig12(x) << ','
           << format_sig12(model.s0 * std::exp(x)) << ',' << n << ','
           << format_sig12(surface.Y(i, j, n)) << ',' << format_sig12(surface.Z(i, j, n)) << ',';
        if (n == 0) os << format_sig12(surface.U(i, j));
        os << ',' << format_sig12(surface.pi_hat(i, j, n)) << '\n';
      }
    }
  }
}

void write_sweep_csv(const KSweepResult& sweep, std::ostream& os, bool timing) {
  os << "k,J0,runtime_ms\n";
  for (std::size_t i = 0; i < sweep.ks.size(); ++i) {
    os << format_sig12(sweep.ks[i]) << ',' << format_sig12(sweep.J0s[i]) << ','
       << format_sig12(timing ? sweep.runtime_ms[i] : 0.0) << '\n';
  }
}

void write_drift_csv(const DriftReport& drift, std::ostream& os) {
  os << "step,t,mean_increment,stderr\n";
  for (std::size_t i = 0; i < drift.mean.size(); ++i) {
    os << i << ',' << format_sig12(drift.t[i]) << ',' << format_sig12(drift.mean[i]) << ','
       << format_sig12(drift.stderr_[i]) << '\n';
  }
}

void write_paths_csv(const PathEnsemble& paths, std::ostream& os) {
  os << "path,step,t,W,N,S,X\n";
  for (int p = 0; p < paths.n_paths; ++p) {
    for (int i = 0; i <= paths.steps; ++i) {
      const auto k = paths.index(p, i);
      const double t = i == paths.steps ? paths.dt * paths.steps : i * paths.dt;
      os << p << ',' << i << ',' << format_sig12(t) << ',' << format_sig12(paths.W[k]) << ','
         << paths.N[k] << ',' << format_sig12(paths.S[k]) << ',' << format_sig12(paths.X[k])
         << '\n';
    }
  }
}

nlohmann::ordered_json price_report_json(const PriceReport& r) {
  nlohmann::ordered_json j;
  j["gamma"] = r.gamma;
  j["J0_zero"] = r.J0_zero;
  j["J0_claim"] = r.J0_claim;
  j["buy_price"] = r.buy_price;
  j["sell_price"] = r.sell_price;
  j["per_k"] = nlohmann::ordered_json::array();
  for (const auto& kp : r.per_k) {
    nlohmann::ordered_json e;
    e["k"] = kp.k;
    e["p"] = kp.p;
    j["per_k"].push_back(e);
  }
  nlohmann::ordered_json s;
  s["N"] = r.settings.N;
  s["M"] = r.settings.M;
  s["quad_nodes"] = r.settings.quad_nodes;
  s["tol_rel"] = r.settings.tol_rel;
  j["settings"] = s;
  return j;
}

void emit_report(const std::string& text, const std::string& path) {
  if (path == "-") {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) throw IoError("cli: failed writing to standard output");
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cli: cannot open '" + path + "' for writing");
  out << text;
  out.close();
  if (!out) throw IoError("cli: failed writing '" + path + "'");
}

}  // namespace indiff
