#pragma once

#include <ostream>
#include <string>

#include <json.hpp>

#include "indiff/approx.hpp"
#include "indiff/oracle.hpp"
#include "indiff/pricing.hpp"

namespace indiff {

/// %.12g
std::string format_sig12(double v);

/// i,t,j,x,s,n,Y,Z,U,pi_hat; U is empty for n = 1.
void write_surface_csv(const ValueSurface& surface, std::ostream& os);

/// k,J0,runtime_ms. With timing off the runtime column is written as 0 so
/// the file is byte-stable.
void write_sweep_csv(const KSweepResult& sweep, std::ostream& os, bool timing = true);

/// step,t,mean_increment,stderr
void write_drift_csv(const DriftReport& drift, std::ostream& os);

/// path,step,t,W,N,S,X
void write_paths_csv(const PathEnsemble& paths, std::ostream& os);

/// Fields in fixed order: gamma, J0_zero, J0_claim, buy_price, sell_price,
/// per_k, settings.
nlohmann::ordered_json price_report_json(const PriceReport& report);

/// Writes `text` to `path` ("-" is standard output). IoError on failure.
void emit_report(const std::string& text, const std::string& path);

}  // namespace indiff
