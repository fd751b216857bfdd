#pragma once

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include "lowmach/error.hpp"
#include "lowmach/model.hpp"
#include "lowmach/wellprepared.hpp"

namespace lowmach::harness {

using json = nlohmann::json;

/// Pass/fail thresholds applied to a sweep.
struct Thresholds {
  double slope_min = 0.8;
  double slope_max = 1.2;
  double r2_min = 0.98;
  double ratio_max = 4.0;  // max/min of sup_t E(t)/eps^2 across eps
  double ein_slope_min = 3.5;
  double ein_slope_max = 4.5;
};

struct ExperimentConfig {
  Params params{};  // eps is taken from eps_list
  std::vector<double> eps_list{0.1, 0.05, 0.025, 0.0125};
  std::string ic_family = "baroclinic-taylor-green";
  double amplitude = 1.0;
  double t_end = 0.5;
  int output_count = 50;
  std::string out_dir = "out";
  std::uint64_t seed = 20240607;
  int workers = 0;  // 0: one per hardware thread
  Thresholds thresholds{};

  /// Params for one member of the sweep.
  Params at(double eps) const {
    Params p = params;
    p.eps = eps;
    p.t_end = t_end;
    p.output_count = output_count;
    return p;
  }
};

namespace detail {

inline void reject_unknown(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, where + " must be an object");
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (const char* k : keys) known = known || key == k;
    if (!known) throw Error(ErrorCode::InvalidConfig, "unknown key '" + key + "' in " + where);
  }
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, where + "." + key + ": " + e.what());
  }
}

}  // namespace detail

/// Every violated config invariant, parameter checks included.
inline std::vector<std::string> validate(const ExperimentConfig& c) {
  std::vector<std::string> out;
  if (c.eps_list.empty()) out.push_back("eps_list must not be empty");
  for (std::size_t i = 0; i < c.eps_list.size(); ++i) {
    const double e = c.eps_list[i];
    if (!(e > 0.0 && e < 1.0)) out.push_back("eps_list entries must lie in (0,1), got " + sci(e));
    if (i > 0 && !(e < c.eps_list[i - 1])) out.push_back("eps_list must be strictly decreasing");
  }
  if (!(c.t_end >= 0.0) || !std::isfinite(c.t_end)) out.push_back("t_end must be finite and >= 0");
  if (c.output_count < 1) out.push_back("output_count must be >= 1");
  if (c.workers < 0) out.push_back("workers must be >= 0");
  if (!(c.amplitude >= 0.0) || !std::isfinite(c.amplitude)) out.push_back("amplitude must be finite and >= 0");
  try {
    parse_family(c.ic_family);
  } catch (const Error& e) {
    out.push_back(e.what());
  }
  Params p = c.params;
  p.eps = c.eps_list.empty() ? 0.5 : c.eps_list.front();
  for (auto& m : lowmach::validate(p)) out.push_back(std::move(m));
  return out;
}

inline void require_valid(const ExperimentConfig& c) {
  const auto problems = validate(c);
  if (problems.empty()) return;
  std::string msg = "invalid config:";
  for (const auto& m : problems) msg += "\n  " + m;
  throw Error(ErrorCode::InvalidConfig, msg);
}

/// Parses without validating, so that verify() can report on bad configs.
inline ExperimentConfig config_from_json(const json& j) {
  using detail::read;
  detail::reject_unknown(j,
                         {"params", "eps_list", "ic_family", "amplitude", "t_end", "output_count", "out_dir", "seed",
                          "workers", "tolerances", "thresholds"},
                         "config");
  ExperimentConfig c;
  if (j.contains("params")) {
    const json& pj = j.at("params");
    detail::reject_unknown(
        pj, {"rho0", "gamma", "mu", "lambda", "grid", "cfl_acoustic", "cfl_advective", "cfl_viscous"}, "params");
    Params& p = c.params;
    read(pj, "rho0", p.rho0, "params");
    read(pj, "gamma", p.gamma, "params");
    read(pj, "mu", p.mu, "params");
    read(pj, "lambda", p.lambda, "params");
    read(pj, "cfl_acoustic", p.cfl_acoustic, "params");
    read(pj, "cfl_advective", p.cfl_advective, "params");
    read(pj, "cfl_viscous", p.cfl_viscous, "params");
    if (pj.contains("grid")) {
      const json& gj = pj.at("grid");
      detail::reject_unknown(gj, {"nx", "ny", "nz"}, "params.grid");
      read(gj, "nx", p.grid.nx, "params.grid");
      read(gj, "ny", p.grid.ny, "params.grid");
      read(gj, "nz", p.grid.nz, "params.grid");
    }
  }
  read(j, "eps_list", c.eps_list, "config");
  read(j, "ic_family", c.ic_family, "config");
  read(j, "amplitude", c.amplitude, "config");
  read(j, "t_end", c.t_end, "config");
  read(j, "output_count", c.output_count, "config");
  read(j, "out_dir", c.out_dir, "config");
  read(j, "seed", c.seed, "config");
  read(j, "workers", c.workers, "config");
  if (j.contains("tolerances")) {
    const json& tj = j.at("tolerances");
    detail::reject_unknown(tj, {"solvability", "round_trip"}, "tolerances");
    read(tj, "solvability", c.params.tol.solvability, "tolerances");
    read(tj, "round_trip", c.params.tol.round_trip, "tolerances");
  }
  if (j.contains("thresholds")) {
    const json& tj = j.at("thresholds");
    detail::reject_unknown(
        tj, {"slope_min", "slope_max", "r2_min", "ratio_max", "ein_slope_min", "ein_slope_max"}, "thresholds");
    Thresholds& t = c.thresholds;
    read(tj, "slope_min", t.slope_min, "thresholds");
    read(tj, "slope_max", t.slope_max, "thresholds");
    read(tj, "r2_min", t.r2_min, "thresholds");
    read(tj, "ratio_max", t.ratio_max, "thresholds");
    read(tj, "ein_slope_min", t.ein_slope_min, "thresholds");
    read(tj, "ein_slope_max", t.ein_slope_max, "thresholds");
  }
  return c;
}

inline json config_to_json(const ExperimentConfig& c) {
  const Params& p = c.params;
  const Thresholds& t = c.thresholds;
  return json{
      {"params",
       {{"rho0", p.rho0},
        {"gamma", p.gamma},
        {"mu", p.mu},
        {"lambda", p.lambda},
        {"grid", {{"nx", p.grid.nx}, {"ny", p.grid.ny}, {"nz", p.grid.nz}}},
        {"cfl_acoustic", p.cfl_acoustic},
        {"cfl_advective", p.cfl_advective},
        {"cfl_viscous", p.cfl_viscous}}},
      {"eps_list", c.eps_list},
      {"ic_family", c.ic_family},
      {"amplitude", c.amplitude},
      {"t_end", c.t_end},
      {"output_count", c.output_count},
      {"out_dir", c.out_dir},
      {"seed", c.seed},
      {"workers", c.workers},
      {"tolerances", {{"solvability", p.tol.solvability}, {"round_trip", p.tol.round_trip}}},
      {"thresholds",
       {{"slope_min", t.slope_min},
        {"slope_max", t.slope_max},
        {"r2_min", t.r2_min},
        {"ratio_max", t.ratio_max},
        {"ein_slope_min", t.ein_slope_min},
        {"ein_slope_max", t.ein_slope_max}}},
  };
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, "config '" + path + "': " + e.what());
  }
  return config_from_json(j);
}

}  // namespace lowmach::harness
