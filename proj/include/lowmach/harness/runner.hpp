#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "lowmach/cpe_solver.hpp"
#include "lowmach/diagnostics.hpp"
#include "lowmach/error.hpp"
#include "lowmach/harness/config.hpp"
#include "lowmach/pe_solver.hpp"
#include "lowmach/wellprepared.hpp"

namespace lowmach::harness {

/// Output time k of n on [0, t_end]; the last one is t_end exactly.
inline double output_time(double t_end, int k, int n) { return k == n ? t_end : t_end * double(k) / double(n); }

/// Advances `s` to exactly `target` with the largest admissible steps,
/// clipping the last one. Returns the number of steps taken.
template <class State, class DtFn, class StepFn>
long advance_to(State& s, double target, DtFn&& stable, StepFn&& step) {
  long steps = 0;
  while (s.t < target) {
    const double remaining = target - s.t;
    const double dt = std::min(stable(s), remaining);
    s = step(s, dt);
    ++steps;
    if (target - s.t <= 1e-12 * std::max(1.0, std::abs(target))) s.t = target;
  }
  return steps;
}

inline PEState advance_pe(PEState s, double target, const Params& p, long* steps = nullptr) {
  const long n = advance_to(
      s, target, [&](const PEState& u) { return stable_dt_pe(u, p); },
      [&](const PEState& u, double dt) { return pe_step(u, dt, p); });
  if (steps) *steps += n;
  return s;
}

inline CPEState advance_cpe(CPEState s, double target, const Params& p, long* steps = nullptr) {
  const long n = advance_to(
      s, target, [&](const CPEState& u) { return stable_dt(u, p); },
      [&](const CPEState& u, double dt) { return cpe_step(u, dt, p); });
  if (steps) *steps += n;
  return s;
}

/// Rethrows a solver error with the run it came from prepended.
template <class F>
auto with_context(const std::string& context, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.code(), context + ": " + e.what());
  }
}

inline VectorField initial_velocity(const ExperimentConfig& c) {
  return enforce_compatibility(sample_initial_velocity(c.ic_family, c.amplitude, c.params.grid));
}

// ---------------------------------------------------------------------------
// Paired run

struct PairResult {
  double eps = 0.0;
  EnergyParts E_in;
  std::vector<EnergyReport> series;  // one row per output time, t = 0 included
  long pe_steps = 0;
  long cpe_steps = 0;
};

/// Both solvers from well-prepared data, compared at the shared output times.
inline PairResult run_pair(const ExperimentConfig& c, double eps) {
  require_valid(c);
  const Params p = c.at(eps);
  return with_context("run_pair(eps=" + sci(eps) + ")", [&] {
    const auto init = build_initial_states(initial_velocity(c), p);
    PairResult out;
    out.eps = eps;
    out.E_in = initial_energy(init.pe, init.cpe, p);
    PEState pe = init.pe;
    CPEState cpe = init.cpe;
    out.series.push_back(energy_report(cpe, pe, p));
    if (c.t_end == 0.0) return out;
    for (int k = 1; k <= c.output_count; ++k) {
      const double tk = output_time(c.t_end, k, c.output_count);
      pe = with_context("PE t=" + sci(pe.t), [&] { return advance_pe(std::move(pe), tk, p, &out.pe_steps); });
      cpe = with_context("CPE t=" + sci(cpe.t), [&] { return advance_cpe(std::move(cpe), tk, p, &out.cpe_steps); });
      out.series.push_back(energy_report(cpe, pe, p));
    }
    return out;
  });
}

// ---------------------------------------------------------------------------
// Single-system runs

struct PERow {
  double t = 0.0;
  double l2_sq = 0.0;        // ||v_p||^2_L2
  double dissipation = 0.0;  // mu ||grad_h v||^2 + lambda ||div_h v||^2 + ||d_z v||^2
  double momentum_x = 0.0;
  double momentum_y = 0.0;
  double h2 = 0.0;      // ||v_p||_H2
  double w_trace = 0.0;  // max |w_p| on z = 0 and z = 1
};

inline PERow pe_row(const PEState& s, const Params& p) {
  PERow r;
  r.t = s.t;
  r.l2_sq = sq(sobolev_norm(s.v, 0));
  r.dissipation = pe_dissipation(s.v, p);
  r.momentum_x = integral(s.v.x);
  r.momentum_y = integral(s.v.y);
  r.h2 = sobolev_norm(s.v, 2);
  const auto w = diagnose_w_pe(s.v, p.tol.solvability);
  for (int zi : {0, 1})
    for (double x : trace_at_integer_z(w, zi)) r.w_trace = std::max(r.w_trace, std::abs(x));
  return r;
}

inline std::vector<PERow> run_pe(const ExperimentConfig& c) {
  require_valid(c);
  const Params p = c.at(c.eps_list.front());
  return with_context("run_pe", [&] {
    PEState s(initial_velocity(c), 0.0);
    std::vector<PERow> rows{pe_row(s, p)};
    if (c.t_end == 0.0) return rows;
    for (int k = 1; k <= c.output_count; ++k) {
      s = advance_pe(std::move(s), output_time(c.t_end, k, c.output_count), p);
      rows.push_back(pe_row(s, p));
    }
    return rows;
  });
}

struct CPERow {
  double t = 0.0;
  double mass = 0.0;
  double momentum_x = 0.0;
  double momentum_y = 0.0;
  double rho_min = 0.0;
  double rho_max = 0.0;
  double h2_v = 0.0;          // ||v||_H2
  double h2_rho_excess = 0.0;  // ||rho - rho0||_H2
};

inline CPERow cpe_row(const CPEState& s, const Params& p) {
  CPERow r;
  r.t = s.t;
  const auto cons = conservation_report(s);
  r.mass = cons.mass;
  r.momentum_x = cons.momentum_x;
  r.momentum_y = cons.momentum_y;
  std::tie(r.rho_min, r.rho_max) = min_max(to_physical(s.rho));
  r.h2_v = sobolev_norm(s.v, 2);
  r.h2_rho_excess = sobolev_norm(s.rho - constant2(s.grid(), p.rho0), 2);
  return r;
}

/// CPE alone, from the same well-prepared data as run_pair.
inline std::vector<CPERow> run_cpe(const ExperimentConfig& c, double eps) {
  require_valid(c);
  const Params p = c.at(eps);
  return with_context("run_cpe(eps=" + sci(eps) + ")", [&] {
    CPEState s = build_initial_states(initial_velocity(c), p).cpe;
    std::vector<CPERow> rows{cpe_row(s, p)};
    if (c.t_end == 0.0) return rows;
    for (int k = 1; k <= c.output_count; ++k) {
      s = advance_cpe(std::move(s), output_time(c.t_end, k, c.output_count), p);
      rows.push_back(cpe_row(s, p));
    }
    return rows;
  });
}

// ---------------------------------------------------------------------------
// Sweep

struct SweepEntry {
  PairResult run;
  double E_in = 0.0;
  double sup_conv_h2_v = 0.0;
  double sup_conv_h2_rho = 0.0;
  double sup_conv_h1_w = 0.0;
  double sup_xi_h2 = 0.0;
  double sup_xi_h2_over_eps = 0.0;
  double sup_E = 0.0;
  double sup_E_over_eps2 = 0.0;
  double max_psi_z_gap = 0.0;
  double mass_drift_rel = 0.0;
};

struct SweepReport {
  std::vector<SweepEntry> entries;  // in eps_list order
  LineFit v_fit;    // log sup ||v^eps - v_p||_H2 against log eps
  LineFit xi_fit;   // log sup ||xi||_H2 against log eps (report only)
  LineFit ein_fit;  // log E_in against log eps
  double E_ratio = 0.0;  // max/min of sup E/eps^2
  bool slope_pass = false;
  bool r2_pass = false;
  bool ratio_pass = false;
  bool ein_slope_pass = false;
  bool ein_bound_pass = false;

  bool pass() const { return slope_pass && r2_pass && ratio_pass && ein_slope_pass && ein_bound_pass; }
};

inline SweepEntry summarize(PairResult run) {
  SweepEntry e;
  const double eps = run.eps;
  e.E_in = run.E_in.total();
  const double m0 = run.series.front().mass;
  for (const auto& r : run.series) {
    e.sup_conv_h2_v = std::max(e.sup_conv_h2_v, r.conv_h2_v);
    e.sup_conv_h2_rho = std::max(e.sup_conv_h2_rho, r.conv_h2_rho);
    e.sup_conv_h1_w = std::max(e.sup_conv_h1_w, r.conv_h1_w);
    e.sup_xi_h2_over_eps = std::max(e.sup_xi_h2_over_eps, r.xi_h2_over_eps);
    e.sup_E = std::max(e.sup_E, r.E.total());
    e.max_psi_z_gap = std::max(e.max_psi_z_gap, r.psi_z_route_gap);
    e.mass_drift_rel = std::max(e.mass_drift_rel, std::abs(r.mass - m0) / std::abs(m0));
  }
  e.sup_xi_h2 = eps * e.sup_xi_h2_over_eps;
  e.sup_E_over_eps2 = e.sup_E / (eps * eps);
  e.run = std::move(run);
  return e;
}

/// Runs `jobs` on up to `workers` threads; each job owns its output slot.
inline void parallel_for(std::size_t jobs, int workers, const std::function<void(std::size_t)>& body) {
  std::size_t n = workers > 0 ? std::size_t(workers) : std::max(1u, std::thread::hardware_concurrency());
  n = std::min(n, jobs);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

/// Fits and threshold checks over already summarized entries.
inline SweepReport evaluate_sweep(std::vector<SweepEntry> entries, const Thresholds& th) {
  SweepReport r;
  r.entries = std::move(entries);
  std::vector<double> eps, v, xi, ein;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  r.ein_bound_pass = true;
  for (const auto& e : r.entries) {
    eps.push_back(e.run.eps);
    v.push_back(e.sup_conv_h2_v);
    xi.push_back(e.sup_xi_h2);
    ein.push_back(e.E_in);
    lo = std::min(lo, e.sup_E_over_eps2);
    hi = std::max(hi, e.sup_E_over_eps2);
    r.ein_bound_pass = r.ein_bound_pass && e.E_in <= e.run.eps * e.run.eps;
  }
  r.v_fit = fit_log_slope(eps, v);
  r.ein_fit = fit_log_slope(eps, ein);
  if (std::all_of(xi.begin(), xi.end(), [](double x) { return x > 0.0; })) r.xi_fit = fit_log_slope(eps, xi);
  r.E_ratio = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  r.slope_pass = r.v_fit.slope >= th.slope_min && r.v_fit.slope <= th.slope_max;
  r.r2_pass = r.v_fit.r2 >= th.r2_min;
  r.ratio_pass = r.E_ratio < th.ratio_max;
  r.ein_slope_pass = r.ein_fit.slope >= th.ein_slope_min && r.ein_fit.slope <= th.ein_slope_max;
  return r;
}

/// One run_pair per eps, scheduled on independent workers.
inline SweepReport run_sweep(const ExperimentConfig& c) {
  require_valid(c);
  if (c.eps_list.size() < 3) throw Error(ErrorCode::InvalidConfig, "run_sweep needs at least 3 eps values");
  if (!(c.t_end > 0.0)) throw Error(ErrorCode::InvalidConfig, "run_sweep needs t_end > 0");
  std::vector<SweepEntry> entries(c.eps_list.size());
  parallel_for(entries.size(), c.workers, [&](std::size_t i) { entries[i] = summarize(run_pair(c, c.eps_list[i])); });
  return evaluate_sweep(std::move(entries), c.thresholds);
}

}  // namespace lowmach::harness
