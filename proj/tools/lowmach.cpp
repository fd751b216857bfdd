// Command-line front end: paired and single runs, eps sweeps, verification.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "lowmach/harness/config.hpp"
#include "lowmach/harness/report.hpp"
#include "lowmach/harness/runner.hpp"
#include "lowmach/harness/verify.hpp"

namespace fs = std::filesystem;
using namespace lowmach;
using namespace lowmach::harness;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::optional<double> eps;
  bool quiet = false;
};

ExperimentConfig load(const Options& o) {
  ExperimentConfig c = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
  if (!o.out.empty()) c.out_dir = o.out;
  if (o.eps) c.eps_list = {*o.eps};
  return c;
}

double single_eps(const ExperimentConfig& c) { return c.eps_list.front(); }

int cmd_run_pe(const Options& o) {
  const auto c = load(o);
  const auto rows = run_pe(c);
  const fs::path path = fs::path(c.out_dir) / "pe.csv";
  auto os = open_out(path);
  write_pe_csv(os, rows);
  if (!o.quiet) {
    std::cout << "run-pe: " << rows.size() << " rows, ||v_p||^2 " << short_num(rows.front().l2_sq) << " -> "
              << short_num(rows.back().l2_sq) << "\nwrote " << path.string() << '\n';
  }
  return 0;
}

int cmd_run_cpe(const Options& o) {
  const auto c = load(o);
  const double eps = single_eps(c);
  const auto rows = run_cpe(c, eps);
  const fs::path path = fs::path(c.out_dir) / ("cpe_" + eps_tag(eps) + ".csv");
  auto os = open_out(path);
  write_cpe_csv(os, rows);
  if (!o.quiet) {
    std::cout << "run-cpe eps=" << eps << ": " << rows.size() << " rows, mass " << num(rows.back().mass)
              << "\nwrote " << path.string() << '\n';
  }
  return 0;
}

int cmd_run_pair(const Options& o) {
  const auto c = load(o);
  const double eps = single_eps(c);
  const auto run = run_pair(c, eps);
  const fs::path path = fs::path(c.out_dir) / (eps_tag(eps) + ".csv");
  auto os = open_out(path);
  write_pair_csv(os, run.series);
  if (!o.quiet) {
    const auto e = summarize(run);
    std::cout << "run-pair eps=" << eps << ": E_in " << short_num(e.E_in) << ", sup E " << short_num(e.sup_E)
              << ", sup |v - v_p|_H2 " << short_num(e.sup_conv_h2_v) << " (" << run.pe_steps << " PE / "
              << run.cpe_steps << " CPE steps)\nwrote " << path.string() << '\n';
  }
  return 0;
}

int cmd_sweep(const Options& o) {
  const auto c = load(o);
  const auto r = run_sweep(c);
  write_sweep(r, c, c.out_dir);
  if (!o.quiet) {
    for (const auto& e : r.entries) {
      std::cout << "eps " << short_num(e.run.eps) << ": E_in " << short_num(e.E_in) << ", sup |v - v_p|_H2 "
                << short_num(e.sup_conv_h2_v) << ", sup E/eps^2 " << short_num(e.sup_E_over_eps2) << '\n';
    }
    std::cout << "rate of sup |v - v_p|_H2: slope " << short_num(r.v_fit.slope) << ", r2 " << short_num(r.v_fit.r2)
              << "\nE_in slope " << short_num(r.ein_fit.slope) << ", E/eps^2 spread " << short_num(r.E_ratio)
              << "\nall thresholds met: " << (r.pass() ? "yes" : "no") << "\nwrote " << c.out_dir << '\n';
  }
  return r.pass() ? 0 : 2;
}

int cmd_verify(const Options& o) {
  const auto c = load(o);
  const auto r = verify(c);
  for (const auto& check : r.checks) {
    if (o.quiet && check.pass) continue;
    std::cout << (check.pass ? "PASS " : "FAIL ") << check.name << ": " << check.detail << '\n';
  }
  return r.all_passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compressible and incompressible primitive equations: low Mach number experiments"};
  app.require_subcommand(1);
  Options o;
  auto add_common = [&](CLI::App* sub, bool with_eps) {
    sub->add_option("--config", o.config, "JSON experiment config")->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "output directory (overrides out_dir)");
    if (with_eps) sub->add_option("--eps", o.eps, "Mach number (overrides eps_list)");
    sub->add_flag("--quiet", o.quiet, "print failures only");
  };
  auto* pe = app.add_subcommand("run-pe", "incompressible run, writes pe.csv");
  auto* cpe = app.add_subcommand("run-cpe", "compressible run at one eps");
  auto* pair = app.add_subcommand("run-pair", "paired run at one eps, writes the energy report CSV");
  auto* sweep = app.add_subcommand("sweep", "paired runs over eps_list, fits and plots");
  auto* ver = app.add_subcommand("verify", "invariant checks; nonzero exit on failure");
  add_common(pe, false);
  add_common(cpe, true);
  add_common(pair, true);
  add_common(sweep, false);
  add_common(ver, true);
  CLI11_PARSE(app, argc, argv);

  try {
    if (*pe) return cmd_run_pe(o);
    if (*cpe) return cmd_run_cpe(o);
    if (*pair) return cmd_run_pair(o);
    if (*sweep) return cmd_sweep(o);
    if (*ver) return cmd_verify(o);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
