#pragma once

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "lowmach/error.hpp"
#include "lowmach/harness/config.hpp"
#include "lowmach/harness/runner.hpp"

namespace lowmach::harness {

/// %.17g: round-trips every double.
inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_row(std::ostream& os, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) os << ',';
    os << num(v);
    first = false;
  }
  os << '\n';
}

inline constexpr const char* kPairCsvHeader =
    "t,E,E_psi_h2,E_eps_psit_l2,E_xi_h2,E_xit_l2,D,mass,momentum_x,momentum_y,pe_l2_sq,conv_h2_v,conv_h2_rho,"
    "conv_h1_w";
inline constexpr const char* kPeCsvHeader = "t,pe_l2_sq,pe_dissipation,momentum_x,momentum_y,h2_norm,w_trace_max";
inline constexpr const char* kCpeCsvHeader = "t,mass,momentum_x,momentum_y,rho_min,rho_max,h2_v,h2_rho_excess";

inline void write_pair_csv(std::ostream& os, const std::vector<EnergyReport>& series) {
  os << kPairCsvHeader << '\n';
  for (const auto& r : series) {
    write_row(os, {r.t, r.E.total(), r.E.psi_h2, r.E.eps_psit_l2, r.E.xi_h2, r.E.xit_l2, r.D.total(), r.mass,
                   r.momentum_x, r.momentum_y, r.pe_l2_sq, r.conv_h2_v, r.conv_h2_rho, r.conv_h1_w});
  }
}

inline void write_pe_csv(std::ostream& os, const std::vector<PERow>& rows) {
  os << kPeCsvHeader << '\n';
  for (const auto& r : rows) write_row(os, {r.t, r.l2_sq, r.dissipation, r.momentum_x, r.momentum_y, r.h2, r.w_trace});
}

inline void write_cpe_csv(std::ostream& os, const std::vector<CPERow>& rows) {
  os << kCpeCsvHeader << '\n';
  for (const auto& r : rows) {
    write_row(os, {r.t, r.mass, r.momentum_x, r.momentum_y, r.rho_min, r.rho_max, r.h2_v, r.h2_rho_excess});
  }
}

inline std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

/// File stem for one sweep member, e.g. eps_0.0125.
inline std::string eps_tag(double eps) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "eps_%.6g", eps);
  return buf;
}

inline json fit_json(const LineFit& f) { return {{"slope", f.slope}, {"intercept", f.intercept}, {"r2", f.r2}}; }

inline json sweep_summary_json(const SweepReport& r, const ExperimentConfig& c) {
  json entries = json::array();
  for (const auto& e : r.entries) {
    entries.push_back({{"eps", e.run.eps},
                       {"E_in", e.E_in},
                       {"E_in_le_eps2", e.E_in <= e.run.eps * e.run.eps},
                       {"sup_conv_h2_v", e.sup_conv_h2_v},
                       {"sup_conv_h2_rho", e.sup_conv_h2_rho},
                       {"sup_conv_h1_w", e.sup_conv_h1_w},
                       {"sup_xi_h2", e.sup_xi_h2},
                       {"sup_xi_h2_over_eps", e.sup_xi_h2_over_eps},
                       {"sup_E", e.sup_E},
                       {"sup_E_over_eps2", e.sup_E_over_eps2},
                       {"max_psi_z_route_gap", e.max_psi_z_gap},
                       {"mass_drift_rel", e.mass_drift_rel},
                       {"pe_steps", e.run.pe_steps},
                       {"cpe_steps", e.run.cpe_steps},
                       {"csv", eps_tag(e.run.eps) + ".csv"}});
  }
  json out;
  out["config"] = config_to_json(c);
  out["entries"] = entries;
  out["v_rate"] = fit_json(r.v_fit);
  out["v_rate"]["pass"] = r.slope_pass && r.r2_pass;
  out["slope"] = r.v_fit.slope;
  out["intercept"] = r.v_fit.intercept;
  out["r2"] = r.v_fit.r2;
  out["xi_rate"] = fit_json(r.xi_fit);
  out["E_in_rate"] = fit_json(r.ein_fit);
  out["E_in_rate"]["pass"] = r.ein_slope_pass;
  out["E_over_eps2_ratio"] = r.E_ratio;
  out["pass"] = {{"slope", r.slope_pass},         {"r2", r.r2_pass},
                 {"E_ratio", r.ratio_pass},       {"E_in_slope", r.ein_slope_pass},
                 {"E_in_bound", r.ein_bound_pass}, {"all", r.pass()}};
  return out;
}

// ---------------------------------------------------------------------------
// SVG

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
};

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

/// Polyline chart with a box, min/max tick labels and a legend. Points that
/// cannot be shown on a log axis are skipped.
inline std::string svg_line_plot(const PlotSpec& spec, const std::vector<PlotSeries>& series) {
  constexpr double W = 640, H = 420, L = 80, R = 170, T = 40, B = 60;
  auto tx = [&](double v) { return spec.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return spec.log_y ? std::log10(v) : v; };
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!spec.log_x || x > 0) && (!spec.log_y || y > 0);
  };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series)
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      y0 = std::min(y0, ty(s.y[i]));
      y1 = std::max(y1, ty(s.y[i]));
    }
  if (!(x0 <= x1)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  auto px = [&](double v) { return L + (tx(v) - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double v) { return H - B - (ty(v) - y0) / (y1 - y0) * (H - T - B); };
  auto label = [](double v, bool log) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", log ? std::pow(10.0, v) : v);
    return std::string(buf);
  };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + short_num(W) + "\" height=\"" + short_num(H) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + short_num(W / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" + xml_escape(spec.title) +
         "</text>\n";
  out += "<rect x=\"" + short_num(L) + "\" y=\"" + short_num(T) + "\" width=\"" + short_num(W - L - R) + "\" height=\"" +
         short_num(H - T - B) + "\" fill=\"none\" stroke=\"black\"/>\n";
  const std::string fs = "font-size=\"11\"";
  out += "<text x=\"" + short_num(L) + "\" y=\"" + short_num(H - B + 16) + "\" " + fs + ">" + label(x0, spec.log_x) + "</text>\n";
  out += "<text x=\"" + short_num(W - R) + "\" y=\"" + short_num(H - B + 16) + "\" text-anchor=\"end\" " + fs + ">" +
         label(x1, spec.log_x) + "</text>\n";
  out += "<text x=\"" + short_num(L - 6) + "\" y=\"" + short_num(H - B) + "\" text-anchor=\"end\" " + fs + ">" +
         label(y0, spec.log_y) + "</text>\n";
  out += "<text x=\"" + short_num(L - 6) + "\" y=\"" + short_num(T + 10) + "\" text-anchor=\"end\" " + fs + ">" +
         label(y1, spec.log_y) + "</text>\n";
  out += "<text x=\"" + short_num((L + W - R) / 2) + "\" y=\"" + short_num(H - 20) + "\" text-anchor=\"middle\" font-size=\"13\">" +
         xml_escape(spec.x_label) + (spec.log_x ? " (log)" : "") + "</text>\n";
  out += "<text x=\"18\" y=\"" + short_num((T + H - B) / 2) + "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 " +
         short_num((T + H - B) / 2) + ")\">" + xml_escape(spec.y_label) + (spec.log_y ? " (log)" : "") + "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = colors[k % std::size(colors)];
    std::string pts;
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      pts += short_num(px(s.x[i])) + "," + short_num(py(s.y[i])) + " ";
    }
    out += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"" + pts +
           "\"/>\n";
    const double ly = T + 14 + 18 * double(k);
    out += "<line x1=\"" + short_num(W - R + 12) + "\" y1=\"" + short_num(ly - 4) + "\" x2=\"" + short_num(W - R + 32) + "\" y2=\"" +
           short_num(ly - 4) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + short_num(W - R + 38) + "\" y=\"" + short_num(ly) + "\" " + fs + ">" + xml_escape(s.name) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

// ---------------------------------------------------------------------------
// Files

inline std::ofstream open_out(const std::filesystem::path& path) {
  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::InvalidConfig, "cannot write '" + path.string() + "'");
  return os;
}

/// Per-eps CSVs, summary.json, convergence.svg and energy.svg under `dir`.
inline void write_sweep(const SweepReport& r, const ExperimentConfig& c, const std::filesystem::path& dir) {
  for (const auto& e : r.entries) {
    auto os = open_out(dir / (eps_tag(e.run.eps) + ".csv"));
    write_pair_csv(os, e.run.series);
  }
  open_out(dir / "summary.json") << sweep_summary_json(r, c).dump(2) << '\n';

  PlotSeries v{"sup |v - v_p|_H2", {}, {}}, w{"sup |w - w_p|_H1", {}, {}}, xi{"sup |xi|_H2", {}, {}};
  for (const auto& e : r.entries) {
    for (auto* s : {&v, &w, &xi}) s->x.push_back(e.run.eps);
    v.y.push_back(e.sup_conv_h2_v);
    w.y.push_back(e.sup_conv_h1_w);
    xi.y.push_back(e.sup_xi_h2);
  }
  open_out(dir / "convergence.svg") << svg_line_plot({"Convergence to the incompressible limit", "eps", "norm", true, true},
                                                     {v, w, xi});

  std::vector<PlotSeries> energy;
  for (const auto& e : r.entries) {
    PlotSeries s{"eps = " + short_num(e.run.eps), {}, {}};
    const double e2 = e.run.eps * e.run.eps;
    for (const auto& row : e.run.series) {
      s.x.push_back(row.t);
      s.y.push_back(row.E.total() / e2);
    }
    energy.push_back(std::move(s));
  }
  open_out(dir / "energy.svg") << svg_line_plot({"Perturbation energy E(t) / eps^2", "t", "E / eps^2", false, true},
                                                energy);
}

}  // namespace lowmach::harness
