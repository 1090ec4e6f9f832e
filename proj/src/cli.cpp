#include "specgsa/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "specgsa/charts.hpp"
#include "specgsa/gsa.hpp"
#include "specgsa/optimize.hpp"
#include "specgsa/solver.hpp"

namespace specgsa::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config file '" + path + "' is not valid JSON: " + e.what());
  }
}

// Manifests are accepted as configs: their resolved parameter set is reused.
json config_parameters(const json& doc) {
  if (doc.contains("subcommand") && doc.contains("parameters")) return doc.at("parameters");
  return doc;
}

fs::path prepare_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir + "'");
  return fs::path(dir);
}

template <class Writer>
void write_file(const fs::path& path, Writer&& writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  writer(out);
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

void write_manifest(const fs::path& dir, const std::string& subcommand, const json& parameters,
                    std::vector<std::string> outputs) {
  outputs.push_back("manifest.json");
  json manifest;
  manifest["schema"] = "gsa_manifest_v1";
  manifest["subcommand"] = subcommand;
  manifest["tool_version"] = kToolVersion;
  manifest["parameters"] = parameters;
  manifest["outputs"] = outputs;
  manifest["created_utc"] = utc_timestamp();
  write_file(dir / "manifest.json", [&](std::ostream& o) { o << manifest.dump(2) << '\n'; });
}

json point_json(const SchemeSpec& spec, const GsaPoint& p) {
  json j;
  j["scheme"] = to_string(spec.scheme);
  j["Nc"] = spec.Nc;
  j["Pe"] = spec.Pe;
  j["kdx"] = p.kdx;
  j["G_re"] = p.G.real();
  j["G_im"] = p.G.imag();
  j["Gmod"] = p.Gmod;
  j["phi"] = p.phi;
  j["cN_over_c"] = p.cN_over_c;
  j["VgN_over_c"] = p.VgN_over_c;
  j["nuN_over_nu"] = p.nuN_over_nu ? json(*p.nuN_over_nu) : json(nullptr);
  j["Gphys_mod"] = p.Gphys_mod;
  j["ratio"] = p.ratio;
  j["degenerate"] = p.degenerate;
  return j;
}

// ---------------------------------------------------------------- point

struct PointOptions {
  std::string scheme;
  double nc = 0.0;
  double pe = 0.0;
  double kdx = 0.0;
};

int cmd_point(const PointOptions& opt, std::ostream& out) {
  const SchemeSpec spec{parse_scheme(opt.scheme), opt.nc, opt.pe};
  const GsaPoint p = gsa_point(spec, opt.kdx);
  out << point_json(spec, p).dump(2) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- chart

struct ChartOptions {
  std::string config;
  std::optional<std::string> scheme;
  std::optional<double> pe;
  std::optional<double> nc_min, nc_max, kdx_min, kdx_max;
  std::optional<std::size_t> nc_samples, kdx_samples;
  std::string out_dir = ".";
  std::string format = "both";
  bool plot_script = false;
  unsigned threads = 0;
};

struct AxisRange {
  double min;
  double max;
  std::size_t samples;
  std::optional<std::vector<double>> values;

  std::vector<double> resolve() const { return values ? *values : linspace(min, max, samples); }
};

void read_axis(const json& cfg, const char* key, AxisRange& axis) {
  if (!cfg.contains(key)) return;
  const json& a = cfg.at(key);
  if (a.is_array()) {
    axis.values = a.get<std::vector<double>>();
    return;
  }
  if (a.contains("min")) axis.min = a.at("min").get<double>();
  if (a.contains("max")) axis.max = a.at("max").get<double>();
  if (a.contains("samples")) axis.samples = a.at("samples").get<std::size_t>();
}

const char* kPlotScript = R"PY(#!/usr/bin/env python3
"""Contour plot of a chart.csv file: plot_chart.py [chart.csv] [field] [out.png]"""
import csv
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

path = sys.argv[1] if len(sys.argv) > 1 else "chart.csv"
field = sys.argv[2] if len(sys.argv) > 2 else "ratio"
target = sys.argv[3] if len(sys.argv) > 3 else "chart_" + field + ".png"

with open(path, newline="") as handle:
    rows = list(csv.DictReader(handle))
nc = sorted({float(r["Nc"]) for r in rows})
kdx = sorted({float(r["kdx"]) for r in rows})
row_of = {v: i for i, v in enumerate(nc)}
col_of = {v: j for i, v in enumerate(kdx) for j in [i]}
values = np.full((len(nc), len(kdx)), np.nan)
for r in rows:
    if r[field] != "":
        values[row_of[float(r["Nc"])], col_of[float(r["kdx"])]] = float(r[field])

fig, ax = plt.subplots(figsize=(6, 5))
filled = ax.contourf(nc, kdx, values.T, 40)
fig.colorbar(filled, ax=ax, label=field)
if field in ("Gmod", "ratio"):
    ax.contour(nc, kdx, values.T, levels=[1.0], colors="k", linestyles="--")
ax.set_xlabel("Nc")
ax.set_ylabel("k dx")
fig.tight_layout()
fig.savefig(target, dpi=150)
)PY";

int cmd_chart(const ChartOptions& opt, std::ostream& out) {
  json cfg = json::object();
  if (!opt.config.empty()) cfg = config_parameters(load_json(opt.config));

  Scheme scheme = Scheme::RK2;
  double pe = 0.0;
  AxisRange nc_axis{ChartDefaults::kNcMin, ChartDefaults::kNcMax, ChartDefaults::kNcSamples, {}};
  AxisRange kdx_axis{0.0, kPi, ChartDefaults::kKdxSamples, {}};
  if (cfg.contains("scheme")) scheme = parse_scheme(cfg.at("scheme").get<std::string>());
  if (cfg.contains("Pe")) pe = cfg.at("Pe").get<double>();
  read_axis(cfg, "Nc_axis", nc_axis);
  read_axis(cfg, "kdx_axis", kdx_axis);

  if (opt.scheme) scheme = parse_scheme(*opt.scheme);
  if (opt.pe) pe = *opt.pe;
  if (opt.nc_min || opt.nc_max || opt.nc_samples) nc_axis.values.reset();
  if (opt.kdx_min || opt.kdx_max || opt.kdx_samples) kdx_axis.values.reset();
  if (opt.nc_min) nc_axis.min = *opt.nc_min;
  if (opt.nc_max) nc_axis.max = *opt.nc_max;
  if (opt.nc_samples) nc_axis.samples = *opt.nc_samples;
  if (opt.kdx_min) kdx_axis.min = *opt.kdx_min;
  if (opt.kdx_max) kdx_axis.max = *opt.kdx_max;
  if (opt.kdx_samples) kdx_axis.samples = *opt.kdx_samples;
  if (opt.format != "csv" && opt.format != "json" && opt.format != "both") {
    throw ValidationError("format must be csv, json or both");
  }

  const ChartGrid grid = sweep(scheme, pe, nc_axis.resolve(), kdx_axis.resolve(), opt.threads);
  const auto neutral = neutral_boundary(grid, 1.0, ChartField::Ratio);

  const fs::path dir = prepare_dir(opt.out_dir);
  std::vector<std::string> outputs;
  if (opt.format != "json") {
    write_file(dir / "chart.csv", [&](std::ostream& o) { write_chart_csv(o, grid); });
    outputs.push_back("chart.csv");
  }
  if (opt.format != "csv") {
    write_file(dir / "chart.json", [&](std::ostream& o) { o << chart_to_json(grid).dump() << '\n'; });
    outputs.push_back("chart.json");
  }
  json contour;
  contour["schema"] = "gsa_contour_v1";
  contour["field"] = "ratio";
  contour["level"] = 1.0;
  contour["polylines"] = json::array();
  for (const Polyline& line : neutral) {
    json pts = json::array();
    for (const ContourPoint& p : line) pts.push_back({p.Nc, p.kdx});
    contour["polylines"].push_back(std::move(pts));
  }
  write_file(dir / "neutral_ratio.json", [&](std::ostream& o) { o << contour.dump() << '\n'; });
  outputs.push_back("neutral_ratio.json");
  if (opt.plot_script) {
    write_file(dir / "plot_chart.py", [&](std::ostream& o) { o << kPlotScript; });
    outputs.push_back("plot_chart.py");
  }

  json params;
  params["scheme"] = to_string(scheme);
  params["Pe"] = pe;
  params["Nc_axis"] = grid.Nc_axis;
  params["kdx_axis"] = grid.kdx_axis;
  params["phase_difference_step"] = kPhaseDiffStep;
  write_manifest(dir, "chart", params, outputs);

  json summary;
  summary["scheme"] = to_string(scheme);
  summary["Pe"] = pe;
  summary["rows"] = grid.rows();
  summary["cols"] = grid.cols();
  summary["neutral_polylines"] = neutral.size();
  summary["outputs"] = outputs;
  out << summary.dump(2) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- optimize

struct OptimizeOptions {
  std::string scheme;
  double pe = 0.01;
  std::string objective = "maxabs";
  std::string policy = "exclude-unstable";
  std::size_t kdx_samples = 2048;
  double lo = default_search_interval().lo;
  double hi = default_search_interval().hi;
  std::string out_dir;
};

int cmd_optimize(const OptimizeOptions& opt, std::ostream& out) {
  Objective objective;
  objective.kind = parse_objective_kind(opt.objective);
  objective.policy = parse_instability_policy(opt.policy);
  objective.kdx_samples = opt.kdx_samples;
  const Scheme scheme = parse_scheme(opt.scheme);
  const OptimalResult result = optimal_nc(scheme, opt.pe, objective, {opt.lo, opt.hi});
  const json doc = optimal_to_json(result);
  if (!opt.out_dir.empty()) {
    const fs::path dir = prepare_dir(opt.out_dir);
    write_file(dir / "optimum.json", [&](std::ostream& o) { o << doc.dump(2) << '\n'; });
    json params;
    params["scheme"] = to_string(scheme);
    params["Pe"] = opt.pe;
    params["objective"] = to_string(objective.kind);
    params["policy"] = to_string(objective.policy);
    params["kdx_samples"] = objective.kdx_samples;
    params["search_interval"] = {opt.lo, opt.hi};
    write_manifest(dir, "optimize", params, {"optimum.json"});
  }
  out << doc.dump(2) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- simulate / budget

struct SimOptions {
  std::string config;
  std::optional<std::string> figure;
  std::optional<std::string> scheme;
  std::optional<double> nc, pe;
  std::optional<std::int64_t> steps;
  std::optional<std::int64_t> stride;
  std::optional<std::int64_t> budget_step;
  std::string out_dir = ".";
  bool budget = false;
};

struct ResolvedSim {
  SimConfig cfg;
  std::optional<std::string> figure;
  std::int64_t stride = 0;
};

// The published time step of the fig1/fig2 runs, echoed next to the
// derived value.
constexpr double kReportedDt = 4.884e-4;

ResolvedSim resolve_sim(const SimOptions& opt) {
  json cfg = json::object();
  if (!opt.config.empty()) cfg = config_parameters(load_json(opt.config));

  ResolvedSim r;
  Scheme scheme = Scheme::RK4;
  if (cfg.contains("scheme")) scheme = parse_scheme(cfg.at("scheme").get<std::string>());
  if (opt.scheme) scheme = parse_scheme(*opt.scheme);
  if (cfg.contains("figure")) r.figure = cfg.at("figure").get<std::string>();
  if (opt.figure) r.figure = opt.figure;

  SimConfig& c = r.cfg;
  c = r.figure ? figure_preset(*r.figure, scheme) : SimConfig{};
  c.scheme = scheme;
  if (cfg.contains("N")) c.N = cfg.at("N").get<std::size_t>();
  if (cfg.contains("L")) c.L = cfg.at("L").get<double>();
  if (cfg.contains("c")) c.c = cfg.at("c").get<double>();
  if (cfg.contains("steps")) c.steps = cfg.at("steps").get<std::int64_t>();
  if (cfg.contains("packet")) {
    const json& p = cfg.at("packet");
    if (p.contains("x0")) c.ic.x0 = p.at("x0").get<double>();
    if (p.contains("a")) c.ic.a = p.at("a").get<double>();
    if (p.contains("k0dx")) c.ic.k0dx = p.at("k0dx").get<double>();
  }
  if (cfg.contains("snapshot_stride")) r.stride = cfg.at("snapshot_stride").get<std::int64_t>();

  // Step sizes: physical values win over nondimensional ones; flags win over the file.
  const double dx = c.dx();
  if (cfg.contains("dt")) {
    c.dt = cfg.at("dt").get<double>();
  } else if (cfg.contains("Nc")) {
    c.dt = cfg.at("Nc").get<double>() * dx / c.c;
  }
  if (opt.nc) c.dt = *opt.nc * dx / c.c;
  if (!(c.dt > 0.0)) throw ValidationError("time step not set: give --figure, dt or Nc");
  if (cfg.contains("nu")) {
    c.nu = cfg.at("nu").get<double>();
  } else if (cfg.contains("Pe")) {
    c.nu = cfg.at("Pe").get<double>() * dx * dx / c.dt;
  }
  if (opt.pe) c.nu = *opt.pe * dx * dx / c.dt;
  if (opt.steps) c.steps = *opt.steps;
  if (opt.stride) r.stride = *opt.stride;
  if (r.stride < 0) throw ValidationError("snapshot stride must be non-negative");
  c.validate();
  return r;
}

json sim_parameters(const ResolvedSim& r) {
  const SimConfig& c = r.cfg;
  json p;
  if (r.figure) p["figure"] = *r.figure;
  p["scheme"] = to_string(c.scheme);
  p["N"] = c.N;
  p["L"] = c.L;
  p["c"] = c.c;
  p["nu"] = c.nu;
  p["dt"] = c.dt;
  p["steps"] = c.steps;
  p["packet"] = {{"x0", c.ic.x0}, {"a", c.ic.a}, {"k0dx", c.ic.k0dx}};
  p["snapshot_stride"] = r.stride;
  p["derived"] = {{"dx", c.dx()}, {"Nc", c.Nc()}, {"Pe", c.Pe()}, {"k0", c.k0()}};
  if (r.figure && (*r.figure == "fig1" || *r.figure == "fig2")) p["derived"]["reported_dt"] = kReportedDt;
  return p;
}

int cmd_simulate(const SimOptions& opt, std::ostream& out) {
  const ResolvedSim r = resolve_sim(opt);
  const SimConfig& cfg = r.cfg;
  const RunResult result = run(cfg, r.stride);

  const fs::path dir = prepare_dir(opt.out_dir);
  const auto x = grid_points(cfg);
  std::vector<std::string> outputs;
  for (const Snapshot& snap : result.snapshots) {
    const std::string name = "snap_" + std::to_string(snap.state.step) + ".csv";
    write_file(dir / name, [&](std::ostream& o) { write_snapshot_csv(o, x, snap.state.u, snap.exact); });
    outputs.push_back(name);
  }
  write_file(dir / "norms.csv", [&](std::ostream& o) { write_norms_csv(o, result.norms); });
  outputs.push_back("norms.csv");

  std::optional<ErrorBudget> budget;
  if (opt.budget) {
    budget = error_budget(cfg, opt.budget_step.value_or(cfg.steps));
    write_file(dir / "budget.csv", [&](std::ostream& o) { write_budget_csv(o, x, *budget); });
    outputs.push_back("budget.csv");
  }
  json params = sim_parameters(r);
  if (opt.budget) params["budget_step"] = opt.budget_step.value_or(cfg.steps);
  write_manifest(dir, "simulate", params, outputs);

  const NormRecord& last = result.norms.back();
  json summary;
  summary["parameters"] = params;
  summary["final_step"] = last.step;
  summary["final_t"] = last.t;
  summary["final_l2_error"] = last.l2_error;
  summary["final_linf_error"] = last.linf_error;
  summary["packet_amplitude"] = linf_norm(result.snapshots.front().state.u);
  summary["outputs"] = outputs;
  out << summary.dump(2) << '\n';
  return kExitOk;
}

int cmd_budget(const SimOptions& opt, std::ostream& out) {
  const ResolvedSim r = resolve_sim(opt);
  const SimConfig& cfg = r.cfg;
  const std::int64_t n = opt.budget_step.value_or(cfg.steps);
  const ErrorBudget budget = error_budget(cfg, n);

  const fs::path dir = prepare_dir(opt.out_dir);
  const auto x = grid_points(cfg);
  write_file(dir / "budget.csv", [&](std::ostream& o) { write_budget_csv(o, x, budget); });
  json params = sim_parameters(r);
  params["budget_step"] = n;
  write_manifest(dir, "budget", params, {"budget.csv"});

  const double dx = cfg.dx();
  json summary;
  summary["parameters"] = params;
  summary["t"] = budget.t;
  summary["l2_norms"] = {
      {"term_diff_mismatch", l2_norm(budget.term_diffusion_mismatch, dx)},
      {"term_boundary", l2_norm(budget.term_boundary, dx)},
      {"term_dispersion", l2_norm(budget.term_dispersion, dx)},
      {"term_phase", l2_norm(budget.term_phase, dx)},
      {"total", l2_norm(budget.total(), dx)},
  };
  summary["outputs"] = {"budget.csv", "manifest.json"};
  out << summary.dump(2) << '\n';
  return kExitOk;
}

void add_sim_options(CLI::App* sub, SimOptions& opt, bool for_budget) {
  sub->add_option("--config", opt.config, "JSON config or manifest file");
  sub->add_option("--figure", opt.figure, "preset: fig1, fig2 or fig3");
  sub->add_option("--scheme", opt.scheme, "rk2, rk3, rk4 or exact");
  sub->add_option("--nc", opt.nc, "CFL number (sets dt)");
  sub->add_option("--pe", opt.pe, "Peclet number (sets nu)");
  sub->add_option("--steps", opt.steps, "number of time steps");
  sub->add_option("--out", opt.out_dir, "output directory");
  if (for_budget) {
    sub->add_option("--step", opt.budget_step, "step count n at which the budget is evaluated");
  } else {
    sub->add_option("--stride", opt.stride, "snapshot stride (0 = first and last step only)");
    sub->add_flag("--budget", opt.budget, "also write budget.csv at the final step");
    sub->add_option("--budget-step", opt.budget_step, "step count for --budget");
  }
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Global spectral analysis of Fourier-spectral Runge-Kutta schemes", "specgsa"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  PointOptions point;
  auto* point_cmd = app.add_subcommand("point", "GSA diagnostics at one (scheme, Nc, Pe, kdx)");
  point_cmd->add_option("--scheme", point.scheme, "rk2, rk3, rk4 or exact")->required();
  point_cmd->add_option("--nc", point.nc, "CFL number")->required();
  point_cmd->add_option("--pe", point.pe, "Peclet number");
  point_cmd->add_option("--kdx", point.kdx, "nondimensional wavenumber in [0, pi]")->required();

  ChartOptions chart;
  auto* chart_cmd = app.add_subcommand("chart", "sweep diagnostics over the (Nc, kdx) plane");
  chart_cmd->add_option("--config", chart.config, "JSON config or manifest file");
  chart_cmd->add_option("--scheme", chart.scheme, "rk2, rk3, rk4 or exact");
  chart_cmd->add_option("--pe", chart.pe, "Peclet number");
  chart_cmd->add_option("--nc-min", chart.nc_min);
  chart_cmd->add_option("--nc-max", chart.nc_max);
  chart_cmd->add_option("--nc-samples", chart.nc_samples);
  chart_cmd->add_option("--kdx-min", chart.kdx_min);
  chart_cmd->add_option("--kdx-max", chart.kdx_max);
  chart_cmd->add_option("--kdx-samples", chart.kdx_samples);
  chart_cmd->add_option("--out", chart.out_dir, "output directory");
  chart_cmd->add_option("--format", chart.format, "csv, json or both");
  chart_cmd->add_flag("--plot-script", chart.plot_script, "also write plot_chart.py");
  chart_cmd->add_option("--threads", chart.threads, "worker threads (0 = all cores)");

  OptimizeOptions optimize;
  auto* opt_cmd = app.add_subcommand("optimize", "optimal CFL number for a scheme at fixed Pe");
  opt_cmd->add_option("--scheme", optimize.scheme, "rk2, rk3, rk4 or exact")->required();
  opt_cmd->add_option("--pe", optimize.pe, "Peclet number");
  opt_cmd->add_option("--objective", optimize.objective, "maxabs or l2");
  opt_cmd->add_option("--policy", optimize.policy, "exclude-unstable or penalize");
  opt_cmd->add_option("--kdx-samples", optimize.kdx_samples, "samples over (0, pi]");
  opt_cmd->add_option("--lo", optimize.lo, "lower end of the Nc search interval");
  opt_cmd->add_option("--hi", optimize.hi, "upper end of the Nc search interval");
  opt_cmd->add_option("--out", optimize.out_dir, "also write optimum.json and a manifest here");

  SimOptions simulate;
  auto* sim_cmd = app.add_subcommand("simulate", "wave-packet run with error norms and snapshots");
  add_sim_options(sim_cmd, simulate, false);

  SimOptions budget;
  auto* budget_cmd = app.add_subcommand("budget", "error-forcing decomposition at step n");
  add_sim_options(budget_cmd, budget, true);

  std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::Success& e) {
    out << (dynamic_cast<const CLI::CallForVersion*>(&e) ? std::string(e.what()) + "\n" : app.help());
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  try {
    if (*point_cmd) return cmd_point(point, out);
    if (*chart_cmd) return cmd_chart(chart, out);
    if (*opt_cmd) return cmd_optimize(optimize, out);
    if (*sim_cmd) return cmd_simulate(simulate, out);
    if (*budget_cmd) return cmd_budget(budget, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const NoAdmissibleNc& e) {
    err << "error: " << e.what() << '\n';
    return kExitNoAdmissible;
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const json::exception& e) {
    err << "error: bad config value: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitValidation;
}

}  // namespace specgsa::cli
