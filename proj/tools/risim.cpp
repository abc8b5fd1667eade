// risim — RIS predictive beamforming simulator CLI.
//
// Subcommands:
//   lut       build a voltage -> reflection-coefficient table and export CSV
//   simulate  run one scenario, export per-step CSV and a loss summary
//   sweep     sweep one axis (or the Gauss-Markov grid) and tabulate losses
//   trace     validate / resample / transform a trajectory CSV

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "risim/config_io.hpp"
#include "risim/harness.hpp"

namespace {

using namespace risim;

std::vector<double> parse_value_list(const std::string& csv) {
  std::vector<double> out;
  std::string item;
  std::stringstream ss(csv);
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  return out;
}

int cmd_lut(const std::string& config_path, double v_min, double v_max, int points,
            const std::string& out_path) {
  sim::ScenarioConfig cfg;
  if (!config_path.empty()) cfg = sim::load_config(config_path);
  if (v_min >= 0.0) cfg.ris.lut_v_min = v_min;
  if (v_max >= 0.0) cfg.ris.lut_v_max = v_max;
  if (points > 0) cfg.ris.lut_points = points;
  const em::ReflectionLut lut =
      em::build_lut(cfg.ris.varactor, cfg.ris.cell, cfg.ris.lut_v_min, cfg.ris.lut_v_max,
                    cfg.ris.lut_points, cfg.ris.topology);
  if (out_path.empty() || out_path == "-")
    lut.write_csv(std::cout);
  else
    lut.write_csv(out_path);
  std::fprintf(stderr, "lut: %zu entries, max adjacent phase gap %.4f deg\n", lut.size(),
               lut.max_adjacent_phase_gap() * 180.0 / constants::pi);
  return 0;
}

int cmd_simulate(const std::string& config_path, std::uint64_t seed, bool seed_set,
                 int realizations, int workers, const std::string& out_path,
                 const std::string& summary_path, int export_realization) {
  sim::ScenarioConfig cfg = sim::load_config(config_path);
  if (seed_set) cfg.master_seed = seed;
  if (realizations > 0) cfg.realizations = realizations;

  const sim::ScenarioContext ctx = sim::ScenarioContext::build(cfg);
  for (const std::string& w : ctx.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());

  if (!out_path.empty()) {
    const sim::RunSeries series = sim::run_scenario(cfg, export_realization, ctx);
    for (const std::string& w : series.warnings)
      std::fprintf(stderr, "warning: %s\n", w.c_str());
    sim::export_series_csv(series, out_path);
    std::fprintf(stderr, "simulate: wrote %zu steps to %s (realization %d)\n",
                 series.steps.size(), out_path.c_str(), export_realization);
  }

  const sim::LossSummary summary = sim::aggregate_loss(cfg, cfg.realizations, workers);
  if (summary_path.empty() || summary_path == "-") {
    sim::export_summary(summary, cfg.name, std::cout);
  } else {
    std::ofstream f(summary_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + summary_path);
    sim::export_summary(summary, cfg.name, f);
  }
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& axis_name,
              const std::string& values_csv, const std::string& alpha_csv,
              const std::string& sigma_beta_csv, std::uint64_t seed, bool seed_set,
              int realizations, int workers, const std::string& out_path) {
  sim::ScenarioConfig cfg = sim::load_config(config_path);
  if (seed_set) cfg.master_seed = seed;
  const int reals = realizations > 0 ? realizations : cfg.realizations;

  sim::SweepAxis axis;
  if (axis_name == "sigma_n") axis = sim::SweepAxis::SigmaN;
  else if (axis_name == "meas_period") axis = sim::SweepAxis::MeasPeriod;
  else if (axis_name == "delay") axis = sim::SweepAxis::Delay;
  else if (axis_name == "delay_estimate") axis = sim::SweepAxis::DelayEstimate;
  else if (axis_name == "gm_grid") axis = sim::SweepAxis::GmGrid;
  else throw CLI::ValidationError(
      "--axis must be sigma_n | meas_period | delay | delay_estimate | gm_grid");

  std::vector<sim::SweepValue> values;
  if (axis == sim::SweepAxis::GmGrid) {
    if (alpha_csv.empty() || sigma_beta_csv.empty())
      throw CLI::ValidationError("gm_grid needs --alpha-values and --sigma-beta-values");
    for (double a : parse_value_list(alpha_csv))
      for (double b : parse_value_list(sigma_beta_csv)) values.push_back({a, b});
  } else {
    if (values_csv.empty()) throw CLI::ValidationError("--values is required");
    for (double v : parse_value_list(values_csv)) values.push_back({v, 0.0});
  }

  const auto points = sim::sweep(cfg, axis, values, reals, workers);
  if (out_path.empty() || out_path == "-")
    sim::export_sweep(points, axis, cfg.name, std::cout);
  else
    sim::export_sweep(points, axis, cfg.name, out_path);
  return 0;
}

int cmd_trace(const std::string& in_path, const std::string& out_path, bool validate_only,
              double resample_step, const std::string& method_name,
              const std::string& axis_map, const std::string& offset_csv) {
  kin::Trace tr = kin::load_trace_csv(in_path);
  std::fprintf(stderr, "trace: %zu samples over %.6g s (%s)\n", tr.size(), tr.span(),
               tr.is_acceleration ? "accelerations" : "positions");
  if (validate_only) return 0;

  if (!axis_map.empty() || !offset_csv.empty()) {
    kin::TraceTransform tf;
    if (!axis_map.empty()) {
      std::stringstream ss(axis_map);
      std::string tok;
      int i = 0;
      while (ss >> tok && i < 3) {
        if (tok == "x") tf.axis_map[i] = 0;
        else if (tok == "y") tf.axis_map[i] = 1;
        else if (tok == "z") tf.axis_map[i] = 2;
        else throw CLI::ValidationError("--axis-map entries must be x, y or z");
        ++i;
      }
      if (i != 3) throw CLI::ValidationError("--axis-map needs exactly 3 axes");
    }
    if (!offset_csv.empty()) {
      const auto v = parse_value_list(offset_csv);
      if (v.size() != 3) throw CLI::ValidationError("--offset needs 3 numbers");
      tf.offset = {v[0], v[1], v[2]};
    }
    tr = kin::apply_transform(tr, tf);
  }

  if (resample_step > 0.0) {
    const auto method = method_name == "linear" ? kin::ResampleMethod::Linear
                                                : kin::ResampleMethod::CubicSpline;
    const auto samples = kin::resample_trace(tr, resample_step, method);
    kin::Trace resampled;
    resampled.is_acceleration = tr.is_acceleration;
    resampled.times.resize(samples.size());
    resampled.values = samples;
    for (std::size_t i = 0; i < samples.size(); ++i)
      resampled.times[i] = tr.times.front() + static_cast<double>(i) * resample_step;
    tr = std::move(resampled);
    std::fprintf(stderr, "trace: resampled to %zu samples at %.6g s\n", tr.size(),
                 resample_step);
  }

  if (out_path.empty())
    throw CLI::ValidationError("--out is required unless --validate is given");
  kin::save_trace_csv(tr, out_path);
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"RIS predictive beamforming simulator"};
  app.require_subcommand(1);

  std::string config_path, out_path, summary_path;
  std::uint64_t seed = 0;
  int realizations = 0;
  int workers = 0;

  // lut
  auto* lut = app.add_subcommand("lut", "Build and export the voltage->Gamma table");
  double lut_vmin = -1.0, lut_vmax = -1.0;
  int lut_points = 0;
  lut->add_option("--config", config_path, "Scenario config providing the cell model");
  lut->add_option("--v-min", lut_vmin, "Sweep start voltage");
  lut->add_option("--v-max", lut_vmax, "Sweep end voltage");
  lut->add_option("--points", lut_points, "Number of table entries");
  lut->add_option("--out", out_path, "Output CSV path ('-' for stdout)");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Run one scenario");
  int export_realization = 0;
  simulate->add_option("--config", config_path, "Scenario config file")->required();
  auto* seed_opt = simulate->add_option("--seed", seed, "Master seed override");
  simulate->add_option("--realizations", realizations, "Realization count override");
  simulate->add_option("--workers", workers, "Worker threads (0 = all cores)");
  simulate->add_option("--out", out_path, "Per-step CSV output path");
  simulate->add_option("--summary-out", summary_path, "Summary path ('-' for stdout)");
  simulate->add_option("--realization", export_realization,
                       "Which realization the per-step CSV shows");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Sweep one axis and tabulate losses");
  std::string axis_name, values_csv, alpha_csv, sigma_beta_csv;
  sweep_cmd->add_option("--config", config_path, "Scenario config file")->required();
  sweep_cmd->add_option("--axis", axis_name,
                        "sigma_n | meas_period | delay | delay_estimate | gm_grid")
      ->required();
  sweep_cmd->add_option("--values", values_csv, "Comma-separated axis values");
  sweep_cmd->add_option("--alpha-values", alpha_csv, "gm_grid alpha values");
  sweep_cmd->add_option("--sigma-beta-values", sigma_beta_csv, "gm_grid sigma_beta values");
  auto* sweep_seed_opt = sweep_cmd->add_option("--seed", seed, "Master seed override");
  sweep_cmd->add_option("--realizations", realizations, "Realizations per point");
  sweep_cmd->add_option("--workers", workers, "Worker threads (0 = all cores)");
  sweep_cmd->add_option("--out", out_path, "Summary table path ('-' for stdout)");

  // trace
  auto* trace_cmd = app.add_subcommand("trace", "Validate / resample / transform a trace");
  std::string trace_in, method_name = "cubic", axis_map, offset_csv;
  double resample_step = 0.0;
  bool validate_only = false;
  trace_cmd->add_option("--in", trace_in, "Input trace CSV")->required();
  trace_cmd->add_option("--out", out_path, "Output trace CSV");
  trace_cmd->add_flag("--validate", validate_only, "Only validate the input");
  trace_cmd->add_option("--resample-step", resample_step, "Uniform grid step (s)");
  trace_cmd->add_option("--method", method_name, "linear | cubic (default cubic)");
  trace_cmd->add_option("--axis-map", axis_map, "Axis permutation, e.g. 'y x z'");
  trace_cmd->add_option("--offset", offset_csv, "Offset 'dx,dy,dz' (position traces)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (lut->parsed())
      return cmd_lut(config_path, lut_vmin, lut_vmax, lut_points, out_path);
    if (simulate->parsed())
      return cmd_simulate(config_path, seed, !seed_opt->empty(), realizations, workers,
                          out_path, summary_path, export_realization);
    if (sweep_cmd->parsed())
      return cmd_sweep(config_path, axis_name, values_csv, alpha_csv, sigma_beta_csv,
                       seed, !sweep_seed_opt->empty(), realizations, workers, out_path);
    if (trace_cmd->parsed())
      return cmd_trace(trace_in, out_path, validate_only, resample_step, method_name,
                       axis_map, offset_csv);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
