#include "risim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace risim::sim {

double ScenarioConfig::window_start() const {
  if (loss_window_start_s >= 0.0) return loss_window_start_s;
  // Past the third measurement (full observer warm-up) plus the delay fill.
  const double warmup = 2.0 * timing.meas_t + timing.t_d_true + 2.0 * timing.step_t;
  return std::max(0.3, warmup);
}

double ScenarioConfig::window_end() const {
  return loss_window_end_s >= 0.0 ? loss_window_end_s : duration_s;
}

void ScenarioConfig::validate() const {
  if (!(duration_s > 0.0))
    throw std::invalid_argument("scenario: duration_s must be > 0");
  if (realizations < 1)
    throw std::invalid_argument("scenario: realizations must be >= 1");
  timing.validate();
  if (sigma_n < 0.0) throw std::invalid_argument("scenario: sigma_n must be >= 0");
  if (!(tx_power_w > 0.0))
    throw std::invalid_argument("scenario: tx_power_w must be > 0");
  if (tx_pos.x <= 0.0)
    throw std::invalid_argument("scenario: TX must be strictly in front (x > 0)");
  antennas.validate();
  ris.cell.validate();
  ris.varactor.validate();
  if (ris.rows < 1 || ris.cols < 1)
    throw std::invalid_argument("scenario: RIS dimensions must be >= 1");
  if (kind == ScenarioKind::GaussMarkov) gm.validate();
  if (kind == ScenarioKind::Trace && trace.file.empty())
    throw std::invalid_argument("scenario: trace kind needs a trace file");
}

ScenarioContext ScenarioContext::build(const ScenarioConfig& cfg) {
  cfg.validate();
  const double lambda = cfg.ris.cell.wavelength();

  scatter::ArrayGeometry geom{cfg.ris.rows, cfg.ris.cols, cfg.ris.cell.lattice_d};
  ScenarioContext ctx{
      em::build_lut(cfg.ris.varactor, cfg.ris.cell, cfg.ris.lut_v_min, cfg.ris.lut_v_max,
                    cfg.ris.lut_points, cfg.ris.topology),
      geom.cell_positions(),
      scatter::PowerEvaluator(geom, cfg.tx_pos, cfg.tx_power_w, cfg.antennas, lambda),
      lambda,
      cfg.ris.cell.wavenumber(),
      beam::VoltageMatrix(cfg.ris.rows, cfg.ris.cols),
  };

  // Powered-but-unconfigured RIS: every varactor at the sweep floor.
  const double v0 = std::clamp(0.0, cfg.ris.lut_v_min, cfg.ris.lut_v_max);
  const em::SurfaceImpedances zs = em::surface_impedances(cfg.ris.cell);
  const em::Complex g0 = em::reflection_coefficient(
      em::cell_impedance(
          em::varactor_impedance(em::junction_capacitance(v0, cfg.ris.varactor),
                                 cfg.ris.cell, cfg.ris.varactor, cfg.ris.topology),
          zs.patch, zs.slab),
      cfg.ris.cell);
  for (std::size_t i = 0; i < ctx.unconfigured_fill.volts.size(); ++i) {
    ctx.unconfigured_fill.volts[i] = v0;
    ctx.unconfigured_fill.gammas[i] = g0;
  }

  double duration = cfg.duration_s;
  if (cfg.kind == ScenarioKind::Trace) {
    kin::Trace tr = kin::load_trace_csv(cfg.trace.file);
    tr = kin::apply_transform(tr, cfg.trace.transform);
    ctx.trace_is_accel = tr.is_acceleration;
    ctx.trace_samples = kin::resample_trace(tr, cfg.timing.step_t, cfg.trace.method);
    const double span = tr.span();
    if (span < duration) {
      duration = span;
      ctx.warnings.push_back("duration clamped to trace span (" +
                             std::to_string(span) + " s)");
    }
  }
  ctx.total_steps = static_cast<std::int64_t>(std::llround(duration / cfg.timing.step_t));
  if (ctx.total_steps < 1)
    throw std::invalid_argument("scenario: duration shorter than one step");
  if (cfg.kind == ScenarioKind::Trace &&
      ctx.total_steps > static_cast<std::int64_t>(ctx.trace_samples.size()))
    ctx.total_steps = static_cast<std::int64_t>(ctx.trace_samples.size());
  return ctx;
}

namespace {

std::int64_t delay_depth(const obs::TimingParams& tp, std::vector<std::string>* warnings) {
  const double ratio = tp.t_d_true / tp.step_t;
  const auto d = static_cast<std::int64_t>(std::llround(ratio));
  if (std::abs(ratio - static_cast<double>(d)) > 1e-9 && warnings)
    warnings->push_back("t_d is not an integral multiple of T; delay rounded to " +
                        std::to_string(d) + " steps");
  return d;
}

} // namespace

RunSeries run_scenario(const ScenarioConfig& cfg, int realization_index) {
  const ScenarioContext ctx = ScenarioContext::build(cfg);
  return run_scenario(cfg, realization_index, ctx);
}

RunSeries run_scenario(const ScenarioConfig& cfg, int realization_index,
                       const ScenarioContext& ctx, const PipelineOverrides* overrides) {
  const obs::TimingParams& tp = cfg.timing;
  const std::int64_t steps_per_meas = tp.steps_per_meas();
  const std::int64_t total = ctx.total_steps;

  RunSeries series;
  series.step_t = tp.step_t;
  series.warnings = ctx.warnings;
  const std::int64_t d = delay_depth(tp, &series.warnings);

  Rng rng_meas = make_stream(cfg.master_seed, static_cast<std::uint64_t>(realization_index),
                             RngStream::Measurement);
  Rng rng_gm = make_stream(cfg.master_seed, static_cast<std::uint64_t>(realization_index),
                           RngStream::GaussMarkov);

  obs::ObserverState obs_s, obs_a;
  beam::DelayLine dl_naive(static_cast<int>(d), ctx.unconfigured_fill);
  beam::DelayLine dl_ops(static_cast<int>(d), ctx.unconfigured_fill);
  beam::DelayLine dl_opa(static_cast<int>(d), ctx.unconfigured_fill);

  kin::MotionState state = cfg.initial_state;
  if (cfg.kind == ScenarioKind::Trace && ctx.trace_is_accel)
    state = {cfg.trace.initial_pos, cfg.trace.initial_vel};
  const kin::MeasurementModel meas_model{cfg.sigma_n};

  beam::PhaseMatrix phases(cfg.ris.rows, cfg.ris.cols);
  beam::VoltageMatrix v_ideal(cfg.ris.rows, cfg.ris.cols);
  beam::VoltageMatrix v_ops(cfg.ris.rows, cfg.ris.cols);
  beam::VoltageMatrix v_opa(cfg.ris.rows, cfg.ris.cols);
  beam::VoltageMatrix naive_hold = ctx.unconfigured_fill;
  Vec3 last_meas;

  series.steps.reserve(total);
  series.true_pos.reserve(total);
  series.naive_target.reserve(total);
  series.ops_pred.reserve(total);
  series.opa_pred.reserve(total);

  for (std::int64_t k = 0; k < total; ++k) {
    const double t = static_cast<double>(k) * tp.step_t;
    const Vec3 true_pos = (cfg.kind == ScenarioKind::Trace && !ctx.trace_is_accel)
                              ? ctx.trace_samples[static_cast<std::size_t>(k)]
                              : state.pos;

    if (k % steps_per_meas == 0) {
      const kin::MotionState meas_state{true_pos, {}};
      last_meas = kin::measure(meas_state, meas_model, rng_meas);
      obs_s = obs::observer_update(obs_s, last_meas, obs::Mode::Ops, tp.meas_t);
      obs_a = obs::observer_update(obs_a, last_meas, obs::Mode::Opa, tp.meas_t);
      beam::optimal_phase_matrix_into(cfg.tx_pos, last_meas, ctx.cells, ctx.k0, phases);
      beam::phases_to_voltages_into(ctx.lut, phases, naive_hold);
    }

    // Ideal: true position, no delay.
    beam::optimal_phase_matrix_into(cfg.tx_pos, true_pos, ctx.cells, ctx.k0, phases);
    beam::phases_to_voltages_into(ctx.lut, phases, v_ideal);

    // OPS / OPA: predict ahead by the elapsed time plus the delay estimate.
    const double t_adv = obs::time_advance(k, obs_s, tp);
    Vec3 ops_target = obs::predict_position(obs_s, t_adv, obs::Mode::Ops);
    if (overrides && overrides->ops_uses_true_position) ops_target = true_pos;
    const Vec3 opa_target = obs::predict_position(obs_a, t_adv, obs::Mode::Opa);
    beam::optimal_phase_matrix_into(cfg.tx_pos, ops_target, ctx.cells, ctx.k0, phases);
    beam::phases_to_voltages_into(ctx.lut, phases, v_ops);
    beam::optimal_phase_matrix_into(cfg.tx_pos, opa_target, ctx.cells, ctx.k0, phases);
    beam::phases_to_voltages_into(ctx.lut, phases, v_opa);

    const beam::VoltageMatrix& eff_naive = dl_naive.apply(naive_hold);
    const beam::VoltageMatrix& eff_ops = dl_ops.apply(v_ops);
    const beam::VoltageMatrix& eff_opa = dl_opa.apply(v_opa);

    const Grid<em::Complex>* mats[4] = {&v_ideal.gammas, &eff_naive.gammas,
                                        &eff_ops.gammas, &eff_opa.gammas};
    double watts[4];
    ctx.evaluator.evaluate_batch(mats, 4, true_pos, watts);

    series.steps.push_back({k, t, scatter::watts_to_dbm(watts[0]),
                            scatter::watts_to_dbm(watts[1]),
                            scatter::watts_to_dbm(watts[2]),
                            scatter::watts_to_dbm(watts[3])});
    series.true_pos.push_back(true_pos);
    series.naive_target.push_back(last_meas);
    series.ops_pred.push_back(ops_target);
    series.opa_pred.push_back(opa_target);

    // Advance the true motion to k+1.
    switch (cfg.kind) {
      case ScenarioKind::Linear:
        state = kin::linear_step(state, cfg.accel, tp.step_t);
        break;
      case ScenarioKind::GaussMarkov:
        state = kin::gauss_markov_step(state, cfg.gm, tp.step_t, rng_gm);
        break;
      case ScenarioKind::Trace:
        if (ctx.trace_is_accel && k + 1 < total)
          state = kin::linear_step(state, ctx.trace_samples[static_cast<std::size_t>(k)],
                                   tp.step_t);
        break;
    }
  }
  return series;
}

double pairwise_sum(const std::vector<double>& values) {
  struct Impl {
    static double sum(const double* v, std::size_t n) {
      if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
      }
      const std::size_t h = n / 2;
      return sum(v, h) + sum(v + h, n - h);
    }
  };
  return Impl::sum(values.data(), values.size());
}

LossSummary power_loss(const RunSeries& series, double window_start, double window_end) {
  if (!(window_end >= window_start))
    throw std::invalid_argument("power_loss: empty window");
  LossSummary s;
  s.window_start = window_start;
  s.window_end = window_end;
  std::vector<double> ln, lo, la;
  for (const StepRecord& r : series.steps) {
    if (r.t < window_start - 1e-12 || r.t > window_end + 1e-12) continue;
    if (scatter::dbm_flagged(r.pr_ideal_dbm) || scatter::dbm_flagged(r.pr_naive_dbm) ||
        scatter::dbm_flagged(r.pr_ops_dbm) || scatter::dbm_flagged(r.pr_opa_dbm)) {
      ++s.flagged;
      continue;
    }
    ln.push_back(r.pr_ideal_dbm - r.pr_naive_dbm);
    lo.push_back(r.pr_ideal_dbm - r.pr_ops_dbm);
    la.push_back(r.pr_ideal_dbm - r.pr_opa_dbm);
  }
  if (ln.empty())
    throw std::invalid_argument("power_loss: window contains no usable samples");
  s.samples = static_cast<std::int64_t>(ln.size());
  const double n = static_cast<double>(ln.size());
  s.mean_naive_db = pairwise_sum(ln) / n;
  s.mean_ops_db = pairwise_sum(lo) / n;
  s.mean_opa_db = pairwise_sum(la) / n;
  s.max_naive_db = *std::max_element(ln.begin(), ln.end());
  s.max_ops_db = *std::max_element(lo.begin(), lo.end());
  s.max_opa_db = *std::max_element(la.begin(), la.end());
  return s;
}

void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
  if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min(workers, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

LossSummary aggregate_loss(const ScenarioConfig& cfg, int realizations, int workers) {
  if (realizations < 1)
    throw std::invalid_argument("aggregate_loss: realizations must be >= 1");
  const ScenarioContext ctx = ScenarioContext::build(cfg);
  const double w0 = cfg.window_start();
  const double w1 = std::min(cfg.window_end(),
                             static_cast<double>(ctx.total_steps - 1) * cfg.timing.step_t);

  std::vector<LossSummary> per_run(realizations);
  parallel_for(realizations, workers, [&](int r) {
    const RunSeries series = run_scenario(cfg, r, ctx);
    per_run[r] = power_loss(series, w0, w1);
  });

  LossSummary out = per_run.front();
  out.realizations = realizations;
  out.master_seed = cfg.master_seed;
  std::vector<double> mn(realizations), mo(realizations), ma(realizations);
  for (int r = 0; r < realizations; ++r) {
    mn[r] = per_run[r].mean_naive_db;
    mo[r] = per_run[r].mean_ops_db;
    ma[r] = per_run[r].mean_opa_db;
  }
  out.mean_naive_db = pairwise_sum(mn) / realizations;
  out.mean_ops_db = pairwise_sum(mo) / realizations;
  out.mean_opa_db = pairwise_sum(ma) / realizations;
  out.samples = 0;
  out.flagged = 0;
  for (const LossSummary& s : per_run) {
    out.samples += s.samples;
    out.flagged += s.flagged;
    out.max_naive_db = std::max(out.max_naive_db, s.max_naive_db);
    out.max_ops_db = std::max(out.max_ops_db, s.max_ops_db);
    out.max_opa_db = std::max(out.max_opa_db, s.max_opa_db);
  }
  return out;
}

const char* sweep_axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::SigmaN: return "sigma_n";
    case SweepAxis::MeasPeriod: return "meas_period";
    case SweepAxis::Delay: return "delay";
    case SweepAxis::DelayEstimate: return "delay_estimate";
    case SweepAxis::GmGrid: return "gm_grid";
  }
  return "?";
}

namespace {

ScenarioConfig apply_sweep_value(const ScenarioConfig& base, SweepAxis axis,
                                 const SweepValue& v) {
  ScenarioConfig cfg = base;
  switch (axis) {
    case SweepAxis::SigmaN:
      cfg.sigma_n = v.a;
      break;
    case SweepAxis::MeasPeriod:
      cfg.timing.meas_t = v.a;
      break;
    case SweepAxis::Delay:
      cfg.timing.t_d_true = v.a;
      cfg.timing.t_d_hat = v.a;
      break;
    case SweepAxis::DelayEstimate:
      cfg.timing.t_d_hat = v.a;
      break;
    case SweepAxis::GmGrid:
      cfg.gm.alpha = v.a;
      cfg.gm.sigma_beta = v.b;
      break;
  }
  return cfg;
}

} // namespace

std::vector<SweepPoint> sweep(const ScenarioConfig& cfg, SweepAxis axis,
                              const std::vector<SweepValue>& values, int realizations,
                              int workers) {
  if (values.empty()) throw std::invalid_argument("sweep: values must be non-empty");
  std::vector<SweepPoint> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    ScenarioConfig point_cfg = apply_sweep_value(cfg, axis, values[i]);
    // Independent but reproducible stream block per point.
    point_cfg.master_seed = mix_seed(cfg.master_seed, i + 1);
    out[i].value = values[i];
    out[i].summary = aggregate_loss(point_cfg, realizations, workers);
    out[i].summary.master_seed = cfg.master_seed;
  }
  return out;
}

namespace {

void write_row(std::ostream& out, const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  out << buf;
}

} // namespace

void export_series_csv(const RunSeries& series, std::ostream& out) {
  out << "k,t_s,pr_ideal_dbm,pr_naive_dbm,pr_ops_dbm,pr_opa_dbm,"
         "loss_naive_db,loss_ops_db,loss_opa_db\n";
  char line[360];
  for (const StepRecord& r : series.steps) {
    std::snprintf(line, sizeof(line),
                  "%lld,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  static_cast<long long>(r.k), r.t, r.pr_ideal_dbm, r.pr_naive_dbm,
                  r.pr_ops_dbm, r.pr_opa_dbm, r.pr_ideal_dbm - r.pr_naive_dbm,
                  r.pr_ideal_dbm - r.pr_ops_dbm, r.pr_ideal_dbm - r.pr_opa_dbm);
    out << line;
  }
}

void export_series_csv(const RunSeries& series, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  export_series_csv(series, f);
}

void export_summary(const LossSummary& s, const std::string& scenario_name,
                    std::ostream& out) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "risim-summary v1\n"
                "scenario = %s\n"
                "window_s = %.17g %.17g\n"
                "realizations = %d\n"
                "master_seed = %llu\n"
                "samples = %lld\n"
                "flagged = %lld\n",
                scenario_name.c_str(), s.window_start, s.window_end, s.realizations,
                static_cast<unsigned long long>(s.master_seed),
                static_cast<long long>(s.samples), static_cast<long long>(s.flagged));
  out << buf;
  std::snprintf(buf, sizeof(buf),
                "loss_naive_mean_db = %.17g\nloss_naive_max_db = %.17g\n"
                "loss_ops_mean_db = %.17g\nloss_ops_max_db = %.17g\n"
                "loss_opa_mean_db = %.17g\nloss_opa_max_db = %.17g\n",
                s.mean_naive_db, s.max_naive_db, s.mean_ops_db, s.max_ops_db,
                s.mean_opa_db, s.max_opa_db);
  out << buf;
}

void export_sweep(const std::vector<SweepPoint>& points, SweepAxis axis,
                  const std::string& scenario_name, std::ostream& out) {
  out << "risim-sweep v1\n";
  out << "scenario = " << scenario_name << "\n";
  out << "axis = " << sweep_axis_name(axis) << "\n";
  if (!points.empty()) {
    const LossSummary& s0 = points.front().summary;
    char buf[256];
    std::snprintf(buf, sizeof(buf), "realizations = %d\nmaster_seed = %llu\n",
                  s0.realizations, static_cast<unsigned long long>(s0.master_seed));
    out << buf;
  }
  out << "columns = value value2 window_start_s window_end_s "
         "loss_naive_mean_db loss_ops_mean_db loss_opa_mean_db "
         "loss_naive_max_db loss_ops_max_db loss_opa_max_db samples flagged\n";
  char line[512];
  for (const SweepPoint& p : points) {
    const LossSummary& s = p.summary;
    std::snprintf(line, sizeof(line),
                  "%.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g %lld %lld\n",
                  p.value.a, p.value.b, s.window_start, s.window_end, s.mean_naive_db,
                  s.mean_ops_db, s.mean_opa_db, s.max_naive_db, s.max_ops_db,
                  s.max_opa_db, static_cast<long long>(s.samples),
                  static_cast<long long>(s.flagged));
    out << line;
  }
}

void export_sweep(const std::vector<SweepPoint>& points, SweepAxis axis,
                  const std::string& scenario_name, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  export_sweep(points, axis, scenario_name, f);
}

} // namespace risim::sim
