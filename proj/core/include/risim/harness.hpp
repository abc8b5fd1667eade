#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "risim/backscatter.hpp"
#include "risim/beam_control.hpp"
#include "risim/em_cell.hpp"
#include "risim/kinematics.hpp"
#include "risim/observer_predictor.hpp"

namespace risim::sim {

enum class ScenarioKind { Linear, Trace, GaussMarkov };

/// Trace-driven scenario: file, resampling and frame transform, and (for
/// acceleration traces) the state the accelerations integrate from.
struct TraceSpec {
  std::string file;
  kin::ResampleMethod method = kin::ResampleMethod::CubicSpline;
  kin::TraceTransform transform;
  Vec3 initial_pos;
  Vec3 initial_vel;
};

/// RIS panel: array dimensions plus the cell model and LUT build parameters.
/// cell.lattice_d doubles as the array spacing.
struct RisSpec {
  int rows = 30;
  int cols = 30;
  em::CellGeometry cell;
  em::VaractorParams varactor;
  em::VaractorTopology topology = em::VaractorTopology::Series;
  double lut_v_min = 0.0;
  double lut_v_max = 20.0;
  int lut_points = 4096;
};

/// Full experiment description.
struct ScenarioConfig {
  std::string name = "scenario";
  ScenarioKind kind = ScenarioKind::Linear;
  double duration_s = 3.0;
  int realizations = 1;
  std::uint64_t master_seed = 1;
  // Loss averaging window; negative values select the defaults
  // (start: past observer warm-up and delay fill, end: duration).
  double loss_window_start_s = -1.0;
  double loss_window_end_s = -1.0;

  obs::TimingParams timing{1e-3, 0.1, 0.02, 0.02};
  double sigma_n = 0.0;

  kin::MotionState initial_state; // linear and gauss_markov kinds
  Vec3 accel;                     // linear kind
  kin::GaussMarkovParams gm;      // gauss_markov kind
  TraceSpec trace;                // trace kind

  Vec3 tx_pos{100.0, -100.0, 0.0};
  double tx_power_w = 50.0;
  scatter::AntennaConfig antennas;
  RisSpec ris;

  double window_start() const;
  double window_end() const;
  void validate() const;
};

/// Immutable per-scenario state shared by all realizations: LUT, cell grid,
/// power evaluator, resampled trace.
struct ScenarioContext {
  em::ReflectionLut lut;
  Grid<Vec3> cells;
  scatter::PowerEvaluator evaluator;
  double lambda;
  double k0;
  beam::VoltageMatrix unconfigured_fill; // powered-but-unset RIS (0 V)
  std::vector<Vec3> trace_samples;       // on the fast grid
  bool trace_is_accel = false;
  std::int64_t total_steps = 0;
  std::vector<std::string> warnings;

  static ScenarioContext build(const ScenarioConfig& cfg);
};

struct StepRecord {
  std::int64_t k;
  double t;
  double pr_ideal_dbm;
  double pr_naive_dbm;
  double pr_ops_dbm;
  double pr_opa_dbm;
};

/// Per-step outputs of one realization.
struct RunSeries {
  double step_t = 0.0;
  std::vector<StepRecord> steps;
  std::vector<Vec3> true_pos;
  std::vector<Vec3> naive_target; // last raw measurement, held
  std::vector<Vec3> ops_pred;
  std::vector<Vec3> opa_pred;
  std::vector<std::string> warnings;
};

/// Test-facing pipeline substitutions.
struct PipelineOverrides {
  bool ops_uses_true_position = false;
};

RunSeries run_scenario(const ScenarioConfig& cfg, int realization_index);
RunSeries run_scenario(const ScenarioConfig& cfg, int realization_index,
                       const ScenarioContext& ctx,
                       const PipelineOverrides* overrides = nullptr);

/// Window-averaged losses (ideal minus each approach, dB). Flagged records
/// (sentinel dBm) are excluded and counted.
struct LossSummary {
  double window_start = 0.0;
  double window_end = 0.0;
  int realizations = 1;
  std::uint64_t master_seed = 0;
  std::int64_t samples = 0;
  std::int64_t flagged = 0;
  double mean_naive_db = 0.0;
  double mean_ops_db = 0.0;
  double mean_opa_db = 0.0;
  double max_naive_db = 0.0;
  double max_ops_db = 0.0;
  double max_opa_db = 0.0;
};

LossSummary power_loss(const RunSeries& series, double window_start, double window_end);

/// Runs `realizations` independent realizations (in parallel when workers
/// allows) and averages their window losses. Deterministic for a fixed
/// master seed regardless of worker count.
LossSummary aggregate_loss(const ScenarioConfig& cfg, int realizations, int workers);

enum class SweepAxis { SigmaN, MeasPeriod, Delay, DelayEstimate, GmGrid };

/// One sweep coordinate; `b` is only used by the (alpha, sigma_beta) grid.
struct SweepValue {
  double a = 0.0;
  double b = 0.0;
};

struct SweepPoint {
  SweepValue value;
  LossSummary summary;
};

const char* sweep_axis_name(SweepAxis axis);

/// Applies each value to a copy of the config (Delay sets both the true and
/// estimated delay), runs `realizations` per point, and aggregates.
std::vector<SweepPoint> sweep(const ScenarioConfig& cfg, SweepAxis axis,
                              const std::vector<SweepValue>& values, int realizations,
                              int workers);

void export_series_csv(const RunSeries& series, std::ostream& out);
void export_series_csv(const RunSeries& series, const std::string& path);
void export_summary(const LossSummary& s, const std::string& scenario_name,
                    std::ostream& out);
void export_sweep(const std::vector<SweepPoint>& points, SweepAxis axis,
                  const std::string& scenario_name, std::ostream& out);
void export_sweep(const std::vector<SweepPoint>& points, SweepAxis axis,
                  const std::string& scenario_name, const std::string& path);

/// Numerically stable order-independent reduction helper.
double pairwise_sum(const std::vector<double>& values);

/// Runs fn(0..n-1) on up to `workers` threads (<= 0 picks the hardware
/// concurrency). Exceptions from tasks are rethrown on the caller.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

} // namespace risim::sim
