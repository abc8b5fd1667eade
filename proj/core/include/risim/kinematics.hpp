#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "risim/rng.hpp"
#include "risim/vec3.hpp"

namespace risim::kin {

/// True UE state: position and velocity.
struct MotionState {
  Vec3 pos;
  Vec3 vel;
};

/// One constant-acceleration step of the linear state-space model:
///   pos' = pos + vel*T + accel*T^2/2,  vel' = vel + accel*T.
MotionState linear_step(const MotionState& s, const Vec3& accel, double step_t);

/// Position extraction with iid per-axis Gaussian noise.
struct MeasurementModel {
  double sigma_n = 0.0; // meters
};

Vec3 measure(const MotionState& s, const MeasurementModel& m, Rng& rng);

/// Slow-sample index q = floor(J*k) for decimation factor J = T/T_M.
/// Uses exact integer division when 1/J is integral.
std::int64_t decimation_index(std::int64_t k, double j_factor);

/// Gauss-Markov mobility parameters: memory alpha in [0,1], mean velocity,
/// and randomness sigma_beta.
struct GaussMarkovParams {
  double alpha = 0.5;
  Vec3 mean_vel;
  double sigma_beta = 0.0; // m/s

  void validate() const;
};

/// vel' = alpha*vel + (1-alpha)*mean + sqrt(1-alpha^2)*beta,
/// pos' = pos + vel'*T, with beta ~ N(0, sigma_beta^2 I).
MotionState gauss_markov_step(const MotionState& prev, const GaussMarkovParams& p,
                              double step_t, Rng& rng);

/// Recorded trajectory samples: either positions (t,x,y,z) or accelerations
/// (t,ax,ay,az) on a strictly increasing time grid.
struct Trace {
  std::vector<double> times;
  std::vector<Vec3> values;
  bool is_acceleration = false;

  std::size_t size() const { return times.size(); }
  double span() const { return times.empty() ? 0.0 : times.back() - times.front(); }
  void validate() const;
};

enum class ResampleMethod { Linear, CubicSpline };

/// Interpolates the trace onto the uniform grid times[0] + i*step_t covering
/// the full span. Knots that land on the grid are reproduced exactly.
std::vector<Vec3> resample_trace(const Trace& tr, double step_t, ResampleMethod method);

/// Axis permutation plus offset. out[axis i] = in[axis_map[i]] + offset[i];
/// offsets apply to position traces only (accelerations transform linearly).
struct TraceTransform {
  int axis_map[3] = {0, 1, 2};
  Vec3 offset;

  static TraceTransform identity() { return {}; }
  void validate() const;
};

Trace apply_transform(const Trace& tr, const TraceTransform& tf);

/// CSV with header `t,x,y,z` or `t,ax,ay,az`. Malformed rows are reported
/// with their line number.
Trace load_trace_csv(const std::string& path);
void save_trace_csv(const Trace& tr, const std::string& path);

} // namespace risim::kin
