#pragma once

#include <cstdint>

#include "risim/vec3.hpp"

namespace risim::obs {

/// OPS estimates speed only; OPA estimates speed and acceleration.
enum class Mode { Ops, Opa };

/// Kinematic observer state. y_a is the newest of the last three position
/// measurements; q counts slow samples and starts at -1 (nothing measured,
/// predictions undefined).
struct ObserverState {
  Vec3 y_a, y_b, y_c;
  Vec3 v_hat;
  Vec3 a_hat;
  std::int64_t q = -1;
};

/// Fast/slow timing: control period T, measurement period T_M, the true
/// accumulated control delay and the controller's estimate of it.
struct TimingParams {
  double step_t = 1e-3;   // T, s
  double meas_t = 0.1;    // T_M, s
  double t_d_true = 0.0;  // s
  double t_d_hat = 0.0;   // s

  double j_factor() const { return step_t / meas_t; }
  /// round(T_M / T); throws when T_M/T is not integral within 1e-9.
  std::int64_t steps_per_meas() const;
  void validate() const;
};

/// Ingests one measurement: shifts the history, bumps q, and refreshes the
/// speed (and for OPA, acceleration) estimates. The first measurement only
/// seeds the history; OPA needs three samples before estimating acceleration.
ObserverState observer_update(const ObserverState& st, const Vec3& meas, Mode mode,
                              double meas_t);

/// Time between the newest measurement (taken at fast index floor(q/J)) and
/// the moment the adjustment computed at fast index k becomes effective:
///   T_A = (k - k_q) * T + t_d_hat.
double time_advance(std::int64_t k, const ObserverState& st, const TimingParams& tp);

/// Extrapolated UE position t_adv seconds past the newest measurement.
/// OPS: y_a + v*T_A;  OPA adds a*T_A^2/2.
Vec3 predict_position(const ObserverState& st, double t_adv, Mode mode);

} // namespace risim::obs
