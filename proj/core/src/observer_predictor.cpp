#include "risim/observer_predictor.hpp"

#include <cmath>
#include <stdexcept>

namespace risim::obs {

void TimingParams::validate() const {
  if (!(step_t > 0.0)) throw std::invalid_argument("timing: step_t must be > 0");
  if (!(meas_t >= step_t))
    throw std::invalid_argument("timing: need step_t <= meas_t");
  if (t_d_true < 0.0 || t_d_hat < 0.0)
    throw std::invalid_argument("timing: delays must be >= 0");
}

std::int64_t TimingParams::steps_per_meas() const {
  const double ratio = meas_t / step_t;
  const auto m = static_cast<std::int64_t>(std::llround(ratio));
  if (m < 1 || std::abs(ratio - static_cast<double>(m)) > 1e-9 * ratio)
    throw std::invalid_argument("timing: meas_t / step_t must be integral");
  return m;
}

ObserverState observer_update(const ObserverState& st, const Vec3& meas, Mode mode,
                              double meas_t) {
  if (!(meas_t > 0.0)) throw std::invalid_argument("observer_update: meas_t must be > 0");
  ObserverState out = st;
  out.q = st.q + 1;
  out.y_c = st.y_b;
  out.y_b = st.y_a;
  out.y_a = meas;

  if (out.q == 0) {
    out.v_hat = {};
    out.a_hat = {};
    return out;
  }
  if (out.q == 1 || mode == Mode::Ops) {
    out.v_hat = (out.y_a - out.y_b) / meas_t;
    // OPS never estimates acceleration.
    return out;
  }
  // OPA, q >= 2: three-point backward differences.
  out.v_hat = (3.0 * out.y_a - 4.0 * out.y_b + out.y_c) / (2.0 * meas_t);
  out.a_hat = (out.y_a - 2.0 * out.y_b + out.y_c) / (meas_t * meas_t);
  return out;
}

double time_advance(std::int64_t k, const ObserverState& st, const TimingParams& tp) {
  if (st.q < 0)
    throw std::logic_error("time_advance: no measurement received yet (q = -1)");
  std::int64_t k_q;
  try {
    k_q = st.q * tp.steps_per_meas();
  } catch (const std::invalid_argument&) {
    // Non-integral 1/J: documented floating-point floor.
    k_q = static_cast<std::int64_t>(
        std::floor(static_cast<double>(st.q) / tp.j_factor()));
  }
  if (k < k_q)
    throw std::invalid_argument(
        "time_advance: k precedes the latest measurement's fast index");
  return static_cast<double>(k - k_q) * tp.step_t + tp.t_d_hat;
}

Vec3 predict_position(const ObserverState& st, double t_adv, Mode mode) {
  if (st.q < 0)
    throw std::logic_error("predict_position: no measurement received yet (q = -1)");
  Vec3 out = st.y_a + st.v_hat * t_adv;
  if (mode == Mode::Opa) out += st.a_hat * (0.5 * t_adv * t_adv);
  return out;
}

} // namespace risim::obs
