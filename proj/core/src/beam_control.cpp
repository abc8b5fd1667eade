#include "risim/beam_control.hpp"

#include <stdexcept>
#include <utility>

#include "risim/constants.hpp"

namespace risim::beam {

void optimal_phase_matrix_into(const Vec3& r_tx, const Vec3& r_rx_est,
                               const Grid<Vec3>& cells, double k0, PhaseMatrix& out) {
  if (!(k0 > 0.0)) throw std::invalid_argument("optimal_phase_matrix: k0 must be > 0");
  if (!out.same_shape(cells)) out = PhaseMatrix(cells.rows(), cells.cols());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const double lt = (r_tx - cells[i]).norm();
    const double lr = (r_rx_est - cells[i]).norm();
    if (lt == 0.0 || lr == 0.0)
      throw std::domain_error("optimal_phase_matrix: TX/RX coincides with a cell");
    out[i] = wrap_phase(k0 * (lt + lr));
  }
}

PhaseMatrix optimal_phase_matrix(const Vec3& r_tx, const Vec3& r_rx_est,
                                 const Grid<Vec3>& cells, double k0) {
  PhaseMatrix out(cells.rows(), cells.cols());
  optimal_phase_matrix_into(r_tx, r_rx_est, cells, k0, out);
  return out;
}

void phases_to_voltages_into(const em::ReflectionLut& lut, const PhaseMatrix& phases,
                             VoltageMatrix& out) {
  if (!out.volts.same_shape(phases)) out = VoltageMatrix(phases.rows(), phases.cols());
  for (std::size_t i = 0; i < phases.size(); ++i) {
    const em::LookupResult r = lut.lookup(phases[i]);
    out.volts[i] = r.voltage;
    out.gammas[i] = r.realized;
  }
}

VoltageMatrix phases_to_voltages(const em::ReflectionLut& lut, const PhaseMatrix& phases) {
  VoltageMatrix out(phases.rows(), phases.cols());
  phases_to_voltages_into(lut, phases, out);
  return out;
}

DelayLine::DelayLine(int depth, VoltageMatrix initial_fill) : depth_(depth) {
  if (depth < 0) throw std::invalid_argument("DelayLine: depth must be >= 0");
  if (depth > 0) ring_.assign(depth, initial_fill);
}

const VoltageMatrix& DelayLine::apply(const VoltageMatrix& input) {
  if (depth_ == 0) {
    passthrough_ = input;
    return passthrough_;
  }
  std::swap(ring_[head_], passthrough_);
  ring_[head_] = input;
  head_ = (head_ + 1) % ring_.size();
  return passthrough_;
}

} // namespace risim::beam
