#pragma once

#include <complex>
#include <vector>

#include "risim/em_cell.hpp"
#include "risim/grid.hpp"
#include "risim/vec3.hpp"

namespace risim::beam {

/// Per-cell target reflection phases, each in [-pi, pi).
using PhaseMatrix = Grid<double>;

/// Realized per-cell settings: varactor voltages and the reflection
/// coefficients the LUT quantization actually delivers.
struct VoltageMatrix {
  Grid<double> volts;
  Grid<std::complex<double>> gammas;

  VoltageMatrix() = default;
  VoltageMatrix(int rows, int cols)
      : volts(rows, cols, 0.0), gammas(rows, cols, {0.0, 0.0}) {}
};

/// Phase that makes the cell's reflection arrive in phase at the receiver:
///   wrap(k0 * (|r_tx - cell| + |r_rx - cell|)).
/// Throws when the receiver or transmitter coincides with a cell.
PhaseMatrix optimal_phase_matrix(const Vec3& r_tx, const Vec3& r_rx_est,
                                 const Grid<Vec3>& cells, double k0);
void optimal_phase_matrix_into(const Vec3& r_tx, const Vec3& r_rx_est,
                               const Grid<Vec3>& cells, double k0, PhaseMatrix& out);

/// Per-entry phase-nearest LUT inversion.
VoltageMatrix phases_to_voltages(const em::ReflectionLut& lut, const PhaseMatrix& phases);
void phases_to_voltages_into(const em::ReflectionLut& lut, const PhaseMatrix& phases,
                             VoltageMatrix& out);

/// FIFO modeling the accumulated control delay: the matrix pushed at step k
/// comes back out at step k + depth. The first `depth` pops return the
/// initial fill.
class DelayLine {
public:
  DelayLine() = default;
  DelayLine(int depth, VoltageMatrix initial_fill);

  /// Pushes `input` and returns the matrix from `depth` steps earlier.
  /// Call exactly once per fast step.
  const VoltageMatrix& apply(const VoltageMatrix& input);

  int depth() const { return depth_; }

private:
  int depth_ = 0;
  std::size_t head_ = 0;
  std::vector<VoltageMatrix> ring_;
  VoltageMatrix passthrough_;
};

} // namespace risim::beam
