#pragma once

#include <complex>
#include <vector>

#include "risim/grid.hpp"
#include "risim/vec3.hpp"

namespace risim::scatter {

using Complex = std::complex<double>;

/// Uniform planar array on the y-z plane, centered at the origin, normal
/// along +x. Cell (m,n) sits at [0, (n-(N+1)/2)D, (m-(M+1)/2)D] for
/// m = 1..M, n = 1..N.
struct ArrayGeometry {
  int rows = 30;       // M
  int cols = 30;       // N
  double lattice_d = 0.042827494; // D, m

  Grid<Vec3> cell_positions() const;
  void validate() const;
};

/// BS antenna cos^q pattern exponent and the UE dipole peak coefficient.
struct AntennaConfig {
  double directivity_exponent = 100.0;
  double dipole_coefficient = 0.71199;

  void validate() const;
};

/// Per-cell link angles (radians).
struct LinkAngles {
  double theta_t;  // incidence from the surface normal, unsigned
  double theta_r;  // departure from the normal, signed, in [-pi/2, pi/2]
  double theta_tx; // off-boresight angle at the BS antenna
  double theta_rx; // angle of the cell->RX ray from the +z dipole axis
};

/// Angles for one cell given the BS position (relative to the RIS center)
/// and the receiver position. Both must lie strictly on the +x side.
LinkAngles link_angles(const Vec3& cell, const Vec3& r_tx, const Vec3& r_rx);

/// TM-mode radar cross-section of one cell:
///   sigma = (4 pi D^4 / lambda^2) cos^2(theta_t)
///           * sinc^2( (k0 D / 2)(sin theta_r - sin theta_t) ).
double rcs_tm(double theta_t, double theta_r, double lattice_d, double lambda);

/// cos^q pattern normalized by its polar integral, cached per exponent.
class TxPattern {
public:
  explicit TxPattern(const AntennaConfig& cfg);
  double gain(double theta) const;
  double norm_integral() const { return norm_; }

private:
  double exponent_;
  double norm_;
};

double tx_gain(double theta_tx, const AntennaConfig& cfg);

/// Half-wave dipole (axis along z):
///   G = coeff * cos^2((pi/2) cos theta) / sin^2 theta,
/// with the removable singularities at theta = 0, pi evaluating to 0.
double rx_gain_dipole(double theta_rx, const AntennaConfig& cfg);

/// Caches the TX-side per-cell factors (they depend only on geometry and the
/// fixed BS position) so per-step power evaluation touches only RX geometry.
class PowerEvaluator {
public:
  PowerEvaluator(const ArrayGeometry& geom, const Vec3& r_tx, double p_t,
                 const AntennaConfig& antennas, double lambda);

  /// Received power (watts) for several reflection matrices at one receiver
  /// position; the matrices share all per-cell geometry. Returns 0 W for a
  /// receiver on or behind the surface plane.
  void evaluate_batch(const Grid<Complex>* const* gammas, int count, const Vec3& r_rx,
                      double* out_watts) const;

  double evaluate(const Grid<Complex>& gammas, const Vec3& r_rx) const;

  const ArrayGeometry& geometry() const { return geom_; }

private:
  struct CellStatic {
    Vec3 pos;
    double inv_rt2;     // 1 / |r_tx - cell|^2
    double rt;          // |r_tx - cell|
    double gt;          // BS gain toward this cell
    double cos2_t;      // cos^2 theta_t
    double sin_t;       // sin theta_t
    double that_y, that_z; // forward-scatter tangential direction
  };
  ArrayGeometry geom_;
  Vec3 r_tx_;
  double prefactor_; // P_t lambda^2 / (4 pi)^2
  double k0_;
  double half_kd_;
  double rcs_const_; // 4 pi D^4 / lambda^2
  double dipole_coeff_;
  std::vector<CellStatic> cells_;
};

/// One-shot Eq.-17 evaluation at a receiver position.
double received_power(const Grid<Complex>& gammas, const ArrayGeometry& geom,
                      const Vec3& r_tx, const Vec3& r_rx, double p_t,
                      const AntennaConfig& antennas, double lambda);

/// 10 log10(p / 1 mW); non-positive power maps to -infinity (flagged record).
double watts_to_dbm(double watts);
bool dbm_flagged(double dbm);

} // namespace risim::scatter
