#pragma once

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include "risim/constants.hpp"

namespace risim::em {

using Complex = std::complex<double>;

/// Hyperabrupt-junction varactor parameters (defaults model the SMV1705).
struct VaractorParams {
  double c_j0 = 31e-12;  // zero-bias junction capacitance, F
  double v_j = 3.0;      // junction potential, V
  double grading = 2.0;  // grading exponent
  double r_s = 0.32;     // series resistance, ohm
  double l_s = 1.7e-9;   // series inductance, H
  double c_p = 0.0;      // package capacitance, F

  void validate() const;
};

/// How the varactor parasitics combine into one impedance.
/// Series: (R_s + jwL_s + 1/(jwC_var)) in parallel with the package branch.
/// AllParallel: every element in parallel, the formula as printed.
enum class VaractorTopology { Series, AllParallel };

/// Unit-cell geometry: square patch with gap g on a grounded dielectric slab,
/// with lattice period D. Defaults are the reference cell at 3.5 GHz.
struct CellGeometry {
  double freq = 3.5e9;               // carrier, Hz
  double lattice_d = 0.042827494;    // period D, m (default lambda/2)
  double gap_g = 1e-3;               // inter-patch gap, m
  double slab_d = 1.57e-3;           // substrate thickness, m
  Complex eps_r{4.4, -0.088};        // relative permittivity

  double wavelength() const { return constants::speed_of_light / freq; }
  double wavenumber() const { return constants::two_pi / wavelength(); }
  double omega() const { return constants::two_pi * freq; }

  /// Geometry with lattice_d = lambda/2 at the given frequency.
  static CellGeometry half_wavelength(double freq_hz);

  void validate() const;
};

/// C_var(V) = c_j0 * (1 + V/v_j)^(-grading). Rejects V < 0.
double junction_capacitance(double v_rev, const VaractorParams& p);

/// Impedance of the biased varactor at the cell's carrier frequency.
Complex varactor_impedance(double c_var, const CellGeometry& g, const VaractorParams& p,
                           VaractorTopology topology = VaractorTopology::Series);

struct SurfaceImpedances {
  Complex patch; // capacitive grid impedance of the patch array
  Complex slab;  // input impedance of the grounded dielectric slab
};

/// Closed-form patch-grid and grounded-slab impedances for the cell geometry.
/// Throws on degenerate geometry (gap approaching the lattice period).
SurfaceImpedances surface_impedances(const CellGeometry& g);

/// Three-way parallel combination; handles open (infinite) branches.
Complex cell_impedance(Complex z_var, Complex z_patch, Complex z_slab);

/// Gamma = (Z - zeta0) / (Z + zeta0).
Complex reflection_coefficient(Complex z_cell, const CellGeometry& g);

struct LookupResult {
  double voltage = 0.0;
  Complex realized;
  int index = 0;
};

/// Sampled voltage -> reflection coefficient table with a phase-nearest
/// inverse. Voltages are strictly increasing.
struct ReflectionLut {
  std::vector<double> voltages;
  std::vector<Complex> gammas;

  std::size_t size() const { return voltages.size(); }
  double phase(std::size_t i) const { return std::arg(gammas[i]); }

  /// Entry minimizing circular phase distance to desired_phase;
  /// ties break toward the lower voltage.
  LookupResult lookup(double desired_phase) const;

  /// Largest circular gap between adjacent entry phases (worst-case
  /// quantization is half of this).
  double max_adjacent_phase_gap() const;

  void write_csv(std::ostream& out) const;
  void write_csv(const std::string& path) const;

  /// Rebuilds the phase-sorted index; call after editing entries by hand.
  void rebuild_index();

private:
  struct PhaseEntry {
    double phase;
    int index;
  };
  std::vector<PhaseEntry> by_phase_;
  friend ReflectionLut build_lut(const VaractorParams&, const CellGeometry&, double,
                                 double, int, VaractorTopology);
};

/// Sweeps [v_min, v_max] with n_points samples through the full cell chain:
/// junction capacitance -> varactor impedance -> parallel combination with
/// patch and slab -> reflection coefficient.
ReflectionLut build_lut(const VaractorParams& p, const CellGeometry& g, double v_min,
                        double v_max, int n_points,
                        VaractorTopology topology = VaractorTopology::Series);

/// Free-function form of ReflectionLut::lookup.
LookupResult lookup_voltage(const ReflectionLut& lut, double desired_phase);

} // namespace risim::em
