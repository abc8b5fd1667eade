#include "risim/em_cell.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace risim::em {

namespace {

constexpr Complex j1{0.0, 1.0};

bool is_open(Complex z) {
  return !std::isfinite(z.real()) || !std::isfinite(z.imag());
}

} // namespace

void VaractorParams::validate() const {
  if (!(c_j0 > 0.0)) throw std::invalid_argument("varactor: c_j0 must be > 0");
  if (!(v_j > 0.0)) throw std::invalid_argument("varactor: v_j must be > 0");
  if (!(grading > 0.0)) throw std::invalid_argument("varactor: grading must be > 0");
  if (r_s < 0.0 || l_s < 0.0 || c_p < 0.0)
    throw std::invalid_argument("varactor: r_s, l_s, c_p must be >= 0");
}

CellGeometry CellGeometry::half_wavelength(double freq_hz) {
  CellGeometry g;
  g.freq = freq_hz;
  g.lattice_d = 0.5 * constants::speed_of_light / freq_hz;
  return g;
}

void CellGeometry::validate() const {
  if (!(freq > 0.0)) throw std::invalid_argument("cell: freq must be > 0");
  if (!(gap_g > 0.0 && gap_g < lattice_d))
    throw std::invalid_argument("cell: need 0 < gap_g < lattice_d");
  if (!(slab_d > 0.0)) throw std::invalid_argument("cell: slab_d must be > 0");
  if (eps_r.real() < 1.0) throw std::invalid_argument("cell: real(eps_r) must be >= 1");
}

double junction_capacitance(double v_rev, const VaractorParams& p) {
  if (v_rev < 0.0)
    throw std::domain_error("junction_capacitance: reverse voltage must be >= 0");
  return p.c_j0 * std::pow(1.0 + v_rev / p.v_j, -p.grading);
}

Complex varactor_impedance(double c_var, const CellGeometry& g, const VaractorParams& p,
                           VaractorTopology topology) {
  if (!(c_var > 0.0))
    throw std::domain_error("varactor_impedance: c_var must be > 0");
  const double w = g.omega();
  if (topology == VaractorTopology::AllParallel) {
    Complex y = 1.0 / Complex(p.r_s, 0.0) + 1.0 / (j1 * w * p.l_s) + j1 * w * c_var +
                j1 * w * p.c_p;
    return 1.0 / y;
  }
  Complex z_series = Complex(p.r_s, w * p.l_s) + 1.0 / (j1 * w * c_var);
  if (p.c_p == 0.0) return z_series; // open package branch
  Complex z_pkg = 1.0 / (j1 * w * p.c_p);
  return z_series * z_pkg / (z_series + z_pkg);
}

SurfaceImpedances surface_impedances(const CellGeometry& g) {
  g.validate();
  const double w = g.omega();
  const double k0 = g.wavenumber();

  // Grounded slab seen as a shorted transmission-line section.
  Complex sqrt_eps = std::sqrt(g.eps_r);
  Complex z_slab = j1 * (constants::free_space_impedance / sqrt_eps) *
                   std::tan(k0 * sqrt_eps * g.slab_d);

  // Capacitive grid of the patch array. The grid sits on the dielectric
  // face, so its effective permittivity is the substrate's.
  const double eps_eff = g.eps_r.real();
  const double s = std::sin(constants::pi * g.gap_g / (2.0 * g.lattice_d));
  const double log_csc = std::log(1.0 / s);
  const double c_grid = (2.0 * g.lattice_d * constants::vacuum_permittivity * eps_eff /
                         constants::pi) *
                        log_csc;
  if (!(c_grid > 0.0) || !std::isfinite(1.0 / c_grid))
    throw std::domain_error(
        "surface_impedances: degenerate geometry, grid capacitance vanished "
        "(gap_g too close to lattice_d)");
  Complex z_patch = 1.0 / (j1 * w * c_grid);
  return {z_patch, z_slab};
}

Complex cell_impedance(Complex z_var, Complex z_patch, Complex z_slab) {
  const Complex zs[3] = {z_var, z_patch, z_slab};
  Complex y{0.0, 0.0};
  int open_branches = 0;
  for (const Complex& z : zs) {
    if (z == Complex{0.0, 0.0}) return {0.0, 0.0}; // short dominates
    if (is_open(z)) {
      ++open_branches;
      continue;
    }
    y += 1.0 / z;
  }
  if (open_branches == 3)
    throw std::domain_error("cell_impedance: all branches open");
  return 1.0 / y;
}

Complex reflection_coefficient(Complex z_cell, const CellGeometry& g) {
  (void)g;
  const double zeta0 = constants::free_space_impedance;
  if (is_open(z_cell)) return {1.0, 0.0};
  Complex den = z_cell + zeta0;
  if (den == Complex{0.0, 0.0})
    throw std::domain_error("reflection_coefficient: z_cell == -zeta0");
  return (z_cell - zeta0) / den;
}

ReflectionLut build_lut(const VaractorParams& p, const CellGeometry& g, double v_min,
                        double v_max, int n_points, VaractorTopology topology) {
  p.validate();
  g.validate();
  if (!(v_min >= 0.0 && v_min < v_max))
    throw std::invalid_argument("build_lut: need 0 <= v_min < v_max");
  if (n_points < 2) throw std::invalid_argument("build_lut: need n_points >= 2");

  const SurfaceImpedances zs = surface_impedances(g);
  ReflectionLut lut;
  lut.voltages.resize(n_points);
  lut.gammas.resize(n_points);
  const double dv = (v_max - v_min) / (n_points - 1);
  for (int i = 0; i < n_points; ++i) {
    const double v = (i == n_points - 1) ? v_max : v_min + i * dv;
    const double cv = junction_capacitance(v, p);
    const Complex zv = varactor_impedance(cv, g, p, topology);
    const Complex zc = cell_impedance(zv, zs.patch, zs.slab);
    lut.voltages[i] = v;
    lut.gammas[i] = reflection_coefficient(zc, g);
  }
  lut.rebuild_index();
  return lut;
}

void ReflectionLut::rebuild_index() {
  if (voltages.size() != gammas.size() || voltages.size() < 2)
    throw std::invalid_argument("ReflectionLut: need >= 2 entries of equal length");
  for (std::size_t i = 1; i < voltages.size(); ++i)
    if (!(voltages[i] > voltages[i - 1]))
      throw std::invalid_argument("ReflectionLut: voltages must be strictly increasing");
  by_phase_.resize(voltages.size());
  for (std::size_t i = 0; i < voltages.size(); ++i)
    by_phase_[i] = {std::arg(gammas[i]), static_cast<int>(i)};
  std::sort(by_phase_.begin(), by_phase_.end(), [](const PhaseEntry& a, const PhaseEntry& b) {
    if (a.phase != b.phase) return a.phase < b.phase;
    return a.index < b.index; // equal phases: keep lower voltage first
  });
}

LookupResult ReflectionLut::lookup(double desired_phase) const {
  if (by_phase_.empty())
    throw std::logic_error("ReflectionLut::lookup: empty table");
  const double target = wrap_phase(desired_phase);

  auto it = std::lower_bound(by_phase_.begin(), by_phase_.end(), target,
                             [](const PhaseEntry& e, double t) { return e.phase < t; });
  // Candidates: neighbors of the insertion point plus the circular wrap pair.
  const PhaseEntry* cands[4];
  int n_cands = 0;
  if (it != by_phase_.end()) cands[n_cands++] = &*it;
  if (it != by_phase_.begin()) cands[n_cands++] = &*(it - 1);
  cands[n_cands++] = &by_phase_.front();
  cands[n_cands++] = &by_phase_.back();

  int best = -1;
  double best_phase = 0.0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int c = 0; c < n_cands; ++c) {
    const double d = phase_distance(cands[c]->phase, target);
    const int idx = cands[c]->index;
    if (d < best_dist || (d == best_dist && idx < best)) {
      best_dist = d;
      best = idx;
      best_phase = cands[c]->phase;
    }
  }
  // Entries sharing the winning phase tie toward the lowest voltage; the
  // index is the secondary sort key, so the first of the run wins.
  auto lo = std::lower_bound(by_phase_.begin(), by_phase_.end(), best_phase,
                             [](const PhaseEntry& e, double t) { return e.phase < t; });
  if (lo != by_phase_.end() && lo->phase == best_phase) best = std::min(best, lo->index);
  return {voltages[best], gammas[best], best};
}

double ReflectionLut::max_adjacent_phase_gap() const {
  // Gap between phase-adjacent entries on the circle, including wrap.
  double max_gap = 0.0;
  for (std::size_t i = 0; i < by_phase_.size(); ++i) {
    const double a = by_phase_[i].phase;
    const double b = by_phase_[(i + 1) % by_phase_.size()].phase;
    max_gap = std::max(max_gap, phase_distance(a, b));
  }
  return max_gap;
}

LookupResult lookup_voltage(const ReflectionLut& lut, double desired_phase) {
  return lut.lookup(desired_phase);
}

void ReflectionLut::write_csv(std::ostream& out) const {
  out << "voltage_V,gamma_re,gamma_im,gamma_mag,gamma_phase_rad\n";
  char line[160];
  for (std::size_t i = 0; i < voltages.size(); ++i) {
    std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g,%.17g,%.17g\n", voltages[i],
                  gammas[i].real(), gammas[i].imag(), std::abs(gammas[i]),
                  std::arg(gammas[i]));
    out << line;
  }
}

void ReflectionLut::write_csv(const std::string& path) const {
  std::ofstream f(path, std::ios::binary); // binary: keep LF endings everywhere
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  write_csv(f);
}

} // namespace risim::em
