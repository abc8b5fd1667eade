#include "risim/backscatter.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "risim/constants.hpp"

namespace risim::scatter {

using constants::pi;

void ArrayGeometry::validate() const {
  if (rows < 1 || cols < 1)
    throw std::invalid_argument("array: rows/cols must be >= 1");
  if (!(lattice_d > 0.0)) throw std::invalid_argument("array: lattice_d must be > 0");
}

Grid<Vec3> ArrayGeometry::cell_positions() const {
  validate();
  Grid<Vec3> cells(rows, cols);
  for (int m = 1; m <= rows; ++m)
    for (int n = 1; n <= cols; ++n)
      cells(m - 1, n - 1) = {0.0, (n - 0.5 * (cols + 1)) * lattice_d,
                             (m - 0.5 * (rows + 1)) * lattice_d};
  return cells;
}

void AntennaConfig::validate() const {
  if (directivity_exponent < 0.0)
    throw std::invalid_argument("antenna: directivity_exponent must be >= 0");
}

LinkAngles link_angles(const Vec3& cell, const Vec3& r_tx, const Vec3& r_rx) {
  if (r_tx.x <= 0.0 || r_rx.x <= 0.0)
    throw std::domain_error("link_angles: TX/RX must be strictly in front (x > 0)");
  const Vec3 vt = r_tx - cell;
  const Vec3 vr = r_rx - cell;
  const double rt = vt.norm();
  const double rr = vr.norm();
  if (rt == 0.0 || rr == 0.0)
    throw std::domain_error("link_angles: TX/RX coincides with the cell");

  auto clamp1 = [](double v) { return v < -1.0 ? -1.0 : (v > 1.0 ? 1.0 : v); };
  LinkAngles a{};
  a.theta_t = std::acos(clamp1(vt.x / rt));
  const double mag_r = std::acos(clamp1(vr.x / rr));
  // Sign: + when the RX tangential component points along the
  // forward-scatter direction -tangential(unit(vt)).
  const double dp = -(vr.y * vt.y + vr.z * vt.z);
  a.theta_r = (dp < 0.0) ? -mag_r : mag_r;
  const double tx_norm = r_tx.norm();
  a.theta_tx = std::acos(clamp1(r_tx.dot(vt) / (tx_norm * rt)));
  a.theta_rx = std::acos(clamp1(vr.z / rr));
  return a;
}

double rcs_tm(double theta_t, double theta_r, double lattice_d, double lambda) {
  if (std::abs(theta_t) > pi / 2 || std::abs(theta_r) > pi / 2)
    throw std::invalid_argument("rcs_tm: angles must be within +-pi/2");
  const double k0 = constants::two_pi / lambda;
  const double d4 = lattice_d * lattice_d * lattice_d * lattice_d;
  const double ct = std::cos(theta_t);
  const double s = sinc(0.5 * k0 * lattice_d * (std::sin(theta_r) - std::sin(theta_t)));
  return (4.0 * pi * d4 / (lambda * lambda)) * ct * ct * s * s;
}

namespace {

double cos_pow(double theta, double q) {
  const double c = std::cos(theta);
  if (c <= 0.0) return q == 0.0 ? 1.0 : 0.0;
  return std::pow(c, q);
}

double adaptive_simpson(double a, double b, double fa, double fm, double fb, double whole,
                        double tol, int depth, double q) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = cos_pow(lm, q);
  const double frm = cos_pow(rm, q);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, q) +
         adaptive_simpson(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, q);
}

double integrate_cos_pow(double q) {
  if (q == 0.0) return pi / 2.0;
  const double a = 0.0;
  const double b = pi / 2.0;
  const double fa = cos_pow(a, q);
  const double fm = cos_pow(0.5 * (a + b), q);
  const double fb = cos_pow(b, q);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  // Absolute tolerance scaled from a crude magnitude estimate keeps the
  // relative error at ~1e-12 even for sharply peaked integrands.
  const double tol = 1e-13 * std::max(whole, 1e-6);
  return adaptive_simpson(a, b, fa, fm, fb, whole, tol, 48, q);
}

} // namespace

TxPattern::TxPattern(const AntennaConfig& cfg) : exponent_(cfg.directivity_exponent) {
  cfg.validate();
  norm_ = integrate_cos_pow(exponent_);
}

double TxPattern::gain(double theta) const {
  if (theta < 0.0) throw std::invalid_argument("tx_gain: theta must be >= 0");
  if (theta > pi / 2) return 0.0; // behind the boresight hemisphere
  return cos_pow(theta, exponent_) / norm_;
}

double tx_gain(double theta_tx, const AntennaConfig& cfg) {
  return TxPattern(cfg).gain(theta_tx);
}

double rx_gain_dipole(double theta_rx, const AntennaConfig& cfg) {
  if (theta_rx < 0.0 || theta_rx > pi)
    throw std::invalid_argument("rx_gain_dipole: theta must be in [0, pi]");
  const double c = std::cos(theta_rx);
  const double s2 = 1.0 - c * c;
  if (s2 <= 1e-30) return 0.0; // axial null, removable limit
  const double num = std::cos(0.5 * pi * c);
  return cfg.dipole_coefficient * num * num / s2;
}

PowerEvaluator::PowerEvaluator(const ArrayGeometry& geom, const Vec3& r_tx, double p_t,
                               const AntennaConfig& antennas, double lambda)
    : geom_(geom), r_tx_(r_tx) {
  geom.validate();
  antennas.validate();
  if (!(p_t > 0.0)) throw std::invalid_argument("PowerEvaluator: p_t must be > 0");
  if (!(lambda > 0.0)) throw std::invalid_argument("PowerEvaluator: lambda must be > 0");
  if (r_tx.x <= 0.0)
    throw std::domain_error("PowerEvaluator: TX must be strictly in front (x > 0)");

  k0_ = constants::two_pi / lambda;
  half_kd_ = 0.5 * k0_ * geom.lattice_d;
  const double d4 = std::pow(geom.lattice_d, 4);
  rcs_const_ = 4.0 * pi * d4 / (lambda * lambda);
  prefactor_ = p_t * lambda * lambda / std::pow(4.0 * pi, 2);
  dipole_coeff_ = antennas.dipole_coefficient;

  const TxPattern pattern(antennas);
  const Grid<Vec3> cells = geom.cell_positions();
  const double tx_norm = r_tx.norm();
  cells_.resize(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const Vec3 pos = cells[i];
    const Vec3 vt = r_tx - pos;
    const double rt = vt.norm();
    CellStatic cs{};
    cs.pos = pos;
    cs.rt = rt;
    cs.inv_rt2 = 1.0 / (rt * rt);
    const double cos_t = vt.x / rt;
    cs.cos2_t = cos_t * cos_t;
    const double tn = std::sqrt(vt.y * vt.y + vt.z * vt.z);
    cs.sin_t = tn / rt;
    if (tn > 0.0) {
      cs.that_y = -vt.y / tn;
      cs.that_z = -vt.z / tn;
    }
    const double cos_tx =
        std::min(1.0, std::max(-1.0, r_tx.dot(vt) / (tx_norm * rt)));
    cs.gt = pattern.gain(std::acos(cos_tx));
    cells_[i] = cs;
  }
}

void PowerEvaluator::evaluate_batch(const Grid<Complex>* const* gammas, int count,
                                    const Vec3& r_rx, double* out_watts) const {
  for (int g = 0; g < count; ++g) {
    if (gammas[g]->rows() != geom_.rows || gammas[g]->cols() != geom_.cols)
      throw std::invalid_argument("PowerEvaluator: gamma matrix shape mismatch");
  }
  if (r_rx.x <= 0.0) {
    for (int g = 0; g < count; ++g) out_watts[g] = 0.0;
    return;
  }

  Complex sums[8];
  if (count > 8) throw std::invalid_argument("PowerEvaluator: batch too large");
  for (int g = 0; g < count; ++g) sums[g] = {0.0, 0.0};

  for (std::size_t i = 0; i < cells_.size(); ++i) {
    const CellStatic& cs = cells_[i];
    const Vec3 vr = r_rx - cs.pos;
    const double rr2 = vr.norm2();
    const double rr = std::sqrt(rr2);
    if (rr == 0.0)
      throw std::domain_error("PowerEvaluator: RX coincides with a cell");

    const double cos_rx = vr.z / rr;
    const double s2 = 1.0 - cos_rx * cos_rx;
    double gr = 0.0;
    if (s2 > 1e-30) {
      const double nu = std::cos(0.5 * pi * cos_rx);
      gr = dipole_coeff_ * nu * nu / s2;
    }

    const double tn = std::sqrt(vr.y * vr.y + vr.z * vr.z);
    double sin_r = tn / rr;
    if (vr.y * cs.that_y + vr.z * cs.that_z < 0.0) sin_r = -sin_r;
    const double sc = sinc(half_kd_ * (sin_r - cs.sin_t));
    const double sigma = rcs_const_ * cs.cos2_t * sc * sc;

    const double amp = cs.gt * gr * sigma * cs.inv_rt2 / rr2;
    const double phase = -2.0 * k0_ * (cs.rt + rr);
    const Complex factor = amp * Complex(std::cos(phase), std::sin(phase));

    for (int g = 0; g < count; ++g) {
      const Complex gamma = (*gammas[g])[i];
      sums[g] += gamma * gamma * factor;
    }
  }
  for (int g = 0; g < count; ++g) out_watts[g] = prefactor_ * std::abs(sums[g]);
}

double PowerEvaluator::evaluate(const Grid<Complex>& gammas, const Vec3& r_rx) const {
  const Grid<Complex>* p = &gammas;
  double out = 0.0;
  evaluate_batch(&p, 1, r_rx, &out);
  return out;
}

double received_power(const Grid<Complex>& gammas, const ArrayGeometry& geom,
                      const Vec3& r_tx, const Vec3& r_rx, double p_t,
                      const AntennaConfig& antennas, double lambda) {
  if (r_rx.x <= 0.0)
    throw std::domain_error("received_power: RX must be strictly in front (x > 0)");
  return PowerEvaluator(geom, r_tx, p_t, antennas, lambda).evaluate(gammas, r_rx);
}

double watts_to_dbm(double watts) {
  if (!(watts > 0.0)) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(watts / 1e-3);
}

bool dbm_flagged(double dbm) { return !std::isfinite(dbm); }

} // namespace risim::scatter
