#include "risim/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace risim::kin {

MotionState linear_step(const MotionState& s, const Vec3& accel, double step_t) {
  if (!(step_t > 0.0)) throw std::invalid_argument("linear_step: step_t must be > 0");
  MotionState out;
  out.pos = s.pos + s.vel * step_t + accel * (0.5 * step_t * step_t);
  out.vel = s.vel + accel * step_t;
  return out;
}

Vec3 measure(const MotionState& s, const MeasurementModel& m, Rng& rng) {
  if (m.sigma_n < 0.0) throw std::invalid_argument("measure: sigma_n must be >= 0");
  if (m.sigma_n == 0.0) return s.pos;
  std::normal_distribution<double> n(0.0, m.sigma_n);
  return {s.pos.x + n(rng), s.pos.y + n(rng), s.pos.z + n(rng)};
}

std::int64_t decimation_index(std::int64_t k, double j_factor) {
  if (k < 0) throw std::invalid_argument("decimation_index: k must be >= 0");
  if (!(j_factor > 0.0 && j_factor <= 1.0))
    throw std::invalid_argument("decimation_index: need 0 < J <= 1");
  const double inv = 1.0 / j_factor;
  const auto m = static_cast<std::int64_t>(std::llround(inv));
  if (m >= 1 && std::abs(inv - static_cast<double>(m)) < 1e-9 * inv)
    return k / m;
  return static_cast<std::int64_t>(std::floor(j_factor * static_cast<double>(k)));
}

void GaussMarkovParams::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("gauss_markov: alpha must be in [0,1]");
  if (sigma_beta < 0.0)
    throw std::invalid_argument("gauss_markov: sigma_beta must be >= 0");
}

MotionState gauss_markov_step(const MotionState& prev, const GaussMarkovParams& p,
                              double step_t, Rng& rng) {
  p.validate();
  if (!(step_t > 0.0))
    throw std::invalid_argument("gauss_markov_step: step_t must be > 0");
  const double noise_gain = std::sqrt(std::max(0.0, 1.0 - p.alpha * p.alpha));
  Vec3 beta;
  if (p.sigma_beta > 0.0 && noise_gain > 0.0) {
    std::normal_distribution<double> n(0.0, p.sigma_beta);
    beta = {n(rng), n(rng), n(rng)};
  }
  MotionState out;
  out.vel = prev.vel * p.alpha + p.mean_vel * (1.0 - p.alpha) + beta * noise_gain;
  out.pos = prev.pos + out.vel * step_t;
  return out;
}

void Trace::validate() const {
  if (times.size() != values.size())
    throw std::invalid_argument("trace: times/values length mismatch");
  if (times.size() < 2) throw std::invalid_argument("trace: need at least 2 samples");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw std::invalid_argument("trace: times must be strictly increasing (row " +
                                  std::to_string(i + 1) + ")");
  for (const Vec3& v : values)
    if (!v.finite()) throw std::invalid_argument("trace: non-finite sample");
}

namespace {

// Natural cubic spline second derivatives for one scalar channel.
std::vector<double> spline_second_derivs(const std::vector<double>& t,
                                         const std::vector<double>& y) {
  const std::size_t n = t.size();
  std::vector<double> m(n, 0.0);
  if (n < 3) return m;
  std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), d(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = t[i] - t[i - 1];
    const double h1 = t[i + 1] - t[i];
    a[i] = h0;
    b[i] = 2.0 * (h0 + h1);
    c[i] = h1;
    d[i] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
  }
  // Thomas solve on rows 1..n-2 (natural ends: m[0] = m[n-1] = 0).
  for (std::size_t i = 2; i + 1 < n; ++i) {
    const double f = a[i] / b[i - 1];
    b[i] -= f * c[i - 1];
    d[i] -= f * d[i - 1];
  }
  for (std::size_t i = n - 2; i >= 1; --i) {
    m[i] = (d[i] - c[i] * (i + 2 < n ? m[i + 1] : 0.0)) / b[i];
    if (i == 1) break;
  }
  return m;
}

double spline_eval(const std::vector<double>& t, const std::vector<double>& y,
                   const std::vector<double>& m, std::size_t seg, double x) {
  const double h = t[seg + 1] - t[seg];
  const double u = (t[seg + 1] - x) / h;
  const double v = (x - t[seg]) / h;
  return u * y[seg] + v * y[seg + 1] +
         ((u * u * u - u) * m[seg] + (v * v * v - v) * m[seg + 1]) * (h * h) / 6.0;
}

} // namespace

std::vector<Vec3> resample_trace(const Trace& tr, double step_t, ResampleMethod method) {
  tr.validate();
  if (!(step_t > 0.0))
    throw std::invalid_argument("resample_trace: step_t must be > 0");

  const double t0 = tr.times.front();
  const double t_end = tr.times.back();
  const auto n_out =
      static_cast<std::size_t>(std::floor((t_end - t0) / step_t + 1e-9)) + 1;

  std::vector<std::vector<double>> chan(3, std::vector<double>(tr.size()));
  for (std::size_t i = 0; i < tr.size(); ++i) {
    chan[0][i] = tr.values[i].x;
    chan[1][i] = tr.values[i].y;
    chan[2][i] = tr.values[i].z;
  }
  std::vector<std::vector<double>> m2(3);
  if (method == ResampleMethod::CubicSpline)
    for (int c = 0; c < 3; ++c) m2[c] = spline_second_derivs(tr.times, chan[c]);

  std::vector<Vec3> out(n_out);
  std::size_t seg = 0;
  for (std::size_t i = 0; i < n_out; ++i) {
    const double t = t0 + static_cast<double>(i) * step_t;
    while (seg + 2 < tr.size() && tr.times[seg + 1] <= t) ++seg;
    // Snap to a knot when the grid lands on one, reproducing it exactly.
    const double tol = 1e-9 * (1.0 + std::abs(t));
    if (std::abs(t - tr.times[seg]) <= tol) {
      out[i] = tr.values[seg];
      continue;
    }
    if (std::abs(t - tr.times[seg + 1]) <= tol) {
      out[i] = tr.values[seg + 1];
      continue;
    }
    double comp[3];
    for (int c = 0; c < 3; ++c) {
      if (method == ResampleMethod::Linear) {
        const double h = tr.times[seg + 1] - tr.times[seg];
        const double w = (t - tr.times[seg]) / h;
        comp[c] = (1.0 - w) * chan[c][seg] + w * chan[c][seg + 1];
      } else {
        comp[c] = spline_eval(tr.times, chan[c], m2[c], seg, t);
      }
    }
    out[i] = {comp[0], comp[1], comp[2]};
  }
  return out;
}

void TraceTransform::validate() const {
  bool seen[3] = {false, false, false};
  for (int i = 0; i < 3; ++i) {
    if (axis_map[i] < 0 || axis_map[i] > 2)
      throw std::invalid_argument("trace transform: axis indices must be 0..2");
    seen[axis_map[i]] = true;
  }
  if (!(seen[0] && seen[1] && seen[2]))
    throw std::invalid_argument("trace transform: axis map must be a permutation");
}

Trace apply_transform(const Trace& tr, const TraceTransform& tf) {
  tf.validate();
  Trace out = tr;
  const bool add_offset = !tr.is_acceleration;
  for (std::size_t i = 0; i < tr.values.size(); ++i) {
    const double in[3] = {tr.values[i].x, tr.values[i].y, tr.values[i].z};
    Vec3 v{in[tf.axis_map[0]], in[tf.axis_map[1]], in[tf.axis_map[2]]};
    if (add_offset) v += tf.offset;
    out.values[i] = v;
  }
  return out;
}

namespace {

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

} // namespace

Trace load_trace_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open trace file: " + path);
  Trace tr;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(f, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto fields = split_csv_row(t);
    if (!header_seen) {
      if (fields.size() != 4)
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": expected 4-column header");
      const std::string c1 = trim(fields[1]);
      if (trim(fields[0]) != "t" || (c1 != "x" && c1 != "ax"))
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": header must be t,x,y,z or t,ax,ay,az");
      tr.is_acceleration = (c1 == "ax");
      header_seen = true;
      continue;
    }
    if (fields.size() != 4)
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected 4 fields, got " +
                               std::to_string(fields.size()));
    double vals[4];
    for (int i = 0; i < 4; ++i) {
      const std::string fs = trim(fields[i]);
      try {
        std::size_t used = 0;
        vals[i] = std::stod(fs, &used);
        if (used != fs.size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) + ": field " +
                                 std::to_string(i + 1) + " is not a number: '" + fs +
                                 "'");
      }
    }
    if (!tr.times.empty() && !(vals[0] > tr.times.back()))
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": non-monotonic time " + fields[0]);
    tr.times.push_back(vals[0]);
    tr.values.push_back({vals[1], vals[2], vals[3]});
  }
  if (!header_seen) throw std::runtime_error(path + ": empty trace file");
  tr.validate();
  return tr;
}

void save_trace_csv(const Trace& tr, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << (tr.is_acceleration ? "t,ax,ay,az\n" : "t,x,y,z\n");
  char line[160];
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g,%.17g\n", tr.times[i],
                  tr.values[i].x, tr.values[i].y, tr.values[i].z);
    f << line;
  }
}

} // namespace risim::kin
