#include "risim/config_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace risim::sim {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

struct Parser {
  std::string origin;
  std::size_t line_no = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": " + msg);
  }

  double num(const std::string& v, const std::string& key) const {
    try {
      std::size_t used = 0;
      const double d = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument("trailing");
      return d;
    } catch (const std::exception&) {
      fail("field '" + key + "': not a number: '" + v + "'");
    }
  }

  std::int64_t integer(const std::string& v, const std::string& key) const {
    try {
      std::size_t used = 0;
      const long long d = std::stoll(v, &used);
      if (used != v.size()) throw std::invalid_argument("trailing");
      return d;
    } catch (const std::exception&) {
      fail("field '" + key + "': not an integer: '" + v + "'");
    }
  }

  std::uint64_t uinteger(const std::string& v, const std::string& key) const {
    try {
      std::size_t used = 0;
      const unsigned long long d = std::stoull(v, &used);
      if (used != v.size()) throw std::invalid_argument("trailing");
      return d;
    } catch (const std::exception&) {
      fail("field '" + key + "': not an unsigned integer: '" + v + "'");
    }
  }

  std::vector<std::string> tokens(const std::string& v) const {
    std::istringstream is(v);
    std::vector<std::string> out;
    std::string t;
    while (is >> t) out.push_back(t);
    return out;
  }

  Vec3 vec3(const std::string& v, const std::string& key) const {
    auto ts = tokens(v);
    if (ts.size() != 3) fail("field '" + key + "': expected 3 numbers");
    return {num(ts[0], key), num(ts[1], key), num(ts[2], key)};
  }

  em::Complex cplx(const std::string& v, const std::string& key) const {
    auto ts = tokens(v);
    if (ts.size() != 2) fail("field '" + key + "': expected 're im'");
    return {num(ts[0], key), num(ts[1], key)};
  }
};

int axis_index(const std::string& t) {
  if (t == "x" || t == "0") return 0;
  if (t == "y" || t == "1") return 1;
  if (t == "z" || t == "2") return 2;
  return -1;
}

const char* axis_name(int i) { return i == 0 ? "x" : (i == 1 ? "y" : "z"); }

} // namespace

ScenarioConfig parse_config(std::istream& in, const std::string& origin,
                            const std::string& base_dir) {
  ScenarioConfig cfg;
  bool lattice_auto = true;
  Parser p{origin};
  std::string section;
  std::string line;
  while (std::getline(in, line)) {
    ++p.line_no;
    std::string t = trim(line);
    if (!t.empty() && t.back() == '\r') t.pop_back();
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[') {
      if (t.back() != ']') p.fail("unterminated section header");
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) p.fail("expected 'key = value'");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) p.fail("empty key");
    const std::string qual = section + "." + key;

    if (qual == "scenario.name") cfg.name = value;
    else if (qual == "scenario.kind") {
      if (value == "linear") cfg.kind = ScenarioKind::Linear;
      else if (value == "trace") cfg.kind = ScenarioKind::Trace;
      else if (value == "gauss_markov") cfg.kind = ScenarioKind::GaussMarkov;
      else p.fail("kind must be linear | trace | gauss_markov");
    }
    else if (qual == "scenario.duration_s") cfg.duration_s = p.num(value, key);
    else if (qual == "scenario.realizations")
      cfg.realizations = static_cast<int>(p.integer(value, key));
    else if (qual == "scenario.master_seed") cfg.master_seed = p.uinteger(value, key);
    else if (qual == "scenario.loss_window_start_s")
      cfg.loss_window_start_s = value == "auto" ? -1.0 : p.num(value, key);
    else if (qual == "scenario.loss_window_end_s")
      cfg.loss_window_end_s = value == "auto" ? -1.0 : p.num(value, key);
    else if (qual == "timing.step_s") cfg.timing.step_t = p.num(value, key);
    else if (qual == "timing.meas_s") cfg.timing.meas_t = p.num(value, key);
    else if (qual == "timing.delay_s") cfg.timing.t_d_true = p.num(value, key);
    else if (qual == "timing.delay_est_s") cfg.timing.t_d_hat = p.num(value, key);
    else if (qual == "noise.sigma_n_m") cfg.sigma_n = p.num(value, key);
    else if (qual == "linear.initial_pos_m") cfg.initial_state.pos = p.vec3(value, key);
    else if (qual == "linear.initial_vel_mps") cfg.initial_state.vel = p.vec3(value, key);
    else if (qual == "linear.accel_mps2") cfg.accel = p.vec3(value, key);
    else if (qual == "gauss_markov.alpha") cfg.gm.alpha = p.num(value, key);
    else if (qual == "gauss_markov.mean_vel_mps") cfg.gm.mean_vel = p.vec3(value, key);
    else if (qual == "gauss_markov.sigma_beta_mps") cfg.gm.sigma_beta = p.num(value, key);
    else if (qual == "gauss_markov.initial_pos_m")
      cfg.initial_state.pos = p.vec3(value, key);
    else if (qual == "gauss_markov.initial_vel_mps")
      cfg.initial_state.vel = p.vec3(value, key);
    else if (qual == "trace.file") {
      std::filesystem::path fp(value);
      cfg.trace.file =
          fp.is_absolute() ? value : (std::filesystem::path(base_dir) / fp).string();
    }
    else if (qual == "trace.method") {
      if (value == "linear") cfg.trace.method = kin::ResampleMethod::Linear;
      else if (value == "cubic" || value == "cubic-spline")
        cfg.trace.method = kin::ResampleMethod::CubicSpline;
      else p.fail("method must be linear | cubic");
    }
    else if (qual == "trace.axis_map") {
      auto ts = p.tokens(value);
      if (ts.size() != 3) p.fail("axis_map needs 3 axis names");
      for (int i = 0; i < 3; ++i) {
        const int a = axis_index(ts[i]);
        if (a < 0) p.fail("axis_map: bad axis '" + ts[i] + "'");
        cfg.trace.transform.axis_map[i] = a;
      }
    }
    else if (qual == "trace.offset_m") cfg.trace.transform.offset = p.vec3(value, key);
    else if (qual == "trace.initial_pos_m") cfg.trace.initial_pos = p.vec3(value, key);
    else if (qual == "trace.initial_vel_mps") cfg.trace.initial_vel = p.vec3(value, key);
    else if (qual == "ris.rows") cfg.ris.rows = static_cast<int>(p.integer(value, key));
    else if (qual == "ris.cols") cfg.ris.cols = static_cast<int>(p.integer(value, key));
    else if (qual == "ris.freq_hz") cfg.ris.cell.freq = p.num(value, key);
    else if (qual == "ris.lattice_d_m") {
      if (value == "auto") lattice_auto = true;
      else {
        cfg.ris.cell.lattice_d = p.num(value, key);
        lattice_auto = false;
      }
    }
    else if (qual == "ris.gap_m") cfg.ris.cell.gap_g = p.num(value, key);
    else if (qual == "ris.slab_d_m") cfg.ris.cell.slab_d = p.num(value, key);
    else if (qual == "ris.eps_r") cfg.ris.cell.eps_r = p.cplx(value, key);
    else if (qual == "ris.cjo_f") cfg.ris.varactor.c_j0 = p.num(value, key);
    else if (qual == "ris.vj_v") cfg.ris.varactor.v_j = p.num(value, key);
    else if (qual == "ris.grading") cfg.ris.varactor.grading = p.num(value, key);
    else if (qual == "ris.rs_ohm") cfg.ris.varactor.r_s = p.num(value, key);
    else if (qual == "ris.ls_h") cfg.ris.varactor.l_s = p.num(value, key);
    else if (qual == "ris.cp_f") cfg.ris.varactor.c_p = p.num(value, key);
    else if (qual == "ris.lut_v_min") cfg.ris.lut_v_min = p.num(value, key);
    else if (qual == "ris.lut_v_max") cfg.ris.lut_v_max = p.num(value, key);
    else if (qual == "ris.lut_points")
      cfg.ris.lut_points = static_cast<int>(p.integer(value, key));
    else if (qual == "ris.topology") {
      if (value == "series") cfg.ris.topology = em::VaractorTopology::Series;
      else if (value == "parallel") cfg.ris.topology = em::VaractorTopology::AllParallel;
      else p.fail("topology must be series | parallel");
    }
    else if (qual == "link.tx_pos_m") cfg.tx_pos = p.vec3(value, key);
    else if (qual == "link.tx_power_w") cfg.tx_power_w = p.num(value, key);
    else if (qual == "link.directivity_exponent")
      cfg.antennas.directivity_exponent = p.num(value, key);
    else if (qual == "link.dipole_coefficient")
      cfg.antennas.dipole_coefficient = p.num(value, key);
    else p.fail("unknown field '" + qual + "'");
  }
  if (lattice_auto)
    cfg.ris.cell.lattice_d = 0.5 * cfg.ris.cell.wavelength();
  cfg.validate();
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config file: " + path);
  const std::string dir = std::filesystem::path(path).parent_path().string();
  return parse_config(f, path, dir.empty() ? "." : dir);
}

void write_config(const ScenarioConfig& cfg, std::ostream& out) {
  char buf[512];
  auto w = [&](const char* fmt, auto... args) {
    std::snprintf(buf, sizeof(buf), fmt, args...);
    out << buf;
  };
  const char* kind = cfg.kind == ScenarioKind::Linear ? "linear"
                     : cfg.kind == ScenarioKind::Trace ? "trace"
                                                       : "gauss_markov";
  w("[scenario]\nname = %s\nkind = %s\nduration_s = %.17g\nrealizations = %d\n"
    "master_seed = %llu\n",
    cfg.name.c_str(), kind, cfg.duration_s, cfg.realizations,
    static_cast<unsigned long long>(cfg.master_seed));
  if (cfg.loss_window_start_s >= 0.0)
    w("loss_window_start_s = %.17g\n", cfg.loss_window_start_s);
  else
    out << "loss_window_start_s = auto\n";
  if (cfg.loss_window_end_s >= 0.0)
    w("loss_window_end_s = %.17g\n", cfg.loss_window_end_s);
  else
    out << "loss_window_end_s = auto\n";

  w("\n[timing]\nstep_s = %.17g\nmeas_s = %.17g\ndelay_s = %.17g\ndelay_est_s = %.17g\n",
    cfg.timing.step_t, cfg.timing.meas_t, cfg.timing.t_d_true, cfg.timing.t_d_hat);
  w("\n[noise]\nsigma_n_m = %.17g\n", cfg.sigma_n);

  if (cfg.kind == ScenarioKind::Linear) {
    w("\n[linear]\ninitial_pos_m = %.17g %.17g %.17g\n"
      "initial_vel_mps = %.17g %.17g %.17g\naccel_mps2 = %.17g %.17g %.17g\n",
      cfg.initial_state.pos.x, cfg.initial_state.pos.y, cfg.initial_state.pos.z,
      cfg.initial_state.vel.x, cfg.initial_state.vel.y, cfg.initial_state.vel.z,
      cfg.accel.x, cfg.accel.y, cfg.accel.z);
  } else if (cfg.kind == ScenarioKind::GaussMarkov) {
    w("\n[gauss_markov]\nalpha = %.17g\nmean_vel_mps = %.17g %.17g %.17g\n"
      "sigma_beta_mps = %.17g\ninitial_pos_m = %.17g %.17g %.17g\n"
      "initial_vel_mps = %.17g %.17g %.17g\n",
      cfg.gm.alpha, cfg.gm.mean_vel.x, cfg.gm.mean_vel.y, cfg.gm.mean_vel.z,
      cfg.gm.sigma_beta, cfg.initial_state.pos.x, cfg.initial_state.pos.y,
      cfg.initial_state.pos.z, cfg.initial_state.vel.x, cfg.initial_state.vel.y,
      cfg.initial_state.vel.z);
  } else {
    w("\n[trace]\nfile = %s\nmethod = %s\naxis_map = %s %s %s\n"
      "offset_m = %.17g %.17g %.17g\ninitial_pos_m = %.17g %.17g %.17g\n"
      "initial_vel_mps = %.17g %.17g %.17g\n",
      cfg.trace.file.c_str(),
      cfg.trace.method == kin::ResampleMethod::Linear ? "linear" : "cubic",
      axis_name(cfg.trace.transform.axis_map[0]),
      axis_name(cfg.trace.transform.axis_map[1]),
      axis_name(cfg.trace.transform.axis_map[2]), cfg.trace.transform.offset.x,
      cfg.trace.transform.offset.y, cfg.trace.transform.offset.z, cfg.trace.initial_pos.x,
      cfg.trace.initial_pos.y, cfg.trace.initial_pos.z, cfg.trace.initial_vel.x,
      cfg.trace.initial_vel.y, cfg.trace.initial_vel.z);
  }

  w("\n[ris]\nrows = %d\ncols = %d\nfreq_hz = %.17g\nlattice_d_m = %.17g\n"
    "gap_m = %.17g\nslab_d_m = %.17g\neps_r = %.17g %.17g\n",
    cfg.ris.rows, cfg.ris.cols, cfg.ris.cell.freq, cfg.ris.cell.lattice_d,
    cfg.ris.cell.gap_g, cfg.ris.cell.slab_d, cfg.ris.cell.eps_r.real(),
    cfg.ris.cell.eps_r.imag());
  w("cjo_f = %.17g\nvj_v = %.17g\ngrading = %.17g\nrs_ohm = %.17g\nls_h = %.17g\n"
    "cp_f = %.17g\nlut_v_min = %.17g\nlut_v_max = %.17g\nlut_points = %d\n"
    "topology = %s\n",
    cfg.ris.varactor.c_j0, cfg.ris.varactor.v_j, cfg.ris.varactor.grading,
    cfg.ris.varactor.r_s, cfg.ris.varactor.l_s, cfg.ris.varactor.c_p, cfg.ris.lut_v_min,
    cfg.ris.lut_v_max, cfg.ris.lut_points,
    cfg.ris.topology == em::VaractorTopology::Series ? "series" : "parallel");

  w("\n[link]\ntx_pos_m = %.17g %.17g %.17g\ntx_power_w = %.17g\n"
    "directivity_exponent = %.17g\ndipole_coefficient = %.17g\n",
    cfg.tx_pos.x, cfg.tx_pos.y, cfg.tx_pos.z, cfg.tx_power_w,
    cfg.antennas.directivity_exponent, cfg.antennas.dipole_coefficient);
}

void save_config(const ScenarioConfig& cfg, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  write_config(cfg, f);
}

} // namespace risim::sim
