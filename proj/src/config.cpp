#include "aftmc/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace aftmc {

using nlohmann::json;

Scene ExperimentConfig::scene() const {
  Scene sc;
  sc.q_bs = q_bs;
  sc.beam_direction = deg2rad(beam_direction_deg);
  for (const TargetSpec& t : targets) {
    double theta = deg2rad(t.angle_deg);
    Vec2 u(std::sin(theta), std::cos(theta));
    Target tgt;
    tgt.q = q_bs + t.range_m * u;
    tgt.v = t.speed_mps * u;
    tgt.beta = beta_fixed;
    sc.targets.push_back(tgt);
  }
  return sc;
}

void ExperimentConfig::validate() const {
  waveform.validate();
  array.validate();
  music.validate(array.N_r);
  ddsearch.validate();
  if (targets.empty())
    throw std::invalid_argument("config: at least one target required");
  for (const TargetSpec& t : targets) {
    if (t.range_m <= 0.0)
      throw std::invalid_argument("config: target range must be positive");
    if (std::abs(t.angle_deg) >= 90.0)
      throw std::invalid_argument("config: target angle must lie in (-90, 90) deg");
    double tau = 2.0 * t.range_m / kSpeedOfLight;
    if (tau >= waveform.cpp_duration())
      throw std::invalid_argument(
          "config: target range exceeds the prefix's unambiguous window");
  }
  if (static_cast<int>(targets.size()) >= array.N_r - music.K + 1)
    throw std::invalid_argument(
        "config: smoothing subarray must exceed the target count");
  if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  if (threads < 0) throw std::invalid_argument("config: threads must be >= 0");
  if (sweep.parameter != "none" && sweep.parameter != "c1" &&
      sweep.parameter != "c2" && sweep.parameter != "snr")
    throw std::invalid_argument("config: sweep parameter must be none, c1, c2 or snr");
  if (sweep.parameter != "none" && sweep.values.empty())
    throw std::invalid_argument("config: sweep values must be non-empty");
  if (sweep.parameter != "snr" && snr_grid_db.empty())
    throw std::invalid_argument("config: snr_grid_db must be non-empty");
}

namespace {

void require_keys(const json& j, const char* where,
                  const std::set<std::string>& allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key()))
      throw std::invalid_argument(std::string("config: unknown key '") +
                                  it.key() + "' in " + where);
  }
}

}  // namespace

ExperimentConfig config_from_json_text(const std::string& text) {
  json j = json::parse(text);
  ExperimentConfig cfg;

  require_keys(j, "root",
               {"schema_version", "waveform", "array", "scene", "music",
                "ddsearch", "snr_grid_db", "trials", "master_seed", "sweep",
                "output_dir", "threads"});
  if (j.value("schema_version", 1) != 1)
    throw std::invalid_argument("config: unsupported schema_version");

  if (j.contains("waveform")) {
    const json& w = j["waveform"];
    require_keys(w, "waveform",
                 {"M", "c1", "c2", "subcarrier_spacing_hz", "L", "qam_order"});
    cfg.waveform.M = w.value("M", cfg.waveform.M);
    cfg.waveform.c1 = w.value("c1", cfg.waveform.c1);
    cfg.waveform.c2 = w.value("c2", cfg.waveform.c2);
    double spacing = w.value("subcarrier_spacing_hz", 1.0 / cfg.waveform.T);
    if (spacing <= 0.0)
      throw std::invalid_argument("config: subcarrier_spacing_hz must be positive");
    cfg.waveform.T = 1.0 / spacing;
    cfg.waveform.L = w.value("L", cfg.waveform.L);
    cfg.waveform.qam_order = w.value("qam_order", cfg.waveform.qam_order);
  }

  if (j.contains("array")) {
    const json& a = j["array"];
    require_keys(a, "array",
                 {"N_t", "N_r", "element_spacing_m", "f_c_hz", "power"});
    cfg.array.N_t = a.value("N_t", cfg.array.N_t);
    cfg.array.N_r = a.value("N_r", cfg.array.N_r);
    cfg.array.d = a.value("element_spacing_m", cfg.array.d);
    cfg.array.f_c = a.value("f_c_hz", cfg.array.f_c);
    cfg.array.p = a.value("power", cfg.array.p);
  }

  if (j.contains("scene")) {
    const json& s = j["scene"];
    require_keys(s, "scene",
                 {"q_bs_m", "beam_direction_deg", "targets", "beta_mode",
                  "beta_fixed"});
    if (s.contains("q_bs_m")) {
      auto v = s["q_bs_m"].get<std::vector<double>>();
      if (v.size() != 2)
        throw std::invalid_argument("config: q_bs_m must have two entries");
      cfg.q_bs = Vec2(v[0], v[1]);
    }
    cfg.beam_direction_deg = s.value("beam_direction_deg", cfg.beam_direction_deg);
    if (s.contains("targets")) {
      cfg.targets.clear();
      for (const json& t : s["targets"]) {
        require_keys(t, "scene.targets[]", {"range_m", "speed_mps", "angle_deg"});
        TargetSpec spec;
        spec.range_m = t.value("range_m", 0.0);
        spec.speed_mps = t.value("speed_mps", 0.0);
        spec.angle_deg = t.value("angle_deg", 0.0);
        cfg.targets.push_back(spec);
      }
    }
    std::string mode = s.value("beta_mode", std::string("random_phase"));
    if (mode == "random_phase") {
      cfg.beta_random_phase = true;
    } else if (mode == "fixed") {
      cfg.beta_random_phase = false;
    } else {
      throw std::invalid_argument("config: beta_mode must be random_phase or fixed");
    }
    if (s.contains("beta_fixed")) {
      auto v = s["beta_fixed"].get<std::vector<double>>();
      if (v.size() != 2)
        throw std::invalid_argument("config: beta_fixed must be [re, im]");
      cfg.beta_fixed = Complex(v[0], v[1]);
    }
  }

  if (j.contains("music")) {
    const json& m = j["music"];
    require_keys(m, "music", {"K", "grid_deg", "fb_averaging"});
    cfg.music.K = m.value("K", cfg.music.K);
    cfg.music.grid_deg = m.value("grid_deg", cfg.music.grid_deg);
    cfg.music.fb_averaging = m.value("fb_averaging", cfg.music.fb_averaging);
  }

  if (j.contains("ddsearch")) {
    const json& d = j["ddsearch"];
    require_keys(d, "ddsearch",
                 {"tau_oversample", "nu_oversample", "nu_max_hz",
                  "outer_iterations", "refine_tol", "refine_max_steps"});
    cfg.ddsearch.tau_oversample = d.value("tau_oversample", cfg.ddsearch.tau_oversample);
    cfg.ddsearch.nu_oversample = d.value("nu_oversample", cfg.ddsearch.nu_oversample);
    cfg.ddsearch.nu_max_hz = d.value("nu_max_hz", cfg.ddsearch.nu_max_hz);
    cfg.ddsearch.outer_iterations =
        d.value("outer_iterations", cfg.ddsearch.outer_iterations);
    cfg.ddsearch.refine_tol = d.value("refine_tol", cfg.ddsearch.refine_tol);
    cfg.ddsearch.refine_max_steps =
        d.value("refine_max_steps", cfg.ddsearch.refine_max_steps);
  }

  if (j.contains("snr_grid_db"))
    cfg.snr_grid_db = j["snr_grid_db"].get<std::vector<double>>();
  cfg.trials = j.value("trials", cfg.trials);
  cfg.master_seed = j.value("master_seed", cfg.master_seed);

  if (j.contains("sweep")) {
    const json& s = j["sweep"];
    require_keys(s, "sweep", {"parameter", "values"});
    cfg.sweep.parameter = s.value("parameter", std::string("none"));
    cfg.sweep.values.clear();
    if (s.contains("values"))
      cfg.sweep.values = s["values"].get<std::vector<double>>();
  }

  cfg.output_dir = j.value("output_dir", cfg.output_dir);
  cfg.threads = j.value("threads", cfg.threads);

  cfg.validate();
  return cfg;
}

std::string config_to_json_text(const ExperimentConfig& cfg) {
  json j;
  j["schema_version"] = 1;
  j["waveform"] = {{"M", cfg.waveform.M},
                   {"c1", cfg.waveform.c1},
                   {"c2", cfg.waveform.c2},
                   {"subcarrier_spacing_hz", 1.0 / cfg.waveform.T},
                   {"L", cfg.waveform.L},
                   {"qam_order", cfg.waveform.qam_order}};
  j["array"] = {{"N_t", cfg.array.N_t},
                {"N_r", cfg.array.N_r},
                {"element_spacing_m", cfg.array.d},
                {"f_c_hz", cfg.array.f_c},
                {"power", cfg.array.p}};
  json targets = json::array();
  for (const TargetSpec& t : cfg.targets)
    targets.push_back({{"range_m", t.range_m},
                       {"speed_mps", t.speed_mps},
                       {"angle_deg", t.angle_deg}});
  j["scene"] = {{"q_bs_m", {cfg.q_bs.x(), cfg.q_bs.y()}},
                {"beam_direction_deg", cfg.beam_direction_deg},
                {"targets", targets},
                {"beta_mode", cfg.beta_random_phase ? "random_phase" : "fixed"},
                {"beta_fixed", {cfg.beta_fixed.real(), cfg.beta_fixed.imag()}}};
  j["music"] = {{"K", cfg.music.K},
                {"grid_deg", cfg.music.grid_deg},
                {"fb_averaging", cfg.music.fb_averaging}};
  j["ddsearch"] = {{"tau_oversample", cfg.ddsearch.tau_oversample},
                   {"nu_oversample", cfg.ddsearch.nu_oversample},
                   {"nu_max_hz", cfg.ddsearch.nu_max_hz},
                   {"outer_iterations", cfg.ddsearch.outer_iterations},
                   {"refine_tol", cfg.ddsearch.refine_tol},
                   {"refine_max_steps", cfg.ddsearch.refine_max_steps}};
  j["snr_grid_db"] = cfg.snr_grid_db;
  j["trials"] = cfg.trials;
  j["master_seed"] = cfg.master_seed;
  j["sweep"] = {{"parameter", cfg.sweep.parameter}, {"values", cfg.sweep.values}};
  j["output_dir"] = cfg.output_dir;
  j["threads"] = cfg.threads;
  return j.dump(2);
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return config_from_json_text(buf.str());
  } catch (const std::exception& e) {
    throw std::runtime_error("config error in " + path + ": " + e.what());
  }
}

}  // namespace aftmc
