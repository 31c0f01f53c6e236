#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aftmc/channel.hpp"
#include "aftmc/crlb.hpp"
#include "aftmc/estimator.hpp"
#include "aftmc/harness.hpp"
#include "aftmc/rng.hpp"

namespace {

using namespace aftmc;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int trials = 0;
  int threads = -1;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "Path to a JSON config file");
  cmd->add_option("--out", flags.out_dir, "Output directory (overrides config)");
  cmd->add_option("--seed", flags.seed, "Master seed (overrides config)")
      ->each([&](const std::string&) { flags.seed_set = true; });
  cmd->add_option("--trials", flags.trials, "Trial count (overrides config)");
  cmd->add_option("--threads", flags.threads,
                  "Worker threads, 1 forces serial (overrides config)");
}

ExperimentConfig resolve_config(const CommonFlags& flags) {
  ExperimentConfig cfg;
  if (!flags.config_path.empty()) {
    try {
      cfg = load_config(flags.config_path);
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
  }
  if (flags.seed_set) cfg.master_seed = flags.seed;
  if (flags.trials > 0) cfg.trials = flags.trials;
  if (flags.threads >= 0) cfg.threads = flags.threads;
  if (!flags.out_dir.empty()) cfg.output_dir = flags.out_dir;
  try {
    cfg.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory: " + dir);
}

int cmd_simulate(const CommonFlags& flags, double snr_db) {
  ExperimentConfig cfg = resolve_config(flags);
  PointReference ref = point_reference(cfg, cfg.waveform, snr_db);
  std::uint64_t seed = derive_trial_seed(cfg.master_seed, cfg.waveform.c1,
                                         cfg.waveform.c2, snr_db, 0);
  TrialRecord rec = run_trial(cfg, cfg.waveform, ref.sigma2, seed);

  Scene sc = cfg.scene();
  std::vector<PathParams> truth;
  for (const Target& t : sc.targets)
    truth.push_back(target_to_path(t, sc, cfg.array, cfg.waveform));

  std::printf("snr_db=%g sigma2=%.6g seed=%llu%s\n", snr_db, ref.sigma2,
              static_cast<unsigned long long>(seed),
              rec.failed ? " FAILED" : "");
  if (rec.failed) std::printf("failure: %s\n", rec.note.c_str());
  std::printf("%-8s %12s %14s %12s %14s\n", "target", "theta_deg", "tau_s",
              "nu_hz", "pos_err_m");
  for (std::size_t i = 0; i < truth.size(); ++i) {
    std::printf("true %-3zu %12.6f %14.6e %12.3f %14s\n", i,
                rad2deg(truth[i].theta), truth[i].tau, truth[i].nu, "");
    if (!rec.failed && i < rec.estimates.size()) {
      const PathParams& e = rec.estimates[i];
      std::printf("est  %-3zu %12.6f %14.6e %12.3f %14.6f\n", i,
                  rad2deg(e.theta), e.tau, e.nu, rec.position_error_m[i]);
    }
  }
  return 0;
}

int cmd_sweep(const CommonFlags& flags) {
  ExperimentConfig cfg = resolve_config(flags);
  SweepResult result = run_sweep(cfg);
  write_sweep_outputs(cfg, result, cfg.output_dir);
  std::printf("wrote %s/sweep.csv (%zu rows, %.1f s)\n", cfg.output_dir.c_str(),
              result.rows.size(), result.wall_seconds);
  return 0;
}

int cmd_crlb(const CommonFlags& flags, std::vector<double> c1_list,
             std::vector<double> c2_list) {
  ExperimentConfig cfg = resolve_config(flags);
  if (c1_list.empty()) c1_list = {0.0, 0.03, 0.08};
  if (c2_list.empty()) c2_list = {0.0};

  ensure_dir(cfg.output_dir);
  std::string path = cfg.output_dir + "/crlb.csv";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "c1,c2,snr_db,sigma2,trace_crlb_m2,crlb_rms_position_m,observable\n";
  char line[256];
  for (double c1 : c1_list) {
    for (double c2 : c2_list) {
      WaveformParams wf = cfg.waveform;
      wf.c1 = c1;
      wf.c2 = c2;
      for (double snr : cfg.snr_grid_db) {
        PointReference ref = point_reference(cfg, wf, snr);
        Scene sc = cfg.scene();
        for (Target& t : sc.targets) t.beta = Complex(1.0, 0.0);
        FimReport rep = crlb_position(sc, ref.x_ref, wf, cfg.array, ref.sigma2);
        std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n",
                      c1, c2, snr, ref.sigma2,
                      rep.observable ? rep.trace_crlb() : std::nan(""),
                      ref.crlb_rms_position_m, rep.observable ? 1 : 0);
        out << line;
      }
    }
  }
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

int cmd_spectrum(const CommonFlags& flags, double snr_db) {
  ExperimentConfig cfg = resolve_config(flags);
  PointReference ref = point_reference(cfg, cfg.waveform, snr_db);
  std::uint64_t seed = derive_trial_seed(cfg.master_seed, cfg.waveform.c1,
                                         cfg.waveform.c2, snr_db, 0);

  CVector x = qam_symbols(cfg.waveform.qam_order, cfg.waveform.M, mix_seed(seed, 1));
  Scene sc = cfg.scene();
  std::vector<PathParams> paths;
  for (const Target& t : sc.targets)
    paths.push_back(target_to_path(t, sc, cfg.array, cfg.waveform));
  ReceivedSignal rx = synthesize_matrix_model(x, paths, cfg.waveform, cfg.array,
                                              ref.sigma2, mix_seed(seed, 3));
  CMatrix R_ss = spatial_smooth_covariance(rx.Y, cfg.music.K);
  MusicSpectrum spec = music_spectrum(R_ss, cfg.music, cfg.array,
                                      static_cast<int>(cfg.targets.size()));

  ensure_dir(cfg.output_dir);
  std::string path = cfg.output_dir + "/spectrum.csv";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  char line[128];
  for (Eigen::Index i = 0; i < spec.angles.size(); ++i) {
    std::snprintf(line, sizeof(line), "%.17g,%.17g\n", rad2deg(spec.angles(i)),
                  spec.values(i));
    out << line;
  }
  std::printf("wrote %s (%lld rows)\n", path.c_str(),
              static_cast<long long>(spec.angles.size()));
  return 0;
}

int cmd_optimize_c2(const CommonFlags& flags, int draws, int budget,
                    double snr_db, double c1) {
  ExperimentConfig cfg = resolve_config(flags);
  WaveformParams wf = cfg.waveform;
  wf.c1 = c1;
  wf.c2 = 0.0;
  PointReference ref = point_reference(cfg, wf, snr_db);
  Scene sc = cfg.scene();
  for (Target& t : sc.targets) t.beta = Complex(1.0, 0.0);

  ensure_dir(cfg.output_dir);
  std::string path = cfg.output_dir + "/optimize_c2.csv";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "draw,c2,baseline_trace_m2,optimized_trace_m2,improved\n";
  int improved = 0;
  char line[192];
  for (int d = 0; d < draws; ++d) {
    CVector x = qam_symbols(wf.qam_order, wf.M,
                            mix_seed(cfg.master_seed, 1000 + d));
    C2SearchResult res = optimize_c2(sc, x, wf, cfg.array, ref.sigma2, budget);
    bool better = res.trace_crlb < res.baseline_trace;
    improved += better ? 1 : 0;
    std::snprintf(line, sizeof(line), "%d,%.17g,%.17g,%.17g,%d\n", d, res.c2,
                  res.baseline_trace, res.trace_crlb, better ? 1 : 0);
    out << line;
  }
  std::printf("wrote %s; %d/%d draws improved on c2=0\n", path.c_str(),
              improved, draws);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chirp-multicarrier multi-target localization simulator"};
  app.require_subcommand(1);

  CommonFlags flags;
  double snr_db = 10.0;
  std::vector<double> c1_list, c2_list;
  int draws = 50, budget = 400;
  double opt_c1 = 0.0;

  CLI::App* sim = app.add_subcommand("simulate", "Run one trial and print estimates");
  add_common(sim, flags);
  sim->add_option("--snr", snr_db, "SNR in dB (default 10)");

  CLI::App* sweep = app.add_subcommand("sweep", "Monte Carlo sweep, writes CSV + metadata");
  add_common(sweep, flags);

  CLI::App* crlb = app.add_subcommand("crlb", "Position CRLB over a c1/c2 grid");
  add_common(crlb, flags);
  crlb->add_option("--c1", c1_list, "c1 values (default 0 0.03 0.08)");
  crlb->add_option("--c2", c2_list, "c2 values (default 0)");

  CLI::App* spectrum = app.add_subcommand("spectrum", "Angle pseudospectrum dump");
  add_common(spectrum, flags);
  spectrum->add_option("--snr", snr_db, "SNR in dB (default 10)");

  CLI::App* opt = app.add_subcommand("optimize-c2", "Post-chirp rate search report");
  add_common(opt, flags);
  opt->add_option("--draws", draws, "Random symbol draws (default 50)");
  opt->add_option("--budget", budget, "Objective evaluations per draw (default 400)");
  opt->add_option("--snr", snr_db, "SNR in dB (default 10)");
  opt->add_option("--c1", opt_c1, "Pre-chirp rate (default 0)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (sim->parsed()) return cmd_simulate(flags, snr_db);
    if (sweep->parsed()) return cmd_sweep(flags);
    if (crlb->parsed()) return cmd_crlb(flags, c1_list, c2_list);
    if (spectrum->parsed()) return cmd_spectrum(flags, snr_db);
    if (opt->parsed()) return cmd_optimize_c2(flags, draws, budget, snr_db, opt_c1);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
