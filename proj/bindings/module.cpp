#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "aftmc/channel.hpp"
#include "aftmc/config.hpp"
#include "aftmc/crlb.hpp"
#include "aftmc/estimator.hpp"
#include "aftmc/geometry.hpp"
#include "aftmc/harness.hpp"
#include "aftmc/types.hpp"
#include "aftmc/waveform.hpp"

namespace py = pybind11;
using namespace aftmc;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Chirp-multicarrier multi-target localization simulator";
  m.attr("__version__") = kVersion;
  m.attr("SPEED_OF_LIGHT") = kSpeedOfLight;

  py::class_<WaveformParams>(m, "WaveformParams")
      .def(py::init<>())
      .def_readwrite("M", &WaveformParams::M)
      .def_readwrite("c1", &WaveformParams::c1)
      .def_readwrite("c2", &WaveformParams::c2)
      .def_readwrite("T", &WaveformParams::T)
      .def_readwrite("L", &WaveformParams::L)
      .def_readwrite("qam_order", &WaveformParams::qam_order)
      .def("subcarrier_spacing", &WaveformParams::subcarrier_spacing)
      .def("sample_period", &WaveformParams::sample_period)
      .def("cpp_duration", &WaveformParams::cpp_duration)
      .def("validate", &WaveformParams::validate);

  py::class_<ArrayParams>(m, "ArrayParams")
      .def(py::init<>())
      .def_readwrite("N_t", &ArrayParams::N_t)
      .def_readwrite("N_r", &ArrayParams::N_r)
      .def_readwrite("d", &ArrayParams::d)
      .def_readwrite("f_c", &ArrayParams::f_c)
      .def_readwrite("p", &ArrayParams::p)
      .def("wavelength", &ArrayParams::wavelength)
      .def("spacing", &ArrayParams::spacing);

  py::class_<Target>(m, "Target")
      .def(py::init<>())
      .def_readwrite("q", &Target::q)
      .def_readwrite("v", &Target::v)
      .def_readwrite("beta", &Target::beta);

  py::class_<PathParams>(m, "PathParams")
      .def(py::init<>())
      .def_readwrite("h", &PathParams::h)
      .def_readwrite("theta", &PathParams::theta)
      .def_readwrite("tau", &PathParams::tau)
      .def_readwrite("nu", &PathParams::nu);

  py::class_<Scene>(m, "Scene")
      .def(py::init<>())
      .def_readwrite("q_bs", &Scene::q_bs)
      .def_readwrite("targets", &Scene::targets)
      .def_readwrite("beam_direction", &Scene::beam_direction);

  // waveform
  m.def("daft_matrix", &daft_matrix, py::arg("params"));
  m.def("modulate", &modulate, py::arg("x"), py::arg("params"));
  m.def("demodulate",
        py::overload_cast<const CMatrix&, const WaveformParams&>(&demodulate),
        py::arg("R"), py::arg("params"));
  m.def("demodulate_vector",
        py::overload_cast<const CVector&, const WaveformParams&>(&demodulate),
        py::arg("r"), py::arg("params"));
  m.def("add_cpp", &add_cpp, py::arg("s"), py::arg("params"));
  m.def("continuous_signal", &continuous_signal, py::arg("x"), py::arg("params"),
        py::arg("t"));
  m.def("qam_alphabet", &qam_alphabet, py::arg("order"));
  m.def("qam_symbols", &qam_symbols, py::arg("order"), py::arg("count"),
        py::arg("seed"));

  // geometry
  m.def("steering_rx", &steering_rx, py::arg("theta"), py::arg("array"));
  m.def("steering_tx", &steering_tx, py::arg("theta"), py::arg("array"));
  m.def("beamformer", &beamformer, py::arg("array"), py::arg("theta_tilde"));
  m.def("doppler_shift", &doppler_shift, py::arg("v"), py::arg("q"),
        py::arg("q_bs"), py::arg("f_c"));
  m.def("target_to_path", &target_to_path, py::arg("target"), py::arg("scene"),
        py::arg("array"), py::arg("waveform"));
  m.def("path_to_position", &path_to_position, py::arg("theta"), py::arg("tau"),
        py::arg("q_bs"));

  // channel
  py::class_<ReceivedSignal>(m, "ReceivedSignal")
      .def_readonly("Y", &ReceivedSignal::Y)
      .def_readonly("R", &ReceivedSignal::R);
  m.def("subcarrier_channel", &subcarrier_channel, py::arg("tau"), py::arg("nu"),
        py::arg("waveform"));
  m.def("apply_subcarrier_channel", &apply_subcarrier_channel, py::arg("x"),
        py::arg("tau"), py::arg("nu"), py::arg("waveform"));
  m.def("synthesize_matrix_model", &synthesize_matrix_model, py::arg("x"),
        py::arg("paths"), py::arg("waveform"), py::arg("array"),
        py::arg("sigma2"), py::arg("noise_seed"));
  m.def("synthesize_oracle", &synthesize_oracle, py::arg("x"), py::arg("scene"),
        py::arg("array"), py::arg("waveform"), py::arg("sigma2"),
        py::arg("noise_seed"));
  m.def("snr_to_sigma2", &snr_to_sigma2, py::arg("snr_db"),
        py::arg("noiseless_Y"));

  // estimator
  py::class_<MusicConfig>(m, "MusicConfig")
      .def(py::init<>())
      .def_readwrite("K", &MusicConfig::K)
      .def_readwrite("grid_deg", &MusicConfig::grid_deg)
      .def_readwrite("fb_averaging", &MusicConfig::fb_averaging);
  py::class_<DdSearchConfig>(m, "DdSearchConfig")
      .def(py::init<>())
      .def_readwrite("tau_oversample", &DdSearchConfig::tau_oversample)
      .def_readwrite("nu_oversample", &DdSearchConfig::nu_oversample)
      .def_readwrite("nu_max_hz", &DdSearchConfig::nu_max_hz)
      .def_readwrite("outer_iterations", &DdSearchConfig::outer_iterations)
      .def_readwrite("refine_tol", &DdSearchConfig::refine_tol)
      .def_readwrite("refine_max_steps", &DdSearchConfig::refine_max_steps);
  py::class_<MusicSpectrum>(m, "MusicSpectrum")
      .def_readonly("angles", &MusicSpectrum::angles)
      .def_readonly("values", &MusicSpectrum::values);
  py::class_<PeakPick>(m, "PeakPick")
      .def_readonly("angles", &PeakPick::angles)
      .def_readonly("degenerate", &PeakPick::degenerate);
  py::class_<EstimationResult>(m, "EstimationResult")
      .def_readonly("paths", &EstimationResult::paths)
      .def_readonly("spectrum", &EstimationResult::spectrum)
      .def_readonly("residual_energy", &EstimationResult::residual_energy)
      .def_readonly("degenerate", &EstimationResult::degenerate);
  m.def("spatial_smooth_covariance", &spatial_smooth_covariance, py::arg("Y"),
        py::arg("K"));
  m.def("music_spectrum", &music_spectrum, py::arg("R_ss"), py::arg("config"),
        py::arg("array"), py::arg("num_sources"));
  m.def("pick_peaks", &pick_peaks, py::arg("angles"), py::arg("values"),
        py::arg("count"));
  m.def("aml_objective", &aml_objective, py::arg("tau"), py::arg("nu"),
        py::arg("theta"), py::arg("y"), py::arg("x"), py::arg("waveform"),
        py::arg("array"));
  m.def("estimate_delay_doppler", &estimate_delay_doppler, py::arg("theta"),
        py::arg("y"), py::arg("x"), py::arg("config"), py::arg("waveform"),
        py::arg("array"));
  m.def("estimate_gain", &estimate_gain, py::arg("theta"), py::arg("tau"),
        py::arg("nu"), py::arg("y"), py::arg("x"), py::arg("waveform"),
        py::arg("array"));
  m.def("estimate_all", &estimate_all, py::arg("Y"), py::arg("x"),
        py::arg("num_targets"), py::arg("music_config"), py::arg("dd_config"),
        py::arg("waveform"), py::arg("array"));

  // crlb
  py::class_<FimReport>(m, "FimReport")
      .def_readonly("J_rho", &FimReport::J_rho)
      .def_readonly("J_eta", &FimReport::J_eta)
      .def_readonly("crlb", &FimReport::crlb)
      .def_readonly("T_jac", &FimReport::T_jac)
      .def_readonly("observable", &FimReport::observable)
      .def("trace_crlb", &FimReport::trace_crlb)
      .def("rms_position_bound", &FimReport::rms_position_bound)
      .def("target_bound", &FimReport::target_bound, py::arg("i"));
  py::class_<C2SearchResult>(m, "C2SearchResult")
      .def_readonly("c2", &C2SearchResult::c2)
      .def_readonly("trace_crlb", &C2SearchResult::trace_crlb)
      .def_readonly("baseline_trace", &C2SearchResult::baseline_trace)
      .def_readonly("evaluations", &C2SearchResult::evaluations);
  m.def("signature_matrix", &signature_matrix, py::arg("paths"), py::arg("x"),
        py::arg("waveform"), py::arg("array"));
  m.def("signature_jacobian", &signature_jacobian, py::arg("paths"),
        py::arg("x"), py::arg("waveform"), py::arg("array"));
  m.def("fim_channel", &fim_channel, py::arg("E"), py::arg("D"), py::arg("h"),
        py::arg("sigma2"));
  m.def("position_jacobian", &position_jacobian, py::arg("scene"),
        py::arg("array"), py::arg("zero_doppler_block") = false);
  m.def("crlb_position", &crlb_position, py::arg("scene"), py::arg("x"),
        py::arg("waveform"), py::arg("array"), py::arg("sigma2"),
        py::arg("zero_doppler_block") = false);
  m.def("optimize_c2", &optimize_c2, py::arg("scene"), py::arg("x"),
        py::arg("waveform"), py::arg("array"), py::arg("sigma2"),
        py::arg("budget"));

  // harness + config
  py::class_<TargetSpec>(m, "TargetSpec")
      .def(py::init<>())
      .def_readwrite("range_m", &TargetSpec::range_m)
      .def_readwrite("speed_mps", &TargetSpec::speed_mps)
      .def_readwrite("angle_deg", &TargetSpec::angle_deg);
  py::class_<SweepSpec>(m, "SweepSpec")
      .def(py::init<>())
      .def_readwrite("parameter", &SweepSpec::parameter)
      .def_readwrite("values", &SweepSpec::values);
  py::class_<ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init<>())
      .def_readwrite("waveform", &ExperimentConfig::waveform)
      .def_readwrite("array", &ExperimentConfig::array)
      .def_readwrite("q_bs", &ExperimentConfig::q_bs)
      .def_readwrite("beam_direction_deg", &ExperimentConfig::beam_direction_deg)
      .def_readwrite("targets", &ExperimentConfig::targets)
      .def_readwrite("beta_random_phase", &ExperimentConfig::beta_random_phase)
      .def_readwrite("beta_fixed", &ExperimentConfig::beta_fixed)
      .def_readwrite("music", &ExperimentConfig::music)
      .def_readwrite("ddsearch", &ExperimentConfig::ddsearch)
      .def_readwrite("snr_grid_db", &ExperimentConfig::snr_grid_db)
      .def_readwrite("trials", &ExperimentConfig::trials)
      .def_readwrite("master_seed", &ExperimentConfig::master_seed)
      .def_readwrite("sweep", &ExperimentConfig::sweep)
      .def_readwrite("output_dir", &ExperimentConfig::output_dir)
      .def_readwrite("threads", &ExperimentConfig::threads)
      .def("scene", &ExperimentConfig::scene)
      .def("validate", &ExperimentConfig::validate);
  py::class_<SweepRow>(m, "SweepRow")
      .def_readonly("snr_db", &SweepRow::snr_db)
      .def_readonly("c1", &SweepRow::c1)
      .def_readonly("c2", &SweepRow::c2)
      .def_readonly("rmse_position_m", &SweepRow::rmse_position_m)
      .def_readonly("rmse_per_target_m", &SweepRow::rmse_per_target_m)
      .def_readonly("rmse_theta_deg", &SweepRow::rmse_theta_deg)
      .def_readonly("rmse_tau_s", &SweepRow::rmse_tau_s)
      .def_readonly("rmse_nu_hz", &SweepRow::rmse_nu_hz)
      .def_readonly("crlb_rms_position_m", &SweepRow::crlb_rms_position_m)
      .def_readonly("trials_used", &SweepRow::trials_used)
      .def_readonly("failures", &SweepRow::failures);
  py::class_<SweepResult>(m, "SweepResult")
      .def_readonly("rows", &SweepResult::rows)
      .def_readonly("wall_seconds", &SweepResult::wall_seconds);

  py::class_<PointReference>(m, "PointReference")
      .def_readonly("x_ref", &PointReference::x_ref)
      .def_readonly("sigma2", &PointReference::sigma2)
      .def_readonly("crlb_rms_position_m", &PointReference::crlb_rms_position_m);
  py::class_<TrialRecord>(m, "TrialRecord")
      .def_readonly("failed", &TrialRecord::failed)
      .def_readonly("note", &TrialRecord::note)
      .def_readonly("position_error_m", &TrialRecord::position_error_m)
      .def_readonly("theta_error_rad", &TrialRecord::theta_error_rad)
      .def_readonly("tau_error_s", &TrialRecord::tau_error_s)
      .def_readonly("nu_error_hz", &TrialRecord::nu_error_hz)
      .def_readonly("estimates", &TrialRecord::estimates);

  m.def("config_from_json", &config_from_json_text, py::arg("text"));
  m.def("config_to_json", &config_to_json_text, py::arg("config"));
  m.def("load_config", &load_config, py::arg("path"));
  m.def("derive_trial_seed", &derive_trial_seed, py::arg("master_seed"),
        py::arg("c1"), py::arg("c2"), py::arg("snr_db"), py::arg("trial_index"));
  m.def("point_reference", &point_reference, py::arg("config"),
        py::arg("waveform"), py::arg("snr_db"));
  m.def("run_trial", &run_trial, py::arg("config"), py::arg("waveform"),
        py::arg("sigma2"), py::arg("trial_seed"),
        py::call_guard<py::gil_scoped_release>());
  m.def("run_sweep", &run_sweep, py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def("sweep_to_csv", &sweep_to_csv, py::arg("result"));
  m.def("write_sweep_outputs", &write_sweep_outputs, py::arg("config"),
        py::arg("result"), py::arg("dir"));
}
