#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "tdgl_ring/analytic.hpp"
#include "tdgl_ring/causal.hpp"
#include "tdgl_ring/cli.hpp"
#include "tdgl_ring/error.hpp"
#include "tdgl_ring/experiment.hpp"
#include "tdgl_ring/io.hpp"
#include "tdgl_ring/tdgl.hpp"
#include "tdgl_ring/units.hpp"

namespace py = pybind11;
using namespace tdgl_ring;
namespace ex = tdgl_ring::experiment;

namespace {

using ComplexArray = py::array_t<Complex>;

ComplexArray to_array(const std::vector<Complex>& v) {
  ComplexArray out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

std::vector<Complex> from_array(const ComplexArray& a) {
  auto c = py::array_t<Complex, py::array::c_style | py::array::forcecast>::ensure(a);
  if (!c || c.ndim() != 1) throw InvalidArgument("psi must be a 1-D complex array");
  return {c.data(), c.data() + c.size()};
}

py::dict snapshots_dict(const std::vector<ex::Snapshot>& snaps) {
  std::vector<double> t, mode, rms, j;
  std::vector<std::optional<std::int64_t>> winding;
  for (const auto& s : snaps) {
    t.push_back(s.time);
    mode.push_back(s.mode_amplitude.value_or(std::numeric_limits<double>::quiet_NaN()));
    rms.push_back(s.rms_amplitude);
    j.push_back(s.integrated_current);
    winding.push_back(s.winding);
  }
  py::dict d;
  d["time"] = py::array(py::cast(t));
  d["mode_amplitude"] = py::array(py::cast(mode));
  d["rms_amplitude"] = py::array(py::cast(rms));
  d["current"] = py::array(py::cast(j));
  d["winding"] = winding;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Stochastic TDGL simulation of a superconducting ring around a solenoid";
  m.attr("__version__") = cli::kToolVersion;

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  auto invalid = py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  py::register_exception<InvalidMaterial>(m, "InvalidMaterial", invalid.ptr());
  py::register_exception<InvalidGeometry>(m, "InvalidGeometry", invalid.ptr());
  py::register_exception<NotFound>(m, "NotFound", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<NumericalBlowup>(m, "NumericalBlowup", base.ptr());

  // units
  py::class_<PhysicalConstants>(m, "PhysicalConstants")
      .def(py::init<>())
      .def_readwrite("hbar", &PhysicalConstants::hbar)
      .def_readwrite("elementary_charge", &PhysicalConstants::elementary_charge)
      .def_readwrite("speed_of_light", &PhysicalConstants::speed_of_light);

  py::class_<MaterialProps>(m, "MaterialProps")
      .def(py::init([](std::string name, double xi, double lambda, double diffusion) {
             return MaterialProps{std::move(name), xi, lambda, diffusion};
           }),
           py::arg("name"), py::arg("xi"), py::arg("lambda_"), py::arg("diffusion"))
      .def_readwrite("name", &MaterialProps::name)
      .def_readwrite("xi", &MaterialProps::xi)
      .def_readwrite("lambda_", &MaterialProps::lambda)
      .def_readwrite("diffusion", &MaterialProps::diffusion)
      .def_property_readonly("kappa", &MaterialProps::kappa)
      .def_property_readonly("time_unit", &MaterialProps::time_unit)
      .def("__repr__", [](const MaterialProps& p) {
        std::ostringstream s;
        s << "MaterialProps('" << p.name << "', xi=" << p.xi << ", lambda_=" << p.lambda
          << ", diffusion=" << p.diffusion << ")";
        return s.str();
      });

  m.def("builtin_materials", &builtin_materials);
  m.def("find_material", [](const std::string& name) { return find_material(name); });
  m.def("load_materials_json", &load_materials_json);
  m.def("flux_quantum", &flux_quantum, py::arg("constants") = kCodata);
  m.def("time_to_normalized", &time_to_normalized);
  m.def("time_from_normalized", &time_from_normalized);
  m.def("length_to_normalized", &length_to_normalized);
  m.def("length_from_normalized", &length_from_normalized);
  m.def("flux_to_normalized", &flux_to_normalized, py::arg("flux_si"), py::arg("constants") = kCodata);
  m.def("flux_from_normalized", &flux_from_normalized, py::arg("flux_norm"), py::arg("constants") = kCodata);

  // analytic
  auto an = m.def_submodule("analytic", "Closed-form single-mode solution");
  py::class_<analytic::AnalyticParams>(an, "AnalyticParams")
      .def(py::init<>())
      .def_readwrite("gamma", &analytic::AnalyticParams::gamma)
      .def_readwrite("alpha", &analytic::AnalyticParams::alpha)
      .def_readwrite("beta", &analytic::AnalyticParams::beta)
      .def_readwrite("mass_eff", &analytic::AnalyticParams::mass_eff)
      .def_readwrite("radius", &analytic::AnalyticParams::radius)
      .def_readwrite("flux", &analytic::AnalyticParams::flux)
      .def_readwrite("epsilon", &analytic::AnalyticParams::epsilon)
      .def_readwrite("constants", &analytic::AnalyticParams::constants);
  an.def("validate", py::overload_cast<const analytic::AnalyticParams&>(&analytic::validate));
  an.def("kinetic_scale", &analytic::kinetic_scale);
  an.def("flux_ratio", &analytic::flux_ratio);
  an.def("lambda_n", &analytic::lambda_n);
  an.def("winding_selector", &analytic::winding_selector);
  an.def("rho_closed_form", &analytic::rho_closed_form, py::arg("params"), py::arg("n"), py::arg("t"));
  an.def("rho_short_time", &analytic::rho_short_time, py::arg("params"), py::arg("n"), py::arg("t"));
  an.def("rho_asymptotic", &analytic::rho_asymptotic);
  an.def("supercurrent", &analytic::supercurrent, py::arg("params"), py::arg("n"), py::arg("t"));
  an.def("classify_mode", [](const analytic::AnalyticParams& p, std::int64_t n) {
    return std::string(analytic::to_string(analytic::classify_mode(p, n)));
  });
  an.def("normalized_rho", &analytic::normalized_rho, py::arg("growth_rate"), py::arg("epsilon"), py::arg("t"));

  // field engine
  py::enum_<NoiseScaling>(m, "NoiseScaling").value("PER_STEP", NoiseScaling::PerStep).value("SQRT_DT", NoiseScaling::SqrtDt);

  py::class_<NoiseSpec>(m, "NoiseSpec")
      .def(py::init<>())
      .def_readwrite("sigma", &NoiseSpec::sigma)
      .def_readwrite("sample_points", &NoiseSpec::sample_points)
      .def_readwrite("scaling", &NoiseSpec::scaling);

  py::class_<RingConfig>(m, "RingConfig")
      .def(py::init<>())
      .def_readwrite("radius_norm", &RingConfig::radius_norm)
      .def_readwrite("kappa", &RingConfig::kappa)
      .def_readwrite("flux_norm", &RingConfig::flux_norm)
      .def_readwrite("grid_points", &RingConfig::grid_points)
      .def_readwrite("dt", &RingConfig::dt)
      .def_readwrite("t_max", &RingConfig::t_max)
      .def_readwrite("noise", &RingConfig::noise)
      .def_readwrite("seed", &RingConfig::seed)
      .def_readwrite("snapshot_every", &RingConfig::snapshot_every)
      .def_readwrite("allow_coarse_grid", &RingConfig::allow_coarse_grid)
      .def_property_readonly("vector_potential", &RingConfig::vector_potential)
      .def("validate", [](const RingConfig& c) { validate(c); })
      .def("to_json", [](const RingConfig& c) { return io::to_json(c).dump(); })
      .def_static("from_json", [](const std::string& text) { return io::config_from_json(nlohmann::json::parse(text)); });

  m.def("make_config", &make_config, py::arg("radius_norm"), py::arg("flux_norm"), py::arg("kappa") = 0.8);
  m.def("default_grid_points", &default_grid_points);
  m.def("minimum_resolved_grid", &minimum_resolved_grid);
  m.def("linear_symbol", &linear_symbol);
  m.def("max_resolved_symbol", &max_resolved_symbol);

  py::class_<FieldState>(m, "FieldState")
      .def(py::init([](const ComplexArray& psi, double time, std::uint64_t step) {
             return FieldState{from_array(psi), time, step};
           }),
           py::arg("psi"), py::arg("time") = 0.0, py::arg("step") = 0)
      .def_property(
          "psi", [](const FieldState& s) { return to_array(s.psi); },
          [](FieldState& s, const ComplexArray& a) { s.psi = from_array(a); })
      .def_readwrite("time", &FieldState::time)
      .def_readwrite("step", &FieldState::step);

  m.def("init_metastable", &init_metastable);
  m.def("plane_wave", &plane_wave, py::arg("config"), py::arg("k"), py::arg("amplitude"));
  m.def("winding_number", &winding_number, py::arg("state"), py::arg("amplitude_floor") = 0.0);
  m.def("mode_amplitude", &mode_amplitude);
  m.def("rms_amplitude", &rms_amplitude);
  m.def("current_profile", [](const FieldState& s, const RingConfig& c) {
    const auto p = current_profile(s, c);
    return py::make_tuple(py::array(py::cast(p.j)), p.integrated);
  });

  py::class_<NoiseSource>(m, "NoiseSource")
      .def(py::init<const RingConfig&, std::uint64_t>())
      .def("sample", [](NoiseSource& n) { return to_array(n.sample()); });

  py::class_<RingSimulator>(m, "RingSimulator")
      .def(py::init<const RingConfig&>())
      .def_property_readonly("config", &RingSimulator::config)
      .def(
          "advance",
          [](RingSimulator& sim, FieldState& s, NoiseSource* noise, int steps) {
            py::gil_scoped_release release;
            for (int i = 0; i < steps; ++i) sim.advance(s, noise);
          },
          py::arg("state"), py::arg("noise") = nullptr, py::arg("steps") = 1);

  // experiment
  auto exm = m.def_submodule("experiment", "Trajectories, ensembles and sweeps");
  py::enum_<ex::AmplitudeMeasure>(exm, "AmplitudeMeasure")
      .value("RMS", ex::AmplitudeMeasure::RmsAmplitude)
      .value("MODE", ex::AmplitudeMeasure::ModeAmplitude);

  py::class_<ex::EquilibrationResult>(exm, "EquilibrationResult")
      .def_readonly("t99", &ex::EquilibrationResult::t99)
      .def_readonly("reached", &ex::EquilibrationResult::reached)
      .def_readonly("final_winding", &ex::EquilibrationResult::final_winding);

  py::class_<ex::Trajectory>(exm, "Trajectory")
      .def_property_readonly("snapshots", [](const ex::Trajectory& t) { return snapshots_dict(t.snapshots); })
      .def_readonly("equilibration", &ex::Trajectory::equilibration)
      .def_readonly("final_state", &ex::Trajectory::final_state)
      .def_readonly("failure", &ex::Trajectory::failure);

  exm.def(
      "run_trajectory",
      [](const RingConfig& c, std::uint64_t seed, ex::AmplitudeMeasure measure, bool noise) {
        ex::RunOptions opts;
        opts.measure = measure;
        opts.noise_enabled = noise;
        py::gil_scoped_release release;
        return ex::run_trajectory(c, seed, opts);
      },
      py::arg("config"), py::arg("stream_seed"), py::arg("measure") = ex::AmplitudeMeasure::RmsAmplitude,
      py::arg("noise_enabled") = true);
  exm.def("equilibration_time", &ex::equilibration_time, py::arg("config"),
          py::arg("measure") = ex::AmplitudeMeasure::RmsAmplitude, py::call_guard<py::gil_scoped_release>());

  py::class_<ex::RunSummary>(exm, "RunSummary")
      .def_readonly("run", &ex::RunSummary::run)
      .def_readonly("seed", &ex::RunSummary::seed)
      .def_readonly("equilibration", &ex::RunSummary::equilibration)
      .def_readonly("late_mean_current", &ex::RunSummary::late_mean_current)
      .def_readonly("failure", &ex::RunSummary::failure);

  py::class_<ex::EnsembleStats>(exm, "EnsembleStats")
      .def_readonly("n_runs", &ex::EnsembleStats::n_runs)
      .def_readonly("n_reached", &ex::EnsembleStats::n_reached)
      .def_readonly("n_failed", &ex::EnsembleStats::n_failed)
      .def_readonly("mean_t99", &ex::EnsembleStats::mean_t99)
      .def_readonly("std_t99", &ex::EnsembleStats::std_t99)
      .def_property_readonly("times", [](const ex::EnsembleStats& s) { return py::array(py::cast(s.times)); })
      .def_property_readonly("mean_current",
                             [](const ex::EnsembleStats& s) { return py::array(py::cast(s.mean_current)); })
      .def_property_readonly("std_current",
                             [](const ex::EnsembleStats& s) { return py::array(py::cast(s.std_current)); })
      .def_property_readonly("mean_amplitude",
                             [](const ex::EnsembleStats& s) { return py::array(py::cast(s.mean_amplitude)); })
      .def_readonly("runs", &ex::EnsembleStats::runs)
      .def("late_mean_current", &ex::EnsembleStats::late_mean_current)
      .def("late_standard_error", &ex::EnsembleStats::late_standard_error)
      .def("winding_fraction", &ex::EnsembleStats::winding_fraction);

  auto ensemble_opts = [](unsigned threads, ex::AmplitudeMeasure measure) {
    ex::EnsembleOptions o;
    o.threads = threads;
    o.measure = measure;
    return o;
  };
  exm.def(
      "run_ensemble",
      [=](const RingConfig& c, std::size_t n, std::uint64_t seed, unsigned threads, ex::AmplitudeMeasure measure) {
        py::gil_scoped_release release;
        return ex::run_ensemble(c, n, seed, ensemble_opts(threads, measure));
      },
      py::arg("config"), py::arg("n_runs"), py::arg("master_seed"), py::arg("threads") = 0,
      py::arg("measure") = ex::AmplitudeMeasure::RmsAmplitude);
  exm.def(
      "control_run",
      [=](const RingConfig& c, std::size_t n, std::uint64_t seed, unsigned threads) {
        py::gil_scoped_release release;
        return ex::control_run(c, n, seed, ensemble_opts(threads, ex::AmplitudeMeasure::RmsAmplitude));
      },
      py::arg("config"), py::arg("n_runs"), py::arg("master_seed"), py::arg("threads") = 0);
  exm.def(
      "coarse_grid_run",
      [=](const RingConfig& c, std::size_t n, std::uint64_t seed, unsigned threads) {
        py::gil_scoped_release release;
        return ex::coarse_grid_run(c, n, seed, ensemble_opts(threads, ex::AmplitudeMeasure::RmsAmplitude));
      },
      py::arg("config"), py::arg("n_runs"), py::arg("master_seed"), py::arg("threads") = 0);

  exm.def("sweep_radius", &ex::sweep_radius);
  exm.def("sweep_flux", &ex::sweep_flux);

  py::class_<ex::SweepRow>(exm, "SweepRow")
      .def_readonly("index", &ex::SweepRow::index)
      .def_readonly("radius_norm", &ex::SweepRow::radius_norm)
      .def_readonly("flux_norm", &ex::SweepRow::flux_norm)
      .def_readonly("grid_points", &ex::SweepRow::grid_points)
      .def_readonly("stats", &ex::SweepRow::stats)
      .def_readonly("failure", &ex::SweepRow::failure);

  exm.def(
      "sweep",
      [=](std::vector<int> indices, std::size_t runs_per_point, const RingConfig& base, std::uint64_t seed,
          std::optional<int> grid_points, unsigned threads) {
        ex::SweepSpec spec;
        spec.indices = std::move(indices);
        spec.runs_per_point = runs_per_point;
        spec.base_config = base;
        spec.master_seed = seed;
        spec.grid_points = grid_points;
        py::gil_scoped_release release;
        return ex::sweep(spec, ensemble_opts(threads, ex::AmplitudeMeasure::RmsAmplitude));
      },
      py::arg("indices"), py::arg("runs_per_point") = 50, py::arg("base_config") = RingConfig{},
      py::arg("master_seed") = 42, py::arg("grid_points") = std::nullopt, py::arg("threads") = 0);
  exm.def("t99_coefficient_of_variation", &ex::t99_coefficient_of_variation);

  py::class_<ex::OrganizedCurrent>(exm, "OrganizedCurrent")
      .def_readonly("organized", &ex::OrganizedCurrent::organized)
      .def_readonly("sign", &ex::OrganizedCurrent::sign)
      .def_readonly("late_mean", &ex::OrganizedCurrent::late_mean)
      .def_readonly("threshold", &ex::OrganizedCurrent::threshold);
  exm.def("organized_current", &ex::organized_current);

  // causal
  auto ca = m.def_submodule("causal", "Causal timing and feasibility");
  ca.def("light_time_per_lambda", &causal::light_time_per_lambda, py::arg("material"),
         py::arg("constants") = kCodata);
  ca.def("min_radius_for_window", &causal::min_radius_for_window, py::arg("t_eq_norm"), py::arg("material"),
         py::arg("constants") = kCodata);
  ca.def(
      "detector_window",
      [](const MaterialProps& mat, double gap, double x, double transition_time) {
        causal::CausalScenario s;
        s.material = mat;
        s.gap_norm = gap;
        s.transition_time_norm = transition_time;
        const auto w = causal::detector_window(s, x);
        return py::make_tuple(w.open, w.close);
      },
      py::arg("material"), py::arg("gap_norm"), py::arg("detector_position_norm"),
      py::arg("transition_time_norm") = 0.0);
  ca.def("feasibility_report", [](const std::vector<MaterialProps>& ms, const std::vector<double>& t99s) {
    const auto text = io::to_json(causal::feasibility_report(ms, t99s)).dump();
    return py::module_::import("json").attr("loads")(text);
  });

  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), cli::kToolName);
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = cli::run(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command-line tool in process; returns (exit_code, stdout, stderr).");
}
