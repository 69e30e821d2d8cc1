#include "tdgl_ring/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "tdgl_ring/analytic.hpp"
#include "tdgl_ring/causal.hpp"
#include "tdgl_ring/error.hpp"
#include "tdgl_ring/experiment.hpp"
#include "tdgl_ring/io.hpp"
#include "tdgl_ring/tdgl.hpp"
#include "tdgl_ring/units.hpp"

namespace tdgl_ring::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Raised for bad option values that CLI11 itself cannot see (exit code 2).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 42;
  std::string format = "csv";
  unsigned threads = 0;
  std::string materials_path;
  std::vector<CLI::Option*> seed_opts;
  std::vector<CLI::Option*> threads_opts;
};

struct RingFlags {
  double radius = 0, kappa = 0, flux = 0, dt = 0, t_max = 0, sigma = 0;
  int grid_points = 0, noise_points = 0, snapshot_every = 0;
  std::string noise_scaling;
  std::string measure;
  bool coarse = false;
  CLI::Option* measure_opt{};
  CLI::Option *radius_opt{}, *kappa_opt{}, *flux_opt{}, *dt_opt{}, *t_max_opt{}, *sigma_opt{}, *grid_opt{},
      *noise_points_opt{}, *snapshot_opt{}, *scaling_opt{}, *coarse_opt{};
};

bool given(const CLI::Option* opt) { return opt != nullptr && opt->count() > 0; }

bool any_given(const std::vector<CLI::Option*>& opts) {
  for (const auto* o : opts) {
    if (given(o)) return true;
  }
  return false;
}

void add_ring_flags(CLI::App* sub, RingFlags& f) {
  f.radius_opt = sub->add_option("--radius", f.radius, "Ring radius in penetration depths");
  f.kappa_opt = sub->add_option("--kappa", f.kappa, "Ginzburg-Landau parameter lambda/xi (default 0.8)");
  f.flux_opt = sub->add_option("--flux", f.flux, "Solenoid flux in flux quanta");
  f.grid_opt = sub->add_option("--grid-points", f.grid_points, "Grid size M (default from the flux)");
  f.dt_opt = sub->add_option("--dt", f.dt, "Time step in xi^2/D (default 1e-2)");
  f.t_max_opt = sub->add_option("--t-max", f.t_max, "Run length in xi^2/D");
  f.sigma_opt = sub->add_option("--sigma", f.sigma, "Noise standard deviation per component (default 1e-6)");
  f.noise_points_opt = sub->add_option("--noise-points", f.noise_points, "Noise anchor points (default 200)");
  f.scaling_opt = sub->add_option("--noise-scaling", f.noise_scaling, "per_step | sqrt_dt")
                      ->check(CLI::IsMember({"per_step", "sqrt_dt"}));
  f.snapshot_opt = sub->add_option("--snapshot-every", f.snapshot_every, "Snapshot stride in steps (default 10)");
  f.coarse_opt = sub->add_flag("--coarse-grid", f.coarse, "Allow grids that cannot resolve the winding");
  f.measure_opt = sub->add_option("--measure", f.measure, "Equilibration measure: rms (default) | mode")
                      ->check(CLI::IsMember({"rms", "mode"}));
}

json load_config_file(const std::string& path) {
  if (path.empty()) return json::object();
  json doc;
  try {
    doc = json::parse(io::read_file(path));
  } catch (const json::parse_error& e) {
    throw UsageError("config file " + path + ": " + e.what());
  }
  // A run manifest carries the resolved config under "config".
  if (doc.is_object() && doc.contains("tool") && doc.contains("config")) doc = doc["config"];
  if (!doc.is_object()) throw UsageError("config file must hold a JSON object");
  return doc;
}

/// Splits `doc` into the keys in `extra` (returned) and the ring-config rest (left in doc).
json take_keys(json& doc, std::initializer_list<const char*> extra) {
  json taken = json::object();
  for (const char* key : extra) {
    if (doc.contains(key)) {
      taken[key] = doc[key];
      doc.erase(key);
    }
  }
  return taken;
}

template <class T>
T layered(const json& file, const char* key, const CLI::Option* flag, const T& flag_value, const T& fallback);

/// Removes "measure" from the file document and resolves it against the flag.
experiment::AmplitudeMeasure take_measure(json& file, const RingFlags& f) {
  json extra = take_keys(file, {"measure"});
  const std::string name = layered(extra, "measure", f.measure_opt, f.measure, std::string("rms"));
  try {
    return experiment::amplitude_measure_from_string(name);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
}

template <class T>
T layered(const json& file, const char* key, const CLI::Option* flag, const T& flag_value, const T& fallback) {
  if (given(flag)) return flag_value;
  if (file.contains(key)) {
    try {
      return file[key].get<T>();
    } catch (const json::exception& e) {
      throw UsageError(std::string("config key ") + key + ": " + e.what());
    }
  }
  return fallback;
}

/// Built-in defaults, then the file, then explicit flags.
RingConfig resolve_ring(const json& file_ring, const RingFlags& f, const CommonOptions& common,
                        const RingConfig& defaults) {
  RingConfig c;
  try {
    c = io::config_from_json(file_ring, defaults);
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  if (given(f.radius_opt)) c.radius_norm = f.radius;
  if (given(f.kappa_opt)) c.kappa = f.kappa;
  if (given(f.flux_opt)) c.flux_norm = f.flux;
  if (given(f.dt_opt)) c.dt = f.dt;
  if (given(f.t_max_opt)) c.t_max = f.t_max;
  if (given(f.sigma_opt)) c.noise.sigma = f.sigma;
  if (given(f.noise_points_opt)) c.noise.sample_points = f.noise_points;
  if (given(f.scaling_opt)) c.noise.scaling = io::noise_scaling_from_string(f.noise_scaling);
  if (given(f.snapshot_opt)) c.snapshot_every = f.snapshot_every;
  if (given(f.coarse_opt)) c.allow_coarse_grid = f.coarse;
  if (any_given(common.seed_opts)) c.seed = common.seed;

  if (given(f.grid_opt)) {
    c.grid_points = f.grid_points;
  } else if (!file_ring.contains("grid_points")) {
    c.grid_points = default_grid_points(c.flux_norm);
  }
  validate(c);
  return c;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

class ManifestWriter {
 public:
  ManifestWriter(std::string subcommand, fs::path out_dir, json config, std::uint64_t seed)
      : subcommand_(std::move(subcommand)), out_dir_(std::move(out_dir)) {
    manifest_ = {{"tool", kToolName},         {"version", kToolVersion}, {"subcommand", subcommand_},
                 {"timestamp", utc_timestamp()}, {"master_seed", seed},      {"config", std::move(config)},
                 {"outputs", json::array()},     {"failures", json::array()}};
  }

  void add_output(const std::string& name, const std::string& content) {
    io::write_file(out_dir_ / name, content);
    manifest_["outputs"].push_back({{"file", name}, {"sha256", io::sha256_hex(content)}, {"bytes", content.size()}});
  }

  void add_failure(json failure) { manifest_["failures"].push_back(std::move(failure)); }
  void set_summary(json summary) { manifest_["summary"] = std::move(summary); }

  fs::path write() {
    const fs::path path = out_dir_ / (subcommand_ + "_manifest.json");
    io::write_file(path, manifest_.dump(2) + "\n");
    return path;
  }

 private:
  std::string subcommand_;
  fs::path out_dir_;
  json manifest_;
};

unsigned resolve_threads(const CommonOptions& common) {
  if (any_given(common.threads_opts)) return common.threads;
  if (const char* env = std::getenv("TDGL_RING_THREADS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != nullptr && *end == '\0') return static_cast<unsigned>(v);
    throw UsageError("TDGL_RING_THREADS must be a nonnegative integer");
  }
  return 0;
}

/// --materials, else the "materials_file" key of the config file.
std::string materials_path(const CommonOptions& common, const json& file) {
  if (!common.materials_path.empty()) return common.materials_path;
  return file.value("materials_file", std::string{});
}

std::vector<MaterialProps> extra_materials(const std::string& path) {
  if (path.empty()) return {};
  return load_materials_json(path);
}

// ---------------------------------------------------------------------------
// analytic

struct AnalyticFlags {
  double flux_ratio = 0.0;
  std::int64_t n = 0;
  double alpha = 0, beta = 0, gamma = 0, mass = 0, radius = 0, epsilon = 0, t_end = 0;
  int t_points = 0;
  CLI::Option *flux_opt{}, *n_opt{}, *alpha_opt{}, *beta_opt{}, *gamma_opt{}, *mass_opt{}, *radius_opt{},
      *epsilon_opt{}, *t_end_opt{}, *t_points_opt{};
};

int cmd_analytic(const AnalyticFlags& f, const CommonOptions& common, std::ostream& out) {
  json file = load_config_file(common.config_path);

  // Defaults: a Cooper pair on a 1 um ring in impure niobium (D = 1e-4 m^2/s).
  const double hbar = kCodata.hbar;
  const double mass_default = 2.0 * 9.1093837015e-31;
  const double gamma_default = 2.0 * mass_default * 1e-4 / (hbar * hbar);

  analytic::AnalyticParams p;
  const double ratio = layered(file, "flux_ratio", f.flux_opt, f.flux_ratio, 0.0);
  p.alpha = layered(file, "alpha", f.alpha_opt, f.alpha, -1e-27);
  p.beta = layered(file, "beta", f.beta_opt, f.beta, 1e-27);
  p.gamma = layered(file, "gamma", f.gamma_opt, f.gamma, gamma_default);
  p.mass_eff = layered(file, "mass_eff", f.mass_opt, f.mass, mass_default);
  p.radius = layered(file, "radius_m", f.radius_opt, f.radius, 1e-6);
  p.epsilon = layered(file, "epsilon", f.epsilon_opt, f.epsilon, 1e-4);
  p.flux = ratio * flux_quantum(p.constants);
  analytic::validate(p);

  const std::int64_t n0 = analytic::winding_selector(ratio);
  const std::int64_t n = layered<std::int64_t>(file, "n", f.n_opt, f.n, n0);
  const double lam = analytic::lambda_n(p, n);
  const double t_default = lam != 0.0 ? 10.0 / (2.0 * p.gamma * std::abs(lam)) : 1.0 / p.gamma;
  const double t_end = layered(file, "t_end_s", f.t_end_opt, f.t_end, t_default);
  const int t_points = layered(file, "t_points", f.t_points_opt, f.t_points, 11);
  if (!(t_end >= 0.0) || t_points < 1) throw UsageError("t_end_s must be >= 0 and t_points >= 1");

  json config = {{"flux_ratio", ratio}, {"n", n},         {"alpha", p.alpha},      {"beta", p.beta},
                 {"gamma", p.gamma},    {"mass_eff", p.mass_eff}, {"radius_m", p.radius}, {"epsilon", p.epsilon},
                 {"t_end_s", t_end},    {"t_points", t_points}};

  std::string table = "t_s,rho,rho_short_time,supercurrent\n";
  json samples = json::array();
  for (int i = 0; i < t_points; ++i) {
    const double t = t_points == 1 ? 0.0 : t_end * static_cast<double>(i) / (t_points - 1);
    const double rho = analytic::rho_closed_form(p, n, t);
    const double rho_short = analytic::rho_short_time(p, n, t);
    const double j = analytic::supercurrent(p, n, t);
    table += io::format_double(t) + ',' + io::format_double(rho) + ',' + io::format_double(rho_short) + ',' +
             io::format_double(j) + '\n';
    samples.push_back({{"t_s", t}, {"rho", rho}, {"rho_short_time", rho_short}, {"supercurrent", j}});
  }
  const auto regime = analytic::classify_mode(p, n);
  json summary = {{"n0", n0},
                  {"n", n},
                  {"lambda_n", lam},
                  {"regime", analytic::to_string(regime)},
                  {"rho_asymptotic", analytic::rho_asymptotic(p, n)}};

  ManifestWriter manifest("analytic", common.out_dir, config, 0);
  manifest.add_output("analytic.csv", table);
  manifest.set_summary(summary);
  manifest.write();

  if (common.format == "json") {
    out << json{{"summary", summary}, {"samples", samples}}.dump(2) << '\n';
  } else {
    out << "# n0=" << n0 << "\n# n=" << n << "\n# lambda_n=" << io::format_double(lam)
        << "\n# regime=" << analytic::to_string(regime) << '\n'
        << table;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate

int cmd_simulate(const RingFlags& f, bool dump_field, const CommonOptions& common, std::ostream& out,
                 std::ostream& err) {
  json file = load_config_file(common.config_path);
  const json extra = take_keys(file, {"dump_field"});
  const auto measure = take_measure(file, f);
  const RingConfig c = resolve_ring(file, f, common, RingConfig{});
  const bool dump = dump_field || extra.value("dump_field", false);

  experiment::RunOptions opts;
  opts.measure = measure;
  const auto traj = experiment::run_trajectory(c, derive_seed(c.seed, 0), opts);

  json config = io::to_json(c);
  config["measure"] = experiment::to_string(measure);
  config["dump_field"] = dump;
  ManifestWriter manifest("simulate", common.out_dir, config, c.seed);
  manifest.add_output("trajectory.csv", io::trajectory_csv(traj));
  if (dump) manifest.add_output("field.csv", io::field_csv(traj.final_state));
  json summary = {{"reached", traj.equilibration.reached},
                  {"t99", traj.equilibration.t99 ? json(*traj.equilibration.t99) : json(nullptr)},
                  {"final_winding",
                   traj.equilibration.final_winding ? json(*traj.equilibration.final_winding) : json(nullptr)},
                  {"target_mode", experiment::target_mode(c)}};
  manifest.set_summary(summary);
  if (traj.failure) manifest.add_failure({{"error", *traj.failure}});
  const fs::path manifest_path = manifest.write();

  if (common.format == "json") {
    out << summary.dump(2) << '\n';
  } else {
    out << "wrote " << (fs::path(common.out_dir) / "trajectory.csv").string() << " and " << manifest_path.string()
        << '\n';
  }
  if (traj.failure) {
    err << "error: " << *traj.failure << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// ensemble

int cmd_ensemble(const RingFlags& f, std::size_t runs_flag, const CLI::Option* runs_opt, bool coarse_run,
                 const CommonOptions& common, std::ostream& out, std::ostream& err) {
  json file = load_config_file(common.config_path);
  json extra = take_keys(file, {"runs", "coarse_run"});
  const auto measure = take_measure(file, f);
  const bool coarse = coarse_run || extra.value("coarse_run", false);
  RingConfig defaults;
  defaults.allow_coarse_grid = coarse;
  const RingConfig c = resolve_ring(file, f, common, defaults);
  const auto runs = layered<std::size_t>(extra, "runs", runs_opt, runs_flag, 50);
  if (runs < 1) throw UsageError("--runs must be at least 1");

  experiment::EnsembleOptions opts;
  opts.threads = resolve_threads(common);
  opts.measure = measure;
  const auto stats = coarse ? experiment::coarse_grid_run(c, runs, c.seed, opts)
                            : experiment::run_ensemble(c, runs, c.seed, opts);

  json config = io::to_json(c);
  config["runs"] = runs;
  config["coarse_run"] = coarse;
  config["measure"] = experiment::to_string(coarse ? experiment::AmplitudeMeasure::RmsAmplitude : measure);
  ManifestWriter manifest("ensemble", common.out_dir, config, c.seed);
  manifest.add_output("ensemble_J.csv", io::ensemble_series_csv(stats));
  manifest.add_output("ensemble_runs.csv", io::ensemble_runs_csv(stats));
  for (const auto& r : stats.runs) {
    if (r.failure) manifest.add_failure({{"run", r.run}, {"seed", r.seed}, {"error", *r.failure}});
  }
  json summary = io::summary_json(stats);
  manifest.set_summary(summary);
  manifest.write();

  if (common.format == "json") {
    out << summary.dump(2) << '\n';
  } else {
    out << "n_runs,n_reached,n_failed,mean_t99,std_t99\n"
        << stats.n_runs << ',' << stats.n_reached << ',' << stats.n_failed << ','
        << (stats.mean_t99 ? io::format_double(*stats.mean_t99) : "") << ','
        << (stats.std_t99 ? io::format_double(*stats.std_t99) : "") << '\n';
  }
  if (stats.n_failed == stats.n_runs) {
    err << "error: every run failed\n";
    return kExitFailure;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// sweep

int cmd_sweep(const RingFlags& f, const std::vector<int>& indices_flag, const CLI::Option* indices_opt,
              std::size_t runs_flag, const CLI::Option* runs_opt, const CommonOptions& common, std::ostream& out,
              std::ostream& err) {
  json file = load_config_file(common.config_path);
  json extra = take_keys(file, {"indices", "runs_per_point", "grid_points_override"});
  const auto measure = take_measure(file, f);
  if (given(f.radius_opt) || given(f.flux_opt) || file.contains("radius_norm") || file.contains("flux_norm")) {
    throw UsageError("sweep derives radius and flux from the indices; do not set them");
  }

  experiment::SweepSpec spec;
  spec.indices = layered(extra, "indices", indices_opt, indices_flag, std::vector<int>{0, 1, 2, 3});
  spec.runs_per_point = layered<std::size_t>(extra, "runs_per_point", runs_opt, runs_flag, 50);
  if (given(f.grid_opt)) {
    spec.grid_points = f.grid_points;
  } else if (extra.contains("grid_points_override")) {
    spec.grid_points = extra["grid_points_override"].get<int>();
  }
  // The base config is validated at the first index; radius/flux get replaced per point.
  json file_ring = file;
  file_ring["grid_points"] = spec.grid_points.value_or(default_grid_points(0.0));
  RingConfig base = resolve_ring(file_ring, f, common, RingConfig{});
  if (spec.grid_points) base.allow_coarse_grid = true;
  spec.base_config = base;
  spec.master_seed = base.seed;
  experiment::validate(spec);

  experiment::EnsembleOptions opts;
  opts.threads = resolve_threads(common);
  opts.measure = measure;
  const auto rows = experiment::sweep(spec, opts);

  json config = io::to_json(base);
  config.erase("radius_norm");
  config.erase("flux_norm");
  config.erase("grid_points");
  config["indices"] = spec.indices;
  config["runs_per_point"] = spec.runs_per_point;
  config["measure"] = experiment::to_string(measure);
  if (spec.grid_points) config["grid_points_override"] = *spec.grid_points;

  ManifestWriter manifest("sweep", common.out_dir, config, spec.master_seed);
  const std::string csv = io::sweep_csv(rows);
  manifest.add_output("sweep.csv", csv);
  std::size_t succeeded = 0;
  json points = json::array();
  for (const auto& r : rows) {
    if (r.failure) {
      manifest.add_failure({{"i", r.index}, {"error", *r.failure}});
    } else {
      ++succeeded;
    }
    points.push_back({{"i", r.index}, {"grid_points", r.grid_points}, {"stats", io::summary_json(r.stats)}});
  }
  const auto cv = experiment::t99_coefficient_of_variation(rows);
  manifest.set_summary({{"points", points}, {"t99_coefficient_of_variation", cv ? json(*cv) : json(nullptr)}});
  manifest.write();

  if (common.format == "json") {
    out << json{{"points", points}}.dump(2) << '\n';
  } else {
    out << csv;
  }
  if (!rows.empty() && succeeded == 0) {
    err << "error: every sweep point failed\n";
    return kExitFailure;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// causal

struct CausalFlags {
  std::vector<std::string> materials;
  double t_eq = 0.0;
  std::string sweep_csv;
  double gap = 0.0;
  double detector = 0.0;
  CLI::Option *materials_opt{}, *t_eq_opt{}, *sweep_opt{}, *gap_opt{}, *detector_opt{};
};

std::vector<double> t99_from_sweep_csv(const std::string& path) {
  std::istringstream in(io::read_file(path));
  std::string line;
  std::getline(in, line);
  if (line.rfind("i,radius_norm,flux_norm,mean_t99", 0) != 0) throw UsageError("not a sweep CSV: " + path);
  std::vector<double> out;
  while (std::getline(in, line)) {
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cols.push_back(cell);
    if (cols.size() >= 4 && !cols[3].empty()) out.push_back(std::stod(cols[3]));
  }
  return out;
}

int cmd_causal(const CausalFlags& f, const CommonOptions& common, std::ostream& out) {
  json file = load_config_file(common.config_path);
  const std::string mat_path = materials_path(common, file);
  const auto extra = extra_materials(mat_path);

  std::vector<std::string> names = layered(file, "materials", f.materials_opt, f.materials,
                                           std::vector<std::string>{"niobium-impure", "niobium-pure"});
  std::vector<MaterialProps> materials;
  for (const auto& name : names) materials.push_back(find_material(name, extra));

  std::vector<double> t99s;
  const std::string sweep_path = layered(file, "sweep_csv", f.sweep_opt, f.sweep_csv, std::string{});
  if (given(f.t_eq_opt) || file.contains("t_eq")) {
    t99s.push_back(layered(file, "t_eq", f.t_eq_opt, f.t_eq, 0.0));
  } else if (!sweep_path.empty()) {
    t99s = t99_from_sweep_csv(sweep_path);
  }

  json config = {{"materials", names}};
  if (!mat_path.empty()) config["materials_file"] = mat_path;
  if (!t99s.empty() && sweep_path.empty()) config["t_eq"] = t99s.front();
  if (!sweep_path.empty()) config["sweep_csv"] = sweep_path;

  const auto report = causal::feasibility_report(materials, t99s);
  json report_json = io::to_json(report);

  json timing = json::array();
  std::string csv = "material,light_time_per_lambda,t_eq_norm,r_min_lambda,d_min_m,plausible\n";
  for (const auto& m : materials) {
    const double tau = causal::light_time_per_lambda(m);
    json row = {{"material", m.name}, {"light_time_per_lambda", tau}};
    std::string t_eq, r_min, d_min, plausible;
    for (const auto& e : report.entries) {
      if (e.material != m.name) continue;
      t_eq = io::format_double(e.t_eq_norm);
      r_min = io::format_double(e.r_min_lambda);
      d_min = io::format_double(e.d_min_m);
      plausible = e.plausible ? "true" : "false";
    }
    csv += m.name + ',' + io::format_double(tau) + ',' + t_eq + ',' + r_min + ',' + d_min + ',' + plausible + '\n';

    const bool has_gap = given(f.gap_opt) || file.contains("gap_norm");
    if (has_gap && !report.entries.empty()) {
      causal::CausalScenario s;
      s.material = m;
      s.gap_norm = layered(file, "gap_norm", f.gap_opt, f.gap, 0.0);
      s.equilibration_time_norm = report.entries.front().t_eq_norm;
      const double x = layered(file, "detector_position", f.detector_opt, f.detector, 0.5 * s.gap_norm);
      const auto w = causal::detector_window(s, x);
      row["detector_window"] = {{"position_norm", x}, {"open", w.open}, {"close", w.close}};
      config["gap_norm"] = s.gap_norm;
      config["detector_position"] = x;
    }
    timing.push_back(row);
  }
  report_json["timing"] = timing;

  ManifestWriter manifest("causal", common.out_dir, config, 0);
  manifest.add_output("causal.json", report_json.dump(2) + "\n");
  manifest.add_output("causal.csv", csv);
  manifest.set_summary({{"inconclusive", report.inconclusive}});
  manifest.write();

  if (common.format == "json") {
    out << report_json.dump(2) << '\n';
  } else {
    out << csv;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// materials

int cmd_materials(const CommonOptions& common, std::ostream& out) {
  const json file = load_config_file(common.config_path);
  const std::string mat_path = materials_path(common, file);
  std::vector<MaterialProps> all = builtin_materials();
  for (auto& m : extra_materials(mat_path)) all.push_back(std::move(m));

  std::string csv = "name,xi_m,lambda_m,diffusion_m2s,kappa,time_unit_s,light_time_per_lambda\n";
  json list = json::array();
  for (const auto& m : all) {
    const double tau = causal::light_time_per_lambda(m);
    csv += m.name + ',' + io::format_double(m.xi) + ',' + io::format_double(m.lambda) + ',' +
           io::format_double(m.diffusion) + ',' + io::format_double(m.kappa()) + ',' +
           io::format_double(m.time_unit()) + ',' + io::format_double(tau) + '\n';
    list.push_back({{"name", m.name}, {"xi_m", m.xi}, {"lambda_m", m.lambda}, {"diffusion_m2s", m.diffusion}});
  }
  ManifestWriter manifest("materials", common.out_dir, json{{"materials_file", mat_path}}, 0);
  manifest.add_output("materials.csv", csv);
  manifest.write();

  if (common.format == "json") {
    out << list.dump(2) << '\n';
  } else {
    out << csv;
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stochastic TDGL simulation of a superconducting ring around a solenoid", kToolName};
  app.require_subcommand(1);

  CommonOptions common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "JSON config file or run manifest");
    sub->add_option("--out", common.out_dir, "Output directory");
    common.seed_opts.push_back(sub->add_option("--seed", common.seed, "Master seed"));
    sub->add_option("--format", common.format, "Stdout format")->check(CLI::IsMember({"csv", "json"}));
    common.threads_opts.push_back(sub->add_option("--threads", common.threads, "Worker threads (0 = all cores)"));
    sub->add_option("--materials", common.materials_path, "Extra materials JSON file");
  };

  auto* analytic_cmd = app.add_subcommand("analytic", "Closed-form single-mode solution");
  AnalyticFlags af;
  af.flux_opt = analytic_cmd->add_option("--flux-ratio", af.flux_ratio, "Phi / Phi_Q");
  af.n_opt = analytic_cmd->add_option("--n", af.n, "Winding n (default: n0)");
  af.alpha_opt = analytic_cmd->add_option("--alpha", af.alpha, "alpha in J (negative below Tc)");
  af.beta_opt = analytic_cmd->add_option("--beta", af.beta, "beta");
  af.gamma_opt = analytic_cmd->add_option("--gamma", af.gamma, "Gamma in 1/(J s)");
  af.mass_opt = analytic_cmd->add_option("--mass", af.mass, "Effective carrier mass in kg");
  af.radius_opt = analytic_cmd->add_option("--radius", af.radius, "Ring radius in m");
  af.epsilon_opt = analytic_cmd->add_option("--epsilon", af.epsilon, "Initial density rho(0)");
  af.t_end_opt = analytic_cmd->add_option("--t-end", af.t_end, "Last sample time in s");
  af.t_points_opt = analytic_cmd->add_option("--t-points", af.t_points, "Number of time samples");
  add_common(analytic_cmd);

  auto* simulate_cmd = app.add_subcommand("simulate", "One stochastic trajectory");
  RingFlags sim_flags;
  add_ring_flags(simulate_cmd, sim_flags);
  bool dump_field = false;
  simulate_cmd->add_flag("--dump-field", dump_field, "Also write the final field as field.csv");
  add_common(simulate_cmd);

  auto* ensemble_cmd = app.add_subcommand("ensemble", "Independent trajectories with statistics");
  RingFlags ens_flags;
  add_ring_flags(ensemble_cmd, ens_flags);
  std::size_t runs = 50;
  auto* runs_opt = ensemble_cmd->add_option("--runs", runs, "Number of runs (default 50)");
  bool coarse_run = false;
  ensemble_cmd->add_flag("--coarse-run", coarse_run, "Envelope-regime run on an unresolved grid");
  add_common(ensemble_cmd);

  auto* sweep_cmd = app.add_subcommand("sweep", "Equilibration time versus radius");
  RingFlags sweep_flags;
  add_ring_flags(sweep_cmd, sweep_flags);
  std::vector<int> indices;
  auto* indices_opt = sweep_cmd->add_option("--i", indices, "Sweep indices (R = 1.5 sqrt(10)^i)");
  std::size_t runs_per_point = 50;
  auto* rpp_opt = sweep_cmd->add_option("--runs-per-point", runs_per_point, "Runs per point (default 50)");
  add_common(sweep_cmd);

  auto* causal_cmd = app.add_subcommand("causal", "Causal timing and feasibility");
  CausalFlags cf;
  cf.materials_opt = causal_cmd->add_option("--material", cf.materials, "Material name (repeatable)");
  cf.t_eq_opt = causal_cmd->add_option("--t-eq", cf.t_eq, "Equilibration time in xi^2/D");
  cf.sweep_opt = causal_cmd->add_option("--sweep-csv", cf.sweep_csv, "Take t_eq from a sweep CSV");
  cf.gap_opt = causal_cmd->add_option("--gap", cf.gap, "Ring-solenoid gap in lambda");
  cf.detector_opt = causal_cmd->add_option("--detector", cf.detector, "Detector distance from the ring in lambda");
  add_common(causal_cmd);

  auto* materials_cmd = app.add_subcommand("materials", "List material presets");
  add_common(materials_cmd);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*analytic_cmd) return cmd_analytic(af, common, out);
    if (*simulate_cmd) return cmd_simulate(sim_flags, dump_field, common, out, err);
    if (*ensemble_cmd) return cmd_ensemble(ens_flags, runs, runs_opt, coarse_run, common, out, err);
    if (*sweep_cmd) return cmd_sweep(sweep_flags, indices, indices_opt, runs_per_point, rpp_opt, common, out, err);
    if (*causal_cmd) return cmd_causal(cf, common, out);
    if (*materials_cmd) return cmd_materials(common, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace tdgl_ring::cli
