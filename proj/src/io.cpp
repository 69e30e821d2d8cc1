#include "tdgl_ring/io.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "tdgl_ring/error.hpp"

namespace tdgl_ring::io {

using nlohmann::json;

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc{}) throw Error("format_double failed");
  return std::string(buf.data(), end);
}

namespace {

std::string opt_double(const std::optional<double>& x) { return x ? format_double(*x) : std::string{}; }

std::string opt_int(const std::optional<std::int64_t>& x) { return x ? std::to_string(*x) : std::string{}; }

json opt_json(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

}  // namespace

std::string trajectory_csv(const experiment::Trajectory& t) {
  std::string out = "time,mode_amp_n0,J,winding,rms_amp\n";
  for (const auto& s : t.snapshots) {
    out += format_double(s.time) + ',' + opt_double(s.mode_amplitude) + ',' + format_double(s.integrated_current) +
           ',' + opt_int(s.winding) + ',' + format_double(s.rms_amplitude) + '\n';
  }
  if (t.failure) out += "# truncated: " + *t.failure + '\n';
  return out;
}

std::string field_csv(const FieldState& state) {
  std::string out = "phi,re_psi,im_psi\n";
  const auto m = static_cast<double>(state.psi.size());
  for (std::size_t i = 0; i < state.psi.size(); ++i) {
    const double phi = 2.0 * std::numbers::pi * static_cast<double>(i) / m;
    out += format_double(phi) + ',' + format_double(state.psi[i].real()) + ',' + format_double(state.psi[i].imag()) +
           '\n';
  }
  return out;
}

std::string ensemble_series_csv(const experiment::EnsembleStats& stats) {
  std::string out = "time,mean_J,std_J\n";
  for (std::size_t i = 0; i < stats.times.size(); ++i) {
    out += format_double(stats.times[i]) + ',' + format_double(stats.mean_current[i]) + ',' +
           (stats.std_current.empty() ? std::string{} : format_double(stats.std_current[i])) + '\n';
  }
  return out;
}

std::string ensemble_runs_csv(const experiment::EnsembleStats& stats) {
  std::string out = "run,seed,reached,t99,final_winding,late_mean_J,failure\n";
  for (const auto& r : stats.runs) {
    std::string failure = r.failure.value_or("");
    for (auto& ch : failure) {
      if (ch == ',' || ch == '\n') ch = ';';
    }
    out += std::to_string(r.run) + ',' + std::to_string(r.seed) + ',' + (r.equilibration.reached ? "1" : "0") + ',' +
           opt_double(r.equilibration.t99) + ',' + opt_int(r.equilibration.final_winding) + ',' +
           format_double(r.late_mean_current) + ',' + failure + '\n';
  }
  return out;
}

std::string sweep_csv(const std::vector<experiment::SweepRow>& rows) {
  std::string out = "i,radius_norm,flux_norm,mean_t99,std_t99,n_reached,n_runs\n";
  for (const auto& r : rows) {
    out += std::to_string(r.index) + ',' + format_double(r.radius_norm) + ',' + format_double(r.flux_norm) + ',' +
           opt_double(r.stats.mean_t99) + ',' + opt_double(r.stats.std_t99) + ',' + std::to_string(r.stats.n_reached) +
           ',' + std::to_string(r.stats.n_runs) + '\n';
  }
  return out;
}

const char* to_string(NoiseScaling scaling) {
  return scaling == NoiseScaling::SqrtDt ? "sqrt_dt" : "per_step";
}

NoiseScaling noise_scaling_from_string(std::string_view s) {
  if (s == "per_step") return NoiseScaling::PerStep;
  if (s == "sqrt_dt") return NoiseScaling::SqrtDt;
  throw InvalidArgument("noise scaling must be per_step or sqrt_dt");
}

json to_json(const RingConfig& c) {
  return json{
      {"radius_norm", c.radius_norm},
      {"kappa", c.kappa},
      {"flux_norm", c.flux_norm},
      {"grid_points", c.grid_points},
      {"dt", c.dt},
      {"t_max", c.t_max},
      {"seed", c.seed},
      {"snapshot_every", c.snapshot_every},
      {"allow_coarse_grid", c.allow_coarse_grid},
      {"noise",
       {{"sigma", c.noise.sigma},
        {"sample_points", c.noise.sample_points},
        {"interpolation", "linear"},
        {"scaling", to_string(c.noise.scaling)}}},
  };
}

RingConfig config_from_json(const json& j, RingConfig c) {
  if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
  static const std::set<std::string> known = {"radius_norm", "kappa", "flux_norm", "grid_points", "dt",
                                              "t_max", "seed", "snapshot_every", "allow_coarse_grid", "noise"};
  try {
    for (const auto& [key, value] : j.items()) {
      if (!known.contains(key)) throw InvalidArgument("unknown config key '" + key + "'");
    }
    if (j.contains("radius_norm")) c.radius_norm = j["radius_norm"].get<double>();
    if (j.contains("kappa")) c.kappa = j["kappa"].get<double>();
    if (j.contains("flux_norm")) c.flux_norm = j["flux_norm"].get<double>();
    if (j.contains("grid_points")) c.grid_points = j["grid_points"].get<int>();
    if (j.contains("dt")) c.dt = j["dt"].get<double>();
    if (j.contains("t_max")) c.t_max = j["t_max"].get<double>();
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("snapshot_every")) c.snapshot_every = j["snapshot_every"].get<int>();
    if (j.contains("allow_coarse_grid")) c.allow_coarse_grid = j["allow_coarse_grid"].get<bool>();
    if (j.contains("noise")) {
      const json& n = j["noise"];
      if (!n.is_object()) throw InvalidArgument("noise must be an object");
      if (n.contains("sigma")) c.noise.sigma = n["sigma"].get<double>();
      if (n.contains("sample_points")) c.noise.sample_points = n["sample_points"].get<int>();
      if (n.contains("interpolation") && n["interpolation"].get<std::string>() != "linear") {
        throw InvalidArgument("only linear noise interpolation is supported");
      }
      if (n.contains("scaling")) c.noise.scaling = noise_scaling_from_string(n["scaling"].get<std::string>());
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  return c;
}

json to_json(const causal::FeasibilityReport& report) {
  json entries = json::array();
  for (const auto& e : report.entries) {
    entries.push_back({{"material", e.material},
                       {"t_eq_norm", e.t_eq_norm},
                       {"r_min_lambda", e.r_min_lambda},
                       {"d_min_m", e.d_min_m},
                       {"plausible", e.plausible},
                       {"assumptions", report.assumptions}});
  }
  return json{{"inconclusive", report.inconclusive}, {"entries", entries}, {"assumptions", report.assumptions}};
}

json summary_json(const experiment::EnsembleStats& s) {
  const double se = s.late_standard_error();
  return json{{"n_runs", s.n_runs},
              {"n_reached", s.n_reached},
              {"n_failed", s.n_failed},
              {"mean_t99", opt_json(s.mean_t99)},
              {"std_t99", opt_json(s.std_t99)},
              {"late_mean_J", opt_json(std::isfinite(s.late_mean_current()) ? std::optional(s.late_mean_current())
                                                                             : std::nullopt)},
              {"late_standard_error", opt_json(std::isfinite(se) ? std::optional(se) : std::nullopt)}};
}

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xF];
  }
  return out;
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error("failed writing " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFound("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace tdgl_ring::io
