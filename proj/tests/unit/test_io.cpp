#include <charconv>
#include <cmath>
#include <cstring>
#include <random>

#include "doctest.h"
#include "support.hpp"
#include "tdgl_ring/error.hpp"
#include "tdgl_ring/io.hpp"

using namespace tdgl_ring;
using namespace tdgl_ring::io;

TEST_SUITE("io") {
  TEST_CASE("doubles round trip through text") {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 2000; ++i) {
      double x;
      const std::uint64_t bits = rng();
      std::memcpy(&x, &bits, sizeof x);
      if (!std::isfinite(x)) continue;
      const std::string text = format_double(x);
      double back = 0.0;
      std::from_chars(text.data(), text.data() + text.size(), back);
      CHECK(back == x);
    }
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1e-300) == "1e-300");
    CHECK(format_double(NAN) == "nan");
    CHECK(format_double(-INFINITY) == "-inf");
  }

  TEST_CASE("trajectory csv") {
    experiment::Trajectory t;
    experiment::Snapshot a;
    a.time = 0.5;
    a.mode_amplitude = 0.25;
    a.integrated_current = -1.0;
    a.winding = 3;
    a.rms_amplitude = 0.5;
    experiment::Snapshot b;
    b.time = 1.0;
    t.snapshots = {a, b};
    CHECK(trajectory_csv(t) == "time,mode_amp_n0,J,winding,rms_amp\n0.5,0.25,-1,3,0.5\n1,,0,,0\n");
    t.failure = "step 3: boom";
    CHECK(trajectory_csv(t).ends_with("# truncated: step 3: boom\n"));
  }

  TEST_CASE("ensemble and sweep csv") {
    experiment::EnsembleStats s;
    s.times = {0.0, 1.0};
    s.mean_current = {0.0, 2.0};
    CHECK(ensemble_series_csv(s) == "time,mean_J,std_J\n0,0,\n1,2,\n");
    experiment::RunSummary r;
    r.run = 1;
    r.seed = 9;
    r.equilibration.reached = true;
    r.equilibration.t99 = 12.5;
    r.equilibration.final_winding = -2;
    r.failure = "a,b";
    s.runs = {r};
    CHECK(ensemble_runs_csv(s) == "run,seed,reached,t99,final_winding,late_mean_J,failure\n1,9,1,12.5,-2,0,a;b\n");
    experiment::SweepRow row;
    row.index = 2;
    row.radius_norm = 15.0;
    row.flux_norm = 10.2;
    row.stats.n_runs = 4;
    CHECK(sweep_csv({row}) == "i,radius_norm,flux_norm,mean_t99,std_t99,n_reached,n_runs\n2,15,10.2,,,0,4\n");
  }

  TEST_CASE("field csv") {
    FieldState s{{Complex{1.0, 0.0}, Complex{0.0, -1.0}}, 0.0, 0};
    CHECK(field_csv(s) == "phi,re_psi,im_psi\n0,1,0\n3.141592653589793,0,-1\n");
  }

  TEST_CASE("config json round trip") {
    RingConfig c;
    c.radius_norm = 1500.0;
    c.flux_norm = 1000.2;
    c.grid_points = 8192;
    c.seed = 0xFFFFFFFFFFFFFFFFULL;
    c.noise.scaling = NoiseScaling::SqrtDt;
    c.allow_coarse_grid = true;
    const auto back = config_from_json(nlohmann::json::parse(to_json(c).dump()));
    CHECK(to_json(back) == to_json(c));
    CHECK(back.seed == c.seed);
    CHECK(back.noise.scaling == NoiseScaling::SqrtDt);
  }

  TEST_CASE("config json overlays and rejects unknown keys") {
    RingConfig base;
    base.kappa = 2.0;
    const auto c = config_from_json(nlohmann::json{{"dt", 0.5}, {"noise", {{"sigma", 0.0}}}}, base);
    CHECK(c.dt == 0.5);
    CHECK(c.kappa == 2.0);
    CHECK(c.noise.sigma == 0.0);
    CHECK(c.noise.sample_points == 200);
    CHECK_THROWS_AS(config_from_json(nlohmann::json{{"radius", 1.0}}), InvalidArgument);
    CHECK_THROWS_AS(config_from_json(nlohmann::json{{"dt", "fast"}}), InvalidArgument);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::array()), InvalidArgument);
    CHECK_THROWS_AS(config_from_json(nlohmann::json{{"noise", {{"interpolation", "cubic"}}}}), InvalidArgument);
    CHECK_THROWS_AS(config_from_json(nlohmann::json{{"noise", {{"scaling", "loud"}}}}), InvalidArgument);
  }

  TEST_CASE("sha256") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  }

  TEST_CASE("files") {
    const auto dir = test_support::scratch_dir("io");
    write_file(dir / "a" / "b.txt", "hello\n");
    CHECK(read_file(dir / "a" / "b.txt") == "hello\n");
    CHECK_THROWS_AS(read_file(dir / "missing"), NotFound);
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("summary json") {
    experiment::EnsembleStats s;
    s.n_runs = 1;
    const auto j = summary_json(s);
    CHECK(j["mean_t99"].is_null());
    CHECK(j["late_mean_J"].is_null());
    CHECK(j["n_runs"] == 1);
  }
}
