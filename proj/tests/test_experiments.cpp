#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lowrank/errors.hpp"
#include "lowrank/experiments.hpp"
#include "lowrank/rng.hpp"

using lowrank::Index;
using lowrank::Matrix;
using lowrank::RunConfig;
using lowrank::TrajectoryRecord;

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "lowrank-tests" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

TrajectoryRecord dense_trajectory(double dt, Index steps, Index stride,
                                  const Matrix& base, const Matrix& drift) {
  TrajectoryRecord rec;
  rec.method = lowrank::Method::Euler;
  rec.dt = dt;
  rec.t_final = dt * double(steps);
  for (Index k = 0; k <= steps; ++k) {
    if (k % stride != 0 && k != steps) continue;
    rec.times.push_back(double(k) * dt);
    rec.step_indices.push_back(k);
    rec.dense_states.push_back(base + double(k) * dt * drift);
    rec.sigma_min_g.push_back(0.0);
    rec.sigma_max_g.push_back(0.0);
  }
  return rec;
}

}  // namespace

TEST_CASE("error_series: self-comparison is zero, offsets are constant") {
  const Matrix base = lowrank::random_uniform_matrix(5, 4, 1);
  const Matrix drift = lowrank::random_uniform_matrix(5, 4, 2);
  const auto traj = dense_trajectory(0.1, 10, 1, base, drift);

  const auto self = lowrank::error_series(traj, traj);
  for (const double e : self.errors) CHECK(e == 0.0);
  CHECK(self.max_error == 0.0);

  const Matrix offset = lowrank::random_uniform_matrix(5, 4, 3);
  auto shifted = traj;
  for (auto& x : shifted.dense_states) x += offset;
  const auto slice = lowrank::error_series(shifted, traj);
  for (const double e : slice.errors)
    CHECK(e == doctest::Approx(offset.norm()).epsilon(1e-12));
}

TEST_CASE("error_series: comparisons happen only at coincident instants") {
  const Matrix base = lowrank::random_uniform_matrix(4, 3, 5);
  const Matrix drift = lowrank::random_uniform_matrix(4, 3, 6);
  // Coarse run at dt, fine reference at dt/10 storing every step.
  const auto coarse = dense_trajectory(0.1, 10, 1, base, drift);
  const auto fine = dense_trajectory(0.01, 100, 1, base, drift);

  const auto slice = lowrank::error_series(coarse, fine);
  REQUIRE(slice.times.size() == coarse.times.size());
  for (const double e : slice.errors) CHECK(e <= 1e-12);

  // A reference that stops short of the final instant cannot be compared.
  auto truncated = dense_trajectory(0.01, 90, 1, base, drift);
  CHECK_THROWS_AS(lowrank::error_series(coarse, truncated),
                  lowrank::GridMismatchError);
}

TEST_CASE("error_series: exact-function reference") {
  const Matrix base = lowrank::random_uniform_matrix(4, 3, 7);
  const Matrix drift = lowrank::random_uniform_matrix(4, 3, 8);
  const auto traj = dense_trajectory(0.05, 20, 4, base, drift);
  const auto slice = lowrank::error_series(
      traj, [&](double t) -> Matrix { return base + t * drift; });
  CHECK(slice.max_error <= 1e-12);
  CHECK(slice.final_error <= 1e-12);
}

TEST_CASE("config: file parsing, overrides and validation") {
  const auto dir = scratch_dir("config");
  const auto cfg_path = dir / "sweep.cfg";
  {
    std::ofstream out(cfg_path);
    out << "# comment line\n"
        << "experiment = matrix-approx\n"
        << "method = both\n"
        << "flux = derivative\n"
        << "rank = 4, 6\n"
        << "dt = 1e-2,1e-3   # inline comment\n"
        << "t-final = 1\n"
        << "seed = 9\n";
  }
  RunConfig cfg = lowrank::load_config_file(cfg_path.string());
  CHECK(cfg.experiment == "matrix-approx");
  CHECK(cfg.flux_variant == "derivative");
  REQUIRE(cfg.ranks.size() == 2);
  CHECK(cfg.ranks[1] == 6);
  REQUIRE(cfg.dts.size() == 2);
  CHECK(cfg.dts[1] == 1e-3);
  CHECK(cfg.seed == 9);

  lowrank::set_config_key(cfg, "rank", "8");
  CHECK(cfg.ranks == std::vector<Index>{8});
  CHECK_THROWS_AS(lowrank::set_config_key(cfg, "no-such-key", "1"),
                  lowrank::ConfigError);
  CHECK_THROWS_AS(lowrank::set_config_key(cfg, "dt", "abc"),
                  lowrank::ConfigError);

  RunConfig bad = cfg;
  bad.experiment = "nope";
  CHECK_THROWS_AS(lowrank::finalize_config(bad), lowrank::ConfigError);
  bad = cfg;
  bad.dts = {3e-4};  // does not divide t_final
  CHECK_THROWS_AS(lowrank::finalize_config(bad), lowrank::ConfigError);
  bad = cfg;
  bad.ranks = {1000};
  CHECK_THROWS_AS(lowrank::finalize_config(bad), lowrank::ConfigError);
  bad = cfg;
  bad.method = "simplectic";
  CHECK_THROWS_AS(lowrank::finalize_config(bad), lowrank::ConfigError);
}

TEST_CASE("run: byte-identical CSVs for identical configurations") {
  const auto dir = scratch_dir("determinism");
  RunConfig cfg;
  cfg.experiment = "matrix-approx";
  cfg.method = "both";
  cfg.flux_variant = "derivative";
  cfg.ranks = {4};
  cfg.dts = {5e-2};
  cfg.n = 14;
  cfg.m = 14;
  cfg.seed = 5;

  cfg.out_dir = (dir / "a").string();
  lowrank::run(cfg);
  cfg.out_dir = (dir / "b").string();
  lowrank::run(cfg);

  CHECK(slurp(dir / "a" / "series.csv") == slurp(dir / "b" / "series.csv"));
  // summary.csv matches except for the measured wall_seconds column.
  std::istringstream sa(slurp(dir / "a" / "summary.csv"));
  std::istringstream sb(slurp(dir / "b" / "summary.csv"));
  std::string la, lb;
  while (std::getline(sa, la) && std::getline(sb, lb)) {
    CHECK(la.substr(0, la.rfind(',')) == lb.substr(0, lb.rfind(',')));
  }
}

TEST_CASE("run: CSV numbers round-trip at full precision") {
  const auto dir = scratch_dir("roundtrip");
  RunConfig cfg;
  cfg.experiment = "matrix-approx";
  cfg.method = "ksl";
  cfg.flux_variant = "derivative";
  cfg.ranks = {3};
  cfg.dts = {0.1};
  cfg.n = 12;
  cfg.m = 12;
  cfg.out_dir = (dir / "out").string();
  const auto report = lowrank::run(cfg);
  REQUIRE(report.cells.size() == 1);

  // Parse the final_error column back and compare for exact equality.
  std::istringstream in(slurp(dir / "out" / "summary.csv"));
  std::string line;
  std::getline(in, line);  // header
  REQUIRE(std::getline(in, line));
  std::vector<std::string> fields;
  std::stringstream ls(line);
  std::string field;
  while (std::getline(ls, field, ',')) fields.push_back(field);
  REQUIRE(fields.size() == 8);
  CHECK(std::strtod(fields[5].c_str(), nullptr) ==
        report.cells[0].final_error);
  CHECK(std::strtod(fields[4].c_str(), nullptr) == report.cells[0].max_error);

  // Every numeric field of series.csv recovers the in-memory value exactly.
  const auto& tr = report.cells[0].trajectory;
  std::istringstream series(slurp(dir / "out" / "series.csv"));
  std::getline(series, line);  // header
  Index row = 0;
  while (std::getline(series, line)) {
    std::vector<std::string> cols;
    std::stringstream cs(line);
    while (std::getline(cs, field, ',')) cols.push_back(field);
    REQUIRE(cols.size() == 9);
    CHECK(std::strtoll(cols[4].c_str(), nullptr, 10) == tr.step_indices[row]);
    CHECK(std::strtod(cols[5].c_str(), nullptr) == tr.times[row]);
    CHECK(std::strtod(cols[6].c_str(), nullptr) == tr.errors[row]);
    CHECK(std::strtod(cols[7].c_str(), nullptr) == tr.sigma_min_g[row]);
    CHECK(std::strtod(cols[8].c_str(), nullptr) == tr.sigma_max_g[row]);
    ++row;
  }
  CHECK(row == tr.stored());
}

TEST_CASE("run: sweep cells are independent of their siblings") {
  const auto dir = scratch_dir("independence");
  RunConfig sweep;
  sweep.experiment = "matrix-approx";
  sweep.method = "chart";
  sweep.flux_variant = "derivative";
  sweep.ranks = {3, 5};
  sweep.dts = {0.1, 0.05};
  sweep.n = 12;
  sweep.m = 12;
  sweep.jobs = 2;
  sweep.out_dir = (dir / "sweep").string();
  const auto full = lowrank::run(sweep);

  RunConfig solo = sweep;
  solo.ranks = {5};
  solo.dts = {0.05};
  solo.jobs = 1;
  solo.out_dir = (dir / "solo").string();
  const auto single = lowrank::run(solo);

  const auto& lone = single.cells.at(0);
  bool found = false;
  for (const auto& cell : full.cells) {
    if (cell.rank == 5 && cell.dt == 0.05) {
      found = true;
      CHECK(cell.final_error == lone.final_error);
      CHECK(cell.max_error == lone.max_error);
      REQUIRE(cell.trajectory.errors.size() == lone.trajectory.errors.size());
      for (std::size_t i = 0; i < lone.trajectory.errors.size(); ++i)
        CHECK(cell.trajectory.errors[i] == lone.trajectory.errors[i]);
    }
  }
  CHECK(found);
}

TEST_CASE("run: an unstable cell is recorded without killing its siblings") {
  const auto dir = scratch_dir("abort");
  RunConfig cfg;
  cfg.experiment = "burgers-single";
  cfg.method = "euler";
  cfg.ranks = {1};
  cfg.dts = {1e-3, 5e-3};  // the second step size violates the CFL bound
  cfg.n = 50;
  cfg.m = 4;
  cfg.seed = 2;
  cfg.reference_dt = 1e-3;
  cfg.jobs = 2;
  cfg.out_dir = (dir / "out").string();
  cfg.cache_dir = (dir / "cache").string();
  const auto report = lowrank::run(cfg);

  REQUIRE(report.cells.size() == 2);
  CHECK(report.any_aborted());
  bool stable_seen = false, aborted_seen = false;
  for (const auto& cell : report.cells) {
    if (cell.dt == 1e-3) {
      stable_seen = true;
      CHECK_FALSE(cell.aborted);
      CHECK(cell.max_error < 1.0);
    } else {
      aborted_seen = true;
      CHECK(cell.aborted);
      CHECK(cell.steps > 0);     // the step at which the state blew up
      CHECK(cell.steps < 1000);  // well before the horizon
    }
  }
  CHECK(stable_seen);
  CHECK(aborted_seen);

  // The aborted cell still shows up in the summary, with nan error fields.
  const std::string summary = slurp(dir / "out" / "summary.csv");
  CHECK(summary.find("nan") != std::string::npos);
}

TEST_CASE("run: burgers-multi compares against a same-step reference") {
  const auto dir = scratch_dir("multi");
  RunConfig cfg;
  cfg.experiment = "burgers-multi";
  cfg.method = "both";
  cfg.ranks = {3};
  cfg.dts = {1e-3, 2e-3};  // one Euler reference per step size
  cfg.t_final = 0.1;
  cfg.n = 40;
  cfg.m = 8;
  cfg.seed = 7;
  cfg.out_dir = (dir / "out").string();
  cfg.cache_dir = (dir / "cache").string();
  const auto report = lowrank::run(cfg);

  REQUIRE(report.cells.size() == 4);
  for (const auto& cell : report.cells) {
    CHECK_FALSE(cell.aborted);
    CHECK(cell.max_error >= 0.0);
    CHECK(cell.max_error < 1.0);
    // The sampled initial profiles underflow to zero, so the run starts from
    // the canonical zero-state factorization and still integrates cleanly.
    CHECK(cell.trajectory.errors.front() == 0.0);
  }
}

TEST_CASE("run: euler method ignores the rank list") {
  const auto dir = scratch_dir("euler-ranks");
  RunConfig cfg;
  cfg.experiment = "matrix-approx";
  cfg.method = "euler";
  cfg.flux_variant = "derivative";
  cfg.ranks = {1000};  // out of range, but euler never uses it
  cfg.dts = {0.1};
  cfg.n = 12;
  cfg.m = 12;
  cfg.out_dir = (dir / "out").string();
  const auto report = lowrank::run(cfg);
  REQUIRE(report.cells.size() == 1);
  CHECK(report.cells[0].rank == 0);
  CHECK(report.cells[0].max_error < 1e-1);
}

TEST_CASE("burgers_reference: cache round-trips bit for bit") {
  const auto dir = scratch_dir("cache");
  RunConfig cfg;
  cfg.experiment = "burgers-single";
  cfg.n = 40;
  cfg.m = 5;
  cfg.seed = 11;
  cfg.t_final = 0.1;
  cfg.ranks = {3};
  cfg.dts = {1e-3};
  cfg.cache_dir = (dir / "cache").string();
  lowrank::finalize_config(cfg);

  lowrank::BurgersConfig bc;
  bc.n = cfg.n;
  bc.m = cfg.m;
  bc.seed = cfg.seed;
  bc.t_final = cfg.t_final;
  const auto problem = lowrank::burgers_problem(bc);

  const auto fresh = lowrank::burgers_reference(cfg, problem, 1e-4);
  CHECK(std::filesystem::exists(dir / "cache"));
  const auto cached = lowrank::burgers_reference(cfg, problem, 1e-4);

  REQUIRE(fresh.stored() == cached.stored());
  for (Index i = 0; i < fresh.stored(); ++i) {
    CHECK(fresh.times[i] == cached.times[i]);
    CHECK(fresh.dense_states[i] == cached.dense_states[i]);
  }
}

TEST_CASE("burgers_reference: corrupted cache files are recomputed, not trusted") {
  const auto dir = scratch_dir("cache-corrupt");
  RunConfig cfg;
  cfg.experiment = "burgers-single";
  cfg.n = 30;
  cfg.m = 4;
  cfg.seed = 13;
  cfg.t_final = 0.05;
  cfg.ranks = {3};
  cfg.dts = {1e-3};
  cfg.cache_dir = (dir / "cache").string();
  lowrank::finalize_config(cfg);

  lowrank::BurgersConfig bc;
  bc.n = cfg.n;
  bc.m = cfg.m;
  bc.seed = cfg.seed;
  bc.t_final = cfg.t_final;
  const auto problem = lowrank::burgers_problem(bc);
  const auto fresh = lowrank::burgers_reference(cfg, problem, 1e-4);

  // Truncate the cache file mid-payload; loading must fall back to a
  // recomputation that matches the original run.
  std::filesystem::path cache_file;
  for (const auto& entry : std::filesystem::directory_iterator(dir / "cache"))
    cache_file = entry.path();
  REQUIRE(!cache_file.empty());
  std::filesystem::resize_file(cache_file,
                               std::filesystem::file_size(cache_file) / 2);
  const auto recomputed = lowrank::burgers_reference(cfg, problem, 1e-4);
  REQUIRE(recomputed.stored() == fresh.stored());
  CHECK(recomputed.dense_states.back() == fresh.dense_states.back());

  // Garbage magic bytes are equally rejected.
  {
    std::ofstream out(cache_file, std::ios::binary | std::ios::trunc);
    out << "not a cache file";
  }
  const auto again = lowrank::burgers_reference(cfg, problem, 1e-4);
  CHECK(again.dense_states.back() == fresh.dense_states.back());
}

TEST_CASE("resolve_cache_dir: environment wins, then config, then default") {
  RunConfig cfg;
  unsetenv("LOWRANK_CACHE_DIR");
  CHECK(lowrank::resolve_cache_dir(cfg) == ".lowrank-cache");
  cfg.cache_dir = "/tmp/somewhere";
  CHECK(lowrank::resolve_cache_dir(cfg) == "/tmp/somewhere");
  setenv("LOWRANK_CACHE_DIR", "/tmp/env-cache", 1);
  CHECK(lowrank::resolve_cache_dir(cfg) == "/tmp/env-cache");
  unsetenv("LOWRANK_CACHE_DIR");
}
