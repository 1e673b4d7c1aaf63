#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lowrank/integrators.hpp"
#include "lowrank/problems.hpp"

namespace lowrank {

/// One experiment run: a cross product of methods, ranks and step sizes over
/// a single problem instance. Zero-valued numeric fields mean "use the
/// experiment default".
struct RunConfig {
  std::string experiment = "matrix-approx";  // matrix-approx | burgers-single | burgers-multi
  std::string method = "both";               // ksl | chart | euler | both
  std::string flux_variant = "increment";    // increment | derivative (matrix-approx only)
  std::vector<Index> ranks = {10};
  std::vector<double> dts = {5e-3};
  double t_final = 1.0;
  Index n = 0;              // default: 100
  Index m = 0;              // default: n (matrix-approx) or 60 (burgers)
  std::uint64_t seed = 42;
  std::string out_dir = "results";
  Index store_stride = 0;   // 0 = auto: about 200 stored instants per run
  double reference_dt = 0;  // 0 = 5e-6 (burgers-single) / the cell dt (burgers-multi)
  int jobs = 1;
  double advection_sign = -1.0;  // -1 matches the PDE; +1 flips the advection term
  std::string cache_dir;    // empty = $LOWRANK_CACHE_DIR or ./.lowrank-cache
};

/// Parses a flat `key = value` file; '#' starts a comment. Keys are the CLI
/// flag names, with '-' and '_' interchangeable.
RunConfig load_config_file(const std::string& path);

/// Applies one key/value pair; throws ConfigError for unknown keys or
/// unparsable values.
void set_config_key(RunConfig& config, const std::string& key,
                    const std::string& value);

/// Fills experiment defaults (n, m, reference_dt) and checks the whole
/// configuration; throws ConfigError on any violation.
void finalize_config(RunConfig& config);

/// Error series extracted from a trajectory against a reference, restricted
/// to comparable instants.
struct ErrorSlice {
  std::vector<double> times;
  std::vector<double> errors;
  double max_error = 0.0;
  double final_error = 0.0;
};

ErrorSlice error_series(const TrajectoryRecord& traj,
                        const ExactSolution& reference);

/// Compares at coincident stored instants (|t - t_ref| <= 1e-9). Throws
/// GridMismatchError when no instant matches or the final instant has no
/// counterpart.
ErrorSlice error_series(const TrajectoryRecord& traj,
                        const TrajectoryRecord& reference);

struct CellResult {
  std::string experiment;
  Method method = Method::Ksl;
  Index rank = 0;  // 0 for euler
  double dt = 0.0;
  TrajectoryRecord trajectory;
  double max_error = 0.0;
  double final_error = 0.0;
  Index steps = 0;
  double wall_seconds = 0.0;
  bool aborted = false;
  std::string message;
};

struct ErrorReport {
  std::vector<CellResult> cells;
  bool any_aborted() const;
};

/// Executes every (method, rank, dt) cell of the run, in parallel when
/// config.jobs > 1 (cells are independent; aborted cells are recorded, not
/// fatal), then writes `series.csv` and `summary.csv` under config.out_dir
/// with rows in deterministic order. Numeric CSV fields carry 17 significant
/// digits, so identical configurations produce identical files
/// (summary.csv's wall_seconds column excepted: it reports measured time).
ErrorReport run(const RunConfig& config);

/// Cache location: $LOWRANK_CACHE_DIR when set, else config.cache_dir, else
/// ./.lowrank-cache.
std::string resolve_cache_dir(const RunConfig& config);

/// Explicit-Euler reference trajectory for a Burgers run at step dt_ref,
/// thinned to about 200 stored instants. Loaded from the binary cache when a
/// file matching the problem configuration exists, otherwise computed and
/// stored.
TrajectoryRecord burgers_reference(const RunConfig& config,
                                   const ProblemSpec& problem, double dt_ref);

}  // namespace lowrank
