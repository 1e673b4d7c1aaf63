#include "lowrank/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "lowrank/errors.hpp"

namespace lowrank {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

double parse_double(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad numeric value '" + s + "' for key '" + key + "'");
  }
}

Index parse_index(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return static_cast<Index>(v);
  } catch (const std::exception&) {
    throw ConfigError("bad integer value '" + s + "' for key '" + key + "'");
  }
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Index auto_stride(Index steps) { return std::max<Index>(1, steps / 200); }

}  // namespace

void set_config_key(RunConfig& config, const std::string& raw_key,
                    const std::string& value) {
  std::string key = raw_key;
  std::replace(key.begin(), key.end(), '-', '_');

  if (key == "experiment") {
    config.experiment = value;
  } else if (key == "method") {
    config.method = value;
  } else if (key == "flux") {
    config.flux_variant = value;
  } else if (key == "rank") {
    config.ranks.clear();
    for (const auto& item : split(value, ','))
      config.ranks.push_back(parse_index(item, key));
  } else if (key == "dt") {
    config.dts.clear();
    for (const auto& item : split(value, ','))
      config.dts.push_back(parse_double(item, key));
  } else if (key == "t_final") {
    config.t_final = parse_double(value, key);
  } else if (key == "n") {
    config.n = parse_index(value, key);
  } else if (key == "m") {
    config.m = parse_index(value, key);
  } else if (key == "seed") {
    config.seed = static_cast<std::uint64_t>(parse_index(value, key));
  } else if (key == "out") {
    config.out_dir = value;
  } else if (key == "store_stride") {
    config.store_stride = parse_index(value, key);
  } else if (key == "reference_dt") {
    config.reference_dt = parse_double(value, key);
  } else if (key == "jobs") {
    config.jobs = static_cast<int>(parse_index(value, key));
  } else if (key == "advection_sign") {
    config.advection_sign = parse_double(value, key);
  } else if (key == "cache_dir") {
    config.cache_dir = value;
  } else {
    throw ConfigError("unknown configuration key '" + raw_key + "'");
  }
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  RunConfig config;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected 'key = value'");
    set_config_key(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return config;
}

void finalize_config(RunConfig& config) {
  const bool matrix_approx = config.experiment == "matrix-approx";
  const bool burgers_single = config.experiment == "burgers-single";
  const bool burgers_multi = config.experiment == "burgers-multi";
  if (!matrix_approx && !burgers_single && !burgers_multi)
    throw ConfigError("unknown experiment '" + config.experiment + "'");

  if (config.method != "both") parse_method(config.method);  // validates
  if (config.flux_variant != "increment" && config.flux_variant != "derivative")
    throw ConfigError("unknown flux variant '" + config.flux_variant + "'");

  if (config.n == 0) config.n = 100;
  if (config.m == 0) config.m = matrix_approx ? config.n : 60;
  if (matrix_approx && config.n != config.m)
    throw ConfigError("matrix-approx is square: n must equal m");
  if (matrix_approx && config.n < 10)
    throw ConfigError("matrix-approx needs n >= 10");
  if (!matrix_approx && config.n < 3)
    throw ConfigError("burgers needs n >= 3");

  if (config.dts.empty()) throw ConfigError("dt list is empty");
  if (config.method != "euler") {  // euler ignores the rank list
    if (config.ranks.empty()) throw ConfigError("rank list is empty");
    for (const Index r : config.ranks)
      if (r < 1 || r > std::min(config.n, config.m))
        throw ConfigError("rank " + std::to_string(r) +
                          " out of range for the problem size");
  }
  if (!(config.t_final > 0)) throw ConfigError("t-final must be positive");
  for (const double dt : config.dts) step_count(config.t_final, dt);

  if (config.reference_dt == 0.0 && burgers_single) config.reference_dt = 5e-6;
  if (config.reference_dt > 0.0) {
    step_count(config.t_final, config.reference_dt);
    for (const double dt : config.dts) {
      const double ratio = dt / config.reference_dt;
      if (std::abs(ratio - std::llround(ratio)) > 1e-9 * ratio)
        throw ConfigError("dt must be an integer multiple of reference-dt");
    }
  }

  if (config.jobs < 1) throw ConfigError("jobs must be >= 1");
  if (config.advection_sign != -1.0 && config.advection_sign != 1.0)
    throw ConfigError("advection-sign must be -1 or 1");
  if (config.store_stride < 0) throw ConfigError("store-stride must be >= 0");
}

ErrorSlice error_series(const TrajectoryRecord& traj,
                        const ExactSolution& reference) {
  ErrorSlice slice;
  for (Index i = 0; i < traj.stored(); ++i) {
    slice.times.push_back(traj.times[i]);
    slice.errors.push_back(
        (reference(traj.times[i]) - traj.state_dense(i)).norm());
  }
  slice.max_error =
      *std::max_element(slice.errors.begin(), slice.errors.end());
  slice.final_error = slice.errors.back();
  return slice;
}

ErrorSlice error_series(const TrajectoryRecord& traj,
                        const TrajectoryRecord& reference) {
  ErrorSlice slice;
  Index j = 0;
  for (Index i = 0; i < traj.stored(); ++i) {
    while (j < reference.stored() &&
           reference.times[j] < traj.times[i] - 1e-9)
      ++j;
    if (j < reference.stored() &&
        std::abs(reference.times[j] - traj.times[i]) <= 1e-9) {
      slice.times.push_back(traj.times[i]);
      slice.errors.push_back(
          (reference.state_dense(j) - traj.state_dense(i)).norm());
    }
  }
  if (slice.errors.empty())
    throw GridMismatchError("error_series: no coincident time instants");
  if (std::abs(slice.times.back() - traj.times.back()) > 1e-9)
    throw GridMismatchError(
        "error_series: final instant has no counterpart in the reference");
  slice.max_error =
      *std::max_element(slice.errors.begin(), slice.errors.end());
  slice.final_error = slice.errors.back();
  return slice;
}

bool ErrorReport::any_aborted() const {
  return std::any_of(cells.begin(), cells.end(),
                     [](const CellResult& c) { return c.aborted; });
}

namespace {

struct CellSpec {
  Method method;
  Index rank;  // 0 for euler
  double dt;
};

void fill_error_stats(CellResult& res) {
  res.max_error = kNaN;
  res.final_error = kNaN;
  double max_err = -1.0;
  for (const double e : res.trajectory.errors) {
    if (std::isnan(e)) continue;
    max_err = std::max(max_err, e);
    res.final_error = e;  // last non-NaN wins
  }
  if (max_err >= 0.0) res.max_error = max_err;
}

void write_series_csv(const RunConfig& config, const ErrorReport& report) {
  const auto path = std::filesystem::path(config.out_dir) / "series.csv";
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "experiment,method,rank,dt,step,time,error_fro,sigma_min_g,sigma_max_g\n";
  for (const CellResult& cell : report.cells) {
    const TrajectoryRecord& tr = cell.trajectory;
    for (Index i = 0; i < tr.stored(); ++i) {
      const double err = tr.errors.empty() ? kNaN : tr.errors[i];
      out << cell.experiment << ',' << method_name(cell.method) << ','
          << cell.rank << ',' << g17(cell.dt) << ',' << tr.step_indices[i]
          << ',' << g17(tr.times[i]) << ',' << g17(err) << ','
          << g17(tr.sigma_min_g[i]) << ',' << g17(tr.sigma_max_g[i]) << '\n';
    }
  }
}

void write_summary_csv(const RunConfig& config, const ErrorReport& report) {
  const auto path = std::filesystem::path(config.out_dir) / "summary.csv";
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "experiment,method,rank,dt,max_error,final_error,steps,wall_seconds\n";
  for (const CellResult& cell : report.cells) {
    out << cell.experiment << ',' << method_name(cell.method) << ','
        << cell.rank << ',' << g17(cell.dt) << ',' << g17(cell.max_error)
        << ',' << g17(cell.final_error) << ',' << cell.steps << ','
        << g17(cell.wall_seconds) << '\n';
  }
}

}  // namespace

ErrorReport run(const RunConfig& user_config) {
  RunConfig config = user_config;
  finalize_config(config);

  const bool matrix_approx = config.experiment == "matrix-approx";
  const bool burgers_single = config.experiment == "burgers-single";

  std::vector<Method> methods;
  if (config.method == "both")
    methods = {Method::Ksl, Method::Chart};
  else
    methods = {parse_method(config.method)};

  std::vector<CellSpec> cells;
  for (const Method method : methods)
    for (const double dt : config.dts) {
      if (method == Method::Euler)
        cells.push_back({method, 0, dt});
      else
        for (const Index rank : config.ranks) cells.push_back({method, rank, dt});
    }

  // Shared problem and reference data; read-only while cells execute.
  ProblemSpec burgers;
  std::vector<std::pair<double, TrajectoryRecord>> references;  // keyed by dt_ref
  if (!matrix_approx) {
    BurgersConfig bc;
    bc.n = config.n;
    bc.m = config.m;
    bc.mode = burgers_single ? BurgersMode::Single : BurgersMode::Multi;
    bc.seed = config.seed;
    bc.t_final = config.t_final;
    bc.advection_sign = config.advection_sign;
    burgers = burgers_problem(bc);

    std::vector<double> ref_dts;
    if (config.reference_dt > 0.0) {
      ref_dts.push_back(config.reference_dt);
    } else {  // burgers-multi default: reference at the cell's own dt
      for (const double dt : config.dts)
        if (std::find(ref_dts.begin(), ref_dts.end(), dt) == ref_dts.end())
          ref_dts.push_back(dt);
    }
    for (const double dt_ref : ref_dts)
      references.emplace_back(dt_ref, burgers_reference(config, burgers, dt_ref));
  }

  auto reference_for = [&](double cell_dt) -> const TrajectoryRecord& {
    if (references.size() == 1) return references.front().second;
    for (const auto& [dt_ref, rec] : references)
      if (dt_ref == cell_dt) return rec;
    throw ConfigError("internal: no reference for dt");
  };

  auto execute_cell = [&](const CellSpec& cell) -> CellResult {
    CellResult res;
    res.experiment = config.experiment;
    res.method = cell.method;
    res.rank = cell.rank;
    res.dt = cell.dt;
    const Index k_total = step_count(config.t_final, cell.dt);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      IntegratorConfig ic;
      ic.method = cell.method;
      ic.rank = std::max<Index>(1, cell.rank);
      ic.dt = cell.dt;
      ic.t_final = config.t_final;
      ic.store_stride = config.store_stride > 0 ? config.store_stride
                                                : auto_stride(k_total);
      if (matrix_approx) {
        const ProblemSpec problem =
            config.flux_variant == "increment"
                ? matrix_approx_problem(config.n, config.seed,
                                        FluxVariant::Increment, cell.dt)
                : matrix_approx_problem(config.n, config.seed);
        res.trajectory = integrate(problem, ic, problem.exact);
      } else {
        res.trajectory = integrate(burgers, ic, reference_for(cell.dt));
      }
      res.steps = k_total;
      fill_error_stats(res);
    } catch (const NonFiniteError& err) {
      res.aborted = true;
      res.message = err.what();
      res.steps = err.step >= 0 ? static_cast<Index>(err.step) : 0;
      res.max_error = kNaN;
      res.final_error = kNaN;
    }
    res.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    return res;
  };

  std::vector<CellResult> results(cells.size());
  const int jobs =
      std::min<int>(config.jobs, static_cast<int>(cells.size()));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < cells.size(); ++i)
      results[i] = execute_cell(cells[i]);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= cells.size()) return;
        try {
          results[i] = execute_cell(cells[i]);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  ErrorReport report;
  report.cells = std::move(results);
  std::sort(report.cells.begin(), report.cells.end(),
            [](const CellResult& a, const CellResult& b) {
              if (a.method != b.method)
                return method_name(a.method) < method_name(b.method);
              if (a.rank != b.rank) return a.rank < b.rank;
              return a.dt < b.dt;
            });

  std::filesystem::create_directories(config.out_dir);
  write_series_csv(config, report);
  write_summary_csv(config, report);
  return report;
}

}  // namespace lowrank
