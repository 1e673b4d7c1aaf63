// Binary cache of explicit-Euler reference trajectories.
//
// File layout (native byte order, 64-bit fields):
//   char[8]  magic "LRKREF01"
//   u64      key hash (FNV-1a of the canonical problem-key string)
//   i64 n, i64 m
//   f64      reference dt
//   u64      seed
//   f64      t_final
//   i64      record count
//   records: { f64 time; i64 step index; f64 data[n*m] row-major }

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <string>

#include "lowrank/errors.hpp"
#include "lowrank/experiments.hpp"

namespace lowrank {

namespace {

constexpr char kMagic[8] = {'L', 'R', 'K', 'R', 'E', 'F', '0', '1'};

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct ReferenceKey {
  std::string experiment;
  Index n, m;
  std::uint64_t seed;
  double dt_ref, t_final, advection_sign;
  Index stride;

  std::string canonical() const {
    return experiment + "|n=" + std::to_string(n) + "|m=" + std::to_string(m) +
           "|seed=" + std::to_string(seed) + "|dt=" + g17(dt_ref) +
           "|T=" + g17(t_final) + "|stride=" + std::to_string(stride) +
           "|adv=" + g17(advection_sign);
  }
};

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
bool read_pod(std::ifstream& in, T& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  return static_cast<bool>(in);
}

void save_cache(const std::filesystem::path& path, std::uint64_t key_hash,
                std::uint64_t seed, const TrajectoryRecord& rec) {
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return;  // the cache is an optimization; failing to write is fine

  const Index n = rec.dense_states.front().rows();
  const Index m = rec.dense_states.front().cols();
  out.write(kMagic, sizeof(kMagic));
  write_pod(out, key_hash);
  write_pod(out, static_cast<std::int64_t>(n));
  write_pod(out, static_cast<std::int64_t>(m));
  write_pod(out, rec.dt);
  write_pod(out, seed);
  write_pod(out, rec.t_final);
  write_pod(out, static_cast<std::int64_t>(rec.stored()));
  using RowMajor =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  for (Index i = 0; i < rec.stored(); ++i) {
    write_pod(out, rec.times[i]);
    write_pod(out, static_cast<std::int64_t>(rec.step_indices[i]));
    const RowMajor row_major = rec.dense_states[i];
    out.write(reinterpret_cast<const char*>(row_major.data()),
              static_cast<std::streamsize>(sizeof(double) * n * m));
  }
}

std::optional<TrajectoryRecord> load_cache(const std::filesystem::path& path,
                                           std::uint64_t key_hash, Index n,
                                           Index m) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;

  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::string(magic, 8) != std::string(kMagic, 8))
    return std::nullopt;
  std::uint64_t hash = 0, seed = 0;
  std::int64_t fn = 0, fm = 0, count = 0;
  double dt = 0, t_final = 0;
  if (!read_pod(in, hash) || !read_pod(in, fn) || !read_pod(in, fm) ||
      !read_pod(in, dt) || !read_pod(in, seed) || !read_pod(in, t_final) ||
      !read_pod(in, count))
    return std::nullopt;
  if (hash != key_hash || fn != n || fm != m || count < 1) return std::nullopt;

  TrajectoryRecord rec;
  rec.method = Method::Euler;
  rec.rank = 0;
  rec.dt = dt;
  rec.t_final = t_final;
  using RowMajor =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  for (std::int64_t i = 0; i < count; ++i) {
    double time = 0;
    std::int64_t step = 0;
    if (!read_pod(in, time) || !read_pod(in, step)) return std::nullopt;
    RowMajor data(n, m);
    in.read(reinterpret_cast<char*>(data.data()),
            static_cast<std::streamsize>(sizeof(double) * n * m));
    if (!in) return std::nullopt;
    rec.times.push_back(time);
    rec.step_indices.push_back(static_cast<Index>(step));
    rec.dense_states.emplace_back(data);
    rec.sigma_min_g.push_back(std::numeric_limits<double>::quiet_NaN());
    rec.sigma_max_g.push_back(std::numeric_limits<double>::quiet_NaN());
  }
  return rec;
}

}  // namespace

std::string resolve_cache_dir(const RunConfig& config) {
  if (const char* env = std::getenv("LOWRANK_CACHE_DIR"); env && *env)
    return env;
  if (!config.cache_dir.empty()) return config.cache_dir;
  return ".lowrank-cache";
}

TrajectoryRecord burgers_reference(const RunConfig& config,
                                   const ProblemSpec& problem, double dt_ref) {
  const Index k_total = step_count(config.t_final, dt_ref);
  const Index stride = std::max<Index>(1, k_total / 200);

  ReferenceKey key{config.experiment, problem.n,          problem.m,
                   config.seed,       dt_ref,             config.t_final,
                   config.advection_sign, stride};
  const std::uint64_t hash = fnv1a64(key.canonical());
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(hash));
  const auto path = std::filesystem::path(resolve_cache_dir(config)) /
                    (config.experiment + "-" + hex + ".refbin");

  if (auto cached = load_cache(path, hash, problem.n, problem.m))
    return *cached;

  IntegratorConfig ic;
  ic.method = Method::Euler;
  ic.rank = 1;
  ic.dt = dt_ref;
  ic.t_final = config.t_final;
  ic.store_stride = stride;
  TrajectoryRecord rec = integrate(problem, ic);
  save_cache(path, hash, config.seed, rec);
  return rec;
}

}  // namespace lowrank
