#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gsc/pattern.hpp"

namespace gsc {

struct ResistParams {
  int nmax = 3;
  int extra = 2;
  double tol = 1e-10;
  std::string mode = "face";  // "face" | "cell"
};

struct TraceParams {
  std::vector<int> m{3, 4};
  int nmax = 3;
  int random = 3;
  std::optional<double> rho;
};

struct DecayParams {
  int level = 1;
  std::vector<std::int64_t> cell;  // empty: (0, 1, 0, ...)
  int m = 4;
  int m_prime = 5;
  int depth = 4;
};

struct ExtendParams {
  int n = 1;
  int m = 1;
  int m_prime = 4;
};

struct FacesParams {
  int n = 1;
  int m = 1;
  bool list = false;
};

struct ExitParams {
  int nmax = 3;
  int extra = 2;
  std::optional<double> rho;
};

struct ExperimentConfig {
  std::filesystem::path pattern_path;
  std::filesystem::path output = "gsclab_out";
  std::filesystem::path cache;  // empty: no cache
  bool deterministic = true;
  int threads = 1;
  std::uint64_t seed = 20240601;
  std::optional<double> dims_rho;
  ResistParams resist;
  TraceParams trace;
  DecayParams decay;
  ExtendParams extend;
  FacesParams faces;
  ExitParams exit;

  /// Range checks; throws InputError naming the offending key.
  void check() const;
  nlohmann::json to_json() const;
};

/// Parses a JSON config; unknown keys and out-of-range values are rejected.
ExperimentConfig parse_config(const nlohmann::json& j, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});

/// One stage's tabular output plus a JSON summary of its estimates.
struct StageOutput {
  std::string name;
  std::string csv;
  nlohmann::json summary = nlohmann::json::object();
  bool cached = false;
  double seconds = 0.0;
};

/// Stage runners. Each validates nothing itself; see run().
StageOutput stage_validate(const GscPattern& pattern);
StageOutput stage_dims(const GscPattern& pattern, std::optional<double> rho_hat);
StageOutput stage_faces(const GscPattern& pattern, const FacesParams& p);
StageOutput stage_resist(const GscPattern& pattern, const ResistParams& p, bool deterministic);
StageOutput stage_trace(const GscPattern& pattern, const TraceParams& p, double rho_hat,
                        std::uint64_t seed);
StageOutput stage_decay(const GscPattern& pattern, const DecayParams& p, double tol);
StageOutput stage_extend(const GscPattern& pattern, const ExtendParams& p, std::uint64_t seed,
                         double tol);
StageOutput stage_exit(const GscPattern& pattern, const ExitParams& p, double rho_hat, double tol);

/// Stream seeds derived from the config seed (see docs/formats.md).
std::uint64_t extend_seed(std::uint64_t seed);
std::uint64_t trace_seed(std::uint64_t seed, int k);

/// Smooth data used on the decay-neighbourhood boundary.
double decay_boundary_data(const std::vector<double>& x);

/// `# gsclab <version> <subcommand>` header line.
std::string csv_header(const std::string& subcommand);

/// Runs a subcommand ("validate", "dims", "faces", "resist", "trace", "decay",
/// "extend", "exit", "pipeline"), writes CSVs and a manifest under
/// config.output, and returns the process exit status. Diagnostics go to
/// stderr.
int run(const std::string& subcommand, const ExperimentConfig& config);

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int input = 1;
inline constexpr int validation = 2;
inline constexpr int solver = 3;
inline constexpr int resources = 4;
}  // namespace exit_code

}  // namespace gsc
