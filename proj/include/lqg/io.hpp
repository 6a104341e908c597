#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lqg/experiment.hpp"

namespace lqg {

inline constexpr const char* kToolVersion = "lqgsim 0.1.0";

/// Fully resolved run configuration. Every key of the JSON schema maps to one
/// field; `params` is derived from whichever of c_m / q was given.
struct RunConfig {
  std::string command;
  std::optional<double> c_m;
  std::optional<double> q;
  Params params;
  double epsilon = 1.0 / 64;
  int ladder_steps = 0;
  int replicas = 1;
  std::uint64_t seed = 0;
  int depth_cap = 24;
  Backend backend = Backend::kOctave;
  int domain_level = 0;
  std::string fractal = "segment:1/2";
  Point z{0.25, 0.5};
  Point w{0.75, 0.5};
  Point center{0.5, 0.5};
  int r_min = 4;
  int r_max = 256;
  std::uint64_t node_budget = 4'000'000;
  // Execution settings; excluded from the hash since they never change results.
  int workers = 1;
  std::string out;
  bool plot = false;

  Ladder ladder() const { return {epsilon, ladder_steps, replicas, seed}; }
  Campaign campaign() const;
  DyadicSquare domain() const { return {domain_level, 0, 0}; }
};

/// Known configuration keys in canonical order.
const std::vector<std::string>& config_keys();

/// Layers are merged in order (later wins). A layer that sets c_m drops a q
/// inherited from earlier layers and vice versa; both in one layer conflict.
/// Unknown keys and invalid values are collected and reported together.
RunConfig resolve_config(const std::string& command, const std::vector<nlohmann::json>& layers);

/// Parse a JSON document into a configuration layer (object) and resolve it alone.
RunConfig parse_config(const std::string& text, const std::string& command = "");
nlohmann::json parse_layer(const std::string& text, const std::string& origin);

/// LQG_<KEY> environment variables as a layer (e.g. LQG_DEPTH_CAP=20).
nlohmann::json env_layer(const std::map<std::string, std::string>& environment);
std::map<std::string, std::string> process_environment();

/// Sorted-key JSON of every result-affecting setting, with q resolved.
std::string canonical_config(const RunConfig& c);
/// FNV-1a 128-bit digest of canonical_config, as 32 hex digits.
std::string config_hash(const RunConfig& c);
std::string fnv1a_128(const std::string& bytes);

// --- persistence ------------------------------------------------------------

void dump_tiling(const Tiling& t, const std::string& path);
Tiling load_tiling(const std::string& path);
std::string format_tiling(const Tiling& t);
Tiling parse_tiling(const std::string& text);

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

std::string format_number(double v);
CsvTable kpz_table(const KpzResult& r);
CsvTable measure_table(const MeasureResult& r);
CsvTable ball_table(const BallResult& r);
CsvTable ptp_table(const PtpResult& r);

/// Writes "# tool_version" and "# config_hash" comment lines, the column
/// header and the rows.
std::string format_csv(const CsvTable& table, const std::string& hash);
void emit_csv(const CsvTable& table, const std::string& hash, const std::string& path);

/// Two-column data file plus a gnuplot script that plots it.
void emit_plot(const std::vector<std::pair<double, double>>& points, const std::string& xlabel,
               const std::string& ylabel, const std::string& hash, const std::string& path_prefix);

void write_file(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

}  // namespace lqg
