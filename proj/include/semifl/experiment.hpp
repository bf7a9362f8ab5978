#pragma once

#include "semifl/semifl.hpp"

#include <filesystem>
#include <string_view>

namespace semifl {

// Sweep over one dotted config field ("thresholds.eps1"); `paired` fields change in lockstep.
struct SweepAxis {
  std::string axis;
  std::vector<std::string> labels;  // one per point, as written in the config
  std::vector<SemiflConfig> points;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::vector<std::uint64_t> seeds{1};
  int threads = 0;  // 0: hardware concurrency
  SemiflConfig sim;
  std::optional<SweepAxis> sweep;
};

// JSON schema the loader validates against (the text of schemas/experiment.schema.json).
std::string_view experiment_schema();

// Checks a JSON document against the schema subset used there; throws ConfigError naming the
// offending field path.
void validate_against_schema(std::string_view json_text);

ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

struct RunResult {
  std::uint64_t seed = 0;
  Trajectory traj;
};

// One trajectory per seed, run concurrently; results are ordered like the seeds.
std::vector<RunResult> run_seeds(const ExperimentConfig& cfg);

inline const char* kCsvHeader =
    "seed,round,region,loss,accuracy,mse,nu,omega,mean_theta,E_uplink,E_compute,E_total,T_total";

std::string format_csv(const std::vector<RunResult>& runs);
std::string format_summary(const ExperimentConfig& cfg, const std::vector<RunResult>& runs);

// Writes to a sibling temp file and renames it into place.
void write_atomic(const std::filesystem::path& path, std::string_view contents);

struct ExperimentFiles {
  std::filesystem::path csv, summary;
};

// <out>/<name>.csv and <out>/<name>.summary.json
ExperimentFiles run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out);

struct SweepPoint {
  std::string label;
  std::vector<RunResult> runs;
};

// Every (point, seed) pair runs concurrently; merged by point then seed into
// <out>/<name>.sweep.csv and <out>/<name>.sweep.json, plus one per-round CSV per point.
std::vector<SweepPoint> run_sweep(const ExperimentConfig& cfg, const std::filesystem::path& out);

// Single-round allocation on the round-1 channels of `seed`, as JSON.
std::string optimize_json(const ExperimentConfig& cfg, Region region, AllocatorKind kind, std::uint64_t seed);

// Theory evaluators for the configured constants at the round-1 allocations, as JSON.
std::string bounds_json(const ExperimentConfig& cfg, std::uint64_t seed);

// Machine-readable error record.
std::string error_json(const std::exception& e);

}  // namespace semifl
