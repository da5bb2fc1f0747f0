#pragma once

// Run configuration (JSON round-trip with schema validation), the
// config fingerprint, and machine-readable result writing (JSON summary
// plus CSV tables). Reruns with the same config and seed produce
// byte-identical outputs except for the timestamp field.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tubeflow/model.hpp"
#include "tubeflow/profile.hpp"

namespace tubeflow {

inline constexpr const char* kVersion = "1.0.0";

struct ConfigError {
  std::string path;     // dotted field path, e.g. "deformation.epsilon"
  std::string message;
};

struct ExperimentConfig {
  ModelSpec model;  // m = 2, r = 1, s = 3, period 2 pi, tube radius 1/2

  struct Deformation {
    DeformationKind kind = DeformationKind::kConformal;
    double epsilon = 0.05;
    int order = 3;  // bump smoothness order k0
  } deformation;

  struct Integration {
    double step = 1e-3;
    double jacobi_horizon = 10.0;
    double lyapunov_horizon = 20.0;
    double qr_interval = 0.5;
  } integration;

  struct Cones {
    double opening = 0.9;
    double theta_threshold = 0.1;
    int seeds_per_class = 64;
    int boundary_directions = 32;
    double scan_horizon = 12.566370614359172;
    int sample_stride = 50;
  } cones;

  struct Scan {
    int grid_per_axis = 41;
    int t_samples = 16;
    int random_planes = 32;
    int refine_grid = 21;
  } scan;

  std::string output_dir = "out";
  std::uint64_t seed = 1;
  int threads = 1;
  bool use_simd = true;

  // Throws std::invalid_argument listing every violated field path.
  void validate() const;
  std::vector<ConfigError> check() const;
};

// JSON round-trip. load_config throws std::invalid_argument with the field
// path on schema violations (unknown key, wrong type, constraint failure).
ExperimentConfig default_config();
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text);
std::string config_to_json(const ExperimentConfig& cfg);
void save_config(const ExperimentConfig& cfg, const std::string& path);

// FNV-1a over the canonical (sorted-key, fixed-format) JSON dump.
std::uint64_t config_hash(const ExperimentConfig& cfg);

// --- Results -----------------------------------------------------------------

struct CheckResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct RunSummary {
  std::string command;
  std::string version = kVersion;
  std::uint64_t config_fingerprint = 0;
  std::uint64_t seed = 0;
  std::string timestamp;  // excluded from determinism comparisons
  std::vector<CheckResult> checks;
  std::map<std::string, double> metrics;
  bool pass() const;
};

// Serializes with sorted keys and shortest round-trip doubles; the
// timestamp is always emitted under the key "timestamp".
std::string summary_to_json(const RunSummary& summary);
void write_summary(const RunSummary& summary, const std::string& path);

// CSV with a header row; cells are formatted with round-trip precision.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
void write_csv(const CsvTable& table, const std::string& path);

std::string iso8601_now();
bool ensure_directory(const std::string& path);

}  // namespace tubeflow
