#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kicktop/classical.hpp"
#include "kicktop/correlations.hpp"
#include "kicktop/rmt.hpp"

namespace kicktop {

enum class ExperimentKind { portrait, sweep_k, scaling_j, table1, coe_compare, eigvec_q, stability_scan };

std::string to_string(ExperimentKind kind);
std::optional<ExperimentKind> experiment_from_string(std::string_view name);

struct ExperimentInfo {
  ExperimentKind kind;
  std::string name;
  std::string reproduces;
  std::string summary;
};

const std::vector<ExperimentInfo>& list_experiments();

// Classical cycle whose first stability loss is searched on [k_lo, k_hi].
struct StabilityTarget {
  double theta = 0.0;
  double phi = 0.0;
  int period = 1;
  double p = 0.0;
  double k_lo = 0.0;
  double k_hi = 0.0;

  friend bool operator==(const StabilityTarget&, const StabilityTarget&) = default;
};

// Every experiment reads the subset of fields it needs; see README.md.
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::table1;

  // [physics]
  std::vector<double> j;
  double j_min = 10.0;
  double j_max = 400.0;
  int j_count = 20;
  std::vector<double> k;
  double k_min = 0.1;
  double k_max = 4.0;
  double k_step = 0.05;
  std::vector<double> p;
  std::vector<double> theta0;
  std::vector<double> phi0;
  int steps = 1000;
  QNormalization normalization = QNormalization::qubit_2j;
  EntropyUnit entropy_unit = EntropyUnit::nats;

  // [ensemble]
  Ensemble ensemble = Ensemble::block_coe;
  int n_samples = 1;
  int n_k_values = 50;
  bool parity_resolved = false;

  // [classical]
  int n_seeds = 100;
  int n_steps = 500;
  classical::SeedLayout layout = classical::SeedLayout::grid;
  double dk = 0.01;
  std::vector<StabilityTarget> targets;

  // [run]
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string out = "out";

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

ExperimentConfig default_config(ExperimentKind kind);

// Parses "[section]" headers and "key = value" lines ('#' starts a comment)
// on top of the defaults of the experiment named in [experiment] name, or of
// `kind` when given. Throws ConfigError naming "section.key".
ExperimentConfig parse_config(std::string_view text, std::optional<ExperimentKind> kind = {});
ExperimentConfig load_config(const std::filesystem::path& file,
                             std::optional<ExperimentKind> kind = {});

// "section.key=value".
void apply_override(ExperimentConfig& config, std::string_view assignment);
// Applies KICKTOP_<SECTION>_<KEY> entries, e.g. KICKTOP_PHYSICS_K=10.
void apply_environment(ExperimentConfig& config, const std::map<std::string, std::string>& env);

// Lossless: parse_config(serialize(c)) == c.
std::string serialize(const ExperimentConfig& config);

// Throws ConfigError for the first invalid field.
void validate(const ExperimentConfig& config);

struct RunResult {
  std::vector<std::filesystem::path> files;  // results, plot data, manifest
};

// Validates, then writes results CSVs, a plot-ready long-format CSV and
// manifest.txt into config.out. Nothing is written if validation fails.
// Numerical failures are rethrown as NumericalError prefixed with the
// experiment name.
RunResult run(const ExperimentConfig& config);

std::string version();

}  // namespace kicktop
