#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "microdl/micro.hpp"
#include "microdl/stack.hpp"

namespace microdl {

// One input dataset. `source` is "blobs" (synthetic) or "csv:<path>".
struct DatasetSpec {
  std::string name;
  std::string source = "blobs";
  std::string label_column = "label";
  int k = 3;
  std::size_t per_cluster = 100;
  Eigen::Index dim = 10;
  double separation = 4.0;
  std::optional<std::uint64_t> seed;  // defaults to the master seed
  std::size_t sample_n = 0;           // 0 keeps every row
  bool standardize = true;
};

inline constexpr const char* kMicroMethod = "Micro-DL";
inline constexpr const char* kPlainMethod = "NMicro-DL";
inline constexpr const char* kRawMethod = "raw-features";

struct ExperimentConfig {
  std::vector<DatasetSpec> datasets;
  std::vector<std::string> methods{kMicroMethod, kPlainMethod, kRawMethod};
  std::size_t layers = 3;
  std::vector<Eigen::Index> hidden_dims;  // empty: every layer keeps the input dim
  TrainingConfig training;
  std::uint64_t seed = 1;
  std::size_t repeats = 1;
  std::vector<double> alpha_sweep;  // each in (0,1); empty disables the sweep
  bool friedman = false;
  std::optional<double> sigma;      // affinity width; median distance when unset
  int kmeans_restarts = 20;

  StackSpec stack_spec(bool micro, std::uint64_t seed) const;
  void validate() const;
};

// Named hyperparameter bundles: "synthetic", "image", "tabular".
void apply_preset(ExperimentConfig& cfg, const std::string& name);

// Flat UTF-8 "key = value" lines; '#' starts a comment. Keys are listed in
// the README. Unknown or repeated keys are errors.
std::map<std::string, std::string> parse_key_values(std::istream& in, const std::string& origin);
ExperimentConfig parse_config(std::istream& in, const std::string& origin = "config");
ExperimentConfig load_config(const std::string& path);

// Applies one key to cfg; throws ConfigError for unknown keys or bad values.
void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value);

// Serializes every key so that parse_config(write_config(c)) reproduces c.
void write_config(std::ostream& out, const ExperimentConfig& cfg);

}  // namespace microdl
