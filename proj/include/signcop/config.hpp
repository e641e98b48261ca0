#pragma once

// Flat key = value run configuration. Lines starting with '#' and blank
// lines are ignored; unknown keys are errors. Command-line flags are applied
// on top with set_config_value, so they win over the file.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "signcop/graph.hpp"
#include "signcop/infer.hpp"
#include "signcop/train.hpp"

namespace signcop {

struct RunConfig {
  TrainConfig train;  // train.seed is the base seed of a command
  SplitRatios splits;
  InferenceMode inference_mode = InferenceMode::Mean;
  std::size_t samples = 1;
  std::size_t repeats = 10;
  bool identity_correlation = false;

  std::size_t n_per_group = 20;
  double p_intra = kDefaultPIntra;
  double p_inter = kDefaultPInter;

  std::size_t ideal_d = 64;
  std::size_t ideal_steps = 300;
  double ideal_step_size = 100.0;

  std::size_t gradcheck_instances = 20;
  std::size_t gradcheck_d = 4;
  double gradcheck_h = 1e-5;
  double gradcheck_tol = 1e-4;
};

// Throws ConfigError for an unknown key or an unparsable value.
void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value);
// Throws ParseError (with line number) for malformed lines, ConfigError for
// bad keys or values.
void parse_config(std::istream& in, RunConfig& cfg);
RunConfig load_config(const std::filesystem::path& path);
// Throws ConfigError naming the first out-of-domain setting.
void validate_config(const RunConfig& cfg);

enum class ValueKind { Integer, Real, Boolean, Text };
struct ConfigEntry {
  std::string key;
  std::string value;
  ValueKind kind;
};
// Every key with its effective value, in a stable order.
std::vector<ConfigEntry> config_entries(const RunConfig& cfg);

}  // namespace signcop
