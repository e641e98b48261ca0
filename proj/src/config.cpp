#include "signcop/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>

#include "signcop/error.hpp"

namespace signcop {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw ConfigError("invalid value for " + std::string(key) + ": '" + std::string(value) + "'");
}

std::size_t parse_count(std::string_view key, std::string_view v) {
  std::size_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) bad_value(key, v);
  return out;
}

std::uint64_t parse_u64(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) bad_value(key, v);
  return out;
}

double parse_real(std::string_view key, std::string_view v) {
  double out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(out)) bad_value(key, v);
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad_value(key, v);
}

std::string real_str(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Field {
  const char* key;
  ValueKind kind;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define COUNT_FIELD(name, member)                                                        \
  Field {                                                                                \
    name, ValueKind::Integer,                                                            \
        [](RunConfig& c, std::string_view v) { c.member = parse_count(name, v); },       \
        [](const RunConfig& c) { return std::to_string(c.member); }                      \
  }
#define REAL_FIELD(name, member)                                                         \
  Field {                                                                                \
    name, ValueKind::Real, [](RunConfig& c, std::string_view v) { c.member = parse_real(name, v); }, \
        [](const RunConfig& c) { return real_str(c.member); }                            \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      COUNT_FIELD("d", train.d),
      REAL_FIELD("epsilon", train.epsilon),
      REAL_FIELD("eta", train.eta),
      REAL_FIELD("step_size", train.step_size),
      COUNT_FIELD("max_epochs", train.max_epochs),
      COUNT_FIELD("patience", train.patience),
      Field{"seed", ValueKind::Integer,
            [](RunConfig& c, std::string_view v) { c.train.seed = parse_u64("seed", v); },
            [](const RunConfig& c) { return std::to_string(c.train.seed); }},
      COUNT_FIELD("max_halvings", train.max_halvings),
      Field{"optimizer", ValueKind::Text,
            [](RunConfig& c, std::string_view v) {
              if (v == "gd") c.train.optimizer = Optimizer::GradientDescent;
              else if (v == "adam") c.train.optimizer = Optimizer::Adam;
              else bad_value("optimizer", v);
            },
            [](const RunConfig& c) {
              return std::string(c.train.optimizer == Optimizer::Adam ? "adam" : "gd");
            }},
      REAL_FIELD("adam_beta1", train.adam_beta1),
      REAL_FIELD("adam_beta2", train.adam_beta2),
      REAL_FIELD("adam_epsilon", train.adam_epsilon),
      REAL_FIELD("split_train", splits.train),
      REAL_FIELD("split_val", splits.val),
      REAL_FIELD("split_test", splits.test),
      Field{"inference_mode", ValueKind::Text,
            [](RunConfig& c, std::string_view v) {
              if (v == "mean") c.inference_mode = InferenceMode::Mean;
              else if (v == "sample") c.inference_mode = InferenceMode::Sample;
              else bad_value("inference_mode", v);
            },
            [](const RunConfig& c) {
              return std::string(c.inference_mode == InferenceMode::Sample ? "sample" : "mean");
            }},
      COUNT_FIELD("samples", samples),
      COUNT_FIELD("repeats", repeats),
      Field{"identity_correlation", ValueKind::Boolean,
            [](RunConfig& c, std::string_view v) {
              c.identity_correlation = parse_bool("identity_correlation", v);
            },
            [](const RunConfig& c) { return std::string(c.identity_correlation ? "true" : "false"); }},
      COUNT_FIELD("n_per_group", n_per_group),
      REAL_FIELD("p_intra", p_intra),
      REAL_FIELD("p_inter", p_inter),
      COUNT_FIELD("ideal_d", ideal_d),
      COUNT_FIELD("ideal_steps", ideal_steps),
      REAL_FIELD("ideal_step_size", ideal_step_size),
      COUNT_FIELD("gradcheck_instances", gradcheck_instances),
      COUNT_FIELD("gradcheck_d", gradcheck_d),
      REAL_FIELD("gradcheck_h", gradcheck_h),
      REAL_FIELD("gradcheck_tol", gradcheck_tol),
  };
  return f;
}

#undef COUNT_FIELD
#undef REAL_FIELD

}  // namespace

void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value) {
  for (const auto& f : fields())
    if (key == f.key) {
      f.set(cfg, trim(value));
      return;
    }
  throw ConfigError("unknown configuration key: " + std::string(key));
}

void parse_config(std::istream& in, RunConfig& cfg) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected key = value", line_no);
    const std::string_view key = trim(s.substr(0, eq));
    if (key.empty()) throw ParseError("missing key before '='", line_no);
    try {
      set_config_value(cfg, key, s.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  RunConfig cfg;
  parse_config(in, cfg);
  return cfg;
}

void validate_config(const RunConfig& cfg) {
  const TrainConfig& t = cfg.train;
  if (t.d == 0) throw ConfigError("d must be >= 1");
  if (!(t.epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
  if (!(t.eta > 0.0 && t.eta < 0.5)) throw ConfigError("eta must lie in (0, 0.5)");
  if (!(t.step_size >= 0.0)) throw ConfigError("step_size must be >= 0");
  if (t.max_epochs == 0) throw ConfigError("max_epochs must be >= 1");
  if (t.patience == 0) throw ConfigError("patience must be >= 1");
  if (!(t.adam_beta1 >= 0.0 && t.adam_beta1 < 1.0 && t.adam_beta2 >= 0.0 && t.adam_beta2 < 1.0))
    throw ConfigError("adam betas must lie in [0, 1)");
  if (!(t.adam_epsilon > 0.0)) throw ConfigError("adam_epsilon must be > 0");
  const SplitRatios& s = cfg.splits;
  if (!(s.train > 0.0 && s.val > 0.0 && s.test > 0.0) ||
      std::abs(s.train + s.val + s.test - 1.0) > 1e-9)
    throw ConfigError("split ratios must be positive and sum to 1");
  if (cfg.samples == 0) throw ConfigError("samples must be >= 1");
  if (cfg.n_per_group < 2) throw ConfigError("n_per_group must be >= 2");
  if (!(cfg.p_intra > 0.0 && cfg.p_intra <= 1.0) || !(cfg.p_inter > 0.0 && cfg.p_inter <= 1.0))
    throw ConfigError("generator probabilities must lie in (0, 1]");
  if (cfg.ideal_d == 0) throw ConfigError("ideal_d must be >= 1");
  if (!(cfg.ideal_step_size > 0.0)) throw ConfigError("ideal_step_size must be > 0");
  if (cfg.gradcheck_d == 0 || cfg.gradcheck_d > 8) throw ConfigError("gradcheck_d must lie in [1, 8]");
  if (!(cfg.gradcheck_h > 0.0)) throw ConfigError("gradcheck_h must be > 0");
  if (!(cfg.gradcheck_tol > 0.0)) throw ConfigError("gradcheck_tol must be > 0");
}

std::vector<ConfigEntry> config_entries(const RunConfig& cfg) {
  std::vector<ConfigEntry> out;
  for (const auto& f : fields()) out.push_back({f.key, f.get(cfg), f.kind});
  return out;
}

}  // namespace signcop
