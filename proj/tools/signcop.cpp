// Command-line entry point. Each subcommand prints one JSON document to
// --out or stdout on success and exits 0; on error it prints a message to
// stderr and exits 1 without emitting JSON. gradcheck exits 3 when the
// check itself fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "signcop/config.hpp"
#include "signcop/error.hpp"
#include "signcop/graph.hpp"
#include "signcop/kernels.hpp"
#include "signcop/pipeline.hpp"

using nlohmann::ordered_json;
using namespace signcop;

namespace {

struct CommonFlags {
  std::string data;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> repeats;
  std::string out;
  bool identity = false;
  std::string inference_mode;
  std::vector<std::string> sets;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool needs_data) {
  auto* data = cmd->add_option("--data", f.data, "Edge-list file (src dst sign per line)");
  if (needs_data) data->required();
  cmd->add_option("--config", f.config, "key = value configuration file");
  cmd->add_option("--seed", f.seed, "Base seed");
  cmd->add_option("--repeats", f.repeats, "Number of independently seeded splits");
  cmd->add_option("--out", f.out, "Output path (default stdout)");
  cmd->add_flag("--identity-correlation", f.identity, "Replace R by the identity (ablation)");
  cmd->add_option("--inference-mode", f.inference_mode, "Conditional mean or joint sampling")
      ->check(CLI::IsMember({"mean", "sample"}));
  cmd->add_option("--set", f.sets, "Override any configuration key: --set key=value");
}

RunConfig effective_config(const CommonFlags& f) {
  RunConfig cfg = f.config.empty() ? RunConfig{} : load_config(f.config);
  for (const auto& kv : f.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (f.seed) cfg.train.seed = *f.seed;
  if (f.repeats) cfg.repeats = *f.repeats;
  if (f.identity) cfg.identity_correlation = true;
  if (!f.inference_mode.empty()) set_config_value(cfg, "inference_mode", f.inference_mode);
  validate_config(cfg);
  return cfg;
}

ordered_json config_json(const RunConfig& cfg) {
  ordered_json j = ordered_json::object();
  for (const auto& e : config_entries(cfg)) {
    switch (e.kind) {
      case ValueKind::Integer: j[e.key] = std::stoull(e.value); break;
      case ValueKind::Real: j[e.key] = std::stod(e.value); break;
      case ValueKind::Boolean: j[e.key] = e.value == "true"; break;
      case ValueKind::Text: j[e.key] = e.value; break;
    }
  }
  return j;
}

ordered_json opt_json(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json finite_json(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

ordered_json summary_json(const EvalSummary& s) {
  ordered_json j;
  j["node_count"] = s.node_count;
  j["edge_count"] = s.edge_count;
  j["mean_auc"] = opt_json(s.mean_auc);
  j["mean_f1"] = s.mean_f1;
  j["mean_epochs_to_converge"] = s.mean_epochs_to_converge;
  j["mean_fitted_rate"] = opt_json(s.mean_fitted_rate);
  j["total_seconds"] = s.total_seconds;
  ordered_json runs = ordered_json::array();
  for (const auto& r : s.runs) {
    ordered_json jr;
    jr["repeat"] = r.repeat;
    jr["seed"] = r.seed;
    jr["m_train"] = r.m_train;
    jr["m_val"] = r.m_val;
    jr["m_test"] = r.m_test;
    jr["auc"] = opt_json(r.test_auc);
    jr["f1"] = r.test_f1;
    jr["epochs_to_converge"] = r.report.epochs_to_converge;
    jr["epochs_run"] = r.report.epochs_run;
    jr["stop_reason"] = r.report.stop_reason;
    jr["best_val_auc"] = finite_json(r.report.best_val_auc);
    jr["best_val_f1"] = r.report.best_val_f1;
    jr["final_loss"] = r.final_loss;
    jr["final_step_size"] = r.report.final_step_size;
    jr["fitted_rate"] = opt_json(r.report.fitted_rate);
    jr["fitted_rate_r2"] = opt_json(r.report.fitted_rate_r2);
    jr["train_seconds"] = r.train_seconds;
    jr["infer_seconds"] = r.infer_seconds;
    runs.push_back(std::move(jr));
  }
  j["runs"] = std::move(runs);
  return j;
}

SignedGraph load_graph(const std::string& path) { return preprocess(load_edge_list(path)); }

void emit(const ordered_json& j, const std::string& out) {
  const std::string text = j.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out);
  if (!f) throw Error("cannot open " + out + " for writing");
  f << text;
  if (!f) throw Error("write failed: " + out);
}

ordered_json header(const char* command, const RunConfig& cfg) {
  ordered_json j;
  j["command"] = command;
  j["kernels"] = std::string(kernels::backend_name(kernels::active_backend()));
  j["config"] = config_json(cfg);
  return j;
}

std::vector<double> parse_values(const std::string& list) {
  std::vector<double> out;
  std::stringstream ss(list);
  for (std::string item; std::getline(ss, item, ',');) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &pos);
    } catch (const std::exception&) {
      throw ConfigError("--values: cannot parse '" + item + "'");
    }
    if (item.find_first_not_of(" \t", pos) != std::string::npos)
      throw ConfigError("--values: cannot parse '" + item + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Copula-based link sign prediction on signed graphs"};
  app.require_subcommand(1);

  CommonFlags synth_f, eval_f, sweep_f, ideal_f, grad_f;

  auto* synth = app.add_subcommand("synth", "Write a two-community synthetic signed graph");
  add_common(synth, synth_f, false);
  std::optional<std::size_t> n_per_group;
  synth->add_option("--n-per-group", n_per_group, "Nodes per community");

  auto* eval = app.add_subcommand("train-eval", "Train and evaluate over repeated splits");
  add_common(eval, eval_f, true);
  std::string predictions_path;
  eval->add_option("--predictions", predictions_path,
                   "Write test predictions of every repeat as `src dst score label`");

  auto* sweep = app.add_subcommand("sweep", "train-eval once per value of one hyperparameter");
  add_common(sweep, sweep_f, false);  // --data may be omitted for an empty list
  std::string sweep_param, sweep_values;
  sweep->add_option("--param", sweep_param, "Hyperparameter to vary")
      ->required()
      ->check(CLI::IsMember({"eta", "epsilon", "d"}));
  sweep->add_option("--values", sweep_values, "Comma-separated values (may be empty)")
      ->required();

  auto* ideal = app.add_subcommand("ideal-corr", "Evaluate with a fitted ideal correlation");
  add_common(ideal, ideal_f, true);
  std::optional<std::size_t> ideal_d;
  ideal->add_option("--d", ideal_d, "Rank of the fitted factor");

  auto* grad = app.add_subcommand("gradcheck", "Finite-difference check of the loss gradient");
  add_common(grad, grad_f, false);
  bool mutate = false;
  grad->add_flag("--mutate", mutate, "Perturb the log-determinant gradient (self-test)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*synth) {
      RunConfig cfg = effective_config(synth_f);
      if (n_per_group) cfg.n_per_group = *n_per_group;
      validate_config(cfg);
      const SignedGraph g =
          generate_two_community(cfg.n_per_group, cfg.p_intra, cfg.p_inter, cfg.train.seed);
      if (synth_f.out.empty()) {
        write_edge_list(std::cout, g);
      } else {
        save_edge_list(synth_f.out, g);
        std::size_t pos = 0;
        for (const auto& e : g.edges) pos += e.sign > 0;
        ordered_json j = header("synth", cfg);
        j["path"] = synth_f.out;
        j["node_count"] = g.node_count;
        j["edge_count"] = g.edge_count();
        j["positive_edges"] = pos;
        j["negative_edges"] = g.edge_count() - pos;
        std::cout << j.dump(2) << "\n";
      }
      return 0;
    }
    if (*eval) {
      const RunConfig cfg = effective_config(eval_f);
      const SignedGraph g = load_graph(eval_f.data);
      const EvalSummary s = train_eval(g, cfg);
      if (!predictions_path.empty()) {
        std::ofstream out(predictions_path);
        if (!out) throw Error("cannot open " + predictions_path + " for writing");
        for (const auto& r : s.runs) {
          out << "# repeat " << r.repeat << " seed " << r.seed << '\n';
          write_predictions(out, r.test_edges, r.test_prediction);
        }
      }
      ordered_json j = header("train-eval", cfg);
      j["data"] = eval_f.data;
      j["result"] = summary_json(s);
      emit(j, eval_f.out);
      return 0;
    }
    if (*sweep) {
      const RunConfig base = effective_config(sweep_f);
      const std::vector<double> values = parse_values(sweep_values);
      if (!values.empty() && sweep_f.data.empty()) throw ConfigError("sweep: --data is required");
      const SignedGraph g = values.empty() ? SignedGraph{} : load_graph(sweep_f.data);
      ordered_json j = header("sweep", base);
      j["data"] = sweep_f.data;
      j["param"] = sweep_param;
      ordered_json rows = ordered_json::array();
      for (double v : values) {
        RunConfig cfg = base;
        if (sweep_param == "d") {
          if (v < 1 || v != std::floor(v)) throw ConfigError("sweep: d values must be positive integers");
          cfg.train.d = static_cast<std::size_t>(v);
        } else if (sweep_param == "eta") {
          cfg.train.eta = v;
        } else {
          cfg.train.epsilon = v;
        }
        validate_config(cfg);
        ordered_json row;
        row["value"] = v;
        row["result"] = summary_json(train_eval(g, cfg));
        rows.push_back(std::move(row));
      }
      j["rows"] = std::move(rows);
      emit(j, sweep_f.out);
      return 0;
    }
    if (*ideal) {
      RunConfig cfg = effective_config(ideal_f);
      if (ideal_d) cfg.ideal_d = *ideal_d;
      validate_config(cfg);
      const SignedGraph g = load_graph(ideal_f.data);
      const IdealCorrResult r = ideal_corr(g, cfg);
      ordered_json j = header("ideal-corr", cfg);
      j["data"] = ideal_f.data;
      j["fit"] = {{"d", cfg.ideal_d},
                  {"initial_objective", r.initial_objective},
                  {"final_objective", r.final_objective},
                  {"steps", r.fit_steps},
                  {"fit_seconds", r.fit_seconds}};
      j["result"] = summary_json(r.eval);
      emit(j, ideal_f.out);
      return 0;
    }
    if (*grad) {
      const RunConfig cfg = effective_config(grad_f);
      const GradCheckSuite s = gradcheck_suite(cfg, mutate ? 1.05 : 1.0);
      ordered_json j = header("gradcheck", cfg);
      j["mutated"] = mutate;
      j["instances"] = s.instances;
      j["max_rel_error"] = s.max_rel_error;
      j["tolerance"] = cfg.gradcheck_tol;
      j["worst_instance"] = s.worst_instance;
      j["worst_coordinate"] = s.worst_coordinate;
      j["worst_analytic"] = s.worst_analytic;
      j["worst_numeric"] = s.worst_numeric;
      j["untouched_nonzero"] = s.untouched_nonzero;
      j["passed"] = s.passed;
      emit(j, grad_f.out);
      std::cerr << (s.passed ? "gradcheck passed" : "gradcheck FAILED") << ": max relative error "
                << s.max_rel_error << " at " << s.worst_coordinate << " (instance "
                << s.worst_instance << ")\n";
      return s.passed ? 0 : 3;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
