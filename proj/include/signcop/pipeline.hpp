#pragma once

// End-to-end protocol: preprocess → split → train → infer → metrics,
// repeated over independently seeded splits.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "signcop/config.hpp"
#include "signcop/correlation.hpp"
#include "signcop/graph.hpp"
#include "signcop/infer.hpp"
#include "signcop/train.hpp"

namespace signcop {

struct RunResult {
  std::size_t repeat = 0;
  std::uint64_t seed = 0;
  std::size_t m_train = 0, m_val = 0, m_test = 0;
  std::optional<double> test_auc;  // absent if the test split is single-class
  double test_f1 = 0.0;
  TrainReport report;
  double final_loss = 0.0;
  double train_seconds = 0.0;
  double infer_seconds = 0.0;
  std::vector<SignedEdge> test_edges;
  Prediction test_prediction;
};

struct EvalSummary {
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  std::vector<RunResult> runs;
  std::optional<double> mean_auc;  // over runs with a defined AUC
  double mean_f1 = 0.0;
  double mean_epochs_to_converge = 0.0;
  std::optional<double> mean_fitted_rate;  // over runs with a fitted rate
  double total_seconds = 0.0;
};

// Seed of repeat r under base seed s; split, initialization and sampling
// streams are derived from it.
std::uint64_t repeat_seed(std::uint64_t base, std::size_t repeat);

// `fixed`, for CorrelationMode::Fixed, is a factor over g's edges in g's
// order; it is permuted into each split's order.
RunResult run_once(const SignedGraph& g, const RunConfig& cfg, std::size_t repeat,
                   CorrelationMode mode, const CorrelationFactor* fixed = nullptr);

// `g` must already be preprocessed. Runs cfg.repeats repeats; the
// correlation mode follows cfg.identity_correlation.
EvalSummary train_eval(const SignedGraph& g, const RunConfig& cfg);

struct IdealCorrResult {
  double initial_objective = 0.0;
  double final_objective = 0.0;
  std::size_t fit_steps = 0;
  double fit_seconds = 0.0;
  EvalSummary eval;
};

// Fits a rank-cfg.ideal_d factor to the ideal correlation of all edges of
// the preprocessed graph once, freezes it and trains the marginal model on
// top. Throws Error for fewer than 3 edges.
IdealCorrResult ideal_corr(const SignedGraph& g, const RunConfig& cfg);

struct GradCheckSuite {
  std::size_t instances = 0;
  double max_rel_error = 0.0;
  std::string worst_coordinate;
  std::size_t worst_instance = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t untouched_nonzero = 0;
  bool passed = false;
};

// Random small instances (at most 50 observed edges, d = cfg.gradcheck_d,
// one isolated node each). `logdet_gradient_scale` ≠ 1 plants a defect.
GradCheckSuite gradcheck_suite(const RunConfig& cfg, double logdet_gradient_scale = 1.0);

}  // namespace signcop
