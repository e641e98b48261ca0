#pragma once

// Maximum-likelihood training of the model on the observed edges of a
// split, with validation-based early stopping, finite-difference gradient
// checking and the empirical linear-convergence fit.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "signcop/correlation.hpp"
#include "signcop/graph.hpp"
#include "signcop/infer.hpp"
#include "signcop/model.hpp"

namespace signcop {

enum class Optimizer { GradientDescent, Adam };

struct TrainConfig {
  std::size_t d = 64;
  double epsilon = kDefaultEpsilon;
  double eta = 0.01;
  // Gradient descent moves by step_size · ∇L / m for m observed edges.
  double step_size = 1.0;
  std::size_t max_epochs = 1000;
  std::size_t patience = 50;
  std::uint64_t seed = 0;
  std::size_t max_halvings = 10;
  Optimizer optimizer = Optimizer::GradientDescent;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  CorrelationMode correlation = CorrelationMode::Gramian;
};

struct TrainReport {
  // loss_trace[k] is the loss at the start of epoch k + 1.
  std::vector<double> loss_trace;
  std::vector<double> val_auc_trace;  // NaN where validation is single-class
  std::vector<double> val_f1_trace;
  std::size_t epochs_run = 0;
  // 1-based epoch with the best validation (AUC, then macro-F1).
  std::size_t epochs_to_converge = 0;
  std::optional<double> fitted_rate;
  std::optional<double> fitted_rate_r2;
  double best_val_auc = 0.0;
  double best_val_f1 = 0.0;
  double final_step_size = 0.0;
  std::size_t step_halvings = 0;
  std::string stop_reason;
};

struct TrainResult {
  ModelParams model;  // parameters after the last epoch
  TrainReport report;
};

// Edges of `g` in split order: train, then validation, then test.
SignedGraph arrange(const SignedGraph& g, const EdgeSplit& split);

// `fixed`, if given, is a factor over all edges in split order and is
// required by CorrelationMode::Fixed. Throws ConfigError for invalid
// settings and NumericalError (naming the offending loss term) if the loss
// becomes non-finite.
TrainResult train(const SignedGraph& g, const EdgeSplit& split, const TrainConfig& cfg,
                  const CorrelationFactor* fixed = nullptr);

// Predicts rows [begin, begin + count) of `arranged` conditioned on the
// first m_observed rows (begin ≥ m_observed).
Prediction predict_edges(const ModelParams& model, const SignedGraph& arranged,
                         std::size_t m_observed, std::size_t begin, std::size_t count,
                         CorrelationMode mode, const CorrelationFactor* fixed,
                         const PredictOptions& opt = {});

struct GradCheckOptions {
  double h = 1e-5;
  double tol = 1e-4;
  // Relative error is |a − f| / max(|a|, |f|, floor).
  double floor = 1e-4;
  std::size_t emb_samples = 48;
  std::uint64_t seed = 0;
  LossOptions loss;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst_coordinate;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t coordinates = 0;
  // Coordinates of nodes no observed edge touches whose analytic gradient
  // is not exactly zero.
  std::size_t untouched_nonzero = 0;
  bool passed = false;
};

// Central differences of model_loss for every coordinate of w1 and w2 and a
// seeded sample of node_emb coordinates.
GradCheckReport gradient_check(const ModelParams& model, std::span<const SignedEdge> observed,
                               const SmoothLabels& labels, const GradCheckOptions& opt);

struct RateFit {
  double rate = 0.0;
  double r_squared = 0.0;
  std::size_t window_begin = 0;  // [begin, end) indices into the trace
  std::size_t window_end = 0;
};

// Least-squares fit of log(L_k − L̂*) against k with L̂* = min L − 1e-6.
// Points whose gap has fallen below 1% of the initial gap are dropped, as
// that tail is dominated by the offset; the fit uses the final half of what
// remains, which must hold at least 5 points. Returns nullopt for traces
// shorter than 10 or when exp(slope) ∉ (0, 1).
std::optional<RateFit> fit_convergence_rate(std::span<const double> loss_trace);

}  // namespace signcop
