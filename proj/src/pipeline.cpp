#include "signcop/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "signcop/error.hpp"
#include "signcop/metrics.hpp"
#include "signcop/rng.hpp"

namespace signcop {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

EvalSummary run_repeats(const SignedGraph& g, const RunConfig& cfg, CorrelationMode mode,
                        const CorrelationFactor* fixed) {
  validate_config(cfg);
  const auto t0 = Clock::now();
  EvalSummary s;
  s.node_count = g.node_count;
  s.edge_count = g.edge_count();
  double auc_sum = 0.0, rate_sum = 0.0, f1_sum = 0.0, ep_sum = 0.0;
  std::size_t auc_n = 0, rate_n = 0;
  for (std::size_t r = 0; r < cfg.repeats; ++r) {
    s.runs.push_back(run_once(g, cfg, r, mode, fixed));
    const RunResult& run = s.runs.back();
    if (run.test_auc) {
      auc_sum += *run.test_auc;
      ++auc_n;
    }
    if (run.report.fitted_rate) {
      rate_sum += *run.report.fitted_rate;
      ++rate_n;
    }
    f1_sum += run.test_f1;
    ep_sum += static_cast<double>(run.report.epochs_to_converge);
  }
  if (cfg.repeats > 0) {
    const double n = static_cast<double>(cfg.repeats);
    s.mean_f1 = f1_sum / n;
    s.mean_epochs_to_converge = ep_sum / n;
  }
  if (auc_n) s.mean_auc = auc_sum / static_cast<double>(auc_n);
  if (rate_n) s.mean_fitted_rate = rate_sum / static_cast<double>(rate_n);
  s.total_seconds = seconds_since(t0);
  return s;
}

}  // namespace

std::uint64_t repeat_seed(std::uint64_t base, std::size_t repeat) {
  return derive_seed(base, repeat);
}

RunResult run_once(const SignedGraph& g, const RunConfig& cfg, std::size_t repeat,
                   CorrelationMode mode, const CorrelationFactor* fixed) {
  RunResult run;
  run.repeat = repeat;
  run.seed = repeat_seed(cfg.train.seed, repeat);
  const EdgeSplit split = split_edges(g, cfg.splits, derive_seed(run.seed, 1));
  run.m_train = split.m_train;
  run.m_val = split.m_val;
  run.m_test = split.m_test;

  TrainConfig tc = cfg.train;
  tc.seed = derive_seed(run.seed, 2);
  tc.correlation = mode;
  CorrelationFactor arranged_fixed;
  const CorrelationFactor* fixed_ptr = nullptr;
  if (mode == CorrelationMode::Fixed) {
    if (!fixed) throw ConfigError("fixed correlation mode needs a factor");
    arranged_fixed = permute_rows(*fixed, split.edge_order);
    fixed_ptr = &arranged_fixed;
  }

  const auto t_train = Clock::now();
  TrainResult tr = train(g, split, tc, fixed_ptr);
  run.train_seconds = seconds_since(t_train);
  run.report = std::move(tr.report);
  run.final_loss = run.report.loss_trace.empty() ? 0.0 : run.report.loss_trace.back();

  const auto t_infer = Clock::now();
  const SignedGraph arranged = arrange(g, split);
  PredictOptions popt;
  popt.mode = cfg.inference_mode;
  popt.samples = cfg.samples;
  popt.seed = derive_seed(run.seed, 3);
  const std::size_t begin = split.m_train + split.m_val;
  run.test_prediction =
      predict_edges(tr.model, arranged, split.m_train, begin, split.m_test, mode, fixed_ptr, popt);
  run.infer_seconds = seconds_since(t_infer);

  run.test_edges.assign(arranged.edges.begin() + static_cast<std::ptrdiff_t>(begin),
                        arranged.edges.end());
  std::vector<int> truth;
  for (const auto& e : run.test_edges) truth.push_back(e.sign);
  run.test_f1 = macro_f1(run.test_prediction.labels, truth);
  const bool two_class = std::count(truth.begin(), truth.end(), 1) > 0 &&
                         std::count(truth.begin(), truth.end(), -1) > 0;
  if (two_class) run.test_auc = auc(run.test_prediction.scores, truth);
  return run;
}

EvalSummary train_eval(const SignedGraph& g, const RunConfig& cfg) {
  return run_repeats(g, cfg, cfg.identity_correlation ? CorrelationMode::Identity
                                                      : CorrelationMode::Gramian,
                     nullptr);
}

IdealCorrResult ideal_corr(const SignedGraph& g, const RunConfig& cfg) {
  validate_config(cfg);
  if (g.edge_count() < 3) throw Error("ideal correlation needs at least 3 edges");
  IdealCorrResult out;
  const auto t0 = Clock::now();
  NearestFactorOptions opt;
  opt.d = cfg.ideal_d;
  opt.epsilon = cfg.train.epsilon;
  opt.steps = cfg.ideal_steps;
  opt.step_size = cfg.ideal_step_size;
  opt.seed = derive_seed(cfg.train.seed, 0x1dea1);
  const NearestFactorFit fit = fit_nearest_factor(ideal_correlation(g), opt);
  out.initial_objective = fit.initial_objective;
  out.final_objective = fit.final_objective;
  out.fit_steps = fit.steps_taken;
  out.fit_seconds = seconds_since(t0);
  const CorrelationFactor factor = build_factor(fit.Q, cfg.train.epsilon);
  out.eval = run_repeats(g, cfg, CorrelationMode::Fixed, &factor);
  return out;
}

GradCheckSuite gradcheck_suite(const RunConfig& cfg, double logdet_gradient_scale) {
  validate_config(cfg);
  GradCheckSuite suite;
  suite.instances = cfg.gradcheck_instances;
  suite.passed = true;
  for (std::size_t i = 0; i < cfg.gradcheck_instances; ++i) {
    const std::uint64_t seed = derive_seed(cfg.train.seed, 0xc4ec0000 + i);
    Rng rng(seed);
    const std::size_t group = 4 + rng.below(4);
    SignedGraph g = generate_two_community(group, 0.7, 0.5, seed);
    g = resolve_reciprocal_conflicts(g);
    if (g.edges.size() > 50) g.edges.resize(50);
    // One node that no edge touches.
    g.node_count += 1;

    const double eta = 0.01 + 0.2 * rng.uniform();
    ModelParams model = init_model(g.node_count, cfg.gradcheck_d, cfg.train.epsilon, eta, seed);
    // Unit-scale entries make the correlation terms non-negligible.
    const double widen = std::sqrt(static_cast<double>(cfg.gradcheck_d));
    for (double& v : model.node_emb.values()) v *= widen;
    for (double& v : model.w1) v *= widen;
    for (double& v : model.w2) v *= widen;

    const SmoothLabels labels = smooth_labels(g.signs(), eta);
    GradCheckOptions opt;
    opt.h = cfg.gradcheck_h;
    opt.tol = cfg.gradcheck_tol;
    opt.seed = seed;
    opt.loss.logdet_gradient_scale = logdet_gradient_scale;
    const GradCheckReport rep = gradient_check(model, g.edges, labels, opt);
    suite.untouched_nonzero += rep.untouched_nonzero;
    if (rep.max_rel_error > suite.max_rel_error || suite.worst_coordinate.empty()) {
      suite.max_rel_error = rep.max_rel_error;
      suite.worst_coordinate = rep.worst_coordinate;
      suite.worst_instance = i;
      suite.worst_analytic = rep.worst_analytic;
      suite.worst_numeric = rep.worst_numeric;
    }
    suite.passed = suite.passed && rep.passed;
  }
  return suite;
}

}  // namespace signcop
