#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "signcop/config.hpp"
#include "signcop/copula.hpp"
#include "signcop/error.hpp"
#include "signcop/pipeline.hpp"
#include "signcop/train.hpp"

using namespace signcop;

namespace {

SignedGraph synthetic() { return preprocess(generate_two_community(20)); }

struct SmallInstance {
  SignedGraph g;
  ModelParams model;
  SmoothLabels labels;
};

SmallInstance small_instance(std::uint64_t seed, std::size_t d = 4) {
  SmallInstance s;
  s.g = resolve_reciprocal_conflicts(generate_two_community(5, 0.7, 0.5, seed));
  if (s.g.edges.size() > 30) s.g.edges.resize(30);
  s.model = init_model(s.g.node_count, d, 0.04, 0.05, seed);
  const double widen = std::sqrt(static_cast<double>(d));
  for (double& v : s.model.node_emb.values()) v *= widen;
  for (double& v : s.model.w1) v *= widen;
  for (double& v : s.model.w2) v *= widen;
  s.labels = smooth_labels(s.g.signs(), s.model.eta);
  return s;
}

double loss_at(const SmallInstance& s, const LossOptions& opt = {}) {
  return model_loss(s.model, s.g.edges, s.labels, opt).total;
}

}  // namespace

TEST(GradientCheck, PassesOnTwentyRandomInstances) {
  RunConfig cfg;
  cfg.gradcheck_instances = 20;
  for (std::uint64_t base : {0u, 1u, 99u}) {
    cfg.train.seed = base;
    const GradCheckSuite suite = gradcheck_suite(cfg);
    EXPECT_TRUE(suite.passed) << suite.worst_coordinate;
    EXPECT_LT(suite.max_rel_error, 1e-4);
    EXPECT_EQ(suite.untouched_nonzero, 0u);
  }
}

TEST(GradientCheck, IsolatedNodeHasExactlyZeroGradient) {
  SmallInstance s = small_instance(3);
  const std::size_t iso = s.g.node_count;
  s.g.node_count += 1;
  s.model = init_model(s.g.node_count, 4, 0.04, 0.05, 3);
  ModelGradient grad;
  model_loss(s.model, s.g.edges, s.labels, {}, &grad);
  for (double v : grad.node_emb.row(iso)) EXPECT_EQ(v, 0.0);
  GradCheckOptions opt;
  const GradCheckReport rep = gradient_check(s.model, s.g.edges, s.labels, opt);
  EXPECT_EQ(rep.untouched_nonzero, 0u);
  EXPECT_TRUE(rep.passed);
}

TEST(GradientCheck, PlantedDefectIsDetected) {
  RunConfig cfg;
  cfg.gradcheck_instances = 5;
  const GradCheckSuite suite = gradcheck_suite(cfg, 1.05);
  EXPECT_FALSE(suite.passed);
  EXPECT_GT(suite.max_rel_error, 1e-3);
  EXPECT_FALSE(suite.worst_coordinate.empty());
}

TEST(GradientCheck, CoversEveryProjectionCoordinate) {
  const SmallInstance s = small_instance(5);
  GradCheckOptions opt;
  opt.emb_samples = 10;
  const GradCheckReport rep = gradient_check(s.model, s.g.edges, s.labels, opt);
  EXPECT_EQ(rep.coordinates, 2 * s.model.dim() + 10);
}

TEST(GradientCheck, CentralDifferenceErrorShrinksQuadratically) {
  // e(2h) / e(h) ≈ 4 while truncation dominates rounding.
  const SmallInstance s = small_instance(7);
  ModelGradient grad;
  model_loss(s.model, s.g.edges, s.labels, {}, &grad);
  std::size_t checked = 0;
  for (std::size_t k = 0; k < s.model.dim(); ++k) {
    auto fd = [&](double h) {
      SmallInstance p = s;
      p.model.w2[k] += h;
      const double up = loss_at(p);
      p.model.w2[k] -= 2 * h;
      return (up - loss_at(p)) / (2 * h);
    };
    const double e1 = std::abs(fd(1e-3) - grad.w2[k]);
    const double e2 = std::abs(fd(2e-3) - grad.w2[k]);
    if (e1 < 1e-8) continue;  // third derivative too small to resolve
    EXPECT_NEAR(e2 / e1, 4.0, 0.2) << "w2[" << k << "]";
    ++checked;
  }
  EXPECT_GT(checked, 0u);
}

TEST(GradientCheck, CorrelationPathMatchesDenseFormula) {
  // ∂L/∂θ splits into the path through R and the paths through z and the
  // marginals. The first is ⟨dC/dR, ∂R/∂θ⟩ with dC/dR from the dense formula
  // and ∂R/∂θ by perturbing R directly; the rest is the derivative with R
  // frozen at its current value.
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const SmallInstance s = small_instance(seed + 20);
    ModelGradient grad;
    model_loss(s.model, s.g.edges, s.labels, {}, &grad);
    const Matrix q = edge_embed(s.model, s.g.edges);
    const CorrelationFactor frozen = build_factor(q, s.model.epsilon);
    const FactorView fv = frozen.view();
    LossOptions fixed;
    fixed.mode = CorrelationMode::Fixed;
    fixed.fixed = &fv;
    const LatentVector z = z_transform(s.labels, project_marginals(q, s.model.w1, s.model.w2));
    const Matrix G = grad_R_dense(z, dense_R(frozen));

    const double h = 1e-6;
    for (std::size_t node = 0; node < 3; ++node)
      for (std::size_t k = 0; k < s.model.dim(); ++k) {
        SmallInstance up = s, dn = s;
        up.model.node_emb(node, k) += h;
        dn.model.node_emb(node, k) -= h;
        const Matrix Rup = dense_R(build_factor(edge_embed(up.model, s.g.edges), s.model.epsilon));
        const Matrix Rdn = dense_R(build_factor(edge_embed(dn.model, s.g.edges), s.model.epsilon));
        double via_r = 0.0;
        for (std::size_t i = 0; i < G.rows(); ++i)
          for (std::size_t j = 0; j < G.cols(); ++j)
            via_r += G(i, j) * (Rup(i, j) - Rdn(i, j)) / (2 * h);
        const double rest = (loss_at(up, fixed) - loss_at(dn, fixed)) / (2 * h);
        const double analytic = grad.node_emb(node, k);
        EXPECT_LT(std::abs(via_r + rest - analytic) /
                      std::max({std::abs(analytic), std::abs(via_r + rest), 1e-4}),
                  1e-4)
            << "seed " << seed << " node " << node << " k " << k;
      }
  }
}

TEST(Train, LossStrictlyDecreasesEarly) {
  const SignedGraph g = synthetic();
  const EdgeSplit split = split_edges(g, {}, 1);
  TrainConfig cfg;
  cfg.d = 16;
  cfg.max_epochs = 21;
  cfg.patience = 1000;
  const TrainReport rep = train(g, split, cfg).report;
  ASSERT_GE(rep.loss_trace.size(), 21u);
  for (std::size_t k = 1; k < 21; ++k) EXPECT_LT(rep.loss_trace[k], rep.loss_trace[k - 1]) << k;
}

TEST(Train, ZeroStepSizeFreezesTheModel) {
  const SignedGraph g = synthetic();
  const EdgeSplit split = split_edges(g, {}, 2);
  TrainConfig cfg;
  cfg.d = 8;
  cfg.step_size = 0.0;
  cfg.max_epochs = 15;
  cfg.patience = 100;
  const TrainResult r = train(g, split, cfg);
  ASSERT_EQ(r.report.loss_trace.size(), 15u);
  for (double v : r.report.loss_trace) EXPECT_EQ(v, r.report.loss_trace.front());
  EXPECT_EQ(r.model, init_model(g.node_count, 8, cfg.epsilon, cfg.eta, cfg.seed));
}

TEST(Train, DeterministicAndNonIncreasing) {
  const SignedGraph g = synthetic();
  const EdgeSplit split = split_edges(g, {}, 3);
  TrainConfig cfg;
  cfg.d = 16;
  cfg.max_epochs = 200;
  cfg.seed = 5;
  const TrainResult a = train(g, split, cfg), b = train(g, split, cfg);
  EXPECT_EQ(a.report.loss_trace, b.report.loss_trace);
  EXPECT_EQ(a.model, b.model);
  for (std::size_t k = 1; k < a.report.loss_trace.size(); ++k)
    EXPECT_LE(a.report.loss_trace[k], a.report.loss_trace[k - 1]);
  EXPECT_EQ(a.report.loss_trace.size(), a.report.epochs_run);
  EXPECT_LE(a.report.epochs_to_converge, a.report.epochs_run);
  EXPECT_GE(a.report.epochs_to_converge, 1u);
  EXPECT_EQ(a.report.val_auc_trace.size(), a.report.epochs_run);
}

TEST(Train, LargeStepIsHalvedUntilAccepted) {
  const SignedGraph g = synthetic();
  const EdgeSplit split = split_edges(g, {}, 4);
  TrainConfig cfg;
  cfg.d = 16;
  cfg.step_size = 1e4;
  cfg.max_epochs = 10;
  const TrainReport rep = train(g, split, cfg).report;
  EXPECT_GT(rep.step_halvings, 0u);
  EXPECT_LT(rep.final_step_size, 1e4);
  for (std::size_t k = 1; k < rep.loss_trace.size(); ++k)
    EXPECT_LE(rep.loss_trace[k], rep.loss_trace[k - 1]);
}

TEST(Train, IdentityAndAdamVariantsRun) {
  const SignedGraph g = synthetic();
  const EdgeSplit split = split_edges(g, {}, 5);
  TrainConfig cfg;
  cfg.d = 8;
  cfg.max_epochs = 30;
  cfg.correlation = CorrelationMode::Identity;
  EXPECT_GT(train(g, split, cfg).report.epochs_run, 0u);
  cfg.correlation = CorrelationMode::Gramian;
  cfg.optimizer = Optimizer::Adam;
  cfg.step_size = 0.03;
  const TrainReport rep = train(g, split, cfg).report;
  EXPECT_LT(rep.loss_trace.back(), rep.loss_trace.front());
}

TEST(Train, Errors) {
  const SignedGraph g = synthetic();
  const EdgeSplit split = split_edges(g, {}, 6);
  TrainConfig cfg;
  cfg.eta = 0.5;
  EXPECT_THROW(train(g, split, cfg), ConfigError);
  cfg = {};
  cfg.d = 0;
  EXPECT_THROW(train(g, split, cfg), ConfigError);
  cfg = {};
  cfg.correlation = CorrelationMode::Fixed;
  EXPECT_THROW(train(g, split, cfg), ConfigError);
  EdgeSplit no_val = split;
  no_val.m_train += no_val.m_val;
  no_val.m_val = 0;
  EXPECT_THROW(train(g, no_val, TrainConfig{}), ConfigError);
}

TEST(Arrange, FollowsSplitOrder) {
  const SignedGraph g = synthetic();
  const EdgeSplit split = split_edges(g, {}, 7);
  const SignedGraph a = arrange(g, split);
  ASSERT_EQ(a.edges.size(), g.edges.size());
  for (std::size_t i = 0; i < a.edges.size(); ++i) EXPECT_EQ(a.edges[i], g.edges[split.edge_order[i]]);
}

TEST(ConvergenceRate, GeometricTrace) {
  std::vector<double> trace;
  for (int k = 0; k < 200; ++k) trace.push_back(2.0 * std::pow(0.9, k));
  const auto fit = fit_convergence_rate(trace);
  ASSERT_TRUE(fit.has_value());
  EXPECT_NEAR(fit->rate, 0.9, 1e-3);
  EXPECT_GT(fit->r_squared, 0.999);
  EXPECT_LT(fit->window_begin, fit->window_end);
  EXPECT_GE(fit->window_end - fit->window_begin, 5u);
}

TEST(ConvergenceRate, ShiftedGeometricTrace) {
  std::vector<double> trace;
  for (int k = 0; k < 60; ++k) trace.push_back(37.5 + 4.0 * std::pow(0.7, k));
  const auto fit = fit_convergence_rate(trace);
  ASSERT_TRUE(fit.has_value());
  EXPECT_NEAR(fit->rate, 0.7, 1e-3);
}

TEST(ConvergenceRate, DegenerateTraces) {
  EXPECT_FALSE(fit_convergence_rate(std::vector<double>(50, 3.0)).has_value());
  EXPECT_FALSE(fit_convergence_rate(std::vector<double>{5, 4, 3, 2, 1}).has_value());
  std::vector<double> rising;
  for (int k = 0; k < 30; ++k) rising.push_back(k);
  EXPECT_FALSE(fit_convergence_rate(rising).has_value());
}

TEST(ConvergenceRate, SyntheticTrainingIsLinear) {
  const SignedGraph g = synthetic();
  TrainConfig cfg;
  cfg.max_epochs = 300;
  cfg.patience = 1000;
  const TrainReport rep = train(g, split_edges(g, {}, 8), cfg).report;
  ASSERT_TRUE(rep.fitted_rate.has_value());
  EXPECT_GT(*rep.fitted_rate, 0.0);
  EXPECT_LT(*rep.fitted_rate, 1.0);
  EXPECT_GE(*rep.fitted_rate_r2, 0.9);
}
