#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "signcop/error.hpp"
#include "signcop/model.hpp"

using namespace signcop;

TEST(InitModel, ShapesAndDeterminism) {
  const ModelParams a = init_model(30, 8, 0.04, 0.01, 11);
  EXPECT_EQ(a.node_emb.rows(), 30u);
  EXPECT_EQ(a.node_emb.cols(), 8u);
  EXPECT_EQ(a.w1.size(), 8u);
  EXPECT_EQ(a.w2.size(), 8u);
  EXPECT_EQ(a, init_model(30, 8, 0.04, 0.01, 11));
  EXPECT_NE(a, init_model(30, 8, 0.04, 0.01, 12));
  EXPECT_NO_THROW(a.validate());
}

TEST(InitModel, VarianceIsOneOverD) {
  const std::size_t d = 64;
  const ModelParams m = init_model(2000, d, 0.04, 0.01, 1);
  double s = 0, ss = 0;
  for (double v : m.node_emb.values()) {
    s += v;
    ss += v * v;
  }
  const double n = static_cast<double>(m.node_emb.size());
  EXPECT_NEAR(s / n, 0.0, 4.0 / std::sqrt(n * d));
  EXPECT_NEAR(ss / n, 1.0 / d, 0.05 / d);
}

TEST(InitModel, Errors) {
  EXPECT_THROW(init_model(3, 0, 0.04, 0.01, 0), Error);
  EXPECT_THROW(init_model(3, 2, 0.0, 0.01, 0), Error);
  EXPECT_THROW(init_model(3, 2, 0.04, 0.6, 0), Error);
}

TEST(ModelParams, ValidateCatchesCorruption) {
  ModelParams m = init_model(4, 3, 0.04, 0.01, 0);
  m.w1.push_back(0.0);
  EXPECT_THROW(m.validate(), DimensionError);
  m = init_model(4, 3, 0.04, 0.01, 0);
  m.node_emb(1, 1) = NAN;
  EXPECT_THROW(m.validate(), DomainError);
  m = init_model(4, 3, 0.04, 0.01, 0);
  m.eta = 0.5;
  EXPECT_THROW(m.validate(), DomainError);
}

TEST(EdgeEmbed, HadamardOfEndpoints) {
  Matrix emb(3, 2);
  emb(0, 0) = 1; emb(0, 1) = 2;
  emb(1, 0) = 3; emb(1, 1) = -1;
  emb(2, 0) = 0.5; emb(2, 1) = 4;
  const std::vector<SignedEdge> e{{0, 1, 1}, {1, 2, -1}};
  const Matrix q = edge_embed(emb, e);
  EXPECT_EQ(q(0, 0), 3.0);
  EXPECT_EQ(q(0, 1), -2.0);
  EXPECT_EQ(q(1, 0), 1.5);
  EXPECT_EQ(q(1, 1), -4.0);
  EXPECT_THROW(edge_embed(emb, std::vector<SignedEdge>{{0, 3, 1}}), DimensionError);
}

TEST(ProjectMarginals, ExpAndSigmoid) {
  Matrix q(2, 2);
  q(0, 0) = 1; q(0, 1) = 0;
  q(1, 0) = -1; q(1, 1) = 2;
  const std::vector<double> w1{0.5, 1.0}, w2{2.0, -1.0};
  const MarginalParams p = project_marginals(q, w1, w2);
  EXPECT_NEAR(p.a[0], std::exp(0.5), 1e-15);
  EXPECT_NEAR(p.a[1], std::exp(1.5), 1e-15);
  EXPECT_NEAR(p.t[0], 1 / (1 + std::exp(-2.0)), 1e-15);
  EXPECT_NEAR(p.t[1], 1 / (1 + std::exp(4.0)), 1e-15);
  EXPECT_THROW(project_marginals(q, std::vector<double>{1.0}, w2), DimensionError);
}

TEST(ModelLoss, ModesAgreeWithDirectEvaluation) {
  const SignedGraph g = preprocess(generate_two_community(5, 0.8, 0.4, 2));
  const ModelParams m = init_model(g.node_count, 6, 0.04, 0.01, 3);
  const SmoothLabels l = smooth_labels(g.signs(), m.eta);
  const Matrix q = edge_embed(m, g.edges);
  const MarginalParams p = project_marginals(q, m.w1, m.w2);

  const LossValue gram = model_loss(m, g.edges, l, {});
  EXPECT_NEAR(gram.total, nll_loss(l, p, build_factor(q, m.epsilon)).total, 1e-12);

  LossOptions ident;
  ident.mode = CorrelationMode::Identity;
  const LossValue iv = model_loss(m, g.edges, l, ident);
  EXPECT_NEAR(iv.total, nll_loss(l, p, identity_factor(q.rows(), 6)).total, 1e-12);

  const CorrelationFactor fixed = oracle::random_factor(g.edge_count(), 3, 0.1, 1.0, 1);
  const FactorView fv = fixed.view();
  LossOptions fo;
  fo.mode = CorrelationMode::Fixed;
  fo.fixed = &fv;
  EXPECT_NEAR(model_loss(m, g.edges, l, fo).total, nll_loss(l, p, fixed).total, 1e-12);
  fo.fixed = nullptr;
  EXPECT_THROW(model_loss(m, g.edges, l, fo), Error);
}

TEST(EmbeddingTable, BackwardAccumulates) {
  Matrix t(2, 2, 1.0);
  EmbeddingTable enc(t);
  EXPECT_EQ(&enc.representations(), &t);
  EXPECT_EQ(enc.parameters().size(), 4u);
  Matrix g(2, 2, 0.5);
  std::vector<double> acc(4, 1.0);
  enc.backward(g, acc);
  for (double v : acc) EXPECT_EQ(v, 1.5);
}

TEST(Checkpoint, BitwiseRoundTrip) {
  ModelParams m = init_model(9, 5, 0.037, 0.013, 21);
  m.w1[0] = 1.0 / 3.0;
  m.node_emb(2, 3) = -1e-300;
  std::stringstream ss;
  write_checkpoint(ss, m, {42, 77});
  CheckpointMeta meta;
  const ModelParams r = read_checkpoint(ss, &meta);
  EXPECT_EQ(r, m);
  EXPECT_EQ(meta.edge_count, 42u);
  EXPECT_EQ(meta.seed, 77u);
  EXPECT_EQ(ss.str().rfind("signcop-model", 0), 0u);
}

TEST(Checkpoint, MalformedInput) {
  std::stringstream wrong("not-a-model 1 1 1 0.04 0.01 0\n");
  EXPECT_THROW(read_checkpoint(wrong), ParseError);
  std::stringstream truncated("signcop-model 1 2 2 0.04 0.01 0\n0.1 0.2\n");
  EXPECT_THROW(read_checkpoint(truncated), ParseError);
  EXPECT_THROW(load_checkpoint("/nonexistent/model.txt"), Error);
}
