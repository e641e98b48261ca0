#pragma once

// The learnable model: node representations → edge embeddings
// Q_i = h(src_i) ⊙ h(dst_i) → marginals a = exp(Qw₁), t = sigmoid(Qw₂) and
// the Gramian correlation factor of Q.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "signcop/copula.hpp"
#include "signcop/correlation.hpp"
#include "signcop/graph.hpp"
#include "signcop/marginal.hpp"
#include "signcop/matrix.hpp"

namespace signcop {

struct ModelParams {
  Matrix node_emb;  // |V| × d
  std::vector<double> w1;
  std::vector<double> w2;
  double epsilon = kDefaultEpsilon;
  double eta = 0.01;

  std::size_t dim() const noexcept { return w1.size(); }
  std::size_t node_count() const noexcept { return node_emb.rows(); }
  // Throws DimensionError on inconsistent shapes, DomainError on non-finite
  // entries or an out-of-domain ε or η.
  void validate() const;
  bool operator==(const ModelParams&) const = default;
};

// Entries i.i.d. N(0, 1/d).
ModelParams init_model(std::size_t node_count, std::size_t d, double epsilon, double eta,
                       std::uint64_t seed);

// Q_i = emb[src_i] ⊙ emb[dst_i]. Throws DimensionError for ids out of range.
Matrix edge_embed(const Matrix& node_emb, std::span<const SignedEdge> edges);
Matrix edge_embed(const ModelParams& model, std::span<const SignedEdge> edges);

MarginalParams project_marginals(const Matrix& Q, std::span<const double> w1,
                                 std::span<const double> w2);

// Source of node representations. The free embedding table is the only
// implementation; a message-passing encoder would produce its
// representations from graph structure and map gradients back onto its own
// parameters.
class NodeEncoder {
 public:
  virtual ~NodeEncoder() = default;
  virtual const Matrix& representations() const = 0;
  virtual std::span<double> parameters() = 0;
  // grad_params += ∂L/∂parameters given ∂L/∂representations.
  virtual void backward(const Matrix& grad_repr, std::span<double> grad_params) const = 0;
};

class EmbeddingTable final : public NodeEncoder {
 public:
  explicit EmbeddingTable(Matrix& table) : table_(table) {}
  const Matrix& representations() const override { return table_; }
  std::span<double> parameters() override { return table_.values(); }
  void backward(const Matrix& grad_repr, std::span<double> grad_params) const override;

 private:
  Matrix& table_;
};

enum class CorrelationMode {
  Gramian,   // R from the edge embeddings
  Identity,  // R = I, edges independent given their marginals
  Fixed,     // a frozen factor supplied by the caller
};

struct LossOptions {
  CorrelationMode mode = CorrelationMode::Gramian;
  // Rows aligned with the observed edges; required for Fixed.
  const FactorView* fixed = nullptr;
  double logdet_gradient_scale = 1.0;
};

struct ModelGradient {
  Matrix node_emb;
  std::vector<double> w1;
  std::vector<double> w2;
};

// Loss over the observed edges, with the gradient if `grad` is non-null.
LossValue model_loss(const ModelParams& model, std::span<const SignedEdge> observed,
                     const SmoothLabels& labels, const LossOptions& opt,
                     ModelGradient* grad = nullptr);

struct CheckpointMeta {
  std::size_t edge_count = 0;
  std::uint64_t seed = 0;
};

// Text checkpoint: header `signcop-model n V d epsilon eta seed`, then the
// rows of node_emb, w1 and w2 at 17 significant digits.
void write_checkpoint(std::ostream& out, const ModelParams& model, const CheckpointMeta& meta);
ModelParams read_checkpoint(std::istream& in, CheckpointMeta* meta = nullptr);
void save_checkpoint(const std::filesystem::path& path, const ModelParams& model,
                     const CheckpointMeta& meta);
ModelParams load_checkpoint(const std::filesystem::path& path, CheckpointMeta* meta = nullptr);

}  // namespace signcop
