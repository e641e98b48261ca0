#include "signcop/model.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "signcop/error.hpp"
#include "signcop/kernels.hpp"
#include "signcop/normal.hpp"
#include "signcop/rng.hpp"

namespace signcop {

void ModelParams::validate() const {
  const std::size_t d = dim();
  if (d == 0 || w2.size() != d || node_emb.cols() != d)
    throw DimensionError("model: embedding width and projection lengths disagree");
  if (!(epsilon > 0.0)) throw DomainError("model: epsilon must be > 0");
  if (!(eta > 0.0 && eta < 0.5)) throw DomainError("model: eta must lie in (0, 0.5)");
  auto finite = [](std::span<const double> v) {
    for (double x : v)
      if (!std::isfinite(x)) return false;
    return true;
  };
  if (!finite(node_emb.values()) || !finite(w1) || !finite(w2))
    throw DomainError("model: non-finite parameter");
}

ModelParams init_model(std::size_t node_count, std::size_t d, double epsilon, double eta,
                       std::uint64_t seed) {
  if (d == 0) throw ConfigError("embedding dimension must be >= 1");
  ModelParams m;
  m.epsilon = epsilon;
  m.eta = eta;
  m.node_emb = Matrix(node_count, d);
  m.w1.resize(d);
  m.w2.resize(d);
  Rng rng(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (double& v : m.node_emb.values()) v = scale * rng.normal();
  for (double& v : m.w1) v = scale * rng.normal();
  for (double& v : m.w2) v = scale * rng.normal();
  m.validate();
  return m;
}

Matrix edge_embed(const Matrix& node_emb, std::span<const SignedEdge> edges) {
  Matrix q(edges.size(), node_emb.cols());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (edges[i].src >= node_emb.rows() || edges[i].dst >= node_emb.rows())
      throw DimensionError("edge_embed: node id out of range");
    kernels::hadamard(node_emb.row(edges[i].src), node_emb.row(edges[i].dst), q.row(i));
  }
  return q;
}

Matrix edge_embed(const ModelParams& model, std::span<const SignedEdge> edges) {
  return edge_embed(model.node_emb, edges);
}

MarginalParams project_marginals(const Matrix& Q, std::span<const double> w1,
                                 std::span<const double> w2) {
  if (w1.size() != Q.cols() || w2.size() != Q.cols())
    throw DimensionError("project_marginals: projection length does not match Q");
  MarginalParams p;
  p.a.resize(Q.rows());
  p.t.resize(Q.rows());
  kernels::gemv(Q, w1, p.a);
  kernels::gemv(Q, w2, p.t);
  for (double& v : p.a) v = std::exp(v);
  for (double& v : p.t) v = sigmoid(v);
  return p;
}

void EmbeddingTable::backward(const Matrix& grad_repr, std::span<double> grad_params) const {
  if (grad_params.size() != grad_repr.size() || grad_repr.size() != table_.size())
    throw DimensionError("embedding table: gradient shape mismatch");
  kernels::axpy(1.0, grad_repr.values(), grad_params);
}

LossValue model_loss(const ModelParams& model, std::span<const SignedEdge> observed,
                     const SmoothLabels& labels, const LossOptions& opt, ModelGradient* grad) {
  const std::size_t m = observed.size();
  const std::size_t d = model.dim();
  if (labels.size() != m) throw DimensionError("model_loss: labels do not match edges");
  if (m == 0) throw DimensionError("model_loss: no observed edges");
  if (opt.mode == CorrelationMode::Fixed && (!opt.fixed || opt.fixed->rows() != m))
    throw DimensionError("model_loss: fixed factor must cover the observed edges");

  const Matrix Q = edge_embed(model, observed);
  std::vector<double> alpha(m), beta(m);
  kernels::gemv(Q, model.w1, alpha);
  kernels::gemv(Q, model.w2, beta);

  // Per edge, with x = α + tℓ and ℓ = log((1−ȳ)/ȳ): u = σ(−x), z = Φ⁻¹(u).
  std::vector<double> t(m), ell(m), u(m), z(m), log_r(m);
  LossValue v;
  for (std::size_t i = 0; i < m; ++i) {
    const double y = labels.values[i];
    t[i] = sigmoid(beta[i]);
    ell[i] = std::log1p(-y) - std::log(y);
    const double x = alpha[i] + t[i] * ell[i];
    u[i] = sigmoid(-x);
    z[i] = std_normal_icdf(u[i], sigmoid(x));
    // log(u(1−u) / φ(z)) = log |du/dx| − log φ(z)
    log_r[i] = log_sigmoid(-x) + log_sigmoid(x) - std_normal_log_pdf(z[i]);
    v.marginal_term += rb_log_pdf(y, std::exp(alpha[i]), t[i]);
  }

  CopulaGradient cg;
  CorrelationFactor factor;
  if (opt.mode != CorrelationMode::Identity) {
    FactorView view;
    if (opt.mode == CorrelationMode::Gramian) {
      factor = build_factor(Q, model.epsilon);
      view = factor.view();
    } else {
      view = *opt.fixed;
    }
    if (grad) {
      cg = copula_term_gradient(z, view, opt.logdet_gradient_scale);
    } else {
      const Capacitance cap(view);
      cg.logdet = cap.log_det_R();
      cg.quad = cap.quad(z) - kernels::dot(z, z);
    }
    v.logdet_term = cg.logdet;
    v.quad_term = cg.quad;
  }
  v.total = 0.5 * v.logdet_term + 0.5 * v.quad_term - v.marginal_term;
  if (!grad) return v;

  std::vector<double> g_alpha(m), g_beta(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double y = labels.values[i];
    const double ly = std::log(y);
    const double l1y = std::log1p(-y);
    const double dlogf_dt = 1.0 / t[i] + ly + l1y - 2.0 * ((1.0 - u[i]) * l1y + u[i] * ly);
    // dz/dα = −u(1−u)/φ(z), dz/dt = ℓ·dz/dα
    const double dz_dalpha = cg.dz.empty() ? 0.0 : -std::exp(log_r[i]);
    const double dz = cg.dz.empty() ? 0.0 : cg.dz[i];
    g_alpha[i] = -(2.0 * u[i] - 1.0) + dz * dz_dalpha;
    const double g_t = -dlogf_dt + dz * dz_dalpha * ell[i];
    g_beta[i] = g_t * t[i] * (1.0 - t[i]);
  }

  Matrix gQ = opt.mode == CorrelationMode::Gramian ? factor_backward(Q, factor, cg.dP, cg.dK)
                                                   : Matrix(m, d);
  for (std::size_t i = 0; i < m; ++i) {
    kernels::axpy(g_alpha[i], model.w1, gQ.row(i));
    kernels::axpy(g_beta[i], model.w2, gQ.row(i));
  }
  grad->w1.assign(d, 0.0);
  grad->w2.assign(d, 0.0);
  kernels::gemv_t(Q, g_alpha, grad->w1);
  kernels::gemv_t(Q, g_beta, grad->w2);

  Matrix g_repr(model.node_count(), d);
  std::vector<double> tmp(d);
  for (std::size_t i = 0; i < m; ++i) {
    const auto gi = gQ.row(i);
    kernels::hadamard(gi, model.node_emb.row(observed[i].dst), tmp);
    kernels::axpy(1.0, tmp, g_repr.row(observed[i].src));
    kernels::hadamard(gi, model.node_emb.row(observed[i].src), tmp);
    kernels::axpy(1.0, tmp, g_repr.row(observed[i].dst));
  }
  grad->node_emb = std::move(g_repr);
  return v;
}

namespace {

void put(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

void put_row(std::ostream& out, std::span<const double> row) {
  for (std::size_t k = 0; k < row.size(); ++k) {
    if (k) out << ' ';
    put(out, row[k]);
  }
  out << '\n';
}

void get_row(std::istream& in, std::span<double> row, std::size_t line_no) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("checkpoint: unexpected end of file", line_no);
  std::istringstream ls(line);
  for (double& v : row)
    if (!(ls >> v)) throw ParseError("checkpoint: too few values", line_no);
  std::string extra;
  if (ls >> extra) throw ParseError("checkpoint: too many values", line_no);
}

}  // namespace

void write_checkpoint(std::ostream& out, const ModelParams& model, const CheckpointMeta& meta) {
  out << "signcop-model " << meta.edge_count << ' ' << model.node_count() << ' ' << model.dim()
      << ' ';
  put(out, model.epsilon);
  out << ' ';
  put(out, model.eta);
  out << ' ' << meta.seed << '\n';
  for (std::size_t i = 0; i < model.node_count(); ++i) put_row(out, model.node_emb.row(i));
  put_row(out, model.w1);
  put_row(out, model.w2);
}

ModelParams read_checkpoint(std::istream& in, CheckpointMeta* meta) {
  std::string header;
  if (!std::getline(in, header)) throw ParseError("checkpoint: empty file", 1);
  std::istringstream hs(header);
  std::string magic;
  CheckpointMeta m;
  std::size_t nodes = 0, d = 0;
  ModelParams p;
  if (!(hs >> magic >> m.edge_count >> nodes >> d >> p.epsilon >> p.eta >> m.seed) ||
      magic != "signcop-model" || d == 0)
    throw ParseError("checkpoint: malformed header", 1);
  p.node_emb = Matrix(nodes, d);
  p.w1.resize(d);
  p.w2.resize(d);
  std::size_t line_no = 2;
  for (std::size_t i = 0; i < nodes; ++i) get_row(in, p.node_emb.row(i), line_no++);
  get_row(in, p.w1, line_no++);
  get_row(in, p.w2, line_no++);
  p.validate();
  if (meta) *meta = m;
  return p;
}

void save_checkpoint(const std::filesystem::path& path, const ModelParams& model,
                     const CheckpointMeta& meta) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_checkpoint(out, model, meta);
  if (!out) throw Error("write failed: " + path.string());
}

ModelParams load_checkpoint(const std::filesystem::path& path, CheckpointMeta* meta) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return read_checkpoint(in, meta);
}

}  // namespace signcop
