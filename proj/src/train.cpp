#include "signcop/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "signcop/copula.hpp"
#include "signcop/error.hpp"
#include "signcop/kernels.hpp"
#include "signcop/metrics.hpp"
#include "signcop/rng.hpp"

namespace signcop {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_config(const TrainConfig& cfg) {
  if (cfg.d == 0) throw ConfigError("d must be >= 1");
  if (!(cfg.epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
  check_eta(cfg.eta);
  if (!(cfg.step_size >= 0.0) || !std::isfinite(cfg.step_size))
    throw ConfigError("step_size must be a finite value >= 0");
  if (cfg.max_epochs == 0) throw ConfigError("max_epochs must be >= 1");
  if (cfg.patience == 0) throw ConfigError("patience must be >= 1");
  if (cfg.optimizer == Optimizer::Adam &&
      !(cfg.adam_beta1 >= 0.0 && cfg.adam_beta1 < 1.0 && cfg.adam_beta2 >= 0.0 &&
        cfg.adam_beta2 < 1.0 && cfg.adam_epsilon > 0.0))
    throw ConfigError("adam: betas must lie in [0, 1) and epsilon must be > 0");
}

bool finite(const LossValue& v) {
  return std::isfinite(v.total) && std::isfinite(v.logdet_term) && std::isfinite(v.quad_term) &&
         std::isfinite(v.marginal_term);
}

[[noreturn]] void diverged(std::size_t epoch, const LossValue& v) {
  std::ostringstream os;
  os << "non-finite loss at epoch " << epoch << ":";
  if (!std::isfinite(v.logdet_term)) os << " log-determinant term = " << v.logdet_term << ';';
  if (!std::isfinite(v.quad_term)) os << " quadratic term = " << v.quad_term << ';';
  if (!std::isfinite(v.marginal_term)) os << " marginal term = " << v.marginal_term << ';';
  os << " total = " << v.total;
  throw NumericalError(os.str());
}

// Loss and gradient; parameters that leave the marginal domain or break
// the factorization make the loss +∞ so backtracking can retreat.
struct Evaluated {
  LossValue value;
  ModelGradient grad;
  bool ok = false;
};

Evaluated evaluate(const ModelParams& model, std::span<const SignedEdge> observed,
                   const SmoothLabels& labels, const LossOptions& opt) {
  Evaluated e;
  try {
    e.value = model_loss(model, observed, labels, opt, &e.grad);
    e.ok = finite(e.value);
  } catch (const DomainError&) {
    e.value.total = e.value.marginal_term = std::numeric_limits<double>::quiet_NaN();
  } catch (const NumericalError&) {
    e.value.total = e.value.logdet_term = std::numeric_limits<double>::quiet_NaN();
  }
  return e;
}

void gd_update(const ModelParams& from, const ModelGradient& g, double scale, ModelParams& to) {
  to = from;
  kernels::axpy(-scale, g.node_emb.values(), to.node_emb.values());
  kernels::axpy(-scale, g.w1, to.w1);
  kernels::axpy(-scale, g.w2, to.w2);
}

class Adam {
 public:
  Adam(const TrainConfig& cfg, std::size_t n) : cfg_(cfg), m_(n, 0.0), v_(n, 0.0) {}

  void step(ModelParams& p, const ModelGradient& g, double scale) {
    ++t_;
    const double c1 = 1.0 - std::pow(cfg_.adam_beta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(cfg_.adam_beta2, static_cast<double>(t_));
    std::size_t k = 0;
    auto apply = [&](std::span<double> theta, std::span<const double> grad) {
      for (std::size_t i = 0; i < theta.size(); ++i, ++k) {
        const double gi = grad[i] * scale;
        m_[k] = cfg_.adam_beta1 * m_[k] + (1.0 - cfg_.adam_beta1) * gi;
        v_[k] = cfg_.adam_beta2 * v_[k] + (1.0 - cfg_.adam_beta2) * gi * gi;
        theta[i] -= cfg_.step_size * (m_[k] / c1) / (std::sqrt(v_[k] / c2) + cfg_.adam_epsilon);
      }
    };
    EmbeddingTable table(p.node_emb);
    apply(table.parameters(), g.node_emb.values());
    apply(p.w1, g.w1);
    apply(p.w2, g.w2);
  }

 private:
  const TrainConfig& cfg_;
  std::vector<double> m_, v_;
  std::size_t t_ = 0;
};

struct ValScore {
  double auc = kNaN;
  double f1 = 0.0;
};

bool better(const ValScore& a, const ValScore& best, bool first) {
  if (first) return true;
  const double aa = std::isnan(a.auc) ? -1.0 : a.auc;
  const double bb = std::isnan(best.auc) ? -1.0 : best.auc;
  if (aa != bb) return aa > bb;
  return a.f1 > best.f1;
}

}  // namespace

SignedGraph arrange(const SignedGraph& g, const EdgeSplit& split) {
  if (split.total() != g.edge_count() || split.edge_order.size() != g.edge_count())
    throw DimensionError("split does not match the graph's edge count");
  return reorder_edges(g, split.edge_order);
}

Prediction predict_edges(const ModelParams& model, const SignedGraph& arranged,
                         std::size_t m_observed, std::size_t begin, std::size_t count,
                         CorrelationMode mode, const CorrelationFactor* fixed,
                         const PredictOptions& opt) {
  const std::size_t n = arranged.edge_count();
  if (m_observed == 0 || begin < m_observed || begin + count > n || count == 0)
    throw DimensionError("predict_edges: invalid row ranges");
  const std::span<const SignedEdge> edges(arranged.edges);
  const auto obs_edges = edges.subspan(0, m_observed);
  const auto tgt_edges = edges.subspan(begin, count);

  const Matrix Q_obs = edge_embed(model, obs_edges);
  const Matrix Q_tgt = edge_embed(model, tgt_edges);
  const MarginalParams p_obs = project_marginals(Q_obs, model.w1, model.w2);
  const MarginalParams p_tgt = project_marginals(Q_tgt, model.w1, model.w2);

  std::vector<int> hard(m_observed);
  for (std::size_t i = 0; i < m_observed; ++i) hard[i] = obs_edges[i].sign;
  const LatentVector z_obs = z_transform(smooth_labels(hard, model.eta), p_obs);

  LowRankGaussian cond;
  switch (mode) {
    case CorrelationMode::Gramian: {
      // Normalization is row-wise, so the factor of a row subset is the
      // subset of the factor rows.
      const CorrelationFactor f_obs = build_factor(Q_obs, model.epsilon);
      const CorrelationFactor f_tgt = build_factor(Q_tgt, model.epsilon);
      cond = conditional_woodbury(f_obs.view(), f_tgt.view(), z_obs);
      break;
    }
    case CorrelationMode::Fixed: {
      if (!fixed || fixed->rows() != n)
        throw DimensionError("predict_edges: fixed factor must cover every edge");
      const FactorView all = fixed->view();
      cond = conditional_woodbury(all.row_block(0, m_observed), all.row_block(begin, count), z_obs);
      break;
    }
    case CorrelationMode::Identity:
      cond.mean.assign(count, 0.0);
      cond.cov_factor = Matrix(count, 1);
      cond.cov_diag.assign(count, 1.0);
      break;
  }
  return predict(cond, p_tgt, opt);
}

TrainResult train(const SignedGraph& g, const EdgeSplit& split, const TrainConfig& cfg,
                  const CorrelationFactor* fixed) {
  check_config(cfg);
  if (split.m_train == 0 || split.m_val == 0)
    throw ConfigError("training needs non-empty train and validation ranges");
  const SignedGraph arranged = arrange(g, split);
  const std::size_t m = split.m_train;
  if (cfg.correlation == CorrelationMode::Fixed && (!fixed || fixed->rows() != g.edge_count()))
    throw ConfigError("fixed correlation mode needs a factor over every edge");

  const std::span<const SignedEdge> observed(arranged.edges.data(), m);
  std::vector<int> hard(m);
  for (std::size_t i = 0; i < m; ++i) hard[i] = observed[i].sign;
  const SmoothLabels labels = smooth_labels(hard, cfg.eta);
  std::vector<int> val_truth;
  for (std::size_t i = m; i < m + split.m_val; ++i) val_truth.push_back(arranged.edges[i].sign);
  const bool val_two_class =
      std::count(val_truth.begin(), val_truth.end(), 1) > 0 &&
      std::count(val_truth.begin(), val_truth.end(), -1) > 0;

  FactorView fixed_obs;
  LossOptions lopt;
  lopt.mode = cfg.correlation;
  if (cfg.correlation == CorrelationMode::Fixed) {
    fixed_obs = fixed->view().row_block(0, m);
    lopt.fixed = &fixed_obs;
  }

  TrainResult result;
  result.model = init_model(g.node_count, cfg.d, cfg.epsilon, cfg.eta, cfg.seed);
  TrainReport& rep = result.report;
  Evaluated cur = evaluate(result.model, observed, labels, lopt);
  if (!cur.ok) diverged(0, cur.value);

  const double per_edge = 1.0 / static_cast<double>(m);
  double lr = cfg.step_size;
  std::optional<Adam> adam;
  if (cfg.optimizer == Optimizer::Adam)
    adam.emplace(cfg, result.model.node_emb.size() + 2 * cfg.d);

  ValScore best;
  std::size_t best_epoch = 0;
  ModelParams trial;
  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    rep.loss_trace.push_back(cur.value.total);
    if (adam) {
      trial = result.model;
      adam->step(trial, cur.grad, per_edge);
      Evaluated next = evaluate(trial, observed, labels, lopt);
      if (!next.ok) diverged(epoch, next.value);
      result.model = std::move(trial);
      cur = std::move(next);
    } else {
      bool accepted = false;
      for (std::size_t h = 0; h <= cfg.max_halvings; ++h) {
        gd_update(result.model, cur.grad, lr * per_edge, trial);
        Evaluated next = evaluate(trial, observed, labels, lopt);
        if (next.ok && next.value.total <= cur.value.total) {
          result.model = std::move(trial);
          cur = std::move(next);
          accepted = true;
          break;
        }
        if (h == cfg.max_halvings) {
          if (!next.ok) diverged(epoch, next.value);
          break;
        }
        lr *= 0.5;
        ++rep.step_halvings;
      }
      if (!accepted) {
        rep.stop_reason = "no decrease after step halving";
        rep.loss_trace.pop_back();
        break;
      }
    }

    const Prediction val = predict_edges(result.model, arranged, m, m, split.m_val,
                                         cfg.correlation, fixed);
    ValScore score;
    score.f1 = macro_f1(val.labels, val_truth);
    if (val_two_class) score.auc = auc(val.scores, val_truth);
    rep.val_auc_trace.push_back(score.auc);
    rep.val_f1_trace.push_back(score.f1);
    if (better(score, best, best_epoch == 0)) {
      best = score;
      best_epoch = epoch;
    } else if (epoch - best_epoch >= cfg.patience) {
      rep.stop_reason = "validation patience exhausted";
      break;
    }
  }
  if (rep.stop_reason.empty()) rep.stop_reason = "max epochs reached";
  rep.epochs_run = rep.loss_trace.size();
  rep.epochs_to_converge = std::min(best_epoch, rep.epochs_run);
  rep.best_val_auc = best.auc;
  rep.best_val_f1 = best.f1;
  rep.final_step_size = lr;
  if (auto fit = fit_convergence_rate(rep.loss_trace)) {
    rep.fitted_rate = fit->rate;
    rep.fitted_rate_r2 = fit->r_squared;
  }
  return result;
}

GradCheckReport gradient_check(const ModelParams& model, std::span<const SignedEdge> observed,
                               const SmoothLabels& labels, const GradCheckOptions& opt) {
  ModelGradient grad;
  model_loss(model, observed, labels, opt.loss, &grad);
  GradCheckReport rep;
  ModelParams probe = model;
  auto check = [&](double& coord, double analytic, const std::string& name) {
    const double saved = coord;
    coord = saved + opt.h;
    const double up = model_loss(probe, observed, labels, opt.loss).total;
    coord = saved - opt.h;
    const double down = model_loss(probe, observed, labels, opt.loss).total;
    coord = saved;
    const double numeric = (up - down) / (2.0 * opt.h);
    const double err =
        std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), opt.floor});
    ++rep.coordinates;
    if (err > rep.max_rel_error || rep.worst_coordinate.empty()) {
      rep.max_rel_error = err;
      rep.worst_coordinate = name;
      rep.worst_analytic = analytic;
      rep.worst_numeric = numeric;
    }
  };
  for (std::size_t k = 0; k < model.dim(); ++k)
    check(probe.w1[k], grad.w1[k], "w1[" + std::to_string(k) + "]");
  for (std::size_t k = 0; k < model.dim(); ++k)
    check(probe.w2[k], grad.w2[k], "w2[" + std::to_string(k) + "]");

  std::vector<bool> touched(model.node_count(), false);
  for (const auto& e : observed) touched.at(e.src) = touched.at(e.dst) = true;
  for (std::size_t v = 0; v < model.node_count(); ++v)
    if (!touched[v])
      for (double x : grad.node_emb.row(v)) rep.untouched_nonzero += x != 0.0;

  Rng rng(opt.seed);
  const std::size_t total = model.node_emb.size();
  for (std::size_t s = 0; s < std::min(opt.emb_samples, total); ++s) {
    const std::size_t idx = rng.below(total);
    const std::size_t v = idx / model.dim();
    const std::size_t k = idx % model.dim();
    check(probe.node_emb(v, k), grad.node_emb(v, k),
          "node_emb[" + std::to_string(v) + "][" + std::to_string(k) + "]");
  }
  rep.passed = rep.max_rel_error < opt.tol && rep.untouched_nonzero == 0;
  return rep;
}

std::optional<RateFit> fit_convergence_rate(std::span<const double> loss_trace) {
  const std::size_t n = loss_trace.size();
  if (n < 10) return std::nullopt;
  for (double v : loss_trace)
    if (!std::isfinite(v)) return std::nullopt;
  const double l_star = *std::min_element(loss_trace.begin(), loss_trace.end()) - 1e-6;
  const double g0 = loss_trace.front() - l_star;
  if (!(loss_trace.front() > l_star + 1e-6)) return std::nullopt;  // never decreased
  std::size_t end = n;
  while (end > 0 && loss_trace[end - 1] - l_star < 1e-2 * g0) --end;
  const std::size_t begin = end / 2;
  if (end - begin < 5) return std::nullopt;

  const double cnt = static_cast<double>(end - begin);
  double mx = 0.0, my = 0.0;
  for (std::size_t k = begin; k < end; ++k) {
    mx += static_cast<double>(k);
    my += std::log(loss_trace[k] - l_star);
  }
  mx /= cnt;
  my /= cnt;
  double vxx = 0.0, vxy = 0.0, vyy = 0.0;
  for (std::size_t k = begin; k < end; ++k) {
    const double dx = static_cast<double>(k) - mx;
    const double dy = std::log(loss_trace[k] - l_star) - my;
    vxx += dx * dx;
    vxy += dx * dy;
    vyy += dy * dy;
  }
  const double slope = vxy / vxx;
  RateFit fit;
  fit.rate = std::exp(slope);
  fit.r_squared = vyy > 0.0 ? (vxy * vxy) / (vxx * vyy) : 1.0;
  fit.window_begin = begin;
  fit.window_end = end;
  if (!(fit.rate > 0.0 && fit.rate < 1.0)) return std::nullopt;
  return fit;
}

}  // namespace signcop
