#include "signcop/correlation.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "signcop/error.hpp"
#include "signcop/kernels.hpp"
#include "signcop/linalg.hpp"
#include "signcop/rng.hpp"

namespace signcop {

FactorView FactorView::row_block(std::size_t begin, std::size_t count) const {
  if (begin + count > rows()) throw DimensionError("factor view: row block out of range");
  return {P.row_block(begin, count), K.subspan(begin, count)};
}

CorrelationFactor build_factor(const Matrix& Q, double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ConfigError("epsilon must be > 0");
  if (Q.rows() == 0 || Q.cols() == 0) throw DimensionError("build_factor: Q must be non-empty");
  const std::size_t n = Q.rows();
  CorrelationFactor f;
  f.epsilon = epsilon;
  f.P = Matrix(n, Q.cols());
  f.K_diag.resize(n);
  f.D_diag.resize(n);
  kernels::row_sq_norms(Q, f.D_diag);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = f.D_diag[i] + epsilon;
    const double d = std::sqrt(s);
    f.D_diag[i] = d;
    f.K_diag[i] = epsilon / s;
    const auto qi = Q.row(i);
    auto pi = f.P.row(i);
    for (std::size_t k = 0; k < qi.size(); ++k) pi[k] = qi[k] / d;
  }
  return f;
}

CorrelationFactor identity_factor(std::size_t n, std::size_t d, double epsilon) {
  return build_factor(Matrix(n, d), epsilon);
}

Matrix factor_backward(const Matrix& Q, const CorrelationFactor& f, const Matrix& grad_P,
                       std::span<const double> grad_K) {
  const std::size_t n = Q.rows();
  const std::size_t d = Q.cols();
  if (f.rows() != n || grad_P.rows() != n || grad_P.cols() != d || grad_K.size() != n)
    throw DimensionError("factor_backward: shape mismatch");
  Matrix g(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    const double D = f.D_diag[i];
    const double s = D * D;
    const auto qi = Q.row(i);
    const auto gpi = grad_P.row(i);
    const double qg = kernels::dot(qi, gpi);
    const double c_q = -qg / (s * D) - 2.0 * f.epsilon * grad_K[i] / (s * s);
    auto gi = g.row(i);
    for (std::size_t k = 0; k < d; ++k) gi[k] = gpi[k] / D + c_q * qi[k];
  }
  return g;
}

Matrix dense_R(FactorView f, std::size_t guard) {
  if (f.rows() > guard)
    throw SizeGuardError("dense correlation refused: " + std::to_string(f.rows()) +
                         " rows exceed the guard of " + std::to_string(guard));
  Matrix r = multiply_abt(f.P, f.P);
  for (std::size_t i = 0; i < f.rows(); ++i) r(i, i) += f.K[i];
  return r;
}

BlockFactor partition(FactorView f, std::size_t m) {
  const std::size_t n = f.rows();
  if (m == 0 || m >= n) throw DimensionError("partition: need 0 < m < n");
  const std::size_t d = f.rank();
  BlockFactor b;
  b.P0 = Matrix(m, d);
  b.P1 = Matrix(n - m, d);
  std::copy(f.P.data, f.P.data + m * d, b.P0.data());
  std::copy(f.P.data + m * d, f.P.data + n * d, b.P1.data());
  b.K0_diag.assign(f.K.begin(), f.K.begin() + static_cast<std::ptrdiff_t>(m));
  b.K1_diag.assign(f.K.begin() + static_cast<std::ptrdiff_t>(m), f.K.end());
  return b;
}

Matrix ideal_correlation(const SignedGraph& g, std::size_t guard) {
  const std::size_t n = g.edge_count();
  if (n > guard)
    throw SizeGuardError("ideal correlation refused: " + std::to_string(n) +
                         " edges exceed the guard of " + std::to_string(guard));
  std::vector<std::vector<std::size_t>> incident(g.node_count);
  for (std::size_t i = 0; i < n; ++i) {
    incident.at(g.edges[i].src).push_back(i);
    incident.at(g.edges[i].dst).push_back(i);
  }
  Matrix r = Matrix::identity(n);
  for (const auto& list : incident)
    for (std::size_t a : list)
      for (std::size_t b : list)
        if (a != b) r(a, b) = g.edges[a].sign == g.edges[b].sign ? 1.0 : -1.0;
  return r;
}

namespace {

void check_target(const Matrix& R_star) {
  if (R_star.rows() != R_star.cols() || R_star.rows() == 0)
    throw Error("nearest factor: target must be a non-empty square matrix");
  for (std::size_t i = 0; i < R_star.rows(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (R_star(i, j) != R_star(j, i)) throw Error("nearest factor: target is not symmetric");
}

// ‖R(Q) − R*‖²_F, optionally with its gradient with respect to Q.
double frobenius_residual(const Matrix& Q, const Matrix& R_star, double epsilon, Matrix* grad) {
  const CorrelationFactor f = build_factor(Q, epsilon);
  Matrix E = dense_R(f.view(), R_star.rows());
  double obj = 0.0;
  for (std::size_t i = 0; i < E.size(); ++i) {
    E.data()[i] -= R_star.data()[i];
    obj += E.data()[i] * E.data()[i];
  }
  if (grad) {
    // d/dP = 4 E P (E symmetric), d/dK_i = 2 E_ii.
    const std::size_t n = Q.rows();
    Matrix gP = multiply(E, f.P);
    for (double& v : gP.values()) v *= 4.0;
    std::vector<double> gK(n);
    for (std::size_t i = 0; i < n; ++i) gK[i] = 2.0 * E(i, i);
    *grad = factor_backward(Q, f, gP, gK);
  }
  return obj;
}

}  // namespace

double nearest_factor_objective(const Matrix& Q, const Matrix& R_star, double epsilon) {
  check_target(R_star);
  if (Q.rows() != R_star.rows()) throw DimensionError("nearest factor: row mismatch");
  const double n = static_cast<double>(Q.rows());
  return frobenius_residual(Q, R_star, epsilon, nullptr) / (n * n);
}

NearestFactorFit fit_nearest_factor(const Matrix& R_star, const NearestFactorOptions& opt) {
  check_target(R_star);
  const std::size_t n = R_star.rows();
  if (n > opt.guard)
    throw SizeGuardError("nearest factor refused: " + std::to_string(n) +
                         " rows exceed the guard of " + std::to_string(opt.guard));
  if (opt.d == 0) throw ConfigError("nearest factor: d must be >= 1");
  if (!(opt.step_size > 0.0)) throw ConfigError("nearest factor: step size must be > 0");
  const double nn = static_cast<double>(n);

  NearestFactorFit fit;
  fit.Q = Matrix(n, opt.d);
  Rng rng(opt.seed);
  for (double& v : fit.Q.values()) v = opt.init_scale * rng.normal();

  Matrix grad;
  double obj = frobenius_residual(fit.Q, R_star, opt.epsilon, &grad);
  fit.initial_objective = obj / (nn * nn);
  fit.objective_trace.push_back(fit.initial_objective);
  Matrix trial(n, opt.d);
  for (std::size_t step = 0; step < opt.steps; ++step) {
    double lr = opt.step_size * nn;  // gradient of the /n² objective times n
    bool accepted = false;
    for (std::size_t h = 0; h <= opt.max_halvings; ++h, lr *= 0.5) {
      const double scale = lr / (nn * nn);
      for (std::size_t i = 0; i < trial.size(); ++i)
        trial.data()[i] = fit.Q.data()[i] - scale * grad.data()[i];
      const double cand = frobenius_residual(trial, R_star, opt.epsilon, nullptr);
      if (cand <= obj) {
        std::swap(fit.Q, trial);
        obj = frobenius_residual(fit.Q, R_star, opt.epsilon, &grad);
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    ++fit.steps_taken;
    fit.objective_trace.push_back(obj / (nn * nn));
  }
  fit.final_objective = obj / (nn * nn);
  return fit;
}

void write_factor(std::ostream& out, const CorrelationFactor& f) {
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
  };
  for (std::size_t i = 0; i < f.rows(); ++i) {
    const auto row = f.P.row(i);
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out << ' ';
      put(row[k]);
    }
    out << '\n';
  }
  for (std::size_t i = 0; i < f.rows(); ++i) {
    if (i) out << ' ';
    put(f.K_diag[i]);
  }
  out << '\n' << f.rows() << ' ' << f.rank() << ' ';
  put(f.epsilon);
  out << '\n';
}

CorrelationFactor read_factor(std::istream& in) {
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) lines.push_back(line);
  if (lines.size() < 2) throw ParseError("factor dump: missing metadata", lines.size());
  std::istringstream meta(lines.back());
  std::size_t n = 0, d = 0;
  double eps = 0.0;
  if (!(meta >> n >> d >> eps) || n == 0 || d == 0 || !(eps > 0.0))
    throw ParseError("factor dump: malformed metadata `n d epsilon`", lines.size());
  if (lines.size() != n + 2) throw ParseError("factor dump: expected n + 2 lines", lines.size());
  CorrelationFactor f;
  f.epsilon = eps;
  f.P = Matrix(n, d);
  f.K_diag.resize(n);
  f.D_diag.resize(n);
  auto read_row = [&](std::size_t line_no, std::span<double> dst) {
    std::istringstream ls(lines[line_no]);
    for (double& v : dst)
      if (!(ls >> v)) throw ParseError("factor dump: too few values", line_no + 1);
    std::string extra;
    if (ls >> extra) throw ParseError("factor dump: too many values", line_no + 1);
  };
  for (std::size_t i = 0; i < n; ++i) read_row(i, f.P.row(i));
  read_row(n, f.K_diag);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(f.K_diag[i] > 0.0)) throw ParseError("factor dump: K entries must be > 0", n + 1);
    f.D_diag[i] = std::sqrt(eps / f.K_diag[i]);
  }
  return f;
}

void save_factor(const std::filesystem::path& path, const CorrelationFactor& f) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  write_factor(out, f);
  if (!out) throw Error("write failed: " + path.string());
}

CorrelationFactor load_factor(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return read_factor(in);
}

CorrelationFactor permute_rows(const CorrelationFactor& f, std::span<const std::size_t> order) {
  if (order.size() != f.rows()) throw DimensionError("permute_rows: order length mismatch");
  CorrelationFactor out;
  out.epsilon = f.epsilon;
  out.P = Matrix(f.rows(), f.rank());
  out.K_diag.resize(f.rows());
  out.D_diag.resize(f.rows());
  for (std::size_t i = 0; i < order.size(); ++i) {
    const std::size_t src = order[i];
    if (src >= f.rows()) throw DimensionError("permute_rows: index out of range");
    const auto from = f.P.row(src);
    std::copy(from.begin(), from.end(), out.P.row(i).begin());
    out.K_diag[i] = f.K_diag[src];
    out.D_diag[i] = f.D_diag[src];
  }
  return out;
}

}  // namespace signcop
